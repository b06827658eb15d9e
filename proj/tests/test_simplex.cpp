#include <doctest.h>

#include "fairshare/simplex.hpp"

using namespace fairshare;

TEST_CASE("basic maximization with <= rows") {
    // max 3x + 2y st x + y <= 4, x + 3y <= 6
    LinearProgram lp;
    lp.objective = {Rational(3), Rational(2)};
    lp.add_row({Rational(1), Rational(1)}, LinearProgram::LE, Rational(4));
    lp.add_row({Rational(1), Rational(3)}, LinearProgram::LE, Rational(6));
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpSolution::Optimal);
    CHECK(sol.objective == Rational(12));
    CHECK(sol.x[0] == Rational(4));
    CHECK(sol.x[1] == Rational(0));
}

TEST_CASE("equality and >= rows through phase 1") {
    // max x + y st x + y = 1, x >= 1/3  ->  optimum 1
    LinearProgram lp;
    lp.objective = {Rational(1), Rational(1)};
    lp.add_row({Rational(1), Rational(1)}, LinearProgram::EQ, Rational(1));
    lp.add_row({Rational(1), Rational(0)}, LinearProgram::GE, Rational::parse("1/3"));
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpSolution::Optimal);
    CHECK(sol.objective == Rational(1));
    CHECK(sol.x[0] + sol.x[1] == Rational(1));
    CHECK(sol.x[0] >= Rational::parse("1/3"));
}

TEST_CASE("infeasible system detected") {
    LinearProgram lp;
    lp.objective = {Rational(1)};
    lp.add_row({Rational(1)}, LinearProgram::LE, Rational(1));
    lp.add_row({Rational(1)}, LinearProgram::GE, Rational(2));
    CHECK(solve_lp(lp).status == LpSolution::Infeasible);
}

TEST_CASE("unbounded objective detected") {
    LinearProgram lp;
    lp.objective = {Rational(1), Rational(0)};
    lp.add_row({Rational(0), Rational(1)}, LinearProgram::LE, Rational(1));
    CHECK(solve_lp(lp).status == LpSolution::Unbounded);
}

TEST_CASE("exact fractional optimum") {
    // max x st 3x <= 1  ->  x = 1/3 exactly
    LinearProgram lp;
    lp.objective = {Rational(1)};
    lp.add_row({Rational(3)}, LinearProgram::LE, Rational(1));
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpSolution::Optimal);
    CHECK(sol.objective == Rational::parse("1/3"));
}

TEST_CASE("negative rhs rows are handled") {
    // max -x st -x >= -2 (i.e. x <= 2), x >= 1 -> optimum -1 at x = 1
    LinearProgram lp;
    lp.objective = {Rational(-1)};
    lp.add_row({Rational(-1)}, LinearProgram::GE, Rational(-2));
    lp.add_row({Rational(1)}, LinearProgram::GE, Rational(1));
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpSolution::Optimal);
    CHECK(sol.objective == Rational(-1));
    CHECK(sol.x[0] == Rational(1));
}

TEST_CASE("solution satisfies every constraint (sanity on a price-style LP)") {
    // max d st p0+p1+p2 = 1, p0+p1 - d >= 1/3, p2 - d >= 1/3
    LinearProgram lp;
    lp.objective = {Rational(0), Rational(0), Rational(0), Rational(1), Rational(-1)};
    lp.add_row({Rational(1), Rational(1), Rational(1), Rational(0), Rational(0)},
               LinearProgram::EQ, Rational(1));
    lp.add_row({Rational(1), Rational(1), Rational(0), Rational(-1), Rational(1)},
               LinearProgram::GE, Rational::parse("1/3"));
    lp.add_row({Rational(0), Rational(0), Rational(1), Rational(-1), Rational(1)},
               LinearProgram::GE, Rational::parse("1/3"));
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpSolution::Optimal);
    // best split: p0+p1 = p2 = 1/2, slack 1/6
    CHECK(sol.objective == Rational::parse("1/6"));
    Rational d = sol.x[3] - sol.x[4];
    CHECK(sol.x[0] + sol.x[1] + sol.x[2] == Rational(1));
    CHECK(sol.x[0] + sol.x[1] - d >= Rational::parse("1/3"));
    CHECK(sol.x[2] - d >= Rational::parse("1/3"));
}
