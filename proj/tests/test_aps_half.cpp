#include <doctest.h>

#include <random>

#include "fairshare/aps_half.hpp"
#include "fairshare/generate.hpp"
#include "fairshare/shares.hpp"

using namespace fairshare;

namespace {

Instance equal_binadd_pair(int m, GoodSet d0, GoodSet d1) {
    Instance inst;
    inst.num_goods = m;
    inst.agents.push_back({Rational::parse("1/2"), BinaryAdditive{std::move(d0)}});
    inst.agents.push_back({Rational::parse("1/2"), BinaryAdditive{std::move(d1)}});
    return inst;
}

Instance random_bxos_instance(std::mt19937_64& rng, int max_n, int max_m) {
    GeneratorSpec spec;
    spec.family = RandomFamily::BinaryXos;
    spec.n = 2 + static_cast<int>(rng() % static_cast<unsigned>(max_n - 1));
    spec.m = 4 + static_cast<int>(rng() % static_cast<unsigned>(max_m - 3));
    spec.seed = rng();
    return gen_random(spec);
}

}  // namespace

TEST_CASE("existence pass splits two contested goods") {
    Instance inst = equal_binadd_pair(2, {0, 1}, {0, 1});
    GuessVector g{{1, 1}};
    auto out = aps_existence_pass(inst, g, sorted_agent_order(inst, g));
    auto* alloc = std::get_if<Allocation>(&out.result);
    REQUIRE(alloc != nullptr);
    for (int i = 0; i < 2; ++i) {
        CHECK(alloc->bundles[static_cast<std::size_t>(i)].size() == 1);
        CHECK(value(inst.agents[static_cast<std::size_t>(i)].valuation,
                    alloc->bundles[static_cast<std::size_t>(i)]) == Rational(1));
    }
    CHECK(validate_allocation(inst, *alloc).empty());
}

TEST_CASE("existence pass with all-zero guesses satisfies everyone") {
    Instance inst = equal_binadd_pair(2, {0, 1}, {0, 1});
    GuessVector g{{0, 0}};
    auto out = aps_existence_pass(inst, g, sorted_agent_order(inst, g));
    auto* alloc = std::get_if<Allocation>(&out.result);
    REQUIRE(alloc != nullptr);
    // leftover rule: equal entitlements, everything to agent 0
    CHECK(alloc->bundles[0] == GoodSet{0, 1});
    CHECK(alloc->bundles[1].empty());
}

TEST_CASE("existence pass on the tight instance with guesses (0, 1)") {
    Instance inst = gen_thm43(2);
    GuessVector g{{0, 1}};
    std::vector<int> order = sorted_agent_order(inst, g);
    CHECK(order == std::vector<int>{0, 1});  // ceil(0/2)/b = 0 sorts first
    auto out = aps_existence_pass(inst, g, order);
    auto* alloc = std::get_if<Allocation>(&out.result);
    REQUIRE(alloc != nullptr);
    CHECK(value(inst.agents[1].valuation, alloc->bundles[1]) >= Rational(1));
}

TEST_CASE("existence pass reports the first unsatisfiable agent") {
    // one good, both agents demand one; the second in order starves
    Instance inst = equal_binadd_pair(1, {0}, {0});
    GuessVector g{{1, 1}};
    auto out = aps_existence_pass(inst, g, sorted_agent_order(inst, g));
    auto* unsat = std::get_if<UnsatisfiedAgent>(&out.result);
    REQUIRE(unsat != nullptr);
    CHECK(unsat->agent == 1);
}

TEST_CASE("solve_half_aps on fully contested goods, equal entitlements") {
    Instance inst = equal_binadd_pair(4, {0, 1, 2, 3}, {0, 1, 2, 3});
    auto res = solve_half_aps(inst);
    CHECK(res.passes == 1);
    CHECK(res.final_guesses.estimates == std::vector<long long>{2, 2});
    // each takes ceil(2/2) = 1 good, leftovers land on agent 0
    CHECK(res.achieved[0] >= 1);
    CHECK(res.achieved[1] >= 1);
    Rational aps0 = exact_aps(inst, 0).value;
    CHECK(aps0 == Rational(2));
    CHECK(Rational(res.achieved[0]) >= Rational((aps0 / Rational(2)).ceil()));
}

TEST_CASE("solve_half_aps single agent takes everything") {
    Instance inst;
    inst.num_goods = 5;
    inst.agents.push_back({Rational(1), BinaryXos{{{0, 1, 2, 3, 4}}}});
    auto res = solve_half_aps(inst);
    CHECK(res.final_guesses.estimates == std::vector<long long>{5});
    CHECK(res.achieved[0] == 5);  // ceil(5/2) carved, leftovers return the rest
    CHECK(res.allocation.bundles[0].size() == 5);
}

TEST_CASE("half-APS guarantee against the exact oracle (fuzz)") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        Instance inst = random_bxos_instance(rng, 3, 7);
        auto res = solve_half_aps(inst);
        CHECK(validate_allocation(inst, res.allocation).empty());
        CHECK(res.allocation.complete);
        for (int i = 0; i < inst.num_agents(); ++i) {
            Rational aps = exact_aps(inst, i).value;
            CHECK(Rational(res.achieved[static_cast<std::size_t>(i)]) >=
                  Rational((aps / Rational(2)).ceil()));
        }
    }
}

TEST_CASE("guess safety: decrements only happen above the true APS") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        Instance inst = random_bxos_instance(rng, 3, 7);
        auto res = solve_half_aps(inst);
        std::vector<Rational> aps;
        for (int i = 0; i < inst.num_agents(); ++i) aps.push_back(exact_aps(inst, i).value);
        for (const DecrementEvent& d : res.decrements)
            CHECK(Rational(d.guess_before) > aps[static_cast<std::size_t>(d.agent)]);
        for (int i = 0; i < inst.num_agents(); ++i)
            CHECK(Rational(res.final_guesses.estimates[static_cast<std::size_t>(i)]) >=
                  aps[static_cast<std::size_t>(i)]);
    }
}

TEST_CASE("pass budget is at most m + 1") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        Instance inst = random_bxos_instance(rng, 4, 9);
        auto res = solve_half_aps(inst);
        CHECK(res.passes <= inst.num_goods + 1);
        CHECK(static_cast<int>(res.decrements.size()) == res.passes - 1);
    }
}

TEST_CASE("successful-pass bundles are exact: v_i(B_i) = |B_i| = ceil(s_i/2)") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        Instance inst = random_bxos_instance(rng, 3, 8);
        auto res = solve_half_aps(inst);
        // replay the final pass and check each carved bundle
        std::vector<int> order = sorted_agent_order(inst, res.final_guesses);
        GoodSet pool = inst.all_goods();
        for (int i : order) {
            const Agent& a = inst.agents[static_cast<std::size_t>(i)];
            long long need = half_ceil(res.final_guesses.estimates[static_cast<std::size_t>(i)]);
            if (need == 0) continue;
            auto w = extract_non_wasteful(a.valuation, pool);
            GoodSet bundle = trim_non_wasteful(w, need);
            CHECK(static_cast<long long>(bundle.size()) == need);
            CHECK(value(a.valuation, bundle) == Rational(need));
            // the solver's bundle contains this carve (leftovers only add)
            CHECK(set_intersection(res.allocation.bundles[static_cast<std::size_t>(i)], bundle) ==
                  bundle);
            pool = set_difference(pool, bundle);
        }
    }
}

TEST_CASE("pool residual bound on the final pass") {
    std::mt19937_64 rng(27);
    for (int trial = 0; trial < 15; ++trial) {
        Instance inst = random_bxos_instance(rng, 3, 7);
        auto res = solve_half_aps(inst);
        for (const PassStep& st : res.final_pass_steps) {
            const Agent& a = inst.agents[static_cast<std::size_t>(st.agent)];
            Rational aps = exact_aps(inst, st.agent).value;
            Rational bound = aps - Rational((a.entitlement * Rational(st.assigned_before)).floor());
            CHECK(Rational(st.pool_value) >= bound);
        }
    }
}

TEST_CASE("solve_half_mms with disjoint unit clauses gives everyone a good") {
    Instance inst;
    inst.num_goods = 3;
    for (int i = 0; i < 3; ++i)
        inst.agents.push_back({Rational::parse("1/3"), BinaryXos{{{0}, {1}, {2}}}});
    auto res = solve_half_mms(inst);
    for (int i = 0; i < 3; ++i) {
        CHECK(exact_mms(inst, i).value == Rational(1));
        CHECK(res.achieved[static_cast<std::size_t>(i)] >= 1);
    }
}

TEST_CASE("solve_half_mms guarantee against the exact oracle (fuzz)") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        Instance inst = random_bxos_instance(rng, 3, 7);
        auto res = solve_half_mms(inst);
        for (int i = 0; i < inst.num_agents(); ++i) {
            Rational mms = exact_mms(inst, i).value;
            CHECK(Rational(res.achieved[static_cast<std::size_t>(i)]) >=
                  Rational((mms / Rational(2)).ceil()));
        }
    }
}

TEST_CASE("solver is deterministic") {
    std::mt19937_64 rng(39);
    for (int trial = 0; trial < 5; ++trial) {
        Instance inst = random_bxos_instance(rng, 4, 9);
        auto a = solve_half_aps(inst);
        auto b = solve_half_aps(inst);
        CHECK(half_aps_result_json(a) == half_aps_result_json(b));
        CHECK(a.decrements.size() == b.decrements.size());
    }
}

TEST_CASE("non-binary valuations are rejected by the pass") {
    Instance inst;
    inst.num_goods = 2;
    inst.agents.push_back({Rational(1), Additive{Clause{{0, Rational::parse("1/2")},
                                                        {1, Rational::parse("1/2")}}}});
    GuessVector g = initial_guesses(inst);
    CHECK_THROWS_AS(aps_existence_pass(inst, g, sorted_agent_order(inst, g)), std::domain_error);
}
