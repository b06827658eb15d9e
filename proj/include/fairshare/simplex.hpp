#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fairshare/rational.hpp"

namespace fairshare {

/// Linear program in the form
///   maximize c.x  subject to  A x (rel) b,  x >= 0
/// where rel[i] is LE, EQ, or GE per row. All data exact rationals.
struct LinearProgram {
    enum Rel { LE = -1, EQ = 0, GE = 1 };

    std::vector<std::vector<Rational>> rows;
    std::vector<Rational> rhs;
    std::vector<Rel> rel;
    std::vector<Rational> objective;

    void add_row(std::vector<Rational> coeffs, Rel r, Rational b) {
        rows.push_back(std::move(coeffs));
        rel.push_back(r);
        rhs.push_back(std::move(b));
    }
};

struct LpSolution {
    enum Status { Optimal, Infeasible, Unbounded } status = Infeasible;
    Rational objective;
    std::vector<Rational> x;
};

/// Two-phase tableau simplex with Bland's rule (lowest-index entering and
/// leaving variable), which guarantees termination without any perturbation.
/// Exact rational pivots throughout; intended for the small LPs the share
/// oracles produce, not for scale.
class SimplexSolver {
public:
    explicit SimplexSolver(const LinearProgram& lp) : num_structural_(lp.objective.size()) {
        build(lp);
    }

    LpSolution solve(const LinearProgram& lp) {
        // Phase 1: minimize the artificial sum.
        if (!artificial_cols_.empty()) {
            set_phase1_objective();
            run();
            if (objective_value() != Rational(0)) return {LpSolution::Infeasible, Rational(0), {}};
            expel_artificials();
        }
        set_phase2_objective(lp);
        if (!run()) return {LpSolution::Unbounded, Rational(0), {}};
        LpSolution sol;
        sol.status = LpSolution::Optimal;
        sol.objective = objective_value();
        sol.x.assign(num_structural_, Rational(0));
        for (std::size_t r = 0; r < basis_.size(); ++r)
            if (basis_[r] < num_structural_) sol.x[basis_[r]] = tableau_[r].back();
        return sol;
    }

private:
    void build(const LinearProgram& lp) {
        const std::size_t m = lp.rows.size();
        std::size_t num_slacks = 0;
        for (auto r : lp.rel)
            if (r != LinearProgram::EQ) ++num_slacks;
        // Column layout: structural | slack/surplus | artificial | rhs.
        std::size_t slack_at = num_structural_;
        std::size_t art_at = num_structural_ + num_slacks;
        num_artificial_start_ = art_at;

        // An artificial is needed for EQ rows and for rows whose slack
        // cannot serve as the starting basic variable.
        std::vector<std::ptrdiff_t> slack_col(m, -1);
        std::vector<bool> needs_art(m, false);
        for (std::size_t i = 0; i < m; ++i) {
            bool neg = lp.rhs[i] < Rational(0);
            LinearProgram::Rel r = lp.rel[i];
            if (neg) r = static_cast<LinearProgram::Rel>(-r);  // row will be negated
            if (r != LinearProgram::EQ) slack_col[i] = static_cast<std::ptrdiff_t>(slack_at++);
            needs_art[i] = (r != LinearProgram::LE);
        }
        std::size_t num_art = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (needs_art[i]) ++num_art;
        num_cols_ = art_at + num_art + 1;

        tableau_.assign(m, std::vector<Rational>(num_cols_, Rational(0)));
        basis_.assign(m, 0);
        std::size_t next_art = art_at;
        for (std::size_t i = 0; i < m; ++i) {
            bool neg = lp.rhs[i] < Rational(0);
            Rational sign = neg ? Rational(-1) : Rational(1);
            for (std::size_t j = 0; j < num_structural_; ++j)
                tableau_[i][j] = sign * (j < lp.rows[i].size() ? lp.rows[i][j] : Rational(0));
            tableau_[i].back() = sign * lp.rhs[i];
            LinearProgram::Rel r = lp.rel[i];
            if (neg) r = static_cast<LinearProgram::Rel>(-r);
            if (slack_col[i] >= 0)
                tableau_[i][static_cast<std::size_t>(slack_col[i])] =
                    (r == LinearProgram::LE) ? Rational(1) : Rational(-1);
            if (needs_art[i]) {
                tableau_[i][next_art] = 1;
                basis_[i] = next_art;
                artificial_cols_.push_back(next_art);
                ++next_art;
            } else {
                basis_[i] = static_cast<std::size_t>(slack_col[i]);
            }
        }
        cost_.assign(num_cols_, Rational(0));
    }

    void set_phase1_objective() {
        // Maximize -(sum of artificials): cost row starts as sum of the
        // artificial rows (reduced costs w.r.t. the artificial basis).
        std::fill(cost_.begin(), cost_.end(), Rational(0));
        for (std::size_t r = 0; r < basis_.size(); ++r) {
            if (basis_[r] < num_artificial_start_) continue;
            for (std::size_t j = 0; j < num_cols_; ++j) cost_[j] += tableau_[r][j];
        }
        for (std::size_t a : artificial_cols_) cost_[a] = 0;
        objective_offset_ = 0;
        for (std::size_t r = 0; r < basis_.size(); ++r)
            if (basis_[r] >= num_artificial_start_) objective_offset_ -= tableau_[r].back();
        phase1_ = true;
    }

    void set_phase2_objective(const LinearProgram& lp) {
        std::fill(cost_.begin(), cost_.end(), Rational(0));
        for (std::size_t j = 0; j < num_structural_; ++j) cost_[j] = lp.objective[j];
        // Price out the current basis.
        for (std::size_t r = 0; r < basis_.size(); ++r) {
            Rational cb = cost_[basis_[r]];
            if (cb.is_zero()) continue;
            for (std::size_t j = 0; j < num_cols_; ++j) cost_[j] -= cb * tableau_[r][j];
            cost_[basis_[r]] = 0;  // exact zero, avoids drift in bookkeeping
        }
        objective_offset_ = 0;
        for (std::size_t r = 0; r < basis_.size(); ++r)
            if (basis_[r] < num_structural_)
                objective_offset_ += lp.objective[basis_[r]] * tableau_[r].back();
        phase1_ = false;
    }

    Rational objective_value() const { return objective_offset_; }

    /// Returns false iff unbounded.
    bool run() {
        for (;;) {
            std::ptrdiff_t enter = -1;
            for (std::size_t j = 0; j + 1 < num_cols_; ++j) {
                if (phase1_ && j >= num_artificial_start_) break;
                if (cost_[j] > Rational(0)) {
                    enter = static_cast<std::ptrdiff_t>(j);
                    break;  // Bland: lowest index
                }
            }
            if (enter < 0) return true;
            std::ptrdiff_t leave = -1;
            Rational best_ratio;
            for (std::size_t r = 0; r < tableau_.size(); ++r) {
                const Rational& a = tableau_[r][static_cast<std::size_t>(enter)];
                if (a <= Rational(0)) continue;
                Rational ratio = tableau_[r].back() / a;
                if (leave < 0 || ratio < best_ratio ||
                    (ratio == best_ratio && basis_[r] < basis_[static_cast<std::size_t>(leave)])) {
                    leave = static_cast<std::ptrdiff_t>(r);
                    best_ratio = ratio;
                }
            }
            if (leave < 0) return false;
            pivot(static_cast<std::size_t>(leave), static_cast<std::size_t>(enter));
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        Rational p = tableau_[row][col];
        for (auto& v : tableau_[row]) v /= p;
        for (std::size_t r = 0; r < tableau_.size(); ++r) {
            if (r == row) continue;
            Rational f = tableau_[r][col];
            if (f.is_zero()) continue;
            for (std::size_t j = 0; j < num_cols_; ++j) tableau_[r][j] -= f * tableau_[row][j];
        }
        Rational fc = cost_[col];
        if (!fc.is_zero()) {
            for (std::size_t j = 0; j < num_cols_; ++j) cost_[j] -= fc * tableau_[row][j];
            objective_offset_ += fc * tableau_[row].back();
        }
        basis_[row] = col;
    }

    /// After a zero-sum phase 1, pivot basic artificials out (or drop
    /// redundant rows) so phase 2 never re-enters them.
    void expel_artificials() {
        for (std::size_t r = 0; r < basis_.size();) {
            if (basis_[r] < num_artificial_start_) {
                ++r;
                continue;
            }
            std::ptrdiff_t col = -1;
            for (std::size_t j = 0; j < num_artificial_start_; ++j)
                if (!tableau_[r][j].is_zero()) {
                    col = static_cast<std::ptrdiff_t>(j);
                    break;
                }
            if (col >= 0) {
                pivot(r, static_cast<std::size_t>(col));
                ++r;
            } else {
                tableau_.erase(tableau_.begin() + static_cast<std::ptrdiff_t>(r));
                basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
            }
        }
        // Blank out artificial columns so Bland's scan never selects them.
        for (std::size_t a : artificial_cols_) {
            for (auto& row : tableau_) row[a] = 0;
        }
    }

    std::size_t num_structural_;
    std::size_t num_cols_ = 0;
    std::size_t num_artificial_start_ = 0;
    std::vector<std::vector<Rational>> tableau_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> artificial_cols_;
    std::vector<Rational> cost_;
    Rational objective_offset_;
    bool phase1_ = false;
};

inline LpSolution solve_lp(const LinearProgram& lp) {
    for (const auto& row : lp.rows)
        if (row.size() != lp.objective.size())
            throw std::invalid_argument("solve_lp: row width != objective width");
    SimplexSolver solver(lp);
    return solver.solve(lp);
}

}  // namespace fairshare
