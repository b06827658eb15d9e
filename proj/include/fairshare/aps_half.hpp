#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fairshare/instance.hpp"
#include "fairshare/rational.hpp"
#include "fairshare/valuation.hpp"

namespace fairshare {

/// Per-agent APS over-estimates driving the guess-and-decrease loop.
/// Initialized to floor(b_i * m) and monotone non-increasing over a run.
struct GuessVector {
    std::vector<long long> estimates;
};

inline GuessVector initial_guesses(const Instance& inst) {
    GuessVector g;
    for (const Agent& a : inst.agents)
        g.estimates.push_back((a.entitlement * Rational(inst.num_goods)).floor().convert_to<long long>());
    return g;
}

inline long long half_ceil(long long s) { return (s + 1) / 2; }

/// Agent ids ascending by ceil(s_i/2)/b_i, exact rational comparison,
/// ties by ascending id.
inline std::vector<int> sorted_agent_order(const Instance& inst, const GuessVector& guesses) {
    std::vector<int> order(inst.agents.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        Rational ka = Rational(half_ceil(guesses.estimates[static_cast<std::size_t>(a)])) /
                      inst.agents[static_cast<std::size_t>(a)].entitlement;
        Rational kb = Rational(half_ceil(guesses.estimates[static_cast<std::size_t>(b)])) /
                      inst.agents[static_cast<std::size_t>(b)].entitlement;
        return ka < kb;
    });
    return order;
}

/// One step of a successful existence pass, for invariant checking:
/// the pool value the agent saw and how many goods were already taken.
struct PassStep {
    int agent = 0;
    long long assigned_before = 0;  // |S| at this step
    long long pool_value = 0;       // v_i(M \ S)
};

struct UnsatisfiedAgent {
    int agent = 0;
};

struct PassOutcome {
    std::variant<Allocation, UnsatisfiedAgent> result;
    std::vector<PassStep> steps;
    long long oracle_calls = 0;
};

/// One pass of the existence algorithm: agents in the given order each try
/// to carve a non-wasteful bundle of exactly ceil(s_i/2) goods out of the
/// remaining pool. Returns the first agent that cannot, or the completed
/// allocation with leftovers assigned by the standard rule.
inline PassOutcome aps_existence_pass(const Instance& inst, const GuessVector& guesses,
                                      const std::vector<int>& order) {
    PassOutcome out;
    GoodSet pool = inst.all_goods();
    Allocation alloc;
    alloc.bundles.assign(inst.agents.size(), {});
    long long assigned = 0;
    for (int i : order) {
        const Agent& a = inst.agents[static_cast<std::size_t>(i)];
        long long need = half_ceil(guesses.estimates[static_cast<std::size_t>(i)]);
        Rational pool_value = value(a.valuation, pool);
        ++out.oracle_calls;
        if (!pool_value.is_integer())
            throw std::domain_error("aps_existence_pass: non-binary valuation for agent " +
                                    std::to_string(i));
        out.steps.push_back({i, assigned, pool_value.num().convert_to<long long>()});
        if (pool_value < Rational(need)) {
            out.result = UnsatisfiedAgent{i};
            return out;
        }
        if (need > 0) {
            NonWastefulWitness w = extract_non_wasteful(a.valuation, pool);
            ++out.oracle_calls;
            GoodSet bundle = trim_non_wasteful(w, need);
            alloc.bundles[static_cast<std::size_t>(i)] = bundle;
            pool = set_difference(pool, bundle);
            assigned += need;
        }
    }
    assign_leftovers(inst, alloc);
    out.result = std::move(alloc);
    return out;
}

struct DecrementEvent {
    int agent = 0;
    long long guess_before = 0;  // s_i just before the decrement
};

struct HalfApsResult {
    Allocation allocation;
    std::vector<long long> achieved;  // v_i(A_i), always integers here
    GuessVector final_guesses;
    int passes = 0;
    long long oracle_calls = 0;
    std::vector<DecrementEvent> decrements;
    std::vector<PassStep> final_pass_steps;
};

/// Guess-and-decrease wrapper: start from the trivial upper bounds
/// s_i = floor(b_i m), re-sort, run an existence pass, and decrement the
/// unsatisfied agent's guess until a pass succeeds. Terminates within
/// sum_i floor(b_i m) + 1 <= m + 1 passes.
inline HalfApsResult solve_half_aps(const Instance& inst) {
    HalfApsResult res;
    GuessVector guesses = initial_guesses(inst);
    for (;;) {
        std::vector<int> order = sorted_agent_order(inst, guesses);
        PassOutcome pass = aps_existence_pass(inst, guesses, order);
        ++res.passes;
        res.oracle_calls += pass.oracle_calls;
        if (auto* unsat = std::get_if<UnsatisfiedAgent>(&pass.result)) {
            long long& s = guesses.estimates[static_cast<std::size_t>(unsat->agent)];
            // s_i = 0 can never fail (a zero-value bundle always exists).
            if (s <= 0)
                throw std::logic_error("solve_half_aps: unsatisfied agent with zero guess");
            res.decrements.push_back({unsat->agent, s});
            --s;
            continue;
        }
        res.allocation = std::get<Allocation>(std::move(pass.result));
        res.final_pass_steps = std::move(pass.steps);
        break;
    }
    res.final_guesses = guesses;
    for (std::size_t i = 0; i < inst.agents.size(); ++i) {
        Rational v = value(inst.agents[i].valuation, res.allocation.bundles[i]);
        ++res.oracle_calls;
        res.achieved.push_back(v.num().convert_to<long long>());
    }
    return res;
}

/// Equal-entitlement reduction: APS >= MMS at entitlements 1/n, so the
/// half-APS output is also half-MMS.
inline HalfApsResult solve_half_mms(const Instance& inst) {
    Instance eq = inst;
    for (Agent& a : eq.agents)
        a.entitlement = Rational(1) / Rational(static_cast<long long>(eq.agents.size()));
    return solve_half_aps(eq);
}

inline nlohmann::json half_aps_result_json(const HalfApsResult& res) {
    nlohmann::json j;
    j["allocation"] = allocation_json(res.allocation);
    j["achieved"] = res.achieved;
    j["finalGuesses"] = res.final_guesses.estimates;
    j["passes"] = res.passes;
    j["oracleCalls"] = res.oracle_calls;
    return j;
}

}  // namespace fairshare
