#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "fairshare/instance.hpp"
#include "fairshare/rational.hpp"
#include "fairshare/shares.hpp"
#include "fairshare/valuation.hpp"

namespace fairshare {

/// Structural + value consistency check for a WMMS partition witness:
/// a labeled partition of all goods whose floor value min_j v_i(S_j) b_i/b_j
/// matches the recorded one exactly.
inline void validate_wmms_witness(const Instance& inst, int agent,
                                  const WmmsPartitionWitness& w) {
    if (w.partition.size() != inst.agents.size())
        throw std::invalid_argument("wmms witness: partition needs one bundle per agent");
    std::vector<int> seen(static_cast<std::size_t>(inst.num_goods), 0);
    for (const GoodSet& b : w.partition)
        for (int g : b) {
            if (g < 0 || g >= inst.num_goods)
                throw std::invalid_argument("wmms witness: good " + std::to_string(g) +
                                            " out of range");
            if (seen[static_cast<std::size_t>(g)]++)
                throw std::invalid_argument("wmms witness: good " + std::to_string(g) +
                                            " assigned twice");
        }
    for (int g = 0; g < inst.num_goods; ++g)
        if (!seen[static_cast<std::size_t>(g)])
            throw std::invalid_argument("wmms witness: good " + std::to_string(g) + " unassigned");
    const Agent& a = inst.agents[static_cast<std::size_t>(agent)];
    Rational floor_value(-1);
    bool set = false;
    for (std::size_t j = 0; j < w.partition.size(); ++j) {
        Rational v = value(a.valuation, w.partition[j]) * a.entitlement /
                     inst.agents[j].entitlement;
        if (!set || v < floor_value) {
            floor_value = v;
            set = true;
        }
    }
    if (floor_value != w.floor_value)
        throw std::invalid_argument("wmms witness: floor value " + w.floor_value.str() +
                                    " does not match recomputed " + floor_value.str());
}

struct WmmsRoundRobinResult {
    Allocation allocation;
    std::vector<Rational> achieved;           // v_i(A_i)
    std::vector<GoodSet> targets;             // B^i as selected (before any removals)
    std::vector<int> guiding_clause;          // index into clause_list(v_i)
    std::vector<Rational> target_clause_value;  // l^i(B^i) at selection time
    std::vector<Rational> own_clause_value;     // l^i(A_i) at the end
};

/// Round-robin-like allocator for XOS valuations with known WMMS
/// partitions. Agents are processed in descending-entitlement order; in
/// round one each picks an untouched bundle from the prefix of her own
/// partition and an additive clause attaining its value, then everyone
/// repeatedly takes their clause-heaviest remaining good until their target
/// is exhausted. Guarantees v_i(A_i) >= WMMS_i / n.
inline WmmsRoundRobinResult wmms_round_robin(const Instance& inst,
                                             const std::vector<WmmsPartitionWitness>& partitions) {
    const int n = inst.num_agents();
    if (static_cast<int>(partitions.size()) != n)
        throw std::invalid_argument("wmms_round_robin: need one partition per agent");
    for (int i = 0; i < n; ++i) validate_wmms_witness(inst, i, partitions[static_cast<std::size_t>(i)]);

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return inst.agents[static_cast<std::size_t>(a)].entitlement >
               inst.agents[static_cast<std::size_t>(b)].entitlement;
    });

    std::vector<std::vector<Clause>> clauses;
    for (const Agent& a : inst.agents) clauses.push_back(clause_list(a.valuation));

    auto clause_value = [](const Clause& c, const GoodSet& s) {
        Rational sum = 0;
        for (int g : s) {
            auto it = c.find(g);
            if (it != c.end()) sum += it->second;
        }
        return sum;
    };

    WmmsRoundRobinResult res;
    res.allocation.bundles.assign(static_cast<std::size_t>(n), {});
    res.targets.assign(static_cast<std::size_t>(n), {});
    res.guiding_clause.assign(static_cast<std::size_t>(n), -1);
    res.target_clause_value.assign(static_cast<std::size_t>(n), Rational(0));

    std::vector<GoodSet> remaining_target(static_cast<std::size_t>(n));
    std::vector<bool> selected(static_cast<std::size_t>(n), false);
    std::vector<bool> active(static_cast<std::size_t>(n), true);
    GoodSet first_picks;

    auto take_good = [&](int i, int g) {
        res.allocation.bundles[static_cast<std::size_t>(i)] =
            set_union(res.allocation.bundles[static_cast<std::size_t>(i)], {g});
        for (int j = 0; j < n; ++j)
            if (selected[static_cast<std::size_t>(j)])
                remaining_target[static_cast<std::size_t>(j)] =
                    set_difference(remaining_target[static_cast<std::size_t>(j)], {g});
    };

    int active_count = n;
    for (int round = 1; active_count > 0; ++round) {
        for (int k = 0; k < n; ++k) {
            int i = order[static_cast<std::size_t>(k)];
            if (round == 1) {
                // Candidates: bundles this agent intends for agents with
                // entitlement at least hers. Exactly k goods are gone, so
                // among these k+1 bundles one is untouched.
                const auto& part = partitions[static_cast<std::size_t>(i)].partition;
                int chosen = -1;
                for (int pos = 0; pos <= k; ++pos) {
                    const GoodSet& cand = part[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])];
                    if (set_intersection(cand, first_picks).empty()) {
                        chosen = order[static_cast<std::size_t>(pos)];
                        break;
                    }
                }
                if (chosen < 0)
                    throw std::logic_error(
                        "wmms_round_robin: no untouched candidate bundle (invalid partition?)");
                const GoodSet& target = part[static_cast<std::size_t>(chosen)];
                res.targets[static_cast<std::size_t>(i)] = target;
                remaining_target[static_cast<std::size_t>(i)] = target;
                selected[static_cast<std::size_t>(i)] = true;
                const auto& cls = clauses[static_cast<std::size_t>(i)];
                int best_t = 0;
                Rational best_v = clause_value(cls[0], target);
                for (std::size_t t = 1; t < cls.size(); ++t) {
                    Rational v = clause_value(cls[t], target);
                    if (v > best_v) {
                        best_v = v;
                        best_t = static_cast<int>(t);
                    }
                }
                res.guiding_clause[static_cast<std::size_t>(i)] = best_t;
                res.target_clause_value[static_cast<std::size_t>(i)] = best_v;
            }
            if (!active[static_cast<std::size_t>(i)]) continue;
            GoodSet& bundle = remaining_target[static_cast<std::size_t>(i)];
            if (bundle.empty()) {
                active[static_cast<std::size_t>(i)] = false;
                --active_count;
                continue;
            }
            const Clause& li =
                clauses[static_cast<std::size_t>(i)]
                       [static_cast<std::size_t>(res.guiding_clause[static_cast<std::size_t>(i)])];
            int pick = bundle.front();
            Rational pick_w = clause_value(li, {pick});
            for (int g : bundle) {
                Rational w = clause_value(li, {g});
                if (w > pick_w) {  // strict: weight ties go to the lowest id
                    pick_w = w;
                    pick = g;
                }
            }
            take_good(i, pick);
            if (round == 1) first_picks = set_union(first_picks, {pick});
        }
    }

    assign_leftovers(inst, res.allocation);
    for (int i = 0; i < n; ++i) {
        res.achieved.push_back(value(inst.agents[static_cast<std::size_t>(i)].valuation,
                                     res.allocation.bundles[static_cast<std::size_t>(i)]));
        const Clause& li = clauses[static_cast<std::size_t>(i)]
                                  [static_cast<std::size_t>(res.guiding_clause[static_cast<std::size_t>(i)])];
        // Clause accounting uses the bundle before leftovers would matter;
        // extra goods only add non-negative clause weight.
        res.own_clause_value.push_back(
            clause_value(li, res.allocation.bundles[static_cast<std::size_t>(i)]));
    }
    return res;
}

namespace detail {

inline const GoodSet& desired_set(const Instance& inst, int agent, const char* who) {
    const auto* ba = std::get_if<BinaryAdditive>(&inst.agents[static_cast<std::size_t>(agent)].valuation);
    if (!ba)
        throw std::invalid_argument(std::string(who) + ": agent " + std::to_string(agent) +
                                    " does not have a binary additive valuation");
    return ba->desired;
}

}  // namespace detail

/// WMMS partition for one binary-additive agent: desired goods are placed
/// one at a time into the bundle with the smallest |S_j|/b_j (lowest index
/// on ties). The per-step balance invariant (|S_j|-1)/b_j <= min_k |S_k|/b_k
/// is asserted after every assignment.
inline WmmsPartitionWitness wmms_partition_binadd(const Instance& inst, int agent) {
    const int n = inst.num_agents();
    const GoodSet& desired = detail::desired_set(inst, agent, "wmms_partition_binadd");

    std::vector<GoodSet> bundles(static_cast<std::size_t>(n));
    auto load = [&](int j) {
        return Rational(static_cast<long long>(bundles[static_cast<std::size_t>(j)].size())) /
               inst.agents[static_cast<std::size_t>(j)].entitlement;
    };
    for (int g : desired) {
        int jmin = 0;
        Rational best = load(0);
        for (int j = 1; j < n; ++j) {
            Rational l = load(j);
            if (l < best) {
                best = l;
                jmin = j;
            }
        }
        bundles[static_cast<std::size_t>(jmin)].push_back(g);  // desired is ascending, stays sorted
        Rational min_load = load(0);
        for (int j = 1; j < n; ++j) min_load = std::min(min_load, load(j));
        for (int j = 0; j < n; ++j) {
            Rational sz(static_cast<long long>(bundles[static_cast<std::size_t>(j)].size()));
            if ((sz - Rational(1)) / inst.agents[static_cast<std::size_t>(j)].entitlement > min_load)
                throw std::logic_error("wmms_partition_binadd: balance invariant violated");
        }
    }

    WmmsPartitionWitness w;
    const Rational& bi = inst.agents[static_cast<std::size_t>(agent)].entitlement;
    Rational floor_value(-1);
    bool set = false;
    for (int j = 0; j < n; ++j) {
        Rational v = Rational(static_cast<long long>(bundles[static_cast<std::size_t>(j)].size())) *
                     bi / inst.agents[static_cast<std::size_t>(j)].entitlement;
        if (!set || v < floor_value) {
            floor_value = v;
            set = true;
        }
    }
    // Undesired goods carry zero value for this agent; park them with the
    // largest-entitlement bundle per the standard leftover rule.
    std::size_t target = 0;
    for (std::size_t j = 1; j < static_cast<std::size_t>(n); ++j)
        if (inst.agents[j].entitlement > inst.agents[target].entitlement) target = j;
    bundles[target] = set_union(bundles[target], set_difference(inst.all_goods(), desired));
    w.partition = std::move(bundles);
    w.floor_value = floor_value;
    return w;
}

struct WmmsBinaddResult {
    Allocation allocation;
    std::vector<Rational> achieved;
};

/// Exact WMMS allocator for binary additive valuations: repeatedly let the
/// active agent with the smallest |A_i|/b_i (lowest id on ties) take the
/// lowest-id remaining good she desires; agents with nothing left to take
/// drop out.
inline WmmsBinaddResult wmms_allocate_binadd(const Instance& inst) {
    const int n = inst.num_agents();
    std::vector<GoodSet> desired;
    for (int i = 0; i < n; ++i) desired.push_back(detail::desired_set(inst, i, "wmms_allocate_binadd"));

    WmmsBinaddResult res;
    res.allocation.bundles.assign(static_cast<std::size_t>(n), {});
    std::vector<bool> active(static_cast<std::size_t>(n), true);
    int active_count = n;
    auto load = [&](int i) {
        return Rational(static_cast<long long>(res.allocation.bundles[static_cast<std::size_t>(i)].size())) /
               inst.agents[static_cast<std::size_t>(i)].entitlement;
    };
    while (active_count > 0) {
        int imin = -1;
        Rational best;
        for (int i = 0; i < n; ++i) {
            if (!active[static_cast<std::size_t>(i)]) continue;
            Rational l = load(i);
            if (imin < 0 || l < best) {
                best = l;
                imin = i;
            }
        }
        GoodSet& d = desired[static_cast<std::size_t>(imin)];
        if (d.empty()) {
            active[static_cast<std::size_t>(imin)] = false;
            --active_count;
            continue;
        }
        int g = d.front();
        res.allocation.bundles[static_cast<std::size_t>(imin)] =
            set_union(res.allocation.bundles[static_cast<std::size_t>(imin)], {g});
        for (auto& dj : desired) dj = set_difference(dj, {g});
    }
    assign_leftovers(inst, res.allocation);
    for (int i = 0; i < n; ++i)
        res.achieved.push_back(value(inst.agents[static_cast<std::size_t>(i)].valuation,
                                     res.allocation.bundles[static_cast<std::size_t>(i)]));
    return res;
}

inline nlohmann::json rationals_json(const std::vector<Rational>& xs) {
    nlohmann::json j = nlohmann::json::array();
    for (const Rational& x : xs) j.push_back(x.str());
    return j;
}

inline nlohmann::json wmms_round_robin_result_json(const WmmsRoundRobinResult& res,
                                                   const std::vector<WmmsPartitionWitness>& used) {
    nlohmann::json j;
    j["allocation"] = allocation_json(res.allocation);
    j["achieved"] = rationals_json(res.achieved);
    nlohmann::json jp = nlohmann::json::array();
    for (const auto& w : used) {
        nlohmann::json part = nlohmann::json::array();
        for (const GoodSet& b : w.partition) part.push_back(b);
        jp.push_back(part);
    }
    j["wmmsPartitionsUsed"] = jp;
    return j;
}

inline nlohmann::json wmms_binadd_result_json(const WmmsBinaddResult& res) {
    nlohmann::json j;
    j["allocation"] = allocation_json(res.allocation);
    j["achieved"] = rationals_json(res.achieved);
    return j;
}

}  // namespace fairshare
