#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairshare/instance.hpp"
#include "fairshare/rational.hpp"
#include "fairshare/simplex.hpp"
#include "fairshare/valuation.hpp"

namespace fairshare {

/// Enumeration caps for the brute-force oracles. FAIRSHARE_ORACLE_CAP, when
/// set, overrides both (partition count and subset count) with one value.
struct OracleCaps {
    long long max_partitions = 2'000'000;  // n^m for (W)MMS enumeration
    long long max_subsets = 16'384;        // 2^m for APS (m <= 14)

    static OracleCaps from_env() {
        OracleCaps caps;
        if (const char* s = std::getenv("FAIRSHARE_ORACLE_CAP")) {
            long long v = std::atoll(s);
            if (v > 0) {
                caps.max_partitions = v;
                caps.max_subsets = v;
            }
        }
        return caps;
    }
};

class CapExceededError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ShareNotion { APS, MMS, WMMS };

inline const char* notion_name(ShareNotion n) {
    switch (n) {
        case ShareNotion::APS: return "aps";
        case ShareNotion::MMS: return "mms";
        default: return "wmms";
    }
}

struct PriceVector {
    std::vector<Rational> prices;  // >= 0, sums to 1
};

struct WmmsPartitionWitness {
    std::vector<GoodSet> partition;  // bundle j is intended for agent j
    Rational floor_value;            // min_j v_i(S_j) * b_i / b_j
};

struct ShareValue {
    ShareNotion notion = ShareNotion::MMS;
    int agent = 0;
    Rational value;
    std::optional<WmmsPartitionWitness> partition_witness;
    std::optional<PriceVector> price_witness;  // blocks the candidate just above value
};

namespace detail {

inline void check_partition_cap(int n, int m, long long cap, const char* who) {
    long long total = 1;
    for (int i = 0; i < m; ++i) {
        if (total > cap / n) {
            throw CapExceededError(std::string(who) + ": n^m = " + std::to_string(n) + "^" +
                                   std::to_string(m) + " exceeds partition cap " +
                                   std::to_string(cap));
        }
        total *= n;
    }
    if (total > cap)
        throw CapExceededError(std::string(who) + ": n^m exceeds partition cap " +
                               std::to_string(cap));
}

inline void check_subset_cap(int m, long long cap, const char* who) {
    if (m >= 62 || (1LL << m) > cap)
        throw CapExceededError(std::string(who) + ": 2^m = 2^" + std::to_string(m) +
                               " exceeds subset cap " + std::to_string(cap));
}

/// Per-good clause weights of one agent's valuation, as a dense matrix.
template <typename Weight>
std::vector<std::vector<Weight>> clause_matrix(const Valuation& val, int m) {
    std::vector<std::vector<Weight>> out;
    for (const Clause& c : clause_list(val)) {
        std::vector<Weight> row(static_cast<std::size_t>(m), Weight(0));
        for (const auto& [g, w] : c) {
            if constexpr (std::is_same_v<Weight, long long>) {
                row[static_cast<std::size_t>(g)] = w.num().template convert_to<long long>();
            } else {
                row[static_cast<std::size_t>(g)] = w;
            }
        }
        out.push_back(std::move(row));
    }
    return out;
}

inline bool is_binary_class(const Valuation& v) {
    return std::holds_alternative<BinaryXos>(v) || std::holds_alternative<BinaryAdditive>(v);
}

/// Walk every labeled n-partition of goods 0..m-1 in lexicographic label
/// order (good 0 varies slowest), maintaining per-bundle clause sums of one
/// valuation incrementally. `leaf(values, labels)` sees the bundle values
/// v(S_0..S_{n-1}) at each complete assignment.
template <typename Weight, typename Leaf>
void for_each_partition(int m, int n, const std::vector<std::vector<Weight>>& clauses,
                        Leaf&& leaf) {
    const std::size_t num_clauses = clauses.size();
    std::vector<std::vector<Weight>> sums(static_cast<std::size_t>(n),
                                          std::vector<Weight>(num_clauses, Weight(0)));
    std::vector<Weight> values(static_cast<std::size_t>(n), Weight(0));
    std::vector<int> labels(static_cast<std::size_t>(m), 0);

    std::function<void(int)> rec = [&](int g) {
        if (g == m) {
            leaf(values, labels);
            return;
        }
        for (int j = 0; j < n; ++j) {
            auto& bundle = sums[static_cast<std::size_t>(j)];
            Weight saved_value = values[static_cast<std::size_t>(j)];
            Weight best = Weight(0);
            for (std::size_t t = 0; t < num_clauses; ++t) {
                bundle[t] += clauses[t][static_cast<std::size_t>(g)];
                if (bundle[t] > best) best = bundle[t];
            }
            values[static_cast<std::size_t>(j)] = best;
            labels[static_cast<std::size_t>(g)] = j;
            rec(g + 1);
            for (std::size_t t = 0; t < num_clauses; ++t)
                bundle[t] -= clauses[t][static_cast<std::size_t>(g)];
            values[static_cast<std::size_t>(j)] = saved_value;
        }
    };
    rec(0);
}

inline std::vector<GoodSet> labels_to_partition(const std::vector<int>& labels, int n) {
    std::vector<GoodSet> bundles(static_cast<std::size_t>(n));
    for (std::size_t g = 0; g < labels.size(); ++g)
        bundles[static_cast<std::size_t>(labels[g])].push_back(static_cast<int>(g));
    return bundles;
}

inline bool fits_small(const Rational& r) {
    static const BigInt limit = BigInt(1) << 40;
    BigInt n = r.num() < 0 ? BigInt(-r.num()) : r.num();
    return n < limit && r.den() < limit;
}

}  // namespace detail

/// Exact WMMS of one agent by full enumeration of labeled n-partitions
/// (bundle labels are bound to agents and are NOT symmetrized). Ties go to
/// the lexicographically smallest label encoding, which the enumeration
/// order yields for free.
inline ShareValue exact_wmms(const Instance& inst, int agent,
                             const OracleCaps& caps = OracleCaps::from_env()) {
    const int n = inst.num_agents();
    const int m = inst.num_goods;
    detail::check_partition_cap(n, m, caps.max_partitions, "exact_wmms");
    const Agent& a = inst.agents[static_cast<std::size_t>(agent)];

    std::vector<Rational> ratios;  // b_i / b_j per bundle label j
    for (const Agent& other : inst.agents) ratios.push_back(a.entitlement / other.entitlement);

    Rational best(-1);
    std::vector<int> best_labels;

    bool fast = detail::is_binary_class(a.valuation);
    for (const Rational& r : ratios)
        if (!detail::fits_small(r)) fast = false;

    if (fast) {
        // Integer clause sums; the min over bundles compared by
        // cross-multiplication to avoid per-leaf rational churn.
        std::vector<long long> rnum, rden;
        for (const Rational& r : ratios) {
            rnum.push_back(r.num().convert_to<long long>());
            rden.push_back(r.den().convert_to<long long>());
        }
        auto clauses = detail::clause_matrix<long long>(a.valuation, m);
        __int128 best_num = -1, best_den = 1;
        detail::for_each_partition<long long>(
            m, n, clauses, [&](const std::vector<long long>& values, const std::vector<int>& labels) {
                __int128 min_num = 0, min_den = 0;  // den 0 = unset
                for (int j = 0; j < n; ++j) {
                    __int128 vn = static_cast<__int128>(values[static_cast<std::size_t>(j)]) *
                                  rnum[static_cast<std::size_t>(j)];
                    __int128 vd = rden[static_cast<std::size_t>(j)];
                    if (min_den == 0 || vn * min_den < min_num * vd) {
                        min_num = vn;
                        min_den = vd;
                    }
                }
                if (min_num * best_den > best_num * min_den) {
                    best_num = min_num;
                    best_den = min_den;
                    best_labels = labels;
                }
            });
        best = Rational(BigInt(static_cast<long long>(best_num)),
                        BigInt(static_cast<long long>(best_den)));
    } else {
        auto clauses = detail::clause_matrix<Rational>(a.valuation, m);
        detail::for_each_partition<Rational>(
            m, n, clauses, [&](const std::vector<Rational>& values, const std::vector<int>& labels) {
                Rational mn = values[0] * ratios[0];
                for (int j = 1; j < n; ++j) {
                    Rational v = values[static_cast<std::size_t>(j)] * ratios[static_cast<std::size_t>(j)];
                    if (v < mn) mn = v;
                }
                if (mn > best) {
                    best = mn;
                    best_labels = labels;
                }
            });
    }

    ShareValue sv;
    sv.notion = ShareNotion::WMMS;
    sv.agent = agent;
    sv.value = best;
    sv.partition_witness =
        WmmsPartitionWitness{detail::labels_to_partition(best_labels, n), best};
    return sv;
}

/// Exact MMS by enumeration of set partitions in restricted-growth form
/// (bundle labels are exchangeable at equal entitlements, so symmetric
/// labelings are pruned).
inline ShareValue exact_mms(const Instance& inst, int agent,
                            const OracleCaps& caps = OracleCaps::from_env()) {
    const int n = inst.num_agents();
    const int m = inst.num_goods;
    detail::check_partition_cap(n, m, caps.max_partitions, "exact_mms");
    const Agent& a = inst.agents[static_cast<std::size_t>(agent)];

    auto clauses = detail::clause_matrix<Rational>(a.valuation, m);
    const std::size_t num_clauses = clauses.size();
    std::vector<std::vector<Rational>> sums(static_cast<std::size_t>(n),
                                            std::vector<Rational>(num_clauses, Rational(0)));
    std::vector<Rational> values(static_cast<std::size_t>(n), Rational(0));
    std::vector<int> labels(static_cast<std::size_t>(m), 0);
    Rational best(-1);
    std::vector<int> best_labels(static_cast<std::size_t>(m), 0);

    std::function<void(int, int)> rec = [&](int g, int used) {
        if (g == m) {
            Rational mn = values[0];
            for (int j = 1; j < n; ++j)
                if (values[static_cast<std::size_t>(j)] < mn) mn = values[static_cast<std::size_t>(j)];
            if (mn > best) {
                best = mn;
                best_labels = labels;
            }
            return;
        }
        int limit = std::min(n - 1, used);  // restricted growth: at most one fresh label
        for (int j = 0; j <= limit; ++j) {
            auto& bundle = sums[static_cast<std::size_t>(j)];
            Rational saved = values[static_cast<std::size_t>(j)];
            Rational bestc(0);
            for (std::size_t t = 0; t < num_clauses; ++t) {
                bundle[t] += clauses[t][static_cast<std::size_t>(g)];
                if (bundle[t] > bestc) bestc = bundle[t];
            }
            values[static_cast<std::size_t>(j)] = bestc;
            labels[static_cast<std::size_t>(g)] = j;
            rec(g + 1, std::max(used, j + 1));
            for (std::size_t t = 0; t < num_clauses; ++t)
                bundle[t] -= clauses[t][static_cast<std::size_t>(g)];
            values[static_cast<std::size_t>(j)] = saved;
        }
    };
    rec(0, 0);

    ShareValue sv;
    sv.notion = ShareNotion::MMS;
    sv.agent = agent;
    sv.value = best;
    sv.partition_witness = WmmsPartitionWitness{detail::labels_to_partition(best_labels, n), best};
    return sv;
}

namespace detail {

/// Values of all 2^m subsets of the good universe under one valuation.
inline std::vector<Rational> subset_value_table(const Valuation& val, int m) {
    auto clauses = clause_matrix<Rational>(val, m);
    const std::size_t total = std::size_t(1) << m;
    std::vector<std::vector<Rational>> clause_sum(clauses.size(),
                                                  std::vector<Rational>(total, Rational(0)));
    std::vector<Rational> values(total, Rational(0));
    for (std::size_t mask = 1; mask < total; ++mask) {
        std::size_t low = mask & (~mask + 1);
        std::size_t rest = mask ^ low;
        int g = std::countr_zero(low);
        Rational v(0);
        for (std::size_t t = 0; t < clauses.size(); ++t) {
            clause_sum[t][mask] = clause_sum[t][rest] + clauses[t][static_cast<std::size_t>(g)];
            if (clause_sum[t][mask] > v) v = clause_sum[t][mask];
        }
        values[mask] = v;
    }
    return values;
}

/// Inclusion-minimal subsets with value >= z. For binary-marginal valuations
/// these are exactly the non-wasteful sets of size z.
inline std::vector<std::uint32_t> minimal_sets_at_least(const std::vector<Rational>& values,
                                                        int m, const Rational& z,
                                                        bool binary_class) {
    const std::uint32_t total = 1u << m;
    std::vector<std::uint32_t> minimal;
    if (binary_class && z.is_integer()) {
        int zi = static_cast<int>(z.num().convert_to<long long>());
        for (std::uint32_t mask = 0; mask < total; ++mask)
            if (std::popcount(mask) == zi && values[mask] == z) minimal.push_back(mask);
        return minimal;
    }
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t mask = 0; mask < total; ++mask)
        if (values[mask] >= z) candidates.push_back(mask);
    std::sort(candidates.begin(), candidates.end(),
              [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });
    for (std::uint32_t c : candidates) {
        bool dominated = false;
        for (std::uint32_t kept : minimal)
            if ((kept & c) == kept) {
                dominated = true;
                break;
            }
        if (!dominated) minimal.push_back(c);
    }
    return minimal;
}

/// Maximize the slack delta over the price simplex: p >= 0, sum p = 1,
/// p(S) >= b + delta for every minimal high-value set S. The threshold is
/// blocked iff the optimum is strictly positive, and the optimal p is then
/// a blocking price vector.
inline std::pair<Rational, std::vector<Rational>> blocking_slack(
    const std::vector<std::uint32_t>& minimal_sets, int m, const Rational& budget) {
    LinearProgram lp;
    const std::size_t vars = static_cast<std::size_t>(m) + 2;  // p_0..p_{m-1}, u, w; delta = u - w
    lp.objective.assign(vars, Rational(0));
    lp.objective[static_cast<std::size_t>(m)] = 1;
    lp.objective[static_cast<std::size_t>(m) + 1] = -1;

    std::vector<Rational> simplex_row(vars, Rational(0));
    for (int g = 0; g < m; ++g) simplex_row[static_cast<std::size_t>(g)] = 1;
    lp.add_row(simplex_row, LinearProgram::EQ, Rational(1));

    for (std::uint32_t s : minimal_sets) {
        std::vector<Rational> row(vars, Rational(0));
        for (int g = 0; g < m; ++g)
            if (s & (1u << g)) row[static_cast<std::size_t>(g)] = 1;
        row[static_cast<std::size_t>(m)] = -1;
        row[static_cast<std::size_t>(m) + 1] = 1;
        lp.add_row(std::move(row), LinearProgram::GE, budget);
    }

    LpSolution sol = solve_lp(lp);
    if (sol.status != LpSolution::Optimal)
        throw std::logic_error("blocking_slack: LP should always be feasible and bounded");
    std::vector<Rational> prices(sol.x.begin(), sol.x.begin() + m);
    return {sol.objective, std::move(prices)};
}

}  // namespace detail

/// Exact APS via the price-simplex definition: scan candidate thresholds
/// (the distinct subset values) descending and return the first one no
/// price vector can block. Blocking feasibility is decided by an exact LP;
/// strictness is handled by maximizing slack, never by perturbation.
inline ShareValue exact_aps(const Instance& inst, int agent,
                            const OracleCaps& caps = OracleCaps::from_env()) {
    const int m = inst.num_goods;
    detail::check_subset_cap(m, caps.max_subsets, "exact_aps");
    const Agent& a = inst.agents[static_cast<std::size_t>(agent)];

    std::vector<Rational> values = detail::subset_value_table(a.valuation, m);
    std::vector<Rational> candidates = values;
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    const bool binary_class = detail::is_binary_class(a.valuation);
    std::optional<PriceVector> witness;
    Rational aps(0);
    for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
        const Rational& z = *it;
        if (z <= Rational(0)) break;  // z = 0 is never blocked (empty set is free)
        auto minimal = detail::minimal_sets_at_least(values, m, z, binary_class);
        auto [slack, prices] = detail::blocking_slack(minimal, m, a.entitlement);
        if (slack > Rational(0)) {
            witness = PriceVector{std::move(prices)};
        } else {
            aps = z;
            break;
        }
    }

    ShareValue sv;
    sv.notion = ShareNotion::APS;
    sv.agent = agent;
    sv.value = aps;
    sv.price_witness = std::move(witness);
    return sv;
}

/// Optimal egalitarian WMMS ratio: max over complete allocations of
/// min_i v_i(A_i) / WMMS_i. Agents with WMMS_i = 0 are unconstrained.
inline Rational best_allocation_ratio(const Instance& inst,
                                      const OracleCaps& caps = OracleCaps::from_env()) {
    const int n = inst.num_agents();
    const int m = inst.num_goods;
    detail::check_partition_cap(n, m, caps.max_partitions, "best_allocation_ratio");

    std::vector<Rational> wmms;
    for (int i = 0; i < n; ++i) wmms.push_back(exact_wmms(inst, i, caps).value);
    bool any_positive = false;
    for (const Rational& w : wmms)
        if (w > Rational(0)) any_positive = true;
    if (!any_positive) return Rational(1);

    Rational best(-1);
    std::vector<int> labels(static_cast<std::size_t>(m), 0);
    std::function<void(int)> rec = [&](int g) {
        if (g == m) {
            auto bundles = detail::labels_to_partition(labels, n);
            Rational mn(-1);
            bool mn_set = false;
            for (int i = 0; i < n; ++i) {
                if (wmms[static_cast<std::size_t>(i)].is_zero()) continue;
                Rational r = value(inst.agents[static_cast<std::size_t>(i)].valuation,
                                   bundles[static_cast<std::size_t>(i)]) /
                             wmms[static_cast<std::size_t>(i)];
                if (!mn_set || r < mn) {
                    mn = r;
                    mn_set = true;
                }
            }
            if (mn_set && mn > best) best = mn;
            return;
        }
        for (int j = 0; j < n; ++j) {
            labels[static_cast<std::size_t>(g)] = j;
            rec(g + 1);
        }
    };
    rec(0);
    return best;
}

inline nlohmann::json share_value_json(const ShareValue& sv, bool include_witness) {
    nlohmann::json j;
    j["notion"] = notion_name(sv.notion);
    j["agent"] = sv.agent;
    j["value"] = sv.value.str();
    if (include_witness) {
        if (sv.partition_witness) {
            nlohmann::json jp = nlohmann::json::array();
            for (const GoodSet& b : sv.partition_witness->partition) jp.push_back(b);
            j["witness"] = {{"partition", jp},
                            {"floorValue", sv.partition_witness->floor_value.str()}};
        } else if (sv.price_witness) {
            nlohmann::json prices = nlohmann::json::array();
            for (const Rational& p : sv.price_witness->prices) prices.push_back(p.str());
            j["witness"] = {{"prices", prices}};
        }
    }
    return j;
}

}  // namespace fairshare
