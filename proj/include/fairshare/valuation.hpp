#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fairshare/rational.hpp"

namespace fairshare {

/// A set of good ids, kept sorted ascending without duplicates.
using GoodSet = std::vector<int>;

inline GoodSet make_good_set(std::vector<int> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

inline bool set_contains(const GoodSet& s, int g) {
    return std::binary_search(s.begin(), s.end(), g);
}

inline GoodSet set_difference(const GoodSet& a, const GoodSet& b) {
    GoodSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline GoodSet set_intersection(const GoodSet& a, const GoodSet& b) {
    GoodSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline GoodSet set_union(const GoodSet& a, const GoodSet& b) {
    GoodSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

/// One additive clause of an XOS function: good id -> non-negative weight.
using Clause = std::map<int, Rational>;

struct BinaryXos {
    std::vector<GoodSet> clauses;  // at least one; v(S) = max_t |S ∩ T_t|
};
struct Xos {
    std::vector<Clause> clauses;  // v(S) = max_t Σ_{g∈S} w_t(g)
};
struct Additive {
    Clause weights;
};
struct BinaryAdditive {
    GoodSet desired;  // v(S) = |S ∩ D|
};

/// Tagged valuation over a fixed good universe. Immutable once built;
/// every query below is a pure function.
using Valuation = std::variant<BinaryXos, Xos, Additive, BinaryAdditive>;

inline const char* valuation_type_name(const Valuation& v) {
    switch (v.index()) {
        case 0: return "binary_xos";
        case 1: return "xos";
        case 2: return "additive";
        default: return "binary_additive";
    }
}

/// Exact value of a bundle under the tagged semantics.
inline Rational value(const Valuation& val, const GoodSet& bundle) {
    return std::visit(
        [&](const auto& v) -> Rational {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, BinaryXos>) {
                std::size_t best = 0;
                for (const GoodSet& t : v.clauses)
                    best = std::max(best, set_intersection(bundle, t).size());
                return Rational(static_cast<long long>(best));
            } else if constexpr (std::is_same_v<T, Xos>) {
                Rational best = 0;
                for (const Clause& cl : v.clauses) {
                    Rational sum = 0;
                    for (int g : bundle) {
                        auto it = cl.find(g);
                        if (it != cl.end()) sum += it->second;
                    }
                    if (sum > best) best = sum;
                }
                return best;
            } else if constexpr (std::is_same_v<T, Additive>) {
                Rational sum = 0;
                for (int g : bundle) {
                    auto it = v.weights.find(g);
                    if (it != v.weights.end()) sum += it->second;
                }
                return sum;
            } else {
                return Rational(static_cast<long long>(set_intersection(bundle, v.desired).size()));
            }
        },
        val);
}

/// Every valuation class here admits an explicit clause list (additive
/// functions are single-clause XOS). Used by the round-robin allocator,
/// which needs a maximizing clause, not just a value oracle.
inline std::vector<Clause> clause_list(const Valuation& val) {
    return std::visit(
        [](const auto& v) -> std::vector<Clause> {
            using T = std::decay_t<decltype(v)>;
            std::vector<Clause> out;
            if constexpr (std::is_same_v<T, BinaryXos>) {
                for (const GoodSet& t : v.clauses) {
                    Clause c;
                    for (int g : t) c[g] = 1;
                    out.push_back(std::move(c));
                }
            } else if constexpr (std::is_same_v<T, Xos>) {
                out = v.clauses;
            } else if constexpr (std::is_same_v<T, Additive>) {
                out.push_back(v.weights);
            } else {
                Clause c;
                for (int g : v.desired) c[g] = 1;
                out.push_back(std::move(c));
            }
            if (out.empty()) out.emplace_back();
            return out;
        },
        val);
}

/// Sampled (exhaustive when 2^m <= 4096) check that all marginals
/// v(S ∪ {g}) − v(S) lie in {0, 1}.
inline bool check_binary_marginals(const Valuation& val, int num_goods, int trials = 256,
                                   std::uint64_t seed = 0) {
    auto marginal_ok = [&](const GoodSet& s, int g) {
        if (set_contains(s, g)) return true;
        Rational d = value(val, set_union(s, {g})) - value(val, s);
        return d == Rational(0) || d == Rational(1);
    };
    if (num_goods <= 12) {
        for (std::uint32_t mask = 0; mask < (1u << num_goods); ++mask) {
            GoodSet s;
            for (int g = 0; g < num_goods; ++g)
                if (mask & (1u << g)) s.push_back(g);
            for (int g = 0; g < num_goods; ++g)
                if (!marginal_ok(s, g)) return false;
        }
        return true;
    }
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        GoodSet s;
        for (int g = 0; g < num_goods; ++g)
            if (rng() & 1) s.push_back(g);
        int g = static_cast<int>(rng() % num_goods);
        if (!marginal_ok(s, g)) return false;
    }
    return true;
}

/// Witness of a non-wasteful extraction: X ⊆ source with v(X) = |X| = v(source).
struct NonWastefulWitness {
    GoodSet source;
    GoodSet extracted;
    long long value = 0;
};

/// Extract a non-wasteful subset X of `bundle` with v(X) = |X| = v(bundle).
/// Requires binary marginals. BinaryXOS takes the clause fast path; other
/// classes use greedy removal through the value oracle (scan ascending id,
/// drop the first redundant good, repeat).
inline NonWastefulWitness extract_non_wasteful(const Valuation& val, const GoodSet& bundle) {
    NonWastefulWitness w;
    w.source = bundle;
    if (const auto* bx = std::get_if<BinaryXos>(&val)) {
        GoodSet best;
        for (const GoodSet& t : bx->clauses) {
            GoodSet inter = set_intersection(bundle, t);
            if (inter.size() > best.size()) best = std::move(inter);
        }
        w.extracted = std::move(best);
        w.value = static_cast<long long>(w.extracted.size());
        return w;
    }
    Rational target = value(val, bundle);
    if (!target.is_integer() || target < Rational(0))
        throw std::domain_error("extract_non_wasteful: valuation is not binary-marginal");
    GoodSet x = bundle;
    Rational vx = target;
    while (Rational(static_cast<long long>(x.size())) > vx) {
        bool removed = false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            GoodSet cand = x;
            cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(i));
            if (value(val, cand) == vx) {
                x = std::move(cand);
                removed = true;
                break;
            }
        }
        // Binary marginals guarantee a removable good whenever |X| > v(X).
        if (!removed)
            throw std::domain_error("extract_non_wasteful: valuation is not binary-marginal");
    }
    if (value(val, x) != Rational(static_cast<long long>(x.size())))
        throw std::domain_error("extract_non_wasteful: valuation is not binary-marginal");
    w.extracted = std::move(x);
    w.value = static_cast<long long>(w.extracted.size());
    return w;
}

/// The k lowest-id goods of the witness set. Downward non-wastefulness
/// gives v(Y) = |Y| = k for any such subset.
inline GoodSet trim_non_wasteful(const NonWastefulWitness& w, long long k) {
    if (k < 0 || k > w.value)
        throw std::out_of_range("trim_non_wasteful: k=" + std::to_string(k) + " outside [0, " +
                                std::to_string(w.value) + "]");
    return GoodSet(w.extracted.begin(), w.extracted.begin() + static_cast<std::ptrdiff_t>(k));
}

}  // namespace fairshare
