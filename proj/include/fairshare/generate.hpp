#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairshare/instance.hpp"
#include "fairshare/rational.hpp"
#include "fairshare/valuation.hpp"

namespace fairshare {

/// Tight lower-bound instance for the 1/n-WMMS upper bound: m = 2n-1 goods,
/// the first n-1 agents value any single good of the first n, the last
/// agent values the first n goods additively-up-to-max or any single one of
/// the last n-1; entitlements (1/(2n-1), ..., n/(2n-1)).
inline Instance gen_thm43(int n) {
    if (n < 2) throw std::invalid_argument("gen_thm43: n must be >= 2");
    Instance inst;
    inst.num_goods = 2 * n - 1;
    BinaryXos light;
    for (int g = 0; g < n; ++g) light.clauses.push_back({g});
    BinaryXos heavy;
    GoodSet first_n;
    for (int g = 0; g < n; ++g) first_n.push_back(g);
    heavy.clauses.push_back(first_n);
    for (int g = n; g < 2 * n - 1; ++g) heavy.clauses.push_back({g});
    Rational unit = Rational(1) / Rational(2LL * n - 1);
    for (int i = 0; i < n - 1; ++i) inst.agents.push_back({unit, light});
    inst.agents.push_back({Rational(n) * unit, heavy});
    return inst;
}

/// Instance family with APS/WMMS arbitrarily small for the heavy agent:
/// m = n goods, identical additive valuations (eps, ..., eps, 1-(n-1)eps),
/// entitlements matching the weights.
inline Instance gen_prop41(int n, const Rational& epsilon) {
    if (n < 2) throw std::invalid_argument("gen_prop41: n must be >= 2");
    if (epsilon <= Rational(0) || epsilon >= Rational(1) / Rational(n - 1))
        throw std::invalid_argument("gen_prop41: need 0 < epsilon < 1/(n-1), got " +
                                    epsilon.str());
    Instance inst;
    inst.num_goods = n;
    Additive val;
    for (int g = 0; g < n - 1; ++g) val.weights[g] = epsilon;
    Rational heavy = Rational(1) - Rational(n - 1) * epsilon;
    val.weights[n - 1] = heavy;
    for (int i = 0; i < n - 1; ++i) inst.agents.push_back({epsilon, val});
    inst.agents.push_back({heavy, val});
    return inst;
}

/// Epsilon that makes APS_n/WMMS_n < delta: half the admissible bound
/// delta/((delta+1)(n-1)).
inline Rational prop41_epsilon_for_delta(int n, const Rational& delta) {
    if (delta <= Rational(0)) throw std::invalid_argument("delta must be positive");
    return delta / ((delta + Rational(1)) * Rational(n - 1)) / Rational(2);
}

enum class RandomFamily { BinaryXos, BinaryAdditive, Xos, Additive };

struct GeneratorSpec {
    RandomFamily family = RandomFamily::BinaryXos;
    int n = 2;
    int m = 4;
    int clause_count = 4;           // XOS families
    int clause_size = 4;            // max goods per clause
    int entitlement_unit_cap = 250; // raw integer weights before normalization
    int weight_denominator = 8;     // XOS/additive weights are k/denominator
    std::uint64_t seed = 0;
};

namespace detail {

// Bounded draw via modulo on the raw engine output: mt19937_64 output is
// standardized, so identical seeds give identical instances on every
// platform (std::uniform_int_distribution does not promise that).
inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) {
    return rng() % bound;
}

inline GoodSet random_subset(std::mt19937_64& rng, int m, int max_size, int min_size) {
    int size = min_size + static_cast<int>(draw(rng, static_cast<std::uint64_t>(
                                                         std::min(max_size, m) - min_size + 1)));
    std::vector<int> ids(static_cast<std::size_t>(m));
    std::iota(ids.begin(), ids.end(), 0);
    for (int k = 0; k < size; ++k) {
        std::size_t pick = static_cast<std::size_t>(k) +
                           static_cast<std::size_t>(draw(rng, static_cast<std::uint64_t>(m - k)));
        std::swap(ids[static_cast<std::size_t>(k)], ids[pick]);
    }
    ids.resize(static_cast<std::size_t>(size));
    return make_good_set(std::move(ids));
}

inline std::vector<Rational> random_entitlements(std::mt19937_64& rng, int n, int unit_cap) {
    std::vector<long long> raw;
    long long total = 0;
    for (int i = 0; i < n; ++i) {
        long long w = 1 + static_cast<long long>(draw(rng, static_cast<std::uint64_t>(unit_cap)));
        raw.push_back(w);
        total += w;
    }
    std::vector<Rational> out;
    for (long long w : raw) out.emplace_back(BigInt(w), BigInt(total));
    return out;
}

}  // namespace detail

inline Instance gen_random(const GeneratorSpec& spec) {
    if (spec.n < 1 || spec.m < 1 || spec.clause_count < 1 || spec.clause_size < 1 ||
        spec.entitlement_unit_cap < 1 || spec.weight_denominator < 1)
        throw std::invalid_argument("gen_random: all counts and caps must be positive");
    std::mt19937_64 rng(spec.seed);
    Instance inst;
    inst.num_goods = spec.m;
    std::vector<Rational> ent = detail::random_entitlements(rng, spec.n, spec.entitlement_unit_cap);
    for (int i = 0; i < spec.n; ++i) {
        Agent a;
        a.entitlement = ent[static_cast<std::size_t>(i)];
        switch (spec.family) {
            case RandomFamily::BinaryXos: {
                BinaryXos v;
                int clauses = 1 + static_cast<int>(detail::draw(
                                      rng, static_cast<std::uint64_t>(spec.clause_count)));
                for (int t = 0; t < clauses; ++t)
                    v.clauses.push_back(detail::random_subset(rng, spec.m, spec.clause_size, 1));
                a.valuation = std::move(v);
                break;
            }
            case RandomFamily::BinaryAdditive: {
                a.valuation = BinaryAdditive{detail::random_subset(rng, spec.m, spec.m, 0)};
                break;
            }
            case RandomFamily::Xos: {
                Xos v;
                int clauses = 1 + static_cast<int>(detail::draw(
                                      rng, static_cast<std::uint64_t>(spec.clause_count)));
                for (int t = 0; t < clauses; ++t) {
                    Clause c;
                    for (int g : detail::random_subset(rng, spec.m, spec.clause_size, 1)) {
                        long long k = 1 + static_cast<long long>(detail::draw(
                                              rng, static_cast<std::uint64_t>(2 * spec.weight_denominator)));
                        c[g] = Rational(BigInt(k), BigInt(spec.weight_denominator));
                    }
                    v.clauses.push_back(std::move(c));
                }
                a.valuation = std::move(v);
                break;
            }
            case RandomFamily::Additive: {
                Additive v;
                for (int g : detail::random_subset(rng, spec.m, spec.m, 0)) {
                    long long k = 1 + static_cast<long long>(detail::draw(
                                          rng, static_cast<std::uint64_t>(2 * spec.weight_denominator)));
                    v.weights[g] = Rational(BigInt(k), BigInt(spec.weight_denominator));
                }
                a.valuation = std::move(v);
                break;
            }
        }
        inst.agents.push_back(std::move(a));
    }
    validate_instance(inst);
    return inst;
}

inline RandomFamily parse_family(const std::string& name, bool& is_random) {
    is_random = true;
    if (name == "random-bxos" || name == "random_binary_xos") return RandomFamily::BinaryXos;
    if (name == "random-badd" || name == "random_binary_additive") return RandomFamily::BinaryAdditive;
    if (name == "random-xos" || name == "random_xos") return RandomFamily::Xos;
    if (name == "random-add" || name == "random_additive") return RandomFamily::Additive;
    is_random = false;
    if (name == "thm43" || name == "prop41") return RandomFamily::BinaryXos;  // unused
    throw std::invalid_argument("unknown instance family \"" + name + "\"");
}

}  // namespace fairshare
