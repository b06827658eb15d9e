// Acceptance suite: one line per criterion, exit 0 iff all pass.
// Everything is checked with exact rational arithmetic; there are no
// floating-point tolerances anywhere.

#include <cstdint>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "fairshare/aps_half.hpp"
#include "fairshare/generate.hpp"
#include "fairshare/shares.hpp"
#include "fairshare/wmms.hpp"

using namespace fairshare;

namespace {

int failures = 0;
std::vector<std::string> lines(9);

void report(int id, const std::string& what, bool ok) {
    lines[static_cast<std::size_t>(id)] =
        "criterion " + std::to_string(id) + " [" + (ok ? "PASS" : "FAIL") + "] " + what;
    if (!ok) ++failures;
}

Instance equalized(Instance inst) {
    for (Agent& a : inst.agents)
        a.entitlement = Rational(1) / Rational(static_cast<long long>(inst.agents.size()));
    return inst;
}

std::vector<Instance> corpus(RandomFamily fam, int count, int min_n, int max_n, int min_m,
                             int max_m, int clause_count, std::uint64_t seed0) {
    std::vector<Instance> out;
    std::mt19937_64 rng(seed0);
    for (int k = 0; k < count; ++k) {
        GeneratorSpec spec;
        spec.family = fam;
        spec.n = min_n + static_cast<int>(rng() % static_cast<unsigned>(max_n - min_n + 1));
        spec.m = min_m + static_cast<int>(rng() % static_cast<unsigned>(max_m - min_m + 1));
        spec.clause_count = clause_count;
        spec.seed = rng();
        out.push_back(gen_random(spec));
    }
    return out;
}

// criterion 1: the tight family has WMMS_i = 1/n for the light agents,
// WMMS_n = n for the heavy one, and no allocation beats ratio 1/n.
void criterion1() {
    bool ok = true;
    for (int n = 2; n <= 4; ++n) {
        Instance inst = gen_thm43(n);
        Rational inv_n = Rational(1) / Rational(n);
        for (int i = 0; i + 1 < n; ++i) ok &= exact_wmms(inst, i).value == inv_n;
        ok &= exact_wmms(inst, n - 1).value == Rational(n);
        ok &= best_allocation_ratio(inst) == inv_n;
    }
    report(1, "tight family: WMMS values and best ratio 1/n, n in {2,3,4}", ok);
}

// criterion 2: the vanishing-ratio family drives APS_n/WMMS_n below any
// target delta with the generator-chosen epsilon.
void criterion2() {
    bool ok = true;
    for (int n : {2, 3})
        for (const char* d : {"1/4", "1/8"}) {
            Rational delta = Rational::parse(d);
            Instance inst = gen_prop41(n, prop41_epsilon_for_delta(n, delta));
            Rational aps = exact_aps(inst, n - 1).value;
            Rational wmms = exact_wmms(inst, n - 1).value;
            ok &= wmms > Rational(0) && aps / wmms < delta;
        }
    report(2, "vanishing-ratio family: APS_n/WMMS_n < delta for delta in {1/4, 1/8}", ok);
}

// criteria 3-5 and 8 share one binary-XOS corpus (n <= 4, m <= 9, <= 6 clauses)
void criteria_3_4_5_8(const std::vector<Instance>& corpus3) {
    bool ok3 = true, ok4 = true, ok5 = true, ok8 = true;
    std::mt19937_64 sample_rng(2024);
    int checked8 = 0;
    for (std::size_t k = 0; k < corpus3.size(); ++k) {
        const Instance& inst = corpus3[k];
        const int n = inst.num_agents();
        const int m = inst.num_goods;

        std::vector<Rational> aps;
        for (int i = 0; i < n; ++i) aps.push_back(exact_aps(inst, i).value);

        // 3: half-APS guarantee
        HalfApsResult res = solve_half_aps(inst);
        ok3 &= validate_allocation(inst, res.allocation).empty();
        for (int i = 0; i < n; ++i)
            ok3 &= Rational(res.achieved[static_cast<std::size_t>(i)]) >=
                   Rational((aps[static_cast<std::size_t>(i)] / Rational(2)).ceil());

        // 4: guess safety, pass budget, and the oracle-call budget 4*n*m*m
        for (const DecrementEvent& d : res.decrements)
            ok4 &= Rational(d.guess_before) > aps[static_cast<std::size_t>(d.agent)];
        for (int i = 0; i < n; ++i)
            ok4 &= Rational(res.final_guesses.estimates[static_cast<std::size_t>(i)]) >=
                   aps[static_cast<std::size_t>(i)];
        ok4 &= res.passes <= m + 1;
        ok4 &= res.oracle_calls <= 4LL * n * m * m;

        // 5: half-MMS via equal entitlements, plus MMS <= APS <= 2*MMS + 1
        Instance eq = equalized(inst);
        std::vector<Rational> mms, eq_wmms;
        for (int i = 0; i < n; ++i) {
            mms.push_back(exact_mms(eq, i).value);
            eq_wmms.push_back(exact_wmms(eq, i).value);
        }
        HalfApsResult mres = solve_half_mms(inst);
        for (int i = 0; i < n; ++i) {
            ok5 &= Rational(mres.achieved[static_cast<std::size_t>(i)]) >=
                   Rational((mms[static_cast<std::size_t>(i)] / Rational(2)).ceil());
            Rational eq_aps = exact_aps(eq, i).value;
            ok5 &= mms[static_cast<std::size_t>(i)] <= eq_aps;
            ok5 &= eq_aps <= Rational(2) * mms[static_cast<std::size_t>(i)] + Rational(1);
            // 8: equal entitlements collapse WMMS to MMS
            ok8 &= eq_wmms[static_cast<std::size_t>(i)] == mms[static_cast<std::size_t>(i)];
        }

        // 8: blocking-price witnesses certify APS on sampled high-value sets
        if (k % 4 == 0) {
            for (int i = 0; i < n; ++i) {
                auto sv = exact_aps(inst, i);
                if (!sv.price_witness) continue;
                ++checked8;
                const auto& p = sv.price_witness->prices;
                Rational sum(0);
                for (const Rational& x : p) {
                    ok8 &= x >= Rational(0);
                    sum += x;
                }
                ok8 &= sum == Rational(1);
                const Rational& budget = inst.agents[static_cast<std::size_t>(i)].entitlement;
                const Valuation& val = inst.agents[static_cast<std::size_t>(i)].valuation;
                for (int t = 0; t < 64; ++t) {
                    GoodSet s;
                    Rational cost(0);
                    for (int g = 0; g < m; ++g)
                        if (sample_rng() & 1) {
                            s.push_back(g);
                            cost += p[static_cast<std::size_t>(g)];
                        }
                    if (value(val, s) > sv.value) ok8 &= cost > budget;
                }
            }
        }
    }
    report(3, "half-APS guarantee on 200 binary-XOS instances (n<=4, m<=9)", ok3);
    report(4, "guess safety, pass count <= m+1, oracle calls <= 4*n*m^2", ok4);
    report(5, "half-MMS guarantee and MMS <= APS <= 2*MMS+1 at equal entitlements", ok5);
    report(8, "oracle consistency: WMMS = MMS at equal entitlements; " +
                  std::to_string(checked8) + " blocking witnesses certified",
           ok8 && checked8 > 0);
}

// criterion 6: 1/n-WMMS round robin on general XOS with oracle partitions
void criterion6() {
    bool ok = true;
    auto instances = corpus(RandomFamily::Xos, 200, 2, 3, 4, 8, 4, 6001);
    for (const Instance& inst : instances) {
        const int n = inst.num_agents();
        std::vector<WmmsPartitionWitness> parts;
        std::vector<Rational> wmms;
        for (int i = 0; i < n; ++i) {
            auto sv = exact_wmms(inst, i);
            wmms.push_back(sv.value);
            parts.push_back(*sv.partition_witness);
        }
        WmmsRoundRobinResult res;
        try {
            res = wmms_round_robin(inst, parts);  // throws if first-pick availability fails
        } catch (const std::exception&) {
            ok = false;
            continue;
        }
        ok &= validate_allocation(inst, res.allocation).empty();
        for (int i = 0; i < n; ++i) {
            ok &= res.achieved[static_cast<std::size_t>(i)] >=
                  wmms[static_cast<std::size_t>(i)] / Rational(n);
            ok &= res.own_clause_value[static_cast<std::size_t>(i)] >=
                  res.target_clause_value[static_cast<std::size_t>(i)] / Rational(n);
            ok &= res.achieved[static_cast<std::size_t>(i)] >=
                  res.own_clause_value[static_cast<std::size_t>(i)];
        }
    }
    report(6, "1/n-WMMS round robin on 200 XOS instances (n<=3, m<=8) with clause accounting", ok);
}

// criterion 7: exact WMMS for binary additive valuations
void criterion7() {
    bool ok = true;
    auto instances = corpus(RandomFamily::BinaryAdditive, 200, 2, 4, 4, 10, 4, 7001);
    for (const Instance& inst : instances) {
        const int n = inst.num_agents();
        WmmsBinaddResult res = wmms_allocate_binadd(inst);
        ok &= validate_allocation(inst, res.allocation).empty();
        for (int i = 0; i < n; ++i) {
            Rational wmms = exact_wmms(inst, i).value;
            ok &= res.achieved[static_cast<std::size_t>(i)] >= wmms;
            WmmsPartitionWitness w;
            try {
                w = wmms_partition_binadd(inst, i);  // throws if the balance invariant breaks
            } catch (const std::exception&) {
                ok = false;
                continue;
            }
            ok &= w.floor_value == wmms;
        }
    }
    report(7, "exact WMMS allocator and partition floor on 200 binary-additive instances", ok);
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    auto corpus3 = corpus(RandomFamily::BinaryXos, 200, 2, 4, 4, 9, 6, 3001);
    criteria_3_4_5_8(corpus3);
    criterion6();
    criterion7();
    for (int id = 1; id <= 8; ++id) std::cout << lines[static_cast<std::size_t>(id)] << "\n";
    std::cout << (failures == 0 ? "all criteria passed" : "criteria failed") << "\n";
    return failures == 0 ? 0 : 1;
}
