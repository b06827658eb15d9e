#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairshare/instance.hpp"
#include "fairshare/rational.hpp"
#include "fairshare/shares.hpp"

namespace fairshare {

enum class Guarantee { ApsHalf, MmsHalf, WmmsOverN, WmmsExact };

inline const char* guarantee_name(Guarantee g) {
    switch (g) {
        case Guarantee::ApsHalf: return "aps-half";
        case Guarantee::MmsHalf: return "mms-half";
        case Guarantee::WmmsOverN: return "wmms-over-n";
        default: return "wmms-exact";
    }
}

inline Guarantee parse_guarantee(const std::string& name) {
    if (name == "aps-half") return Guarantee::ApsHalf;
    if (name == "mms-half") return Guarantee::MmsHalf;
    if (name == "wmms-over-n") return Guarantee::WmmsOverN;
    if (name == "wmms-exact") return Guarantee::WmmsExact;
    throw std::invalid_argument("unknown guarantee \"" + name + "\"");
}

struct VerifyReport {
    Guarantee guarantee = Guarantee::ApsHalf;
    struct PerAgent {
        Rational achieved;
        Rational bound;
        bool pass = false;
    };
    std::vector<PerAgent> per_agent;
    bool overall = false;
};

/// Per-agent bound implied by the guarantee, always recomputed from the
/// exact brute-force oracles (never from solver-side instrumentation).
inline Rational guarantee_bound(const Instance& inst, int agent, Guarantee g,
                                const OracleCaps& caps) {
    switch (g) {
        case Guarantee::ApsHalf: {
            Rational aps = exact_aps(inst, agent, caps).value;
            // ceil(APS/2) as a rational; APS is an integer for the binary
            // classes this guarantee applies to.
            return Rational((aps / Rational(2)).ceil());
        }
        case Guarantee::MmsHalf: {
            Rational mms = exact_mms(inst, agent, caps).value;
            return Rational((mms / Rational(2)).ceil());
        }
        case Guarantee::WmmsOverN:
            return exact_wmms(inst, agent, caps).value /
                   Rational(static_cast<long long>(inst.agents.size()));
        default:
            return exact_wmms(inst, agent, caps).value;
    }
}

inline VerifyReport verify_allocation(const Instance& inst, const Allocation& alloc, Guarantee g,
                                      const OracleCaps& caps = OracleCaps::from_env()) {
    auto violations = validate_allocation(inst, alloc);
    if (!violations.empty())
        throw std::invalid_argument("verify: invalid allocation: " + violations.front());
    VerifyReport report;
    report.guarantee = g;
    report.overall = true;
    for (std::size_t i = 0; i < inst.agents.size(); ++i) {
        VerifyReport::PerAgent pa;
        pa.achieved = value(inst.agents[i].valuation, alloc.bundles[i]);
        pa.bound = guarantee_bound(inst, static_cast<int>(i), g, caps);
        pa.pass = pa.achieved >= pa.bound;
        report.overall = report.overall && pa.pass;
        report.per_agent.push_back(std::move(pa));
    }
    return report;
}

inline nlohmann::json verify_report_json(const VerifyReport& r) {
    nlohmann::json j;
    j["guarantee"] = guarantee_name(r.guarantee);
    j["perAgent"] = nlohmann::json::array();
    for (const auto& pa : r.per_agent)
        j["perAgent"].push_back(
            {{"achieved", pa.achieved.str()}, {"bound", pa.bound.str()}, {"pass", pa.pass}});
    j["overall"] = r.overall;
    return j;
}

}  // namespace fairshare
