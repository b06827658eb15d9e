#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairshare/rational.hpp"
#include "fairshare/valuation.hpp"

namespace fairshare {

/// Error raised by load_instance / load_allocation on malformed input.
/// `path` names the offending field.
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct Agent {
    Rational entitlement;
    Valuation valuation;
};

/// Immutable fair-allocation instance: m goods (ids 0..m-1), n agents with
/// strictly positive entitlements summing to exactly 1. WMMS partitions may
/// optionally travel with the instance to decouple the round-robin allocator
/// from oracle cost.
struct Instance {
    int num_goods = 0;
    std::vector<Agent> agents;
    std::optional<std::vector<std::vector<GoodSet>>> wmms_partitions;

    int num_agents() const { return static_cast<int>(agents.size()); }

    GoodSet all_goods() const {
        GoodSet g(static_cast<std::size_t>(num_goods));
        for (int i = 0; i < num_goods; ++i) g[static_cast<std::size_t>(i)] = i;
        return g;
    }
};

struct Allocation {
    std::vector<GoodSet> bundles;  // one per agent, pairwise disjoint
    bool complete = false;         // union == goods when set
};

namespace detail {

inline void check_good_ids(const GoodSet& s, int num_goods, const std::string& path) {
    for (int g : s)
        if (g < 0 || g >= num_goods)
            throw SchemaError(path, "dangling good reference " + std::to_string(g) +
                                        " (instance has " + std::to_string(num_goods) + " goods)");
}

inline Rational parse_rational(const nlohmann::json& j, const std::string& path) {
    if (!j.is_string()) throw SchemaError(path, "expected rational string \"p/q\"");
    try {
        return Rational::parse(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw SchemaError(path, e.what());
    }
}

inline GoodSet parse_good_set(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected array of good ids");
    std::vector<int> ids;
    for (const auto& e : j) {
        if (!e.is_number_integer()) throw SchemaError(path, "good ids must be integers");
        ids.push_back(e.get<int>());
    }
    return make_good_set(std::move(ids));
}

inline Clause parse_clause(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected object {goodId: \"p/q\"}");
    Clause c;
    for (auto it = j.begin(); it != j.end(); ++it) {
        int g;
        try {
            std::size_t pos = 0;
            g = std::stoi(it.key(), &pos);
            if (pos != it.key().size()) throw std::invalid_argument(it.key());
        } catch (const std::exception&) {
            throw SchemaError(path, "non-integer good id key \"" + it.key() + "\"");
        }
        Rational w = parse_rational(it.value(), path + "." + it.key());
        if (w < Rational(0)) throw SchemaError(path + "." + it.key(), "negative weight");
        c[g] = w;
    }
    return c;
}

inline Valuation parse_valuation(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("type"))
        throw SchemaError(path, "valuation must be an object with a \"type\" field");
    std::string type = j.at("type").get<std::string>();
    if (type == "binary_xos") {
        if (!j.contains("clauses") || !j.at("clauses").is_array())
            throw SchemaError(path + ".clauses", "expected array of clauses");
        BinaryXos v;
        for (const auto& cl : j.at("clauses"))
            v.clauses.push_back(parse_good_set(cl, path + ".clauses"));
        if (v.clauses.empty()) throw SchemaError(path + ".clauses", "binary_xos needs >= 1 clause");
        return v;
    }
    if (type == "xos") {
        if (!j.contains("clauses") || !j.at("clauses").is_array())
            throw SchemaError(path + ".clauses", "expected array of clauses");
        Xos v;
        for (const auto& cl : j.at("clauses")) v.clauses.push_back(parse_clause(cl, path + ".clauses"));
        if (v.clauses.empty()) throw SchemaError(path + ".clauses", "xos needs >= 1 clause");
        return v;
    }
    if (type == "additive") {
        if (!j.contains("weights")) throw SchemaError(path + ".weights", "missing weights");
        return Additive{parse_clause(j.at("weights"), path + ".weights")};
    }
    if (type == "binary_additive") {
        if (!j.contains("desired")) throw SchemaError(path + ".desired", "missing desired set");
        return BinaryAdditive{parse_good_set(j.at("desired"), path + ".desired")};
    }
    throw SchemaError(path + ".type", "unknown valuation type \"" + type + "\"");
}

inline void check_valuation_refs(const Valuation& v, int num_goods, const std::string& path) {
    std::visit(
        [&](const auto& vv) {
            using T = std::decay_t<decltype(vv)>;
            if constexpr (std::is_same_v<T, BinaryXos>) {
                for (const GoodSet& t : vv.clauses) check_good_ids(t, num_goods, path + ".clauses");
            } else if constexpr (std::is_same_v<T, Xos>) {
                for (const Clause& c : vv.clauses)
                    for (const auto& [g, w] : c)
                        check_good_ids({g}, num_goods, path + ".clauses");
            } else if constexpr (std::is_same_v<T, Additive>) {
                for (const auto& [g, w] : vv.weights) check_good_ids({g}, num_goods, path + ".weights");
            } else {
                check_good_ids(vv.desired, num_goods, path + ".desired");
            }
        },
        v);
}

inline nlohmann::json good_set_json(const GoodSet& s) {
    return nlohmann::json(s);  // GoodSet is already sorted ascending
}

inline nlohmann::json clause_json(const Clause& c) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [g, w] : c) j[std::to_string(g)] = w.str();
    return j;
}

inline nlohmann::json valuation_json(const Valuation& v) {
    nlohmann::json j;
    j["type"] = valuation_type_name(v);
    std::visit(
        [&](const auto& vv) {
            using T = std::decay_t<decltype(vv)>;
            if constexpr (std::is_same_v<T, BinaryXos>) {
                j["clauses"] = nlohmann::json::array();
                for (const GoodSet& t : vv.clauses) j["clauses"].push_back(good_set_json(t));
            } else if constexpr (std::is_same_v<T, Xos>) {
                j["clauses"] = nlohmann::json::array();
                for (const Clause& c : vv.clauses) j["clauses"].push_back(clause_json(c));
            } else if constexpr (std::is_same_v<T, Additive>) {
                j["weights"] = clause_json(vv.weights);
            } else {
                j["desired"] = good_set_json(vv.desired);
            }
        },
        v);
    return j;
}

}  // namespace detail

/// Validate every Instance invariant; throws SchemaError on the first failure.
inline void validate_instance(const Instance& inst) {
    if (inst.num_goods < 0) throw SchemaError("goods", "negative good count");
    if (inst.agents.empty()) throw SchemaError("agents", "instance needs >= 1 agent");
    Rational sum = 0;
    for (std::size_t i = 0; i < inst.agents.size(); ++i) {
        const std::string path = "agents[" + std::to_string(i) + "]";
        const Agent& a = inst.agents[i];
        if (a.entitlement <= Rational(0))
            throw SchemaError(path + ".entitlement", "entitlement must be strictly positive");
        sum += a.entitlement;
        detail::check_valuation_refs(a.valuation, inst.num_goods, path + ".valuation");
        if (value(a.valuation, {}) != Rational(0))
            throw SchemaError(path + ".valuation", "v(empty set) != 0");
    }
    if (sum != Rational(1))
        throw SchemaError("agents", "entitlements sum " + sum.str() + " != 1");
    if (inst.wmms_partitions) {
        const auto& parts = *inst.wmms_partitions;
        if (parts.size() != inst.agents.size())
            throw SchemaError("wmmsPartitions", "need one partition per agent");
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const std::string path = "wmmsPartitions[" + std::to_string(i) + "]";
            if (parts[i].size() != inst.agents.size())
                throw SchemaError(path, "partition needs one bundle per agent");
            std::vector<int> seen(static_cast<std::size_t>(inst.num_goods), 0);
            for (const GoodSet& b : parts[i]) {
                detail::check_good_ids(b, inst.num_goods, path);
                for (int g : b) {
                    if (seen[static_cast<std::size_t>(g)]++)
                        throw SchemaError(path, "good " + std::to_string(g) + " assigned twice");
                }
            }
            for (int g = 0; g < inst.num_goods; ++g)
                if (!seen[static_cast<std::size_t>(g)])
                    throw SchemaError(path, "good " + std::to_string(g) + " unassigned");
        }
    }
}

inline Instance load_instance(const std::string& bytes) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("<document>", e.what());
    }
    if (!j.is_object()) throw SchemaError("<document>", "expected JSON object");
    if (!j.contains("goods") || !j.at("goods").is_number_integer())
        throw SchemaError("goods", "expected integer good count");
    if (!j.contains("agents") || !j.at("agents").is_array())
        throw SchemaError("agents", "expected array of agents");
    Instance inst;
    inst.num_goods = j.at("goods").get<int>();
    for (std::size_t i = 0; i < j.at("agents").size(); ++i) {
        const auto& ja = j.at("agents")[i];
        const std::string path = "agents[" + std::to_string(i) + "]";
        if (!ja.is_object() || !ja.contains("entitlement") || !ja.contains("valuation"))
            throw SchemaError(path, "agent needs entitlement and valuation");
        Agent a;
        a.entitlement = detail::parse_rational(ja.at("entitlement"), path + ".entitlement");
        a.valuation = detail::parse_valuation(ja.at("valuation"), path + ".valuation");
        inst.agents.push_back(std::move(a));
    }
    if (j.contains("wmmsPartitions")) {
        if (!j.at("wmmsPartitions").is_array())
            throw SchemaError("wmmsPartitions", "expected array of partitions");
        std::vector<std::vector<GoodSet>> parts;
        for (std::size_t i = 0; i < j.at("wmmsPartitions").size(); ++i) {
            const auto& jp = j.at("wmmsPartitions")[i];
            const std::string path = "wmmsPartitions[" + std::to_string(i) + "]";
            if (!jp.is_array()) throw SchemaError(path, "expected array of bundles");
            std::vector<GoodSet> bundles;
            for (const auto& jb : jp) bundles.push_back(detail::parse_good_set(jb, path));
            parts.push_back(std::move(bundles));
        }
        inst.wmms_partitions = std::move(parts);
    }
    validate_instance(inst);
    return inst;
}

/// Canonical serialization: rationals in lowest terms, good sets sorted
/// ascending, newline-terminated. load_instance ∘ save_instance == identity.
inline std::string save_instance(const Instance& inst) {
    nlohmann::json j;
    j["goods"] = inst.num_goods;
    j["agents"] = nlohmann::json::array();
    for (const Agent& a : inst.agents) {
        nlohmann::json ja;
        ja["entitlement"] = a.entitlement.str();
        ja["valuation"] = detail::valuation_json(a.valuation);
        j["agents"].push_back(std::move(ja));
    }
    if (inst.wmms_partitions) {
        j["wmmsPartitions"] = nlohmann::json::array();
        for (const auto& part : *inst.wmms_partitions) {
            nlohmann::json jp = nlohmann::json::array();
            for (const GoodSet& b : part) jp.push_back(detail::good_set_json(b));
            j["wmmsPartitions"].push_back(std::move(jp));
        }
    }
    return j.dump() + "\n";
}

/// Violations are data, not errors: empty list iff bundles are pairwise
/// disjoint, reference valid goods, and (when complete) cover all goods.
inline std::vector<std::string> validate_allocation(const Instance& inst, const Allocation& alloc) {
    std::vector<std::string> violations;
    if (alloc.bundles.size() != inst.agents.size())
        violations.push_back("expected " + std::to_string(inst.agents.size()) + " bundles, got " +
                             std::to_string(alloc.bundles.size()));
    std::vector<int> count(static_cast<std::size_t>(inst.num_goods), 0);
    for (const GoodSet& b : alloc.bundles) {
        for (int g : b) {
            if (g < 0 || g >= inst.num_goods) {
                violations.push_back("good " + std::to_string(g) + " out of range");
                continue;
            }
            if (++count[static_cast<std::size_t>(g)] == 2)
                violations.push_back("good " + std::to_string(g) + " assigned twice");
        }
    }
    if (alloc.complete)
        for (int g = 0; g < inst.num_goods; ++g)
            if (count[static_cast<std::size_t>(g)] == 0)
                violations.push_back("good " + std::to_string(g) + " unassigned");
    return violations;
}

inline Allocation load_allocation(const std::string& bytes) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("<document>", e.what());
    }
    if (!j.is_object() || !j.contains("bundles") || !j.at("bundles").is_array())
        throw SchemaError("bundles", "expected array of bundles");
    Allocation a;
    for (const auto& jb : j.at("bundles")) a.bundles.push_back(detail::parse_good_set(jb, "bundles"));
    a.complete = j.value("complete", false);
    return a;
}

inline nlohmann::json allocation_json(const Allocation& a) {
    nlohmann::json j;
    j["bundles"] = nlohmann::json::array();
    for (const GoodSet& b : a.bundles) j["bundles"].push_back(detail::good_set_json(b));
    j["complete"] = a.complete;
    return j;
}

inline std::string save_allocation(const Allocation& a) { return allocation_json(a).dump() + "\n"; }

/// Leftover rule used by every allocator: append unassigned goods to the
/// agent with the largest entitlement (lowest id on ties). Valuations are
/// monotone, so this never hurts any guarantee.
inline void assign_leftovers(const Instance& inst, Allocation& alloc) {
    std::size_t target = 0;
    for (std::size_t i = 1; i < inst.agents.size(); ++i)
        if (inst.agents[i].entitlement > inst.agents[target].entitlement) target = i;
    GoodSet assigned;
    for (const GoodSet& b : alloc.bundles) assigned = set_union(assigned, b);
    GoodSet leftovers = set_difference(inst.all_goods(), assigned);
    alloc.bundles[target] = set_union(alloc.bundles[target], leftovers);
    alloc.complete = true;
}

}  // namespace fairshare
