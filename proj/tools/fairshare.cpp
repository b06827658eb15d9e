// fairshare: generate, analyze, solve, and verify fair-division instances.
//
// Exit codes: 0 success / guarantee pass, 1 guarantee violation,
// 2 input or valuation-class error, 3 oracle cap exceeded.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairshare/aps_half.hpp"
#include "fairshare/generate.hpp"
#include "fairshare/instance.hpp"
#include "fairshare/shares.hpp"
#include "fairshare/verify.hpp"
#include "fairshare/wmms.hpp"

namespace {

using namespace fairshare;

constexpr int kExitPass = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInputError = 2;
constexpr int kExitCapExceeded = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& bytes) {
    if (path.empty() || path == "-") {
        std::cout << bytes;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << bytes;
}

struct GenOptions {
    std::string family;
    int n = 0;
    int m = 0;
    std::string epsilon;
    std::string delta;
    int clauses = 4;
    int clause_size = 4;
    std::uint64_t seed = 0;
    std::string output;
};

int run_gen(const GenOptions& opt) {
    Instance inst;
    if (opt.family == "thm43") {
        inst = gen_thm43(opt.n);
    } else if (opt.family == "prop41") {
        Rational eps;
        if (!opt.epsilon.empty())
            eps = Rational::parse(opt.epsilon);
        else if (!opt.delta.empty())
            eps = prop41_epsilon_for_delta(opt.n, Rational::parse(opt.delta));
        else
            throw std::invalid_argument("prop41 needs --epsilon or --delta");
        inst = gen_prop41(opt.n, eps);
    } else {
        bool is_random = false;
        RandomFamily fam = parse_family(opt.family, is_random);
        if (!is_random) throw std::invalid_argument("family " + opt.family + " is not random");
        GeneratorSpec spec;
        spec.family = fam;
        spec.n = opt.n;
        spec.m = opt.m;
        spec.clause_count = opt.clauses;
        spec.clause_size = opt.clause_size;
        spec.seed = opt.seed;
        inst = gen_random(spec);
    }
    write_output(opt.output, save_instance(inst));
    return kExitPass;
}

struct SharesOptions {
    std::string instance_path;
    std::string notion;
    int agent = -1;
    bool witness = false;
    std::string output;
};

int run_shares(const SharesOptions& opt) {
    Instance inst = load_instance(read_file(opt.instance_path));
    OracleCaps caps = OracleCaps::from_env();
    nlohmann::json out = nlohmann::json::array();
    for (int i = 0; i < inst.num_agents(); ++i) {
        if (opt.agent >= 0 && i != opt.agent) continue;
        ShareValue sv;
        if (opt.notion == "aps")
            sv = exact_aps(inst, i, caps);
        else if (opt.notion == "mms")
            sv = exact_mms(inst, i, caps);
        else if (opt.notion == "wmms")
            sv = exact_wmms(inst, i, caps);
        else
            throw std::invalid_argument("unknown notion \"" + opt.notion + "\"");
        out.push_back(share_value_json(sv, opt.witness));
    }
    write_output(opt.output, out.dump() + "\n");
    return kExitPass;
}

struct SolveOptions {
    std::string instance_path;
    std::string algorithm;
    std::string output;
};

int run_solve(const SolveOptions& opt) {
    Instance inst = load_instance(read_file(opt.instance_path));
    nlohmann::json out;
    if (opt.algorithm == "aps-half") {
        for (const Agent& a : inst.agents)
            if (!std::holds_alternative<BinaryXos>(a.valuation) &&
                !std::holds_alternative<BinaryAdditive>(a.valuation))
                throw std::invalid_argument(
                    "aps-half requires binary XOS or binary additive valuations");
        out = half_aps_result_json(solve_half_aps(inst));
    } else if (opt.algorithm == "wmms-rr") {
        std::vector<WmmsPartitionWitness> partitions;
        if (inst.wmms_partitions) {
            for (int i = 0; i < inst.num_agents(); ++i) {
                WmmsPartitionWitness w;
                w.partition = (*inst.wmms_partitions)[static_cast<std::size_t>(i)];
                Rational fv(-1);
                bool set = false;
                const Agent& a = inst.agents[static_cast<std::size_t>(i)];
                for (std::size_t j = 0; j < w.partition.size(); ++j) {
                    Rational v = value(a.valuation, w.partition[j]) * a.entitlement /
                                 inst.agents[j].entitlement;
                    if (!set || v < fv) {
                        fv = v;
                        set = true;
                    }
                }
                w.floor_value = fv;
                partitions.push_back(std::move(w));
            }
        } else {
            OracleCaps caps = OracleCaps::from_env();
            for (int i = 0; i < inst.num_agents(); ++i)
                partitions.push_back(*exact_wmms(inst, i, caps).partition_witness);
        }
        out = wmms_round_robin_result_json(wmms_round_robin(inst, partitions), partitions);
    } else if (opt.algorithm == "wmms-binadd") {
        out = wmms_binadd_result_json(wmms_allocate_binadd(inst));
    } else {
        throw std::invalid_argument("unknown algorithm \"" + opt.algorithm + "\"");
    }
    write_output(opt.output, out.dump() + "\n");
    return kExitPass;
}

struct VerifyOptions {
    std::string instance_path;
    std::string allocation_path;
    std::string guarantee;
    bool table = false;
    std::string output;
};

int run_verify(const VerifyOptions& opt) {
    Instance inst = load_instance(read_file(opt.instance_path));
    std::string alloc_bytes = read_file(opt.allocation_path);
    Allocation alloc;
    // Solver result files wrap the allocation; accept both forms.
    nlohmann::json j = nlohmann::json::parse(alloc_bytes);
    if (j.contains("allocation"))
        alloc = load_allocation(j.at("allocation").dump());
    else
        alloc = load_allocation(alloc_bytes);

    VerifyReport report = verify_allocation(inst, alloc, parse_guarantee(opt.guarantee));
    write_output(opt.output, verify_report_json(report).dump() + "\n");
    if (opt.table) {
        std::cout << "agent  achieved  bound  pass\n";
        for (std::size_t i = 0; i < report.per_agent.size(); ++i) {
            const auto& pa = report.per_agent[i];
            std::cout << i << "  " << pa.achieved.str() << "  " << pa.bound.str() << "  "
                      << (pa.pass ? "yes" : "no") << "\n";
        }
        std::cout << "overall: " << (report.overall ? "pass" : "fail") << "\n";
    }
    return report.overall ? kExitPass : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fair-division toolkit: share oracles and approximation allocators"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* cmd_gen = app.add_subcommand("gen", "generate an instance");
    cmd_gen->add_option("--family", gen.family,
                        "thm43 | prop41 | random-bxos | random-badd | random-xos | random-add")
        ->required();
    cmd_gen->add_option("--n", gen.n, "number of agents")->required();
    cmd_gen->add_option("--m", gen.m, "number of goods (random families)");
    cmd_gen->add_option("--epsilon", gen.epsilon, "prop41 epsilon as p/q");
    cmd_gen->add_option("--delta", gen.delta, "prop41 target APS/WMMS ratio as p/q");
    cmd_gen->add_option("--clauses", gen.clauses, "max clauses per agent (XOS families)");
    cmd_gen->add_option("--clause-size", gen.clause_size, "max goods per clause");
    cmd_gen->add_option("--seed", gen.seed, "random seed");
    cmd_gen->add_option("-o,--output", gen.output, "output file (default stdout)");

    SharesOptions shares;
    auto* cmd_shares = app.add_subcommand("shares", "compute exact share values");
    cmd_shares->add_option("instance", shares.instance_path, "instance JSON file")->required();
    cmd_shares->add_option("--notion", shares.notion, "aps | mms | wmms")->required();
    cmd_shares->add_option("--agent", shares.agent, "restrict to one agent id");
    cmd_shares->add_flag("--witness", shares.witness, "include witnesses in the report");
    cmd_shares->add_option("-o,--output", shares.output, "output file (default stdout)");

    SolveOptions solve;
    auto* cmd_solve = app.add_subcommand("solve", "run an approximation allocator");
    cmd_solve->add_option("instance", solve.instance_path, "instance JSON file")->required();
    cmd_solve->add_option("--algorithm", solve.algorithm, "aps-half | wmms-rr | wmms-binadd")
        ->required();
    cmd_solve->add_option("-o,--output", solve.output, "output file (default stdout)");

    VerifyOptions verify;
    auto* cmd_verify = app.add_subcommand("verify", "check an allocation against its guarantee");
    cmd_verify->add_option("instance", verify.instance_path, "instance JSON file")->required();
    cmd_verify->add_option("allocation", verify.allocation_path, "allocation or solve-result file")
        ->required();
    cmd_verify
        ->add_option("--guarantee", verify.guarantee,
                     "aps-half | mms-half | wmms-over-n | wmms-exact")
        ->required();
    cmd_verify->add_flag("--table", verify.table, "print a human-readable summary");
    cmd_verify->add_option("-o,--output", verify.output, "report file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitInputError;
    }

    try {
        if (cmd_gen->parsed()) return run_gen(gen);
        if (cmd_shares->parsed()) return run_shares(shares);
        if (cmd_solve->parsed()) return run_solve(solve);
        return run_verify(verify);
    } catch (const fairshare::CapExceededError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCapExceeded;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}
