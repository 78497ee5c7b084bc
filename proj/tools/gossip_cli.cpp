// Command-line front end: generate graphs, run single experiments, sweep
// campaigns, and compare algebraic gossip against the hindsight routing
// oracle. Exit codes: 0 ok, 1 deterministic bound breach, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gossip/gossip.hpp"

using json = nlohmann::ordered_json;
using namespace gossip;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Topology graph_from_flag(const std::string& spec, std::uint64_t seed) {
    if (spec.rfind("file:", 0) == 0) {
        const std::string path = spec.substr(5);
        std::ifstream in(path);
        if (!in) throw UsageError("cannot open graph file: " + path);
        std::ostringstream text;
        text << in.rdbuf();
        return load_edge_list(text.str());
    }
    return make_from_spec(spec, seed);
}

std::vector<NodeId> sources_from_flag(const std::string& mode, const Topology& g,
                                      std::uint32_t k) {
    if (mode == "spread") return spread_sources(g, k);
    if (mode == "eccentric") return eccentric_sources(g, k);
    if (mode.rfind("node:", 0) == 0) {
        const auto id = static_cast<NodeId>(std::stoul(mode.substr(5)));
        if (id >= g.size()) throw UsageError("source node out of range");
        return std::vector<NodeId>(k, id);
    }
    throw UsageError("sources must be spread, eccentric, or node:<id>");
}

json graph_json(const std::string& spec, const Topology& g) {
    return json{{"spec", spec},
                {"n", g.size()},
                {"max_degree", g.max_degree()},
                {"diameter", g.diameter()}};
}

json packet_json(const Packet& p) {
    if (is_empty(p)) return json{{"type", "empty"}};
    if (const auto* plain = std::get_if<PlainPacket>(&p))
        return json{{"type", "plain"}, {"id", plain->message_id}};
    const auto& coded = std::get<CodedPacket>(p);
    return json{{"type", "coded"}, {"coeffs", coded.coeffs}};
}

json trace_json(const Trace& trace) {
    json rounds = json::array();
    for (const auto& round : trace.rounds) {
        json entries = json::array();
        for (const Exchange& ex : round) {
            entries.push_back(json{{"from", ex.initiator},
                                   {"to", ex.target},
                                   {"packet", packet_json(ex.forward)}});
            entries.push_back(json{{"from", ex.target},
                                   {"to", ex.initiator},
                                   {"packet", packet_json(ex.response)}});
        }
        rounds.push_back(std::move(entries));
    }
    return rounds;
}

void emit(const json& out, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << out.dump(2) << "\n";
    } else {
        std::ofstream file(out_path);
        if (!file) throw UsageError("cannot write output file: " + out_path);
        file << out.dump(2) << "\n";
        std::cout << out_path << "\n";
    }
}

// Trials run with seeds base..base+trials-1, optionally across worker threads.
std::vector<RunResult> run_trials(const RunConfig& base, std::size_t trials, unsigned workers) {
    std::vector<RunResult> results(trials);
    if (workers <= 1 || trials <= 1) {
        for (std::size_t i = 0; i < trials; ++i) {
            RunConfig cfg = base;
            cfg.seed = base.seed + i;
            results[i] = run(cfg);
        }
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= trials) return;
                RunConfig cfg = base;
                cfg.seed = base.seed + i;
                results[i] = run(cfg);
            }
        });
    for (auto& t : pool) t.join();
    return results;
}

struct CommonFlags {
    std::string graph_spec;
    std::string protocol = "rr";
    std::uint32_t k = 1;
    unsigned field_degree = 1;
    std::size_t payload = 16;
    std::uint64_t seed = 0;
    std::size_t trials = 1;
    std::uint64_t const_c = 16;
    std::uint64_t max_rounds = 0;
    bool trace = false;
    std::string sources = "spread";
    std::string out;
    unsigned workers = 1;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f, bool with_protocol) {
    cmd->add_option("--graph", f.graph_spec, "family:params or file:PATH")->required();
    if (with_protocol)
        cmd->add_option("--protocol", f.protocol, "ag, rr, pug, or tree");
    cmd->add_option("--k", f.k, "number of messages");
    cmd->add_option("--field", f.field_degree, "GF(2^m) degree: 1, 8, or 16");
    cmd->add_option("--payload", f.payload, "payload bytes per message");
    cmd->add_option("--seed", f.seed, "base random seed");
    cmd->add_option("--trials", f.trials, "number of seeded trials");
    cmd->add_option("--const-c", f.const_c, "constant for the whp bounds");
    cmd->add_option("--max-rounds", f.max_rounds, "round budget (0 = default)");
    cmd->add_flag("--trace", f.trace, "record the exchange trace");
    cmd->add_option("--sources", f.sources, "spread, eccentric, or node:<id>");
    cmd->add_option("--out", f.out, "write JSON here instead of stdout");
    cmd->add_option("--workers", f.workers, "worker threads for trials");
}

RunConfig config_from_flags(const CommonFlags& f, Protocol protocol, const Topology& g) {
    RunConfig cfg;
    cfg.protocol = protocol;
    cfg.graph = g;
    cfg.k = f.k;
    cfg.sources = sources_from_flag(f.sources, g, f.k);
    cfg.field_degree = f.field_degree;
    cfg.payload_size = f.payload;
    cfg.seed = f.seed;
    cfg.max_rounds = f.max_rounds;
    cfg.record_trace = f.trace;
    return cfg;
}

json trial_json(const TrialOutcome& t) {
    json row{{"seed", t.seed}};
    if (t.rounds)
        row["rounds"] = *t.rounds;
    else
        row["rounds"] = nullptr;
    row["bound"] = t.bound;
    row["pass"] = t.pass;
    return row;
}

int cmd_run(const CommonFlags& f) {
    const auto protocol = parse_protocol(f.protocol);
    if (!protocol) throw UsageError("unknown protocol: " + f.protocol);
    const Topology g = graph_from_flag(f.graph_spec, f.seed);
    RunConfig cfg = config_from_flags(f, *protocol, g);
    validate(cfg);

    const auto results = run_trials(cfg, f.trials, f.workers);
    std::vector<std::uint64_t> seeds(f.trials);
    for (std::size_t i = 0; i < f.trials; ++i) seeds[i] = f.seed + i;
    const auto report = check_bounds(results, seeds, g, f.k, *protocol, f.const_c);

    json out{{"command", "run"},
             {"graph", graph_json(f.graph_spec, g)},
             {"protocol", f.protocol},
             {"k", f.k},
             {"payload", f.payload},
             {"sources", cfg.sources}};
    if (*protocol == Protocol::algebraic_gossip) out["field"] = f.field_degree;
    if (*protocol == Protocol::algebraic_gossip)
        out["coefficient_header_bits"] = f.k * f.field_degree;
    out["bounds"] = json{{"thm1", bound_thm1(g, f.k, f.const_c)},
                         {"thm2", bound_thm2(g, f.k, f.const_c)},
                         {"thm2_statement", bound_thm2_statement(g, f.k, f.const_c)},
                         {"thm3", bound_rr(g, f.k)}};
    json bound{{"name", report.bound_name},
               {"constant", report.constant},
               {"pass", report.pass}};
    if (f.trials == 1) bound["value"] = report.trials[0].bound;
    out["bound"] = bound;

    auto result_json = [&](const RunResult& r, std::size_t i) {
        json row{{"seed", seeds[i]},
                 {"completed", r.completed},
                 {"rounds", r.completion_round ? json(*r.completion_round) : json(nullptr)},
                 {"rounds_executed", r.rounds_executed}};
        if (f.trials > 1) {
            row["bound"] = report.trials[i].bound;
            row["pass"] = report.trials[i].pass;
        }
        if (r.tree) {
            row["tree"] = json{{"broadcast_complete", r.tree->broadcast_complete},
                               {"broadcast_rounds", r.tree->broadcast_rounds},
                               {"tree_diameter", r.tree->tree_diameter},
                               {"forwarding_rounds", r.tree->forwarding_rounds}};
        }
        if (r.trace) row["trace"] = trace_json(*r.trace);
        return row;
    };

    if (f.trials == 1) {
        const json merged = result_json(results[0], 0);
        for (const auto& [key, value] : merged.items()) out[key] = value;
        json nodes = json::array();
        for (const auto& c : results[0].node_completion)
            nodes.push_back(c ? json(*c) : json(nullptr));
        out["node_completion"] = nodes;
    } else {
        json rows = json::array();
        for (std::size_t i = 0; i < results.size(); ++i)
            rows.push_back(result_json(results[i], i));
        out["trials"] = rows;
    }
    emit(out, f.out);

    const bool deterministic =
        *protocol == Protocol::round_robin || *protocol == Protocol::tree;
    return deterministic && !report.pass ? 1 : 0;
}

int cmd_gen_graph(const CommonFlags& f) {
    const Topology g = graph_from_flag(f.graph_spec, f.seed);
    const std::string text = store_edge_list(g);
    if (f.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream file(f.out);
        if (!file) throw UsageError("cannot write output file: " + f.out);
        file << text;
        std::cout << graph_json(f.graph_spec, g).dump(2) << "\n";
    }
    return 0;
}

int cmd_oracle(const CommonFlags& f) {
    const Topology g = graph_from_flag(f.graph_spec, f.seed);
    CommonFlags flags = f;
    flags.trace = true;
    RunConfig cfg = config_from_flags(flags, Protocol::algebraic_gossip, g);
    validate(cfg);

    json trials = json::array();
    std::size_t equal_count = 0;
    std::size_t completed = 0;
    const auto results = run_trials(cfg, f.trials, f.workers);
    for (std::size_t i = 0; i < results.size(); ++i) {
        const RunResult& r = results[i];
        json row{{"seed", f.seed + i}};
        if (!r.completed) {
            row["completed"] = false;
            trials.push_back(row);
            continue;
        }
        ++completed;
        const auto hindsight = hindsight_global(*r.trace, cfg.sources, g.size(), f.k);
        const std::uint64_t gossip_rounds = *r.completion_round;
        if (!hindsight || *hindsight > gossip_rounds)
            throw std::logic_error("hindsight time exceeds the achieved completion");
        const bool equal = *hindsight == gossip_rounds;
        equal_count += equal;
        row["gossip_rounds"] = gossip_rounds;
        row["hindsight_rounds"] = *hindsight;
        row["equal"] = equal;
        trials.push_back(row);
    }

    json out{{"command", "oracle"},
             {"graph", graph_json(f.graph_spec, g)},
             {"k", f.k},
             {"field", f.field_degree},
             {"coefficient_header_bits", f.k * f.field_degree},
             {"payload", f.payload}};
    if (f.trials == 1) {
        for (const auto& [key, value] : trials.at(0).items()) out[key] = value;
    } else {
        out["trials"] = trials;
        out["completed_trials"] = completed;
        out["equal_fraction"] =
            completed ? static_cast<double>(equal_count) / completed : 0.0;
    }
    emit(out, f.out);
    return 0;
}

// ---- sweep ------------------------------------------------------------------

struct SweepSpec {
    std::vector<std::string> graphs;
    std::vector<std::string> protocols;
    std::vector<std::uint32_t> ks;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    unsigned field_degree = 1;
    std::size_t payload = 16;
    std::uint64_t const_c = 16;
    std::uint64_t max_rounds = 0;
    std::string sources = "spread";
    std::string out = "sweep_results";
};

SweepSpec parse_sweep_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open sweep spec: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw UsageError(std::string("malformed sweep spec: ") + e.what());
    }
    SweepSpec spec;
    try {
        spec.graphs = doc.at("graphs").get<std::vector<std::string>>();
        spec.protocols = doc.at("protocols").get<std::vector<std::string>>();
        spec.ks = doc.at("k").get<std::vector<std::uint32_t>>();
        spec.trials = doc.value("trials", 1);
        spec.seed = doc.value("seed", 0);
        spec.field_degree = doc.value("field", 1);
        spec.payload = doc.value("payload", 16);
        spec.const_c = doc.value("const_c", 16);
        spec.max_rounds = doc.value("max_rounds", 0);
        spec.sources = doc.value("sources", std::string("spread"));
        spec.out = doc.value("out", std::string("sweep_results"));
    } catch (const json::exception& e) {
        throw UsageError(std::string("malformed sweep spec: ") + e.what());
    }
    if (spec.graphs.empty() || spec.protocols.empty() || spec.ks.empty() || spec.trials < 1)
        throw UsageError("sweep spec needs graphs, protocols, k, and trials >= 1");
    return spec;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_override, unsigned workers) {
    const SweepSpec spec = parse_sweep_spec(spec_path);
    const std::string prefix = out_override.empty() ? spec.out : out_override;

    std::ostringstream csv;
    csv << "graph,n,delta,D,protocol,k,trial,seed,rounds,bound,pass\n";
    json reports = json::array();
    bool deterministic_breach = false;

    for (const std::string& graph_spec : spec.graphs) {
        const Topology g = graph_from_flag(graph_spec, spec.seed);
        for (const std::string& protocol_name : spec.protocols) {
            const auto protocol = parse_protocol(protocol_name);
            if (!protocol) throw UsageError("unknown protocol in sweep spec: " + protocol_name);
            for (std::uint32_t k : spec.ks) {
                RunConfig cfg;
                cfg.protocol = *protocol;
                cfg.graph = g;
                cfg.k = k;
                cfg.sources = sources_from_flag(spec.sources, g, k);
                cfg.field_degree = spec.field_degree;
                cfg.payload_size = spec.payload;
                cfg.seed = spec.seed;
                cfg.max_rounds = spec.max_rounds;
                validate(cfg);

                const auto results = run_trials(cfg, spec.trials, workers);
                std::vector<std::uint64_t> seeds(spec.trials);
                for (std::size_t i = 0; i < spec.trials; ++i) seeds[i] = spec.seed + i;
                const auto report =
                    check_bounds(results, seeds, g, k, *protocol, spec.const_c);

                for (const TrialOutcome& t : report.trials) {
                    csv << graph_spec << "," << g.size() << "," << g.max_degree() << ","
                        << g.diameter() << "," << protocol_name << "," << k << ","
                        << (t.seed - spec.seed) << "," << t.seed << ",";
                    if (t.rounds) csv << *t.rounds;
                    csv << "," << t.bound << "," << (t.pass ? "true" : "false") << "\n";
                }
                json cell{{"graph", graph_spec},
                          {"n", g.size()},
                          {"max_degree", g.max_degree()},
                          {"diameter", g.diameter()},
                          {"protocol", protocol_name},
                          {"k", k},
                          {"bound_name", report.bound_name},
                          {"constant", report.constant},
                          {"pass", report.pass}};
                json rows = json::array();
                for (const TrialOutcome& t : report.trials) rows.push_back(trial_json(t));
                cell["trials"] = rows;
                reports.push_back(std::move(cell));

                const bool deterministic =
                    *protocol == Protocol::round_robin || *protocol == Protocol::tree;
                if (deterministic && !report.pass) deterministic_breach = true;
            }
        }
    }

    {
        std::ofstream csv_file(prefix + ".csv");
        if (!csv_file) throw UsageError("cannot write " + prefix + ".csv");
        csv_file << csv.str();
    }
    {
        std::ofstream json_file(prefix + ".json");
        if (!json_file) throw UsageError("cannot write " + prefix + ".json");
        json_file << reports.dump(2) << "\n";
    }
    std::cout << prefix << ".csv\n" << prefix << ".json\n";
    return deterministic_breach ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synchronous-round gossip simulator and bound checker"};
    app.require_subcommand(1);

    CommonFlags run_flags, gen_flags, oracle_flags;
    std::string sweep_spec_path, sweep_out;
    unsigned sweep_workers = 1;

    CLI::App* run_cmd = app.add_subcommand("run", "simulate one configuration");
    add_common_flags(run_cmd, run_flags, true);

    CLI::App* gen_cmd = app.add_subcommand("gen-graph", "emit a graph as an edge list");
    gen_cmd->add_option("--graph", gen_flags.graph_spec, "family:params")->required();
    gen_cmd->add_option("--seed", gen_flags.seed, "seed for random families");
    gen_cmd->add_option("--out", gen_flags.out, "edge-list file (stdout if omitted)");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a campaign from a JSON spec");
    sweep_cmd->add_option("spec", sweep_spec_path, "sweep spec file")->required();
    sweep_cmd->add_option("--out", sweep_out, "output prefix override");
    sweep_cmd->add_option("--workers", sweep_workers, "worker threads");

    oracle_flags.field_degree = 8;
    CLI::App* oracle_cmd =
        app.add_subcommand("oracle", "compare algebraic gossip with hindsight routing");
    add_common_flags(oracle_cmd, oracle_flags, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_flags);
        if (gen_cmd->parsed()) return cmd_gen_graph(gen_flags);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_spec_path, sweep_out, sweep_workers);
        if (oracle_cmd->parsed()) return cmd_oracle(oracle_flags);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const GraphError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
