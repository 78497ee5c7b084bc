#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gossip/bounds.hpp"
#include "gossip/field.hpp"
#include "gossip/graph.hpp"
#include "gossip/protocols.hpp"
#include "gossip/rng.hpp"

namespace gossip {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    Protocol protocol = Protocol::round_robin;
    Topology graph;
    std::uint32_t k = 1;
    std::vector<NodeId> sources;  // sources[j] originates message j+1
    unsigned field_degree = 1;    // algebraic gossip only
    std::size_t payload_size = 16;
    std::uint64_t seed = 0;
    std::uint64_t max_rounds = 0;  // 0: defaults to 4x the thm1 budget
    bool record_trace = false;
};

// One bidirectional exchange: the initiator's packet and the target's reply,
// either possibly empty.
struct Exchange {
    NodeId initiator = 0;
    NodeId target = 0;
    Packet forward;
    Packet response;

    bool operator==(const Exchange&) const = default;
};

struct Trace {
    std::vector<std::vector<Exchange>> rounds;  // rounds[t-1] holds round t

    bool operator==(const Trace&) const = default;
};

struct TreeInfo {
    bool broadcast_complete = false;
    std::uint64_t broadcast_rounds = 0;  // phase boundary B
    std::size_t tree_diameter = 0;       // D' of the induced spanning tree
    std::uint64_t forwarding_rounds = 0; // rounds after the boundary until done
    std::vector<std::optional<NodeId>> parents;
};

struct RunResult {
    bool completed = false;
    std::uint64_t rounds_executed = 0;
    std::optional<std::uint64_t> completion_round;  // max over nodes
    std::vector<std::optional<std::uint64_t>> node_completion;
    std::optional<Trace> trace;
    std::optional<TreeInfo> tree;
};

inline std::uint64_t default_max_rounds(const Topology& g, std::uint64_t k) {
    return 4 * bound_thm1(g, k, 16);
}

// All k messages at one node of maximum eccentricity.
inline std::vector<NodeId> eccentric_sources(const Topology& g, std::uint32_t k) {
    return std::vector<NodeId>(k, g.eccentric_node());
}

// Message j at node floor((j-1) * n / k), spreading origins over the id range.
inline std::vector<NodeId> spread_sources(const Topology& g, std::uint32_t k) {
    std::vector<NodeId> sources(k);
    for (std::uint32_t j = 0; j < k; ++j)
        sources[j] = static_cast<NodeId>((static_cast<std::uint64_t>(j) * g.size()) / k);
    return sources;
}

inline void validate(const RunConfig& cfg) {
    if (cfg.k < 1) throw ConfigError("k must be at least 1");
    if (cfg.sources.size() != cfg.k)
        throw ConfigError("need exactly one source per message");
    for (NodeId s : cfg.sources)
        if (s >= cfg.graph.size()) throw ConfigError("source node out of range");
    if (cfg.payload_size < 1) throw ConfigError("payload size must be positive");
    if (cfg.field_degree == 16 && cfg.payload_size % 2 != 0)
        throw ConfigError("GF(2^16) payloads must have even length");
}

namespace detail {

// One synchronous round. Initiations are computed (and their send
// bookkeeping committed) first, then responses in initiator order, then all
// deliveries: packet content never depends on a same-round delivery, while
// send counters do see a node's own earlier emissions this round.
template <class State>
std::vector<Exchange> run_round(const Topology& g, std::vector<State>& states,
                                std::vector<Rng>& rngs, std::uint64_t round) {
    std::vector<Exchange> exchanges;
    exchanges.reserve(g.size());
    for (NodeId u = 0; u < g.size(); ++u) {
        StepAction act = states[u].initiate(g, u, round, rngs[u]);
        if (act.target) exchanges.push_back({u, *act.target, std::move(act.packet), {}});
    }
    for (Exchange& ex : exchanges)
        ex.response = states[ex.target].respond(g, ex.target, ex.initiator, round, rngs[ex.target]);
    for (const Exchange& ex : exchanges) {
        states[ex.target].receive(ex.forward, ex.initiator, round);
        states[ex.initiator].receive(ex.response, ex.target, round);
    }
    return exchanges;
}

template <class State>
void note_completions(const std::vector<State>& states,
                      std::vector<std::optional<std::uint64_t>>& completion,
                      std::uint64_t round, bool& all_complete) {
    all_complete = true;
    for (std::size_t v = 0; v < states.size(); ++v) {
        if (!completion[v]) {
            if (states[v].complete())
                completion[v] = round;
            else
                all_complete = false;
        }
    }
}

template <class State>
RunResult run_dissemination(const RunConfig& cfg, std::vector<State>& states,
                            std::vector<Rng>& rngs, std::uint64_t max_rounds) {
    RunResult result;
    result.node_completion.assign(cfg.graph.size(), std::nullopt);
    if (cfg.record_trace) result.trace.emplace();

    bool all_complete = false;
    note_completions(states, result.node_completion, 0, all_complete);
    std::uint64_t round = 0;
    while (!all_complete && round < max_rounds) {
        ++round;
        auto exchanges = run_round(cfg.graph, states, rngs, round);
        if (result.trace) result.trace->rounds.push_back(std::move(exchanges));
        note_completions(states, result.node_completion, round, all_complete);
    }
    result.rounds_executed = round;
    result.completed = all_complete;
    if (all_complete) {
        std::uint64_t last = 0;
        for (const auto& c : result.node_completion) last = std::max(last, *c);
        result.completion_round = last;
    }
    return result;
}

inline std::vector<Rng> node_rngs(std::uint64_t seed, std::size_t n) {
    std::vector<Rng> rngs;
    rngs.reserve(n);
    for (std::size_t v = 0; v < n; ++v) rngs.emplace_back(Rng::child_seed(seed, v));
    return rngs;
}

template <class State>
void place_sources(std::vector<State>& states, const RunConfig& cfg) {
    for (std::uint32_t j = 0; j < cfg.k; ++j)
        states[cfg.sources[j]].add_initial(j + 1, message_payload(j + 1, cfg.payload_size));
}

}  // namespace detail

// Two-phase non-uniform gossip: min-id broadcast until every node has seen
// the smallest id (checked omnisciently), parent construction, then
// pipelined forwarding along the induced tree.
inline RunResult run_tree(const RunConfig& cfg) {
    validate(cfg);
    const Topology& g = cfg.graph;
    const std::uint64_t max_rounds =
        cfg.max_rounds ? cfg.max_rounds : default_max_rounds(g, cfg.k);
    auto rngs = detail::node_rngs(cfg.seed, g.size());

    std::vector<TreeState> states;
    states.reserve(g.size());
    for (NodeId v = 0; v < g.size(); ++v)
        states.emplace_back(g.size(), cfg.k, v, g.degree(v));
    detail::place_sources(states, cfg);

    RunResult result;
    result.node_completion.assign(g.size(), std::nullopt);
    if (cfg.record_trace) result.trace.emplace();
    result.tree.emplace();

    const NodeId global_min = 0;  // ids are dense 0..n-1
    bool all_complete = false;
    detail::note_completions(states, result.node_completion, 0, all_complete);

    auto broadcast_done = [&states, global_min]() {
        for (const TreeState& s : states)
            if (s.min_seen() != global_min) return false;
        return true;
    };

    std::uint64_t round = 0;
    while (!broadcast_done() && round < max_rounds) {
        ++round;
        auto exchanges = detail::run_round(g, states, rngs, round);
        if (result.trace) result.trace->rounds.push_back(std::move(exchanges));
    }
    result.tree->broadcast_rounds = round;
    result.tree->broadcast_complete = broadcast_done();
    result.rounds_executed = round;
    if (!result.tree->broadcast_complete) return result;  // flagged incomplete

    auto parents = build_parents(states, global_min);
    result.tree->parents = parents;
    {
        std::vector<std::pair<NodeId, NodeId>> edges;
        for (NodeId v = 0; v < g.size(); ++v)
            if (parents[v]) edges.push_back({v, *parents[v]});
        const Topology tree_graph = Topology::from_edges(g.size(), std::move(edges));
        result.tree->tree_diameter = tree_graph.diameter();
    }
    for (NodeId v = 0; v < g.size(); ++v) states[v].start_forwarding(parents[v]);

    const std::uint64_t boundary = round;
    while (!all_complete && round < max_rounds) {
        ++round;
        auto exchanges = detail::run_round(g, states, rngs, round);
        if (result.trace) result.trace->rounds.push_back(std::move(exchanges));
        detail::note_completions(states, result.node_completion, round, all_complete);
    }
    result.rounds_executed = round;
    result.completed = all_complete;
    result.tree->forwarding_rounds = round - boundary;
    if (all_complete) {
        std::uint64_t last = 0;
        for (const auto& c : result.node_completion) last = std::max(last, *c);
        result.completion_round = last;
    }
    return result;
}

// Synchronous-round simulation of one configuration. Deterministic given the
// seed; round-robin runs consume no randomness at all.
inline RunResult run(const RunConfig& cfg) {
    validate(cfg);
    if (cfg.protocol == Protocol::tree) return run_tree(cfg);

    const Topology& g = cfg.graph;
    const std::uint64_t max_rounds =
        cfg.max_rounds ? cfg.max_rounds : default_max_rounds(g, cfg.k);
    auto rngs = detail::node_rngs(cfg.seed, g.size());

    if (cfg.protocol == Protocol::algebraic_gossip) {
        const Field field(cfg.field_degree);
        std::vector<AgState> states;
        states.reserve(g.size());
        for (NodeId v = 0; v < g.size(); ++v)
            states.emplace_back(field, cfg.k, cfg.payload_size);
        detail::place_sources(states, cfg);
        return detail::run_dissemination(cfg, states, rngs, max_rounds);
    }

    std::vector<RoutingState> states;
    states.reserve(g.size());
    for (NodeId v = 0; v < g.size(); ++v)
        states.emplace_back(cfg.protocol, cfg.k, g.degree(v));
    detail::place_sources(states, cfg);
    return detail::run_dissemination(cfg, states, rngs, max_rounds);
}

}  // namespace gossip
