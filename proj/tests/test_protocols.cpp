#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "gossip/engine.hpp"
#include "gossip/protocols.hpp"

using namespace gossip;

namespace {

struct Delivery {
    std::uint64_t round;
    NodeId from, to;
    Packet packet;
};

std::vector<Delivery> deliveries_of(const Trace& trace) {
    std::vector<Delivery> out;
    for (std::size_t r = 0; r < trace.rounds.size(); ++r)
        for (const Exchange& ex : trace.rounds[r]) {
            out.push_back({r + 1, ex.initiator, ex.target, ex.forward});
            out.push_back({r + 1, ex.target, ex.initiator, ex.response});
        }
    return out;
}

RunConfig routing_config(Protocol p, Topology g, std::uint32_t k, std::vector<NodeId> sources,
                         std::uint64_t seed) {
    RunConfig cfg;
    cfg.protocol = p;
    cfg.graph = std::move(g);
    cfg.k = k;
    cfg.sources = std::move(sources);
    cfg.seed = seed;
    cfg.record_trace = true;
    return cfg;
}

}  // namespace

TEST_CASE("round robin targets cycle through the sorted neighbor list") {
    const auto star = make_star(4);  // center 0 with neighbors [1,2,3]
    RoutingState center(Protocol::round_robin, 1, 3);
    Rng rng(0);
    REQUIRE(*center.initiate(star, 0, 4, rng).target == 2);  // 4 mod 3 = 1
    REQUIRE(*center.initiate(star, 0, 5, rng).target == 3);
    REQUIRE(*center.initiate(star, 0, 6, rng).target == 1);
}

TEST_CASE("routing packet priority") {
    const auto path = make_path(2);
    Rng rng(0);

    SECTION("held message goes out") {
        RoutingState node(Protocol::round_robin, 2, 1);
        node.add_initial(2, message_payload(2, 4));
        const auto act = node.initiate(path, 0, 1, rng);
        REQUIRE(std::get<PlainPacket>(act.packet).message_id == 2);
    }
    SECTION("exhausted budget moves to the next message") {
        RoutingState node(Protocol::round_robin, 2, 1);
        node.add_initial(1, message_payload(1, 4));
        node.add_initial(2, message_payload(2, 4));
        auto first = node.initiate(path, 0, 1, rng);
        REQUIRE(std::get<PlainPacket>(first.packet).message_id == 1);
        REQUIRE(node.send_count(1) == 1);  // degree 1: budget spent
        auto second = node.initiate(path, 0, 2, rng);
        REQUIRE(std::get<PlainPacket>(second.packet).message_id == 2);
    }
    SECTION("nothing sendable yields the empty packet") {
        RoutingState node(Protocol::prioritized_uniform, 2, 1);
        REQUIRE(is_empty(node.initiate(path, 0, 1, rng).packet));
        node.add_initial(1, message_payload(1, 4));
        REQUIRE(std::get<PlainPacket>(node.initiate(path, 0, 2, rng).packet).message_id == 1);
        // m1 now sent to the only neighbor: per-partner rule blocks a resend.
        REQUIRE(is_empty(node.initiate(path, 0, 3, rng).packet));
    }
}

TEST_CASE("receiving a held message changes nothing") {
    RoutingState node(Protocol::round_robin, 1, 2);
    node.add_initial(1, Payload{0xAB});
    node.receive(PlainPacket{1, Payload{0xCD}}, 1, 3);
    const auto path = make_path(3);
    Rng rng(0);
    const auto act = node.initiate(path, 1, 1, rng);
    REQUIRE(std::get<PlainPacket>(act.packet).payload == Payload{0xAB});
}

TEST_CASE("protocol and packet variants must match") {
    const Field f(1);
    AgState ag(f, 2, 4);
    REQUIRE_THROWS_AS(ag.receive(PlainPacket{1, {}}, 0, 1), ProtocolError);
    RoutingState rr(Protocol::round_robin, 2, 1);
    REQUIRE_THROWS_AS(rr.receive(CodedPacket{{1, 0}, Payload(4, 0)}, 0, 1), ProtocolError);
}

TEST_CASE("algebraic gossip steps") {
    const Field f(1);
    const auto path = make_path(2);

    SECTION("empty basis sends the zero coded packet") {
        AgState node(f, 2, 4);
        Rng rng(9);
        const auto act = node.initiate(path, 0, 1, rng);
        REQUIRE(*act.target == 1);  // degree-1 target is forced
        const auto& coded = std::get<CodedPacket>(act.packet);
        REQUIRE(is_zero(coded.coeffs));
        REQUIRE(coded.payload == Payload(4, 0));
    }
    SECTION("single message node emits either zero or its unit vector") {
        bool saw_zero = false, saw_unit = false;
        for (std::uint64_t seed = 0; seed < 64; ++seed) {
            AgState node(f, 2, 4);
            node.add_initial(2, Payload{1, 2, 3, 4});
            Rng rng(seed);
            const auto act = node.initiate(path, 0, 1, rng);
            const auto& coded = std::get<CodedPacket>(act.packet);
            if (is_zero(coded.coeffs)) {
                saw_zero = true;
            } else {
                REQUIRE(coded.coeffs == CoeffVector{0, 1});
                REQUIRE(coded.payload == Payload{1, 2, 3, 4});
                saw_unit = true;
            }
        }
        REQUIRE(saw_zero);
        REQUIRE(saw_unit);
    }
    SECTION("zero packets do not change the rank") {
        AgState node(f, 2, 4);
        node.add_initial(1, Payload{9, 9, 9, 9});
        REQUIRE(node.basis().rank() == 1);
        node.receive(CodedPacket{{0, 0}, Payload(4, 0)}, 1, 1);
        REQUIRE(node.basis().rank() == 1);
        REQUIRE(node.packets_received() == 1);
    }
}

TEST_CASE("round robin traces never repeat a (message, receiver) pair per sender") {
    for (auto protocol : {Protocol::round_robin, Protocol::prioritized_uniform}) {
        const auto result = run(routing_config(protocol, make_grid2d(4, 4), 4,
                                               spread_sources(make_grid2d(4, 4), 4), 5));
        REQUIRE(result.completed);
        std::set<std::tuple<NodeId, NodeId, std::uint32_t>> seen;
        for (const Delivery& d : deliveries_of(*result.trace)) {
            if (const auto* plain = std::get_if<PlainPacket>(&d.packet))
                REQUIRE(seen.insert({d.from, d.to, plain->message_id}).second);
        }
    }
}

TEST_CASE("round robin budget exhaustion implies all neighbors hold the message") {
    const auto g = make_binary_tree(15);
    const auto result = run(routing_config(Protocol::round_robin, g, 4, spread_sources(g, 4), 1));
    REQUIRE(result.completed);

    std::map<std::pair<NodeId, std::uint32_t>, std::size_t> sends;
    std::map<NodeId, std::set<std::uint32_t>> holds;
    for (std::uint32_t j = 0; j < 4; ++j) holds[spread_sources(g, 4)[j]].insert(j + 1);
    for (const Delivery& d : deliveries_of(*result.trace)) {
        const auto* plain = std::get_if<PlainPacket>(&d.packet);
        if (!plain) continue;
        sends[{d.from, plain->message_id}]++;
        REQUIRE(sends[{d.from, plain->message_id}] <= g.degree(d.from));
        holds[d.to].insert(plain->message_id);
    }
    for (const auto& [key, count] : sends) {
        if (count < g.degree(key.first)) continue;
        for (NodeId v : g.neighbors(key.first)) REQUIRE(holds[v].count(key.second) == 1);
    }
}

TEST_CASE("round robin schedule visits every neighbor once per degree-many rounds") {
    const auto g = make_barbell(4, 3);
    const auto result = run(routing_config(Protocol::round_robin, g, 2, spread_sources(g, 2), 3));
    const Trace& trace = *result.trace;
    for (std::size_t r = 0; r < trace.rounds.size(); ++r)
        for (const Exchange& ex : trace.rounds[r]) {
            const auto& nbrs = g.neighbors(ex.initiator);
            REQUIRE(ex.target == nbrs[(r + 1) % nbrs.size()]);
        }
}

TEST_CASE("tree broadcast forwards the smallest id seen") {
    const auto path = make_path(3);
    TreeState node(3, 1, 1, 2);
    Rng rng(4);
    REQUIRE(std::get<PlainPacket>(node.initiate(path, 1, 1, rng).packet).message_id == 1);
    node.receive(PlainPacket{2, {}}, 2, 1);
    REQUIRE(std::get<PlainPacket>(node.initiate(path, 1, 2, rng).packet).message_id == 1);
    node.receive(PlainPacket{0, {}}, 0, 2);
    REQUIRE(std::get<PlainPacket>(node.initiate(path, 1, 3, rng).packet).message_id == 0);
    REQUIRE(node.min_seen() == 0);
}

TEST_CASE("first receipt wins, ties to the smaller sender") {
    TreeState node(4, 1, 3, 2);
    node.receive(PlainPacket{0, {}}, 2, 5);
    node.receive(PlainPacket{0, {}}, 1, 7);  // later round: ignored
    REQUIRE(node.first_receipt(0)->sender == 2);
    REQUIRE(node.first_receipt(0)->round == 5);

    TreeState tied(4, 1, 3, 2);
    tied.receive(PlainPacket{0, {}}, 2, 5);
    tied.receive(PlainPacket{0, {}}, 1, 5);  // same round: smaller id wins
    REQUIRE(tied.first_receipt(0)->sender == 1);
}

TEST_CASE("tree forwarding sends the smallest unsent message to the parent") {
    const auto path = make_path(2);
    TreeState child(2, 2, 1, 1);
    child.add_initial(1, Payload{1});
    child.add_initial(2, Payload{2});
    child.start_forwarding(0);
    Rng rng(0);
    REQUIRE(std::get<PlainPacket>(child.initiate(path, 1, 10, rng).packet).message_id == 1);
    REQUIRE(std::get<PlainPacket>(child.initiate(path, 1, 11, rng).packet).message_id == 2);
    REQUIRE(is_empty(child.initiate(path, 1, 12, rng).packet));

    TreeState root(2, 2, 0, 1);
    root.start_forwarding(std::nullopt);
    REQUIRE_FALSE(root.initiate(path, 0, 10, rng).target.has_value());
}

TEST_CASE("build_parents from forced receipt order") {
    std::vector<TreeState> states;
    states.emplace_back(3, 1, 0, 1);
    states.emplace_back(3, 1, 1, 2);
    states.emplace_back(3, 1, 2, 1);
    states[1].receive(PlainPacket{0, {}}, 0, 1);
    states[2].receive(PlainPacket{0, {}}, 1, 2);
    const auto parents = build_parents(states, 0);
    REQUIRE_FALSE(parents[0].has_value());
    REQUIRE(*parents[1] == 0);
    REQUIRE(*parents[2] == 1);
}

TEST_CASE("build_parents rejects an incomplete broadcast") {
    std::vector<TreeState> states;
    states.emplace_back(2, 1, 0, 1);
    states.emplace_back(2, 1, 1, 1);
    REQUIRE_THROWS_AS(build_parents(states, 0), ProtocolError);
}

TEST_CASE("replaying an algebraic gossip trace reproduces ranks and completions") {
    const auto g = make_cycle(6);
    RunConfig cfg;
    cfg.protocol = Protocol::algebraic_gossip;
    cfg.graph = g;
    cfg.k = 3;
    cfg.sources = spread_sources(g, 3);
    cfg.field_degree = 1;
    cfg.payload_size = 8;
    cfg.seed = 12;
    cfg.record_trace = true;
    const auto result = run(cfg);
    REQUIRE(result.completed);

    const Field f(1);
    std::vector<KnowledgeBasis> replay(g.size(), KnowledgeBasis(f, 3));
    for (std::uint32_t j = 0; j < 3; ++j) {
        CoeffVector unit(3, 0);
        unit[j] = 1;
        replay[cfg.sources[j]].absorb({unit, message_payload(j + 1, 8)});
    }
    std::vector<std::optional<std::uint64_t>> completion(g.size());
    for (NodeId v = 0; v < g.size(); ++v)
        if (replay[v].complete()) completion[v] = 0;
    std::vector<std::size_t> prev_rank(g.size());
    for (NodeId v = 0; v < g.size(); ++v) prev_rank[v] = replay[v].rank();

    for (std::size_t r = 0; r < result.trace->rounds.size(); ++r) {
        for (const Exchange& ex : result.trace->rounds[r]) {
            replay[ex.target].absorb(std::get<CodedPacket>(ex.forward));
            replay[ex.initiator].absorb(std::get<CodedPacket>(ex.response));
        }
        for (NodeId v = 0; v < g.size(); ++v) {
            REQUIRE(replay[v].rank() >= prev_rank[v]);  // monotone, never above k
            REQUIRE(replay[v].rank() <= 3);
            prev_rank[v] = replay[v].rank();
            if (!completion[v] && replay[v].complete()) completion[v] = r + 1;
        }
    }
    for (NodeId v = 0; v < g.size(); ++v) REQUIRE(completion[v] == result.node_completion[v]);
}
