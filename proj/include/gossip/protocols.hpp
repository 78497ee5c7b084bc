#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "gossip/field.hpp"
#include "gossip/graph.hpp"
#include "gossip/rng.hpp"

namespace gossip {

enum class Protocol { algebraic_gossip, round_robin, prioritized_uniform, tree };

inline const char* protocol_name(Protocol p) {
    switch (p) {
        case Protocol::algebraic_gossip: return "ag";
        case Protocol::round_robin: return "rr";
        case Protocol::prioritized_uniform: return "pug";
        case Protocol::tree: return "tree";
    }
    return "?";
}

inline std::optional<Protocol> parse_protocol(const std::string& s) {
    if (s == "ag") return Protocol::algebraic_gossip;
    if (s == "rr") return Protocol::round_robin;
    if (s == "pug") return Protocol::prioritized_uniform;
    if (s == "tree") return Protocol::tree;
    return std::nullopt;
}

struct ProtocolError : std::logic_error {
    using std::logic_error::logic_error;
};

// Plain packets carry one uncoded message. In routing runs message_id is in
// 1..k; in the tree broadcast phase the id field carries a node id and the
// payload is empty.
struct PlainPacket {
    std::uint32_t message_id = 0;
    Payload payload;

    bool operator==(const PlainPacket&) const = default;
};

using Packet = std::variant<std::monostate, PlainPacket, CodedPacket>;

inline bool is_empty(const Packet& p) {
    return std::holds_alternative<std::monostate>(p);
}

struct StepAction {
    std::optional<NodeId> target;
    Packet packet;
};

// Deterministic per-message payload bytes, independent of the run seed so
// round-robin traces do not vary across seeds.
inline Payload message_payload(std::uint32_t message_id, std::size_t size) {
    Payload p(size);
    std::uint64_t state = 0xC2B2AE3D27D4EB4FULL ^ (0x100000001B3ULL * message_id);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < size; ++i) {
        if (i % 8 == 0) word = splitmix64(state);
        p[i] = static_cast<std::uint8_t>(word >> ((i % 8) * 8));
    }
    return p;
}

// ---- Algebraic gossip -------------------------------------------------------

// Uniform algebraic gossip: contact a uniform random neighbor, send a
// uniformly random linear combination of everything held. The zero packet is
// a legal send.
class AgState {
public:
    AgState(const Field& f, std::size_t k, std::size_t payload_size)
        : field_(&f), basis_(f, k), payload_size_(payload_size) {}

    void add_initial(std::uint32_t message_id, Payload payload) {
        CoeffVector unit(basis_.message_count(), 0);
        unit[message_id - 1] = 1;
        basis_.absorb({std::move(unit), std::move(payload)});
    }

    // Draw order: target first, then the combination coefficients.
    StepAction initiate(const Topology& g, NodeId self, std::uint64_t, Rng& rng) {
        const auto& nbrs = g.neighbors(self);
        const NodeId target = nbrs[rng.below(static_cast<std::uint32_t>(nbrs.size()))];
        return {target, combine(rng)};
    }

    Packet respond(const Topology&, NodeId, NodeId, std::uint64_t, Rng& rng) {
        return combine(rng);
    }

    void receive(const Packet& p, NodeId, std::uint64_t) {
        if (is_empty(p)) return;
        const auto* coded = std::get_if<CodedPacket>(&p);
        if (!coded) throw ProtocolError("algebraic gossip received a non-coded packet");
        ++received_;
        basis_.absorb(*coded);
    }

    bool complete() const { return basis_.complete(); }
    const KnowledgeBasis& basis() const { return basis_; }
    std::uint64_t packets_received() const { return received_; }

private:
    Packet combine(Rng& rng) {
        return random_combination(rng, *field_, basis_.packets(),
                                  basis_.message_count(), payload_size_);
    }

    const Field* field_;
    KnowledgeBasis basis_;
    std::size_t payload_size_;
    std::uint64_t received_ = 0;
};

// ---- Prioritized routing (round robin and uniform-gossip variants) ----------

// Shared packet rule: send the smallest held message that has been sent
// fewer than deg(u) times and never to this partner; both the counter and
// the per-partner flag update on emission.
class RoutingState {
public:
    RoutingState(Protocol variant, std::size_t k, std::size_t degree)
        : variant_(variant),
          k_(k),
          degree_(degree),
          held_(k + 1, false),
          payload_(k + 1),
          send_count_(k + 1, 0),
          sent_(k + 1, std::vector<bool>(degree, false)) {}

    void add_initial(std::uint32_t message_id, Payload payload) {
        held_[message_id] = true;
        payload_[message_id] = std::move(payload);
    }

    StepAction initiate(const Topology& g, NodeId self, std::uint64_t round, Rng& rng) {
        const auto& nbrs = g.neighbors(self);
        std::size_t index;
        if (variant_ == Protocol::round_robin)
            index = static_cast<std::size_t>(round % nbrs.size());
        else
            index = rng.below(static_cast<std::uint32_t>(nbrs.size()));
        return {nbrs[index], select_and_commit(index)};
    }

    Packet respond(const Topology& g, NodeId self, NodeId initiator, std::uint64_t, Rng&) {
        return select_and_commit(neighbor_index(g, self, initiator));
    }

    void receive(const Packet& p, NodeId, std::uint64_t) {
        if (is_empty(p)) return;
        const auto* plain = std::get_if<PlainPacket>(&p);
        if (!plain) throw ProtocolError("routing protocol received a non-plain packet");
        if (plain->message_id < 1 || plain->message_id > k_)
            throw ProtocolError("routing packet with out-of-range message id");
        if (!held_[plain->message_id]) {
            held_[plain->message_id] = true;
            payload_[plain->message_id] = plain->payload;
        }
    }

    bool complete() const {
        for (std::size_t m = 1; m <= k_; ++m)
            if (!held_[m]) return false;
        return true;
    }

    bool holds(std::uint32_t message_id) const { return held_[message_id]; }
    std::uint32_t send_count(std::uint32_t message_id) const { return send_count_[message_id]; }
    bool sent_to(std::uint32_t message_id, std::size_t neighbor_index) const {
        return sent_[message_id][neighbor_index];
    }

private:
    static std::size_t neighbor_index(const Topology& g, NodeId self, NodeId neighbor) {
        const auto& nbrs = g.neighbors(self);
        const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), neighbor);
        if (it == nbrs.end() || *it != neighbor)
            throw ProtocolError("exchange partner is not a neighbor");
        return static_cast<std::size_t>(it - nbrs.begin());
    }

    Packet select_and_commit(std::size_t neighbor_index) {
        for (std::uint32_t m = 1; m <= k_; ++m) {
            if (!held_[m] || send_count_[m] >= degree_ || sent_[m][neighbor_index]) continue;
            ++send_count_[m];
            sent_[m][neighbor_index] = true;
            return PlainPacket{m, payload_[m]};
        }
        return std::monostate{};
    }

    Protocol variant_;
    std::size_t k_;
    std::size_t degree_;
    std::vector<bool> held_;
    std::vector<Payload> payload_;
    std::vector<std::uint32_t> send_count_;
    std::vector<std::vector<bool>> sent_;
};

// ---- Tree gossip (id broadcast, then pipelined forwarding) ------------------

// Phase 1 is min-id push-pull gossip: contact a uniform neighbor, both sides
// exchange the smallest node id seen so far. Afterwards each node's parent is
// whoever it first heard the globally smallest id from, and all messages are
// forwarded along the induced tree: children initiate to their parent every
// round, each side sending the smallest message never sent to that partner.
class TreeState {
public:
    enum class Phase { broadcasting, forwarding };

    struct Receipt {
        NodeId sender;
        std::uint64_t round;
    };

    TreeState(std::size_t n, std::size_t k, NodeId self, std::size_t degree)
        : k_(k),
          self_(self),
          min_seen_(self),
          first_receipt_(n),
          held_(k + 1, false),
          payload_(k + 1),
          sent_(k + 1, std::vector<bool>(degree, false)) {}

    void add_initial(std::uint32_t message_id, Payload payload) {
        held_[message_id] = true;
        payload_[message_id] = std::move(payload);
    }

    StepAction initiate(const Topology& g, NodeId self, std::uint64_t, Rng& rng) {
        if (phase_ == Phase::broadcasting) {
            const auto& nbrs = g.neighbors(self);
            const NodeId target = nbrs[rng.below(static_cast<std::uint32_t>(nbrs.size()))];
            return {target, PlainPacket{min_seen_, {}}};
        }
        if (!parent_) return {std::nullopt, std::monostate{}};  // root initiates nothing
        return {*parent_, select_and_commit(neighbor_index(g, self, *parent_))};
    }

    Packet respond(const Topology& g, NodeId self, NodeId initiator, std::uint64_t, Rng&) {
        if (phase_ == Phase::broadcasting) return PlainPacket{min_seen_, {}};
        return select_and_commit(neighbor_index(g, self, initiator));
    }

    void receive(const Packet& p, NodeId sender, std::uint64_t round) {
        if (is_empty(p)) return;
        const auto* plain = std::get_if<PlainPacket>(&p);
        if (!plain) throw ProtocolError("tree protocol received a non-plain packet");
        if (phase_ == Phase::broadcasting) {
            const NodeId id = plain->message_id;
            if (id >= first_receipt_.size())
                throw ProtocolError("broadcast packet with out-of-range node id");
            auto& slot = first_receipt_[id];
            // First receipt wins; same-round ties go to the smaller sender.
            if (!slot || round < slot->round || (round == slot->round && sender < slot->sender))
                slot = Receipt{sender, round};
            min_seen_ = std::min(min_seen_, id);
        } else {
            if (plain->message_id < 1 || plain->message_id > k_)
                throw ProtocolError("tree forwarding packet with out-of-range message id");
            if (!held_[plain->message_id]) {
                held_[plain->message_id] = true;
                payload_[plain->message_id] = plain->payload;
            }
        }
    }

    bool complete() const {
        for (std::size_t m = 1; m <= k_; ++m)
            if (!held_[m]) return false;
        return true;
    }

    Phase phase() const { return phase_; }
    void start_forwarding(std::optional<NodeId> parent) {
        phase_ = Phase::forwarding;
        parent_ = parent;
    }

    NodeId min_seen() const { return min_seen_; }
    NodeId self() const { return self_; }
    std::optional<NodeId> parent() const { return parent_; }
    const std::optional<Receipt>& first_receipt(NodeId id) const { return first_receipt_[id]; }

private:
    static std::size_t neighbor_index(const Topology& g, NodeId self, NodeId neighbor) {
        const auto& nbrs = g.neighbors(self);
        const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), neighbor);
        if (it == nbrs.end() || *it != neighbor)
            throw ProtocolError("exchange partner is not a neighbor");
        return static_cast<std::size_t>(it - nbrs.begin());
    }

    Packet select_and_commit(std::size_t neighbor_index) {
        for (std::uint32_t m = 1; m <= k_; ++m) {
            if (!held_[m] || sent_[m][neighbor_index]) continue;
            sent_[m][neighbor_index] = true;
            return PlainPacket{m, payload_[m]};
        }
        return std::monostate{};
    }

    Phase phase_ = Phase::broadcasting;
    std::size_t k_;
    NodeId self_;
    NodeId min_seen_;
    std::vector<std::optional<Receipt>> first_receipt_;
    std::optional<NodeId> parent_;
    std::vector<bool> held_;
    std::vector<Payload> payload_;
    std::vector<std::vector<bool>> sent_;
};

// Parent map from completed-broadcast states: parent(v) is the node v first
// heard the smallest id from; the min-id node is the root. Receipt rounds
// strictly decrease toward the root, so the result is a spanning tree.
inline std::vector<std::optional<NodeId>> build_parents(const std::vector<TreeState>& states,
                                                        NodeId global_min_id) {
    std::vector<std::optional<NodeId>> parents(states.size());
    for (std::size_t v = 0; v < states.size(); ++v) {
        if (states[v].self() == global_min_id) continue;
        const auto& receipt = states[v].first_receipt(global_min_id);
        if (!receipt)
            throw ProtocolError("broadcast phase incomplete: a node never received the minimum id");
        parents[v] = receipt->sender;
    }
    return parents;
}

}  // namespace gossip
