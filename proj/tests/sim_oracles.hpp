// Reference oracles that need the simulator's trace types.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gossip/engine.hpp"

namespace oracle {

// Minimum s-t cut by enumerating every source-side subset. Ground truth for
// integer max-flow on small networks.
struct ArcSpec {
    std::size_t from, to;
    std::int64_t capacity;
};

inline std::int64_t brute_force_min_cut(std::size_t nodes, const std::vector<ArcSpec>& arcs,
                                        std::size_t s, std::size_t t) {
    std::int64_t best = -1;
    const std::size_t subsets = static_cast<std::size_t>(1) << nodes;
    for (std::size_t mask = 0; mask < subsets; ++mask) {
        if (!((mask >> s) & 1ULL) || ((mask >> t) & 1ULL)) continue;
        std::int64_t cut = 0;
        for (const ArcSpec& a : arcs)
            if (((mask >> a.from) & 1ULL) && !((mask >> a.to) & 1ULL)) cut += a.capacity;
        if (best < 0 || cut < best) best = cut;
    }
    return best;
}

// Can all k messages be routed to v by the end of layer T, where each
// direction of each recorded exchange carries at most one message and
// messages may wait at nodes? Exhaustive backtracking over per-message
// time-respecting paths; only viable for tiny traces.
class RoutingEnumerator {
public:
    RoutingEnumerator(const gossip::Trace& trace, std::vector<gossip::NodeId> sources)
        : trace_(&trace), sources_(std::move(sources)) {}

    bool can_route(gossip::NodeId v, std::uint64_t until_layer) {
        used_.assign(trace_->rounds.size(), {});
        for (std::size_t r = 0; r < trace_->rounds.size(); ++r)
            used_[r].assign(trace_->rounds[r].size(), 0);  // bit 0: fwd, bit 1: back
        return place(0, v, until_layer);
    }

    std::optional<std::uint64_t> first_feasible(gossip::NodeId v) {
        for (std::uint64_t t = 0; t <= trace_->rounds.size(); ++t)
            if (can_route(v, t)) return t;
        return std::nullopt;
    }

private:
    bool place(std::size_t message, gossip::NodeId v, std::uint64_t until_layer) {
        if (message == sources_.size()) return true;
        return extend(message, sources_[message], 0, v, until_layer);
    }

    // Message `message` sits at `at` in layer `t`; try every continuation.
    bool extend(std::size_t message, gossip::NodeId at, std::uint64_t t, gossip::NodeId v,
                std::uint64_t until_layer) {
        if (at == v) return place(message + 1, v, until_layer);
        if (t >= until_layer) return false;
        // Wait in place.
        if (extend(message, at, t + 1, v, until_layer)) return true;
        // Ride one direction of a round-(t+1) exchange touching `at`.
        if (t < trace_->rounds.size()) {
            const auto& round = trace_->rounds[t];
            for (std::size_t i = 0; i < round.size(); ++i) {
                const gossip::Exchange& ex = round[i];
                if (ex.initiator == at && !(used_[t][i] & 1)) {
                    used_[t][i] |= 1;
                    if (extend(message, ex.target, t + 1, v, until_layer)) return true;
                    used_[t][i] &= ~1;
                }
                if (ex.target == at && !(used_[t][i] & 2)) {
                    used_[t][i] |= 2;
                    if (extend(message, ex.initiator, t + 1, v, until_layer)) return true;
                    used_[t][i] &= ~2;
                }
            }
        }
        return false;
    }

    const gossip::Trace* trace_;
    std::vector<gossip::NodeId> sources_;
    std::vector<std::vector<int>> used_;
};

}  // namespace oracle
