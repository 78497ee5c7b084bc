#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

#include "gossip/field.hpp"
#include "gossip/graph.hpp"

namespace gossip {

inline std::uint64_t ceil_log2(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("ceil_log2(0)");
    std::uint64_t bits = 0;
    while ((1ULL << bits) < n) ++bits;
    return bits;
}

// Worst case for uniform algebraic gossip: c * Delta * (D + k + ceil(log2 n)).
inline std::uint64_t bound_thm1(const Topology& g, std::uint64_t k, std::uint64_t c = 16) {
    return c * g.max_degree() * (g.diameter() + k + ceil_log2(g.size()));
}

// Refined form: c * (min{3n, Delta*D} + Delta * (k + ceil(log2 n))). The 3n
// core comes from the degree-sum argument and is what the checks use.
inline std::uint64_t bound_thm2(const Topology& g, std::uint64_t k, std::uint64_t c = 16) {
    const std::uint64_t core = std::min<std::uint64_t>(3 * g.size(), g.max_degree() * g.diameter());
    return c * (core + g.max_degree() * (k + ceil_log2(g.size())));
}

// Same bound with the min{n, Delta*D} core. Reported alongside the 3n form
// so both constants are visible; not used as an acceptance threshold.
inline std::uint64_t bound_thm2_statement(const Topology& g, std::uint64_t k,
                                          std::uint64_t c = 16) {
    const std::uint64_t core = std::min<std::uint64_t>(g.size(), g.max_degree() * g.diameter());
    return c * (core + g.max_degree() * (k + ceil_log2(g.size())));
}

// Deterministic round-robin routing bound: min{3n, Delta*D} + Delta*k. Exact,
// no hidden constant; any violation is a hard failure.
inline std::uint64_t bound_rr(const Topology& g, std::uint64_t k) {
    const std::uint64_t core = std::min<std::uint64_t>(3 * g.size(), g.max_degree() * g.diameter());
    return core + g.max_degree() * k;
}

// Pipelined tree forwarding budget in terms of the measured tree diameter.
inline std::uint64_t bound_tree_forwarding(std::uint64_t k, std::uint64_t tree_diameter) {
    return 2 * (k + tree_diameter) + 2;
}

// A node knows mu when some stored coefficient vector is non-perpendicular
// to it. Knowing every nonzero mu is equivalent to full rank.
inline bool knows_mu(const Field& f, std::span<const CodedPacket> stored, const CoeffVector& mu) {
    if (is_zero(mu)) throw std::invalid_argument("knows_mu: mu must be nonzero");
    for (const CodedPacket& p : stored)
        if (dot(f, p.coeffs, mu) != 0) return true;
    return false;
}

inline bool knows_mu(const Field& f, const KnowledgeBasis& basis, const CoeffVector& mu) {
    return knows_mu(f, std::span<const CodedPacket>(basis.packets()), mu);
}

}  // namespace gossip
