// Independent reference implementations used only to cross-check the library.
#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

// Carry-less polynomial multiply followed by explicit long division, as
// opposed to the library's interleaved shift-and-reduce.
inline std::uint32_t gf_mul(std::uint32_t a, std::uint32_t b, std::uint32_t poly, unsigned m) {
    std::uint64_t prod = 0;
    for (unsigned i = 0; i < m; ++i)
        if ((b >> i) & 1U) prod ^= static_cast<std::uint64_t>(a) << i;
    for (int bit = 2 * static_cast<int>(m) - 2; bit >= static_cast<int>(m); --bit)
        if ((prod >> bit) & 1ULL) prod ^= static_cast<std::uint64_t>(poly) << (bit - m);
    return static_cast<std::uint32_t>(prod & ((1ULL << m) - 1));
}

// ---- GF(2)[x] arithmetic on bit-packed polynomials (degree <= 32) ----------

inline unsigned poly_degree(std::uint64_t p) {
    unsigned d = 0;
    while (p >> (d + 1)) ++d;
    return d;
}

inline std::uint64_t poly_mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t mod) {
    std::uint64_t r = 0;
    const unsigned dm = poly_degree(mod);
    while (b) {
        if (b & 1ULL) r ^= a;
        b >>= 1;
        a <<= 1;
        if ((a >> dm) & 1ULL) a ^= mod;
    }
    return r;
}

inline std::uint64_t poly_gcd(std::uint64_t a, std::uint64_t b) {
    while (b) {
        // a mod b
        while (a && poly_degree(a) >= poly_degree(b)) {
            a ^= b << (poly_degree(a) - poly_degree(b));
        }
        std::swap(a, b);
    }
    return a;
}

// Rabin's test specialised to m a power of two: p irreducible over GF(2) iff
// x^(2^m) == x (mod p) and gcd(x^(2^(m/2)) - x, p) = 1.
inline bool rabin_irreducible(std::uint64_t p, unsigned m) {
    std::uint64_t x_pow = 2;  // the polynomial x
    for (unsigned i = 0; i < m; ++i) x_pow = poly_mulmod(x_pow, x_pow, p);
    if (x_pow != 2) return false;
    std::uint64_t x_half = 2;
    for (unsigned i = 0; i < m / 2; ++i) x_half = poly_mulmod(x_half, x_half, p);
    return poly_gcd(x_half ^ 2ULL, p) == 1;
}

// All-pairs shortest hop counts via Floyd-Warshall, as opposed to the
// library's per-source BFS.
inline std::vector<std::vector<std::size_t>> fw_distances(
    std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    constexpr std::size_t inf = static_cast<std::size_t>(1) << 40;
    std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, inf));
    for (std::size_t v = 0; v < n; ++v) d[v][v] = 0;
    for (auto [u, v] : edges) d[u][v] = d[v][u] = 1;
    for (std::size_t w = 0; w < n; ++w)
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = 0; v < n; ++v)
                if (d[u][w] + d[w][v] < d[u][v]) d[u][v] = d[u][w] + d[w][v];
    return d;
}

// Minimum over all simple u-v paths of the degree sum excluding v, by
// exhaustive depth-first enumeration. Only viable for small graphs.
inline std::size_t exhaustive_weighted_dist(
    const std::vector<std::vector<std::uint32_t>>& adj,
    std::uint32_t u, std::uint32_t v) {
    constexpr std::size_t inf = static_cast<std::size_t>(1) << 40;
    std::vector<bool> visited(adj.size(), false);
    std::size_t best = inf;
    auto dfs = [&](auto&& self, std::uint32_t w, std::size_t cost) -> void {
        if (w == v) {
            best = std::min(best, cost);
            return;
        }
        visited[w] = true;
        for (std::uint32_t x : adj[w])
            if (!visited[x]) self(self, x, cost + adj[w].size());
        visited[w] = false;
    };
    dfs(dfs, u, 0);
    return best;
}

// Number of distinct GF(2) linear combinations of the given bit-packed
// vectors: 2^rank by definition of the span.
inline std::size_t gf2_span_size(const std::vector<std::uint32_t>& vectors) {
    std::set<std::uint32_t> span;
    const std::size_t subsets = 1ULL << vectors.size();
    for (std::size_t mask = 0; mask < subsets; ++mask) {
        std::uint32_t acc = 0;
        for (std::size_t i = 0; i < vectors.size(); ++i)
            if ((mask >> i) & 1ULL) acc ^= vectors[i];
        span.insert(acc);
    }
    return span.size();
}

}  // namespace oracle
