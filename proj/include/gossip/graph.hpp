#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gossip/rng.hpp"

namespace gossip {

using NodeId = std::uint32_t;

struct GraphError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Immutable undirected connected graph. Node ids are dense 0..n-1 and
// neighbor lists are sorted, which also fixes the round-robin cyclic orders.
class Topology {
public:
    static Topology from_edges(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges) {
        if (n < 2) throw GraphError("topology needs at least 2 nodes");
        std::vector<std::vector<NodeId>> adj(n);
        std::set<std::pair<NodeId, NodeId>> seen;
        for (auto [u, v] : edges) {
            if (u >= n || v >= n) throw GraphError("edge endpoint out of range");
            if (u == v) throw GraphError("self-loops are not allowed");
            auto key = std::minmax(u, v);
            if (!seen.insert({key.first, key.second}).second)
                throw GraphError("duplicate edge");
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        for (auto& list : adj) std::sort(list.begin(), list.end());
        Topology g;
        g.adj_ = std::move(adj);
        g.finish_construction();
        return g;
    }

    std::size_t size() const { return adj_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    const std::vector<NodeId>& neighbors(NodeId u) const { return adj_[u]; }
    std::size_t degree(NodeId u) const { return adj_[u].size(); }
    std::size_t max_degree() const { return max_degree_; }
    std::size_t diameter() const { return diameter_; }

    bool operator==(const Topology& other) const { return adj_ == other.adj_; }

    std::vector<std::size_t> bfs_distances(NodeId start) const {
        constexpr auto unreached = std::numeric_limits<std::size_t>::max();
        std::vector<std::size_t> dist(size(), unreached);
        std::deque<NodeId> queue{start};
        dist[start] = 0;
        while (!queue.empty()) {
            const NodeId u = queue.front();
            queue.pop_front();
            for (NodeId v : adj_[u]) {
                if (dist[v] != unreached) continue;
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
        return dist;
    }

    // Node of maximum eccentricity, smallest id on ties.
    NodeId eccentric_node() const {
        NodeId best = 0;
        std::size_t best_ecc = 0;
        for (NodeId u = 0; u < size(); ++u) {
            const auto dist = bfs_distances(u);
            const std::size_t ecc = *std::max_element(dist.begin(), dist.end());
            if (ecc > best_ecc) {
                best_ecc = ecc;
                best = u;
            }
        }
        return best;
    }

private:
    void finish_construction() {
        max_degree_ = 0;
        edge_count_ = 0;
        for (const auto& list : adj_) {
            max_degree_ = std::max(max_degree_, list.size());
            edge_count_ += list.size();
        }
        edge_count_ /= 2;
        if (max_degree_ == 0) throw GraphError("graph is disconnected");

        // Connectivity plus exact diameter via all-pairs BFS.
        diameter_ = 0;
        constexpr auto unreached = std::numeric_limits<std::size_t>::max();
        for (NodeId u = 0; u < size(); ++u) {
            const auto dist = bfs_distances(u);
            for (std::size_t d : dist) {
                if (d == unreached) throw GraphError("graph is disconnected");
                diameter_ = std::max(diameter_, d);
            }
        }
    }

    std::vector<std::vector<NodeId>> adj_;
    std::size_t max_degree_ = 0;
    std::size_t diameter_ = 0;
    std::size_t edge_count_ = 0;
};

inline std::size_t diameter(const Topology& g) { return g.diameter(); }

// Degree-weighted distance: minimum over all u-v paths of the sum of the
// degrees of every path node except the endpoint v. Dijkstra where leaving
// node w costs deg(w).
inline std::size_t weighted_dist(const Topology& g, NodeId u, NodeId v) {
    constexpr auto inf = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> cost(g.size(), inf);
    using Entry = std::pair<std::size_t, NodeId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
    cost[u] = 0;
    frontier.push({0, u});
    while (!frontier.empty()) {
        auto [c, w] = frontier.top();
        frontier.pop();
        if (c != cost[w]) continue;
        if (w == v) return c;
        for (NodeId x : g.neighbors(w)) {
            const std::size_t next = c + g.degree(w);
            if (next < cost[x]) {
                cost[x] = next;
                frontier.push({next, x});
            }
        }
    }
    return cost[v];
}

// ---- Generators -----------------------------------------------------------

inline Topology make_path(std::size_t n) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
    return Topology::from_edges(n, std::move(edges));
}

inline Topology make_cycle(std::size_t n) {
    if (n < 3) throw GraphError("cycle needs at least 3 nodes");
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
    edges.push_back({static_cast<NodeId>(n - 1), 0});
    return Topology::from_edges(n, std::move(edges));
}

inline Topology make_star(std::size_t n) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 1; i < n; ++i) edges.push_back({0, i});
    return Topology::from_edges(n, std::move(edges));
}

inline Topology make_complete(std::size_t n) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j) edges.push_back({i, j});
    return Topology::from_edges(n, std::move(edges));
}

// Complete binary tree in heap order: children of i are 2i+1 and 2i+2.
inline Topology make_binary_tree(std::size_t n) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 1; i < n; ++i) edges.push_back({(i - 1) / 2, i});
    return Topology::from_edges(n, std::move(edges));
}

inline Topology make_grid2d(std::size_t rows, std::size_t cols) {
    if (rows < 1 || cols < 1 || rows * cols < 2) throw GraphError("grid too small");
    auto at = [cols](std::size_t r, std::size_t c) {
        return static_cast<NodeId>(r * cols + c);
    };
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            if (c + 1 < cols) edges.push_back({at(r, c), at(r, c + 1)});
            if (r + 1 < rows) edges.push_back({at(r, c), at(r + 1, c)});
        }
    return Topology::from_edges(rows * cols, std::move(edges));
}

// Two cliques of size `clique` joined by a path of `bridge` extra nodes.
inline Topology make_barbell(std::size_t clique, std::size_t bridge) {
    if (clique < 3) throw GraphError("barbell cliques need at least 3 nodes");
    const std::size_t n = 2 * clique + bridge;
    std::vector<std::pair<NodeId, NodeId>> edges;
    auto add_clique = [&edges](NodeId base, std::size_t size) {
        for (NodeId i = 0; i < size; ++i)
            for (NodeId j = i + 1; j < size; ++j) edges.push_back({base + i, base + j});
    };
    add_clique(0, clique);
    add_clique(static_cast<NodeId>(clique + bridge), clique);
    for (NodeId i = 0; i + 1 < bridge; ++i)
        edges.push_back({static_cast<NodeId>(clique + i), static_cast<NodeId>(clique + i + 1)});
    if (bridge > 0) {
        edges.push_back({static_cast<NodeId>(clique - 1), static_cast<NodeId>(clique)});
        edges.push_back({static_cast<NodeId>(clique + bridge - 1), static_cast<NodeId>(clique + bridge)});
    } else {
        edges.push_back({static_cast<NodeId>(clique - 1), static_cast<NodeId>(clique)});
    }
    return Topology::from_edges(n, std::move(edges));
}

// Configuration-model d-regular graph; resamples until simple and connected.
inline Topology make_random_regular(std::size_t n, std::size_t d, Rng& rng) {
    if (d < 1 || d >= n) throw GraphError("regular degree must be in [1, n)");
    if ((n * d) % 2 != 0) throw GraphError("n*d must be even for a d-regular graph");
    constexpr int max_attempts = 20000;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<NodeId> stubs;
        stubs.reserve(n * d);
        for (NodeId v = 0; v < n; ++v)
            for (std::size_t i = 0; i < d; ++i) stubs.push_back(v);
        for (std::size_t i = stubs.size(); i > 1; --i)
            std::swap(stubs[i - 1], stubs[rng.below(static_cast<std::uint32_t>(i))]);
        std::set<std::pair<NodeId, NodeId>> seen;
        bool simple = true;
        std::vector<std::pair<NodeId, NodeId>> edges;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            const NodeId u = stubs[i], v = stubs[i + 1];
            auto key = std::minmax(u, v);
            if (u == v || !seen.insert({key.first, key.second}).second) {
                simple = false;
                break;
            }
            edges.push_back({u, v});
        }
        if (!simple) continue;
        try {
            return Topology::from_edges(n, std::move(edges));
        } catch (const GraphError&) {
            continue;  // disconnected; resample
        }
    }
    throw GraphError("random_regular: retries exhausted");
}

// Erdos-Renyi G(n, p); resamples until connected.
inline Topology make_gnp(std::size_t n, double p, Rng& rng) {
    if (p <= 0.0 || p > 1.0) throw GraphError("gnp probability must be in (0, 1]");
    constexpr int max_attempts = 1000;
    constexpr double denom = 9007199254740992.0;  // 2^53
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<std::pair<NodeId, NodeId>> edges;
        for (NodeId i = 0; i < n; ++i)
            for (NodeId j = i + 1; j < n; ++j) {
                const double u = static_cast<double>(rng.next_u64() >> 11) / denom;
                if (u < p) edges.push_back({i, j});
            }
        try {
            return Topology::from_edges(n, std::move(edges));
        } catch (const GraphError&) {
            continue;
        }
    }
    throw GraphError("gnp: connectivity retries exhausted");
}

// ---- Edge-list text format ------------------------------------------------
//
// Header "n <node-count>" followed by one "u v" line per edge.

inline std::string store_edge_list(const Topology& g) {
    std::ostringstream out;
    out << "n " << g.size() << "\n";
    for (NodeId u = 0; u < g.size(); ++u)
        for (NodeId v : g.neighbors(u))
            if (u < v) out << u << " " << v << "\n";
    return out.str();
}

inline Topology load_edge_list(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&line_no](const std::string& what) {
        throw GraphError("edge list line " + std::to_string(line_no) + ": " + what);
    };

    std::size_t n = 0;
    if (!std::getline(in, line)) throw GraphError("edge list is empty");
    ++line_no;
    {
        std::istringstream header(line);
        std::string tag;
        if (!(header >> tag >> n) || tag != "n" || n < 2) fail("expected header \"n <node-count>\"");
        std::string rest;
        if (header >> rest) fail("trailing content after header");
    }
    std::vector<std::pair<NodeId, NodeId>> edges;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        long long u = -1, v = -1;
        if (!(row >> u >> v) || u < 0 || v < 0) fail("expected \"u v\"");
        std::string rest;
        if (row >> rest) fail("trailing content after edge");
        if (static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
            fail("node id out of range");
        edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
    }
    try {
        return Topology::from_edges(n, std::move(edges));
    } catch (const GraphError& e) {
        throw GraphError(std::string("edge list: ") + e.what());
    }
}

// ---- Family spec parsing ("path:50", "grid2d:8x8", "random_regular:64,4") --

inline Topology make_from_spec(const std::string& spec, std::uint64_t seed) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw GraphError("graph spec needs \"family:params\"");
    const std::string family = spec.substr(0, colon);
    std::string params = spec.substr(colon + 1);
    for (char& c : params)
        if (c == 'x' || c == ',') c = ' ';
    std::istringstream in(params);

    auto read_size = [&in, &spec]() {
        long long v = -1;
        if (!(in >> v) || v < 0) throw GraphError("bad parameters in graph spec: " + spec);
        return static_cast<std::size_t>(v);
    };

    if (family == "path") return make_path(read_size());
    if (family == "cycle") return make_cycle(read_size());
    if (family == "star") return make_star(read_size());
    if (family == "complete") return make_complete(read_size());
    if (family == "binary_tree") return make_binary_tree(read_size());
    if (family == "grid2d") {
        const std::size_t r = read_size();
        const std::size_t c = read_size();
        return make_grid2d(r, c);
    }
    if (family == "barbell") {
        const std::size_t a = read_size();
        const std::size_t b = read_size();
        return make_barbell(a, b);
    }
    if (family == "random_regular") {
        const std::size_t n = read_size();
        const std::size_t d = read_size();
        long long own_seed = -1;
        if (in >> own_seed) seed = static_cast<std::uint64_t>(own_seed);
        Rng rng(Rng::child_seed(seed, 0x67656E));
        return make_random_regular(n, d, rng);
    }
    if (family == "gnp") {
        const std::size_t n = read_size();
        double p = 0.0;
        if (!(in >> p)) throw GraphError("bad parameters in graph spec: " + spec);
        long long own_seed = -1;
        if (in >> own_seed) seed = static_cast<std::uint64_t>(own_seed);
        Rng rng(Rng::child_seed(seed, 0x67656E));
        return make_gnp(n, p, rng);
    }
    throw GraphError("unknown graph family: " + family);
}

}  // namespace gossip
