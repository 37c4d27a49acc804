#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "aic/geo.hpp"

namespace aic {

enum class NodeKind : u8 { residential = 0, arterial, highway, other };

inline const char* node_kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::residential: return "residential";
        case NodeKind::arterial: return "arterial";
        case NodeKind::highway: return "highway";
        case NodeKind::other: return "other";
    }
    return "?";
}

inline NodeKind node_kind_from_name(std::string_view s) {
    if (s == "residential") return NodeKind::residential;
    if (s == "arterial") return NodeKind::arterial;
    if (s == "highway") return NodeKind::highway;
    if (s == "other") return NodeKind::other;
    throw ParseError("unknown node kind: " + std::string(s));
}

// Free-flow speeds by route type, m/s. Scaled by a traffic factor because
// the only traffic signal available is an average load.
inline double street_speed(NodeKind k) {
    switch (k) {
        case NodeKind::residential: return 8.0;
        case NodeKind::arterial: return 14.0;
        case NodeKind::highway: return 25.0;
        case NodeKind::other: return 8.0;
    }
    return 8.0;
}

inline double edge_travel_time(double length_m, NodeKind kind, double traffic_factor = 1.0) {
    return length_m / street_speed(kind) * traffic_factor;
}

struct StreetNode {
    u64 id = 0;  // external id from the source file
    Point position;
    NodeKind kind = NodeKind::residential;
};

struct StreetEdge {
    u32 u = 0, v = 0;  // dense node indices
    double length = 0.0;
    double travel_time = 0.0;
};

// Undirected road graph over dense node indices. External ids are kept for
// diagnostics and file round-trips.
class StreetGraph {
public:
    std::vector<StreetNode> nodes;
    std::vector<StreetEdge> edges;

    u32 size() const { return u32(nodes.size()); }

    u32 add_node(u64 id, Point pos, NodeKind kind) {
        u32 idx = u32(nodes.size());
        nodes.push_back({id, pos, kind});
        id_to_index_[id] = idx;
        return idx;
    }

    void add_edge(u32 u, u32 v, double length, double travel_time) {
        edges.push_back({u, v, length, travel_time});
        adjacency_.clear();
    }

    std::optional<u32> index_of(u64 external_id) const {
        auto it = id_to_index_.find(external_id);
        if (it == id_to_index_.end()) return std::nullopt;
        return it->second;
    }

    struct Neighbor {
        u32 node;
        double travel_time;
    };

    const std::vector<std::vector<Neighbor>>& adjacency() const {
        if (adjacency_.empty() && !nodes.empty()) {
            adjacency_.resize(nodes.size());
            for (const StreetEdge& e : edges) {
                adjacency_[e.u].push_back({e.v, e.travel_time});
                adjacency_[e.v].push_back({e.u, e.travel_time});
            }
        }
        return adjacency_;
    }

    // Invariants: unique ids, positive lengths/times, no self loops,
    // resolvable endpoints, and full reachability from node 0.
    void validate() const {
        if (nodes.empty()) throw ValidationError("street graph has no nodes");
        std::unordered_map<u64, int> seen;
        for (const StreetNode& n : nodes) {
            if (++seen[n.id] > 1)
                throw ValidationError("duplicate node id " + std::to_string(n.id));
            if (!std::isfinite(n.position.x) || !std::isfinite(n.position.y))
                throw ValidationError("non-finite position for node " + std::to_string(n.id));
        }
        for (const StreetEdge& e : edges) {
            if (e.u >= nodes.size() || e.v >= nodes.size())
                throw ValidationError("edge endpoint out of range");
            if (e.u == e.v)
                throw ValidationError("self loop at node " + std::to_string(nodes[e.u].id));
            if (!(e.travel_time > 0.0))
                throw ValidationError("non-positive travel time on edge " +
                                      std::to_string(nodes[e.u].id) + "-" +
                                      std::to_string(nodes[e.v].id));
            if (!(e.length > 0.0))
                throw ValidationError("non-positive length on edge " +
                                      std::to_string(nodes[e.u].id) + "-" +
                                      std::to_string(nodes[e.v].id));
        }
        // connectivity
        std::vector<char> visited(nodes.size(), 0);
        std::vector<u32> stack{0};
        visited[0] = 1;
        std::size_t reached = 1;
        const auto& adj = adjacency();
        while (!stack.empty()) {
            u32 u = stack.back();
            stack.pop_back();
            for (const Neighbor& nb : adj[u]) {
                if (!visited[nb.node]) {
                    visited[nb.node] = 1;
                    ++reached;
                    stack.push_back(nb.node);
                }
            }
        }
        if (reached != nodes.size())
            throw ValidationError("graph is disconnected: " +
                                  std::to_string(nodes.size() - reached) +
                                  " of " + std::to_string(nodes.size()) +
                                  " nodes unreachable from node " +
                                  std::to_string(nodes[0].id));
    }

    // Single-source shortest path by travel time.
    std::vector<double> shortest_times_from(u32 source) const {
        constexpr double inf = std::numeric_limits<double>::infinity();
        std::vector<double> dist(nodes.size(), inf);
        dist[source] = 0.0;
        using Item = std::pair<double, u32>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        heap.push({0.0, source});
        const auto& adj = adjacency();
        while (!heap.empty()) {
            auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[u]) continue;
            for (const Neighbor& nb : adj[u]) {
                double nd = d + nb.travel_time;
                if (nd < dist[nb.node]) {
                    dist[nb.node] = nd;
                    heap.push({nd, nb.node});
                }
            }
        }
        return dist;
    }

    std::optional<double> travel_time(u32 source, u32 target) const {
        if (source == target) return 0.0;
        double d = shortest_times_from(source)[target];
        if (!std::isfinite(d)) return std::nullopt;
        return d;
    }

    u32 nearest_node(Point p) const {
        u32 best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (u32 i = 0; i < nodes.size(); ++i) {
            double d = dist2(p, nodes[i].position);
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        return best;
    }

    BoundingBox bounds() const {
        std::vector<Point> pts;
        pts.reserve(nodes.size());
        for (const StreetNode& n : nodes) pts.push_back(n.position);
        return BoundingBox::of(pts);
    }

private:
    std::unordered_map<u64, u32> id_to_index_;
    mutable std::vector<std::vector<Neighbor>> adjacency_;
};

// Format: line-oriented text. `N <id> <x> <y> <kind>` declares a node,
// `E <u> <v> <length_m> <travel_time_s>` an edge. `#` starts a comment;
// the directive `# crs lonlat` switches coordinate interpretation.
inline StreetGraph load_street_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open streets file: " + path);

    StreetGraph g;
    bool lonlat = false;
    struct RawNode {
        u64 id;
        double x, y;
        NodeKind kind;
    };
    std::vector<RawNode> raw_nodes;
    struct RawEdge {
        u64 u, v;
        double length, time;
        int line;
    };
    std::vector<RawEdge> raw_edges;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv(line);
        if (sv.empty()) continue;
        if (sv[0] == '#') {
            if (sv.find("crs lonlat") != std::string_view::npos) lonlat = true;
            continue;
        }
        std::istringstream ls(line);
        char tag;
        ls >> tag;
        if (tag == 'N') {
            RawNode n;
            std::string kind;
            ls >> n.id >> n.x >> n.y >> kind;
            if (!ls) throw ParseError("streets line " + std::to_string(line_no) + ": malformed node record");
            n.kind = node_kind_from_name(kind);
            raw_nodes.push_back(n);
        } else if (tag == 'E') {
            RawEdge e;
            ls >> e.u >> e.v >> e.length >> e.time;
            if (!ls) throw ParseError("streets line " + std::to_string(line_no) + ": malformed edge record");
            e.line = line_no;
            raw_edges.push_back(e);
        } else {
            throw ParseError("streets line " + std::to_string(line_no) +
                             ": unknown record tag '" + std::string(1, tag) + "'");
        }
    }
    if (raw_nodes.empty()) throw ValidationError("streets file has no nodes: " + path);

    Equirectangular proj{0, 0};
    if (lonlat) {
        double lo_x = raw_nodes[0].x, hi_x = raw_nodes[0].x;
        double lo_y = raw_nodes[0].y, hi_y = raw_nodes[0].y;
        for (const RawNode& n : raw_nodes) {
            lo_x = std::min(lo_x, n.x);
            hi_x = std::max(hi_x, n.x);
            lo_y = std::min(lo_y, n.y);
            hi_y = std::max(hi_y, n.y);
        }
        proj = Equirectangular{(lo_x + hi_x) / 2.0, (lo_y + hi_y) / 2.0};
    }
    for (const RawNode& n : raw_nodes) {
        Point p = lonlat ? proj.project(n.x, n.y) : Point{n.x, n.y};
        if (g.index_of(n.id)) throw ValidationError("duplicate node id " + std::to_string(n.id));
        g.add_node(n.id, p, n.kind);
    }
    for (const RawEdge& e : raw_edges) {
        auto u = g.index_of(e.u);
        auto v = g.index_of(e.v);
        if (!u) throw ValidationError("streets line " + std::to_string(e.line) +
                                      ": edge references unknown node " + std::to_string(e.u));
        if (!v) throw ValidationError("streets line " + std::to_string(e.line) +
                                      ": edge references unknown node " + std::to_string(e.v));
        g.add_edge(*u, *v, e.length, e.time);
    }
    g.validate();
    return g;
}

inline void save_street_graph(const StreetGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw SimError("cannot write streets file: " + path);
    out << "# streets: N <id> <x> <y> <kind> / E <u> <v> <length_m> <travel_time_s>\n";
    char buf[64];
    auto fmt = [&](double v) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
        return std::string(buf, p);
    };
    for (const StreetNode& n : g.nodes)
        out << "N " << n.id << ' ' << fmt(n.position.x) << ' ' << fmt(n.position.y) << ' '
            << node_kind_name(n.kind) << '\n';
    for (const StreetEdge& e : g.edges)
        out << "E " << g.nodes[e.u].id << ' ' << g.nodes[e.v].id << ' ' << fmt(e.length) << ' '
            << fmt(e.travel_time) << '\n';
}

}  // namespace aic
