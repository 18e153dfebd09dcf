#pragma once

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dyncausal {

// Directed mixed graph: directed edges (self-loops allowed) plus bidirected
// edges between distinct nodes. Edge sets are kept deduplicated and the node
// order is the insertion order; equality and export are order-insensitive.
class DirectedMixedGraph {
  public:
    DirectedMixedGraph() = default;
    explicit DirectedMixedGraph(std::vector<std::string> nodes) {
        for (auto& n : nodes) add_node(std::move(n));
    }

    void add_node(std::string name) {
        if (index_of(name) >= 0) throw std::invalid_argument("duplicate node '" + name + "'");
        nodes_.push_back(std::move(name));
    }

    void add_directed(const std::string& from, const std::string& to) {
        directed_.insert({checked_index(from), checked_index(to)});
    }

    void add_bidirected(const std::string& a, const std::string& b) {
        int i = checked_index(a), j = checked_index(b);
        if (i == j) throw std::invalid_argument("bidirected edge endpoints must be distinct");
        bidirected_.insert({std::min(i, j), std::max(i, j)});
    }

    const std::vector<std::string>& nodes() const { return nodes_; }
    const std::set<std::pair<int, int>>& directed_edges() const { return directed_; }
    const std::set<std::pair<int, int>>& bidirected_edges() const { return bidirected_; }

    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (nodes_[i] == name) return static_cast<int>(i);
        return -1;
    }

    bool has_directed(const std::string& from, const std::string& to) const {
        int i = index_of(from), j = index_of(to);
        return i >= 0 && j >= 0 && directed_.count({i, j}) > 0;
    }
    bool has_bidirected(const std::string& a, const std::string& b) const {
        int i = index_of(a), j = index_of(b);
        return i >= 0 && j >= 0 && bidirected_.count({std::min(i, j), std::max(i, j)}) > 0;
    }
    bool has_self_loop() const {
        for (const auto& [i, j] : directed_)
            if (i == j) return true;
        return false;
    }

  private:
    int checked_index(const std::string& name) const {
        int i = index_of(name);
        if (i < 0) throw std::invalid_argument("unknown node '" + name + "'");
        return i;
    }

    std::vector<std::string> nodes_;
    std::set<std::pair<int, int>> directed_;    // (from, to)
    std::set<std::pair<int, int>> bidirected_;  // normalized (min, max)
};

// Label-wise equality of node and edge sets, insensitive to insertion order.
inline bool graph_equal(const DirectedMixedGraph& g1, const DirectedMixedGraph& g2) {
    auto sorted = [](std::vector<std::string> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    if (sorted(g1.nodes()) != sorted(g2.nodes())) return false;
    auto label_edges = [](const DirectedMixedGraph& g, bool bidir) {
        std::set<std::pair<std::string, std::string>> out;
        for (const auto& [i, j] : (bidir ? g.bidirected_edges() : g.directed_edges())) {
            std::string a = g.nodes()[i], b = g.nodes()[j];
            if (bidir && b < a) std::swap(a, b);
            out.insert({std::move(a), std::move(b)});
        }
        return out;
    };
    return label_edges(g1, false) == label_edges(g2, false) && label_edges(g1, true) == label_edges(g2, true);
}

namespace detail {

// One walkable edge traversal: going to `to`, with `head_at_from` / `head_at_to`
// telling whether the edge carries an arrowhead at the departure/arrival end.
struct Traversal {
    int to;
    bool head_at_from;
    bool head_at_to;
};

inline std::vector<std::vector<Traversal>> walk_adjacency(const DirectedMixedGraph& g) {
    std::vector<std::vector<Traversal>> adj(g.nodes().size());
    for (const auto& [i, j] : g.directed_edges()) {
        adj[i].push_back({j, false, true});  // along i -> j
        adj[j].push_back({i, true, false});  // against, from j back to i
    }
    for (const auto& [i, j] : g.bidirected_edges()) {
        adj[i].push_back({j, true, true});
        adj[j].push_back({i, true, true});
    }
    return adj;
}

}  // namespace detail

// m-separation on the mixed graph, walk formulation: A and B are separated by
// C iff no walk from A to B has all its colliders in C and all its
// non-colliders outside C. Computed as reachability over (node, arrival-mark)
// states. Self-loops are rejected; resolve them first.
inline bool d_separated(const DirectedMixedGraph& g, const std::set<std::string>& A,
                        const std::set<std::string>& B, const std::set<std::string>& C) {
    auto to_index = [&](const std::set<std::string>& S) {
        std::set<int> out;
        for (const auto& name : S) {
            int i = g.index_of(name);
            if (i < 0) throw std::invalid_argument("d_separated: unknown node '" + name + "'");
            out.insert(i);
        }
        return out;
    };
    std::set<int> a = to_index(A), b = to_index(B), c = to_index(C);
    for (int i : a)
        if (b.count(i) || c.count(i)) throw std::invalid_argument("d_separated: sets must be pairwise disjoint");
    for (int i : b)
        if (c.count(i)) throw std::invalid_argument("d_separated: sets must be pairwise disjoint");
    if (g.has_self_loop())
        throw std::invalid_argument("d_separated: graph has self-loops; resolve them before querying");

    const auto adj = detail::walk_adjacency(g);
    const int n = static_cast<int>(g.nodes().size());
    // state = node * 2 + (arrived with arrowhead ? 1 : 0)
    std::vector<char> seen(2 * n, 0);
    std::deque<std::pair<int, bool>> queue;
    for (int s : a) {
        for (const auto& tr : adj[s]) {
            int state = tr.to * 2 + (tr.head_at_to ? 1 : 0);
            if (!seen[state]) {
                seen[state] = 1;
                queue.push_back({tr.to, tr.head_at_to});
            }
        }
    }
    while (!queue.empty()) {
        auto [v, head_in] = queue.front();
        queue.pop_front();
        if (b.count(v)) return false;
        for (const auto& tr : adj[v]) {
            bool collider = head_in && tr.head_at_from;
            bool pass = collider ? c.count(v) > 0 : c.count(v) == 0;
            if (!pass) continue;
            int state = tr.to * 2 + (tr.head_at_to ? 1 : 0);
            if (!seen[state]) {
                seen[state] = 1;
                queue.push_back({tr.to, tr.head_at_to});
            }
        }
    }
    return true;
}

// Deterministic DOT export: nodes sorted by label, directed edges as `->`,
// bidirected edges as `->` with dir=both.
inline std::string to_dot(const DirectedMixedGraph& g, const std::string& name = "G") {
    std::vector<std::string> sorted_nodes = g.nodes();
    std::sort(sorted_nodes.begin(), sorted_nodes.end());
    std::ostringstream out;
    out << "digraph \"" << name << "\" {\n";
    for (const auto& n : sorted_nodes) out << "  \"" << n << "\";\n";
    std::set<std::pair<std::string, std::string>> dir, bidir;
    for (const auto& [i, j] : g.directed_edges()) dir.insert({g.nodes()[i], g.nodes()[j]});
    for (const auto& [i, j] : g.bidirected_edges()) {
        std::string a = g.nodes()[i], b = g.nodes()[j];
        bidir.insert({std::min(a, b), std::max(a, b)});
    }
    for (const auto& [a, b] : dir) out << "  \"" << a << "\" -> \"" << b << "\";\n";
    for (const auto& [a, b] : bidir) out << "  \"" << a << "\" -> \"" << b << "\" [dir=both];\n";
    out << "}\n";
    return out.str();
}

}  // namespace dyncausal
