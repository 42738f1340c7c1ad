#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sent {

using NodeId = int;
using LabelId = int;

struct Edge {
  NodeId u = 0;  // u < v always
  NodeId v = 0;
  LabelId label = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Label vocabularies shared by a set of graphs. Ordered lists; ids are
// indices into them.
struct LabelVocab {
  std::vector<std::string> node_labels;
  std::vector<std::string> edge_labels;

  LabelId node_label_id(const std::string& s) const {
    auto it = std::find(node_labels.begin(), node_labels.end(), s);
    if (it == node_labels.end()) throw std::invalid_argument("unknown node label: " + s);
    return static_cast<LabelId>(it - node_labels.begin());
  }
  LabelId edge_label_id(const std::string& s) const {
    auto it = std::find(edge_labels.begin(), edge_labels.end(), s);
    if (it == edge_labels.end()) throw std::invalid_argument("unknown edge label: " + s);
    return static_cast<LabelId>(it - edge_labels.begin());
  }

  friend bool operator==(const LabelVocab&, const LabelVocab&) = default;
};

// Undirected simple graph with categorical node and edge labels.
// Node ids are contiguous 0..n-1; edges are stored sorted with u < v.
class LabeledGraph {
 public:
  LabeledGraph() = default;

  LabeledGraph(std::vector<LabelId> node_labels, std::vector<Edge> edges, LabelVocab vocab)
      : node_labels_(std::move(node_labels)), edges_(std::move(edges)), vocab_(std::move(vocab)) {
    const NodeId n = static_cast<NodeId>(node_labels_.size());
    for (LabelId a : node_labels_) {
      if (a < 0 || a >= static_cast<LabelId>(vocab_.node_labels.size()))
        throw std::invalid_argument("node label id out of range");
    }
    for (auto& e : edges_) {
      if (e.u == e.v) throw std::invalid_argument("self-loop rejected");
      if (e.u > e.v) std::swap(e.u, e.v);
      if (e.u < 0 || e.v >= n) throw std::invalid_argument("edge endpoint out of range");
      if (e.label < 0 || e.label >= static_cast<LabelId>(vocab_.edge_labels.size()))
        throw std::invalid_argument("edge label id out of range");
    }
    std::sort(edges_.begin(), edges_.end());
    for (size_t i = 1; i < edges_.size(); ++i) {
      if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v)
        throw std::invalid_argument("duplicate edge rejected");
    }
    build_adjacency();
  }

  NodeId node_count() const { return static_cast<NodeId>(node_labels_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<LabelId>& node_labels() const { return node_labels_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const LabelVocab& vocab() const { return vocab_; }

  LabelId node_label(NodeId v) const {
    check_node(v);
    return node_labels_[v];
  }

  int degree(NodeId v) const {
    check_node(v);
    return static_cast<int>(adj_[v].size());
  }

  // Neighbors with incident edge labels, ascending by neighbor id.
  const std::vector<std::pair<NodeId, LabelId>>& neighbors(NodeId v) const {
    check_node(v);
    return adj_[v];
  }

  bool has_edge(NodeId u, NodeId v) const {
    if (u > v) std::swap(u, v);
    auto it = std::lower_bound(edges_.begin(), edges_.end(), u,
                               [](const Edge& e, NodeId key) { return e.u < key; });
    for (; it != edges_.end() && it->u == u; ++it)
      if (it->v == v) return true;
    return false;
  }

  friend bool operator==(const LabeledGraph&, const LabeledGraph&) = default;

 private:
  void check_node(NodeId v) const {
    if (v < 0 || v >= node_count()) throw std::out_of_range("node id out of range");
  }

  void build_adjacency() {
    adj_.assign(node_labels_.size(), {});
    for (const auto& e : edges_) {
      adj_[e.u].emplace_back(e.v, e.label);
      adj_[e.v].emplace_back(e.u, e.label);
    }
    for (auto& row : adj_) std::sort(row.begin(), row.end());
  }

  std::vector<LabelId> node_labels_;
  std::vector<Edge> edges_;
  LabelVocab vocab_;
  std::vector<std::vector<std::pair<NodeId, LabelId>>> adj_;
};

inline std::vector<std::vector<NodeId>> connected_components(const LabeledGraph& g) {
  const NodeId n = g.node_count();
  std::vector<int> comp(n, -1);
  std::vector<std::vector<NodeId>> out;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    const int c = static_cast<int>(out.size());
    out.emplace_back();
    stack.push_back(s);
    comp[s] = c;
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      out[c].push_back(v);
      for (auto [w, lab] : g.neighbors(v)) {
        (void)lab;
        if (comp[w] < 0) {
          comp[w] = c;
          stack.push_back(w);
        }
      }
    }
    std::sort(out[c].begin(), out[c].end());
  }
  return out;
}

// Rebuilds the graph with node k renamed to new_id_of[k]. new_id_of must be
// a permutation of 0..n-1.
inline LabeledGraph relabel_nodes(const LabeledGraph& g, std::span<const NodeId> new_id_of) {
  const NodeId n = g.node_count();
  if (static_cast<NodeId>(new_id_of.size()) != n)
    throw std::invalid_argument("relabel_nodes: permutation size mismatch");
  std::vector<bool> seen(n, false);
  for (NodeId v : new_id_of) {
    if (v < 0 || v >= n || seen[v]) throw std::invalid_argument("relabel_nodes: not a permutation");
    seen[v] = true;
  }
  std::vector<LabelId> labels(n);
  for (NodeId k = 0; k < n; ++k) labels[new_id_of[k]] = g.node_labels()[k];
  std::vector<Edge> edges;
  edges.reserve(g.edges().size());
  for (const auto& e : g.edges()) edges.push_back({new_id_of[e.u], new_id_of[e.v], e.label});
  return LabeledGraph(std::move(labels), std::move(edges), g.vocab());
}

}  // namespace sent
