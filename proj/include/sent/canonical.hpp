#pragma once

#include <map>
#include <string>
#include <vector>

#include "sent/graph.hpp"

namespace sent {

// Canonical certificate: byte string identifying the label-respecting
// isomorphism class of a graph. Built by color refinement with
// individualization backtracking on the smallest non-singleton cell;
// the certificate is the minimum serialized form over all branches.
// Labels enter by string rank, so certificates are comparable across
// graphs loaded with differently ordered vocabularies.
//
// Exponential in the worst case, fine for the small graphs this toolkit
// handles (tens of nodes).
namespace detail {

struct CanonContext {
  const LabeledGraph& g;
  std::vector<int> edge_rank;  // edge label id -> string rank among present labels
};

inline std::vector<int> refine_colors(const CanonContext& ctx, std::vector<int> colors) {
  const NodeId n = ctx.g.node_count();
  for (;;) {
    // signature = (own color, sorted multiset of (edge label rank, neighbor color))
    std::vector<std::pair<std::vector<int>, NodeId>> sigs(n);
    for (NodeId v = 0; v < n; ++v) {
      std::vector<int> s;
      s.push_back(colors[v]);
      std::vector<std::pair<int, int>> nb;
      for (auto [w, lab] : ctx.g.neighbors(v)) nb.emplace_back(ctx.edge_rank[lab], colors[w]);
      std::sort(nb.begin(), nb.end());
      for (auto [lab, c] : nb) {
        s.push_back(lab);
        s.push_back(c);
      }
      sigs[v] = {std::move(s), v};
    }
    std::vector<std::pair<std::vector<int>, NodeId>> sorted = sigs;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> next(n);
    int color = -1;
    for (size_t i = 0; i < sorted.size(); ++i) {
      if (i == 0 || sorted[i].first != sorted[i - 1].first) ++color;
      next[sorted[i].second] = color;
    }
    if (next == colors) return colors;
    colors = std::move(next);
  }
}

inline std::string certificate_for_order(const CanonContext& ctx, const std::vector<int>& colors) {
  // colors are discrete: node with color c goes to position c
  const LabeledGraph& g = ctx.g;
  const NodeId n = g.node_count();
  std::string out;
  out += "n" + std::to_string(n) + ";";
  std::vector<std::string> labels(n);
  for (NodeId v = 0; v < n; ++v) labels[colors[v]] = g.vocab().node_labels[g.node_label(v)];
  for (const auto& s : labels) out += s + ",";
  out += ";";
  std::vector<std::string> edges;
  for (const auto& e : g.edges()) {
    NodeId a = colors[e.u], b = colors[e.v];
    if (a > b) std::swap(a, b);
    edges.push_back(std::to_string(a) + "-" + std::to_string(b) + ":" +
                    g.vocab().edge_labels[e.label]);
  }
  std::sort(edges.begin(), edges.end());
  for (const auto& s : edges) out += s + "|";
  return out;
}

inline void canonical_search(const CanonContext& ctx, std::vector<int> colors, std::string& best) {
  colors = refine_colors(ctx, std::move(colors));
  const NodeId n = ctx.g.node_count();
  // smallest non-singleton cell, ties to the smallest color id
  std::map<int, std::vector<NodeId>> cells;
  for (NodeId v = 0; v < n; ++v) cells[colors[v]].push_back(v);
  int target_color = -1;
  size_t target_size = 0;
  for (const auto& [c, members] : cells) {
    if (members.size() > 1 && (target_color < 0 || members.size() < target_size)) {
      target_color = c;
      target_size = members.size();
    }
  }
  if (target_color < 0) {
    std::string cert = certificate_for_order(ctx, colors);
    if (best.empty() || cert < best) best = cert;
    return;
  }
  for (NodeId v : cells[target_color]) {
    std::vector<int> split = colors;
    for (NodeId w = 0; w < n; ++w)
      if (split[w] >= target_color && w != v) ++split[w];
    canonical_search(ctx, std::move(split), best);
  }
}

}  // namespace detail

inline std::string canonical_certificate(const LabeledGraph& g) {
  const NodeId n = g.node_count();
  std::vector<std::string> present;
  for (NodeId v = 0; v < n; ++v) present.push_back(g.vocab().node_labels[g.node_label(v)]);
  std::sort(present.begin(), present.end());
  present.erase(std::unique(present.begin(), present.end()), present.end());
  std::vector<int> colors(n);
  for (NodeId v = 0; v < n; ++v) {
    const std::string& s = g.vocab().node_labels[g.node_label(v)];
    colors[v] = static_cast<int>(std::lower_bound(present.begin(), present.end(), s) - present.begin());
  }
  std::vector<std::string> edge_present(g.vocab().edge_labels);
  std::sort(edge_present.begin(), edge_present.end());
  std::vector<int> edge_rank(g.vocab().edge_labels.size());
  for (size_t i = 0; i < edge_rank.size(); ++i) {
    edge_rank[i] = static_cast<int>(
        std::lower_bound(edge_present.begin(), edge_present.end(), g.vocab().edge_labels[i]) -
        edge_present.begin());
  }
  detail::CanonContext ctx{g, std::move(edge_rank)};
  std::string best;
  detail::canonical_search(ctx, std::move(colors), best);
  return best;
}

}  // namespace sent
