#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sent/graph.hpp"
#include "sent/rng.hpp"

namespace sent {

// Traversal policies. They resolve the encoder's three choice points:
// where a traversal starts, which uncovered neighbor extends the trail,
// and where to resume after a dead end. Degrees are static original-graph
// degrees; ties are broken uniformly at random.
enum class StrategyKind { Random, MinDegree, MaxDegree, Anchor };

inline const char* strategy_name(StrategyKind s) {
  switch (s) {
    case StrategyKind::Random: return "random";
    case StrategyKind::MinDegree: return "min-degree";
    case StrategyKind::MaxDegree: return "max-degree";
    case StrategyKind::Anchor: return "anchor";
  }
  return "?";
}

inline StrategyKind parse_strategy(const std::string& s) {
  if (s == "random") return StrategyKind::Random;
  if (s == "min-degree") return StrategyKind::MinDegree;
  if (s == "max-degree") return StrategyKind::MaxDegree;
  if (s == "anchor") return StrategyKind::Anchor;
  throw std::invalid_argument("unknown strategy: " + s +
                              " (expected random|min-degree|max-degree|anchor)");
}

inline std::vector<StrategyKind> all_strategies() {
  return {StrategyKind::Random, StrategyKind::MinDegree, StrategyKind::MaxDegree,
          StrategyKind::Anchor};
}

namespace detail {

inline NodeId pick_uniform(std::span<const NodeId> candidates, RngStream& rng) {
  if (candidates.empty()) throw std::invalid_argument("empty candidate set");
  return candidates[rng.below(candidates.size())];
}

// Uniform among candidates attaining the degree extremum.
inline NodeId pick_degree_extremum(const LabeledGraph& g, std::span<const NodeId> candidates,
                                   RngStream& rng, bool take_max) {
  if (candidates.empty()) throw std::invalid_argument("empty candidate set");
  int best = g.degree(candidates[0]);
  for (NodeId v : candidates) {
    int d = g.degree(v);
    if (take_max ? d > best : d < best) best = d;
  }
  std::vector<NodeId> tied;
  for (NodeId v : candidates)
    if (g.degree(v) == best) tied.push_back(v);
  return tied[rng.below(tied.size())];
}

}  // namespace detail

inline NodeId choose_start(StrategyKind s, const LabeledGraph& g,
                           std::span<const NodeId> candidates, RngStream& rng) {
  switch (s) {
    case StrategyKind::Random: return detail::pick_uniform(candidates, rng);
    case StrategyKind::MinDegree: return detail::pick_degree_extremum(g, candidates, rng, false);
    case StrategyKind::MaxDegree:
    case StrategyKind::Anchor: return detail::pick_degree_extremum(g, candidates, rng, true);
  }
  throw std::logic_error("bad strategy");
}

// Min-Degree and Max-Degree bias only starts and restarts; their trail
// extensions stay uniform. Anchor prefers leaf-like neighbors.
inline NodeId choose_extension(StrategyKind s, const LabeledGraph& g, NodeId /*current*/,
                               std::span<const NodeId> candidates, RngStream& rng) {
  if (s == StrategyKind::Anchor) return detail::pick_degree_extremum(g, candidates, rng, false);
  return detail::pick_uniform(candidates, rng);
}

inline NodeId choose_restart(StrategyKind s, const LabeledGraph& g,
                             std::span<const NodeId> candidates, RngStream& rng) {
  switch (s) {
    case StrategyKind::Random: return detail::pick_uniform(candidates, rng);
    case StrategyKind::MinDegree: return detail::pick_degree_extremum(g, candidates, rng, false);
    case StrategyKind::MaxDegree:
    case StrategyKind::Anchor: return detail::pick_degree_extremum(g, candidates, rng, true);
  }
  throw std::logic_error("bad strategy");
}

}  // namespace sent
