#pragma once

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>

#include "sent/graph.hpp"

namespace sent {

// Planarity predicate via Boyer-Myrvold (linear time). Labels are ignored.
inline bool is_planar(const LabeledGraph& g) {
  using BoostGraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
  const NodeId n = g.node_count();
  if (n <= 4) {
    // Euler bound cannot be violated below K5; every graph on <= 4 nodes is planar.
    return true;
  }
  BoostGraph bg(static_cast<size_t>(n));
  for (const auto& e : g.edges()) boost::add_edge(e.u, e.v, bg);
  return boost::boyer_myrvold_planarity_test(bg);
}

}  // namespace sent
