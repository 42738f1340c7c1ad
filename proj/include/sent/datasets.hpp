#pragma once

#include <array>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sent/graph.hpp"
#include "sent/rng.hpp"

namespace sent {

// ---------------------------------------------------------------------------
// Erdos-Renyi G(n, p) with uniformly random labels
// ---------------------------------------------------------------------------

inline LabeledGraph erdos_renyi(int n, double p, const LabelVocab& vocab, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("erdos_renyi: n must be >= 1");
  if (p < 0 || p > 1) throw std::invalid_argument("erdos_renyi: p must be in [0, 1]");
  std::vector<LabelId> labels(n);
  for (auto& a : labels) a = static_cast<LabelId>(rng.below(vocab.node_labels.size()));
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) {
      if (rng.real() < p)
        edges.push_back({u, v, static_cast<LabelId>(rng.below(vocab.edge_labels.size()))});
    }
  }
  return LabeledGraph(std::move(labels), std::move(edges), vocab);
}

inline std::vector<LabeledGraph> generate_erdos_renyi(int n_graphs, int n_min, int n_max, double p,
                                                      const LabelVocab& vocab, uint64_t seed,
                                                      bool require_connected = false,
                                                      int reject_budget = 1000) {
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("bad node range");
  std::vector<LabeledGraph> out;
  out.reserve(n_graphs);
  for (int i = 0; i < n_graphs; ++i) {
    RngStream rng(derive_seed(seed, static_cast<uint64_t>(i)));
    const int n = n_min + static_cast<int>(rng.below(static_cast<uint64_t>(n_max - n_min + 1)));
    int tries = 0;
    for (;;) {
      LabeledGraph g = erdos_renyi(n, p, vocab, rng);
      if (!require_connected || connected_components(g).size() == 1) {
        out.push_back(std::move(g));
        break;
      }
      if (++tries >= reject_budget)
        throw std::runtime_error("erdos-renyi: connectivity rejection budget exhausted");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Delaunay triangulations of uniform random points (planar by construction)
// ---------------------------------------------------------------------------

namespace detail {

struct Point {
  double x, y;
};

struct DegenerateInput : std::runtime_error {
  DegenerateInput() : std::runtime_error("degenerate point configuration") {}
};

// Bowyer-Watson incremental triangulation. Throws DegenerateInput when an
// in-circle or orientation test is too close to call; callers resample.
inline std::vector<std::pair<int, int>> delaunay_edges(const std::vector<Point>& pts) {
  const int n = static_cast<int>(pts.size());
  std::vector<Point> all = pts;
  // super-triangle well outside the unit square
  all.push_back({-30.0, -20.0});
  all.push_back({30.0, -20.0});
  all.push_back({0.0, 45.0});
  struct Tri {
    int a, b, c;
  };
  std::vector<Tri> tris{{n, n + 1, n + 2}};
  auto orient = [&](int i, int j, int k) {
    const double v = (all[j].x - all[i].x) * (all[k].y - all[i].y) -
                     (all[j].y - all[i].y) * (all[k].x - all[i].x);
    if (std::abs(v) < 1e-12) throw DegenerateInput();
    return v;
  };
  auto in_circumcircle = [&](const Tri& t, int p) {
    int a = t.a, b = t.b, c = t.c;
    if (orient(a, b, c) < 0) std::swap(b, c);
    const double ax = all[a].x - all[p].x, ay = all[a].y - all[p].y;
    const double bx = all[b].x - all[p].x, by = all[b].y - all[p].y;
    const double cx = all[c].x - all[p].x, cy = all[c].y - all[p].y;
    const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) -
                       (bx * bx + by * by) * (ax * cy - cx * ay) +
                       (cx * cx + cy * cy) * (ax * by - bx * ay);
    if (std::abs(det) < 1e-12) throw DegenerateInput();
    return det > 0;
  };
  for (int p = 0; p < n; ++p) {
    std::vector<Tri> bad, keep;
    for (const Tri& t : tris)
      (in_circumcircle(t, p) ? bad : keep).push_back(t);
    // boundary of the bad region: edges appearing exactly once
    std::map<std::pair<int, int>, int> edge_use;
    for (const Tri& t : bad) {
      for (auto [u, v] : std::array<std::pair<int, int>, 3>{{{t.a, t.b}, {t.b, t.c}, {t.c, t.a}}}) {
        if (u > v) std::swap(u, v);
        ++edge_use[{u, v}];
      }
    }
    tris = std::move(keep);
    for (const auto& [e, uses] : edge_use)
      if (uses == 1) tris.push_back({e.first, e.second, p});
  }
  std::set<std::pair<int, int>> edges;
  for (const Tri& t : tris) {
    for (auto [u, v] : std::array<std::pair<int, int>, 3>{{{t.a, t.b}, {t.b, t.c}, {t.c, t.a}}}) {
      if (u >= n || v >= n) continue;  // touches the super-triangle
      if (u > v) std::swap(u, v);
      edges.insert({u, v});
    }
  }
  return {edges.begin(), edges.end()};
}

}  // namespace detail

// Planar graphs via Delaunay triangulation of uniform points in the unit
// square; degenerate draws are resampled with jittered fresh points.
inline LabeledGraph delaunay_planar(int n_points, const LabelVocab& vocab, RngStream& rng) {
  if (n_points < 3) throw std::invalid_argument("delaunay_planar: need at least 3 points");
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<detail::Point> pts(n_points);
    for (auto& p : pts) p = {rng.real(), rng.real()};
    try {
      auto edge_pairs = detail::delaunay_edges(pts);
      std::vector<LabelId> labels(n_points, 0);
      std::vector<Edge> edges;
      edges.reserve(edge_pairs.size());
      for (auto [u, v] : edge_pairs) edges.push_back({u, v, 0});
      LabeledGraph g(std::move(labels), std::move(edges), vocab);
      if (connected_components(g).size() != 1) continue;  // cannot happen; belt and braces
      return g;
    } catch (const detail::DegenerateInput&) {
      continue;
    }
  }
  throw std::runtime_error("delaunay_planar: resample budget exhausted");
}

inline LabelVocab planar_vocab() { return LabelVocab{{"v"}, {"e"}}; }

inline std::vector<LabeledGraph> generate_delaunay_planar(int n_graphs, int points_min,
                                                          int points_max, uint64_t seed) {
  if (points_min < 3 || points_max < points_min) throw std::invalid_argument("bad point range");
  const LabelVocab vocab = planar_vocab();
  std::vector<LabeledGraph> out;
  out.reserve(n_graphs);
  for (int i = 0; i < n_graphs; ++i) {
    RngStream rng(derive_seed(seed, static_cast<uint64_t>(i)));
    const int k =
        points_min + static_cast<int>(rng.below(static_cast<uint64_t>(points_max - points_min + 1)));
    out.push_back(delaunay_planar(k, vocab, rng));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hand-built explicit-hydrogen molecules with known stability
// ---------------------------------------------------------------------------

struct ToyMolecule {
  std::string name;
  LabeledGraph graph;
  bool stable = false;
};

inline LabelVocab molecule_vocab() {
  return LabelVocab{{"C", "F", "H", "N", "O", "P"}, {"double", "single", "triple"}};
}

namespace detail {

// star molecule: one center atom with `arms` single-bonded copies of `leaf`
inline LabeledGraph star_molecule(const LabelVocab& vocab, const std::string& center,
                                  const std::string& leaf, int arms) {
  std::vector<LabelId> labels{vocab.node_label_id(center)};
  std::vector<Edge> edges;
  const LabelId single = vocab.edge_label_id("single");
  for (int i = 1; i <= arms; ++i) {
    labels.push_back(vocab.node_label_id(leaf));
    edges.push_back({0, i, single});
  }
  return LabeledGraph(std::move(labels), std::move(edges), vocab);
}

}  // namespace detail

// Stable molecules plus deliberately unstable variants, each tagged with
// the expected molecular-stability verdict.
inline std::vector<ToyMolecule> toy_molecules() {
  const LabelVocab v = molecule_vocab();
  const LabelId C = v.node_label_id("C"), F = v.node_label_id("F"), H = v.node_label_id("H"),
                N = v.node_label_id("N"), O = v.node_label_id("O");
  const LabelId s = v.edge_label_id("single"), d = v.edge_label_id("double"),
                t = v.edge_label_id("triple");
  std::vector<ToyMolecule> out;
  auto add = [&](const std::string& name, std::vector<LabelId> labels, std::vector<Edge> edges,
                 bool stable) {
    out.push_back({name, LabeledGraph(std::move(labels), std::move(edges), v), stable});
  };

  add("methane", {C, H, H, H, H}, {{0, 1, s}, {0, 2, s}, {0, 3, s}, {0, 4, s}}, true);
  add("water", {O, H, H}, {{0, 1, s}, {0, 2, s}}, true);
  add("ammonia", {N, H, H, H}, {{0, 1, s}, {0, 2, s}, {0, 3, s}}, true);
  // C2H5OH
  add("ethanol", {C, C, O, H, H, H, H, H, H},
      {{0, 1, s}, {1, 2, s}, {2, 3, s}, {0, 4, s}, {0, 5, s}, {0, 6, s}, {1, 7, s}, {1, 8, s}},
      true);
  // Kekule benzene: alternating single/double ring, one H per carbon
  {
    std::vector<LabelId> labels;
    std::vector<Edge> edges;
    for (int i = 0; i < 6; ++i) labels.push_back(C);
    for (int i = 0; i < 6; ++i) labels.push_back(H);
    for (int i = 0; i < 6; ++i) {
      int j = (i + 1) % 6;
      edges.push_back({std::min(i, j), std::max(i, j), i % 2 == 0 ? d : s});
      edges.push_back({i, 6 + i, s});
    }
    add("benzene", std::move(labels), std::move(edges), true);
  }
  add("formaldehyde", {C, O, H, H}, {{0, 1, d}, {0, 2, s}, {0, 3, s}}, true);
  add("hydrogen-fluoride", {F, H}, {{0, 1, s}}, true);
  add("ethene", {C, C, H, H, H, H}, {{0, 1, d}, {0, 2, s}, {0, 3, s}, {1, 4, s}, {1, 5, s}}, true);
  add("ethyne", {C, C, H, H}, {{0, 1, t}, {0, 2, s}, {1, 3, s}}, true);
  add("methylamine", {C, N, H, H, H, H, H},
      {{0, 1, s}, {0, 2, s}, {0, 3, s}, {0, 4, s}, {1, 5, s}, {1, 6, s}}, true);
  out.push_back({"phosphine", detail::star_molecule(v, "P", "H", 3), true});
  out.push_back({"phosphorane", detail::star_molecule(v, "P", "H", 5), true});

  out.push_back({"pentavalent-carbon", detail::star_molecule(v, "C", "H", 5), false});
  out.push_back({"trivalent-oxygen", detail::star_molecule(v, "O", "H", 3), false});
  out.push_back({"tetravalent-nitrogen", detail::star_molecule(v, "N", "H", 4), false});
  out.push_back({"methyl-radical", detail::star_molecule(v, "C", "H", 3), false});
  out.push_back({"divalent-fluorine", detail::star_molecule(v, "F", "H", 2), false});
  return out;
}

// ---------------------------------------------------------------------------
// Deterministic shuffle split
// ---------------------------------------------------------------------------

inline std::pair<std::vector<LabeledGraph>, std::vector<LabeledGraph>> split(
    std::span<const LabeledGraph> graphs, double train_fraction, uint64_t seed) {
  if (!(train_fraction > 0 && train_fraction < 1))
    throw std::invalid_argument("train fraction must be in (0, 1)");
  std::vector<size_t> idx(graphs.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  RngStream rng(seed);
  for (size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
  const size_t n_train = static_cast<size_t>(std::llround(train_fraction * graphs.size()));
  if (n_train == 0 || n_train == graphs.size())
    throw std::invalid_argument("split leaves one side empty");
  std::pair<std::vector<LabeledGraph>, std::vector<LabeledGraph>> out;
  for (size_t i = 0; i < idx.size(); ++i)
    (i < n_train ? out.first : out.second).push_back(graphs[idx[i]]);
  return out;
}

}  // namespace sent
