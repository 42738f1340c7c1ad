#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sent/canonical.hpp"
#include "sent/codec.hpp"
#include "sent/graph.hpp"
#include "sent/scorer.hpp"

namespace sent {

// ---------------------------------------------------------------------------
// Linearization Uncertainty: coefficient of variation (sample std / mean)
// of sequence NLL across K linearizations of one graph.
// ---------------------------------------------------------------------------

struct LuResult {
  size_t k = 0;
  double mean = 0;
  double stddev = 0;  // sample standard deviation (K-1 denominator)
  double lu = 0;
};

inline LuResult linearization_uncertainty(std::span<const double> nlls) {
  if (nlls.size() < 2) throw std::invalid_argument("LU requires K >= 2 NLL values");
  for (double x : nlls) {
    if (!std::isfinite(x) || x < 0)
      throw std::invalid_argument("LU requires finite, nonnegative NLL values");
  }
  LuResult r;
  r.k = nlls.size();
  double sum = 0;
  for (double x : nlls) sum += x;
  r.mean = sum / static_cast<double>(r.k);
  if (r.mean == 0) throw std::domain_error("LU undefined: mean NLL is zero");
  double ss = 0;
  for (double x : nlls) ss += (x - r.mean) * (x - r.mean);
  r.stddev = std::sqrt(ss / static_cast<double>(r.k - 1));
  r.lu = r.stddev / r.mean;
  return r;
}

// ---------------------------------------------------------------------------
// Expected Calibration Error: B equal-width right-closed bins over top-1
// confidence; empty bins contribute zero.
// ---------------------------------------------------------------------------

struct EceBinRow {
  size_t count = 0;
  double mean_confidence = 0;
  double accuracy = 0;
};

struct EceResult {
  int n_bins = 15;
  size_t n_records = 0;
  double ece = 0;
  std::vector<EceBinRow> bins;
};

inline EceResult expected_calibration_error(std::span<const double> confidences,
                                            std::span<const bool> correct, int n_bins = 15) {
  if (confidences.empty()) throw std::invalid_argument("ECE requires at least one record");
  if (confidences.size() != correct.size())
    throw std::invalid_argument("confidence/correctness length mismatch");
  if (n_bins < 1) throw std::invalid_argument("ECE needs at least one bin");
  EceResult out;
  out.n_bins = n_bins;
  out.n_records = confidences.size();
  out.bins.assign(n_bins, {});
  std::vector<double> conf_sum(n_bins, 0), hit_sum(n_bins, 0);
  for (size_t i = 0; i < confidences.size(); ++i) {
    const double c = confidences[i];
    if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("confidence outside [0, 1]");
    // right-closed bins ((b-1)/B, b/B]; confidence 0 goes to the first bin
    int b = c <= 0.0 ? 0 : static_cast<int>(std::ceil(c * n_bins)) - 1;
    b = std::clamp(b, 0, n_bins - 1);
    ++out.bins[b].count;
    conf_sum[b] += c;
    hit_sum[b] += correct[i] ? 1.0 : 0.0;
  }
  for (int b = 0; b < n_bins; ++b) {
    if (out.bins[b].count == 0) continue;
    const double n = static_cast<double>(out.bins[b].count);
    out.bins[b].mean_confidence = conf_sum[b] / n;
    out.bins[b].accuracy = hit_sum[b] / n;
    out.ece += n / static_cast<double>(out.n_records) *
               std::abs(out.bins[b].accuracy - out.bins[b].mean_confidence);
  }
  return out;
}

// ECE per token type over a batch of scored sequences. Groups with no
// records are absent from the map. "node_index" is the union of new_node
// and revisit.
inline std::map<std::string, EceResult> ece_by_token_type(
    std::span<const ScoredSequence> scored, int n_bins = 15) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<bool>>> groups;
  auto push = [&](const std::string& key, const ScoredToken& t) {
    groups[key].first.push_back(t.confidence);
    groups[key].second.push_back(t.correct);
  };
  for (const auto& seq : scored) {
    for (const auto& t : seq.tokens) {
      push(token_type_name(t.type), t);
      if (t.type == TokenTypeClass::NewNode || t.type == TokenTypeClass::Revisit)
        push("node_index", t);
    }
  }
  std::map<std::string, EceResult> out;
  for (const auto& [key, records] : groups)
    out[key] = expected_calibration_error(records.first, records.second, n_bins);
  return out;
}

// ---------------------------------------------------------------------------
// Rank statistics
// ---------------------------------------------------------------------------

namespace detail {

// mid-rank assignment (1-based ranks, ties share the average rank)
inline std::vector<double> midranks(std::span<const double> xs) {
  const size_t n = xs.size();
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && xs[idx[j + 1]] == xs[idx[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace detail

// ROC-AUC via the Mann-Whitney U statistic with mid-rank tie handling.
// Higher score predicts the positive class; callers pass negated metrics
// when lower metric values should predict positives.
inline double roc_auc(std::span<const double> scores, std::span<const bool> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("score/label length mismatch");
  size_t n_pos = 0;
  for (bool b : labels) n_pos += b ? 1 : 0;
  const size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("ROC-AUC requires both classes present");
  std::vector<double> ranks = detail::midranks(scores);
  double rank_sum = 0;
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i]) rank_sum += ranks[i];
  const double u = rank_sum - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

// Spearman rank correlation with mid-rank ties.
inline double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("length mismatch");
  if (xs.size() < 3) throw std::invalid_argument("spearman requires length >= 3");
  std::vector<double> rx = detail::midranks(xs), ry = detail::midranks(ys);
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) throw std::domain_error("spearman undefined for constant input");
  return sxy / std::sqrt(sxx * syy);
}

// ---------------------------------------------------------------------------
// Valency stability
// ---------------------------------------------------------------------------

using ValencyTable = std::map<std::string, std::set<int>>;

inline ValencyTable default_valency_table() {
  return {{"H", {1}},  {"C", {4}},  {"N", {3}},  {"O", {2}},    {"F", {1}},  {"B", {3}},
          {"Si", {4}}, {"P", {3, 5}}, {"S", {4}}, {"Cl", {1}},  {"Br", {1}}, {"I", {1}}};
}

inline int bond_order(const std::string& edge_label) {
  if (edge_label == "single") return 1;
  if (edge_label == "double") return 2;
  if (edge_label == "triple") return 3;
  throw std::invalid_argument("unsupported bond label: " + edge_label);
}

struct StabilityResult {
  std::vector<bool> atom_stable;
  double atom_stable_fraction = 0;
  bool mol_stable = false;
};

// Atom stable iff its total bond order is in the allowed set for its
// element; molecule stable iff every atom is.
inline StabilityResult stability(const LabeledGraph& g, const ValencyTable& table) {
  const NodeId n = g.node_count();
  std::vector<int> order_sum(n, 0);
  for (const auto& e : g.edges()) {
    const int o = bond_order(g.vocab().edge_labels[e.label]);
    order_sum[e.u] += o;
    order_sum[e.v] += o;
  }
  StabilityResult out;
  out.atom_stable.resize(n);
  size_t stable = 0;
  for (NodeId v = 0; v < n; ++v) {
    const std::string& atom = g.vocab().node_labels[g.node_label(v)];
    auto it = table.find(atom);
    if (it == table.end()) throw std::invalid_argument("atom not in valency table: " + atom);
    out.atom_stable[v] = it->second.count(order_sum[v]) > 0;
    stable += out.atom_stable[v] ? 1 : 0;
  }
  out.atom_stable_fraction = n == 0 ? 0.0 : static_cast<double>(stable) / static_cast<double>(n);
  out.mol_stable = stable == static_cast<size_t>(n) && n > 0;
  return out;
}

// ---------------------------------------------------------------------------
// Validity / Uniqueness / Novelty
// ---------------------------------------------------------------------------

struct VunResult {
  size_t n_generated = 0;
  size_t n_valid = 0;
  size_t n_unique = 0;
  size_t n_novel = 0;
  double validity = 0;
  double uniqueness = 0;  // distinct fraction of valid outputs
  double novelty = 0;     // fraction of unique valid outputs not in training
  double vun = 0;
};

inline VunResult vun(std::span<const LabeledGraph> generated,
                     const std::set<std::string>& training_certs,
                     const std::function<bool(const LabeledGraph&)>& valid) {
  VunResult out;
  out.n_generated = generated.size();
  std::set<std::string> unique_certs;
  for (const auto& g : generated) {
    if (!valid(g)) continue;
    ++out.n_valid;
    unique_certs.insert(canonical_certificate(g));
  }
  out.n_unique = unique_certs.size();
  for (const auto& cert : unique_certs)
    if (!training_certs.count(cert)) ++out.n_novel;
  out.validity = out.n_generated ? static_cast<double>(out.n_valid) / out.n_generated : 0.0;
  out.uniqueness = out.n_valid ? static_cast<double>(out.n_unique) / out.n_valid : 0.0;
  out.novelty = out.n_unique ? static_cast<double>(out.n_novel) / out.n_unique : 0.0;
  out.vun = out.validity * out.uniqueness * out.novelty;
  return out;
}

// ---------------------------------------------------------------------------
// K-sweep: stability AUC from the first K of a shared 32-permutation run
// ---------------------------------------------------------------------------

inline std::vector<std::pair<int, double>> k_sweep(
    std::span<const std::vector<double>> per_graph_nlls, std::span<const bool> labels,
    std::span<const int> ks) {
  if (per_graph_nlls.size() != labels.size())
    throw std::invalid_argument("k_sweep: nll/label count mismatch");
  for (const auto& nlls : per_graph_nlls) {
    if (nlls.size() != 32)
      throw std::invalid_argument("k_sweep expects exactly 32 NLLs per graph");
  }
  std::vector<std::pair<int, double>> out;
  for (int k : ks) {
    if (k < 2 || k > 32) throw std::invalid_argument("k_sweep: K must be in [2, 32]");
    std::vector<double> neg_lu(per_graph_nlls.size());
    for (size_t i = 0; i < per_graph_nlls.size(); ++i) {
      std::span<const double> head(per_graph_nlls[i].data(), static_cast<size_t>(k));
      neg_lu[i] = -linearization_uncertainty(head).lu;
    }
    out.emplace_back(k, roc_auc(neg_lu, labels));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sequence-shape analysis
// ---------------------------------------------------------------------------

struct LengthAnalysis {
  std::vector<size_t> sequence_lengths;
  std::vector<int> chord_counts;
  std::vector<double> trail_profile;        // mean trail length per midpoint decile
  std::vector<size_t> trail_profile_count;  // segments per decile
  double mean_length = 0;
  double mean_chords = 0;
};

// Per-group shape statistics. A segment's relative position is the
// midpoint of its token span divided by sequence length, binned into 10
// deciles.
inline LengthAnalysis length_analysis(std::span<const TokenSequence> seqs,
                                      const TokenVocab& vocab) {
  LengthAnalysis out;
  std::vector<double> decile_sum(10, 0);
  out.trail_profile_count.assign(10, 0);
  for (const auto& s : seqs) {
    SequenceStats st = sequence_stats(s, vocab);
    out.sequence_lengths.push_back(s.tokens.size());
    out.chord_counts.push_back(st.n_chords);
    out.mean_length += static_cast<double>(s.tokens.size());
    out.mean_chords += st.n_chords;
    for (size_t i = 0; i < st.segment_spans.size(); ++i) {
      const auto [first, last] = st.segment_spans[i];
      const double mid = (static_cast<double>(first) + static_cast<double>(last)) / 2.0;
      int d = static_cast<int>(mid / static_cast<double>(s.tokens.size()) * 10.0);
      d = std::clamp(d, 0, 9);
      decile_sum[d] += st.trail_lengths[i];
      ++out.trail_profile_count[d];
    }
  }
  if (!seqs.empty()) {
    out.mean_length /= static_cast<double>(seqs.size());
    out.mean_chords /= static_cast<double>(seqs.size());
  }
  out.trail_profile.assign(10, 0.0);
  for (int d = 0; d < 10; ++d)
    if (out.trail_profile_count[d])
      out.trail_profile[d] = decile_sum[d] / static_cast<double>(out.trail_profile_count[d]);
  return out;
}

// Fraction of distinct token sequences in a batch (epoch log window).
inline double sequence_diversity(std::span<const TokenSequence> seqs) {
  if (seqs.empty()) throw std::invalid_argument("sequence_diversity: empty input");
  std::set<std::vector<Token>> distinct;
  for (const auto& s : seqs) distinct.insert(s.tokens);
  return static_cast<double>(distinct.size()) / static_cast<double>(seqs.size());
}

}  // namespace sent
