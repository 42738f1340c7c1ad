#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sent/codec.hpp"
#include "sent/metrics.hpp"
#include "sent/parallel.hpp"
#include "sent/scorer.hpp"
#include "sent/strategy.hpp"

namespace sent {

namespace detail {

inline std::vector<GenerationResult> generate_batch(const Scorer& scorer, size_t n_gen,
                                                    size_t max_len, double temperature,
                                                    uint64_t seed) {
  std::vector<GenerationResult> out;
  size_t attempts = 0;
  const size_t budget = 10 * n_gen + 16;
  while (out.size() < n_gen) {
    if (attempts >= budget)
      throw std::runtime_error("fewer than requested decodable generations within retry budget");
    GenerationResult g =
        scorer.generate(max_len, temperature, derive_seed(seed, 0xC0DE, attempts));
    ++attempts;
    if (g.discarded) continue;
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Self-assessment: the model's own trajectory vs. algorithmic
// re-linearizations of the same decoded graph under its native strategy.
// ---------------------------------------------------------------------------

struct SelfAssessRow {
  size_t gen_tokens = 0;  // scored tokens (BOS excluded)
  double resamp_tokens_mean = 0;
  double gen_nll_masked = 0;
  double gen_nll_unmasked = 0;
  double resamp_nll_mean = 0;
  double lu = 0;
};

struct SelfAssessment {
  std::vector<SelfAssessRow> rows;
  double gen_tokens_mean = 0;
  double resamp_tokens_mean = 0;
  double gen_nll_mean = 0;     // masked convention
  double resamp_nll_mean = 0;
  double lu_mean = 0;
};

inline SelfAssessment self_assess(const Scorer& scorer, StrategyKind native, size_t n_gen, int k,
                                  uint64_t seed, size_t max_len = 512, double temperature = 1.0,
                                  int threads = 1) {
  if (k < 2) throw std::invalid_argument("self-assessment requires K >= 2");
  std::vector<GenerationResult> gens =
      detail::generate_batch(scorer, n_gen, max_len, temperature, seed);
  SelfAssessment out;
  out.rows.resize(gens.size());
  parallel_for(gens.size(), threads, [&](size_t i) {
    const GenerationResult& gen = gens[i];
    LabeledGraph h = decode(gen.seq, scorer.vocab());
    SelfAssessRow row;
    row.gen_tokens = gen.seq.scored_tokens();
    row.gen_nll_masked = gen.nll_masked;
    row.gen_nll_unmasked = gen.nll_unmasked;
    std::vector<double> nlls(static_cast<size_t>(k));
    double tok_sum = 0;
    for (int p = 0; p < k; ++p) {
      TokenSequence enc =
          encode(h, native, derive_seed(seed, i + 1, static_cast<uint64_t>(p)),
                 scorer.vocab().max_nodes);
      nlls[p] = scorer.sequence_nll(enc);
      tok_sum += static_cast<double>(enc.scored_tokens());
    }
    row.resamp_tokens_mean = tok_sum / k;
    double nll_sum = 0;
    for (double x : nlls) nll_sum += x;
    row.resamp_nll_mean = nll_sum / k;
    row.lu = linearization_uncertainty(nlls).lu;
    out.rows[i] = row;
  });
  for (const auto& r : out.rows) {
    out.gen_tokens_mean += static_cast<double>(r.gen_tokens);
    out.resamp_tokens_mean += r.resamp_tokens_mean;
    out.gen_nll_mean += r.gen_nll_masked;
    out.resamp_nll_mean += r.resamp_nll_mean;
    out.lu_mean += r.lu;
  }
  const double n = static_cast<double>(out.rows.size());
  if (n > 0) {
    out.gen_tokens_mean /= n;
    out.resamp_tokens_mean /= n;
    out.gen_nll_mean /= n;
    out.resamp_nll_mean /= n;
    out.lu_mean /= n;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cross-strategy evaluation grid: rows = scorers (training strategies),
// columns = evaluation strategies. The K encodings per (column, graph) are
// shared across rows.
// ---------------------------------------------------------------------------

struct CrossCell {
  std::string train_strategy;
  std::string eval_strategy;
  double nll_per_token = 0;  // token-weighted
  double lu_mean = 0;        // mean of per-graph LU
  double ece = std::numeric_limits<double>::quiet_NaN();
  double tok_per_graph = 0;
  std::map<std::string, double> ece_by_type;
  size_t n_graphs = 0;
  size_t n_sequences = 0;
};

struct CrossGrid {
  std::vector<std::string> train_names;
  std::vector<std::string> eval_names;
  std::vector<CrossCell> cells;  // row-major

  const CrossCell& cell(size_t train, size_t eval) const {
    return cells[train * eval_names.size() + eval];
  }
};

inline CrossGrid cross_eval(std::span<const Scorer* const> scorers,
                            std::span<const StrategyKind> eval_strategies,
                            std::span<const LabeledGraph> test, int k, uint64_t seed,
                            int threads = 1, int ece_bins = 15) {
  if (scorers.empty() || eval_strategies.empty()) throw std::invalid_argument("empty grid");
  if (test.empty()) throw std::invalid_argument("no test graphs");
  if (k < 2) throw std::invalid_argument("cross-eval requires K >= 2");
  const TokenVocab& vocab = scorers[0]->vocab();
  for (const Scorer* s : scorers) {
    if (!(s->vocab().labels == vocab.labels) || s->vocab().max_nodes != vocab.max_nodes)
      throw std::invalid_argument("scorer vocabulary mismatch");
  }
  for (const auto& g : test) {
    if (!(g.vocab() == vocab.labels))
      throw std::invalid_argument("test graph vocabulary does not match scorers");
  }

  struct PerGraph {
    // per scorer: summed nll/tokens, the K NLLs, calibration stream
    std::vector<double> nll_sum;
    std::vector<double> tok_sum;
    std::vector<std::vector<double>> nlls;
    std::vector<std::vector<ScoredSequence>> scored;
  };

  CrossGrid grid;
  for (const Scorer* s : scorers) grid.train_names.push_back(s->name());
  for (StrategyKind e : eval_strategies) grid.eval_names.push_back(strategy_name(e));
  grid.cells.resize(scorers.size() * eval_strategies.size());

  for (size_t j = 0; j < eval_strategies.size(); ++j) {
    std::vector<PerGraph> results(test.size());
    parallel_for(test.size(), threads, [&](size_t gi) {
      PerGraph& r = results[gi];
      r.nll_sum.assign(scorers.size(), 0);
      r.tok_sum.assign(scorers.size(), 0);
      r.nlls.assign(scorers.size(), {});
      r.scored.assign(scorers.size(), {});
      for (int p = 0; p < k; ++p) {
        TokenSequence enc = encode(test[gi], eval_strategies[j],
                                   derive_seed(derive_seed(seed, 0xE7A1 + j), gi, p),
                                   vocab.max_nodes);
        for (size_t i = 0; i < scorers.size(); ++i) {
          double nll;
          if (scorers[i]->has_token_distributions()) {
            ScoredSequence sc = score(*scorers[i], enc);
            nll = sc.total_nll;
            r.scored[i].push_back(std::move(sc));
          } else {
            nll = scorers[i]->sequence_nll(enc);
          }
          r.nll_sum[i] += nll;
          r.tok_sum[i] += static_cast<double>(enc.scored_tokens());
          r.nlls[i].push_back(nll);
        }
      }
    });
    for (size_t i = 0; i < scorers.size(); ++i) {
      CrossCell& cell = grid.cells[i * eval_strategies.size() + j];
      cell.train_strategy = grid.train_names[i];
      cell.eval_strategy = grid.eval_names[j];
      cell.n_graphs = test.size();
      cell.n_sequences = test.size() * static_cast<size_t>(k);
      double nll_total = 0, tok_total = 0, lu_sum = 0;
      std::vector<ScoredSequence> all_scored;
      for (size_t gi = 0; gi < test.size(); ++gi) {
        nll_total += results[gi].nll_sum[i];
        tok_total += results[gi].tok_sum[i];
        lu_sum += linearization_uncertainty(results[gi].nlls[i]).lu;
        for (auto& sc : results[gi].scored[i]) all_scored.push_back(std::move(sc));
      }
      cell.nll_per_token = nll_total / tok_total;
      cell.tok_per_graph = tok_total / static_cast<double>(cell.n_sequences);
      cell.lu_mean = lu_sum / static_cast<double>(test.size());
      if (!all_scored.empty()) {
        std::vector<double> conf;
        std::vector<bool> hit;
        for (const auto& sc : all_scored) {
          for (const auto& t : sc.tokens) {
            conf.push_back(t.confidence);
            hit.push_back(t.correct);
          }
        }
        cell.ece = expected_calibration_error(conf, hit, ece_bins).ece;
        for (const auto& [key, res] : ece_by_token_type(all_scored, ece_bins))
          cell.ece_by_type[key] = res.ece;
      }
    }
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Stability predictors: generate molecules, label each by valency
// stability, and compare Generation NLL, mean permutation NLL, and LU as
// stability predictors (ROC-AUC with lower-metric-predicts-stable
// orientation, plus raw-metric Spearman).
// ---------------------------------------------------------------------------

struct StabilityPredictorRow {
  bool stable = false;
  size_t gen_tokens = 0;
  double gen_nll = 0;             // masked trajectory NLL
  double mean_perm_nll = 0;
  double lu = 0;
  std::vector<double> perm_nlls;  // the K shared draws
};

struct StabilityPredictors {
  std::vector<StabilityPredictorRow> rows;
  size_t n_stable = 0;
  size_t n_unstable = 0;
  double auc_gen_nll = 0;
  double auc_mean_nll = 0;
  double auc_lu = 0;
  double spearman_gen_nll = 0;
  double spearman_mean_nll = 0;
  double spearman_lu = 0;
};

inline StabilityPredictors stability_predictors(const Scorer& scorer, const ValencyTable& table,
                                                size_t n_gen, int k, uint64_t seed,
                                                size_t max_len = 512, double temperature = 1.0,
                                                int threads = 1) {
  if (k < 2) throw std::invalid_argument("stability predictors require K >= 2");
  std::vector<GenerationResult> gens =
      detail::generate_batch(scorer, n_gen, max_len, temperature, seed);
  StabilityPredictors out;
  out.rows.resize(gens.size());
  parallel_for(gens.size(), threads, [&](size_t i) {
    StabilityPredictorRow row;
    LabeledGraph h = decode(gens[i].seq, scorer.vocab());
    row.stable = stability(h, table).mol_stable;
    row.gen_tokens = gens[i].seq.scored_tokens();
    row.gen_nll = gens[i].nll_masked;
    row.perm_nlls.resize(static_cast<size_t>(k));
    for (int p = 0; p < k; ++p) {
      TokenSequence enc = encode(h, StrategyKind::Random,
                                 derive_seed(seed, 0xB0B0 + i, static_cast<uint64_t>(p)),
                                 scorer.vocab().max_nodes);
      row.perm_nlls[p] = scorer.sequence_nll(enc);
    }
    double sum = 0;
    for (double x : row.perm_nlls) sum += x;
    row.mean_perm_nll = sum / k;
    row.lu = linearization_uncertainty(row.perm_nlls).lu;
    out.rows[i] = std::move(row);
  });
  std::vector<bool> labels;
  std::vector<double> gen_nll, mean_nll, lu, label_val;
  for (const auto& r : out.rows) {
    labels.push_back(r.stable);
    label_val.push_back(r.stable ? 1.0 : 0.0);
    gen_nll.push_back(r.gen_nll);
    mean_nll.push_back(r.mean_perm_nll);
    lu.push_back(r.lu);
    (r.stable ? out.n_stable : out.n_unstable) += 1;
  }
  auto negate = [](std::vector<double> v) {
    for (double& x : v) x = -x;
    return v;
  };
  out.auc_gen_nll = roc_auc(negate(gen_nll), labels);
  out.auc_mean_nll = roc_auc(negate(mean_nll), labels);
  out.auc_lu = roc_auc(negate(lu), labels);
  auto safe_spearman = [&](const std::vector<double>& xs) {
    try {
      return spearman(xs, label_val);
    } catch (const std::exception&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  out.spearman_gen_nll = safe_spearman(gen_nll);
  out.spearman_mean_nll = safe_spearman(mean_nll);
  out.spearman_lu = safe_spearman(lu);
  return out;
}

}  // namespace sent
