#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "sent/scorer.hpp"
#include "sent/token.hpp"

#include <json.hpp>

namespace sent {

// Add-k smoothed n-gram scorer with normalized backoff interpolation:
//
//   p_0(t)        = (c(t) + k) / (C + k V)
//   p_i(t | ctx)  = (1-w) * add_k(ctx_i) + w * p_{i-1}(t | ctx)   if ctx_i seen
//                 = p_{i-1}(t | ctx)                              otherwise
//
// so every conditional sums to one exactly. w is the backoff weight.
class NgramModel final : public Scorer {
 public:
  NgramModel(TokenVocab vocab, int order, double smoothing, double backoff_weight = 0.4,
             std::string training_strategy = "")
      : vocab_(std::move(vocab)),
        order_(order),
        smoothing_(smoothing),
        backoff_(backoff_weight),
        strategy_(std::move(training_strategy)),
        levels_(static_cast<size_t>(order)) {
    if (order < 1) throw std::invalid_argument("n-gram order must be >= 1");
    if (!(smoothing > 0)) throw std::invalid_argument("smoothing must be > 0");
    if (backoff_weight < 0 || backoff_weight >= 1)
      throw std::invalid_argument("backoff weight must be in [0, 1)");
    if (vocab_.size() > 0xFFFF) throw std::invalid_argument("vocabulary too large");
  }

  int order() const { return order_; }
  double smoothing() const { return smoothing_; }
  double backoff_weight() const { return backoff_; }
  const std::string& training_strategy() const { return strategy_; }
  uint64_t total_tokens() const { return trained_tokens_; }

  void add_sequence(const TokenSequence& s) {
    std::vector<uint16_t> ids(s.tokens.size());
    for (size_t i = 0; i < s.tokens.size(); ++i) {
      detail::check_in_vocab(s.tokens[i], vocab_);
      ids[i] = static_cast<uint16_t>(vocab_.id_of(s.tokens[i]));
    }
    for (size_t pos = 1; pos < ids.size(); ++pos) {
      for (int len = 0; len < order_; ++len) {
        if (static_cast<size_t>(len) > pos) break;
        std::u16string key(ids.begin() + (pos - len), ids.begin() + pos);
        Row& row = levels_[len][key];
        ++row.counts[ids[pos]];
        ++row.total;
      }
      ++trained_tokens_;
    }
  }

  const TokenVocab& vocab() const override { return vocab_; }
  std::string name() const override {
    return "ngram(m=" + std::to_string(order_) + (strategy_.empty() ? "" : "," + strategy_) + ")";
  }

  std::vector<double> next_distribution(std::span<const Token> prefix) const override {
    const int V = vocab_.size();
    std::vector<uint16_t> ids(prefix.size());
    for (size_t i = 0; i < prefix.size(); ++i) {
      detail::check_in_vocab(prefix[i], vocab_);
      ids[i] = static_cast<uint16_t>(vocab_.id_of(prefix[i]));
    }
    std::vector<double> dist = add_k_level(0, {});
    for (int len = 1; len < order_; ++len) {
      if (static_cast<size_t>(len) > ids.size()) break;
      std::u16string key(ids.end() - len, ids.end());
      auto it = levels_[len].find(key);
      if (it == levels_[len].end()) continue;
      std::vector<double> lvl = add_k_row(it->second);
      for (int t = 0; t < V; ++t) dist[t] = (1.0 - backoff_) * lvl[t] + backoff_ * dist[t];
    }
    return dist;
  }

  // --- serialization (deterministic text dump of counts) ---

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["format"] = "sent-ngram";
    j["version"] = 1;
    j["order"] = order_;
    j["smoothing"] = smoothing_;
    j["backoff_weight"] = backoff_;
    j["training_strategy"] = strategy_;
    j["trained_tokens"] = trained_tokens_;
    j["vocab"] = {{"node_labels", vocab_.labels.node_labels},
                  {"edge_labels", vocab_.labels.edge_labels},
                  {"max_nodes", vocab_.max_nodes}};
    nlohmann::json levels = nlohmann::json::array();
    for (int len = 0; len < order_; ++len) {
      std::map<std::u16string, const Row*> sorted;
      for (const auto& [key, row] : levels_[len]) sorted[key] = &row;
      nlohmann::json contexts = nlohmann::json::array();
      for (const auto& [key, row] : sorted) {
        nlohmann::json ctx = nlohmann::json::array();
        for (char16_t c : key) ctx.push_back(static_cast<int>(c));
        std::map<uint16_t, uint32_t> counts(row->counts.begin(), row->counts.end());
        nlohmann::json cj = nlohmann::json::array();
        for (auto [tok, c] : counts) cj.push_back({tok, c});
        contexts.push_back({{"ctx", ctx}, {"counts", cj}});
      }
      levels.push_back(contexts);
    }
    j["levels"] = levels;
    return j;
  }

  static NgramModel from_json(const nlohmann::json& j) {
    if (!j.contains("format") || j.at("format") != "sent-ngram")
      throw std::invalid_argument("not a model file (missing format marker)");
    if (j.at("version").get<int>() != 1) throw std::invalid_argument("unsupported model version");
    TokenVocab vocab;
    vocab.labels.node_labels = j.at("vocab").at("node_labels").get<std::vector<std::string>>();
    vocab.labels.edge_labels = j.at("vocab").at("edge_labels").get<std::vector<std::string>>();
    vocab.max_nodes = j.at("vocab").at("max_nodes").get<int>();
    NgramModel m(std::move(vocab), j.at("order").get<int>(), j.at("smoothing").get<double>(),
                 j.at("backoff_weight").get<double>(),
                 j.value("training_strategy", std::string{}));
    m.trained_tokens_ = j.value("trained_tokens", uint64_t{0});
    const auto& levels = j.at("levels");
    for (size_t len = 0; len < levels.size() && len < m.levels_.size(); ++len) {
      for (const auto& entry : levels[len]) {
        std::u16string key;
        for (const auto& c : entry.at("ctx")) key.push_back(static_cast<char16_t>(c.get<int>()));
        Row& row = m.levels_[len][key];
        for (const auto& pair : entry.at("counts")) {
          uint16_t tok = static_cast<uint16_t>(pair.at(0).get<int>());
          uint32_t c = pair.at(1).get<uint32_t>();
          row.counts[tok] += c;
          row.total += c;
        }
      }
    }
    return m;
  }

 private:
  struct Row {
    std::unordered_map<uint16_t, uint32_t> counts;
    uint64_t total = 0;
  };

  std::vector<double> add_k_row(const Row& row) const {
    const int V = vocab_.size();
    const double denom = static_cast<double>(row.total) + smoothing_ * V;
    std::vector<double> dist(V, smoothing_ / denom);
    for (auto [tok, c] : row.counts) dist[tok] += static_cast<double>(c) / denom;
    return dist;
  }

  std::vector<double> add_k_level(int len, const std::u16string& key) const {
    auto it = levels_[len].find(key);
    if (it == levels_[len].end()) {
      const int V = vocab_.size();
      return std::vector<double>(V, 1.0 / V);
    }
    return add_k_row(it->second);
  }

  TokenVocab vocab_;
  int order_;
  double smoothing_;
  double backoff_;
  std::string strategy_;
  uint64_t trained_tokens_ = 0;
  std::vector<std::unordered_map<std::u16string, Row>> levels_;
};

// Teacher-forced count accumulation over a corpus of linearizations.
inline NgramModel train_ngram(std::span<const TokenSequence> corpus, TokenVocab vocab, int order,
                              double smoothing, double backoff_weight = 0.4,
                              std::string training_strategy = "") {
  if (corpus.empty()) throw std::invalid_argument("training corpus is empty");
  NgramModel m(std::move(vocab), order, smoothing, backoff_weight, std::move(training_strategy));
  for (const auto& s : corpus) m.add_sequence(s);
  return m;
}

}  // namespace sent
