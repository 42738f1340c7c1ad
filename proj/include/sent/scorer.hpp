#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sent/codec.hpp"
#include "sent/rng.hpp"
#include "sent/token.hpp"

namespace sent {

struct ScoredToken {
  TokenTypeClass type = TokenTypeClass::Special;
  double nll = 0;         // -log p(target | prefix)
  double confidence = 0;  // top-1 probability
  bool correct = false;   // argmax == target
};

// Teacher-forced scoring record. BOS conditions but is not scored; EOS is
// scored. total_nll is the exact sum of the per-token contributions.
struct ScoredSequence {
  std::vector<ScoredToken> tokens;
  double total_nll = 0;
  size_t n_tokens = 0;
  bool masked = false;
};

struct GenerationResult {
  TokenSequence seq;
  double nll_masked = 0;    // under the masked, renormalized model distribution
  double nll_unmasked = 0;  // under the raw model distribution
  bool truncated = false;   // force-closed after hitting max_len
  bool discarded = false;   // could not close within headroom; seq is unusable
};

// Autoregressive scorer over the flat token id space. sequence_nll is the
// only capability LU needs; per-token distributions are optional (the
// uniform graph oracle does not provide them).
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual const TokenVocab& vocab() const = 0;
  virtual std::string name() const = 0;
  virtual bool has_token_distributions() const { return true; }

  // Full conditional distribution over vocab().size() ids given a prefix
  // (prefix[0] is BOS). Unmasked model distribution.
  virtual std::vector<double> next_distribution(std::span<const Token> prefix) const = 0;

  // Total NLL of a grammatical sequence, teacher-forced and unmasked.
  virtual double sequence_nll(const TokenSequence& s) const;

  // Sample a complete sequence. The default walks the grammar mask.
  virtual GenerationResult generate(size_t max_len, double temperature, uint64_t seed) const;
};

namespace detail {

inline void check_in_vocab(const Token& t, const TokenVocab& v) {
  bool ok = true;
  switch (t.kind) {
    case TokenKind::Node: ok = t.arg >= 0 && t.arg < v.max_nodes; break;
    case TokenKind::NodeLabel: ok = t.arg >= 0 && t.arg < v.n_node_labels(); break;
    case TokenKind::EdgeLabel: ok = t.arg >= 0 && t.arg < v.n_edge_labels(); break;
    default: break;
  }
  if (!ok) throw std::invalid_argument("token outside scorer vocabulary");
}

}  // namespace detail

// Teacher-forced scoring. With masked=true the model distribution is
// restricted to the grammar mask and renormalized at every position (the
// distribution generation actually samples from); if the model assigns zero
// mass to every legal token, the mask falls back to uniform over the legal
// set. The same fallback is used by generate(), so re-scoring a generation
// reproduces its recorded NLL.
inline ScoredSequence score(const Scorer& scorer, const TokenSequence& s, bool masked = false) {
  if (!scorer.has_token_distributions())
    throw std::logic_error("scorer does not expose token distributions");
  const TokenVocab& vocab = scorer.vocab();
  for (const auto& t : s.tokens) detail::check_in_vocab(t, vocab);
  ParseState st(vocab);
  if (s.tokens.empty() || s.tokens[0].kind != TokenKind::Bos)
    throw DecodeError(1, "expected BOS");
  st.feed(s.tokens[0]);
  ScoredSequence out;
  out.masked = masked;
  for (size_t pos = 1; pos < s.tokens.size(); ++pos) {
    std::vector<double> dist =
        scorer.next_distribution(std::span<const Token>(s.tokens.data(), pos));
    if (masked) {
      std::vector<Token> legal = st.legal_tokens();
      std::vector<double> md(dist.size(), 0.0);
      double mass = 0;
      for (const Token& t : legal) {
        int id = vocab.id_of(t);
        md[id] = dist[id];
        mass += dist[id];
      }
      if (mass <= 0) {
        for (const Token& t : legal) md[vocab.id_of(t)] = 1.0 / static_cast<double>(legal.size());
      } else {
        for (double& p : md) p /= mass;
      }
      dist = std::move(md);
    }
    const int target = vocab.id_of(s.tokens[pos]);
    int arg = 0;
    for (size_t i = 1; i < dist.size(); ++i)
      if (dist[i] > dist[arg]) arg = static_cast<int>(i);
    const double p = dist[target];
    if (!(p > 0)) throw std::runtime_error("zero probability for observed token");
    ScoredToken rec;
    rec.nll = -std::log(p);
    rec.confidence = dist[arg];
    rec.correct = arg == target;
    rec.type = st.feed(s.tokens[pos]);
    out.total_nll += rec.nll;
    out.tokens.push_back(rec);
  }
  if (!st.complete()) throw DecodeError(s.tokens.size() + 1, "sequence ends before EOS");
  out.n_tokens = out.tokens.size();
  return out;
}

inline double Scorer::sequence_nll(const TokenSequence& s) const {
  return score(*this, s, /*masked=*/false).total_nll;
}

inline GenerationResult Scorer::generate(size_t max_len, double temperature,
                                         uint64_t seed) const {
  if (max_len < 4) throw std::invalid_argument("max_len must be at least 4");
  const TokenVocab& v = vocab();
  RngStream rng(seed);
  GenerationResult out;
  out.seq.tokens.push_back(tok_bos());
  ParseState st(v);
  st.feed(tok_bos());
  const size_t headroom = max_len + 4 * static_cast<size_t>(v.max_nodes) + 16;
  while (!st.complete()) {
    if (out.seq.tokens.size() > headroom) {
      out.discarded = true;
      return out;
    }
    std::vector<Token> legal = st.legal_tokens();
    if (legal.empty()) throw std::logic_error("grammar dead end during generation");
    const bool force_close = out.seq.tokens.size() >= max_len;
    std::vector<double> dist = next_distribution(out.seq.tokens);
    std::vector<double> masked(legal.size());
    double mass = 0;
    for (size_t i = 0; i < legal.size(); ++i) {
      masked[i] = dist[v.id_of(legal[i])];
      mass += masked[i];
    }
    if (mass <= 0) {
      for (double& p : masked) p = 1.0 / static_cast<double>(legal.size());
      mass = 1.0;
    }
    for (double& p : masked) p /= mass;
    size_t chosen = legal.size();
    if (force_close) {
      for (size_t i = 0; i < legal.size(); ++i)
        if (legal[i].kind == TokenKind::Eos) chosen = i;
      if (chosen < legal.size()) out.truncated = true;
    }
    if (chosen == legal.size()) {
      if (temperature < 1e-12) {
        chosen = 0;
        for (size_t i = 1; i < legal.size(); ++i)
          if (masked[i] > masked[chosen]) chosen = i;
      } else {
        std::vector<double> w(legal.size());
        double wsum = 0;
        for (size_t i = 0; i < legal.size(); ++i) {
          w[i] = std::pow(masked[i], 1.0 / temperature);
          wsum += w[i];
        }
        double r = rng.real() * wsum;
        chosen = 0;
        for (size_t i = 0; i < legal.size(); ++i) {
          r -= w[i];
          if (r <= 0) {
            chosen = i;
            break;
          }
          if (i + 1 == legal.size()) chosen = i;
        }
      }
    }
    out.nll_masked += -std::log(masked[chosen]);
    out.nll_unmasked += -std::log(std::max(dist[v.id_of(legal[chosen])], 1e-300));
    st.feed(legal[chosen]);
    out.seq.tokens.push_back(legal[chosen]);
  }
  return out;
}

}  // namespace sent
