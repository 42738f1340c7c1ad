#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sent/canonical.hpp"
#include "sent/codec.hpp"
#include "sent/scorer.hpp"

namespace sent {

// Graph-consistent scorer, invariant by construction: every linearization
// of graph G receives probability 1 / (|graph set| * |pre-image of G|), so
// its NLL is constant across linearizations and LU is exactly zero. Only
// sequence-level NLL is exposed; there are no per-token distributions.
class UniformGraphOracle final : public Scorer {
 public:
  UniformGraphOracle(std::vector<LabeledGraph> graphs, int max_nodes = 64,
                     size_t enum_limit = 200000)
      : graphs_(std::move(graphs)) {
    if (graphs_.empty()) throw std::invalid_argument("oracle needs at least one graph");
    vocab_ = TokenVocab{graphs_[0].vocab(), max_nodes};
    for (const auto& g : graphs_) {
      if (!(g.vocab() == graphs_[0].vocab()))
        throw std::invalid_argument("oracle graphs must share one vocabulary");
      std::string cert = canonical_certificate(g);
      if (preimage_.count(cert)) throw std::invalid_argument("duplicate graph in oracle set");
      preimage_[cert] = enumerate_linearizations(g, enum_limit, max_nodes);
    }
  }

  const TokenVocab& vocab() const override { return vocab_; }
  std::string name() const override { return "uniform-graph-oracle"; }
  bool has_token_distributions() const override { return false; }

  std::vector<double> next_distribution(std::span<const Token>) const override {
    throw std::logic_error("uniform graph oracle exposes sequence NLL only");
  }

  double sequence_nll(const TokenSequence& s) const override {
    LabeledGraph g = decode(s, vocab_);
    auto it = preimage_.find(canonical_certificate(g));
    if (it == preimage_.end())
      throw std::invalid_argument("sequence decodes to a graph outside the oracle set");
    return std::log(static_cast<double>(graphs_.size())) +
           std::log(static_cast<double>(it->second.size()));
  }

  // Sample a graph uniformly, then one of its linearizations uniformly.
  GenerationResult generate(size_t /*max_len*/, double /*temperature*/,
                            uint64_t seed) const override {
    RngStream rng(seed);
    size_t gi = rng.below(graphs_.size());
    const auto& seqs = preimage_.at(canonical_certificate(graphs_[gi]));
    GenerationResult out;
    out.seq = seqs[rng.below(seqs.size())];
    out.nll_masked = out.nll_unmasked =
        std::log(static_cast<double>(graphs_.size())) +
        std::log(static_cast<double>(seqs.size()));
    return out;
  }

  size_t preimage_size(const LabeledGraph& g) const {
    auto it = preimage_.find(canonical_certificate(g));
    if (it == preimage_.end()) throw std::invalid_argument("graph outside the oracle set");
    return it->second.size();
  }

 private:
  std::vector<LabeledGraph> graphs_;
  TokenVocab vocab_;
  std::map<std::string, std::vector<TokenSequence>> preimage_;
};

}  // namespace sent
