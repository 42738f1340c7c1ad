#pragma once

#include <cassert>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "sent/graph.hpp"
#include "sent/rng.hpp"
#include "sent/strategy.hpp"
#include "sent/token.hpp"

namespace sent {

// Grammar of a linearization:
//
//   sequence   := BOS segment (SEP segment)* EOS
//   segment    := node-intro trail-step*
//   node-intro := NODE(i) [NLABEL(a) [nbr-set]]      (label iff i is new)
//   trail-step := ELABEL(b) NODE(j) [NLABEL(a) [nbr-set]]
//   nbr-set    := '[' (ELABEL(b) NODE(u))+ ']'
//
// Node indices are assigned by first appearance. A trail-step adds edge
// {current, j}; a neighborhood entry adds edge {new node, u} back to an
// already-visited u. Neighborhood entries are listed in strictly ascending
// target index; this convention is part of the grammar, so the mask, the
// encoder, and the pre-image enumeration all agree on one sequence per
// chord set.

struct DecodeError : std::runtime_error {
  size_t position;  // 1-based token position

  DecodeError(size_t pos, const std::string& msg)
      : std::runtime_error("position " + std::to_string(pos) + ": " + msg), position(pos) {}
};

struct SequenceStats {
  int n_nodes = 0;
  int n_edges = 0;
  int n_segments = 0;
  int n_chords = 0;
  int n_nonempty_nbr_sets = 0;
  std::vector<int> trail_lengths;                       // nodes per segment
  std::vector<std::pair<size_t, size_t>> segment_spans; // 0-based [first, last] token index
};

// Incremental grammar cursor. Feeding a token validates it, updates the
// partial graph, and classifies the token. legal_tokens() is the
// constrained-decoding mask: exactly the tokens that extend the prefix to
// at least one complete sequence.
class ParseState {
 public:
  explicit ParseState(TokenVocab vocab) : vocab_(std::move(vocab)) {}

  TokenTypeClass feed(const Token& t) {
    const size_t pos = fed_ + 1;  // 1-based, for error messages
    TokenTypeClass cls = TokenTypeClass::Special;
    switch (phase_) {
      case Phase::AtBos:
        if (t.kind != TokenKind::Bos) throw DecodeError(pos, "expected BOS");
        phase_ = Phase::AfterBos;
        break;
      case Phase::AfterBos:
      case Phase::SegStart:
        cls = feed_segment_start(t, pos);
        break;
      case Phase::NewNodeLabel:
        if (t.kind != TokenKind::NodeLabel)
          throw DecodeError(pos, "expected a node label after a new node");
        check_label(t, pos);
        node_labels_.back() = t.arg;
        cls = TokenTypeClass::NodeLabel;
        phase_ = Phase::AfterNewIntro;
        break;
      case Phase::AfterNewIntro:
      case Phase::Trail:
        cls = feed_trail_position(t, pos);
        break;
      case Phase::TrailEdge:
        cls = feed_trail_target(t, pos);
        break;
      case Phase::NbrFirstEdge:
        if (t.kind != TokenKind::EdgeLabel)
          throw DecodeError(pos, "expected an edge label after '['");
        check_label(t, pos);
        pending_elabel_ = t.arg;
        cls = TokenTypeClass::EdgeLabel;
        phase_ = Phase::NbrEdgeNode;
        break;
      case Phase::NbrEdgeNode:
        cls = feed_chord_target(t, pos);
        break;
      case Phase::NbrAfterEntry:
        cls = feed_after_chord(t, pos);
        break;
      case Phase::Done:
        throw DecodeError(pos, "token after EOS");
    }
    if (t.kind != TokenKind::Bos && t.kind != TokenKind::Eos && t.kind != TokenKind::Sep &&
        !stats_.segment_spans.empty()) {
      stats_.segment_spans.back().second = fed_;
    }
    ++fed_;
    return cls;
  }

  std::vector<Token> legal_tokens() const {
    std::vector<Token> out;
    switch (phase_) {
      case Phase::AtBos:
        out.push_back(tok_bos());
        break;
      case Phase::AfterBos:
        if (vocab_.max_nodes >= 1) out.push_back(tok_node(0));
        break;
      case Phase::SegStart:
        if (node_count() < vocab_.max_nodes) out.push_back(tok_node(node_count()));
        for (int i = 0; i < node_count(); ++i) out.push_back(tok_node(i));
        break;
      case Phase::NewNodeLabel:
        for (int a = 0; a < vocab_.n_node_labels(); ++a) out.push_back(tok_nlabel(a));
        break;
      case Phase::AfterNewIntro:
      case Phase::Trail: {
        if (phase_ == Phase::AfterNewIntro && has_chord_target(-1)) out.push_back(tok_open());
        if (has_trail_target()) {
          for (int b = 0; b < vocab_.n_edge_labels(); ++b) out.push_back(tok_elabel(b));
        }
        out.push_back(tok_sep());
        out.push_back(tok_eos());
        break;
      }
      case Phase::TrailEdge:
        if (node_count() < vocab_.max_nodes) out.push_back(tok_node(node_count()));
        for (int j = 0; j < node_count(); ++j)
          if (j != current_ && !has_edge_local(current_, j)) out.push_back(tok_node(j));
        break;
      case Phase::NbrFirstEdge:
        for (int b = 0; b < vocab_.n_edge_labels(); ++b) out.push_back(tok_elabel(b));
        break;
      case Phase::NbrEdgeNode:
        for (int u = last_chord_ + 1; u < node_count() - 1; ++u)
          if (!has_edge_local(node_count() - 1, u)) out.push_back(tok_node(u));
        break;
      case Phase::NbrAfterEntry:
        if (has_chord_target(last_chord_)) {
          for (int b = 0; b < vocab_.n_edge_labels(); ++b) out.push_back(tok_elabel(b));
        }
        out.push_back(tok_close());
        break;
      case Phase::Done:
        break;
    }
    return out;
  }

  bool complete() const { return phase_ == Phase::Done; }
  int node_count() const { return static_cast<int>(node_labels_.size()); }
  const std::vector<LabelId>& node_labels() const { return node_labels_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const TokenVocab& vocab() const { return vocab_; }

  SequenceStats stats() const {
    SequenceStats s = stats_;
    s.n_nodes = node_count();
    s.n_edges = static_cast<int>(edges_.size());
    s.n_segments = static_cast<int>(s.trail_lengths.size());
    return s;
  }

 private:
  enum class Phase {
    AtBos,          // expect BOS
    AfterBos,       // expect NODE(0)
    SegStart,       // after SEP: expect new or revisited NODE
    NewNodeLabel,   // expect NLABEL of the node just introduced
    AfterNewIntro,  // intro complete; '[' still possible here
    Trail,          // at a node; extend, SEP or EOS
    TrailEdge,      // after ELABEL in a trail-step: expect target NODE
    NbrFirstEdge,   // after '[': expect ELABEL
    NbrEdgeNode,    // after ELABEL in nbr-set: expect chord target NODE
    NbrAfterEntry,  // after a chord entry: another ELABEL or ']'
    Done,
  };

  void check_label(const Token& t, size_t pos) const {
    const int limit = t.kind == TokenKind::NodeLabel ? vocab_.n_node_labels() : vocab_.n_edge_labels();
    if (t.arg < 0 || t.arg >= limit) throw DecodeError(pos, "label id out of vocabulary");
  }

  TokenTypeClass feed_segment_start(const Token& t, size_t pos) {
    if (t.kind != TokenKind::Node)
      throw DecodeError(pos, phase_ == Phase::AfterBos ? "expected NODE(0)"
                                                       : "expected a NODE after SEP");
    begin_segment();
    if (phase_ == Phase::AfterBos && t.arg != 0)
      throw DecodeError(pos, "first node index must be 0");
    if (t.arg == node_count()) {
      if (t.arg >= vocab_.max_nodes) throw DecodeError(pos, "node index exceeds cap");
      node_labels_.push_back(-1);
      current_ = t.arg;
      phase_ = Phase::NewNodeLabel;
      return TokenTypeClass::NewNode;
    }
    if (t.arg > node_count()) throw DecodeError(pos, "non-contiguous node index");
    if (t.arg < 0) throw DecodeError(pos, "negative node index");
    current_ = t.arg;
    phase_ = Phase::Trail;
    return TokenTypeClass::Revisit;
  }

  TokenTypeClass feed_trail_position(const Token& t, size_t pos) {
    switch (t.kind) {
      case TokenKind::NbrOpen:
        if (phase_ != Phase::AfterNewIntro)
          throw DecodeError(pos, "neighborhood set only follows a new node's label");
        if (!has_chord_target(-1))
          throw DecodeError(pos, "no legal chord target for a neighborhood set");
        last_chord_ = -1;
        ++stats_.n_nonempty_nbr_sets;
        phase_ = Phase::NbrFirstEdge;
        return TokenTypeClass::Special;
      case TokenKind::EdgeLabel:
        check_label(t, pos);
        if (!has_trail_target()) throw DecodeError(pos, "no legal trail target from this node");
        pending_elabel_ = t.arg;
        phase_ = Phase::TrailEdge;
        return TokenTypeClass::EdgeLabel;
      case TokenKind::Sep:
        phase_ = Phase::SegStart;
        return TokenTypeClass::Special;
      case TokenKind::Eos:
        phase_ = Phase::Done;
        return TokenTypeClass::Special;
      default:
        throw DecodeError(pos, expected_at_trail());
    }
  }

  TokenTypeClass feed_trail_target(const Token& t, size_t pos) {
    if (t.kind != TokenKind::Node) throw DecodeError(pos, "expected a NODE after an edge label");
    if (t.arg == current_) throw DecodeError(pos, "self-loop");
    if (t.arg == node_count()) {
      if (t.arg >= vocab_.max_nodes) throw DecodeError(pos, "node index exceeds cap");
      add_edge(current_, t.arg, pos);
      node_labels_.push_back(-1);
      ++stats_.trail_lengths.back();
      current_ = t.arg;
      phase_ = Phase::NewNodeLabel;
      return TokenTypeClass::NewNode;
    }
    if (t.arg > node_count()) throw DecodeError(pos, "non-contiguous node index");
    if (t.arg < 0) throw DecodeError(pos, "negative node index");
    add_edge(current_, t.arg, pos);
    ++stats_.trail_lengths.back();
    current_ = t.arg;
    phase_ = Phase::Trail;
    return TokenTypeClass::Revisit;
  }

  TokenTypeClass feed_chord_target(const Token& t, size_t pos) {
    const int owner = node_count() - 1;
    if (t.kind != TokenKind::Node) throw DecodeError(pos, "expected a NODE chord target");
    if (t.arg == owner) throw DecodeError(pos, "self-loop");
    if (t.arg >= node_count()) throw DecodeError(pos, "chord target must be a visited node");
    if (t.arg < 0) throw DecodeError(pos, "negative node index");
    if (t.arg <= last_chord_)
      throw DecodeError(pos, "chord targets must be in ascending index order");
    add_edge(owner, t.arg, pos);
    last_chord_ = t.arg;
    ++stats_.n_chords;
    phase_ = Phase::NbrAfterEntry;
    return TokenTypeClass::Revisit;
  }

  TokenTypeClass feed_after_chord(const Token& t, size_t pos) {
    if (t.kind == TokenKind::NbrClose) {
      current_ = node_count() - 1;
      phase_ = Phase::Trail;
      return TokenTypeClass::Special;
    }
    if (t.kind == TokenKind::EdgeLabel) {
      check_label(t, pos);
      if (!has_chord_target(last_chord_))
        throw DecodeError(pos, "no further chord target in ascending order");
      pending_elabel_ = t.arg;
      phase_ = Phase::NbrEdgeNode;
      return TokenTypeClass::EdgeLabel;
    }
    throw DecodeError(pos, "expected an edge label or ']'");
  }

  const char* expected_at_trail() const {
    return phase_ == Phase::AfterNewIntro ? "expected '[', an edge label, SEP or EOS"
                                          : "expected an edge label, SEP or EOS";
  }

  void begin_segment() {
    stats_.trail_lengths.push_back(1);
    stats_.segment_spans.emplace_back(fed_, fed_);
  }

  bool has_trail_target() const {
    if (node_count() < vocab_.max_nodes) return true;
    for (int j = 0; j < node_count(); ++j)
      if (j != current_ && !has_edge_local(current_, j)) return true;
    return false;
  }

  // any chord target with index > after for the newest node
  bool has_chord_target(int after) const {
    const int owner = node_count() - 1;
    for (int u = after + 1; u < owner; ++u)
      if (!has_edge_local(owner, u)) return true;
    return false;
  }

  bool has_edge_local(int u, int v) const {
    if (u > v) std::swap(u, v);
    return edge_keys_.count(static_cast<int64_t>(u) * kPack + v) > 0;
  }

  void add_edge(int u, int v, size_t pos) {
    if (u == v) throw DecodeError(pos, "self-loop");
    if (has_edge_local(u, v)) throw DecodeError(pos, "duplicate edge");
    int a = std::min(u, v), b = std::max(u, v);
    edge_keys_.insert(static_cast<int64_t>(a) * kPack + b);
    edges_.push_back({a, b, pending_elabel_});
  }

  static constexpr int64_t kPack = 1 << 20;

  TokenVocab vocab_;
  Phase phase_ = Phase::AtBos;
  std::vector<LabelId> node_labels_;
  std::vector<Edge> edges_;
  std::unordered_set<int64_t> edge_keys_;
  int current_ = -1;
  int last_chord_ = -1;
  LabelId pending_elabel_ = 0;
  size_t fed_ = 0;
  SequenceStats stats_;
};

// ---------------------------------------------------------------------------
// decode / mask / classification / stats
// ---------------------------------------------------------------------------

inline LabeledGraph decode(const TokenSequence& s, const TokenVocab& vocab) {
  ParseState st(vocab);
  for (const auto& t : s.tokens) st.feed(t);
  if (!st.complete()) throw DecodeError(s.tokens.size() + 1, "sequence ends before EOS");
  return LabeledGraph(st.node_labels(), st.edges(), vocab.labels);
}

// The constrained-decoding mask for a grammatical prefix (throws on an
// ungrammatical one). An empty prefix expects BOS.
inline std::vector<Token> legal_next_tokens(std::span<const Token> prefix,
                                            const TokenVocab& vocab) {
  ParseState st(vocab);
  for (const auto& t : prefix) st.feed(t);
  return st.legal_tokens();
}

inline std::vector<TokenTypeClass> classify_all(const TokenSequence& s, const TokenVocab& vocab) {
  ParseState st(vocab);
  std::vector<TokenTypeClass> out;
  out.reserve(s.tokens.size());
  for (const auto& t : s.tokens) out.push_back(st.feed(t));
  return out;
}

inline TokenTypeClass classify_token(const TokenSequence& s, size_t position,
                                     const TokenVocab& vocab) {
  if (position >= s.tokens.size()) throw std::out_of_range("token position out of range");
  ParseState st(vocab);
  TokenTypeClass cls = TokenTypeClass::Special;
  for (size_t i = 0; i <= position; ++i) cls = st.feed(s.tokens[i]);
  return cls;
}

inline SequenceStats sequence_stats(const TokenSequence& s, const TokenVocab& vocab) {
  ParseState st(vocab);
  for (const auto& t : s.tokens) st.feed(t);
  if (!st.complete()) throw DecodeError(s.tokens.size() + 1, "sequence ends before EOS");
  return st.stats();
}

// ---------------------------------------------------------------------------
// encoder
// ---------------------------------------------------------------------------

namespace detail {

// Shared traversal bookkeeping for the encoder and the pre-image
// enumerator. Chord sets are emitted eagerly: introducing a node emits all
// its not-yet-covered edges to visited nodes, in ascending sequence-index
// order. Consequently every uncovered edge always has an unvisited
// endpoint, and the only free choices are the three strategy choice points.
struct Traversal {
  struct Arc {
    NodeId to;
    int edge_idx;
    LabelId label;
  };

  const LabeledGraph* g;
  std::vector<std::vector<Arc>> adj;
  std::vector<Token> tokens;
  std::vector<NodeId> order;      // sequence index -> original node id
  std::vector<int> seq_index;     // original node id -> sequence index or -1
  std::vector<bool> covered;      // by edge ordinal
  std::vector<int> uncovered_deg; // per original node
  int covered_count = 0;

  explicit Traversal(const LabeledGraph& graph) : g(&graph) {
    const NodeId n = graph.node_count();
    adj.resize(n);
    for (int e = 0; e < graph.edge_count(); ++e) {
      const Edge& ed = graph.edges()[e];
      adj[ed.u].push_back({ed.v, e, ed.label});
      adj[ed.v].push_back({ed.u, e, ed.label});
    }
    seq_index.assign(n, -1);
    covered.assign(graph.edge_count(), false);
    uncovered_deg.resize(n);
    for (NodeId v = 0; v < n; ++v) uncovered_deg[v] = graph.degree(v);
    tokens.push_back(tok_bos());
  }

  bool all_done() const {
    return covered_count == g->edge_count() &&
           static_cast<NodeId>(order.size()) == g->node_count();
  }

  void cover(int edge_idx) {
    covered[edge_idx] = true;
    ++covered_count;
    --uncovered_deg[g->edges()[edge_idx].u];
    --uncovered_deg[g->edges()[edge_idx].v];
  }

  // Introduce node v (new or revisit); for a new node, emit label and the
  // full eager chord set.
  void intro(NodeId v) {
    if (seq_index[v] >= 0) {
      tokens.push_back(tok_node(seq_index[v]));
      return;
    }
    seq_index[v] = static_cast<int>(order.size());
    order.push_back(v);
    tokens.push_back(tok_node(seq_index[v]));
    tokens.push_back(tok_nlabel(g->node_label(v)));
    std::vector<std::pair<int, Arc>> chords;  // (target sequence index, arc)
    for (const Arc& a : adj[v])
      if (!covered[a.edge_idx] && seq_index[a.to] >= 0) chords.push_back({seq_index[a.to], a});
    if (chords.empty()) return;
    std::sort(chords.begin(), chords.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    tokens.push_back(tok_open());
    for (const auto& [idx, a] : chords) {
      cover(a.edge_idx);
      tokens.push_back(tok_elabel(a.label));
      tokens.push_back(tok_node(idx));
    }
    tokens.push_back(tok_close());
  }

  void trail_step(NodeId from, NodeId to) {
    for (const Arc& a : adj[from]) {
      if (a.to == to && !covered[a.edge_idx]) {
        cover(a.edge_idx);
        tokens.push_back(tok_elabel(a.label));
        intro(to);
        return;
      }
    }
    throw std::logic_error("trail_step: no uncovered edge to target");
  }

  std::vector<NodeId> extension_candidates(NodeId v) const {
    std::vector<NodeId> out;
    for (const Arc& a : adj[v])
      if (!covered[a.edge_idx]) out.push_back(a.to);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Nodes with uncovered incident edges; once none remain, unvisited
  // (necessarily isolated) nodes, each of which becomes its own segment.
  std::vector<NodeId> restart_candidates() const {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < g->node_count(); ++v)
      if (uncovered_deg[v] > 0) out.push_back(v);
    if (out.empty()) {
      for (NodeId v = 0; v < g->node_count(); ++v)
        if (seq_index[v] < 0) out.push_back(v);
    }
    return out;
  }
};

}  // namespace detail

// Encode a graph under a traversal strategy. Node indices in the output
// follow first appearance; node_order maps them back to input ids.
inline TokenSequence encode(const LabeledGraph& g, StrategyKind strategy, uint64_t seed,
                            int max_nodes = 64) {
  if (g.node_count() == 0) throw std::invalid_argument("cannot encode an empty graph");
  if (g.node_count() > max_nodes)
    throw std::invalid_argument("graph exceeds node cap (" + std::to_string(g.node_count()) +
                                " > " + std::to_string(max_nodes) + ")");
  RngStream rng(seed);
  detail::Traversal tr(g);
  bool first = true;
  while (!tr.all_done()) {
    std::vector<NodeId> candidates = tr.restart_candidates();
    NodeId at = first ? choose_start(strategy, g, candidates, rng)
                      : choose_restart(strategy, g, candidates, rng);
    if (!first) tr.tokens.push_back(tok_sep());
    first = false;
    tr.intro(at);
    for (;;) {
      std::vector<NodeId> ext = tr.extension_candidates(at);
      if (ext.empty()) break;
      NodeId next = choose_extension(strategy, g, at, ext, rng);
      tr.trail_step(at, next);
      at = next;
    }
  }
  tr.tokens.push_back(tok_eos());
  return TokenSequence{std::move(tr.tokens), std::move(tr.order)};
}

inline TokenVocab make_token_vocab(const LabeledGraph& g, int max_nodes = 64) {
  return TokenVocab{g.vocab(), max_nodes};
}

// ---------------------------------------------------------------------------
// pre-image enumeration
// ---------------------------------------------------------------------------

struct EnumerationLimitExceeded : std::runtime_error {
  size_t partial_count;

  explicit EnumerationLimitExceeded(size_t n)
      : std::runtime_error("linearization enumeration exceeded limit (" + std::to_string(n) +
                           " found so far)"),
        partial_count(n) {}
};

namespace detail {

inline void enumerate_rec(const LabeledGraph& g, Traversal tr, bool first, size_t limit,
                          std::set<std::vector<Token>>& out) {
  if (tr.all_done()) {
    tr.tokens.push_back(tok_eos());
    out.insert(std::move(tr.tokens));
    if (out.size() > limit) throw EnumerationLimitExceeded(out.size());
    return;
  }
  std::vector<NodeId> candidates = tr.restart_candidates();
  for (NodeId start : candidates) {
    Traversal branch = tr;
    if (!first) branch.tokens.push_back(tok_sep());
    branch.intro(start);
    // walk the trail, branching at every extension choice
    struct Frame {
      Traversal state;
      NodeId at;
    };
    std::vector<Frame> stack;
    stack.push_back({std::move(branch), start});
    while (!stack.empty()) {
      Frame f = std::move(stack.back());
      stack.pop_back();
      std::vector<NodeId> ext = f.state.extension_candidates(f.at);
      if (ext.empty()) {
        enumerate_rec(g, std::move(f.state), false, limit, out);
        continue;
      }
      for (NodeId next : ext) {
        Traversal t2 = f.state;
        t2.trail_step(f.at, next);
        stack.push_back({std::move(t2), next});
      }
    }
  }
}

}  // namespace detail

// All distinct linearizations of g (every traversal reachable through the
// encoder's choice points), deduplicated. Intended for small graphs.
inline std::vector<TokenSequence> enumerate_linearizations(const LabeledGraph& g,
                                                           size_t limit = 200000,
                                                           int max_nodes = 64) {
  if (g.node_count() == 0) throw std::invalid_argument("cannot enumerate an empty graph");
  if (g.node_count() > max_nodes) throw std::invalid_argument("graph exceeds node cap");
  std::set<std::vector<Token>> set;
  detail::enumerate_rec(g, detail::Traversal(g), true, limit, set);
  std::vector<TokenSequence> out;
  out.reserve(set.size());
  for (auto& v : set) out.push_back(TokenSequence{v, {}});
  return out;
}

}  // namespace sent
