#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sent/graph.hpp"

namespace sent {

enum class TokenKind : uint8_t {
  Bos,
  Eos,
  Sep,
  NbrOpen,
  NbrClose,
  Node,       // arg = node index (first-appearance order)
  NodeLabel,  // arg = node label id
  EdgeLabel,  // arg = edge label id
};

struct Token {
  TokenKind kind = TokenKind::Bos;
  int arg = 0;

  friend auto operator<=>(const Token&, const Token&) = default;
};

inline Token tok_bos() { return {TokenKind::Bos, 0}; }
inline Token tok_eos() { return {TokenKind::Eos, 0}; }
inline Token tok_sep() { return {TokenKind::Sep, 0}; }
inline Token tok_open() { return {TokenKind::NbrOpen, 0}; }
inline Token tok_close() { return {TokenKind::NbrClose, 0}; }
inline Token tok_node(int i) { return {TokenKind::Node, i}; }
inline Token tok_nlabel(int a) { return {TokenKind::NodeLabel, a}; }
inline Token tok_elabel(int b) { return {TokenKind::EdgeLabel, b}; }

// Classification used by the calibration decomposition. Node tokens split
// into NewNode (first occurrence of an index) and Revisit (back-reference).
enum class TokenTypeClass : uint8_t { NewNode, Revisit, NodeLabel, EdgeLabel, Special };

inline const char* token_type_name(TokenTypeClass t) {
  switch (t) {
    case TokenTypeClass::NewNode: return "new_node";
    case TokenTypeClass::Revisit: return "revisit";
    case TokenTypeClass::NodeLabel: return "node_label";
    case TokenTypeClass::EdgeLabel: return "edge_label";
    case TokenTypeClass::Special: return "special";
  }
  return "?";
}

// Token id space: 5 specials, then NODE(0..max_nodes-1), then node labels,
// then edge labels. Scorers operate on this flat space.
struct TokenVocab {
  LabelVocab labels;
  int max_nodes = 64;

  int n_node_labels() const { return static_cast<int>(labels.node_labels.size()); }
  int n_edge_labels() const { return static_cast<int>(labels.edge_labels.size()); }
  int size() const { return 5 + max_nodes + n_node_labels() + n_edge_labels(); }

  int id_of(const Token& t) const {
    switch (t.kind) {
      case TokenKind::Bos: return 0;
      case TokenKind::Eos: return 1;
      case TokenKind::Sep: return 2;
      case TokenKind::NbrOpen: return 3;
      case TokenKind::NbrClose: return 4;
      case TokenKind::Node: return 5 + t.arg;
      case TokenKind::NodeLabel: return 5 + max_nodes + t.arg;
      case TokenKind::EdgeLabel: return 5 + max_nodes + n_node_labels() + t.arg;
    }
    throw std::logic_error("bad token kind");
  }

  Token token_of(int id) const {
    if (id < 0 || id >= size()) throw std::out_of_range("token id out of range");
    if (id == 0) return tok_bos();
    if (id == 1) return tok_eos();
    if (id == 2) return tok_sep();
    if (id == 3) return tok_open();
    if (id == 4) return tok_close();
    id -= 5;
    if (id < max_nodes) return tok_node(id);
    id -= max_nodes;
    if (id < n_node_labels()) return tok_nlabel(id);
    return tok_elabel(id - n_node_labels());
  }

  std::string text_of(const Token& t) const {
    switch (t.kind) {
      case TokenKind::Bos: return "BOS";
      case TokenKind::Eos: return "EOS";
      case TokenKind::Sep: return "SEP";
      case TokenKind::NbrOpen: return "[";
      case TokenKind::NbrClose: return "]";
      case TokenKind::Node: return "N" + std::to_string(t.arg);
      case TokenKind::NodeLabel: return "L:" + labels.node_labels.at(t.arg);
      case TokenKind::EdgeLabel: return "E:" + labels.edge_labels.at(t.arg);
    }
    throw std::logic_error("bad token kind");
  }

  Token parse_token(const std::string& s) const {
    if (s == "BOS") return tok_bos();
    if (s == "EOS") return tok_eos();
    if (s == "SEP") return tok_sep();
    if (s == "[") return tok_open();
    if (s == "]") return tok_close();
    if (s.size() >= 2 && s[0] == 'N') {
      int i = std::stoi(s.substr(1));
      if (i < 0 || i >= max_nodes) throw std::invalid_argument("node index out of range: " + s);
      return tok_node(i);
    }
    if (s.rfind("L:", 0) == 0) return tok_nlabel(labels.node_label_id(s.substr(2)));
    if (s.rfind("E:", 0) == 0) return tok_elabel(labels.edge_label_id(s.substr(2)));
    throw std::invalid_argument("unrecognized token: " + s);
  }
};

// A linearization. node_order maps sequence index -> original node id and is
// populated only on encoder outputs (decoded/parsed sequences leave it empty).
struct TokenSequence {
  std::vector<Token> tokens;
  std::vector<NodeId> node_order;

  size_t size() const { return tokens.size(); }
  // scored length: BOS conditions but is never scored
  size_t scored_tokens() const { return tokens.empty() ? 0 : tokens.size() - 1; }

  friend bool operator==(const TokenSequence& a, const TokenSequence& b) {
    return a.tokens == b.tokens;
  }
};

inline std::string render_tokens(const TokenSequence& s, const TokenVocab& vocab) {
  std::string out;
  for (size_t i = 0; i < s.tokens.size(); ++i) {
    if (i) out += ' ';
    out += vocab.text_of(s.tokens[i]);
  }
  return out;
}

inline TokenSequence parse_tokens(const std::string& line, const TokenVocab& vocab) {
  TokenSequence seq;
  std::istringstream iss(line);
  std::string word;
  while (iss >> word) seq.tokens.push_back(vocab.parse_token(word));
  return seq;
}

}  // namespace sent
