#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "sent/graph.hpp"
#include "sent/token.hpp"

#include <json.hpp>

namespace sent {

struct ParseFileError : std::runtime_error {
  size_t line;

  ParseFileError(size_t line_no, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
};

// Fixed-precision, locale-independent number rendering for data files.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Graph files: one JSON object per line,
//   {"node_labels": ["C", ...], "edges": [[u, v, "single"], ...]}
// with u < v required. Label strings are resolved against a vocabulary
// built from the whole file (sorted unique), so load order does not matter.
// ---------------------------------------------------------------------------

inline std::vector<LabeledGraph> load_graphs_jsonl(std::istream& in) {
  std::vector<std::pair<size_t, nlohmann::json>> records;
  std::set<std::string> node_label_set, edge_label_set;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseFileError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.contains("node_labels") || !j["node_labels"].is_array())
      throw ParseFileError(line_no, "missing or non-array \"node_labels\"");
    if (!j.contains("edges") || !j["edges"].is_array())
      throw ParseFileError(line_no, "missing or non-array \"edges\"");
    for (const auto& s : j["node_labels"]) {
      if (!s.is_string()) throw ParseFileError(line_no, "node labels must be strings");
      node_label_set.insert(s.get<std::string>());
    }
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
          !e[1].is_number_integer() || !e[2].is_string())
        throw ParseFileError(line_no, "each edge must be [u, v, \"label\"]");
      edge_label_set.insert(e[2].get<std::string>());
    }
    records.emplace_back(line_no, std::move(j));
  }
  LabelVocab vocab;
  vocab.node_labels.assign(node_label_set.begin(), node_label_set.end());
  vocab.edge_labels.assign(edge_label_set.begin(), edge_label_set.end());
  std::vector<LabeledGraph> out;
  out.reserve(records.size());
  for (const auto& [ln, j] : records) {
    std::vector<LabelId> labels;
    for (const auto& s : j["node_labels"])
      labels.push_back(vocab.node_label_id(s.get<std::string>()));
    const int n = static_cast<int>(labels.size());
    std::vector<Edge> edges;
    std::set<std::pair<int, int>> seen;
    for (const auto& e : j["edges"]) {
      const int u = e[0].get<int>(), v = e[1].get<int>();
      if (u == v) throw ParseFileError(ln, "self-loop [" + std::to_string(u) + "]");
      if (u >= v)
        throw ParseFileError(ln, "edge endpoints must satisfy u < v, got [" +
                                     std::to_string(u) + ", " + std::to_string(v) + "]");
      if (u < 0 || v >= n) throw ParseFileError(ln, "edge endpoint out of range");
      if (!seen.insert({u, v}).second)
        throw ParseFileError(ln, "duplicate edge [" + std::to_string(u) + ", " +
                                     std::to_string(v) + "]");
      edges.push_back({u, v, vocab.edge_label_id(e[2].get<std::string>())});
    }
    out.emplace_back(std::move(labels), std::move(edges), vocab);
  }
  return out;
}

inline std::vector<LabeledGraph> load_graphs_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_graphs_jsonl(in);
}

inline void save_graphs_jsonl(std::ostream& out, std::span<const LabeledGraph> graphs) {
  for (const auto& g : graphs) {
    nlohmann::json j;
    std::vector<std::string> labels;
    for (LabelId a : g.node_labels()) labels.push_back(g.vocab().node_labels[a]);
    j["node_labels"] = labels;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : g.edges())
      edges.push_back({e.u, e.v, g.vocab().edge_labels[e.label]});
    j["edges"] = edges;
    out << j.dump() << "\n";
  }
}

inline void save_graphs_jsonl(const std::string& path, std::span<const LabeledGraph> graphs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save_graphs_jsonl(out, graphs);
}

// ---------------------------------------------------------------------------
// Token files: one whitespace-separated sequence per line. Vocabulary is
// recovered from the label strings present (sorted unique).
// ---------------------------------------------------------------------------

struct TokenFile {
  std::vector<TokenSequence> sequences;
  TokenVocab vocab;
};

inline TokenFile load_token_file(std::istream& in, int max_nodes = 64) {
  std::vector<std::pair<size_t, std::string>> lines;
  std::set<std::string> node_label_set, edge_label_set;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream iss(line);
    std::string word;
    while (iss >> word) {
      if (word.rfind("L:", 0) == 0) node_label_set.insert(word.substr(2));
      if (word.rfind("E:", 0) == 0) edge_label_set.insert(word.substr(2));
    }
    lines.emplace_back(line_no, line);
  }
  TokenFile out;
  out.vocab.labels.node_labels.assign(node_label_set.begin(), node_label_set.end());
  out.vocab.labels.edge_labels.assign(edge_label_set.begin(), edge_label_set.end());
  out.vocab.max_nodes = max_nodes;
  for (const auto& [ln, text] : lines) {
    try {
      out.sequences.push_back(parse_tokens(text, out.vocab));
    } catch (const std::exception& e) {
      throw ParseFileError(ln, e.what());
    }
  }
  return out;
}

inline TokenFile load_token_file(const std::string& path, int max_nodes = 64) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_token_file(in, max_nodes);
}

inline void save_token_file(std::ostream& out, std::span<const TokenSequence> seqs,
                            const TokenVocab& vocab) {
  for (const auto& s : seqs) out << render_tokens(s, vocab) << "\n";
}

inline void save_token_file(const std::string& path, std::span<const TokenSequence> seqs,
                            const TokenVocab& vocab) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  save_token_file(out, seqs, vocab);
}

// ---------------------------------------------------------------------------
// External NLL records:
//   graph_id,perm_index,strategy,nll,n_tokens
// ---------------------------------------------------------------------------

struct NllRecord {
  std::string graph_id;
  int perm_index = 0;
  std::string strategy;
  double nll = 0;
  int n_tokens = 0;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

inline std::vector<NllRecord> load_nll_csv(std::istream& in) {
  static const std::vector<std::string> kColumns = {"graph_id", "perm_index", "strategy", "nll",
                                                    "n_tokens"};
  std::string line;
  if (!std::getline(in, line)) throw ParseFileError(1, "empty NLL file");
  std::vector<std::string> header = detail::split_csv_line(line);
  for (const auto& col : kColumns) {
    if (std::find(header.begin(), header.end(), col) == header.end())
      throw ParseFileError(1, "missing column \"" + col + "\"");
  }
  std::map<std::string, size_t> col_of;
  for (size_t i = 0; i < header.size(); ++i) col_of[header[i]] = i;
  std::vector<NllRecord> out;
  std::set<std::pair<std::string, int>> seen;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::string> fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw ParseFileError(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                        std::to_string(fields.size()));
    NllRecord rec;
    rec.graph_id = fields[col_of["graph_id"]];
    rec.strategy = fields[col_of["strategy"]];
    try {
      rec.perm_index = std::stoi(fields[col_of["perm_index"]]);
      rec.nll = std::stod(fields[col_of["nll"]]);
      rec.n_tokens = std::stoi(fields[col_of["n_tokens"]]);
    } catch (const std::exception&) {
      throw ParseFileError(line_no, "malformed numeric field");
    }
    if (!std::isfinite(rec.nll) || rec.nll < 0)
      throw ParseFileError(line_no, "nll must be finite and >= 0");
    if (!seen.insert({rec.graph_id, rec.perm_index}).second)
      throw ParseFileError(line_no, "duplicate (graph_id, perm_index) = (" + rec.graph_id + ", " +
                                        std::to_string(rec.perm_index) + ")");
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::vector<NllRecord> load_nll_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_nll_csv(in);
}

// Records grouped by graph id, preserving first-appearance order of ids
// and sorting each group by permutation index.
inline std::vector<std::pair<std::string, std::vector<NllRecord>>> group_nll_records(
    std::vector<NllRecord> records) {
  std::vector<std::pair<std::string, std::vector<NllRecord>>> out;
  std::map<std::string, size_t> pos;
  for (auto& r : records) {
    auto it = pos.find(r.graph_id);
    if (it == pos.end()) {
      pos[r.graph_id] = out.size();
      out.push_back({r.graph_id, {}});
      it = pos.find(r.graph_id);
    }
    out[it->second].second.push_back(std::move(r));
  }
  for (auto& [id, group] : out) {
    std::sort(group.begin(), group.end(),
              [](const NllRecord& a, const NllRecord& b) { return a.perm_index < b.perm_index; });
  }
  return out;
}

}  // namespace sent
