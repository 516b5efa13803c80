#pragma once

#include <cctype>
#include <functional>
#include <string>
#include <vector>

#include "mqc/errors.hpp"
#include "mqc/trees.hpp"

namespace mqc {

namespace detail {

inline void emit_subtree(const UnrootedPhylogeny& t, int v, int parent,
                         std::string& out,
                         const std::vector<int>& min_taxon) {
  if (v < t.n_leaves()) {
    out += t.taxa.name(v + 1);
    return;
  }
  std::vector<int> kids;
  for (int w : t.adj[v])
    if (w != parent) kids.push_back(w);
  std::sort(kids.begin(), kids.end(),
            [&](int a, int b) { return min_taxon[a] < min_taxon[b]; });
  out += '(';
  for (size_t k = 0; k < kids.size(); ++k) {
    if (k) out += ',';
    emit_subtree(t, kids[k], v, out, min_taxon);
  }
  out += ')';
}

inline std::vector<int> min_taxon_map(const UnrootedPhylogeny& t, int start) {
  std::vector<int> min_taxon(t.adj.size(), 0);
  std::function<int(int, int)> walk = [&](int v, int parent) -> int {
    int best = v < t.n_leaves() ? v + 1 : 0;
    for (int w : t.adj[v])
      if (w != parent) {
        int m = walk(w, v);
        if (best == 0 || (m != 0 && m < best)) best = m;
      }
    return min_taxon[v] = best;
  };
  walk(start, -1);
  return min_taxon;
}

}  // namespace detail

// Canonical Newick text for an unrooted tree: displayed from the
// neighbor of taxon 1's leaf, subtrees ordered by smallest contained
// taxon. No branch lengths, no internal labels. The same tree always
// yields the same string.
inline std::string emit_newick(const UnrootedPhylogeny& t) {
  if (t.n_leaves() < 2) throw invalid_input("newick needs at least 2 leaves");
  int start = t.adj[0][0];
  if (t.n_leaves() == 2) {
    return "(" + t.taxa.name(1) + "," + t.taxa.name(2) + ");";
  }
  auto min_taxon = detail::min_taxon_map(t, start);
  std::string out;
  std::vector<int> kids = t.adj[start];
  std::sort(kids.begin(), kids.end(),
            [&](int a, int b) { return min_taxon[a] < min_taxon[b]; });
  out += '(';
  for (size_t k = 0; k < kids.size(); ++k) {
    if (k) out += ',';
    detail::emit_subtree(t, kids[k], start, out, min_taxon);
  }
  out += ");";
  return out;
}

// Newick text for a rooted tree, children in stored order. Labels and
// branch lengths are not emitted.
inline std::string emit_newick(const RootedPhylogeny& r) {
  std::string out;
  std::function<void(int)> walk = [&](int v) {
    if (r.is_leaf(v)) {
      out += r.taxa.name(r.nodes[v].taxon);
      return;
    }
    out += '(';
    const auto& kids = r.nodes[v].children;
    for (size_t k = 0; k < kids.size(); ++k) {
      if (k) out += ',';
      walk(kids[k]);
    }
    out += ')';
  };
  walk(r.root);
  out += ';';
  return out;
}

// Parses Newick text into a rooted phylogeny. Leaf names become the
// taxon set in order of first appearance. Branch lengths and internal
// node names are tolerated and discarded. Errors carry the 1-based
// character position.
inline RootedPhylogeny parse_newick(const std::string& text) {
  size_t pos = 0;
  auto fail = [&](const std::string& what) -> void {
    throw parse_error("newick at position " + std::to_string(pos + 1) + ": " +
                      what);
  };
  auto skip_ws = [&]() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  };
  auto is_name_char = [&](char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '(' &&
           c != ')' && c != ',' && c != ':' && c != ';';
  };

  struct Raw {
    std::vector<int> children;
    std::string name;
  };
  std::vector<Raw> raw;

  std::function<int()> subtree = [&]() -> int {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    int id = static_cast<int>(raw.size());
    raw.emplace_back();
    if (text[pos] == '(') {
      ++pos;
      while (true) {
        int child = subtree();
        raw[id].children.push_back(child);
        skip_ws();
        if (pos >= text.size()) fail("unterminated '('");
        if (text[pos] == ',') {
          ++pos;
          continue;
        }
        if (text[pos] == ')') {
          ++pos;
          break;
        }
        fail("expected ',' or ')'");
      }
      skip_ws();
      // Optional internal node name, discarded.
      while (pos < text.size() && is_name_char(text[pos])) ++pos;
    } else {
      size_t start = pos;
      while (pos < text.size() && is_name_char(text[pos])) ++pos;
      if (pos == start) fail("expected a taxon name");
      raw[id].name = text.substr(start, pos - start);
    }
    skip_ws();
    if (pos < text.size() && text[pos] == ':') {
      ++pos;
      size_t start = pos;
      while (pos < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[pos])) ||
              text[pos] == '.' || text[pos] == '-' || text[pos] == '+' ||
              text[pos] == 'e' || text[pos] == 'E'))
        ++pos;
      if (pos == start) fail("expected a branch length after ':'");
    }
    return id;
  };

  int top = subtree();
  skip_ws();
  if (pos >= text.size() || text[pos] != ';') fail("expected ';'");
  ++pos;
  skip_ws();
  if (pos != text.size()) fail("trailing text after ';'");

  std::vector<std::string> names;
  std::function<void(int)> collect = [&](int v) {
    if (raw[v].children.empty()) names.push_back(raw[v].name);
    for (int c : raw[v].children) collect(c);
  };
  collect(top);
  if (names.size() < 2) fail("tree needs at least two leaves");

  RootedPhylogeny out;
  try {
    out.taxa = TaxonSet(names);
  } catch (const invalid_input& e) {
    throw parse_error(std::string("newick: ") + e.what());
  }
  std::function<int(int)> build = [&](int v) -> int {
    if (raw[v].children.empty())
      return out.add_leaf(out.taxa.index_of(raw[v].name));
    int id = out.add_internal(0);
    for (int c : raw[v].children) {
      int child = build(c);
      // link() by id; build() may reallocate nodes, so link afterwards.
      out.nodes[child].parent = id;
      out.nodes[id].children.push_back(child);
    }
    return id;
  };
  out.root = build(top);
  return out;
}

// Parses Newick text and returns the unrooted binary view.
inline UnrootedPhylogeny parse_newick_unrooted(const std::string& text) {
  return unroot(parse_newick(text));
}

}  // namespace mqc
