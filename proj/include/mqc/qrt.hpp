#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mqc/errors.hpp"
#include "mqc/quartets.hpp"

namespace mqc {

// In-memory form of a .qrt file: the quartet set plus any comment lines
// (kept verbatim, including the leading '#').
struct QrtFile {
  QuartetSet quartets;
  std::vector<std::string> comments;
};

// Reads a .qrt stream. Layout:
//   taxa: name1 name2 ... nameN     (first significant line)
//   # comment                       (anywhere)
//   nameA nameB | nameC nameD       (one topology per line)
// Blank lines are ignored. A second topology over the same four taxa is
// an error.
inline QrtFile read_qrt(std::istream& in) {
  QrtFile out;
  std::string line;
  int lineno = 0;
  bool have_taxa = false;

  while (std::getline(in, line)) {
    ++lineno;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      out.comments.push_back(line.substr(first));
      continue;
    }

    if (!have_taxa) {
      std::istringstream ss(line);
      std::string head;
      ss >> head;
      if (head != "taxa:")
        throw parse_error("expected 'taxa:' header", lineno);
      std::vector<std::string> names;
      std::string name;
      while (ss >> name) names.push_back(name);
      if (names.size() < 4)
        throw parse_error("need at least 4 taxa", lineno);
      try {
        out.quartets = QuartetSet(TaxonSet(std::move(names)));
      } catch (const invalid_input& e) {
        throw parse_error(e.what(), lineno);
      }
      have_taxa = true;
      continue;
    }

    size_t bar = line.find('|');
    if (bar == std::string::npos || line.find('|', bar + 1) != std::string::npos)
      throw parse_error("expected 'a b | c d'", lineno);
    auto side = [&](const std::string& half) {
      std::istringstream ss(half);
      std::vector<std::string> names;
      std::string name;
      while (ss >> name) names.push_back(name);
      return names;
    };
    std::vector<std::string> left = side(line.substr(0, bar));
    std::vector<std::string> right = side(line.substr(bar + 1));
    if (left.size() != 2 || right.size() != 2)
      throw parse_error("expected exactly two taxa on each side of '|'", lineno);
    try {
      const TaxonSet& taxa = out.quartets.taxa();
      out.quartets.add(canonical_topology(
          taxa.index_of(left[0]), taxa.index_of(left[1]),
          taxa.index_of(right[0]), taxa.index_of(right[1])));
    } catch (const invalid_input& e) {
      throw parse_error(e.what(), lineno);
    }
  }
  if (!have_taxa) throw parse_error("missing 'taxa:' header", lineno);
  return out;
}

// Writes a .qrt stream: taxa line, then comments, then topologies in
// canonical order. Deterministic byte-for-byte for equal content.
inline void write_qrt(std::ostream& os, const QuartetSet& q,
                      const std::vector<std::string>& comments = {}) {
  const TaxonSet& taxa = q.taxa();
  os << "taxa:";
  for (const auto& name : taxa.names()) os << ' ' << name;
  os << '\n';
  for (const auto& c : comments)
    os << (c.rfind('#', 0) == 0 ? "" : "# ") << c << '\n';
  for (const auto& t : q.topologies())
    os << taxa.name(t.a) << ' ' << taxa.name(t.b) << " | " << taxa.name(t.c)
       << ' ' << taxa.name(t.d) << '\n';
}

}  // namespace mqc
