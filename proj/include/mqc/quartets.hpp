#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "mqc/errors.hpp"

namespace mqc {

// Ordered list of distinct taxon names. Taxa are addressed by 1-based
// index everywhere in this library; the index of a name is its position
// in this list.
class TaxonSet {
 public:
  TaxonSet() = default;

  explicit TaxonSet(std::vector<std::string> names) : names_(std::move(names)) {
    for (int i = 0; i < static_cast<int>(names_.size()); ++i) {
      if (names_[i].empty())
        throw invalid_input("taxon name must be non-empty");
      auto [it, fresh] = index_.emplace(names_[i], i + 1);
      if (!fresh)
        throw invalid_input("duplicate taxon name: " + names_[i]);
    }
  }

  int size() const { return static_cast<int>(names_.size()); }

  const std::string& name(int idx) const {
    if (idx < 1 || idx > size())
      throw invalid_input("taxon index out of range: " + std::to_string(idx));
    return names_[idx - 1];
  }

  // 1-based index of a name, or 0 if absent.
  int find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? 0 : it->second;
  }

  int index_of(const std::string& name) const {
    int idx = find(name);
    if (idx == 0) throw invalid_input("unknown taxon name: " + name);
    return idx;
  }

  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const TaxonSet& o) const { return names_ == o.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

// Convenience taxa t1..tn used for generated instances.
inline TaxonSet default_taxa(int n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (int i = 1; i <= n; ++i) names.push_back("t" + std::to_string(i));
  return TaxonSet(std::move(names));
}

// One quartet topology [a,b | c,d]: the path between a and b is
// vertex-disjoint from the path between c and d. Stored in canonical
// form: a < b, c < d, a < c.
struct QuartetTopology {
  int a = 0, b = 0, c = 0, d = 0;

  auto operator<=>(const QuartetTopology&) const = default;

  std::array<int, 4> tuple() const { return {a, b, c, d}; }

  // The four taxa involved, ascending.
  std::array<int, 4> subset() const {
    std::array<int, 4> s{a, b, c, d};
    std::sort(s.begin(), s.end());
    return s;
  }
};

// Canonical form of the pairing {w,x} | {y,z}: each pair sorted
// ascending, pairs ordered so the smaller first element leads.
inline QuartetTopology canonical_topology(int w, int x, int y, int z) {
  std::array<int, 4> s{w, x, y, z};
  std::sort(s.begin(), s.end());
  if (s[0] < 1 || std::adjacent_find(s.begin(), s.end()) != s.end())
    throw invalid_input("quartet topology needs four distinct positive taxa");
  if (w > x) std::swap(w, x);
  if (y > z) std::swap(y, z);
  if (w > y) {
    std::swap(w, y);
    std::swap(x, z);
  }
  return QuartetTopology{w, x, y, z};
}

inline QuartetTopology canonical_topology(const QuartetTopology& t) {
  return canonical_topology(t.a, t.b, t.c, t.d);
}

// The three possible topologies over one 4-subset, in canonical tuple order.
inline std::array<QuartetTopology, 3> topologies_of(std::array<int, 4> s) {
  std::sort(s.begin(), s.end());
  return {canonical_topology(s[0], s[1], s[2], s[3]),
          canonical_topology(s[0], s[2], s[1], s[3]),
          canonical_topology(s[0], s[3], s[1], s[2])};
}

// The two topologies over the same 4-subset other than t, in canonical
// tuple order.
inline std::array<QuartetTopology, 2> alternatives_of(const QuartetTopology& t) {
  QuartetTopology ct = canonical_topology(t);
  auto all = topologies_of(ct.subset());
  std::array<QuartetTopology, 2> out{};
  int k = 0;
  for (const auto& cand : all)
    if (!(cand == ct)) out[k++] = cand;
  if (k != 2) throw internal_error("topology alternatives: expected 2");
  return out;
}

// A set of quartet topologies over a taxon set, at most one topology per
// 4-subset of taxa.
class QuartetSet {
 public:
  QuartetSet() = default;
  explicit QuartetSet(TaxonSet taxa) : taxa_(std::move(taxa)) {}

  const TaxonSet& taxa() const { return taxa_; }
  int size() const { return static_cast<int>(by_subset_.size()); }
  bool empty() const { return by_subset_.empty(); }

  // Adds a topology; rejects a second topology on the same 4-subset.
  void add(const QuartetTopology& t) {
    QuartetTopology ct = validated(t);
    auto [it, fresh] = by_subset_.emplace(ct.subset(), ct);
    if (!fresh)
      throw invalid_input("duplicate quartet over taxa {" + subset_names(ct) +
                          "}");
  }

  // Replaces the topology stored for t's 4-subset (which must exist).
  void replace(const QuartetTopology& t) {
    QuartetTopology ct = validated(t);
    auto it = by_subset_.find(ct.subset());
    if (it == by_subset_.end())
      throw invalid_input("no quartet over taxa {" + subset_names(ct) +
                          "} to replace");
    it->second = ct;
  }

  // Topology stored for the given 4-subset, or nullptr.
  const QuartetTopology* find(std::array<int, 4> subset) const {
    std::sort(subset.begin(), subset.end());
    auto it = by_subset_.find(subset);
    return it == by_subset_.end() ? nullptr : &it->second;
  }

  bool contains(const QuartetTopology& t) const {
    const QuartetTopology* got = find(t.subset());
    return got && *got == canonical_topology(t);
  }

  // All topologies in canonical order: sorted lexicographically by the
  // canonical index 4-tuple. This is the order used for emission and for
  // the per-topology variables of the encoder.
  std::vector<QuartetTopology> topologies() const {
    std::vector<QuartetTopology> out;
    out.reserve(by_subset_.size());
    for (const auto& [_, t] : by_subset_) out.push_back(t);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  QuartetTopology validated(const QuartetTopology& t) const {
    QuartetTopology ct = canonical_topology(t);
    if (ct.subset()[3] > taxa_.size())
      throw invalid_input("quartet taxon index exceeds taxon count");
    return ct;
  }

  std::string subset_names(const QuartetTopology& t) const {
    auto s = t.subset();
    std::string out;
    for (int i = 0; i < 4; ++i) {
      if (i) out += ",";
      out += taxa_.name(s[i]);
    }
    return out;
  }

  TaxonSet taxa_;
  std::map<std::array<int, 4>, QuartetTopology> by_subset_;
};

inline std::int64_t choose4(int n) {
  if (n < 4) return 0;
  return static_cast<std::int64_t>(n) * (n - 1) * (n - 2) * (n - 3) / 24;
}

// True iff the set has one topology for every 4-subset of its taxa.
inline bool is_complete(const QuartetSet& q) {
  return q.size() == choose4(q.taxa().size());
}

}  // namespace mqc
