#pragma once

#include <array>
#include <vector>

#include "mqc/errors.hpp"
#include "mqc/quartets.hpp"

namespace mqc {

// Result of the sibling test for one unordered taxon pair {i,j}.
//
//   p1  counts 2-subsets {y1,y2} of the remaining taxa whose stored
//       topology is not [i,j | y1,y2];
//   p2  counts 3-subsets {y1,y2,y3} of the remaining taxa on which the
//       topologies stored for {i,y1,y2,y3} and {j,y1,y2,y3} disagree
//       once i and j are replaced by a common placeholder.
//
// When 2*p1 + p2 <= n-3 the pair can be committed as siblings (a cherry)
// without losing any optimal phylogeny.
struct SiblingsReport {
  int i = 0, j = 0;
  int p1 = 0;
  int p2 = 0;
  bool isSibling = false;
};

namespace detail {

// The taxon paired with `probe` in topology t (t must contain probe).
inline int mate_of(const QuartetTopology& t, int probe) {
  if (t.a == probe) return t.b;
  if (t.b == probe) return t.a;
  if (t.c == probe) return t.d;
  if (t.d == probe) return t.c;
  throw internal_error("mate_of: taxon not in topology");
}

}  // namespace detail

// Runs the sibling test for every unordered pair, in lexicographic pair
// order. Requires a complete quartet set.
inline std::vector<SiblingsReport> detect_siblings(const QuartetSet& q) {
  if (!is_complete(q))
    throw invalid_input("sibling detection requires a complete quartet set");
  int n = q.taxa().size();
  if (n < 4) throw invalid_input("sibling detection requires n >= 4");

  std::vector<int> rest;
  std::vector<SiblingsReport> out;
  out.reserve(static_cast<size_t>(n) * (n - 1) / 2);

  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      rest.clear();
      for (int y = 1; y <= n; ++y)
        if (y != i && y != j) rest.push_back(y);

      SiblingsReport rep;
      rep.i = i;
      rep.j = j;

      // p1: how often the stored topology separates i from j.
      for (size_t u = 0; u < rest.size(); ++u)
        for (size_t v = u + 1; v < rest.size(); ++v) {
          const QuartetTopology* got =
              q.find({i, j, rest[u], rest[v]});
          if (!got) throw internal_error("complete set is missing a quartet");
          if (!(*got == canonical_topology(i, j, rest[u], rest[v])))
            ++rep.p1;
        }

      // p2: 3-subsets of the rest where swapping i for j changes the
      // shape of the stored topology.
      for (size_t u = 0; u < rest.size(); ++u)
        for (size_t v = u + 1; v < rest.size(); ++v)
          for (size_t w = v + 1; w < rest.size(); ++w) {
            const QuartetTopology* ti =
                q.find({i, rest[u], rest[v], rest[w]});
            const QuartetTopology* tj =
                q.find({j, rest[u], rest[v], rest[w]});
            if (!ti || !tj)
              throw internal_error("complete set is missing a quartet");
            if (detail::mate_of(*ti, i) != detail::mate_of(*tj, j)) ++rep.p2;
          }

      rep.isSibling = 2 * rep.p1 + rep.p2 <= n - 3;
      out.push_back(rep);
    }
  }
  return out;
}

}  // namespace mqc
