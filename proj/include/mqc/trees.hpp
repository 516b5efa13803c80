#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <utility>
#include <vector>

#include "mqc/errors.hpp"
#include "mqc/quartets.hpp"
#include "mqc/ultrametric.hpp"

namespace mqc {

// Rooted phylogeny with arbitrary internal degree. Leaves carry a taxon
// index (1-based); internal nodes may carry an integer label (the height
// value a decoded ultrametric matrix assigns to them, largest at the
// root). taxon == 0 marks an internal node, label == 0 means unlabeled.
struct RootedPhylogeny {
  struct Node {
    int parent = -1;
    std::vector<int> children;
    int taxon = 0;
    int label = 0;
  };

  TaxonSet taxa;
  std::vector<Node> nodes;
  int root = -1;

  bool is_leaf(int v) const { return nodes[v].taxon != 0; }

  int add_leaf(int taxon) {
    nodes.push_back(Node{-1, {}, taxon, 0});
    return static_cast<int>(nodes.size()) - 1;
  }

  int add_internal(int label) {
    nodes.push_back(Node{-1, {}, 0, label});
    return static_cast<int>(nodes.size()) - 1;
  }

  void link(int parent, int child) {
    nodes[child].parent = parent;
    nodes[parent].children.push_back(child);
  }
};

// Unrooted phylogeny: leaves are nodes 0..n-1 (node i holds taxon i+1),
// internal nodes follow and have degree exactly 3 once built.
struct UnrootedPhylogeny {
  TaxonSet taxa;
  std::vector<std::vector<int>> adj;

  int n_leaves() const { return taxa.size(); }

  void add_edge(int u, int v) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }

  // Checks leaf/internal degrees and connectivity; throws on violation.
  void validate() const {
    int n = n_leaves();
    if (n < 2) throw internal_error("unrooted tree needs at least 2 leaves");
    size_t expect = n == 2 ? 2 : static_cast<size_t>(2 * n - 2);
    if (adj.size() != expect)
      throw internal_error("unrooted tree has wrong node count");
    for (size_t v = 0; v < adj.size(); ++v) {
      size_t want = v < static_cast<size_t>(n) ? 1 : 3;
      if (n == 2) want = 1;
      if (adj[v].size() != want)
        throw internal_error("unrooted tree has a node of wrong degree");
    }
    std::vector<char> seen(adj.size(), 0);
    std::deque<int> bfs{0};
    seen[0] = 1;
    size_t reached = 1;
    while (!bfs.empty()) {
      int v = bfs.front();
      bfs.pop_front();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          ++reached;
          bfs.push_back(w);
        }
    }
    if (reached != adj.size())
      throw internal_error("unrooted tree is not connected");
  }
};

// Grows an unrooted binary tree by attaching one leaf at a time to an
// existing edge. Both the random generator and the exhaustive enumerator
// use this builder, so an "edge index" means the same thing to both:
// edges are kept in a list; attaching a leaf to edge slot e replaces
// that slot with the half toward its first endpoint and appends the
// other half and the new pendant edge.
class LeafAttachmentBuilder {
 public:
  explicit LeafAttachmentBuilder(int n) : n_(n) {
    if (n < 3) throw invalid_input("leaf attachment builder needs n >= 3");
    int center = n_;  // first internal node id
    edges_ = {{0, center}, {1, center}, {2, center}};
    next_internal_ = center + 1;
    leaves_placed_ = 3;
  }

  int leaves_placed() const { return leaves_placed_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  // Attaches the next leaf (ids 3,4,...,n-1) to the edge in slot e.
  void attach_next_leaf(int e) {
    if (leaves_placed_ >= n_) throw internal_error("all leaves already placed");
    if (e < 0 || e >= edge_count())
      throw invalid_input("edge index out of range");
    int leaf = leaves_placed_++;
    int mid = next_internal_++;
    auto [u, v] = edges_[e];
    edges_[e] = {u, mid};
    edges_.push_back({mid, v});
    edges_.push_back({mid, leaf});
  }

  UnrootedPhylogeny finish(TaxonSet taxa) const {
    if (leaves_placed_ != n_) throw internal_error("not all leaves placed");
    if (taxa.size() != n_) throw invalid_input("taxon count mismatch");
    UnrootedPhylogeny t;
    t.taxa = std::move(taxa);
    t.adj.assign(2 * static_cast<size_t>(n_) - 2, {});
    for (auto [u, v] : edges_) t.add_edge(u, v);
    t.validate();
    return t;
  }

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;
  int next_internal_;
  int leaves_placed_;
};

// Pairwise leaf distances in edge counts; entry [i][j] for taxa i,j
// (1-based). Unit edge lengths.
inline std::vector<std::vector<int>> leaf_distance_matrix(
    const UnrootedPhylogeny& t) {
  int n = t.n_leaves();
  std::vector<std::vector<int>> dist(n + 1, std::vector<int>(n + 1, 0));
  std::vector<int> d(t.adj.size());
  for (int src = 0; src < n; ++src) {
    std::fill(d.begin(), d.end(), -1);
    d[src] = 0;
    std::deque<int> bfs{src};
    while (!bfs.empty()) {
      int v = bfs.front();
      bfs.pop_front();
      for (int w : t.adj[v])
        if (d[w] < 0) {
          d[w] = d[v] + 1;
          bfs.push_back(w);
        }
    }
    for (int j = 0; j < n; ++j) dist[src + 1][j + 1] = d[j];
  }
  return dist;
}

namespace detail {

// In a binary tree exactly one of the three pairings of {w,x,y,z} has a
// strictly smaller distance sum; that pairing is the derived topology.
inline QuartetTopology topology_from_distances(
    const std::vector<std::vector<int>>& dist, int w, int x, int y, int z) {
  int s1 = dist[w][x] + dist[y][z];
  int s2 = dist[w][y] + dist[x][z];
  int s3 = dist[w][z] + dist[x][y];
  int lo = std::min({s1, s2, s3});
  if ((s1 == lo) + (s2 == lo) + (s3 == lo) != 1)
    throw internal_error("quartet does not resolve in a binary tree");
  if (s1 == lo) return canonical_topology(w, x, y, z);
  if (s2 == lo) return canonical_topology(w, y, x, z);
  return canonical_topology(w, z, x, y);
}

}  // namespace detail

// Topology the tree derives for taxa {w,x,y,z}: the pairing whose two
// leaf-to-leaf paths share no vertex.
inline QuartetTopology derive_topology(const UnrootedPhylogeny& t, int w,
                                       int x, int y, int z) {
  std::array<int, 4> s{w, x, y, z};
  std::sort(s.begin(), s.end());
  if (s[0] < 1 || s[3] > t.n_leaves() ||
      std::adjacent_find(s.begin(), s.end()) != s.end())
    throw invalid_input("derive_topology needs four distinct taxa of the tree");
  auto dist = leaf_distance_matrix(t);
  return detail::topology_from_distances(dist, s[0], s[1], s[2], s[3]);
}

// All C(n,4) derived topologies.
inline QuartetSet derive_all(const UnrootedPhylogeny& t) {
  int n = t.n_leaves();
  if (n < 4) throw invalid_input("derive_all needs n >= 4");
  auto dist = leaf_distance_matrix(t);
  QuartetSet q(t.taxa);
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b)
      for (int c = b + 1; c <= n; ++c)
        for (int d = c + 1; d <= n; ++d)
          q.add(detail::topology_from_distances(dist, a, b, c, d));
  return q;
}

// Number of topologies in q that the tree derives. Taxa are matched by
// name, so the two taxon sets may order names differently.
inline int tree_satisfied_count(const UnrootedPhylogeny& t,
                                const QuartetSet& q) {
  int n = t.n_leaves();
  if (q.taxa().size() != n)
    throw invalid_input("tree and quartet set disagree on taxon count");
  std::vector<int> to_tree(n + 1, 0);  // q index -> tree index
  for (int i = 1; i <= n; ++i)
    to_tree[i] = t.taxa.index_of(q.taxa().name(i));
  auto dist = leaf_distance_matrix(t);
  int count = 0;
  for (const auto& qt : q.topologies()) {
    QuartetTopology mapped = canonical_topology(
        to_tree[qt.a], to_tree[qt.b], to_tree[qt.c], to_tree[qt.d]);
    auto s = mapped.subset();
    if (detail::topology_from_distances(dist, s[0], s[1], s[2], s[3]) == mapped)
      ++count;
  }
  return count;
}

// Builds the rooted phylogeny an ultrametric matrix describes: the root
// takes the largest entry as its label and its children are the
// equivalence classes of "M(i,j) < max", each decoded recursively.
// Children are ordered by their smallest taxon index.
inline RootedPhylogeny decode_matrix(const UltrametricMatrix& m,
                                     const TaxonSet& taxa) {
  if (taxa.size() != m.n())
    throw invalid_input("matrix size and taxon count differ");
  if (auto bad = find_ultrametric_violation(m)) {
    auto [i, j, l] = *bad;
    throw invalid_input("matrix is not ultrametric: triple (" + taxa.name(i) +
                        "," + taxa.name(j) + "," + taxa.name(l) +
                        ") attains its maximum only once");
  }

  RootedPhylogeny out;
  out.taxa = taxa;

  std::function<int(const std::vector<int>&)> build =
      [&](const std::vector<int>& members) -> int {
    if (members.size() == 1) return out.add_leaf(members[0]);

    int top = 0;
    for (size_t x = 0; x < members.size(); ++x)
      for (size_t y = x + 1; y < members.size(); ++y)
        top = std::max(top, m.at(members[x], members[y]));

    // Group members joined strictly below the top value.
    std::vector<std::vector<int>> classes;
    std::vector<char> used(members.size(), 0);
    for (size_t x = 0; x < members.size(); ++x) {
      if (used[x]) continue;
      std::vector<int> cls{members[x]};
      used[x] = 1;
      for (size_t k = 0; k < cls.size(); ++k)
        for (size_t y = 0; y < members.size(); ++y)
          if (!used[y] && m.at(cls[k], members[y]) < top) {
            used[y] = 1;
            cls.push_back(members[y]);
          }
      std::sort(cls.begin(), cls.end());
      classes.push_back(std::move(cls));
    }
    std::sort(classes.begin(), classes.end(),
              [](const auto& a, const auto& b) { return a[0] < b[0]; });
    if (classes.size() < 2)
      throw internal_error("matrix decode produced a unary node");

    int node = out.add_internal(top);
    for (const auto& cls : classes) out.link(node, build(cls));
    return node;
  };

  std::vector<int> all;
  for (int i = 1; i <= m.n(); ++i) all.push_back(i);
  out.root = build(all);
  return out;
}

// LCA labels of every taxon pair; the inverse of decode_matrix for
// label-carrying rooted trees.
inline UltrametricMatrix ultrametric_of(const RootedPhylogeny& r) {
  int n = r.taxa.size();
  if (n < 2) throw invalid_input("need at least two taxa");
  std::vector<int> node_of(n + 1, -1);
  std::vector<int> depth(r.nodes.size(), 0);
  std::function<void(int, int)> walk = [&](int v, int d) {
    depth[v] = d;
    if (r.is_leaf(v)) {
      if (r.nodes[v].taxon < 1 || r.nodes[v].taxon > n)
        throw internal_error("leaf taxon out of range");
      node_of[r.nodes[v].taxon] = v;
    }
    for (int c : r.nodes[v].children) walk(c, d + 1);
  };
  walk(r.root, 0);
  for (int i = 1; i <= n; ++i)
    if (node_of[i] < 0) throw invalid_input("tree is missing a taxon leaf");

  UltrametricMatrix m(n);
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      int u = node_of[i], v = node_of[j];
      while (u != v) {
        if (depth[u] < depth[v])
          v = r.nodes[v].parent;
        else
          u = r.nodes[u].parent;
      }
      if (r.nodes[u].label < 1)
        throw invalid_input("internal nodes must carry labels >= 1");
      m.set(i, j, r.nodes[u].label);
    }
  return m;
}

// Turns a rooted phylogeny into an unrooted binary one. Multifurcations
// are resolved deterministically: children are ordered by their smallest
// contained taxon and combined left to right into a caterpillar of
// degree-3 nodes; the root, once binary, is suppressed. Ties broken this
// way never lose a quartet: every topology consistent with the matrix
// that produced the rooted tree is derived by the result.
inline UnrootedPhylogeny unroot(const RootedPhylogeny& r) {
  int n = r.taxa.size();
  if (n < 2) throw invalid_input("unroot needs at least 2 leaves");

  std::vector<int> min_taxon(r.nodes.size(), 0);
  std::function<int(int)> mins = [&](int v) -> int {
    if (r.is_leaf(v)) return min_taxon[v] = r.nodes[v].taxon;
    int best = 0;
    for (int c : r.nodes[v].children) {
      int m = mins(c);
      if (best == 0 || m < best) best = m;
    }
    return min_taxon[v] = best;
  };
  mins(r.root);

  UnrootedPhylogeny out;
  out.taxa = r.taxa;
  out.adj.assign(n == 2 ? 2 : 2 * static_cast<size_t>(n) - 2, {});
  int next_internal = n;
  auto fresh = [&]() -> int {
    if (next_internal >= static_cast<int>(out.adj.size()))
      throw internal_error("unroot allocated too many internal nodes");
    return next_internal++;
  };

  std::function<int(int)> emit = [&](int v) -> int {
    if (r.is_leaf(v)) return r.nodes[v].taxon - 1;
    std::vector<int> kids = r.nodes[v].children;
    if (kids.empty()) throw invalid_input("internal node without children");
    std::sort(kids.begin(), kids.end(),
              [&](int a, int b) { return min_taxon[a] < min_taxon[b]; });
    if (kids.size() == 1) return emit(kids[0]);  // suppress unary nodes
    int acc = emit(kids[0]);
    for (size_t k = 1; k < kids.size(); ++k) {
      int u = fresh();
      out.add_edge(u, acc);
      out.add_edge(u, emit(kids[k]));
      acc = u;
    }
    return acc;
  };

  // Resolve the root like any node but drop the final caterpillar join:
  // connecting the two remaining components suppresses the binary root.
  int root = r.root;
  while (!r.is_leaf(root) && r.nodes[root].children.size() == 1)
    root = r.nodes[root].children[0];
  if (r.is_leaf(root)) throw invalid_input("unroot needs at least 2 leaves");
  std::vector<int> kids = r.nodes[root].children;
  std::sort(kids.begin(), kids.end(),
            [&](int a, int b) { return min_taxon[a] < min_taxon[b]; });
  int acc = emit(kids[0]);
  for (size_t k = 1; k + 1 < kids.size(); ++k) {
    int u = fresh();
    out.add_edge(u, acc);
    out.add_edge(u, emit(kids[k]));
    acc = u;
  }
  out.add_edge(acc, emit(kids.back()));
  out.validate();
  return out;
}

// Leaf-labeled isomorphism: the two trees induce the same set of
// bipartitions. Taxa are matched by name; differing name sets are an
// error.
inline bool trees_isomorphic(const UnrootedPhylogeny& t1,
                             const UnrootedPhylogeny& t2) {
  int n = t1.n_leaves();
  if (n != t2.n_leaves())
    throw invalid_input("isomorphism check needs equal taxon sets");
  if (n > 64) throw invalid_input("isomorphism check supports up to 64 taxa");

  // Map every t2 leaf onto t1's index space.
  std::vector<int> remap(n, 0);  // t2 leaf node -> t1 leaf node
  for (int i = 0; i < n; ++i) {
    int idx = t1.taxa.find(t2.taxa.name(i + 1));
    if (idx == 0) throw invalid_input("isomorphism check needs equal taxon sets");
    remap[i] = idx - 1;
  }

  const std::uint64_t full =
      n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  auto splits = [n, full](const UnrootedPhylogeny& t,
                          const std::vector<int>* leaf_remap) {
    std::vector<std::uint64_t> out;
    // Post-order from leaf 0: each edge contributes the leaf set of its
    // far side, normalized to the side not containing taxon index 0.
    std::function<std::uint64_t(int, int)> walk =
        [&](int v, int parent) -> std::uint64_t {
      std::uint64_t m = 0;
      if (v < n)
        m = std::uint64_t{1} << (leaf_remap ? (*leaf_remap)[v] : v);
      for (int w : t.adj[v])
        if (w != parent) m |= walk(w, v);
      std::uint64_t side = (m & 1) ? full ^ m : m;
      int pop = __builtin_popcountll(side);
      if (pop >= 2 && pop <= n - 2) out.push_back(side);
      return m;
    };
    walk(0, -1);
    std::sort(out.begin(), out.end());
    return out;
  };

  return splits(t1, nullptr) == splits(t2, &remap);
}

}  // namespace mqc
