#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <vector>

#include "mqc/errors.hpp"
#include "mqc/quartets.hpp"

namespace mqc {

// Symmetric matrix of positive integers over taxa 1..n with an implicit
// zero diagonal. Off-diagonal entries are the labels of pairwise lowest
// common ancestors in some rooted phylogeny once the matrix is
// ultrametric; the type itself only enforces symmetry and positivity so
// that non-ultrametric candidates can be represented and rejected.
class UltrametricMatrix {
 public:
  explicit UltrametricMatrix(int n, int fill = 1) : n_(n) {
    if (n < 1) throw invalid_input("matrix needs at least one taxon");
    if (fill < 1) throw invalid_input("matrix entries must be >= 1");
    v_.assign(static_cast<size_t>(n) * (n - 1) / 2, fill);
  }

  int n() const { return n_; }

  int at(int i, int j) const { return v_[slot(i, j)]; }

  void set(int i, int j, int value) {
    if (value < 1) throw invalid_input("matrix entries must be >= 1");
    v_[slot(i, j)] = value;
  }

  int max_entry() const { return *std::max_element(v_.begin(), v_.end()); }

  bool operator==(const UltrametricMatrix& o) const {
    return n_ == o.n_ && v_ == o.v_;
  }

 private:
  size_t slot(int i, int j) const {
    if (i < 1 || j < 1 || i > n_ || j > n_ || i == j)
      throw invalid_input("matrix index out of range");
    if (i > j) std::swap(i, j);
    // Row-major upper triangle: row i holds entries (i,i+1)..(i,n).
    return static_cast<size_t>(i - 1) * n_ - static_cast<size_t>(i) * (i - 1) / 2 +
           (j - i - 1);
  }

  int n_;
  std::vector<int> v_;
};

// First triple i<j<l whose maximum pairwise entry is attained only once,
// if any. An ultrametric matrix has none: in every triple the largest
// entry ties with at least one other.
inline std::optional<std::array<int, 3>> find_ultrametric_violation(
    const UltrametricMatrix& m) {
  int n = m.n();
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      for (int l = j + 1; l <= n; ++l) {
        int ij = m.at(i, j), il = m.at(i, l), jl = m.at(j, l);
        int top = std::max({ij, il, jl});
        int hits = (ij == top) + (il == top) + (jl == top);
        if (hits < 2) return std::array<int, 3>{i, j, l};
      }
  return std::nullopt;
}

inline bool is_ultrametric(const UltrametricMatrix& m) {
  return !find_ultrametric_violation(m).has_value();
}

// True iff topology [i,j | l,m] agrees with the matrix: either both
// cross entries M(i,l), M(j,m) exceed M(i,j), or both exceed M(l,m).
// For an ultrametric matrix this is exactly "the phylogeny the matrix
// describes derives this topology".
inline bool matrix_consistency(const UltrametricMatrix& mat,
                               const QuartetTopology& t) {
  QuartetTopology ct = canonical_topology(t);
  int ij = mat.at(ct.a, ct.b);
  int lm = mat.at(ct.c, ct.d);
  int il = mat.at(ct.a, ct.c);
  int jm = mat.at(ct.b, ct.d);
  return (il > ij && jm > ij) || (il > lm && jm > lm);
}

inline int matrix_satisfied_count(const UltrametricMatrix& mat,
                                  const QuartetSet& q) {
  int count = 0;
  for (const auto& t : q.topologies())
    if (matrix_consistency(mat, t)) ++count;
  return count;
}

}  // namespace mqc
