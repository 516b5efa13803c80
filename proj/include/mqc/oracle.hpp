#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "mqc/errors.hpp"
#include "mqc/pb.hpp"
#include "mqc/quartets.hpp"
#include "mqc/solver.hpp"
#include "mqc/trees.hpp"

namespace mqc {

// Reference answers by sheer enumeration. Everything here favors being
// obviously correct over being fast; sizes are capped accordingly.

struct OracleResult {
  int optimum = 0;               // largest satisfied-count over all trees
  long long trees_examined = 0;  // (2n-5)!!
  UnrootedPhylogeny witness;     // first tree attaining the optimum
};

// Walks every unrooted binary tree shape exactly once: leaf k (taxon
// k+1) can attach to any of the 2k-3 edges of the partial tree, so the
// trees correspond to mixed-radix codes with digit k in [0, 2k-3). The
// code's last digit moves fastest. The witness is the first maximum in
// that order.
inline OracleResult mqc_oracle(const QuartetSet& q) {
  const int n = q.taxa().size();
  if (n < 4) throw invalid_input("oracle needs at least 4 taxa");
  if (n > 9)
    throw invalid_input("oracle enumerates all trees only up to 9 taxa");

  const std::vector<QuartetTopology> topos = q.topologies();
  std::vector<std::array<int, 4>> subsets;
  subsets.reserve(topos.size());
  for (const auto& t : topos) subsets.push_back(t.subset());

  const int digits = n - 3;  // attachment choices for leaves 3..n-1
  std::vector<int> radix(digits), code(digits, 0);
  for (int k = 0; k < digits; ++k) radix[k] = 2 * (k + 4) - 5;

  OracleResult out;
  out.optimum = -1;
  while (true) {
    LeafAttachmentBuilder builder(n);
    for (int k = 0; k < digits; ++k) builder.attach_next_leaf(code[k]);
    UnrootedPhylogeny tree = builder.finish(q.taxa());
    ++out.trees_examined;

    auto dist = leaf_distance_matrix(tree);
    int count = 0;
    for (size_t t = 0; t < topos.size(); ++t) {
      const auto& s = subsets[t];
      if (detail::topology_from_distances(dist, s[0], s[1], s[2], s[3]) ==
          topos[t])
        ++count;
    }
    if (count > out.optimum) {
      out.optimum = count;
      out.witness = std::move(tree);
    }

    int k = digits - 1;
    while (k >= 0 && ++code[k] == radix[k]) code[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

struct PbEnumResult {
  SolveStatus status = SolveStatus::Unsatisfiable;
  std::vector<signed char> values;  // 1-based, set when feasible
  long long objective = 0;
  std::uint64_t assignments_examined = 0;
};

// Checks every assignment of up to 20 variables, walking them in Gray
// order so each step flips one variable and updates running sums. The
// reported assignment is the first optimum in that order.
inline PbEnumResult enumerate_pb(const pb::Instance& inst) {
  const int nv = inst.num_vars;
  if (nv > 20)
    throw invalid_input("exhaustive enumeration supports up to 20 variables");
  inst.validate();

  const size_t nc = inst.constraints.size();
  std::vector<long long> sum(nc, 0), bound(nc, 0);
  // delta[v]: per-constraint change when v flips false -> true.
  std::vector<std::vector<std::pair<size_t, long long>>> delta(nv + 1);
  for (size_t ci = 0; ci < nc; ++ci) {
    bound[ci] = inst.constraints[ci].bound;
    for (const pb::Term& t : inst.constraints[ci].terms) {
      if (t.lit.negated()) {
        sum[ci] += t.coef;  // true while the variable is false
        delta[t.lit.var()].push_back({ci, -t.coef});
      } else {
        delta[t.lit.var()].push_back({ci, t.coef});
      }
    }
  }
  std::vector<long long> obj_delta(nv + 1, 0);
  for (const pb::Term& t : inst.objective) obj_delta[t.lit.var()] += t.coef;

  size_t violated = 0;
  for (size_t ci = 0; ci < nc; ++ci) violated += sum[ci] < bound[ci];
  long long obj = 0;

  PbEnumResult out;
  bool have = false;
  long long best = 0;
  std::uint32_t best_mask = 0, mask = 0;

  const std::uint64_t total = std::uint64_t{1} << nv;
  for (std::uint64_t i = 0;; ++i) {
    if (violated == 0 && (!have || obj < best)) {
      have = true;
      best = obj;
      best_mask = mask;
    }
    if (i + 1 == total) break;
    int bit = __builtin_ctzll(i + 1);  // Gray neighbor: one flipped bit
    int v = bit + 1;
    mask ^= std::uint32_t{1} << bit;
    bool now_true = (mask >> bit) & 1;
    for (auto [ci, d] : delta[v]) {
      bool was_bad = sum[ci] < bound[ci];
      sum[ci] += now_true ? d : -d;
      violated += (sum[ci] < bound[ci]) - was_bad;
    }
    obj += now_true ? obj_delta[v] : -obj_delta[v];
  }

  out.assignments_examined = total;
  if (!have) {
    out.status = SolveStatus::Unsatisfiable;
    return out;
  }
  out.status = SolveStatus::Optimal;
  out.objective = best;
  out.values.assign(nv + 1, -1);
  for (int v = 1; v <= nv; ++v)
    out.values[v] = static_cast<signed char>((best_mask >> (v - 1)) & 1);
  return out;
}

}  // namespace mqc
