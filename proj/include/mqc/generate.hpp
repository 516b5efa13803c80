#pragma once

#include <cstdint>
#include <vector>

#include "mqc/errors.hpp"
#include "mqc/quartets.hpp"
#include "mqc/trees.hpp"

namespace mqc {

// 64-bit linear congruential generator. Fixed multiplier/increment and
// high-32-bit output make every draw bit-reproducible across platforms.
class Lcg {
 public:
  explicit Lcg(std::uint64_t seed) : state_(seed) {}

  std::uint32_t next_u32() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<std::uint32_t>(state_ >> 32);
  }

  // Uniform draw in [0, m) by the multiply-shift method.
  std::uint32_t below(std::uint32_t m) {
    if (m == 0) throw internal_error("empty draw range");
    return static_cast<std::uint32_t>(
        (static_cast<std::uint64_t>(next_u32()) * m) >> 32);
  }

 private:
  std::uint64_t state_;
};

// Parameters of one generated benchmark instance.
struct GenSpec {
  int n = 0;                  // taxon count, >= 4
  std::uint64_t seed = 0;     // PRNG seed
  int alterPercent = 0;       // 0..100
};

inline void validate(const GenSpec& s) {
  if (s.n < 4) throw invalid_input("instance generation needs n >= 4");
  if (s.alterPercent < 0 || s.alterPercent > 100)
    throw invalid_input("alteration percentage must be in 0..100");
}

// Uniformly random unrooted binary tree on taxa t1..tn: starting from
// the 3-leaf star, each next leaf attaches to an edge drawn uniformly
// from the current edge list (2k-3 edges when k leaves are placed).
// Deterministic for a fixed seed; the draw stream starts at spec.seed.
inline UnrootedPhylogeny random_tree(const GenSpec& spec) {
  validate(spec);
  Lcg rng(spec.seed);
  LeafAttachmentBuilder b(spec.n);
  while (b.leaves_placed() < spec.n)
    b.attach_next_leaf(static_cast<int>(rng.below(b.edge_count())));
  return b.finish(default_taxa(spec.n));
}

// Replaces exactly floor(alterPercent * |q| / 100) topologies with an
// alternative over the same 4-subset. Selection is a Fisher-Yates prefix
// over the canonical order of q; each selected topology is swapped for
// one of its two alternatives, drawn uniformly. The draw stream starts
// at spec.seed (independent of the tree-generation stream). The result
// stays complete when q was complete.
inline QuartetSet alter_quartets(const QuartetSet& q, const GenSpec& spec) {
  validate(spec);
  Lcg rng(spec.seed);
  std::vector<QuartetTopology> order = q.topologies();
  const std::uint32_t total = static_cast<std::uint32_t>(order.size());
  const std::uint32_t picks = static_cast<std::uint32_t>(
      static_cast<std::uint64_t>(spec.alterPercent) * total / 100);

  QuartetSet out = q;
  for (std::uint32_t i = 0; i < picks; ++i) {
    std::uint32_t j = i + rng.below(total - i);
    std::swap(order[i], order[j]);
    auto alts = alternatives_of(order[i]);
    out.replace(alts[rng.below(2)]);
  }
  return out;
}

// Count of topologies the alteration will replace for a given size.
inline int altered_count(int setSize, int alterPercent) {
  return static_cast<int>(static_cast<std::int64_t>(alterPercent) * setSize /
                          100);
}

}  // namespace mqc
