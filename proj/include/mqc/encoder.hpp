#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mqc/errors.hpp"
#include "mqc/pb.hpp"
#include "mqc/quartets.hpp"
#include "mqc/siblings.hpp"
#include "mqc/ultrametric.hpp"

namespace mqc {

// The three ways a matrix entry is represented:
//   Basic - one-hot value bits with pairwise exactly-one rows, comparators
//           straight over the value bits.
//   Fst   - one-hot value bits whose at-most-one side runs through a
//           sequential counter; comparators read the counter registers.
//   Scd   - binary value bits with an upper-range gate.
enum class ModelKind { Basic, Fst, Scd };

struct ModelVariant {
  ModelKind kind = ModelKind::Fst;
  bool siblings = false;
};

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Basic: return "basic";
    case ModelKind::Fst: return "fst";
    case ModelKind::Scd: return "scd";
  }
  throw internal_error("unknown model kind");
}

inline ModelKind parse_model_kind(const std::string& s) {
  if (s == "basic") return ModelKind::Basic;
  if (s == "fst") return ModelKind::Fst;
  if (s == "scd") return ModelKind::Scd;
  throw invalid_input("unknown model '" + s + "' (expected basic, fst or scd)");
}

inline std::string variant_name(const ModelVariant& v) {
  std::string s = to_string(v.kind);
  if (v.siblings) s += "+trd";
  return s;
}

// What a single solver variable means. Every allocated variable gets a
// role; encode() enforces that no variable is left unexplained.
struct VarRole {
  enum class Kind : unsigned char {
    Unset,
    MatrixBit,    // a=i, b=j, c=bit index (1-based value for one-hot kinds,
                  // power-of-two index for binary)
    CounterReg,   // a=i, b=j, c=register index 1..width
    PrefixReg,    // a=i, b=j, c=prefix length 1..width-1
    ConstTrue,    // pinned true
    CmpAux,       // a,b = pair ids of the comparison being built
    CmpEq,        // a,b = pair ids, unordered (a < b)
    CmpGt,        // a,b = pair ids: value(a) > value(b)
    RangeAux,     // a = pair id (upper-range gate internals)
    RangeGate,    // a = pair id: value(pair) <= upper
    TripleCond,   // a,b,c = taxa of the triple, d = case 1..3
    TopoCond,     // a = topology index (0-based), d = case 1..2
    QuartetFlag,  // a = topology index (0-based)
  };
  Kind kind = Kind::Unset;
  int a = 0, b = 0, c = 0, d = 0;
};

struct VarMap {
  ModelKind kind = ModelKind::Fst;
  bool siblings = false;
  int n = 0;
  int upper = 0;  // matrix entries range over 1..upper
  int width = 0;  // bits per matrix entry
  TaxonSet taxa;
  int num_vars = 0;
  std::vector<pb::UnaryInt> pair_unary;    // basic/fst, indexed by pair id
  std::vector<pb::BinaryInt> pair_binary;  // scd, indexed by pair id
  std::vector<QuartetTopology> topologies;  // canonical order (in-memory only)
  std::vector<pb::Var> quartet_flag;        // one per topology
  std::vector<VarRole> roles;               // 1-based (in-memory only)

  static int pair_count(int n) { return n * (n - 1) / 2; }

  // Lexicographic id of the unordered taxon pair i < j (1-based taxa).
  int pair_id(int i, int j) const {
    if (i < 1 || j <= i || j > n) throw internal_error("bad taxon pair");
    return (i - 1) * n - i * (i - 1) / 2 + (j - i - 1);
  }

  std::pair<int, int> pair_taxa(int id) const {
    for (int i = 1; i < n; ++i) {
      int row = n - i;  // pairs (i, i+1..n)
      if (id < row) return {i, i + 1 + id};
      id -= row;
    }
    throw internal_error("pair id out of range");
  }

  // Reads one matrix entry off a total assignment.
  int entry_value(const std::vector<signed char>& values, int pair) const {
    auto bit = [&](pb::Var v) -> int {
      if (v < 1 || static_cast<size_t>(v) >= values.size() || values[v] < 0)
        throw invalid_input("assignment does not cover variable x" +
                            std::to_string(v));
      return values[v];
    };
    if (kind == ModelKind::Scd) {
      const pb::BinaryInt& x = pair_binary.at(pair);
      int val = 0;
      for (int k = 0; k < x.width(); ++k)
        if (bit(x.bits[k])) val += 1 << k;
      if (val < 1 || val > upper)
        throw invalid_input("matrix entry " + std::to_string(val) +
                            " outside 1.." + std::to_string(upper));
      return val;
    }
    const pb::UnaryInt& x = pair_unary.at(pair);
    int val = 0;
    for (int k = 0; k < x.width(); ++k)
      if (bit(x.bits[k])) {
        if (val != 0) throw invalid_input("one-hot matrix entry set twice");
        val = k + 1;
      }
    if (val == 0) throw invalid_input("one-hot matrix entry never set");
    return val;
  }
};

struct EncodeResult {
  pb::Instance instance;
  VarMap map;
  std::vector<SiblingsReport> sibling_reports;  // populated when requested
  std::vector<std::pair<int, int>> pinned_pairs;  // actually pinned subset
};

namespace detail {

// Tags freshly allocated builder variables with roles, recognizing the
// builder's pinned-true variable when it shows up inside a gate call.
class RoleTagger {
 public:
  RoleTagger(const pb::Builder& b, std::vector<VarRole>& roles)
      : b_(b), roles_(roles) {}

  // Gives every still-untagged variable the aux role.
  void claim(const VarRole& aux) {
    roles_.resize(static_cast<size_t>(b_.num_vars()) + 1);
    for (; next_ <= b_.num_vars(); ++next_) {
      if (next_ == b_.true_var_or_zero())
        roles_[next_] = VarRole{VarRole::Kind::ConstTrue, 0, 0, 0, 0};
      else
        roles_[next_] = aux;
    }
  }

  // Overrides the role of one already-claimed variable (gate outputs).
  void set(pb::Var v, const VarRole& role) {
    if (v < 1 || v >= next_) throw internal_error("role set on unclaimed variable");
    if (roles_[v].kind == VarRole::Kind::ConstTrue) return;
    roles_[v] = role;
  }

 private:
  const pb::Builder& b_;
  std::vector<VarRole>& roles_;
  int next_ = 1;
};

}  // namespace detail

// Builds the optimization instance for a quartet set.
//
// Variable allocation order (fixed, so equal inputs give byte-equal
// files): matrix bits for pairs in lexicographic order; per-pair counter
// registers (fst) or range gates (scd); for fst, the comparator pool over
// every pair-of-pairs sharing exactly one taxon; per-triple condition
// gates in lexicographic triple order; per-topology condition gates in
// canonical topology order; finally one flag per topology. The objective
// is minus the sum of the topology flags, so the optimum equals the
// negated maximum number of simultaneously satisfiable quartets.
inline EncodeResult encode(const QuartetSet& q, const ModelVariant& variant) {
  const TaxonSet& taxa = q.taxa();
  const int n = taxa.size();
  if (n < 4) throw invalid_input("encoding needs at least 4 taxa");
  const int upper = (n + 1) / 2;
  int width = 0;
  if (variant.kind == ModelKind::Scd) {
    while ((1 << width) <= upper) ++width;
  } else {
    width = upper;
  }

  EncodeResult out;
  VarMap& map = out.map;
  map.kind = variant.kind;
  map.siblings = variant.siblings;
  map.n = n;
  map.upper = upper;
  map.width = width;
  map.taxa = taxa;
  map.topologies = q.topologies();

  // Siblings detection runs before any encoding so a bad input fails fast.
  if (variant.siblings) out.sibling_reports = detect_siblings(q);

  pb::Builder b;
  detail::RoleTagger tag(b, map.roles);
  const int P = VarMap::pair_count(n);

  // Phase 1: matrix bits, pairs in lexicographic order.
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      if (variant.kind == ModelKind::Scd)
        map.pair_binary.push_back(b.new_binary(width));
      else
        map.pair_unary.push_back(b.new_unary(width));
      tag.claim({VarRole::Kind::MatrixBit, i, j, 0, 0});
    }
  }
  // Stamp each bit's role with its exact position inside the pair block.
  for (int p = 0; p < P; ++p) {
    auto [i, j] = map.pair_taxa(p);
    if (variant.kind == ModelKind::Scd) {
      const auto& bits = map.pair_binary[p].bits;
      for (int k = 0; k < width; ++k)
        tag.set(bits[k], {VarRole::Kind::MatrixBit, i, j, k, 0});
    } else {
      const auto& bits = map.pair_unary[p].bits;
      for (int k = 0; k < width; ++k)
        tag.set(bits[k], {VarRole::Kind::MatrixBit, i, j, k + 1, 0});
    }
  }

  // Phase 2: per-pair value structure.
  std::vector<pb::CounterRegs> regs;  // fst only
  for (int p = 0; p < P; ++p) {
    auto [i, j] = map.pair_taxa(p);
    switch (variant.kind) {
      case ModelKind::Basic: {
        const pb::UnaryInt& x = map.pair_unary[p];
        std::vector<pb::Lit> lits;
        for (pb::Var v : x.bits) lits.push_back(pb::pos(v));
        b.add_exactly_one(lits);
        // Prefix registers are shared by every comparison that reads this
        // pair on its right-hand side; materializing them here keeps the
        // allocation order independent of which comparisons happen later.
        b.prefix_or(x);
        for (int k = 0; k + 1 < width; ++k)
          tag.claim({VarRole::Kind::PrefixReg, i, j, k + 1, 0});
        break;
      }
      case ModelKind::Fst: {
        const pb::UnaryInt& x = map.pair_unary[p];
        std::vector<pb::Lit> lits;
        for (pb::Var v : x.bits) lits.push_back(pb::pos(v));
        b.add_clause(lits);
        pb::CounterRegs r = b.seq_counter_at_most_one(x);
        for (int k = 0; k < width; ++k)
          tag.claim({VarRole::Kind::CounterReg, i, j, k + 1, 0});
        for (int k = 0; k < width; ++k)
          tag.set(r.regs[k], {VarRole::Kind::CounterReg, i, j, k + 1, 0});
        regs.push_back(std::move(r));
        break;
      }
      case ModelKind::Scd: {
        const pb::BinaryInt& x = map.pair_binary[p];
        std::vector<pb::Lit> lits;
        for (pb::Var v : x.bits) lits.push_back(pb::pos(v));
        b.add_clause(lits);  // value >= 1
        pb::Lit in_range = b.le_const(x, upper);
        tag.claim({VarRole::Kind::RangeAux, p, 0, 0, 0});
        if (in_range.var() != b.true_var_or_zero()) {
          tag.set(in_range.var(), {VarRole::Kind::RangeGate, p, 0, 0, 0});
          b.add_clause({in_range});
        }
        break;
      }
    }
  }

  // Comparison memo tables, keyed by pair ids. For fst the pool below
  // fills them completely; for the other kinds they fill lazily in the
  // deterministic order the later phases ask for them.
  std::map<std::pair<int, int>, pb::Lit> gt_memo;
  std::map<std::pair<int, int>, pb::Lit> eq_memo;

  auto share_one_taxon = [&](int p, int r) {
    auto [a1, a2] = map.pair_taxa(p);
    auto [b1, b2] = map.pair_taxa(r);
    int shared = (a1 == b1) + (a1 == b2) + (a2 == b1) + (a2 == b2);
    return shared == 1;
  };

  // Phase 3 (fst): comparator pool over all pair-of-pairs sharing exactly
  // one taxon. Materializing the pool up front makes the variable and
  // constraint counts a function of n and |Q| alone.
  if (variant.kind == ModelKind::Fst) {
    for (int p = 0; p < P; ++p) {
      for (int r = p + 1; r < P; ++r) {
        if (!share_one_taxon(p, r)) continue;
        pb::Lit lt_pr = b.lt_from_counters(regs[p], regs[r]);
        tag.claim({VarRole::Kind::CmpAux, p, r, 0, 0});
        tag.set(lt_pr.var(), {VarRole::Kind::CmpGt, r, p, 0, 0});
        gt_memo.emplace(std::make_pair(r, p), lt_pr);
        pb::Lit lt_rp = b.lt_from_counters(regs[r], regs[p]);
        tag.claim({VarRole::Kind::CmpAux, p, r, 0, 0});
        tag.set(lt_rp.var(), {VarRole::Kind::CmpGt, p, r, 0, 0});
        gt_memo.emplace(std::make_pair(p, r), lt_rp);
        pb::Lit eq = b.eq_from_counters(regs[p], regs[r]);
        tag.claim({VarRole::Kind::CmpAux, p, r, 0, 0});
        tag.set(eq.var(), {VarRole::Kind::CmpEq, p, r, 0, 0});
        eq_memo.emplace(std::make_pair(p, r), eq);
      }
    }
  }

  auto eq_of = [&](int p, int r) -> pb::Lit {
    auto key = std::minmax(p, r);
    auto it = eq_memo.find({key.first, key.second});
    if (it != eq_memo.end()) return it->second;
    if (variant.kind == ModelKind::Fst)
      throw internal_error("comparison missing from pool");
    pb::Lit lit = variant.kind == ModelKind::Basic
                      ? b.eq_unary(map.pair_unary[key.first],
                                   map.pair_unary[key.second])
                      : b.eq_binary(map.pair_binary[key.first],
                                    map.pair_binary[key.second]);
    tag.claim({VarRole::Kind::CmpAux, key.first, key.second, 0, 0});
    tag.set(lit.var(), {VarRole::Kind::CmpEq, key.first, key.second, 0, 0});
    eq_memo.emplace(std::make_pair(key.first, key.second), lit);
    return lit;
  };

  auto gt_of = [&](int p, int r) -> pb::Lit {  // value(p) > value(r)
    auto it = gt_memo.find({p, r});
    if (it != gt_memo.end()) return it->second;
    if (variant.kind == ModelKind::Fst)
      throw internal_error("comparison missing from pool");
    pb::Lit lit = variant.kind == ModelKind::Basic
                      ? b.gt_unary(map.pair_unary[p], map.pair_unary[r])
                      : b.gt_binary(map.pair_binary[p], map.pair_binary[r]);
    tag.claim({VarRole::Kind::CmpAux, p, r, 0, 0});
    tag.set(lit.var(), {VarRole::Kind::CmpGt, p, r, 0, 0});
    gt_memo.emplace(std::make_pair(p, r), lit);
    return lit;
  };

  // Phase 4: ultrametric structure per taxon triple. Exactly one of the
  // three "two equal entries strictly above the third" cases must hold;
  // the all-equal pattern is excluded on purpose.
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      for (int l = j + 1; l <= n; ++l) {
        int pij = map.pair_id(i, j);
        int pil = map.pair_id(i, l);
        int pjl = map.pair_id(j, l);
        pb::Lit c1 = b.and_gate(eq_of(pij, pil), gt_of(pil, pjl));
        tag.claim({VarRole::Kind::TripleCond, i, j, l, 1});
        pb::Lit c2 = b.and_gate(eq_of(pij, pjl), gt_of(pjl, pil));
        tag.claim({VarRole::Kind::TripleCond, i, j, l, 2});
        pb::Lit c3 = b.and_gate(eq_of(pjl, pil), gt_of(pil, pij));
        tag.claim({VarRole::Kind::TripleCond, i, j, l, 3});
        b.add_clause({c1, c2, c3});
      }
    }
  }

  // Phase 5: per-topology conditions. For [a,b | c,d] the topology holds
  // when the cross entries (a,c) and (b,d) both exceed the inner entry of
  // one side.
  std::vector<std::pair<pb::Lit, pb::Lit>> cases;
  cases.reserve(map.topologies.size());
  for (size_t t = 0; t < map.topologies.size(); ++t) {
    const QuartetTopology& topo = map.topologies[t];
    int pab = map.pair_id(topo.a, topo.b);
    int pcd = map.pair_id(topo.c, topo.d);
    int pac = map.pair_id(topo.a, topo.c);
    // Canonical order guarantees a < b, c < d, a < c, but leaves b and d
    // unordered; the matrix is symmetric, so look the pair up sorted.
    int pbd = map.pair_id(std::min(topo.b, topo.d), std::max(topo.b, topo.d));
    pb::Lit d1 = b.and_gate(gt_of(pac, pab), gt_of(pbd, pab));
    tag.claim({VarRole::Kind::TopoCond, static_cast<int>(t), 0, 0, 1});
    pb::Lit d2 = b.and_gate(gt_of(pac, pcd), gt_of(pbd, pcd));
    tag.claim({VarRole::Kind::TopoCond, static_cast<int>(t), 0, 0, 2});
    cases.emplace_back(d1, d2);
  }

  // Phase 6: one flag per topology, allocated after everything else so
  // the flags sit in one contiguous block at the top of the numbering.
  for (size_t t = 0; t < map.topologies.size(); ++t) {
    pb::Lit qt = b.or_gate(cases[t].first, cases[t].second);
    tag.claim({VarRole::Kind::QuartetFlag, static_cast<int>(t), 0, 0, 0});
    map.quartet_flag.push_back(qt.var());
  }

  // Phase 7: objective.
  std::vector<pb::Term> objective;
  objective.reserve(map.quartet_flag.size());
  for (pb::Var v : map.quartet_flag) objective.push_back({-1, pb::pos(v)});
  b.set_objective(objective);

  // Phase 8: sibling pairs pin their matrix entry to 1. The counting test
  // is a per-pair guarantee, and on noisy input it can flag two pairs that
  // share a taxon; no binary tree realizes both, and the triple rows above
  // would go infeasible. Pin a maximal conflict-free subset, first flagged
  // first. On clean input the flagged pairs are the tree's cherries, which
  // are disjoint, so nothing is dropped.
  {
    std::vector<char> used(static_cast<size_t>(n) + 1, 0);
    for (const SiblingsReport& rep : out.sibling_reports) {
      if (!rep.isSibling || used[rep.i] || used[rep.j]) continue;
      used[rep.i] = used[rep.j] = 1;
      out.pinned_pairs.emplace_back(rep.i, rep.j);
      int p = map.pair_id(rep.i, rep.j);
      const std::vector<pb::Var>& bits = variant.kind == ModelKind::Scd
                                             ? map.pair_binary[p].bits
                                             : map.pair_unary[p].bits;
      b.add_clause({pb::pos(bits[0])});
      for (size_t k = 1; k < bits.size(); ++k)
        b.add_clause({pb::neg(bits[k])});
    }
  }

  map.num_vars = b.num_vars();
  out.instance = b.take();
  out.instance.validate();
  map.roles.resize(static_cast<size_t>(map.num_vars) + 1);
  for (int v = 1; v <= map.num_vars; ++v)
    if (map.roles[v].kind == VarRole::Kind::Unset)
      throw internal_error("variable x" + std::to_string(v) +
                           " was allocated without a role");
  return out;
}

inline EncodeResult encode(const QuartetSet& q, ModelKind kind,
                           bool siblings = false) {
  return encode(q, ModelVariant{kind, siblings});
}

// A solved assignment read back through the map.
struct DecodedAssignment {
  UltrametricMatrix matrix;
  std::vector<char> satisfied;  // one flag per topology, map order
  int satisfied_count = 0;
};

inline DecodedAssignment decode_assignment(
    const VarMap& map, const std::vector<signed char>& values) {
  DecodedAssignment out{UltrametricMatrix(map.n), {}, 0};
  const int P = VarMap::pair_count(map.n);
  for (int p = 0; p < P; ++p) {
    auto [i, j] = map.pair_taxa(p);
    out.matrix.set(i, j, map.entry_value(values, p));
  }
  out.satisfied.reserve(map.quartet_flag.size());
  for (pb::Var v : map.quartet_flag) {
    if (v < 1 || static_cast<size_t>(v) >= values.size() || values[v] < 0)
      throw invalid_input("assignment does not cover variable x" +
                          std::to_string(v));
    out.satisfied.push_back(values[v] == 1 ? 1 : 0);
    out.satisfied_count += values[v] == 1;
  }
  return out;
}

// Sidecar map file: enough to read a solver assignment back into a matrix
// and satisfied-flag vector without re-encoding. Roles and topology
// identities stay in memory only.
inline void write_map(std::ostream& os, const VarMap& map) {
  os << "qmcmap 1\n";
  os << "kind " << to_string(map.kind) << "\n";
  os << "siblings " << (map.siblings ? 1 : 0) << "\n";
  os << "n " << map.n << "\n";
  os << "upper " << map.upper << "\n";
  os << "width " << map.width << "\n";
  os << "numvars " << map.num_vars << "\n";
  os << "taxa";
  for (int i = 1; i <= map.n; ++i) os << ' ' << map.taxa.name(i);
  os << "\n";
  const int P = VarMap::pair_count(map.n);
  for (int p = 0; p < P; ++p) {
    auto [i, j] = map.pair_taxa(p);
    if (map.kind == ModelKind::Scd) {
      for (int k = 0; k < map.width; ++k)
        os << "M " << i << ' ' << j << ' ' << k << ' '
           << map.pair_binary[p].bits[k] << "\n";
    } else {
      for (int k = 0; k < map.width; ++k)
        os << "M " << i << ' ' << j << ' ' << k + 1 << ' '
           << map.pair_unary[p].bits[k] << "\n";
    }
  }
  for (size_t t = 0; t < map.quartet_flag.size(); ++t)
    os << "q " << t + 1 << ' ' << map.quartet_flag[t] << "\n";
}

inline std::string write_map(const VarMap& map) {
  std::ostringstream os;
  write_map(os, map);
  return os.str();
}

inline VarMap read_map(std::istream& is) {
  VarMap map;
  std::string line;
  int lineno = 0;

  auto next_line = [&](std::istringstream& ls) {
    while (std::getline(is, line)) {
      ++lineno;
      ls.clear();
      ls.str(line);
      std::string probe;
      if (ls >> probe) {
        ls.clear();
        ls.str(line);
        return true;
      }
    }
    return false;
  };

  auto expect_int = [&](std::istringstream& ls, const char* what) {
    long long v;
    if (!(ls >> v)) throw parse_error(std::string("expected ") + what, lineno);
    return v;
  };

  std::istringstream ls;
  if (!next_line(ls)) throw parse_error("empty map file", lineno);
  std::string tok, ver;
  ls >> tok >> ver;
  if (tok != "qmcmap" || ver != "1")
    throw parse_error("map file must start with 'qmcmap 1'", lineno);

  auto header = [&](const char* key) -> std::istringstream& {
    if (!next_line(ls)) throw parse_error("map file truncated", lineno);
    std::string k;
    ls >> k;
    if (k != key)
      throw parse_error("expected '" + std::string(key) + "' line, got '" + k +
                            "'",
                        lineno);
    return ls;
  };

  {
    auto& s = header("kind");
    std::string k;
    s >> k;
    map.kind = parse_model_kind(k);
  }
  map.siblings = expect_int(header("siblings"), "0 or 1") != 0;
  map.n = static_cast<int>(expect_int(header("n"), "taxon count"));
  map.upper = static_cast<int>(expect_int(header("upper"), "entry upper bound"));
  map.width = static_cast<int>(expect_int(header("width"), "bit width"));
  map.num_vars = static_cast<int>(expect_int(header("numvars"), "variable count"));
  if (map.n < 4 || map.upper < 1 || map.width < 1 || map.num_vars < 1)
    throw parse_error("map header values out of range", lineno);
  {
    auto& s = header("taxa");
    std::vector<std::string> names;
    std::string name;
    while (s >> name) names.push_back(name);
    if (static_cast<int>(names.size()) != map.n)
      throw parse_error("taxa line must list exactly n names", lineno);
    try {
      map.taxa = TaxonSet(names);
    } catch (const invalid_input& e) {
      throw parse_error(e.what(), lineno);
    }
  }

  const int P = VarMap::pair_count(map.n);
  if (map.kind == ModelKind::Scd)
    map.pair_binary.assign(P, pb::BinaryInt{std::vector<pb::Var>(map.width, 0)});
  else
    map.pair_unary.assign(P, pb::UnaryInt{std::vector<pb::Var>(map.width, 0)});

  auto check_var = [&](long long v) {
    if (v < 1 || v > map.num_vars)
      throw parse_error("variable x" + std::to_string(v) + " outside 1.." +
                            std::to_string(map.num_vars),
                        lineno);
    return static_cast<pb::Var>(v);
  };

  while (next_line(ls)) {
    std::string kind;
    ls >> kind;
    if (kind == "M") {
      int i = static_cast<int>(expect_int(ls, "taxon index"));
      int j = static_cast<int>(expect_int(ls, "taxon index"));
      int k = static_cast<int>(expect_int(ls, "bit index"));
      pb::Var v = check_var(expect_int(ls, "variable index"));
      if (i < 1 || j <= i || j > map.n)
        throw parse_error("matrix record names a bad taxon pair", lineno);
      int p = map.pair_id(i, j);
      int slot = map.kind == ModelKind::Scd ? k : k - 1;
      if (slot < 0 || slot >= map.width)
        throw parse_error("matrix record bit index out of range", lineno);
      pb::Var& cell = map.kind == ModelKind::Scd
                          ? map.pair_binary[p].bits[slot]
                          : map.pair_unary[p].bits[slot];
      if (cell != 0) throw parse_error("duplicate matrix record", lineno);
      cell = v;
    } else if (kind == "q") {
      long long t = expect_int(ls, "topology index");
      pb::Var v = check_var(expect_int(ls, "variable index"));
      if (t != static_cast<long long>(map.quartet_flag.size()) + 1)
        throw parse_error("topology records must appear in order 1..K",
                          lineno);
      map.quartet_flag.push_back(v);
    } else {
      throw parse_error("unknown map record '" + kind + "'", lineno);
    }
  }

  for (int p = 0; p < P; ++p) {
    const std::vector<pb::Var>& bits = map.kind == ModelKind::Scd
                                           ? map.pair_binary[p].bits
                                           : map.pair_unary[p].bits;
    for (int k = 0; k < map.width; ++k)
      if (bits[k] == 0) {
        auto [i, j] = map.pair_taxa(p);
        throw parse_error("map is missing a matrix record for pair (" +
                              std::to_string(i) + "," + std::to_string(j) + ")",
                          lineno);
      }
  }
  return map;
}

inline VarMap read_map(const std::string& text) {
  std::istringstream is(text);
  return read_map(is);
}

}  // namespace mqc
