#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mqc/errors.hpp"

namespace mqc::pb {

using Var = int;  // 1-based

// A possibly negated variable. code > 0 is the variable itself,
// code < 0 its negation.
struct Lit {
  int code = 0;

  static Lit of(Var v, bool negated = false) {
    if (v < 1) throw internal_error("literal over non-positive variable");
    return Lit{negated ? -v : v};
  }

  Var var() const { return code < 0 ? -code : code; }
  bool negated() const { return code < 0; }
  Lit operator~() const { return Lit{-code}; }
  bool operator==(const Lit& o) const { return code == o.code; }
};

inline Lit pos(Var v) { return Lit::of(v, false); }
inline Lit neg(Var v) { return Lit::of(v, true); }

struct Term {
  long long coef = 0;
  Lit lit;
};

enum class Rel { Ge, Le, Eq };

// Normalized linear constraint: sum of coef*lit >= bound with all
// coefficients positive, at most one term per variable, terms sorted by
// variable index.
struct Constraint {
  std::vector<Term> terms;
  long long bound = 0;
};

// Rewrites arbitrary >= terms into the normalized form: merges repeated
// variables, folds x and ~x pairs into the bound, flips negative
// coefficients onto negated literals, drops zero coefficients, sorts.
// Idempotent, and preserves the satisfying set exactly.
inline Constraint normalize_ge(const std::vector<Term>& terms,
                               long long bound) {
  std::map<Var, std::pair<long long, long long>> acc;  // var -> (on x, on ~x)
  for (const Term& t : terms) {
    if (t.lit.code == 0) throw invalid_input("constraint term with null literal");
    auto& slot = acc[t.lit.var()];
    (t.lit.negated() ? slot.second : slot.first) += t.coef;
  }
  Constraint out;
  for (auto& [v, cd] : acc) {
    auto [c_pos, c_neg] = cd;
    // c_pos*x + c_neg*~x == c_neg + (c_pos - c_neg)*x
    bound -= c_neg;
    long long net = c_pos - c_neg;
    if (net > 0) {
      out.terms.push_back({net, pos(v)});
    } else if (net < 0) {
      // net*x == -net*~x + net
      bound -= net;
      out.terms.push_back({-net, neg(v)});
    }
  }
  out.bound = bound;
  return out;
}

inline bool eval(const Constraint& c,
                 const std::vector<signed char>& values) {
  long long sum = 0;
  for (const Term& t : c.terms) {
    signed char v = values[t.lit.var()];
    if (v < 0) throw invalid_input("constraint evaluation needs a total assignment");
    if ((v == 1) != t.lit.negated()) sum += t.coef;
  }
  return sum >= c.bound;
}

// A pseudo-Boolean optimization instance: minimize the objective subject
// to the constraints. Objective terms use positive literals only (their
// coefficients may be negative), so files and reported optima agree.
struct Instance {
  int num_vars = 0;
  std::vector<Constraint> constraints;
  std::vector<Term> objective;

  void check_var(Var v) const {
    if (v < 1 || v > num_vars)
      throw invalid_input("literal references variable x" + std::to_string(v) +
                          " outside 1.." + std::to_string(num_vars));
  }

  void validate() const {
    for (const auto& c : constraints)
      for (const auto& t : c.terms) check_var(t.lit.var());
    for (const auto& t : objective) {
      check_var(t.lit.var());
      if (t.lit.negated())
        throw invalid_input("objective terms must use positive literals");
    }
  }
};

inline long long eval_objective(const Instance& inst,
                                const std::vector<signed char>& values) {
  long long sum = 0;
  for (const Term& t : inst.objective)
    if (values[t.lit.var()] == 1) sum += t.coef;
  return sum;
}

// Encodings of a small integer as Boolean variables.
//
// UnaryInt: one-hot over values 1..width; bits[k-1] set <=> value k.
// BinaryInt: bits[k] weighted 2^k; value in 0..2^width-1.
// CounterRegs: regs[k-1] <=> (value <= k), the prefix form produced by
// the sequential counter; a step function that rises at the value.
struct UnaryInt {
  std::vector<Var> bits;
  int width() const { return static_cast<int>(bits.size()); }
};

struct BinaryInt {
  std::vector<Var> bits;
  int width() const { return static_cast<int>(bits.size()); }
};

struct CounterRegs {
  std::vector<Var> regs;
  int width() const { return static_cast<int>(regs.size()); }
};

// Owns one instance under construction: allocates variables, adds
// constraints, and builds reified circuits on top. Gate outputs are
// always fresh variables constrained from both sides, so a gate's output
// is uniquely forced by its inputs in every satisfying assignment.
class Builder {
 public:
  Var new_var() { return ++inst_.num_vars; }
  int num_vars() const { return inst_.num_vars; }

  void add(Rel rel, const std::vector<Term>& terms, long long bound) {
    switch (rel) {
      case Rel::Ge:
        push(normalize_ge(terms, bound));
        break;
      case Rel::Le: {
        std::vector<Term> flip;
        flip.reserve(terms.size());
        for (const Term& t : terms) flip.push_back({-t.coef, t.lit});
        push(normalize_ge(flip, -bound));
        break;
      }
      case Rel::Eq:
        add(Rel::Ge, terms, bound);
        add(Rel::Le, terms, bound);
        break;
    }
  }

  void add_ge(const std::vector<Term>& terms, long long bound) {
    add(Rel::Ge, terms, bound);
  }

  void add_clause(const std::vector<Lit>& lits) {
    std::vector<Term> terms;
    terms.reserve(lits.size());
    for (Lit l : lits) terms.push_back({1, l});
    add_ge(terms, 1);
  }

  // A variable pinned to true, allocated on first use.
  Lit true_lit() {
    if (true_var_ == 0) {
      true_var_ = new_var();
      add_clause({pos(true_var_)});
    }
    return pos(true_var_);
  }

  bool has_true_lit() const { return true_var_ != 0; }
  Var true_var_or_zero() const { return true_var_; }

  // g <=> AND(inputs). Two rows: sum(in) + w*~g >= w  and  g + sum(~in) >= 1.
  Lit and_gate(const std::vector<Lit>& in) {
    if (in.empty()) throw invalid_input("and gate needs at least one input");
    Var g = new_var();
    std::vector<Term> fwd;
    fwd.reserve(in.size() + 1);
    for (Lit l : in) fwd.push_back({1, l});
    fwd.push_back({static_cast<long long>(in.size()), neg(g)});
    add_ge(fwd, static_cast<long long>(in.size()));
    std::vector<Term> bwd;
    bwd.reserve(in.size() + 1);
    bwd.push_back({1, pos(g)});
    for (Lit l : in) bwd.push_back({1, ~l});
    add_ge(bwd, 1);
    return pos(g);
  }

  Lit and_gate(Lit a, Lit b) { return and_gate(std::vector<Lit>{a, b}); }

  // g <=> OR(inputs). Two rows: w*g + sum(~in) >= w  and  ~g + sum(in) >= 1.
  Lit or_gate(const std::vector<Lit>& in) {
    if (in.empty()) throw invalid_input("or gate needs at least one input");
    Var g = new_var();
    std::vector<Term> fwd;
    fwd.reserve(in.size() + 1);
    fwd.push_back({static_cast<long long>(in.size()), pos(g)});
    for (Lit l : in) fwd.push_back({1, ~l});
    add_ge(fwd, static_cast<long long>(in.size()));
    std::vector<Term> bwd;
    bwd.reserve(in.size() + 1);
    bwd.push_back({1, neg(g)});
    for (Lit l : in) bwd.push_back({1, l});
    add_ge(bwd, 1);
    return pos(g);
  }

  Lit or_gate(Lit a, Lit b) { return or_gate(std::vector<Lit>{a, b}); }

  // g <=> (a == b).
  Lit xnor_gate(Lit a, Lit b) {
    Var g = new_var();
    add_clause({~a, ~b, pos(g)});
    add_clause({a, b, pos(g)});
    add_clause({~a, b, neg(g)});
    add_clause({a, ~b, neg(g)});
    return pos(g);
  }

  UnaryInt new_unary(int width) {
    UnaryInt x;
    for (int k = 0; k < width; ++k) x.bits.push_back(new_var());
    return x;
  }

  BinaryInt new_binary(int width) {
    BinaryInt x;
    for (int k = 0; k < width; ++k) x.bits.push_back(new_var());
    return x;
  }

  // sum(lits) >= 1 and sum(lits) <= 1 as two rows.
  void add_exactly_one(const std::vector<Lit>& lits) {
    std::vector<Term> terms;
    for (Lit l : lits) terms.push_back({1, l});
    add(Rel::Ge, terms, 1);
    add(Rel::Le, terms, 1);
  }

  // Sinz sequential counter restricted to the at-most-one case, with the
  // register chain constrained from both sides so that regs[k-1] is
  // exactly the prefix OR x_1|...|x_k. With the caller's at-least-one
  // row this makes regs a step function rising at the selected value,
  // which is what the register-based comparators rely on.
  CounterRegs seq_counter_at_most_one(const UnaryInt& x) {
    int w = x.width();
    if (w < 1) throw invalid_input("counter needs at least one input bit");
    CounterRegs s;
    for (int k = 0; k < w; ++k) s.regs.push_back(new_var());
    add_clause({neg(x.bits[0]), pos(s.regs[0])});
    add_clause({pos(x.bits[0]), neg(s.regs[0])});
    for (int k = 1; k < w; ++k) {
      add_clause({neg(x.bits[k]), pos(s.regs[k])});
      add_clause({neg(s.regs[k - 1]), pos(s.regs[k])});
      add_clause({neg(s.regs[k]), pos(x.bits[k]), pos(s.regs[k - 1])});
      add_clause({neg(x.bits[k]), neg(s.regs[k - 1])});
    }
    return s;
  }

  // Reified prefix ORs of a one-hot vector: element k-1 is
  // y_1 | ... | y_k, for k = 1..width-1. Memoized per bit vector.
  const std::vector<Lit>& prefix_or(const UnaryInt& y) {
    auto it = prefix_memo_.find(y.bits);
    if (it != prefix_memo_.end()) return it->second;
    std::vector<Lit> p;
    for (int k = 0; k + 1 < y.width(); ++k) {
      if (k == 0)
        p.push_back(or_gate(std::vector<Lit>{pos(y.bits[0])}));
      else
        p.push_back(or_gate(p.back(), pos(y.bits[k])));
    }
    return prefix_memo_.emplace(y.bits, std::move(p)).first->second;
  }

  // value(x) == value(y) for one-hot x, y: OR over AND(x_k, y_k).
  Lit eq_unary(const UnaryInt& x, const UnaryInt& y) {
    if (x.width() != y.width())
      throw invalid_input("comparator widths differ");
    std::vector<Lit> terms;
    for (int k = 0; k < x.width(); ++k)
      terms.push_back(and_gate(pos(x.bits[k]), pos(y.bits[k])));
    return or_gate(terms);
  }

  // value(x) > value(y) for one-hot x, y: OR over AND(x_k, prefix(y)_{k-1}).
  Lit gt_unary(const UnaryInt& x, const UnaryInt& y) {
    if (x.width() != y.width())
      throw invalid_input("comparator widths differ");
    if (x.width() == 1) return ~true_lit();  // equal single values: never >
    const std::vector<Lit>& p = prefix_or(y);
    std::vector<Lit> terms;
    for (int k = 1; k < x.width(); ++k)
      terms.push_back(and_gate(pos(x.bits[k]), p[k - 1]));
    return or_gate(terms);
  }

  // value(x) < value(y) from counter registers: some k has reg_x[k] set
  // (x <= k+1) while reg_y[k] is clear (y > k+1).
  Lit lt_from_counters(const CounterRegs& x, const CounterRegs& y) {
    if (x.width() != y.width())
      throw invalid_input("comparator widths differ");
    std::vector<Lit> terms;
    for (int k = 0; k < x.width(); ++k)
      terms.push_back(and_gate(pos(x.regs[k]), neg(y.regs[k])));
    return or_gate(terms);
  }

  // value(x) == value(y) from counter registers: all registers agree.
  Lit eq_from_counters(const CounterRegs& x, const CounterRegs& y) {
    if (x.width() != y.width())
      throw invalid_input("comparator widths differ");
    std::vector<Lit> bits;
    for (int k = 0; k < x.width(); ++k)
      bits.push_back(xnor_gate(pos(x.regs[k]), pos(y.regs[k])));
    return and_gate(bits);
  }

  // value(x) == value(y) for binary-encoded x, y.
  Lit eq_binary(const BinaryInt& x, const BinaryInt& y) {
    if (x.width() != y.width())
      throw invalid_input("comparator widths differ");
    std::vector<Lit> bits;
    for (int k = x.width() - 1; k >= 0; --k)
      bits.push_back(xnor_gate(pos(x.bits[k]), pos(y.bits[k])));
    return and_gate(bits);
  }

  // value(x) > value(y) for binary-encoded x, y: some bit k has x_k=1,
  // y_k=0 and all higher bits equal.
  Lit gt_binary(const BinaryInt& x, const BinaryInt& y) {
    int w = x.width();
    if (w != y.width()) throw invalid_input("comparator widths differ");
    std::vector<Lit> terms;
    Lit suffix_eq;  // AND of XNOR over bits above k
    for (int k = w - 1; k >= 0; --k) {
      if (k == w - 1) {
        terms.push_back(and_gate(pos(x.bits[k]), neg(y.bits[k])));
      } else {
        Lit e_above = xnor_gate(pos(x.bits[k + 1]), pos(y.bits[k + 1]));
        suffix_eq = (k == w - 2) ? e_above : and_gate(suffix_eq, e_above);
        terms.push_back(and_gate(
            std::vector<Lit>{pos(x.bits[k]), neg(y.bits[k]), suffix_eq}));
      }
    }
    return or_gate(terms);
  }

  // value(x) <= c for binary-encoded x and a constant c. Bits of c fold
  // away statically; when the bit pattern alone decides the answer the
  // result is a pinned constant.
  Lit le_const(const BinaryInt& x, long long c) {
    int w = x.width();
    if (c < 0) return ~true_lit();
    if (c >= (1LL << w) - 1) return true_lit();
    // x > c  <=>  some k with c_k = 0, x_k = 1, and x agreeing with c on
    // all higher bits.
    std::vector<Lit> terms;
    for (int k = w - 1; k >= 0; --k) {
      if ((c >> k) & 1) continue;
      std::vector<Lit> conj{pos(x.bits[k])};
      for (int k2 = k + 1; k2 < w; ++k2)
        conj.push_back((c >> k2) & 1 ? pos(x.bits[k2]) : neg(x.bits[k2]));
      terms.push_back(conj.size() == 1 ? conj[0] : and_gate(conj));
    }
    return ~or_gate(terms);
  }

  void set_objective(const std::vector<Term>& terms) {
    std::map<Var, long long> acc;
    for (const Term& t : terms) {
      if (t.lit.negated())
        throw invalid_input("objective terms must use positive literals");
      acc[t.lit.var()] += t.coef;
    }
    inst_.objective.clear();
    for (auto [v, c] : acc)
      if (c != 0) inst_.objective.push_back({c, pos(v)});
  }

  const Instance& instance() const { return inst_; }

  Instance take() {
    Instance out = std::move(inst_);
    inst_ = Instance{};
    prefix_memo_.clear();
    true_var_ = 0;
    return out;
  }

 private:
  void push(Constraint c) {
    for (const auto& t : c.terms) inst_.check_var(t.lit.var());
    inst_.constraints.push_back(std::move(c));
  }

  Instance inst_;
  std::map<std::vector<Var>, std::vector<Lit>> prefix_memo_;
  Var true_var_ = 0;
};

}  // namespace mqc::pb
