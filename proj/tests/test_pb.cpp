#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <utility>

#include "helpers.hpp"

using namespace mqc;
using namespace mqc::pb;
using testutil::all_models;
using testutil::lit_true;
using testutil::unary_value;

TEST_CASE("literals are signed variable codes", "[pb]") {
  Lit a = pos(3), b = neg(3);
  CHECK(a.var() == 3);
  CHECK_FALSE(a.negated());
  CHECK(b.negated());
  CHECK(~a == b);
  CHECK(~b == a);
  CHECK_THROWS_AS(Lit::of(0), internal_error);
}

TEST_CASE("normalization merges duplicate variables and flips negatives",
          "[pb]") {
  Constraint c = normalize_ge({{2, pos(1)}, {3, neg(1)}, {1, pos(2)}}, 2);
  REQUIRE(c.terms.size() == 2);
  CHECK(c.terms[0].coef == 1);
  CHECK(c.terms[0].lit == neg(1));
  CHECK(c.terms[1].coef == 1);
  CHECK(c.terms[1].lit == pos(2));
  CHECK(c.bound == 0);

  // Perfect cancellation drops the variable entirely.
  Constraint gone = normalize_ge({{2, pos(1)}, {2, neg(1)}}, 1);
  CHECK(gone.terms.empty());
  CHECK(gone.bound == -1);
}

TEST_CASE("normalization preserves the satisfied set", "[pb]") {
  Lcg rng(7);
  for (int round = 0; round < 200; ++round) {
    int nv = 1 + static_cast<int>(rng.below(4));
    std::vector<Term> terms;
    int len = 1 + static_cast<int>(rng.below(6));
    for (int t = 0; t < len; ++t)
      terms.push_back({static_cast<long long>(rng.below(9)) - 4,
                       Lit::of(1 + rng.below(nv), rng.below(2) == 1)});
    long long bound = static_cast<long long>(rng.below(13)) - 6;
    Constraint c = normalize_ge(terms, bound);
    for (std::uint32_t mask = 0; mask < (1u << nv); ++mask) {
      std::vector<signed char> values(nv + 1, 0);
      for (int v = 1; v <= nv; ++v) values[v] = (mask >> (v - 1)) & 1u;
      long long raw = 0;
      for (const Term& t : terms)
        if (lit_true(values, t.lit)) raw += t.coef;
      CHECK(pb::eval(c, values) == (raw >= bound));
    }
  }
}

TEST_CASE("relations compile to >= rows", "[pb]") {
  Builder b;
  Var x = b.new_var(), y = b.new_var();
  b.add(Rel::Le, {{1, pos(x)}, {1, pos(y)}}, 1);
  b.add(Rel::Eq, {{1, pos(x)}, {1, pos(y)}}, 1);
  Instance inst = b.take();
  REQUIRE(inst.constraints.size() == 3);
  auto models = all_models(inst);
  // x + y == 1 has two solutions; the Le row is implied by the Eq pair.
  CHECK(models.size() == 2);
}

TEST_CASE("evaluation demands total assignments", "[pb]") {
  Constraint c = normalize_ge({{1, pos(1)}}, 1);
  std::vector<signed char> partial{0, -1};
  CHECK_THROWS_AS(pb::eval(c, partial), invalid_input);
}

TEST_CASE("and gate equals the conjunction on every assignment", "[pb]") {
  Builder b;
  Var x = b.new_var(), y = b.new_var();
  Lit g = b.and_gate({pos(x), neg(y)});
  auto models = all_models(b.take());
  CHECK(models.size() == 4);  // inputs free, gate forced
  for (const auto& m : models)
    CHECK(lit_true(m, g) == (m[x] == 1 && m[y] == 0));
}

TEST_CASE("or gate equals the disjunction on every assignment", "[pb]") {
  Builder b;
  Var x = b.new_var(), y = b.new_var(), z = b.new_var();
  Lit g = b.or_gate({pos(x), pos(y), neg(z)});
  auto models = all_models(b.take());
  CHECK(models.size() == 8);
  for (const auto& m : models)
    CHECK(lit_true(m, g) == (m[x] == 1 || m[y] == 1 || m[z] == 0));
}

TEST_CASE("xnor gate equals equivalence on every assignment", "[pb]") {
  Builder b;
  Var x = b.new_var(), y = b.new_var();
  Lit g = b.xnor_gate(pos(x), pos(y));
  auto models = all_models(b.take());
  CHECK(models.size() == 4);
  for (const auto& m : models) CHECK(lit_true(m, g) == (m[x] == m[y]));
}

TEST_CASE("single-input gates degenerate to wires", "[pb]") {
  Builder b;
  Var x = b.new_var();
  Lit g1 = b.and_gate({pos(x)});
  Lit g2 = b.or_gate({neg(x)});
  auto models = all_models(b.take());
  CHECK(models.size() == 2);
  for (const auto& m : models) {
    CHECK(lit_true(m, g1) == (m[x] == 1));
    CHECK(lit_true(m, g2) == (m[x] == 0));
  }
  Builder c;
  CHECK_THROWS_AS(c.and_gate(std::vector<Lit>{}), invalid_input);
  CHECK_THROWS_AS(c.or_gate(std::vector<Lit>{}), invalid_input);
}

TEST_CASE("exactly-one admits precisely the unit assignments", "[pb]") {
  Builder b;
  UnaryInt x = b.new_unary(4);
  std::vector<Lit> lits;
  for (Var v : x.bits) lits.push_back(pos(v));
  b.add_exactly_one(lits);
  auto models = all_models(b.take());
  REQUIRE(models.size() == 4);
  for (const auto& m : models) {
    int set = 0;
    for (Var v : x.bits) set += m[v];
    CHECK(set == 1);
  }
}

TEST_CASE("unary equality matches on all value pairs one to five", "[pb]") {
  Builder b;
  UnaryInt x = b.new_unary(5), y = b.new_unary(5);
  std::vector<Lit> xl, yl;
  for (Var v : x.bits) xl.push_back(pos(v));
  for (Var v : y.bits) yl.push_back(pos(v));
  b.add_exactly_one(xl);
  b.add_exactly_one(yl);
  Lit e = b.eq_unary(x, y);
  auto models = all_models(b.take());
  REQUIRE(models.size() == 25);
  std::set<std::pair<int, int>> seen;
  for (const auto& m : models) {
    int vx = unary_value(m, x), vy = unary_value(m, y);
    seen.insert({vx, vy});
    CHECK(lit_true(m, e) == (vx == vy));
  }
  CHECK(seen.size() == 25);
}

TEST_CASE("unary greater-than matches on all value pairs one to five",
          "[pb]") {
  Builder b;
  UnaryInt x = b.new_unary(5), y = b.new_unary(5);
  std::vector<Lit> xl, yl;
  for (Var v : x.bits) xl.push_back(pos(v));
  for (Var v : y.bits) yl.push_back(pos(v));
  b.add_exactly_one(xl);
  b.add_exactly_one(yl);
  Lit g = b.gt_unary(x, y);
  auto models = all_models(b.take());
  REQUIRE(models.size() == 25);
  for (const auto& m : models)
    CHECK(lit_true(m, g) == (unary_value(m, x) > unary_value(m, y)));
}

TEST_CASE("width-one unary comparison is never greater", "[pb]") {
  Builder b;
  UnaryInt x = b.new_unary(1), y = b.new_unary(1);
  b.add_clause({pos(x.bits[0])});
  b.add_clause({pos(y.bits[0])});
  Lit g = b.gt_unary(x, y);
  auto models = all_models(b.take());
  REQUIRE(models.size() == 1);
  CHECK_FALSE(lit_true(models[0], g));
}

TEST_CASE("counter registers form the value's step function", "[pb]") {
  Builder b;
  UnaryInt x = b.new_unary(5);
  std::vector<Lit> xl;
  for (Var v : x.bits) xl.push_back(pos(v));
  b.add_clause(xl);  // at least one; the counter supplies at most one
  CounterRegs s = b.seq_counter_at_most_one(x);
  auto models = all_models(b.take());
  REQUIRE(models.size() == 5);  // counter rows exclude double selections
  for (const auto& m : models) {
    int value = unary_value(m, x);
    for (int k = 0; k < s.width(); ++k)
      CHECK(m[s.regs[k]] == (value <= k + 1 ? 1 : 0));
    if (value == 3) {
      CHECK(m[s.regs[0]] == 0);
      CHECK(m[s.regs[1]] == 0);
      CHECK(m[s.regs[2]] == 1);
      CHECK(m[s.regs[3]] == 1);
      CHECK(m[s.regs[4]] == 1);
    }
  }
}

TEST_CASE("register comparisons match on all value pairs", "[pb]") {
  for (bool equality : {false, true}) {
    Builder b;
    UnaryInt x = b.new_unary(3), y = b.new_unary(3);
    std::vector<Lit> xl, yl;
    for (Var v : x.bits) xl.push_back(pos(v));
    for (Var v : y.bits) yl.push_back(pos(v));
    b.add_clause(xl);
    b.add_clause(yl);
    CounterRegs sx = b.seq_counter_at_most_one(x);
    CounterRegs sy = b.seq_counter_at_most_one(y);
    Lit out = equality ? b.eq_from_counters(sx, sy)
                       : b.lt_from_counters(sx, sy);
    auto models = all_models(b.take());
    REQUIRE(models.size() == 9);
    for (const auto& m : models) {
      int vx = unary_value(m, x), vy = unary_value(m, y);
      CHECK(lit_true(m, out) == (equality ? vx == vy : vx < vy));
    }
  }
}

TEST_CASE("binary equality matches on all value pairs zero to seven",
          "[pb]") {
  Builder b;
  BinaryInt x = b.new_binary(3), y = b.new_binary(3);
  Lit e = b.eq_binary(x, y);
  auto models = all_models(b.take());
  REQUIRE(models.size() == 64);
  for (const auto& m : models)
    CHECK(lit_true(m, e) ==
          (testutil::binary_value(m, x) == testutil::binary_value(m, y)));
}

TEST_CASE("binary greater-than matches on all value pairs zero to seven",
          "[pb]") {
  Builder b;
  BinaryInt x = b.new_binary(3), y = b.new_binary(3);
  Lit g = b.gt_binary(x, y);
  auto models = all_models(b.take());
  REQUIRE(models.size() == 64);
  for (const auto& m : models)
    CHECK(lit_true(m, g) ==
          (testutil::binary_value(m, x) > testutil::binary_value(m, y)));
}

TEST_CASE("constant upper bounds gate the binary range", "[pb]") {
  for (long long c : {0, 1, 2, 3, 4, 5, 6}) {
    Builder b;
    BinaryInt x = b.new_binary(3);
    Lit le = b.le_const(x, c);
    auto models = all_models(b.take());
    REQUIRE(models.size() == 8);
    for (const auto& m : models)
      CHECK(lit_true(m, le) == (testutil::binary_value(m, x) <= c));
  }
}

TEST_CASE("out-of-range constant bounds collapse to constants", "[pb]") {
  Builder low;
  BinaryInt x = low.new_binary(3);
  Lit never = low.le_const(x, -1);
  auto m1 = all_models(low.take());
  REQUIRE(m1.size() == 8);  // x free; the pinned true variable is fixed
  for (const auto& m : m1) CHECK_FALSE(lit_true(m, never));

  Builder high;
  BinaryInt y = high.new_binary(3);
  Lit always = high.le_const(y, 7);
  auto m2 = all_models(high.take());
  REQUIRE(m2.size() == 8);
  for (const auto& m : m2) CHECK(lit_true(m, always));
}

TEST_CASE("prefix chains are shared per bit vector", "[pb]") {
  Builder b;
  UnaryInt x = b.new_unary(4), y = b.new_unary(4);
  int before = b.num_vars();
  b.gt_unary(x, y);
  int after_first = b.num_vars();
  b.gt_unary(x, y);  // same prefix chain over y: only fresh and/or gates
  int after_second = b.num_vars();
  CHECK(after_second - after_first < after_first - before);
}

TEST_CASE("objectives must use positive literals", "[pb]") {
  Builder b;
  Var x = b.new_var();
  CHECK_THROWS_AS(b.set_objective({{1, neg(x)}}), invalid_input);
  b.set_objective({{-2, pos(x)}, {1, pos(x)}});
  Instance inst = b.take();
  REQUIRE(inst.objective.size() == 1);
  CHECK(inst.objective[0].coef == -1);
  std::vector<signed char> values{0, 1};
  CHECK(eval_objective(inst, values) == -1);
}

TEST_CASE("instances validate their variable references", "[pb]") {
  Instance inst;
  inst.num_vars = 1;
  inst.constraints.push_back(normalize_ge({{1, pos(2)}}, 1));
  CHECK_THROWS_AS(inst.validate(), invalid_input);
}
