#pragma once

#include <algorithm>
#include <chrono>
#include <climits>
#include <vector>

#include "mqc/errors.hpp"
#include "mqc/pb.hpp"

namespace mqc {

enum class SolveStatus { Optimal, Unsatisfiable, TimedOut };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Unsatisfiable: return "unsatisfiable";
    case SolveStatus::TimedOut: return "timed-out";
  }
  throw internal_error("unknown solve status");
}

struct SolverConfig {
  double time_limit_s = 0.0;  // 0 disables the limit
};

struct SolveStats {
  long long decisions = 0;
  long long propagations = 0;
  long long conflicts = 0;
  double elapsed_s = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Unsatisfiable;
  std::vector<signed char> values;  // 1-based total assignment when found
  long long objective = 0;
  std::vector<long long> improvements;  // objective of each incumbent, in order
  SolveStats stats;
};

// True iff the total assignment satisfies every constraint.
inline bool check_model(const pb::Instance& inst,
                        const std::vector<signed char>& values,
                        size_t* first_violated = nullptr) {
  for (size_t ci = 0; ci < inst.constraints.size(); ++ci) {
    if (!pb::eval(inst.constraints[ci], values)) {
      if (first_violated) *first_violated = ci;
      return false;
    }
  }
  return true;
}

namespace detail {

// Exact branch-and-bound search over normalized >=-constraints.
//
// Propagation bookkeeping: every row keeps its slack, the amount its
// left-hand side can still lose before the row fails. Assigning a
// variable immediately subtracts the coefficients of the literals it
// falsifies (and unassignment adds them back, so the two are exactly
// symmetric no matter where the propagation queue stands). A row whose
// slack drops below its largest open coefficient forces those literals
// true; a row whose slack goes negative is a conflict.
//
// The objective is folded into one extra mutable row bounding the raw
// objective from above; each new incumbent tightens that bound in place,
// so the search never revisits assignments as bad as the incumbent.
// Backtracking is chronological: flip the deepest untried decision.
class BnbSolver {
 public:
  BnbSolver(const pb::Instance& inst, const SolverConfig& cfg)
      : cfg_(cfg), num_vars_(inst.num_vars) {
    inst.validate();
    val_.assign(num_vars_ + 1, -1);
    phase_.assign(num_vars_ + 1, 0);
    occ_.assign(2 * (num_vars_ + 1), {});

    rows_.reserve(inst.constraints.size() + 1);
    for (const pb::Constraint& c : inst.constraints) add_row(c.terms, c.bound);

    // Objective terms use positive literals; fold negative coefficients
    // onto negated literals so every compiled weight is positive.
    std::vector<pb::Term> bound_terms;
    for (const pb::Term& t : inst.objective) {
      if (t.coef > 0) {
        obj_terms_.push_back({t.coef, 2 * t.lit.var()});
        bound_terms.push_back({t.coef, t.lit});
        phase_[t.lit.var()] = 0;
      } else if (t.coef < 0) {
        obj_terms_.push_back({-t.coef, 2 * t.lit.var() + 1});
        bound_terms.push_back({-t.coef, ~t.lit});
        obj_constant_ += t.coef;
        phase_[t.lit.var()] = 1;
      }
      obj_weight_sum_ += t.coef > 0 ? t.coef : -t.coef;
    }
    // Raw objective (sum of positive weights over the compiled literals)
    // bounded above by B: sum of weights over the NEGATED literals >= sum
    // of all weights minus B. B starts effectively at +infinity.
    bound_row_ = static_cast<int>(rows_.size());
    {
      std::vector<pb::Term> flipped;
      flipped.reserve(bound_terms.size());
      for (const pb::Term& t : bound_terms) flipped.push_back({t.coef, ~t.lit});
      add_row(flipped, LLONG_MIN / 4);
    }
  }

  SolveResult run() {
    auto t0 = std::chrono::steady_clock::now();
    SolveResult res;
    bool out_of_time = false;

    if (root_conflict_ || !initial_forcing()) {
      res.status = SolveStatus::Unsatisfiable;
      res.stats = stats_;
      res.stats.elapsed_s = elapsed(t0);
      return res;
    }

    long long steps = 0;
    while (true) {
      if (cfg_.time_limit_s > 0 && (++steps & 1023) == 0 &&
          elapsed(t0) > cfg_.time_limit_s) {
        out_of_time = true;
        break;
      }
      int conflict = propagate();
      // Tightening the incumbent bound can leave the bound row negative in
      // a state restored by backtracking, with no queued assignment left
      // to trip over it; catch that here.
      if (conflict < 0 && rows_[bound_row_].slack < 0) conflict = bound_row_;
      if (conflict >= 0) {
        ++stats_.conflicts;
        if (!backtrack()) break;
      } else if (static_cast<int>(trail_.size()) == num_vars_) {
        long long raw = 0;
        for (const auto& [coef, lit] : obj_terms_)
          if (lit_true(lit)) raw += coef;
        long long objective = obj_constant_ + raw;
        if (!have_best_ || objective < best_obj_) {
          have_best_ = true;
          best_obj_ = objective;
          best_vals_ = val_;
          res.improvements.push_back(objective);
          tighten_bound(raw);
        }
        if (obj_terms_.empty()) break;  // nothing to improve on
        ++stats_.conflicts;
        if (!backtrack()) break;
      } else {
        decide();
      }
    }

    res.stats = stats_;
    res.stats.elapsed_s = elapsed(t0);
    if (out_of_time) {
      res.status = SolveStatus::TimedOut;
      if (have_best_) {
        res.values = best_vals_;
        res.objective = best_obj_;
      }
      return res;
    }
    if (have_best_) {
      res.status = SolveStatus::Optimal;
      res.values = best_vals_;
      res.objective = best_obj_;
    } else {
      res.status = SolveStatus::Unsatisfiable;
    }
    return res;
  }

 private:
  struct RTerm {
    long long coef;
    int lit;  // 2*var for the variable, 2*var+1 for its negation
  };
  struct Row {
    long long slack = 0;
    long long bound = 0;
    long long max_coef = 0;
    int begin = 0, end = 0;
  };

  static int falsified_code(int var, signed char value) {
    return 2 * var + (value ? 1 : 0);
  }

  bool lit_true(int lit) const {
    signed char v = val_[lit >> 1];
    return v >= 0 && (v == 1) == ((lit & 1) == 0);
  }

  void add_row(const std::vector<pb::Term>& terms, long long bound) {
    Row row;
    row.begin = static_cast<int>(terms_.size());
    long long sum = 0;
    for (const pb::Term& t : terms) {
      int lit = 2 * t.lit.var() + (t.lit.negated() ? 1 : 0);
      terms_.push_back({t.coef, lit});
      sum += t.coef;
    }
    row.end = static_cast<int>(terms_.size());
    std::sort(terms_.begin() + row.begin, terms_.end(),
              [](const RTerm& a, const RTerm& b) {
                return a.coef != b.coef ? a.coef > b.coef
                                        : (a.lit >> 1) < (b.lit >> 1);
              });
    row.bound = bound;
    row.slack = sum - bound;
    row.max_coef = row.begin < row.end ? terms_[row.begin].coef : 0;
    if (row.slack < 0) root_conflict_ = true;
    int ri = static_cast<int>(rows_.size());
    for (int t = row.begin; t < row.end; ++t) {
      // When this literal becomes false the row loses its coefficient.
      occ_[terms_[t].lit].push_back({ri, terms_[t].coef});
    }
    rows_.push_back(row);
  }

  // Assign and immediately charge every row that loses this literal.
  // Returns false on a now-negative slack (conflict); all rows are still
  // charged so undo stays symmetric.
  bool enqueue(int var, bool value) {
    val_[var] = value ? 1 : 0;
    trail_.push_back(var);
    bool ok = true;
    for (const auto& [ri, coef] : occ_[falsified_code(var, val_[var])]) {
      Row& row = rows_[ri];
      row.slack -= coef;
      if (row.slack < 0) ok = false;
    }
    return ok;
  }

  void unassign_top() {
    int var = trail_.back();
    trail_.pop_back();
    for (const auto& [ri, coef] : occ_[falsified_code(var, val_[var])])
      rows_[ri].slack += coef;
    val_[var] = -1;
    if (var < hint_) hint_ = var;
  }

  // Scans one row for literals that have become mandatory.
  bool force_row(int ri) {
    Row& row = rows_[ri];
    if (row.slack >= row.max_coef) return true;
    for (int t = row.begin; t < row.end; ++t) {
      const RTerm& rt = terms_[t];
      if (rt.coef <= row.slack) break;  // sorted by weight, rest are safe
      int var = rt.lit >> 1;
      if (val_[var] >= 0) continue;
      if (!enqueue(var, (rt.lit & 1) == 0)) return false;
    }
    return true;
  }

  // Processes queued assignments: every row touched by a falsified
  // literal is re-scanned for forced literals. Returns the index of a
  // failed row, or -1.
  int propagate() {
    while (qhead_ < trail_.size()) {
      int var = trail_[qhead_++];
      ++stats_.propagations;
      int code = falsified_code(var, val_[var]);
      for (size_t k = 0; k < occ_[code].size(); ++k) {
        int ri = occ_[code][k].first;
        if (rows_[ri].slack < 0) return ri;
        if (!force_row(ri)) return ri;
      }
    }
    return -1;
  }

  bool initial_forcing() {
    for (int ri = 0; ri < static_cast<int>(rows_.size()); ++ri)
      if (!force_row(ri)) return false;
    return propagate() < 0;
  }

  void decide() {
    while (hint_ <= num_vars_ && val_[hint_] >= 0) ++hint_;
    if (hint_ > num_vars_) throw internal_error("decision with full trail");
    int var = hint_;
    levels_.push_back({var, trail_.size(), false});
    ++stats_.decisions;
    enqueue(var, phase_[var] == 1);  // a decision cannot fail on the spot
  }

  // Chronological: undo to the deepest decision with an untried value,
  // flip it; give up when none is left.
  bool backtrack() {
    while (!levels_.empty()) {
      Level& level = levels_.back();
      while (trail_.size() > level.trail_pos) unassign_top();
      qhead_ = level.trail_pos;
      if (!level.flipped) {
        level.flipped = true;
        enqueue(level.var, phase_[level.var] != 1);
        return true;
      }
      levels_.pop_back();
    }
    return false;
  }

  // New incumbent with raw objective `raw`: require raw <= raw - 1 from
  // now on, by raising the bound of the flipped-literal row in place.
  void tighten_bound(long long raw) {
    Row& row = rows_[bound_row_];
    long long new_bound = obj_weight_sum_ - raw + 1;
    long long delta = new_bound - row.bound;
    row.bound = new_bound;
    row.slack -= delta;
  }

  static double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }

  struct Level {
    int var;
    size_t trail_pos;
    bool flipped;
  };

  SolverConfig cfg_;
  int num_vars_;
  std::vector<RTerm> terms_;
  std::vector<Row> rows_;
  std::vector<std::vector<std::pair<int, long long>>> occ_;
  std::vector<signed char> val_;
  std::vector<signed char> phase_;
  std::vector<int> trail_;
  size_t qhead_ = 0;
  std::vector<Level> levels_;
  int hint_ = 1;
  bool root_conflict_ = false;

  std::vector<std::pair<long long, int>> obj_terms_;  // (weight, lit)
  long long obj_constant_ = 0;
  long long obj_weight_sum_ = 0;
  int bound_row_ = -1;

  bool have_best_ = false;
  long long best_obj_ = 0;
  std::vector<signed char> best_vals_;

  SolveStats stats_;
};

}  // namespace detail

inline SolveResult solve(const pb::Instance& inst,
                         const SolverConfig& cfg = {}) {
  detail::BnbSolver solver(inst, cfg);
  return solver.run();
}

}  // namespace mqc
