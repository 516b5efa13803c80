#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mqc/errors.hpp"
#include "mqc/pb.hpp"

namespace mqc {

// OPB text form. Emission writes only >=-rows over positive literals:
// a term c*~x becomes -c*x with the bound lowered by c. Objective terms
// are over positive literals already (see pb::Instance), so emitting and
// re-parsing an instance is lossless up to that fixed surface form, and
// emit(parse(emit(i))) == emit(i) byte for byte.

inline void emit_opb(std::ostream& os, const pb::Instance& inst) {
  os << "* #variable= " << inst.num_vars
     << " #constraint= " << inst.constraints.size() << "\n";
  if (!inst.objective.empty()) {
    os << "min:";
    for (const pb::Term& t : inst.objective) {
      os << ' ' << (t.coef < 0 ? "" : "+") << t.coef << " x" << t.lit.var();
    }
    os << " ;\n";
  }
  for (const pb::Constraint& c : inst.constraints) {
    long long bound = c.bound;
    bool first = true;
    for (const pb::Term& t : c.terms) {
      long long coef = t.coef;
      if (t.lit.negated()) {
        coef = -coef;
        bound -= t.coef;
      }
      os << (first ? "" : " ") << (coef < 0 ? "" : "+") << coef << " x"
         << t.lit.var();
      first = false;
    }
    if (first) os << "+0 x1";  // degenerate row with no terms
    os << " >= " << bound << " ;\n";
  }
}

inline std::string emit_opb(const pb::Instance& inst) {
  std::ostringstream os;
  emit_opb(os, inst);
  return os.str();
}

namespace detail {

inline long long parse_ll(const std::string& tok, int line,
                          const char* what) {
  try {
    size_t used = 0;
    long long v = std::stoll(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw parse_error("expected " + std::string(what) + ", got '" + tok + "'",
                      line);
  }
}

inline int parse_opb_var(const std::string& tok, int line, int num_vars) {
  if (tok.size() < 2 || tok[0] != 'x')
    throw parse_error("expected a literal like x3, got '" + tok + "'", line);
  long long v = parse_ll(tok.substr(1), line, "a variable index");
  if (v < 1 || v > num_vars)
    throw parse_error("variable x" + std::to_string(v) + " outside 1.." +
                          std::to_string(num_vars),
                      line);
  return static_cast<int>(v);
}

}  // namespace detail

inline pb::Instance parse_opb(std::istream& is) {
  pb::Instance inst;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  long long declared_constraints = -1;
  bool seen_rows = false;

  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank
    if (tok == "*") {
      if (have_header) continue;  // later comment lines
      std::string key;
      ls >> key;
      if (key != "#variable=")
        throw parse_error("header must read '* #variable= N #constraint= M'",
                          lineno);
      std::string nv, ck, nc;
      if (!(ls >> nv >> ck >> nc) || ck != "#constraint=")
        throw parse_error("header must read '* #variable= N #constraint= M'",
                          lineno);
      inst.num_vars = static_cast<int>(
          detail::parse_ll(nv, lineno, "a variable count"));
      declared_constraints = detail::parse_ll(nc, lineno, "a constraint count");
      if (inst.num_vars < 0 || declared_constraints < 0)
        throw parse_error("negative count in header", lineno);
      have_header = true;
      continue;
    }
    if (!have_header)
      throw parse_error("missing '* #variable= ...' header line", lineno);

    if (tok == "min:") {
      if (!inst.objective.empty() || seen_rows)
        throw parse_error("objective line must be first and unique", lineno);
      std::vector<pb::Term> terms;
      while (ls >> tok) {
        if (tok == ";") break;
        long long coef = detail::parse_ll(tok, lineno, "a coefficient");
        if (!(ls >> tok))
          throw parse_error("coefficient without a literal", lineno);
        int v = detail::parse_opb_var(tok, lineno, inst.num_vars);
        terms.push_back({coef, pb::pos(v)});
      }
      // Merge repeated variables without disturbing first-appearance
      // order, so emitting a parsed instance reproduces its source bytes.
      std::vector<pb::Term> merged;
      std::map<int, size_t> slot;
      for (const pb::Term& t : terms) {
        auto [it, fresh] = slot.try_emplace(t.lit.var(), merged.size());
        if (fresh)
          merged.push_back(t);
        else
          merged[it->second].coef += t.coef;
      }
      inst.objective.clear();
      for (const pb::Term& t : merged)
        if (t.coef != 0) inst.objective.push_back(t);
      continue;
    }

    // Constraint row: coef literal ... >= bound ;
    std::vector<pb::Term> terms;
    bool saw_rel = false;
    long long bound = 0;
    while (true) {
      if (tok == ">=") {
        if (!(ls >> tok)) throw parse_error("relation without a bound", lineno);
        bound = detail::parse_ll(tok, lineno, "a bound");
        saw_rel = true;
        if (ls >> tok && tok != ";")
          throw parse_error("unexpected token '" + tok + "' after bound",
                            lineno);
        break;
      }
      if (tok == "<=" || tok == "=" || tok == ">")
        throw parse_error("only '>=' rows are accepted", lineno);
      long long coef = detail::parse_ll(tok, lineno, "a coefficient");
      if (!(ls >> tok))
        throw parse_error("coefficient without a literal", lineno);
      int v = detail::parse_opb_var(tok, lineno, inst.num_vars);
      terms.push_back({coef, pb::pos(v)});
      if (!(ls >> tok))
        throw parse_error("constraint row without '>=' relation", lineno);
    }
    if (!saw_rel)
      throw parse_error("constraint row without '>=' relation", lineno);
    inst.constraints.push_back(pb::normalize_ge(terms, bound));
    seen_rows = true;
  }

  if (!have_header)
    throw parse_error("missing '* #variable= ...' header line", lineno);
  if (declared_constraints !=
      static_cast<long long>(inst.constraints.size()))
    throw parse_error(
        "header declares " + std::to_string(declared_constraints) +
            " constraints but file has " +
            std::to_string(inst.constraints.size()),
        lineno);
  inst.validate();
  return inst;
}

inline pb::Instance parse_opb(const std::string& text) {
  std::istringstream is(text);
  return parse_opb(is);
}

// Solver output in the usual competition text form:
//   o <value>          one line per improving solution, in discovery order
//   s OPTIMUM FOUND    or  s UNSATISFIABLE
//   v x1 -x2 x3 ...    assignment line (optimum only)
struct SolutionFile {
  enum class Status { Optimum, Unsatisfiable };
  Status status = Status::Unsatisfiable;
  std::vector<signed char> values;  // 1-based; index 0 unused
  std::optional<long long> objective;  // last 'o' line
  std::vector<long long> improvements;  // every 'o' line in order
};

inline void emit_solution(std::ostream& os, const SolutionFile& sol) {
  for (long long v : sol.improvements) os << "o " << v << "\n";
  if (sol.status == SolutionFile::Status::Unsatisfiable) {
    os << "s UNSATISFIABLE\n";
    return;
  }
  os << "s OPTIMUM FOUND\n";
  os << "v";
  for (size_t v = 1; v < sol.values.size(); ++v)
    os << ' ' << (sol.values[v] == 1 ? "x" : "-x") << v;
  os << "\n";
}

inline std::string emit_solution(const SolutionFile& sol) {
  std::ostringstream os;
  emit_solution(os, sol);
  return os.str();
}

inline SolutionFile parse_solution(std::istream& is, int num_vars = 0) {
  SolutionFile sol;
  bool have_status = false;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "c" || tag == "*") continue;  // comments
    if (tag == "o") {
      std::string tok;
      if (!(ls >> tok)) throw parse_error("'o' line without a value", lineno);
      long long v = detail::parse_ll(tok, lineno, "an objective value");
      sol.improvements.push_back(v);
      sol.objective = v;
      continue;
    }
    if (tag == "s") {
      std::string rest;
      std::getline(ls, rest);
      size_t i = rest.find_first_not_of(" \t");
      rest = i == std::string::npos ? std::string() : rest.substr(i);
      while (!rest.empty() && (rest.back() == '\r' || rest.back() == ' '))
        rest.pop_back();
      if (rest == "OPTIMUM FOUND")
        sol.status = SolutionFile::Status::Optimum;
      else if (rest == "UNSATISFIABLE")
        sol.status = SolutionFile::Status::Unsatisfiable;
      else
        throw parse_error("unknown status '" + rest + "'", lineno);
      have_status = true;
      continue;
    }
    if (tag == "v") {
      std::string tok;
      while (ls >> tok) {
        bool negated = false;
        if (!tok.empty() && tok[0] == '-') {
          negated = true;
          tok = tok.substr(1);
        }
        if (tok.size() < 2 || tok[0] != 'x')
          throw parse_error("expected a literal like x3 or -x3, got '" + tok +
                                "'",
                            lineno);
        long long v = detail::parse_ll(tok.substr(1), lineno,
                                       "a variable index");
        if (v < 1 || (num_vars > 0 && v > num_vars))
          throw parse_error("variable x" + std::to_string(v) +
                                " out of range in 'v' line",
                            lineno);
        if (static_cast<size_t>(v) >= sol.values.size())
          sol.values.resize(static_cast<size_t>(v) + 1, -1);
        signed char val = static_cast<signed char>(negated ? 0 : 1);
        signed char& slot = sol.values[static_cast<size_t>(v)];
        if (slot >= 0 && slot != val)
          throw parse_error("contradictory assignment for x" +
                                std::to_string(v),
                            lineno);
        slot = val;
      }
      continue;
    }
    throw parse_error("unknown line tag '" + tag + "'", lineno);
  }
  if (!have_status) throw parse_error("missing 's' status line", lineno);
  if (sol.status == SolutionFile::Status::Optimum && num_vars > 0) {
    if (sol.values.size() < static_cast<size_t>(num_vars) + 1)
      sol.values.resize(static_cast<size_t>(num_vars) + 1, -1);
    for (int v = 1; v <= num_vars; ++v)
      if (sol.values[v] < 0)
        throw parse_error("assignment missing variable x" + std::to_string(v),
                          0);
  }
  return sol;
}

inline SolutionFile parse_solution(const std::string& text, int num_vars = 0) {
  std::istringstream is(text);
  return parse_solution(is, num_vars);
}

}  // namespace mqc
