// Shared fixtures and small utilities for the test suites. Kept free of
// any test-framework dependency so the acceptance runner can use it too.
#pragma once

#include <mqc/mqc.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace testutil {

// Seven-taxon ultrametric matrix used as the worked example throughout:
// taxa a..g, rooted shape (((a,b),g),((c,(d,e)),f)) with LCA labels
// 1,2,2,3,4 bottom-up.
inline mqc::TaxonSet letters7() {
  return mqc::TaxonSet({"a", "b", "c", "d", "e", "f", "g"});
}

inline mqc::UltrametricMatrix example_matrix7() {
  mqc::UltrametricMatrix m(7);
  auto set = [&](int i, int j, int v) { m.set(i, j, v); };
  set(1, 2, 1);
  set(1, 3, 4);
  set(1, 4, 4);
  set(1, 5, 4);
  set(1, 6, 4);
  set(1, 7, 2);
  set(2, 3, 4);
  set(2, 4, 4);
  set(2, 5, 4);
  set(2, 6, 4);
  set(2, 7, 2);
  set(3, 4, 2);
  set(3, 5, 2);
  set(3, 6, 3);
  set(3, 7, 4);
  set(4, 5, 1);
  set(4, 6, 3);
  set(4, 7, 4);
  set(5, 6, 3);
  set(5, 7, 4);
  set(6, 7, 4);
  return m;
}

// Every satisfying total assignment of the instance, in numeric order of
// the assignment read as bits (variable k is bit k-1). Only for tiny
// instances; used for exhaustive gate checks.
inline std::vector<std::vector<signed char>> all_models(
    const mqc::pb::Instance& inst) {
  if (inst.num_vars > 20)
    throw mqc::invalid_input("all_models supports up to 20 variables");
  std::vector<std::vector<signed char>> out;
  const std::uint32_t top = 1u << inst.num_vars;
  for (std::uint32_t mask = 0; mask < top; ++mask) {
    std::vector<signed char> values(static_cast<size_t>(inst.num_vars) + 1, 0);
    for (int v = 1; v <= inst.num_vars; ++v)
      values[v] = (mask >> (v - 1)) & 1u;
    bool ok = true;
    for (const auto& c : inst.constraints)
      if (!mqc::pb::eval(c, values)) {
        ok = false;
        break;
      }
    if (ok) out.push_back(std::move(values));
  }
  return out;
}

inline bool lit_true(const std::vector<signed char>& values, mqc::pb::Lit l) {
  return (values[l.var()] == 1) != l.negated();
}

// One-hot or plain binary read-out of a bit vector (bit k worth 2^k for
// weighted=false the caller interprets positions itself).
inline int unary_value(const std::vector<signed char>& values,
                       const mqc::pb::UnaryInt& x) {
  int val = 0;
  for (int k = 0; k < x.width(); ++k)
    if (values[x.bits[k]] == 1) {
      if (val != 0) throw mqc::invalid_input("one-hot value set twice");
      val = k + 1;
    }
  if (val == 0) throw mqc::invalid_input("one-hot value never set");
  return val;
}

inline int binary_value(const std::vector<signed char>& values,
                        const mqc::pb::BinaryInt& x) {
  int val = 0;
  for (int k = 0; k < x.width(); ++k)
    if (values[x.bits[k]] == 1) val += 1 << k;
  return val;
}

// Random PB instance for solver-vs-enumeration comparisons. Clause-like
// and weighted rows mixed; bounds picked so instances are sometimes
// unsatisfiable but not trivially so.
inline mqc::pb::Instance random_pb_instance(mqc::Lcg& rng, int max_vars,
                                            int max_rows) {
  int nv = 3 + static_cast<int>(rng.below(max_vars - 2));
  int nc = 1 + static_cast<int>(rng.below(max_rows));
  mqc::pb::Instance inst;
  inst.num_vars = nv;
  for (int c = 0; c < nc; ++c) {
    int len = 1 + static_cast<int>(rng.below(std::min(nv, 5)));
    std::vector<mqc::pb::Term> terms;
    long long sum = 0;
    for (int t = 0; t < len; ++t) {
      long long coef = 1 + rng.below(4);
      mqc::pb::Var v = 1 + static_cast<int>(rng.below(nv));
      bool negated = rng.below(2) == 1;
      terms.push_back({coef, mqc::pb::Lit::of(v, negated)});
      sum += coef;
    }
    long long bound = static_cast<long long>(rng.below(
        static_cast<std::uint32_t>(sum + 2)));
    inst.constraints.push_back(mqc::pb::normalize_ge(terms, bound));
  }
  int olen = static_cast<int>(rng.below(nv + 1));
  std::vector<char> used(nv + 1, 0);
  for (int t = 0; t < olen; ++t) {
    mqc::pb::Var v = 1 + static_cast<int>(rng.below(nv));
    if (used[v]) continue;
    used[v] = 1;
    long long coef = static_cast<long long>(rng.below(9)) - 4;
    if (coef == 0) coef = 5;
    inst.objective.push_back({coef, mqc::pb::pos(v)});
  }
  return inst;
}

// Random ultrametric matrix: recursive random partition with strictly
// decreasing labels, mirroring what a labeled rooted phylogeny induces.
inline mqc::UltrametricMatrix random_ultrametric(mqc::Lcg& rng, int n) {
  mqc::UltrametricMatrix m(n);
  int upper = (n + 1) / 2;
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i + 1;

  struct Frame {
    std::vector<int> members;
    int max_label;
  };
  std::vector<Frame> stack{{all, upper}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.members.size() < 2) continue;
    int label = 1 + static_cast<int>(rng.below(f.max_label));
    // Split into at least two groups; with label 1 everything must part.
    std::vector<std::vector<int>> groups;
    if (label == 1) {
      for (int t : f.members) groups.push_back({t});
    } else {
      while (true) {
        groups.assign(2 + rng.below(2), {});
        for (int t : f.members)
          groups[rng.below(static_cast<std::uint32_t>(groups.size()))]
              .push_back(t);
        int nonempty = 0;
        for (const auto& g : groups) nonempty += !g.empty();
        if (nonempty >= 2) break;
      }
      std::erase_if(groups, [](const auto& g) { return g.empty(); });
    }
    for (size_t a = 0; a < groups.size(); ++a)
      for (size_t b = a + 1; b < groups.size(); ++b)
        for (int i : groups[a])
          for (int j : groups[b]) m.set(i, j, label);
    for (auto& g : groups) stack.push_back({std::move(g), label - 1});
  }
  return m;
}

// ---- subprocess support for CLI tests ----

struct CmdResult {
  int code = -1;
  std::string output;  // stdout and stderr interleaved
};

inline CmdResult run_cmd(const std::string& cmd) {
  CmdResult r;
  FILE* p = ::popen((cmd + " 2>&1").c_str(), "r");
  if (!p) throw mqc::internal_error("popen failed for: " + cmd);
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.output.append(buf, got);
  int st = ::pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw mqc::invalid_input("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh scratch directory under the system temp root.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static int counter = 0;
  auto p = std::filesystem::temp_directory_path() /
           ("mqc_tests_" + std::to_string(::getpid()) + "_" + tag + "_" +
            std::to_string(counter++));
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testutil
