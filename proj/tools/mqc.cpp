// mqc: maximum quartet consistency toolkit.
//
// Subcommands: gen, run, encode, solve, decode, check, oracle, bench.
// Exit codes: 0 success, 2 usage or input parse error, 3 internal
// invariant violation (including an exceeded time budget).

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <mqc/mqc.hpp>

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mqc::invalid_input("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mqc::invalid_input("cannot write file: " + path);
  out << content;
  if (!out) throw mqc::invalid_input("write failed: " + path);
}

mqc::QrtFile load_qrt(const std::string& path) {
  std::istringstream is(read_file(path));
  try {
    return mqc::read_qrt(is);
  } catch (const mqc::parse_error& e) {
    throw mqc::parse_error(path + ": " + e.what(), 0);
  }
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("QMQC_SEED")) {
    try {
      size_t used = 0;
      unsigned long long v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      return v;
    } catch (const std::exception&) {
      throw mqc::invalid_input("QMQC_SEED must be a non-negative integer, got '" +
                               std::string(env) + "'");
    }
  }
  return 1;
}

mqc::ModelVariant parse_variant(const std::string& label) {
  mqc::ModelVariant v;
  std::string base = label;
  if (base.size() > 4 && base.substr(base.size() - 4) == "+trd") {
    v.siblings = true;
    base = base.substr(0, base.size() - 4);
  }
  v.kind = mqc::parse_model_kind(base);
  return v;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw mqc::invalid_input(std::string(what) + " list has a bad entry: '" +
                               item + "'");
    }
  }
  if (out.empty()) throw mqc::invalid_input(std::string(what) + " list is empty");
  return out;
}

ordered_json solver_json(const mqc::SolveResult& res) {
  ordered_json s;
  s["status"] = mqc::to_string(res.status);
  s["objective"] = res.objective;
  s["decisions"] = res.stats.decisions;
  s["propagations"] = res.stats.propagations;
  s["conflicts"] = res.stats.conflicts;
  s["elapsed_s"] = res.stats.elapsed_s;
  s["improvements"] = res.improvements;
  return s;
}

// ---------------------------------------------------------------- gen --

int cmd_gen(int n, std::uint64_t seed, int alter, const std::string& out,
            const std::string& tree_out) {
  mqc::GenSpec spec{n, seed, alter};
  mqc::GeneratedInstance gi = mqc::make_instance(spec);
  std::vector<std::string> comments;
  comments.push_back("# n " + std::to_string(n) + " seed " +
                     std::to_string(seed) + " alter-percent " +
                     std::to_string(alter));
  comments.push_back("# altered " + std::to_string(gi.altered) + " of " +
                     std::to_string(gi.quartets.size()));
  std::ostringstream os;
  mqc::write_qrt(os, gi.quartets, comments);
  write_file(out, os.str());
  if (!tree_out.empty())
    write_file(tree_out, mqc::emit_newick(gi.tree) + "\n");
  std::cout << "wrote " << out << ": n=" << n
            << " quartets=" << gi.quartets.size() << " altered=" << gi.altered
            << "\n";
  return 0;
}

// ---------------------------------------------------------------- run --

int cmd_run(const std::string& model, bool siblings, const std::string& in,
            const std::string& out, const std::string& report,
            double time_limit) {
  mqc::QrtFile qf = load_qrt(in);
  mqc::ModelVariant variant{mqc::parse_model_kind(model), siblings};
  mqc::SolverConfig cfg{time_limit};
  mqc::PipelineResult r = mqc::run_pipeline(qf.quartets, variant, cfg);

  write_file(out, r.newick + "\n");

  if (!report.empty()) {
    ordered_json j;
    j["schema"] = 1;
    j["input"] = in;
    j["provenance"] = qf.comments;
    j["n"] = r.n;
    j["quartets"] = r.quartet_count;
    j["model"] = mqc::to_string(variant.kind);
    j["siblings"] = variant.siblings;
    j["vars"] = r.num_vars;
    j["constraints"] = r.num_constraints;
    j["satisfied"] = r.satisfied;
    j["quartet_errors"] = r.errors;
    j["tree_satisfied"] = r.tree_satisfied;
    j["tree"] = r.newick;
    j["solver"] = solver_json(r.solve);
    if (variant.siblings) {
      ordered_json fixed = ordered_json::array();
      for (const auto& [pi, pj] : r.pinned_pairs) {
        const mqc::SiblingsReport* rep = nullptr;
        for (const auto& cand : r.sibling_reports)
          if (cand.i == pi && cand.j == pj) rep = &cand;
        ordered_json p;
        p["i"] = qf.quartets.taxa().name(pi);
        p["j"] = qf.quartets.taxa().name(pj);
        if (rep != nullptr) {
          p["p1"] = rep->p1;
          p["p2"] = rep->p2;
        }
        fixed.push_back(p);
      }
      j["siblings_fixed"] = fixed;
    }
    write_file(report, j.dump(2) + "\n");
  }

  std::cout << "satisfied " << r.satisfied << " of " << r.quartet_count
            << " (errors " << r.errors << "), vars " << r.num_vars
            << ", constraints " << r.num_constraints << ", elapsed "
            << r.solve.stats.elapsed_s << "s\n";
  return 0;
}

// ------------------------------------------------------------- encode --

int cmd_encode(const std::string& model, bool siblings, const std::string& in,
               const std::string& out, const std::string& map_out) {
  mqc::QrtFile qf = load_qrt(in);
  mqc::ModelVariant variant{mqc::parse_model_kind(model), siblings};
  mqc::EncodeResult enc = mqc::encode(qf.quartets, variant);
  write_file(out, mqc::emit_opb(enc.instance));
  write_file(map_out, mqc::write_map(enc.map));
  std::cout << "vars " << enc.instance.num_vars << ", constraints "
            << enc.instance.constraints.size() << "\n";
  return 0;
}

// -------------------------------------------------------------- solve --

int cmd_solve(const std::string& in, const std::string& out,
              double time_limit) {
  std::istringstream is(read_file(in));
  mqc::pb::Instance inst;
  try {
    inst = mqc::parse_opb(is);
  } catch (const mqc::parse_error& e) {
    throw mqc::parse_error(in + ": " + e.what(), 0);
  }
  mqc::SolveResult res = mqc::solve(inst, mqc::SolverConfig{time_limit});
  if (res.status == mqc::SolveStatus::TimedOut)
    throw mqc::error("time limit reached before optimality was proved");

  mqc::SolutionFile sf;
  sf.improvements = res.improvements;
  if (res.status == mqc::SolveStatus::Optimal) {
    sf.status = mqc::SolutionFile::Status::Optimum;
    sf.values = res.values;
  } else {
    sf.status = mqc::SolutionFile::Status::Unsatisfiable;
  }
  write_file(out, mqc::emit_solution(sf));
  std::cout << mqc::to_string(res.status);
  if (res.status == mqc::SolveStatus::Optimal)
    std::cout << ", objective " << res.objective;
  std::cout << ", decisions " << res.stats.decisions << ", conflicts "
            << res.stats.conflicts << ", elapsed " << res.stats.elapsed_s
            << "s\n";
  return 0;
}

// ------------------------------------------------------------- decode --

int cmd_decode(const std::string& map_in, const std::string& sol_in,
               const std::string& out) {
  mqc::VarMap map;
  {
    std::istringstream is(read_file(map_in));
    try {
      map = mqc::read_map(is);
    } catch (const mqc::parse_error& e) {
      throw mqc::parse_error(map_in + ": " + e.what(), 0);
    }
  }
  mqc::SolutionFile sf;
  {
    std::istringstream is(read_file(sol_in));
    try {
      sf = mqc::parse_solution(is, map.num_vars);
    } catch (const mqc::parse_error& e) {
      throw mqc::parse_error(sol_in + ": " + e.what(), 0);
    }
  }
  if (sf.status != mqc::SolutionFile::Status::Optimum)
    throw mqc::invalid_input(
        "solution file reports unsatisfiable; nothing to decode");

  mqc::DecodedAssignment dec = mqc::decode_assignment(map, sf.values);
  mqc::RootedPhylogeny rooted = mqc::decode_matrix(dec.matrix, map.taxa);
  mqc::UnrootedPhylogeny tree = mqc::unroot(rooted);
  write_file(out, mqc::emit_newick(tree) + "\n");
  std::cout << "satisfied " << dec.satisfied_count << " of "
            << dec.satisfied.size() << "\n";
  return 0;
}

// -------------------------------------------------------------- check --

int cmd_check(const std::string& tree_in, const std::string& in) {
  mqc::UnrootedPhylogeny tree;
  try {
    tree = mqc::parse_newick_unrooted(read_file(tree_in));
  } catch (const mqc::parse_error& e) {
    throw mqc::parse_error(tree_in + ": " + e.what(), 0);
  }
  mqc::QrtFile qf = load_qrt(in);
  int satisfied = mqc::tree_satisfied_count(tree, qf.quartets);
  int total = qf.quartets.size();
  std::cout << "quartets " << total << "\n";
  std::cout << "satisfied " << satisfied << "\n";
  std::cout << "errors " << total - satisfied << "\n";
  return 0;
}

// ------------------------------------------------------------- oracle --

int cmd_oracle(const std::string& in, const std::string& tree_out) {
  mqc::QrtFile qf = load_qrt(in);
  mqc::OracleResult r = mqc::mqc_oracle(qf.quartets);
  std::string newick = mqc::emit_newick(r.witness);
  std::cout << "optimum " << r.optimum << "\n";
  std::cout << "errors " << qf.quartets.size() - r.optimum << "\n";
  std::cout << "trees " << r.trees_examined << "\n";
  std::cout << "witness " << newick << "\n";
  if (!tree_out.empty()) write_file(tree_out, newick + "\n");
  return 0;
}

// -------------------------------------------------------------- bench --

struct BenchJob {
  int n = 0;
  int alter = 0;
  std::uint64_t seed = 0;
  std::string label;  // model label, e.g. "fst+trd"
  mqc::ModelVariant variant;
};

int cmd_bench(const std::string& taxa_list, const std::string& alter_list,
              int seeds, std::uint64_t seed_base,
              const std::string& model_list, const std::string& out, int jobs,
              double time_limit) {
  if (seeds < 1) throw mqc::invalid_input("--seeds must be at least 1");
  if (jobs < 1) throw mqc::invalid_input("--jobs must be at least 1");
  std::vector<int> ns = parse_int_list(taxa_list, "--taxa");
  std::vector<int> alters = parse_int_list(alter_list, "--alter");

  std::vector<std::pair<std::string, mqc::ModelVariant>> models;
  {
    std::stringstream ss(model_list);
    std::string item;
    while (std::getline(ss, item, ','))
      models.emplace_back(item, parse_variant(item));
    if (models.empty()) throw mqc::invalid_input("--models list is empty");
  }

  // Grid in instance-key order: (n, alter, seed, model label).
  std::vector<BenchJob> grid;
  for (int n : ns)
    for (int a : alters)
      for (int s = 0; s < seeds; ++s)
        for (const auto& [label, variant] : models)
          grid.push_back({n, a, seed_base + static_cast<std::uint64_t>(s),
                          label, variant});
  std::stable_sort(grid.begin(), grid.end(),
                   [](const BenchJob& x, const BenchJob& y) {
                     return std::tie(x.n, x.alter, x.seed, x.label) <
                            std::tie(y.n, y.alter, y.seed, y.label);
                   });

  std::vector<std::string> rows(grid.size());
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mu;

  auto worker = [&]() {
    while (!failed.load()) {
      size_t k = next.fetch_add(1);
      if (k >= grid.size()) return;
      const BenchJob& job = grid[k];
      try {
        mqc::GenSpec spec{job.n, job.seed, job.alter};
        mqc::GeneratedInstance gi = mqc::make_instance(spec);
        mqc::PipelineResult r = mqc::run_pipeline(gi.quartets, job.variant,
                                                  mqc::SolverConfig{time_limit});
        std::ostringstream row;
        row << job.n << ',' << job.alter << ',' << job.seed << ','
            << mqc::to_string(job.variant.kind) << ','
            << (job.variant.siblings ? 1 : 0) << ',' << r.quartet_count << ','
            << gi.altered << ',' << r.num_vars << ',' << r.num_constraints
            << ',' << r.satisfied << ',' << r.errors << ','
            << r.tree_satisfied << ',' << r.solve.stats.decisions << ','
            << r.solve.stats.propagations << ',' << r.solve.stats.conflicts
            << ',' << r.solve.stats.elapsed_s << '\n';
        rows[k] = row.str();
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!failed.exchange(true)) first_error = e.what();
        return;
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw mqc::error("bench job failed: " + first_error);

  std::string csv =
      "n,alter_percent,seed,model,siblings,quartets,altered,vars,constraints,"
      "satisfied,errors,tree_satisfied,decisions,propagations,conflicts,"
      "elapsed_s\n";
  for (const std::string& row : rows) csv += row;
  write_file(out, csv);
  std::cout << "wrote " << out << " (" << grid.size() << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maximum quartet consistency toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random benchmark instance");
  int gen_n = 0;
  std::uint64_t gen_seed = 0;
  int gen_alter = 0;
  std::string gen_out, gen_tree;
  gen->add_option("--taxa", gen_n, "number of taxa (>= 4)")->required();
  auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "PRNG seed");
  gen->add_option("--alter", gen_alter,
                  "percent of quartets to rewrite (0..100)");
  gen->add_option("--out", gen_out, "output .qrt path")->required();
  gen->add_option("--tree", gen_tree, "also write the source tree (Newick)");
  gen->callback([&]() {
    std::uint64_t seed = gen_seed_opt->count() ? gen_seed : default_seed();
    rc = cmd_gen(gen_n, seed, gen_alter, gen_out, gen_tree);
  });

  // run
  auto* run = app.add_subcommand("run", "encode, solve and decode in one step");
  std::string run_model = "fst", run_in, run_out, run_report;
  bool run_siblings = false;
  double run_limit = 0.0;
  run->add_option("--model", run_model, "encoding: basic, fst or scd")
      ->required();
  run->add_flag("--siblings", run_siblings, "fix detected sibling pairs");
  run->add_option("--in", run_in, "input .qrt path")->required();
  run->add_option("--out", run_out, "output tree (Newick) path")->required();
  run->add_option("--report", run_report, "JSON report path");
  run->add_option("--time-limit", run_limit, "solver budget in seconds");
  run->callback([&]() {
    rc = cmd_run(run_model, run_siblings, run_in, run_out, run_report,
                 run_limit);
  });

  // encode
  auto* enc = app.add_subcommand("encode", "write the .opb instance and map");
  std::string enc_model = "fst", enc_in, enc_out, enc_map;
  bool enc_siblings = false;
  enc->add_option("--model", enc_model, "encoding: basic, fst or scd")
      ->required();
  enc->add_flag("--siblings", enc_siblings, "fix detected sibling pairs");
  enc->add_option("--in", enc_in, "input .qrt path")->required();
  enc->add_option("--out", enc_out, "output .opb path")->required();
  enc->add_option("--map", enc_map, "output map path")->required();
  enc->callback(
      [&]() { rc = cmd_encode(enc_model, enc_siblings, enc_in, enc_out, enc_map); });

  // solve
  auto* sol = app.add_subcommand("solve", "solve an .opb instance");
  std::string sol_in, sol_out;
  double sol_limit = 0.0;
  sol->add_option("--in", sol_in, "input .opb path")->required();
  sol->add_option("--out", sol_out, "output solution path")->required();
  sol->add_option("--time-limit", sol_limit, "solver budget in seconds");
  sol->callback([&]() { rc = cmd_solve(sol_in, sol_out, sol_limit); });

  // decode
  auto* dec = app.add_subcommand("decode", "turn a solution into a tree");
  std::string dec_map, dec_sol, dec_out;
  dec->add_option("--map", dec_map, "map path from encode")->required();
  dec->add_option("--sol", dec_sol, "solution path from solve")->required();
  dec->add_option("--out", dec_out, "output tree (Newick) path")->required();
  dec->callback([&]() { rc = cmd_decode(dec_map, dec_sol, dec_out); });

  // check
  auto* chk = app.add_subcommand("check", "count quartets a tree satisfies");
  std::string chk_tree, chk_in;
  chk->add_option("--tree", chk_tree, "tree (Newick) path")->required();
  chk->add_option("--in", chk_in, "input .qrt path")->required();
  chk->callback([&]() { rc = cmd_check(chk_tree, chk_in); });

  // oracle
  auto* orc = app.add_subcommand("oracle",
                                 "exhaustive optimum over all trees (n <= 9)");
  std::string orc_in, orc_tree;
  orc->add_option("--in", orc_in, "input .qrt path")->required();
  orc->add_option("--tree", orc_tree, "write the witness tree (Newick)");
  orc->callback([&]() { rc = cmd_oracle(orc_in, orc_tree); });

  // bench
  auto* ben = app.add_subcommand("bench", "run a seeded grid, write CSV");
  std::string ben_taxa = "5,6,7", ben_alter = "0,10,30";
  std::string ben_models = "basic,fst,scd", ben_out;
  int ben_seeds = 3, ben_jobs = 1;
  std::uint64_t ben_base = 1;
  double ben_limit = 0.0;
  ben->add_option("--taxa", ben_taxa, "comma list of taxon counts");
  ben->add_option("--alter", ben_alter, "comma list of percents");
  ben->add_option("--seeds", ben_seeds, "seeds per cell (seed-base..)");
  ben->add_option("--seed-base", ben_base, "first seed");
  ben->add_option("--models", ben_models,
                  "comma list: basic, fst, scd, optionally with +trd");
  ben->add_option("--out", ben_out, "output CSV path")->required();
  ben->add_option("--jobs", ben_jobs, "parallel workers");
  ben->add_option("--time-limit", ben_limit, "per-solve budget in seconds");
  ben->callback([&]() {
    rc = cmd_bench(ben_taxa, ben_alter, ben_seeds, ben_base, ben_models,
                   ben_out, ben_jobs, ben_limit);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const mqc::internal_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const mqc::invalid_input& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mqc::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return rc;
}
