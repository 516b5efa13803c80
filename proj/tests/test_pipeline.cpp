#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "helpers.hpp"

using namespace mqc;

TEST_CASE("instance making derives, counts, and alters deterministically",
          "[pipeline]") {
  GenSpec spec{6, 9, 30};
  GeneratedInstance inst = make_instance(spec);
  CHECK(inst.quartets.size() == 15);
  CHECK(inst.altered == 4);
  CHECK(is_complete(inst.quartets));
  int differing = 0;
  QuartetSet original = derive_all(inst.tree);
  for (const auto& t : original.topologies())
    differing += !(*inst.quartets.find(t.subset()) == t);
  CHECK(differing == inst.altered);

  GeneratedInstance again = make_instance(spec);
  CHECK(emit_newick(again.tree) == emit_newick(inst.tree));
  CHECK(again.quartets.topologies() == inst.quartets.topologies());
}

TEST_CASE("clean instances recover their source tree exactly", "[pipeline]") {
  for (int n : {5, 6}) {
    for (std::uint64_t seed : {1ull, 2ull}) {
      GeneratedInstance inst = make_instance({n, seed, 0});
      for (ModelKind kind :
           {ModelKind::Basic, ModelKind::Fst, ModelKind::Scd}) {
        PipelineResult r = run_pipeline(inst.quartets, {kind, false});
        CHECK(r.satisfied == choose4(n));
        CHECK(r.errors == 0);
        CHECK(r.tree_satisfied == choose4(n));
        CHECK(trees_isomorphic(r.tree, inst.tree));
        CHECK(is_ultrametric(r.matrix));
        CHECK(r.newick == emit_newick(r.tree));
      }
    }
  }
}

TEST_CASE("every joint of the pipeline result is cross-consistent",
          "[pipeline]") {
  GenSpec spec{6, 17, 30};
  GeneratedInstance inst = make_instance(spec);
  PipelineResult r = run_pipeline(inst.quartets, {ModelKind::Fst, false});
  CHECK(r.n == 6);
  CHECK(r.quartet_count == 15);
  CHECK(r.satisfied + r.errors == 15);
  CHECK(r.satisfied == -r.solve.objective);
  int flags = 0;
  for (char f : r.satisfied_flags) flags += f;
  CHECK(flags == r.satisfied);
  CHECK(r.tree_satisfied >= r.satisfied);
  CHECK(r.tree_satisfied == tree_satisfied_count(r.tree, inst.quartets));
  CHECK(matrix_satisfied_count(r.matrix, inst.quartets) == r.satisfied);
  CHECK(ultrametric_of(r.rooted) == r.matrix);
}

TEST_CASE("all six variants report one optimum", "[pipeline]") {
  GenSpec spec{6, 23, 30};
  GeneratedInstance inst = make_instance(spec);
  int satisfied = -1;
  for (ModelKind kind : {ModelKind::Basic, ModelKind::Fst, ModelKind::Scd}) {
    for (bool siblings : {false, true}) {
      PipelineResult r = run_pipeline(inst.quartets, {kind, siblings});
      if (satisfied < 0) satisfied = r.satisfied;
      INFO(variant_name({kind, siblings}));
      CHECK(r.satisfied == satisfied);
    }
  }
}

TEST_CASE("pipeline optima match the tree-enumeration oracle", "[pipeline]") {
  for (std::uint64_t seed : {3ull, 4ull}) {
    GenSpec spec{5, seed, 30};
    GeneratedInstance inst = make_instance(spec);
    OracleResult want = mqc_oracle(inst.quartets);
    PipelineResult got = run_pipeline(inst.quartets, {ModelKind::Fst, false});
    CHECK(got.satisfied == want.optimum);
  }
}

TEST_CASE("an empty quartet set still decodes to a valid tree", "[pipeline]") {
  QuartetSet q(default_taxa(5));
  PipelineResult r = run_pipeline(q, {ModelKind::Scd, false});
  CHECK(r.quartet_count == 0);
  CHECK(r.satisfied == 0);
  CHECK(r.errors == 0);
  r.tree.validate();
  CHECK(is_ultrametric(r.matrix));
}

TEST_CASE("a vanishing time limit surfaces as a timeout error", "[pipeline]") {
  GeneratedInstance inst = make_instance({7, 1, 30});
  SolverConfig cfg;
  cfg.time_limit_s = 1e-9;
  CHECK_THROWS_AS(run_pipeline(inst.quartets, {ModelKind::Basic, false}, cfg),
                  mqc::error);
}

TEST_CASE("sibling preprocessing keeps the optimum on altered instances",
          "[pipeline]") {
  for (std::uint64_t seed : {5ull, 6ull, 7ull}) {
    GenSpec spec{6, seed, 10};
    GeneratedInstance inst = make_instance(spec);
    PipelineResult plain = run_pipeline(inst.quartets, {ModelKind::Fst, false});
    PipelineResult fixed = run_pipeline(inst.quartets, {ModelKind::Fst, true});
    CHECK(fixed.satisfied == plain.satisfied);
    REQUIRE(!fixed.sibling_reports.empty());
  }
}

TEST_CASE("contradictory sibling flags are pinned one per taxon at most",
          "[pipeline]") {
  // On noisy input the counting test can flag two pairs sharing a taxon;
  // no binary tree realizes both, so pinning must keep a conflict-free
  // subset instead of making the instance infeasible.
  GeneratedInstance inst = make_instance({5, 1, 30});
  OracleResult oracle = mqc_oracle(inst.quartets);
  for (ModelKind kind : {ModelKind::Basic, ModelKind::Fst, ModelKind::Scd}) {
    PipelineResult r = run_pipeline(inst.quartets, {kind, true});
    CHECK(r.satisfied == oracle.optimum);
    std::set<int> taxa_used;
    for (auto [i, j] : r.pinned_pairs) {
      CHECK(taxa_used.insert(i).second);
      CHECK(taxa_used.insert(j).second);
      bool flagged = false;
      for (const SiblingsReport& rep : r.sibling_reports)
        flagged = flagged || (rep.i == i && rep.j == j && rep.isSibling);
      CHECK(flagged);
    }
  }
}
