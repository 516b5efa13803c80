#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mqc/encoder.hpp"
#include "mqc/errors.hpp"
#include "mqc/generate.hpp"
#include "mqc/newick.hpp"
#include "mqc/quartets.hpp"
#include "mqc/siblings.hpp"
#include "mqc/solver.hpp"
#include "mqc/trees.hpp"
#include "mqc/ultrametric.hpp"

namespace mqc {

// A generated benchmark instance: the source tree, its quartets with a
// fraction rewritten to a wrong alternative, and how many were rewritten.
struct GeneratedInstance {
  UnrootedPhylogeny tree;
  QuartetSet quartets;
  int altered = 0;
};

inline GeneratedInstance make_instance(const GenSpec& spec) {
  validate(spec);
  GeneratedInstance out;
  out.tree = random_tree(spec);
  QuartetSet derived = derive_all(out.tree);
  out.altered = altered_count(derived.size(), spec.alterPercent);
  out.quartets = alter_quartets(derived, spec);
  return out;
}

// Everything the end-to-end run produces, from instance sizes through the
// decoded phylogeny.
struct PipelineResult {
  ModelVariant variant;
  int n = 0;
  int quartet_count = 0;
  int num_vars = 0;
  int num_constraints = 0;
  SolveResult solve;
  int satisfied = 0;  // quartets satisfied at the optimum (= -objective)
  int errors = 0;     // quartet_count - satisfied
  std::vector<char> satisfied_flags;  // per topology, canonical order
  UltrametricMatrix matrix = UltrametricMatrix(1);
  RootedPhylogeny rooted;
  UnrootedPhylogeny tree;
  std::string newick;
  int tree_satisfied = 0;  // recount on the decoded tree, >= satisfied
  std::vector<SiblingsReport> sibling_reports;
  std::vector<std::pair<int, int>> pinned_pairs;
};

// encode -> solve -> decode -> unroot, with cross-checks at every joint:
// the model must satisfy the instance, the flags must match the matrix,
// the matrix must decode to a tree that does at least as well.
inline PipelineResult run_pipeline(const QuartetSet& q,
                                   const ModelVariant& variant,
                                   const SolverConfig& cfg = {}) {
  PipelineResult out;
  out.variant = variant;
  out.n = q.taxa().size();
  out.quartet_count = q.size();

  EncodeResult enc = encode(q, variant);
  out.num_vars = enc.instance.num_vars;
  out.num_constraints = static_cast<int>(enc.instance.constraints.size());
  out.sibling_reports = std::move(enc.sibling_reports);
  out.pinned_pairs = std::move(enc.pinned_pairs);

  out.solve = solve(enc.instance, cfg);
  if (out.solve.status == SolveStatus::TimedOut)
    throw error("solver hit the time limit before proving optimality");
  if (out.solve.status != SolveStatus::Optimal)
    throw internal_error(
        "instance reported unsatisfiable; ultrametric instances always have "
        "a solution");
  if (!check_model(enc.instance, out.solve.values))
    throw internal_error("solver returned an infeasible assignment");

  DecodedAssignment dec = decode_assignment(enc.map, out.solve.values);
  out.satisfied = dec.satisfied_count;
  out.errors = out.quartet_count - out.satisfied;
  if (out.satisfied != -out.solve.objective)
    throw internal_error("objective and satisfied flags disagree");
  for (size_t t = 0; t < enc.map.topologies.size(); ++t) {
    bool by_matrix = matrix_consistency(dec.matrix, enc.map.topologies[t]);
    if (by_matrix != (dec.satisfied[t] == 1))
      throw internal_error("flag and matrix disagree on a quartet");
  }
  out.satisfied_flags = std::move(dec.satisfied);
  out.matrix = dec.matrix;

  out.rooted = decode_matrix(out.matrix, q.taxa());
  out.tree = unroot(out.rooted);
  out.newick = emit_newick(out.tree);
  out.tree_satisfied = tree_satisfied_count(out.tree, q);
  if (out.tree_satisfied < out.satisfied)
    throw internal_error("decoded tree satisfies fewer quartets than the matrix");
  return out;
}

}  // namespace mqc
