#pragma once

#include <functional>
#include <optional>

#include "rlcp/reformulate.hpp"
#include "rlcp/solver.hpp"

namespace rlcp {

// One negative-eigenvalue direction of a quadratic constraint, with the
// split variable y = sqrt(lambda) nu'v and its box.
struct SplitTerm {
  int quad_index;  // constraint owning the term
  double lambda;   // > 0 (magnitude of the negative eigenvalue)
  Vector nu;       // unit eigenvector over the full variable vector
};

// Eigendecomposition H = Hplus - sum_j lambda_j nu_j nu_j' per quadratic
// constraint; eigenvalues below the tolerance are dropped from both parts.
struct EigenSplit {
  std::vector<Matrix> Hplus;      // per quad constraint (PSD part)
  std::vector<SplitTerm> terms;   // all negative parts, constraint-major order
  static constexpr double kEigTol = 1e-9;
};

EigenSplit eigen_split(const MathProgram& prog);

struct BnbNode {
  std::vector<double> lo, hi;  // per split term
  double lb = -std::numeric_limits<double>::infinity();
  double ub = std::numeric_limits<double>::infinity();
  int id = 0, parent = -1;
};

struct BnbOptions {
  double eps = 1e-4;      // absolute gap tolerance
  int node_cap = 20000;
  double feas_tol = 1e-8;
  std::string trace_path;  // line-delimited node trace when nonempty
};

struct BnbStats {
  int nodes_solved = 0;
  double glb_lb = -std::numeric_limits<double>::infinity();
  double glb_ub = std::numeric_limits<double>::infinity();
  bool converged = false;
  bool lb_monotone = true;
  bool pruning_sound = true;
};

struct BnbResult {
  SolutionPoint incumbent;
  BnbStats stats;
};

// Bounds l_j, u_j of the split variables over the linear relaxation of the
// program (the X-polytope). Throws on unbounded LPs with a remediation hint;
// reports global infeasibility via the optional.
std::optional<std::vector<std::pair<double, double>>> bound_box(
    const MathProgram& prog, const EigenSplit& split);

// Secant relaxation of the program at the node's bounds: convex.
MathProgram relax(const MathProgram& prog, const EigenSplit& split,
                  const BnbNode& node);

// Exact-objective evaluator used for incumbents: given the relaxation's
// variable vector, return the true objective (worst-case value) or +inf.
using ExactEvaluator = std::function<double(const Vector&)>;

BnbResult bnb_solve(const MathProgram& prog, const ExactEvaluator& exact,
                    const BnbOptions& opts);

// Convenience front-end: epigraph objective value recomputed through the
// uncertain problem's exact worst-case gap.
BnbResult bnb_solve(const UncertainLCP& problem, const RcArtifact& art,
                    const BnbOptions& opts = {});

}  // namespace rlcp
