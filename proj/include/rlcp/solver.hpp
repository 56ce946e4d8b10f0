#pragma once

#include <functional>
#include <optional>

#include "rlcp/program_ir.hpp"
#include "rlcp/types.hpp"

namespace rlcp {

struct SolverRequest {
  const MathProgram* prog = nullptr;
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;  // relative duality-gap target
  int max_iter = 200;
  std::optional<Vector> warm;

  SolverRequest() = default;
  explicit SolverRequest(const MathProgram& p) : prog(&p) {}
  void check() const {
    require(prog != nullptr, ErrorCode::InvalidArgument, "request: no program");
    require(max_iter > 0, ErrorCode::InvalidArgument, "request: cap must be positive");
    require(feas_tol > 0 && feas_tol < 1 && gap_tol > 0 && gap_tol < 1,
            ErrorCode::InvalidArgument, "request: tolerances must lie in (0,1)");
  }
};

// Per-constraint multipliers in the original program's terms.
struct Duals {
  Vector var_nonneg;          // one per variable (0 for free vars)
  Vector lin;                 // one per linear constraint (sign: Ge>=0, Le<=0 folded)
  Vector quad;                // one per quadratic constraint, >= 0
  std::vector<Vector> soc;    // per SOC constraint: (z0; z1) with ||z1|| <= z0
};

struct SolveOutput {
  SolutionPoint point;
  Duals duals;
};

SolutionPoint solve_lp(const SolverRequest& req);
SolutionPoint solve_convex(const SolverRequest& req);
SolveOutput solve_convex_full(const SolverRequest& req);

// Multistart local solve for (possibly nonconvex) QCQPs. Returns the best KKT
// point found over `starts` seeded starts; convex inputs fall back to
// solve_convex.
SolutionPoint solve_local(const SolverRequest& req, int starts = 20,
                          uint64_t seed = 0);

// Independent optimality checker: recomputes feasibility, stationarity and
// complementarity residuals from the program data and reported multipliers.
struct KktResidual {
  double feasibility = 0.0;
  double stationarity = 0.0;
  double complementarity = 0.0;
  bool within(double tol) const {
    return feasibility <= tol && stationarity <= tol && complementarity <= tol;
  }
};
KktResidual check_kkt(const MathProgram& prog, const Vector& v, const Duals& duals);

// External SDP solve: emits SDPA, invokes the configured command, parses the
// solution file, and verifies LMI feasibility before reporting optimal.
struct ExternalSdpConfig {
  std::string command;       // e.g. "csdp"; invoked as: command in.dat-s out.sol
  std::string work_dir = "."; // scratch directory for the .dat-s/.sol pair
  static ExternalSdpConfig from_environment();  // RLCP_SDP_SOLVER
  bool configured() const { return !command.empty(); }
};
SolutionPoint sdp_roundtrip(const MathProgram& prog, const ExternalSdpConfig& cfg);

// Parse an SDPA-style solution file (first line or "xVec" block holds the
// primal variable values). Exposed for tests of the error path.
Vector parse_sdpa_solution(const std::string& text, int nvars);

}  // namespace rlcp
