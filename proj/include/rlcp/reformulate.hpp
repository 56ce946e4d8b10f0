#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rlcp/model.hpp"
#include "rlcp/program_ir.hpp"

namespace rlcp {

enum class Route {
  QUncertainBox,     // q-only shifts over the infinity box
  QUncertainBall1,   // q-only shifts over the 1-ball
  QUncertainBall2,   // q-only shifts over the 2-ball
  QConic,            // q-only shifts over a conic-representable set
  PsdShiftsNonneg,   // PSD M-shifts over a nonnegative box / simplex
  HiddenConvex,      // PSD M-shifts over sign-unrestricted sets
  CholeskySdp,       // (M,q) = (A'A, q) family over the 2-ball
  GeneralNonconvex,  // unrestricted shifts, epigraph QCQP
  ConicGeneral,      // unrestricted shifts over a conic set
  Scenarios,         // finite scenario list
  AviSdp,            // affine VI with square-root family
};

std::string route_name(Route r);

struct RcArtifact {
  MathProgram program;
  std::vector<std::string> x_slot;  // names of the n primal variables
  int x_index = 0;                  // first index of the x block
  int n = 0;
  std::string t_slot;               // epigraph variable name ("" if none)
  int t_index = -1;
  Route route;

  Vector extract_x(const SolutionPoint& sp) const {
    require(sp.v.size() >= x_index + n, ErrorCode::DimensionMismatch,
            "extract_x: solution too short");
    return sp.v.segment(x_index, n);
  }
};

// --- Table 8 builders -------------------------------------------------------

// q-uncertain monotone LCP over the three symmetric norm balls.
RcArtifact rc_q_uncertain(const UncertainLCP& problem);

// q-uncertain monotone LCP over a conic-representable set.
RcArtifact rc_q_conic(const UncertainLCP& problem);

// PSD M-shifts over nonnegative box / 1-ball restrictions, deterministic q.
RcArtifact rc_psd_shifts_nonneg(const UncertainLCP& problem);

// PSD M-shifts over sign-unrestricted balls, deterministic q (hidden
// convexity).
RcArtifact rc_hidden_convex(const UncertainLCP& problem);

// Cholesky-factor family: one arrowhead LMI plus per-row LMIs (SDP).
RcArtifact rc_cholesky_sdp(const UncertainLCP& problem);

// Unrestricted shifts: nonconvex epigraph QCQP.
RcArtifact rc_general_nonconvex(const UncertainLCP& problem);

// Unrestricted shifts over a conic set: quadratic-equality program.
RcArtifact rc_conic_general(const UncertainLCP& problem);

// Finite scenario list: one epigraph and one feasibility block per scenario.
RcArtifact rc_finite_scenarios(const UncertainLCP& problem);

// Replace a box set by its vertex list (exact for affine dependence on u).
UncertainLCP box_vertex_reduction(const UncertainLCP& problem, int max_dim = 16);

// Worst-case gap at a fixed point for any supported set kind (closed form on
// norm balls and finite lists, small conic solves for U_c, LMI searches for
// the Cholesky family).
ExtReal robust_worst_gap(const UncertainLCP& problem, const Vector& x,
                         double feas_tol = 1e-8);

enum class RouteChoice { Auto, Prop32, Prop33, Prop34, Prop37, Thm39, Prop42 };
Route route_auto(const UncertainLCP& problem);
RcArtifact build_rc(const UncertainLCP& problem, RouteChoice choice = RouteChoice::Auto);

// --- AVI and MPCC reductions ------------------------------------------------

struct AviFamily {
  Matrix M0;               // n x n
  std::vector<Matrix> Ms;
  Matrix C0;               // m x n
  std::vector<Matrix> Cs;
  Vector b0;               // m
  std::vector<Vector> bs;
  Vector q0;               // n
  std::vector<Vector> qs;
  int n() const { return int(M0.rows()); }
  int m() const { return int(C0.rows()); }
  int L() const { return int(Ms.size()); }
};

// KKT embedding of the AVI into an (n+m)-dimensional uncertain LCP.
UncertainLCP avi_to_lcp(const AviFamily& avi, UncertaintySet set);

// Affine VI with M(u) = S(u)'S(u) over the 2-ball: epigraph LMI + per-row
// LMIs + second-order rows, assembled as a linear+PSD program (SDPA-ready).
struct AviSqrtFamily {
  Matrix S0;
  std::vector<Matrix> Ss;  // n x n, M(u) = S(u)'S(u)
  Matrix C0;
  std::vector<Matrix> Cs;  // m x n
  Vector b0;
  std::vector<Vector> bs;
  Vector q0;
  std::vector<Vector> qs;
  int n() const { return int(S0.rows()); }
  int m() const { return int(C0.rows()); }
  int L() const { return int(Ss.size()); }
};
RcArtifact rc_avi_sdp(const AviSqrtFamily& avi);

// Mathematical program with an uncertain complementarity constraint:
// lower-level robust counterpart replaced by its KKT system.
struct MpccData {
  Objective f;                        // over (x, y)
  std::vector<LinearConstraint> h;    // over (x, y), h >= 0 rows
  Matrix A;                           // ny x nx coupling: F = Ax + M(u)y + q
  Matrix M0;
  std::vector<Matrix> Ms;             // PSD shifts over y
  Vector q;
  UncertaintySet set;                 // BoxInf, BallOne or BallTwo
  int nx() const { return int(A.cols()); }
  int ny() const { return int(A.rows()); }
};

struct MpccArtifact {
  MathProgram program;
  // complementarity pairs: (linear-row index, variable index); the row's
  // slack and the variable are complementary
  std::vector<std::pair<int, int>> compl_pairs;
  int x_index = 0, y_index = 0;
};

MpccArtifact mpcc_reformulate(const MpccData& data);

// --- LMI evaluators (no SDP solver required) --------------------------------
// Exact worst-case epigraph value max_{||xi||<=1} x'M(xi)x + q(xi)'x and the
// robust row minimum min_{||xi||<=1} [M(xi)x + q(xi)]_i for the Cholesky
// family, computed by one-dimensional searches over the LMI scalars.
double cholesky_epigraph_value(const CholeskySet& set, const Vector& x);
double cholesky_row_min(const CholeskySet& set, const Vector& x, int i);

// Feasible point of the Theorem-3.9 program at fixed x: returns (t, tau, y1,
// y2) satisfying every LMI, or feasible=false when a row is robustly violated.
struct LmiFeasPoint {
  bool feasible = false;
  double t = 0, tau = 0;
  Vector y1, y2;
};
LmiFeasPoint cholesky_feasible_point(const CholeskySet& set, const Vector& x);
LmiFeasPoint avi_sdp_feasible_point(const AviSqrtFamily& avi, const Vector& z);

}  // namespace rlcp
