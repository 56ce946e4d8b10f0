#pragma once

#include <vector>

#include "rlcp/program_ir.hpp"
#include "rlcp/types.hpp"

namespace rlcp {

// Cone: nonnegative orthant block followed by second-order cone blocks.
struct ConeDims {
  int nonneg = 0;
  std::vector<int> soc;
  int size() const {
    int s = nonneg;
    for (int k : soc) s += k;
    return s;
  }
  int degree() const { return nonneg + int(soc.size()); }
};

// min (1/2) x'P x + c'x  s.t.  G x + s = h, s in K;  A x = b.
struct ConicStandardForm {
  Matrix P;  // n x n, PSD (may be 0x0 for LP)
  Vector c;
  Matrix G;
  Vector h;
  ConeDims K;
  Matrix A;  // 0 x n when absent
  Vector b;
};

struct IpmOptions {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;     // absolute complementarity gap target
  double rel_gap_tol = 1e-9;
  int max_iter = 200;
  bool best_effort = true;   // keep pushing past tolerance until stall
};

struct IpmResult {
  SolveStatus status = SolveStatus::Failed;
  Vector x, s, z, y;
  double pobj = 0, dobj = 0, gap = 0, relgap = 0, pres = 0, dres = 0;
  int iters = 0;
};

IpmResult solve_conic(const ConicStandardForm& prob, const IpmOptions& opts);

// Strict feasibility margin: max t s.t. Ax = b, Gx + t e <= _K h, t <= 1.
// Returns the margin and, when the system is infeasible, a Farkas certificate
// z* in K*, A'y + G'z = 0, b'y + h'z < 0 (stored in result.z / result.y).
IpmResult feasibility_phase(const ConicStandardForm& prob, const IpmOptions& opts);

}  // namespace rlcp
