#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rlcp/types.hpp"

namespace rlcp {

// Affine family M(u) = M0 + sum_l u_l M_l, q(u) = q0 + sum_l u_l q_l.
struct AffineFamily {
  Matrix M0;
  Vector q0;
  std::vector<Matrix> Ms;  // shift matrices M_1..M_L
  std::vector<Vector> qs;  // shift vectors q_1..q_L

  int n() const { return int(M0.rows()); }
  int L() const { return int(Ms.size()); }

  Matrix M(const Vector& u) const;
  Vector q(const Vector& u) const;
  void check() const;  // dimension invariants
};

Vector eval_map(const AffineFamily& fam, const Vector& x, const Vector& u);

enum class SetKind {
  BoxInf,         // ||u||_inf <= 1
  BallOne,        // ||u||_1 <= 1
  BallTwo,        // ||u||_2 <= 1
  BoxInfNonneg,   // ||u||_inf <= 1, u >= 0
  BallOneNonneg,  // ||u||_1 <= 1, u >= 0
  Conic,          // { u : exists nu, P u + Q nu + p in K }
  CholeskyUA,     // M = A(xi)'A(xi), q = q(xi), ||xi||_2 <= 1
  FiniteScenarios,
};

std::string set_kind_name(SetKind k);

// Cartesian product of a nonnegative orthant and second-order cones.
struct ConeProduct {
  int nonneg = 0;
  std::vector<int> soc;  // block dimensions, each >= 1 (head + tail)
  int dim() const;
  bool contains(const Vector& v, double tol) const;
  // margin by which v is inside the cone (negative if outside)
  double margin(const Vector& v) const;
};

struct ConicSet {
  Matrix P;  // m x L
  Matrix Q;  // m x k  (k may be 0)
  Vector p;  // m
  ConeProduct K;
};

struct CholeskySet {
  std::vector<Matrix> A;  // A_0..A_L
  std::vector<Vector> q;  // q_0..q_L
  int L() const { return int(A.size()) - 1; }
};

struct UncertaintySet {
  SetKind kind;
  int dim = 0;  // length of u (or xi)
  std::optional<ConicSet> conic;
  std::optional<CholeskySet> cholesky;
  std::vector<Vector> scenarios;

  static UncertaintySet box_inf(int L);
  static UncertaintySet ball_one(int L);
  static UncertaintySet ball_two(int L);
  static UncertaintySet box_inf_nonneg(int L);
  static UncertaintySet ball_one_nonneg(int L);
  static UncertaintySet conic_set(ConicSet c);
  static UncertaintySet cholesky_ua(CholeskySet c);
  static UncertaintySet finite(std::vector<Vector> us);

  bool is_norm_ball() const;  // one of the five norm-ball kinds
  bool nonneg_restricted() const {
    return kind == SetKind::BoxInfNonneg || kind == SetKind::BallOneNonneg;
  }
  // u-samples: deterministic for a fixed seed, per-sample seeding.
  std::vector<Vector> sample(int count, uint64_t seed) const;
  // vertex list for polyhedral kinds (BoxInf, BoxInfNonneg, BallOne, BallOneNonneg)
  std::vector<Vector> vertices(int max_dim = 16) const;
};

enum class ShiftSign { Psd, Nsd, Indefinite };

// Independent q-only uncertainty, added on top of the shared-u family
// (the mixed independent (M,q) case; contributions are summed).
struct QExtra {
  std::vector<Vector> qs;
  UncertaintySet set;
};

struct UncertainLCP {
  AffineFamily family;
  UncertaintySet set;
  std::optional<QExtra> q_extra;
  std::vector<ShiftSign> psd_flags;  // per shift, from symmetrized spectra

  static constexpr double kPsdTol = 1e-9;
  static UncertainLCP make(AffineFamily fam, UncertaintySet set,
                           std::optional<QExtra> extra = std::nullopt);
  int n() const { return family.n(); }
  bool all_shifts_psd() const;
  bool any_m_shift() const;  // any nonzero M_l
};

ShiftSign classify_shift(const Matrix& Ml, double tol = UncertainLCP::kPsdTol);

// Gap function: x'(M(u)x+q(u)) if M(u)x+q(u) >= -feas_tol componentwise,
// +inf otherwise. Requires x >= 0.
ExtReal gap_value(const AffineFamily& fam, const Vector& x, const Vector& u,
                  double feas_tol = 1e-8);

// Gap/infeasibility for an explicit (M, q) pair (finite-scenario evaluation).
ExtReal gap_value(const Matrix& M, const Vector& q, const Vector& x,
                  double feas_tol = 1e-8);
double infeasibility_value(const Matrix& M, const Vector& q, const Vector& x);

struct ProbeSpec {
  enum class Mode { Scenarios, BoxVertices, Uniform };
  Mode mode = Mode::Uniform;
  int samples = 10000;
  uint64_t seed = 0;

  static ProbeSpec scenarios() { return {Mode::Scenarios, 0, 0}; }
  static ProbeSpec vertices() { return {Mode::BoxVertices, 0, 0}; }
  static ProbeSpec uniform(int n = 10000, uint64_t seed = 0) {
    return {Mode::Uniform, n, seed};
  }
  // Default policy: exact scenarios/vertices where available, else sampling.
  static ProbeSpec auto_probe(const UncertainLCP& p);
};

struct ResidualReport {
  Vector x;
  ExtReal worst_gap;
  double infeasibility = 0.0;
  std::vector<std::pair<Vector, ExtReal>> per_scenario;
};

ResidualReport residual_report(const UncertainLCP& problem, const Vector& x,
                               const ProbeSpec& probe);

// Exact worst-case gap / infeasibility for kinds where the dependence on u is
// affine for fixed x (all norm-ball kinds, finite scenarios). Closed-form in
// the ball cases; vertex/enumer otherwise. Throws RouteRefused for
// Conic/CholeskyUA.
ExtReal exact_worst_gap(const UncertainLCP& problem, const Vector& x,
                        double feas_tol = 1e-8);
double exact_infeasibility(const UncertainLCP& problem, const Vector& x);

struct SymmetrizePair {
  AffineFamily sym;       // quadratic-form family (all matrices symmetrized)
  AffineFamily original;  // unchanged, for constraint rows
};

SymmetrizePair symmetrize(const AffineFamily& fam);

}  // namespace rlcp
