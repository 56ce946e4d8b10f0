#include "rlcp/model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace rlcp {

Matrix AffineFamily::M(const Vector& u) const {
  require(u.size() == L(), ErrorCode::DimensionMismatch,
          "AffineFamily::M: u has length " + std::to_string(u.size()) +
              ", expected " + std::to_string(L()));
  Matrix out = M0;
  for (int l = 0; l < L(); ++l) out += u[l] * Ms[l];
  return out;
}

Vector AffineFamily::q(const Vector& u) const {
  require(u.size() == L(), ErrorCode::DimensionMismatch,
          "AffineFamily::q: u has length " + std::to_string(u.size()) +
              ", expected " + std::to_string(L()));
  Vector out = q0;
  for (int l = 0; l < L(); ++l) out += u[l] * qs[l];
  return out;
}

void AffineFamily::check() const {
  const int nn = n();
  require(M0.rows() == nn && M0.cols() == nn, ErrorCode::DimensionMismatch,
          "AffineFamily: M0 not square");
  require(q0.size() == nn, ErrorCode::DimensionMismatch,
          "AffineFamily: q0 length mismatch");
  require(Ms.size() == qs.size(), ErrorCode::DimensionMismatch,
          "AffineFamily: shift count mismatch between Ms and qs");
  for (int l = 0; l < L(); ++l) {
    require(Ms[l].rows() == nn && Ms[l].cols() == nn,
            ErrorCode::DimensionMismatch,
            "AffineFamily: M_" + std::to_string(l + 1) + " is not n x n");
    require(qs[l].size() == nn, ErrorCode::DimensionMismatch,
            "AffineFamily: q_" + std::to_string(l + 1) + " length mismatch");
  }
}

Vector eval_map(const AffineFamily& fam, const Vector& x, const Vector& u) {
  require(x.size() == fam.n(), ErrorCode::DimensionMismatch,
          "eval_map: x has length " + std::to_string(x.size()) + ", expected " +
              std::to_string(fam.n()));
  return fam.M(u) * x + fam.q(u);
}

std::string set_kind_name(SetKind k) {
  switch (k) {
    case SetKind::BoxInf: return "box_inf";
    case SetKind::BallOne: return "ball_one";
    case SetKind::BallTwo: return "ball_two";
    case SetKind::BoxInfNonneg: return "box_inf_nonneg";
    case SetKind::BallOneNonneg: return "ball_one_nonneg";
    case SetKind::Conic: return "conic";
    case SetKind::CholeskyUA: return "cholesky";
    case SetKind::FiniteScenarios: return "finite";
  }
  return "?";
}

int ConeProduct::dim() const {
  int d = nonneg;
  for (int s : soc) d += s;
  return d;
}

double ConeProduct::margin(const Vector& v) const {
  require(v.size() == dim(), ErrorCode::DimensionMismatch,
          "ConeProduct::margin: dimension mismatch");
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nonneg; ++i) m = std::min(m, v[i]);
  int off = nonneg;
  for (int s : soc) {
    double head = v[off];
    double tail = (s > 1) ? v.segment(off + 1, s - 1).norm() : 0.0;
    m = std::min(m, head - tail);
    off += s;
  }
  return m;
}

bool ConeProduct::contains(const Vector& v, double tol) const {
  return margin(v) >= -tol;
}

static UncertaintySet simple(SetKind k, int L) {
  UncertaintySet s;
  s.kind = k;
  s.dim = L;
  return s;
}

UncertaintySet UncertaintySet::box_inf(int L) { return simple(SetKind::BoxInf, L); }
UncertaintySet UncertaintySet::ball_one(int L) { return simple(SetKind::BallOne, L); }
UncertaintySet UncertaintySet::ball_two(int L) { return simple(SetKind::BallTwo, L); }
UncertaintySet UncertaintySet::box_inf_nonneg(int L) {
  return simple(SetKind::BoxInfNonneg, L);
}
UncertaintySet UncertaintySet::ball_one_nonneg(int L) {
  return simple(SetKind::BallOneNonneg, L);
}

UncertaintySet UncertaintySet::conic_set(ConicSet c) {
  UncertaintySet s = simple(SetKind::Conic, int(c.P.cols()));
  require(c.P.rows() == c.p.size(), ErrorCode::DimensionMismatch,
          "ConicSet: P row count must match p");
  require(c.Q.rows() == 0 || c.Q.rows() == c.P.rows(),
          ErrorCode::DimensionMismatch, "ConicSet: Q row count must match P");
  require(c.K.dim() == int(c.P.rows()), ErrorCode::DimensionMismatch,
          "ConicSet: cone dimension must match P rows");
  s.conic = std::move(c);
  return s;
}

UncertaintySet UncertaintySet::cholesky_ua(CholeskySet c) {
  require(!c.A.empty() && c.A.size() == c.q.size(), ErrorCode::DimensionMismatch,
          "CholeskySet: need A_0..A_L and matching q_0..q_L");
  UncertaintySet s = simple(SetKind::CholeskyUA, int(c.A.size()) - 1);
  s.cholesky = std::move(c);
  return s;
}

UncertaintySet UncertaintySet::finite(std::vector<Vector> us) {
  require(!us.empty(), ErrorCode::InvalidArgument,
          "FiniteScenarios: scenario list is empty");
  UncertaintySet s = simple(SetKind::FiniteScenarios, int(us[0].size()));
  for (const auto& u : us)
    require(u.size() == s.dim, ErrorCode::DimensionMismatch,
            "FiniteScenarios: ragged scenario list");
  s.scenarios = std::move(us);
  return s;
}

bool UncertaintySet::is_norm_ball() const {
  switch (kind) {
    case SetKind::BoxInf:
    case SetKind::BallOne:
    case SetKind::BallTwo:
    case SetKind::BoxInfNonneg:
    case SetKind::BallOneNonneg:
      return true;
    default:
      return false;
  }
}

std::vector<Vector> UncertaintySet::sample(int count, uint64_t seed) const {
  std::vector<Vector> out;
  out.reserve(count);
  const int L = dim;
  for (int k = 0; k < count; ++k) {
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + uint64_t(k));  // per-sample seeding
    Vector u(L);
    switch (kind) {
      case SetKind::BoxInf:
        for (int l = 0; l < L; ++l) u[l] = rng.uniform(-1.0, 1.0);
        break;
      case SetKind::BoxInfNonneg:
        for (int l = 0; l < L; ++l) u[l] = rng.uniform(0.0, 1.0);
        break;
      case SetKind::BallOne: {
        // uniform over the cross-polytope via exponential coordinates
        double s = 0;
        for (int l = 0; l < L; ++l) {
          double e = -std::log(1.0 - rng.uniform());
          u[l] = (rng.uniform() < 0.5 ? -e : e);
          s += std::abs(u[l]);
        }
        double r = std::pow(rng.uniform(), 1.0 / L);
        u *= (s > 0 ? r / s : 0.0);
        break;
      }
      case SetKind::BallOneNonneg: {
        double s = 0;
        for (int l = 0; l < L; ++l) {
          u[l] = -std::log(1.0 - rng.uniform());
          s += u[l];
        }
        double r = std::pow(rng.uniform(), 1.0 / L);
        u *= (s > 0 ? r / s : 0.0);
        break;
      }
      case SetKind::BallTwo:
      case SetKind::CholeskyUA: {
        double s2 = 0;
        for (int l = 0; l < L; ++l) {
          u[l] = rng.normal();
          s2 += u[l] * u[l];
        }
        double r = std::pow(rng.uniform(), 1.0 / L);
        u *= (s2 > 0 ? r / std::sqrt(s2) : 0.0);
        break;
      }
      case SetKind::FiniteScenarios:
        u = scenarios[rng.uniform_int(int(scenarios.size()))];
        break;
      case SetKind::Conic: {
        // Rejection sampling works only when membership is directly checkable
        // (no lifting variables).
        require(conic && conic->Q.cols() == 0, ErrorCode::RouteRefused,
                "sample: conic sets with lifting variables are not samplable");
        // sample from the bounding box [-1,1]^L scaled up, reject outside
        bool ok = false;
        for (int tries = 0; tries < 10000 && !ok; ++tries) {
          for (int l = 0; l < L; ++l) u[l] = rng.uniform(-1.5, 1.5);
          ok = conic->K.contains(conic->P * u + conic->p, 1e-12);
        }
        require(ok, ErrorCode::SolverFailure,
                "sample: rejection sampling failed for conic set");
        break;
      }
    }
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<Vector> UncertaintySet::vertices(int max_dim) const {
  const int L = dim;
  std::vector<Vector> out;
  switch (kind) {
    case SetKind::BoxInf:
    case SetKind::BoxInfNonneg: {
      require(L <= max_dim, ErrorCode::RouteRefused,
              "vertices: box with L > " + std::to_string(max_dim) +
                  " refused (combinatorial blowup)");
      const double lo = (kind == SetKind::BoxInf) ? -1.0 : 0.0;
      for (uint64_t mask = 0; mask < (uint64_t(1) << L); ++mask) {
        Vector u(L);
        for (int l = 0; l < L; ++l) u[l] = (mask >> l & 1) ? 1.0 : lo;
        out.push_back(std::move(u));
      }
      break;
    }
    case SetKind::BallOne: {
      out.push_back(Vector::Zero(L));
      for (int l = 0; l < L; ++l) {
        out.push_back(Vector::Unit(L, l));
        out.push_back(-Vector::Unit(L, l));
      }
      break;
    }
    case SetKind::BallOneNonneg: {
      out.push_back(Vector::Zero(L));
      for (int l = 0; l < L; ++l) out.push_back(Vector::Unit(L, l));
      break;
    }
    case SetKind::FiniteScenarios:
      out = scenarios;
      break;
    default:
      throw Error(ErrorCode::RouteRefused,
                  "vertices: set kind " + set_kind_name(kind) +
                      " has no vertex representation");
  }
  return out;
}

ShiftSign classify_shift(const Matrix& Ml, double tol) {
  Matrix S = 0.5 * (Ml + Ml.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo >= -tol) return ShiftSign::Psd;
  if (hi <= tol) return ShiftSign::Nsd;
  return ShiftSign::Indefinite;
}

UncertainLCP UncertainLCP::make(AffineFamily fam, UncertaintySet set,
                                std::optional<QExtra> extra) {
  fam.check();
  if (set.kind == SetKind::CholeskyUA) {
    const auto& c = *set.cholesky;
    for (const auto& A : c.A)
      require(A.rows() == fam.n() && A.cols() == fam.n(),
              ErrorCode::DimensionMismatch, "CholeskySet: A_l must be n x n");
    for (const auto& qv : c.q)
      require(qv.size() == fam.n(), ErrorCode::DimensionMismatch,
              "CholeskySet: q_l length mismatch");
  } else {
    require(set.dim == fam.L(), ErrorCode::DimensionMismatch,
            "UncertainLCP: uncertainty dimension " + std::to_string(set.dim) +
                " does not match shift count " + std::to_string(fam.L()));
  }
  if (extra) {
    require(extra->set.dim == int(extra->qs.size()), ErrorCode::DimensionMismatch,
            "QExtra: set dimension must match q shift count");
    for (const auto& qv : extra->qs)
      require(qv.size() == fam.n(), ErrorCode::DimensionMismatch,
              "QExtra: q shift length mismatch");
  }
  UncertainLCP p;
  p.family = std::move(fam);
  p.set = std::move(set);
  p.q_extra = std::move(extra);
  for (const auto& Ml : p.family.Ms) p.psd_flags.push_back(classify_shift(Ml));
  return p;
}

bool UncertainLCP::all_shifts_psd() const {
  return std::all_of(psd_flags.begin(), psd_flags.end(),
                     [](ShiftSign s) { return s == ShiftSign::Psd; });
}

bool UncertainLCP::any_m_shift() const {
  for (const auto& Ml : family.Ms)
    if (Ml.cwiseAbs().maxCoeff() > 0.0) return true;
  return false;
}

ExtReal gap_value(const Matrix& M, const Vector& q, const Vector& x,
                  double feas_tol) {
  require(x.minCoeff() >= 0.0, ErrorCode::InvalidArgument,
          "gap_value: x has a negative component");
  Vector F = M * x + q;
  if (F.minCoeff() < -feas_tol) return ExtReal::infinity();
  return x.dot(F);
}

ExtReal gap_value(const AffineFamily& fam, const Vector& x, const Vector& u,
                  double feas_tol) {
  require(x.size() == fam.n(), ErrorCode::DimensionMismatch,
          "gap_value: x length mismatch");
  return gap_value(fam.M(u), fam.q(u), x, feas_tol);
}

double infeasibility_value(const Matrix& M, const Vector& q, const Vector& x) {
  Vector F = M * x + q;
  return (-F).cwiseMax(0.0).sum();
}

ProbeSpec ProbeSpec::auto_probe(const UncertainLCP& p) {
  if (p.set.kind == SetKind::FiniteScenarios) return scenarios();
  if ((p.set.kind == SetKind::BoxInf || p.set.kind == SetKind::BoxInfNonneg) &&
      p.set.dim <= 16)
    return vertices();
  return uniform();
}

namespace {

// Evaluations of the full map at a concrete u; the independent q-extension is
// folded in by extending u with the extra coordinates.
struct ScenarioEval {
  Matrix M;
  Vector q;
};

ScenarioEval eval_scenario(const UncertainLCP& p, const Vector& u_main,
                           const Vector& u_extra) {
  ScenarioEval e;
  if (p.set.kind == SetKind::CholeskyUA) {
    const auto& c = *p.set.cholesky;
    Matrix A = c.A[0];
    Vector q = c.q[0];
    for (int l = 0; l < c.L(); ++l) {
      A += u_main[l] * c.A[l + 1];
      q += u_main[l] * c.q[l + 1];
    }
    e.M = A.transpose() * A;
    e.q = q;
  } else {
    e.M = p.family.M(u_main);
    e.q = p.family.q(u_main);
  }
  if (p.q_extra) {
    for (int l = 0; l < int(p.q_extra->qs.size()); ++l)
      e.q += u_extra[l] * p.q_extra->qs[l];
  }
  return e;
}

}  // namespace

ResidualReport residual_report(const UncertainLCP& problem, const Vector& x,
                               const ProbeSpec& probe) {
  require(x.size() == problem.n(), ErrorCode::DimensionMismatch,
          "residual_report: x length mismatch");
  std::vector<Vector> us;
  std::vector<Vector> extras;
  switch (probe.mode) {
    case ProbeSpec::Mode::Scenarios:
      require(problem.set.kind == SetKind::FiniteScenarios,
              ErrorCode::InvalidArgument,
              "residual_report: scenario probe on a non-finite set");
      us = problem.set.scenarios;
      break;
    case ProbeSpec::Mode::BoxVertices:
      us = problem.set.vertices();
      break;
    case ProbeSpec::Mode::Uniform:
      us = problem.set.sample(probe.samples, probe.seed);
      break;
  }
  if (problem.q_extra) {
    // pair each main sample with an extreme/sampled extra coordinate
    switch (probe.mode) {
      case ProbeSpec::Mode::Uniform:
        extras = problem.q_extra->set.sample(int(us.size()), probe.seed + 1);
        break;
      default: {
        // cross product with the extra set's vertices
        auto vs = problem.q_extra->set.vertices();
        std::vector<Vector> us2, ex2;
        for (const auto& u : us)
          for (const auto& v : vs) {
            us2.push_back(u);
            ex2.push_back(v);
          }
        us = std::move(us2);
        extras = std::move(ex2);
        break;
      }
    }
  }

  ResidualReport rep;
  rep.x = x;
  rep.worst_gap = ExtReal(-std::numeric_limits<double>::infinity());
  rep.infeasibility = 0.0;
  for (size_t k = 0; k < us.size(); ++k) {
    Vector ex = extras.empty() ? Vector() : extras[k];
    ScenarioEval e = eval_scenario(problem, us[k], ex);
    ExtReal g = gap_value(e.M, e.q, x);
    rep.infeasibility =
        std::max(rep.infeasibility, infeasibility_value(e.M, e.q, x));
    rep.worst_gap = ExtReal::max(rep.worst_gap, g);
    rep.per_scenario.emplace_back(us[k], g);
  }
  return rep;
}

// Closed-form max over the set of c0 + w'u (affine in u).
static double ball_max_affine(const UncertaintySet& s, const Vector& w) {
  switch (s.kind) {
    case SetKind::BoxInf: return w.cwiseAbs().sum();
    case SetKind::BallOne: return w.size() ? w.cwiseAbs().maxCoeff() : 0.0;
    case SetKind::BallTwo: return w.norm();
    case SetKind::BoxInfNonneg: return w.cwiseMax(0.0).sum();
    case SetKind::BallOneNonneg:
      return w.size() ? std::max(0.0, w.maxCoeff()) : 0.0;
    default:
      throw Error(ErrorCode::RouteRefused,
                  "exact worst-case evaluation needs a norm-ball set");
  }
}

ExtReal exact_worst_gap(const UncertainLCP& problem, const Vector& x,
                        double feas_tol) {
  require(x.minCoeff() >= -0.0, ErrorCode::InvalidArgument,
          "exact_worst_gap: x has a negative component");
  if (problem.set.kind == SetKind::FiniteScenarios) {
    ExtReal worst(-std::numeric_limits<double>::infinity());
    for (const auto& u : problem.set.scenarios)
      worst = ExtReal::max(worst, gap_value(problem.family, x, u, feas_tol));
    return worst;
  }
  require(problem.set.is_norm_ball(), ErrorCode::RouteRefused,
          "exact_worst_gap: unsupported set kind " +
              set_kind_name(problem.set.kind));
  const auto& fam = problem.family;
  const int L = fam.L();
  // gap(x,u) = c0 + sum_l u_l w_l with w_l = x'M_l x + q_l'x
  double c0 = x.dot(fam.M0 * x) + fam.q0.dot(x);
  Vector w(L);
  for (int l = 0; l < L; ++l) w[l] = x.dot(fam.Ms[l] * x) + fam.qs[l].dot(x);
  double worst = c0 + ball_max_affine(problem.set, w);
  // feasibility: min over u of row i of M(u)x + q(u)
  Vector F0 = fam.M0 * x + fam.q0;
  for (int i = 0; i < problem.n(); ++i) {
    Vector wi(L);
    for (int l = 0; l < L; ++l) wi[l] = fam.Ms[l].row(i).dot(x) + fam.qs[l][i];
    double lo = F0[i] - ball_max_affine(problem.set, Vector(-wi));
    if (lo < -feas_tol) return ExtReal::infinity();
  }
  if (problem.q_extra) {
    const auto& ex = *problem.q_extra;
    const int Le = int(ex.qs.size());
    Vector we(Le);
    for (int l = 0; l < Le; ++l) we[l] = ex.qs[l].dot(x);
    worst += ball_max_affine(ex.set, we);
    for (int i = 0; i < problem.n(); ++i) {
      Vector wi(Le);
      for (int l = 0; l < Le; ++l) wi[l] = ex.qs[l][i];
      // row lower bound must account for both contributions jointly
      Vector wmain(L);
      for (int l = 0; l < L; ++l)
        wmain[l] = fam.Ms[l].row(i).dot(x) + fam.qs[l][i];
      double lo = F0[i] - ball_max_affine(problem.set, Vector(-wmain)) -
                  ball_max_affine(ex.set, Vector(-wi));
      if (lo < -feas_tol) return ExtReal::infinity();
    }
  }
  return worst;
}

double exact_infeasibility(const UncertainLCP& problem, const Vector& x) {
  // e' max(-F, 0) is convex in u; exact on polytope kinds via vertices,
  // exhaustive on finite lists.
  std::vector<Vector> us;
  if (problem.set.kind == SetKind::FiniteScenarios)
    us = problem.set.scenarios;
  else
    us = problem.set.vertices();
  std::vector<Vector> extras;
  if (problem.q_extra) {
    auto vs = problem.q_extra->set.vertices();
    std::vector<Vector> us2;
    for (const auto& u : us)
      for (const auto& v : vs) {
        us2.push_back(u);
        extras.push_back(v);
      }
    us = std::move(us2);
  }
  double worst = 0.0;
  for (size_t k = 0; k < us.size(); ++k) {
    Vector ex = extras.empty() ? Vector() : extras[k];
    ScenarioEval e = eval_scenario(problem, us[k], ex);
    worst = std::max(worst, infeasibility_value(e.M, e.q, x));
  }
  return worst;
}

SymmetrizePair symmetrize(const AffineFamily& fam) {
  SymmetrizePair out{fam, fam};
  out.sym.M0 = 0.5 * (fam.M0 + fam.M0.transpose());
  for (auto& Ml : out.sym.Ms) Ml = 0.5 * (Ml + Ml.transpose());
  return out;
}

}  // namespace rlcp
