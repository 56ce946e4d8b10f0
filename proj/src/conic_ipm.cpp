#include "rlcp/conic_ipm.hpp"
#include <cstdio>
#include <cstdlib>

#include <Eigen/Cholesky>
#include <cmath>

namespace rlcp {

namespace {

constexpr double kStepBack = 0.99;

// Blockwise cone utilities over K = R^nonneg_+ x SOC(k1) x ...
struct ConeOps {
  const ConeDims& K;
  explicit ConeOps(const ConeDims& k) : K(k) {}

  template <class F>
  void for_soc(const F& f) const {
    int off = K.nonneg;
    for (int k : K.soc) {
      f(off, k);
      off += k;
    }
  }

  // identity element e of the Jordan algebra
  Vector identity() const {
    Vector e = Vector::Zero(K.size());
    e.head(K.nonneg).setOnes();
    for_soc([&](int off, int) { e[off] = 1.0; });
    return e;
  }

  double min_margin(const Vector& u) const {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < K.nonneg; ++i) m = std::min(m, u[i]);
    for_soc([&](int off, int k) {
      double tail = (k > 1) ? u.segment(off + 1, k - 1).norm() : 0.0;
      m = std::min(m, u[off] - tail);
    });
    return m;
  }

  // largest t such that u + tau*d in K for all tau in [0, t]; u strictly interior
  double max_step(const Vector& u, const Vector& d) const {
    double t = std::numeric_limits<double>::infinity();
    for (int i = 0; i < K.nonneg; ++i)
      if (d[i] < 0) t = std::min(t, -u[i] / d[i]);
    for_soc([&](int off, int k) {
      const double u0 = u[off], d0 = d[off];
      Vector u1 = (k > 1) ? Vector(u.segment(off + 1, k - 1)) : Vector();
      Vector d1 = (k > 1) ? Vector(d.segment(off + 1, k - 1)) : Vector();
      const double a = d0 * d0 - d1.squaredNorm();
      const double b = 2.0 * (u0 * d0 - u1.dot(d1));
      const double c = u0 * u0 - u1.squaredNorm();
      double root = std::numeric_limits<double>::infinity();
      if (std::abs(a) < 1e-300) {
        if (b < 0) root = -c / b;
      } else {
        const double disc = b * b - 4.0 * a * c;
        if (disc >= 0) {
          const double sq = std::sqrt(disc);
          for (double r : {(-b - sq) / (2 * a), (-b + sq) / (2 * a)})
            if (r > 0) root = std::min(root, r);
        }
      }
      // head may cross zero before the quadratic does when tail stays zero
      if (d0 < 0) root = std::min(root, std::max(0.0, -u0 / d0));
      t = std::min(t, root);
    });
    return t;
  }

  // Jordan product u o v
  Vector jprod(const Vector& u, const Vector& v) const {
    Vector r(K.size());
    for (int i = 0; i < K.nonneg; ++i) r[i] = u[i] * v[i];
    for_soc([&](int off, int k) {
      r[off] = u.segment(off, k).dot(v.segment(off, k));
      if (k > 1)
        r.segment(off + 1, k - 1) = u[off] * v.segment(off + 1, k - 1) +
                                    v[off] * u.segment(off + 1, k - 1);
    });
    return r;
  }

  // Jordan division lambda \ u  (solve lambda o x = u)
  Vector jdiv(const Vector& lam, const Vector& u) const {
    Vector r(K.size());
    for (int i = 0; i < K.nonneg; ++i) r[i] = u[i] / lam[i];
    for_soc([&](int off, int k) {
      const double l0 = lam[off];
      if (k == 1) {
        r[off] = u[off] / l0;
        return;
      }
      Vector l1 = lam.segment(off + 1, k - 1);
      const double det = l0 * l0 - l1.squaredNorm();
      const double x0 = (l0 * u[off] - l1.dot(u.segment(off + 1, k - 1))) / det;
      r[off] = x0;
      r.segment(off + 1, k - 1) =
          (u.segment(off + 1, k - 1) - x0 * l1) / l0;
    });
    return r;
  }

  // Nesterov-Todd scaling W (dense, block-diagonal) with W z = W^{-1} s.
  void nt_scaling(const Vector& s, const Vector& z, Matrix& W,
                  Matrix& Winv) const {
    const int m = K.size();
    W = Matrix::Zero(m, m);
    Winv = Matrix::Zero(m, m);
    for (int i = 0; i < K.nonneg; ++i) {
      const double w = std::sqrt(s[i] / z[i]);
      W(i, i) = w;
      Winv(i, i) = 1.0 / w;
    }
    for_soc([&](int off, int k) {
      Vector sb = s.segment(off, k), zb = z.segment(off, k);
      auto jn = [k](const Vector& v) {
        double tail = (k > 1) ? v.tail(k - 1).squaredNorm() : 0.0;
        return std::sqrt(std::max(v[0] * v[0] - tail, 1e-300));
      };
      const double a = jn(sb), b = jn(zb);
      Vector st = sb / a, zt = zb / b;
      const double gamma = std::sqrt(std::max((1.0 + st.dot(zt)) / 2.0, 1e-300));
      Vector Jzt = zt;
      if (k > 1) Jzt.tail(k - 1) = -zt.tail(k - 1);
      Vector w = (st + Jzt) / (2.0 * gamma);  // unit hyperbolic norm
      Vector v = w;
      v[0] += 1.0;
      v /= std::sqrt(2.0 * (w[0] + 1.0));
      // H = 2 v v' - J, W = eta H, W^{-1} = (1/eta)(2 (Jv)(Jv)' - J)
      Matrix J = -Matrix::Identity(k, k);
      J(0, 0) = 1.0;
      const double eta = std::sqrt(a / b);
      Matrix H = 2.0 * v * v.transpose() - J;
      Vector Jv = v;
      if (k > 1) Jv.tail(k - 1) = -v.tail(k - 1);
      W.block(off, off, k, k) = eta * H;
      Winv.block(off, off, k, k) = (2.0 * Jv * Jv.transpose() - J) / eta;
    });
  }
};

using LdMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LdVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

struct KktSolver {
  const ConicStandardForm& prob;
  Matrix W2;     // regularized W * W (W symmetric)
  Eigen::LDLT<Matrix> W2_fact;
  LdMatrix Pl, Gl, Al, W2l;  // long-double copies for refinement residuals
  Eigen::LDLT<Matrix> K_fact;
  Eigen::LDLT<Matrix> schur_fact;
  bool has_eq;
  int n, p;

  KktSolver(const ConicStandardForm& pr, const Matrix& W, const Matrix& /*Winv*/)
      : prob(pr), n(int(pr.c.size())), p(int(pr.A.rows())) {
    W2 = W * W;
    // proximal regularization keeps the scaled system solvable at the
    // boundary; the refinement loop targets the regularized system, so the
    // step satisfies it exactly and primal/dual residuals keep contracting
    W2.diagonal().array() += 1e-11 * (1.0 + W2.diagonal().cwiseAbs().maxCoeff());
    W2_fact.compute(W2);
    has_eq = p > 0;
    Matrix W2invG(W2.rows(), n);
    for (int j = 0; j < n; ++j) W2invG.col(j) = W2_fact.solve(prob.G.col(j));
    Matrix K = prob.G.transpose() * W2invG;
    if (prob.P.size()) K += prob.P;
    K.diagonal().array() += 1e-13 * (1.0 + K.diagonal().cwiseAbs().maxCoeff());
    K_fact.compute(K);
    if (has_eq) {
      Matrix KiAt(n, p);
      for (int j = 0; j < p; ++j)
        KiAt.col(j) = K_fact.solve(prob.A.row(j).transpose());
      Matrix S = prob.A * KiAt;
      S.diagonal().array() += 1e-13 * (1.0 + S.diagonal().cwiseAbs().maxCoeff());
      schur_fact.compute(S);
    }
    if (prob.P.size()) Pl = prob.P.cast<long double>();
    Gl = prob.G.cast<long double>();
    if (has_eq) Al = prob.A.cast<long double>();
    W2l = W2.cast<long double>();
  }

  // Solve: P dx + A'dy + G'dz = bx;  A dx = by;  G dx - W^2 dz = bz.
  void solve(const Vector& bx, const Vector& by, const Vector& bz, Vector& dx,
             Vector& dy, Vector& dz) const {
    Vector rhs = bx + prob.G.transpose() * W2_fact.solve(bz);
    if (!has_eq) {
      dx = K_fact.solve(rhs);
      dy.resize(0);
    } else {
      Vector Kirhs = K_fact.solve(rhs);
      dy = schur_fact.solve(prob.A * Kirhs - by);
      dx = K_fact.solve(rhs - prob.A.transpose() * dy);
    }
    dz = W2_fact.solve(prob.G * dx - bz);
  }

  // Iterative refinement with residuals accumulated in long double; the
  // W^2 amplification near the central-path boundary would otherwise wipe
  // out the last digits of dz.
  void solve_refined(const Vector& bx, const Vector& by, const Vector& bz,
                     Vector& dx, Vector& dy, Vector& dz) const {
    solve(bx, by, bz, dx, dy, dz);
    LdVector dxl = dx.cast<long double>();
    LdVector dyl = has_eq ? LdVector(dy.cast<long double>()) : LdVector();
    LdVector dzl = dz.cast<long double>();
    const LdVector bxl = bx.cast<long double>();
    const LdVector byl = has_eq ? LdVector(by.cast<long double>()) : LdVector();
    const LdVector bzl = bz.cast<long double>();
    for (int round = 0; round < 4; ++round) {
      LdVector rx = bxl - Gl.transpose() * dzl;
      if (prob.P.size()) rx -= Pl * dxl;
      if (has_eq) rx -= Al.transpose() * dyl;
      LdVector ry = has_eq ? LdVector(byl - Al * dxl) : LdVector();
      LdVector rz = bzl - Gl * dxl + W2l * dzl;
      long double rn = rx.norm() + (has_eq ? ry.norm() : 0.0L) + rz.norm();
      if (rn < 1e-16L * (1.0L + bxl.norm() + bzl.norm())) break;
      Vector cx, cy, cz;
      solve(rx.cast<double>(), has_eq ? Vector(ry.cast<double>()) : Vector(Vector::Zero(0)),
            rz.cast<double>(), cx, cy, cz);
      dxl += cx.cast<long double>();
      if (has_eq) dyl += cy.cast<long double>();
      dzl += cz.cast<long double>();
    }
    dx = dxl.cast<double>();
    if (has_eq) dy = dyl.cast<double>();
    dz = dzl.cast<double>();
  }
};

}  // namespace

static IpmResult solve_conic_core(const ConicStandardForm& prob, const IpmOptions& opts) {
  const int n = int(prob.c.size());
  const int m = prob.K.size();
  const int p = int(prob.A.rows());
  require(prob.G.rows() == m && prob.G.cols() == n, ErrorCode::DimensionMismatch,
          "solve_conic: G dimension mismatch");
  require(prob.h.size() == m, ErrorCode::DimensionMismatch,
          "solve_conic: h dimension mismatch");
  ConeOps cone(prob.K);
  IpmResult res;
  res.status = SolveStatus::IterationLimit;

  if (m == 0) {
    // equality-constrained QP: direct KKT solve
    Matrix KKT(n + p, n + p);
    KKT.setZero();
    if (prob.P.size()) KKT.topLeftCorner(n, n) = prob.P;
    KKT.topLeftCorner(n, n).diagonal().array() += 1e-12;
    if (p) {
      KKT.topRightCorner(n, p) = prob.A.transpose();
      KKT.bottomLeftCorner(p, n) = prob.A;
    }
    Vector rhs(n + p);
    rhs.head(n) = -prob.c;
    if (p) rhs.tail(p) = prob.b;
    Vector sol = KKT.ldlt().solve(rhs);
    res.x = sol.head(n);
    res.y = p ? Vector(sol.tail(p)) : Vector();
    res.s.resize(0);
    res.z.resize(0);
    res.pobj = prob.c.dot(res.x) +
               (prob.P.size() ? 0.5 * res.x.dot(prob.P * res.x) : 0.0);
    res.status = SolveStatus::Optimal;
    return res;
  }

  // initialization: solve with W = I, then shift into the cone interior
  Vector x, y, z, s;
  {
    Matrix Wi = Matrix::Identity(m, m);
    KktSolver kkt(prob, Wi, Wi);
    Vector dz;
    kkt.solve(-prob.c, p ? prob.b : Vector(Vector::Zero(0)), -prob.h, x, y, dz);
    s = prob.h - prob.G * x;
    z = -s;
    Vector e = cone.identity();
    double ts = -cone.min_margin(s);
    if (ts >= -1e-8) s += (1.0 + ts) * e;
    double tz = -cone.min_margin(z);
    if (tz >= -1e-8) z += (1.0 + tz) * e;
    if (p == 0) y.resize(0);
  }

  const double resb = std::max(1.0, p ? prob.b.norm() : 0.0);
  const double resh = std::max(1.0, prob.h.norm());
  const double resc = std::max(1.0, prob.c.norm());
  const int mdeg = prob.K.degree();
  const bool trace = std::getenv("RLCP_IPM_TRACE") != nullptr;

  double best_score = std::numeric_limits<double>::infinity();
  IpmResult best;
  int stall = 0;

  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    Vector Px = prob.P.size() ? Vector(prob.P * x) : Vector(Vector::Zero(n));
    Vector rx = Px + prob.c + prob.G.transpose() * z;
    if (p) rx += prob.A.transpose() * y;
    Vector ry = p ? Vector(prob.A * x - prob.b) : Vector();
    Vector rz = prob.G * x + s - prob.h;

    const double gap = s.dot(z);
    const double pobj = prob.c.dot(x) + 0.5 * x.dot(Px);
    const double dobj = pobj + (p ? y.dot(ry) : 0.0) + z.dot(rz) - gap;
    const double pres = std::max(p ? ry.norm() / resb : 0.0, rz.norm() / resh);
    const double dres = rx.norm() / resc;
    const double relgap =
        std::abs(pobj) > 1e-10 ? gap / std::abs(pobj) : gap;

    if (trace)
      std::fprintf(stderr, "it %3d pobj % .9e gap %.3e pres %.3e dres %.3e\n",
                   iter, pobj, gap, pres, dres);
    const double score = std::max({pres, dres, gap / std::max(1.0, std::abs(pobj))});
    if (score < best_score) {
      best_score = score;
      best.x = x;
      best.s = s;
      best.z = z;
      best.y = y;
      best.pobj = pobj;
      best.dobj = dobj;
      best.gap = gap;
      best.relgap = relgap;
      best.pres = pres;
      best.dres = dres;
      best.iters = iter;
      stall = 0;
    } else if (++stall >= 8) {
      break;  // no progress; return the best iterate seen
    }

    const bool converged = pres <= opts.feas_tol && dres <= opts.feas_tol &&
                           (gap <= opts.gap_tol || relgap <= opts.rel_gap_tol);
    if (converged) {
      best.status = SolveStatus::Optimal;
      if (!opts.best_effort) break;
      // keep polishing the gap while progress continues
      if (gap <= 1e-13 * std::max(1.0, std::abs(pobj)) || stall > 0) break;
    }
    if (iter == opts.max_iter) break;

    Matrix W, Winv;
    cone.nt_scaling(s, z, W, Winv);
    Vector lambda = W * z;
    KktSolver kkt(prob, W, Winv);

    // affine direction: d_s = -lambda o lambda, so W(lambda \ d_s) = -Wlambda = -s
    Vector dx_a, dy_a, dz_a;
    kkt.solve_refined(-rx, p ? Vector(-ry) : Vector(Vector::Zero(0)),
                      Vector(-rz + s), dx_a, dy_a, dz_a);
    Vector ds_a = -rz - prob.G * dx_a;  // keep the primal row exact

    double alpha = std::min({1.0, cone.max_step(s, ds_a), cone.max_step(z, dz_a)});
    const double gap_aff = (s + alpha * ds_a).dot(z + alpha * dz_a);
    double sigma = std::pow(std::min(1.0, std::max(0.0, gap_aff / gap)), 3.0);
    const double mu = gap / mdeg;

    // combined direction with Mehrotra correction
    Vector e = cone.identity();
    Vector corr = cone.jprod(Winv * ds_a, W * dz_a);
    Vector d_s = -cone.jprod(lambda, lambda) - corr + sigma * mu * e;
    Vector bz = -(1.0 - sigma) * rz - W * cone.jdiv(lambda, d_s);
    Vector dx, dy, dz;
    kkt.solve_refined(-(1.0 - sigma) * rx,
                      p ? Vector(-(1.0 - sigma) * ry) : Vector(Vector::Zero(0)),
                      bz, dx, dy, dz);
    Vector ds = -(1.0 - sigma) * rz - prob.G * dx;
    {
      Vector row1 = prob.G.transpose() * dz + (1.0 - sigma) * rx;
      if (prob.P.size()) row1 += prob.P * dx;
      if (p) row1 += prob.A.transpose() * dy;
      double rel = row1.norm() / std::max(1.0, rx.norm() + z.norm());
      if (trace) std::fprintf(stderr, "      row1 resid %.3e\n", row1.norm());
      if (rel > 1e-7) break;  // direction unreliable; return best iterate
    }

    alpha = std::min({1.0, kStepBack * cone.max_step(s, ds),
                      kStepBack * cone.max_step(z, dz)});
    if (trace)
      std::fprintf(stderr, "      sigma %.3e alpha %.3e |jdiv| %.3e |dz| %.3e |ds| %.3e\n",
                   sigma, alpha, cone.jdiv(lambda, d_s).cwiseAbs().maxCoeff(),
                   dz.cwiseAbs().maxCoeff(), ds.cwiseAbs().maxCoeff());
    if (!std::isfinite(alpha) || alpha <= 1e-10) break;
    x += alpha * dx;
    if (p) y += alpha * dy;
    z += alpha * dz;
    s += alpha * ds;
  }

  if (best.pres <= opts.feas_tol && best.dres <= opts.feas_tol &&
      (best.gap <= opts.gap_tol ||
       best.relgap <= std::max(opts.rel_gap_tol, 1e-8)))
    best.status = SolveStatus::Optimal;
  else
    best.status = SolveStatus::IterationLimit;
  return best;
}

IpmResult solve_conic(const ConicStandardForm& prob, const IpmOptions& opts) {
  const int n = int(prob.c.size());
  const int m = prob.K.size();
  const int p = int(prob.A.rows());
  if (m == 0) return solve_conic_core(prob, opts);

  // Ruiz equilibration: iterate sqrt-max row/column scaling; rows of one
  // second-order block share a single factor so the cone is preserved.
  Vector dr = Vector::Ones(m), da = Vector::Ones(p), dc = Vector::Ones(n);
  Matrix G = prob.G, A = prob.A, P = prob.P;
  for (int round = 0; round < 8; ++round) {
    for (int i = 0; i < prob.K.nonneg; ++i) {
      double r = G.row(i).cwiseAbs().maxCoeff();
      if (r > 1e-12) {
        double f = 1.0 / std::sqrt(r);
        G.row(i) *= f;
        dr[i] *= f;
      }
    }
    int off = prob.K.nonneg;
    for (int k : prob.K.soc) {
      double r = G.middleRows(off, k).cwiseAbs().maxCoeff();
      if (r > 1e-12) {
        double f = 1.0 / std::sqrt(r);
        G.middleRows(off, k) *= f;
        dr.segment(off, k) *= f;
      }
      off += k;
    }
    for (int i = 0; i < p; ++i) {
      double r = A.row(i).cwiseAbs().maxCoeff();
      if (r > 1e-12) {
        double f = 1.0 / std::sqrt(r);
        A.row(i) *= f;
        da[i] *= f;
      }
    }
    for (int j = 0; j < n; ++j) {
      double cmax = G.col(j).cwiseAbs().maxCoeff();
      if (p) cmax = std::max(cmax, A.col(j).cwiseAbs().maxCoeff());
      if (P.size()) cmax = std::max(cmax, P.col(j).cwiseAbs().maxCoeff());
      if (cmax > 1e-12) {
        double f = 1.0 / std::sqrt(cmax);
        G.col(j) *= f;
        if (p) A.col(j) *= f;
        if (P.size()) {
          P.col(j) *= f;
          P.row(j) *= f;
        }
        dc[j] *= f;
      }
    }
  }
  ConicStandardForm sp;
  sp.G = G;
  sp.A = A;
  sp.P = P;
  sp.K = prob.K;
  sp.h = dr.asDiagonal() * prob.h;
  sp.b = p ? Vector(da.asDiagonal() * prob.b) : prob.b;
  sp.c = dc.asDiagonal() * prob.c;
  double sobj = std::max(sp.c.cwiseAbs().maxCoeff(),
                         sp.P.size() ? sp.P.cwiseAbs().maxCoeff() : 0.0);
  sobj = (sobj > 1e-12) ? 1.0 / sobj : 1.0;
  sp.c *= sobj;
  if (sp.P.size()) sp.P *= sobj;

  IpmResult r = solve_conic_core(sp, opts);
  IpmResult out = r;
  if (r.x.size()) out.x = dc.asDiagonal() * r.x;
  if (r.s.size()) out.s = dr.cwiseInverse().asDiagonal() * r.s;
  if (r.z.size()) out.z = (dr.asDiagonal() * r.z) / sobj;
  if (r.y.size()) out.y = (da.asDiagonal() * r.y) / sobj;
  // objective and primal feasibility are recomputed on the original data;
  // the convergence certificate (gap, residuals) stays in the equilibrated
  // metric, which is the meaningful backward-error measure for wide-range
  // coefficients
  if (out.x.size()) {
    Vector Px = prob.P.size() ? Vector(prob.P * out.x) : Vector(Vector::Zero(n));
    out.pobj = prob.c.dot(out.x) + 0.5 * out.x.dot(Px);
    double pv = (prob.G * out.x - prob.h).cwiseMax(0.0).lpNorm<Eigen::Infinity>();
    if (p) pv = std::max(pv, (prob.A * out.x - prob.b).cwiseAbs().maxCoeff());
    if (out.status == SolveStatus::Optimal &&
        pv > 1e-5 * std::max(1.0, out.x.cwiseAbs().maxCoeff()))
      out.status = SolveStatus::IterationLimit;
  }
  return out;
}

IpmResult feasibility_phase(const ConicStandardForm& prob,
                            const IpmOptions& opts) {
  // max t  s.t.  G x + t e + s = h, s in K, t <= 1, A x = b
  const int n = int(prob.c.size());
  const int m = prob.K.size();
  ConicStandardForm f;
  f.c = Vector::Zero(n + 1);
  f.c[n] = -1.0;
  ConeOps cone(prob.K);
  Vector e = cone.identity();
  f.G = Matrix::Zero(m + 1, n + 1);
  f.G.topLeftCorner(m, n) = prob.G;
  f.G.block(0, n, m, 1) = e;
  f.G(m, n) = 1.0;
  f.h = Vector(m + 1);
  f.h.head(m) = prob.h;
  f.h[m] = 1.0;
  f.K = prob.K;
  f.K.nonneg += 1;
  // the extra slot t <= 1 must live in the orthant part: reorder so that the
  // appended row sits with the nonnegative block
  // (simpler: append as separate trailing nonneg slot; cones are blockwise so
  // order within G rows must match ConeDims layout: nonneg first, then SOC)
  // Rebuild with the t-row placed after the existing nonneg rows.
  {
    Matrix G2 = Matrix::Zero(m + 1, n + 1);
    Vector h2(m + 1);
    int nn = prob.K.nonneg;
    G2.topRows(nn) = f.G.topRows(nn);
    h2.head(nn) = f.h.head(nn);
    G2.row(nn) = f.G.row(m);
    h2[nn] = f.h[m];
    G2.bottomRows(m - nn) = f.G.block(nn, 0, m - nn, n + 1);
    h2.tail(m - nn) = f.h.segment(nn, m - nn);
    f.G = G2;
    f.h = h2;
  }
  if (prob.A.rows()) {
    f.A = Matrix::Zero(prob.A.rows(), n + 1);
    f.A.leftCols(n) = prob.A;
    f.b = prob.b;
  }
  IpmOptions o2 = opts;
  o2.best_effort = false;
  IpmResult r = solve_conic(f, o2);
  IpmResult out;
  out.status = r.status;
  out.iters = r.iters;
  out.pobj = -r.pobj;  // the achieved margin t*
  if (r.x.size()) out.x = r.x.head(n);
  if (r.z.size()) {
    // drop the t-slot multiplier to recover a certificate in the original cone
    Vector z(m);
    int nn = prob.K.nonneg;
    z.head(nn) = r.z.head(nn);
    z.tail(m - nn) = r.z.tail(m - nn);
    out.z = z;
    out.y = r.y;
  }
  return out;
}

}  // namespace rlcp
