#include <Eigen/Eigenvalues>
#include <cmath>

#include "rlcp/solver.hpp"

namespace rlcp {

namespace {

// Smooth constraint view of the program: every row as g(v) <= 0.
struct NlRow {
  enum Kind { Lin, Quad, Soc } kind;
  // lin: a'v - b (sign-adjusted), quad: v'Hv + c'v - d, soc: ||Av+b|| - c'v - d
  Vector a;
  double b = 0;
  Matrix H;
  Vector c;
  double d = 0;
  Matrix A;
  Vector bb;
  bool equality = false;

  double value(const Vector& v) const {
    switch (kind) {
      case Lin: return a.dot(v) - b;
      case Quad: return v.dot(H * v) + c.dot(v) - d;
      case Soc: return (A * v + bb).norm() - c.dot(v) - d;
    }
    return 0;
  }
  Vector grad(const Vector& v) const {
    switch (kind) {
      case Lin: return a;
      case Quad: return 2.0 * H * v + c;
      case Soc: {
        Vector r = A * v + bb;
        double nr = std::max(r.norm(), 1e-12);
        return A.transpose() * r / nr - c;
      }
    }
    return Vector();
  }
  Matrix hess(const Vector& v, int n) const {
    if (kind == Quad) return 2.0 * H;
    (void)v;
    return Matrix::Zero(n, n);
  }
};

std::vector<NlRow> collect_rows(const MathProgram& prog) {
  std::vector<NlRow> rows;
  for (const auto& lc : prog.lin) {
    NlRow r;
    r.kind = NlRow::Lin;
    if (lc.rel == Rel::Ge) {
      r.a = -lc.a;
      r.b = -lc.b;
    } else {
      r.a = lc.a;
      r.b = lc.b;
    }
    r.equality = (lc.rel == Rel::Eq);
    rows.push_back(std::move(r));
  }
  for (const auto& qc : prog.quad) {
    NlRow r;
    r.kind = NlRow::Quad;
    r.H = qc.H;
    r.c = qc.c;
    r.d = qc.d;
    rows.push_back(std::move(r));
  }
  for (const auto& sc : prog.soc) {
    NlRow r;
    r.kind = NlRow::Soc;
    r.A = sc.A;
    r.bb = sc.b;
    r.c = sc.c;
    r.d = sc.d;
    rows.push_back(std::move(r));
  }
  return rows;
}

double merit(const MathProgram& prog, const std::vector<NlRow>& rows,
             const Vector& v, double rho) {
  double m = prog.obj.value(v);
  for (const auto& r : rows) {
    double g = r.value(v);
    m += rho * (r.equality ? std::abs(g) : std::max(g, 0.0));
  }
  for (int i = 0; i < prog.num_vars(); ++i)
    if (prog.var_nonneg[i]) m += rho * std::max(-v[i], 0.0);
  return m;
}

double kkt_residual(const MathProgram& prog, const std::vector<NlRow>& rows,
                    const Vector& v, const Vector& lam, const Vector& mu) {
  const int n = prog.num_vars();
  Vector grad = prog.obj.c.size() ? Vector(prog.obj.c) : Vector(Vector::Zero(n));
  if (prog.obj.H.size()) grad += 2.0 * prog.obj.H * v;
  double viol = 0.0, comp = 0.0;
  for (size_t j = 0; j < rows.size(); ++j) {
    grad += lam[int(j)] * rows[j].grad(v);
    double g = rows[j].value(v);
    viol = std::max(viol, rows[j].equality ? std::abs(g) : g);
    if (!rows[j].equality) comp = std::max(comp, std::abs(lam[int(j)] * g));
  }
  for (int i = 0; i < n; ++i)
    if (prog.var_nonneg[i]) {
      grad[i] -= mu[i];
      viol = std::max(viol, -v[i]);
      comp = std::max(comp, std::abs(mu[i] * v[i]));
    }
  double scale = std::max(1.0, std::abs(prog.obj.value(v)));
  return std::max({grad.cwiseAbs().maxCoeff() / scale, viol, comp / scale});
}

// One SQP run from a given start; returns true when a KKT point was reached.
bool sqp_run(const MathProgram& prog, const std::vector<NlRow>& rows,
             Vector v, double tol, int max_sqp, Vector& v_out, double& kkt_out) {
  const int n = prog.num_vars();
  const int mr = int(rows.size());
  Vector lam = Vector::Zero(mr);
  Vector mu = Vector::Zero(n);
  double rho = 10.0;
  double trust = 1.0 + v.cwiseAbs().maxCoeff();

  // Phase 0: project the start onto the linear rows + bounds.
  {
    MathProgram proj;
    proj.var_names = prog.var_names;
    proj.var_nonneg = prog.var_nonneg;
    proj.obj.H = Matrix::Identity(n, n);
    proj.obj.c = -2.0 * v;
    for (const auto& lc : prog.lin) proj.lin.push_back(lc);
    SolverRequest rq(proj);
    rq.feas_tol = 1e-9;
    SolutionPoint p = solve_convex(rq);
    if (p.optimal()) v = p.v;
  }

  for (int it = 0; it < max_sqp; ++it) {
    // Hessian of the Lagrangian, convexified
    Matrix B = prog.obj.H.size() ? Matrix(2.0 * prog.obj.H)
                                 : Matrix(Matrix::Zero(n, n));
    for (int j = 0; j < mr; ++j)
      if (rows[j].kind == NlRow::Quad && std::abs(lam[j]) > 1e-12)
        B += lam[j] * rows[j].hess(v, n);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (B + B.transpose()));
    Vector ev = es.eigenvalues();
    double floor_ev = 1e-6 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (int k = 0; k < n; ++k) ev[k] = std::max(ev[k], floor_ev);
    B = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();

    Vector g0 = prog.obj.c.size() ? Vector(prog.obj.c) : Vector(Vector::Zero(n));
    if (prog.obj.H.size()) g0 += 2.0 * prog.obj.H * v;

    // QP subproblem in (d, sigma)
    MathProgram qp;
    qp.add_vars("d", n, false);
    qp.add_vars("sig", mr, true);
    Matrix H = Matrix::Zero(n + mr, n + mr);
    H.topLeftCorner(n, n) = 0.5 * B;  // objective stores v'Hv => use B/2
    qp.obj.H = H;
    qp.obj.c = Vector::Zero(n + mr);
    qp.obj.c.head(n) = g0;
    qp.obj.c.tail(mr).setConstant(rho);
    std::vector<int> row_of_con(mr, -1), row_of_bound(n, -1);
    for (int j = 0; j < mr; ++j) {
      Vector a = Vector::Zero(n + mr);
      a.head(n) = rows[j].grad(v);
      a[n + j] = -1.0;
      row_of_con[j] = int(qp.lin.size());
      qp.add_linear(a, Rel::Le, -rows[j].value(v));
      if (rows[j].equality) {
        Vector a2 = Vector::Zero(n + mr);
        a2.head(n) = -rows[j].grad(v);
        a2[n + j] = -1.0;
        qp.add_linear(a2, Rel::Le, rows[j].value(v));
      }
    }
    for (int i = 0; i < n; ++i) {
      if (prog.var_nonneg[i]) {
        Vector a = Vector::Zero(n + mr);
        a[i] = -1.0;
        row_of_bound[i] = int(qp.lin.size());
        qp.add_linear(a, Rel::Le, v[i]);  // v + d >= 0
      }
      Vector atr = Vector::Zero(n + mr);
      atr[i] = 1.0;
      qp.add_linear(atr, Rel::Le, trust);
      qp.add_linear(-atr, Rel::Le, trust);
    }
    SolverRequest rq(qp);
    rq.feas_tol = 1e-9;
    SolveOutput so = solve_convex_full(rq);
    if (!so.point.optimal()) return false;
    Vector d = so.point.v.head(n);

    for (int j = 0; j < mr; ++j) lam[j] = std::abs(so.duals.lin[row_of_con[j]]);
    for (int i = 0; i < n; ++i)
      if (row_of_bound[i] >= 0) mu[i] = std::abs(so.duals.lin[row_of_bound[i]]);
    double lam_max = lam.size() ? lam.cwiseAbs().maxCoeff() : 0.0;
    rho = std::max(rho, 2.0 * lam_max + 1.0);

    // line search on the l1 merit
    double m0 = merit(prog, rows, v, rho);
    double alpha = 1.0;
    Vector v_new = v;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      v_new = v + alpha * d;
      if (merit(prog, rows, v_new, rho) < m0 - 1e-12 * std::abs(m0)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (accepted) {
      v = v_new;
      trust = std::min(10.0 * (1.0 + v.cwiseAbs().maxCoeff()),
                       trust * (alpha == 1.0 ? 1.5 : 0.8));
    } else {
      trust *= 0.5;
      if (trust < 1e-10) break;
    }
    double kr = kkt_residual(prog, rows, v, lam, mu);
    if (kr <= tol && d.cwiseAbs().maxCoeff() <= 1e-7 * (1.0 + v.cwiseAbs().maxCoeff())) {
      v_out = v;
      kkt_out = kr;
      return true;
    }
  }
  double kr = kkt_residual(prog, rows, v, lam, mu);
  if (kr <= 1e3 * tol) {  // near-KKT: still usable as an incumbent
    v_out = v;
    kkt_out = kr;
    return true;
  }
  return false;
}

}  // namespace

SolutionPoint solve_local(const SolverRequest& req, int starts, uint64_t seed) {
  req.check();
  const MathProgram& prog = *req.prog;
  if (prog.is_convex()) {
    SolutionPoint p = solve_convex(req);
    p.info["convex_shortcut"] = 1.0;
    return p;
  }
  require(prog.psd.empty(), ErrorCode::UnsupportedFeature,
          "solve_local: PSD constraints unsupported");
  auto rows = collect_rows(prog);
  const int n = prog.num_vars();

  SolutionPoint best;
  best.status = SolveStatus::Failed;
  int discarded = 0;

  double span = 2.0;
  for (const auto& r : rows)
    if (r.kind == NlRow::Lin)
      span = std::max(span, std::abs(r.b) / std::max(1.0, r.a.cwiseAbs().maxCoeff()));
  span = std::min(span, 1e3);

  for (int k = 0; k < starts; ++k) {
    Vector v0(n);
    if (k == 0 && req.warm) {
      v0 = *req.warm;
    } else {
      Rng rng(seed * 1000003ULL + uint64_t(k));  // per-start seeding
      for (int i = 0; i < n; ++i)
        v0[i] = prog.var_nonneg[i] ? rng.uniform(0.0, span)
                                   : rng.uniform(-span, span);
    }
    Vector v_out;
    double kkt = 0;
    bool ok = false;
    try {
      ok = sqp_run(prog, rows, v0, req.feas_tol * 10, 120, v_out, kkt);
    } catch (const Error&) {
      ok = false;
    }
    if (!ok) {
      ++discarded;
      continue;
    }
    double viol = prog.max_violation(v_out);
    if (viol > 1e-6) {
      ++discarded;
      continue;
    }
    double obj = prog.obj.value(v_out);
    if (best.status != SolveStatus::Optimal || obj < best.objective) {
      best.v = v_out;
      best.objective = obj;
      best.status = SolveStatus::Optimal;
      best.info["kkt_residual"] = kkt;
    }
  }
  best.info["starts"] = starts;
  best.info["discarded"] = discarded;
  if (best.status != SolveStatus::Optimal) best.status = SolveStatus::IterationLimit;
  return best;
}

}  // namespace rlcp
