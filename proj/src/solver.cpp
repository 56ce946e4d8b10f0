#include "rlcp/solver.hpp"

#include <Eigen/Eigenvalues>

#include "rlcp/conic_ipm.hpp"

namespace rlcp {

namespace {

struct ConeMap {
  // nonneg slot -> (kind, index): kind 0 = variable bound, 1 = linear row
  std::vector<std::pair<int, int>> nonneg_src;
  // soc block -> (kind, index): kind 2 = quad constraint, 3 = soc constraint
  std::vector<std::pair<int, int>> soc_src;
  std::vector<Matrix> quad_R;  // factor used in each quad embedding
  std::vector<int> eq_src;     // equality row -> index into prog.lin
};

// Lower the MathProgram into conic standard form. Quadratic constraints must
// be convex here; H = R'R with small eigenvalues dropped.
ConicStandardForm lower(const MathProgram& prog, ConeMap& map) {
  const int n = prog.num_vars();
  ConicStandardForm sf;
  sf.c = prog.obj.c.size() ? prog.obj.c : Vector::Zero(n);
  if (prog.obj.H.size()) {
    sf.P = 2.0 * prog.obj.H;
    Eigen::SelfAdjointEigenSolver<Matrix> es(sf.P, Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() >= -1e-8,
            ErrorCode::RouteRefused,
            "convex solve refused: objective quadratic is not PSD");
  }

  std::vector<Vector> Grows;
  std::vector<double> hvals;
  std::vector<Vector> Arows;
  std::vector<double> bvals;
  for (int i = 0; i < n; ++i)
    if (prog.var_nonneg[i]) {
      Vector r = Vector::Zero(n);
      r[i] = -1.0;
      Grows.push_back(r);
      hvals.push_back(0.0);
      map.nonneg_src.push_back({0, i});
    }
  for (int j = 0; j < int(prog.lin.size()); ++j) {
    const auto& lc = prog.lin[j];
    if (lc.rel == Rel::Eq) {
      Arows.push_back(lc.a);
      bvals.push_back(lc.b);
      map.eq_src.push_back(j);
    } else if (lc.rel == Rel::Le) {
      Grows.push_back(lc.a);
      hvals.push_back(lc.b);
      map.nonneg_src.push_back({1, j});
    } else {
      Grows.push_back(-lc.a);
      hvals.push_back(-lc.b);
      map.nonneg_src.push_back({1, j});
    }
  }
  sf.K.nonneg = int(Grows.size());

  // SOC embeddings of convex quadratic constraints
  std::vector<Matrix> socG;
  std::vector<Vector> soch;
  for (int j = 0; j < int(prog.quad.size()); ++j) {
    const auto& qc = prog.quad[j];
    require(qc.convex, ErrorCode::RouteRefused,
            "convex solve refused: nonconvex quadratic constraint" +
                (qc.label.empty() ? std::string() : " (" + qc.label + ")"));
    Eigen::SelfAdjointEigenSolver<Matrix> es(qc.H);
    Vector ev = es.eigenvalues().cwiseMax(0.0);
    int r = 0;
    for (int k = 0; k < ev.size(); ++k)
      if (ev[k] > 1e-12 * std::max(1.0, ev.maxCoeff())) ++r;
    Matrix R(r, n);
    int rr = 0;
    for (int k = 0; k < ev.size(); ++k)
      if (ev[k] > 1e-12 * std::max(1.0, ev.maxCoeff()))
        R.row(rr++) = std::sqrt(ev[k]) * es.eigenvectors().col(k).transpose();
    map.quad_R.push_back(R);
    // ||(2Rv, 1-sigma)|| <= 1+sigma, sigma = d - c'v
    Matrix G(r + 2, n);
    Vector h(r + 2);
    G.row(0) = qc.c.transpose();
    h[0] = 1.0 + qc.d;
    G.middleRows(1, r) = -2.0 * R;
    h.segment(1, r).setZero();
    G.row(r + 1) = -qc.c.transpose();
    h[r + 1] = 1.0 - qc.d;
    socG.push_back(G);
    soch.push_back(h);
    map.soc_src.push_back({2, j});
  }
  for (int j = 0; j < int(prog.soc.size()); ++j) {
    const auto& sc = prog.soc[j];
    const int r = int(sc.A.rows());
    Matrix G(r + 1, n);
    Vector h(r + 1);
    G.row(0) = -sc.c.transpose();
    h[0] = sc.d;
    G.bottomRows(r) = -sc.A;
    h.tail(r) = sc.b;
    socG.push_back(G);
    soch.push_back(h);
    map.soc_src.push_back({3, j});
  }
  require(prog.psd.empty(), ErrorCode::UnsupportedFeature,
          "built-in solver does not handle PSD constraints; emit SDPA and use "
          "an external backend");

  int mrows = sf.K.nonneg;
  for (const auto& G : socG) {
    sf.K.soc.push_back(int(G.rows()));
    mrows += int(G.rows());
  }
  sf.G = Matrix::Zero(mrows, n);
  sf.h = Vector::Zero(mrows);
  for (int i = 0; i < sf.K.nonneg; ++i) {
    sf.G.row(i) = Grows[i];
    sf.h[i] = hvals[i];
  }
  int off = sf.K.nonneg;
  for (size_t k = 0; k < socG.size(); ++k) {
    sf.G.middleRows(off, socG[k].rows()) = socG[k];
    sf.h.segment(off, socG[k].rows()) = soch[k];
    off += int(socG[k].rows());
  }
  sf.A = Matrix::Zero(int(Arows.size()), n);
  sf.b = Vector::Zero(int(Arows.size()));
  for (size_t k = 0; k < Arows.size(); ++k) {
    sf.A.row(int(k)) = Arows[k];
    sf.b[int(k)] = bvals[k];
  }
  return sf;
}

Duals recover_duals(const MathProgram& prog, const ConeMap& map,
                    const IpmResult& r) {
  Duals d;
  const int n = prog.num_vars();
  d.var_nonneg = Vector::Zero(n);
  d.lin = Vector::Zero(int(prog.lin.size()));
  d.quad = Vector::Zero(int(prog.quad.size()));
  d.soc.assign(prog.soc.size(), Vector());
  if (!r.z.size()) return d;
  for (size_t i = 0; i < map.nonneg_src.size(); ++i) {
    auto [kind, idx] = map.nonneg_src[i];
    if (kind == 0)
      d.var_nonneg[idx] = r.z[int(i)];
    else
      d.lin[idx] = r.z[int(i)];
  }
  for (size_t k = 0; k < map.eq_src.size(); ++k)
    if (r.y.size() == int(map.eq_src.size())) d.lin[map.eq_src[k]] = r.y[int(k)];
  int off = int(map.nonneg_src.size());
  for (size_t k = 0; k < map.soc_src.size(); ++k) {
    auto [kind, idx] = map.soc_src[k];
    int dim = 0;
    if (kind == 2) {
      dim = int(map.quad_R[idx].rows()) + 2;
      // lambda = z0 - z_last for the epigraph embedding
      d.quad[idx] = r.z[off] - r.z[off + dim - 1];
    } else {
      dim = int(prog.soc[idx].A.rows()) + 1;
      d.soc[idx] = r.z.segment(off, dim);
    }
    off += dim;
  }
  return d;
}

// Equality-restricted polish: fix active bounds, turn active rows into
// equalities, and re-solve the resulting KKT system. Accepted only when it
// verifiably improves feasibility + objective.
bool try_polish(const MathProgram& prog, const ConeMap& map, const IpmResult& r,
                Vector& v_out) {
  const int n = prog.num_vars();
  const Vector& v = r.x;
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  const double act_tol = 1e-6 * scale;

  std::vector<Vector> Erows;
  std::vector<double> evals;
  for (size_t i = 0; i < map.nonneg_src.size(); ++i) {
    auto [kind, idx] = map.nonneg_src[i];
    double slack = r.s[int(i)];
    double dual = r.z[int(i)];
    if (slack < act_tol && dual > slack) {
      if (kind == 0) {
        Vector row = Vector::Zero(n);
        row[idx] = 1.0;
        Erows.push_back(row);
        evals.push_back(0.0);
      } else {
        Erows.push_back(prog.lin[idx].a);
        evals.push_back(prog.lin[idx].b);
      }
    }
  }
  int off = int(map.nonneg_src.size());
  for (size_t k = 0; k < map.soc_src.size(); ++k) {
    auto [kind, idx] = map.soc_src[k];
    int dim = (kind == 2) ? int(map.quad_R[idx].rows()) + 2
                          : int(prog.soc[idx].A.rows()) + 1;
    Vector s = r.s.segment(off, dim);
    double margin = s[0] - s.tail(dim - 1).norm();
    if (margin < act_tol) {
      if (kind != 2) return false;  // active true SOC: skip polish
      const auto& qc = prog.quad[idx];
      // polish only when the quadratic part vanishes at the point
      if ((map.quad_R[idx] * v).norm() > act_tol) return false;
      for (int rr = 0; rr < map.quad_R[idx].rows(); ++rr) {
        Erows.push_back(map.quad_R[idx].row(rr).transpose());
        evals.push_back(0.0);
      }
      Erows.push_back(qc.c);
      evals.push_back(qc.d);
    }
    off += dim;
  }
  for (const auto& lc : prog.lin)
    if (lc.rel == Rel::Eq) {
      Erows.push_back(lc.a);
      evals.push_back(lc.b);
    }
  if (Erows.empty()) return false;

  const int me = int(Erows.size());
  Matrix E(me, n);
  Vector f(me);
  for (int i = 0; i < me; ++i) {
    E.row(i) = Erows[i];
    f[i] = evals[i];
  }
  Matrix KKT = Matrix::Zero(n + me, n + me);
  if (prog.obj.H.size()) KKT.topLeftCorner(n, n) = 2.0 * prog.obj.H;
  KKT.topLeftCorner(n, n).diagonal().array() += 1e-10;
  KKT.topRightCorner(n, me) = E.transpose();
  KKT.bottomLeftCorner(me, n) = E;
  KKT.bottomRightCorner(me, me).diagonal().array() -= 1e-12;
  Vector rhs(n + me);
  rhs.head(n) = prog.obj.c.size() ? Vector(-prog.obj.c) : Vector(Vector::Zero(n));
  rhs.tail(me) = f;
  Vector sol = KKT.ldlt().solve(rhs);
  Vector vp = sol.head(n);
  if (!vp.allFinite()) return false;

  const double viol_before = prog.max_violation(v);
  const double viol_after = prog.max_violation(vp);
  const double obj_before = prog.obj.value(v);
  const double obj_after = prog.obj.value(vp);
  if (viol_after <= std::max(viol_before, 1e-9) &&
      obj_after <= obj_before + 1e-7 * (1.0 + std::abs(obj_before))) {
    v_out = vp;
    return true;
  }
  return false;
}

SolutionPoint finish(const MathProgram& prog, const ConeMap& map,
                     const IpmResult& r, bool allow_polish, Duals* duals_out) {
  SolutionPoint pt;
  pt.status = r.status;
  pt.info["iterations"] = r.iters;
  pt.info["gap"] = r.gap;
  pt.info["pres"] = r.pres;
  pt.info["dres"] = r.dres;
  if (r.x.size()) {
    pt.v = r.x;
    if (allow_polish && r.status == SolveStatus::Optimal) {
      Vector vp;
      if (try_polish(prog, map, r, vp)) {
        pt.v = vp;
        pt.info["polished"] = 1.0;
      }
    }
    pt.objective = prog.obj.value(pt.v);
  }
  if (duals_out) *duals_out = recover_duals(prog, map, r);
  return pt;
}

// Try to certify unboundedness: find a recession ray d with objective slope -1.
bool find_unbounded_ray(const MathProgram& prog, const ConicStandardForm& sf,
                        const IpmOptions& opts, Vector& ray) {
  const int n = int(sf.c.size());
  ConicStandardForm rp;
  rp.c = Vector::Zero(n);
  rp.G = sf.G;
  rp.h = Vector::Zero(sf.h.size());
  rp.K = sf.K;
  int extra = 1 + (sf.P.size() ? n : 0);
  rp.A = Matrix::Zero(sf.A.rows() + extra, n);
  rp.b = Vector::Zero(sf.A.rows() + extra);
  rp.A.topRows(sf.A.rows()) = sf.A;
  rp.A.row(sf.A.rows()) = sf.c.transpose();
  rp.b[sf.A.rows()] = -1.0;
  if (sf.P.size()) rp.A.bottomRows(n) = sf.P;
  IpmResult fr = feasibility_phase(rp, opts);
  if (fr.pobj > 1e-7 && fr.x.size()) {
    ray = fr.x;
    // verify the ray directly
    Vector Gd = sf.G * ray;
    ConeDims K = sf.K;
    int off = 0;
    double worst = 0.0;
    for (int i = 0; i < K.nonneg; ++i) worst = std::max(worst, Gd[i]);
    off = K.nonneg;
    for (int k : K.soc) {
      double head = -Gd[off];
      double tail = (k > 1) ? Gd.segment(off + 1, k - 1).norm() : 0.0;
      worst = std::max(worst, tail - head);
      off += k;
    }
    if (sf.A.rows()) worst = std::max(worst, (sf.A * ray).cwiseAbs().maxCoeff());
    return worst <= 1e-6 && sf.c.dot(ray) < -0.5;
  }
  return false;
}

// Least-squares multiplier fit at a candidate optimum over the active set;
// the result is only trusted after check_kkt verifies it.
Duals fit_duals(const MathProgram& prog, const Vector& v) {
  const int n = prog.num_vars();
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  const double act = 1e-6 * scale;
  Vector grad = prog.obj.c.size() ? Vector(prog.obj.c) : Vector(Vector::Zero(n));
  if (prog.obj.H.size()) grad += 2.0 * prog.obj.H * v;

  struct Col {
    Vector g;
    int kind;  // 0 bound, 1 lin, 2 quad
    int idx;
    bool sign_free;
  };
  std::vector<Col> cols;
  for (int i = 0; i < n; ++i)
    if (prog.var_nonneg[i] && v[i] <= act) {
      Vector e = Vector::Zero(n);
      e[i] = -1.0;  // -mu_i
      cols.push_back({e, 0, i, false});
    }
  for (int j = 0; j < int(prog.lin.size()); ++j) {
    const auto& lc = prog.lin[j];
    double g = lc.a.dot(v) - lc.b;
    double rs = act * std::max(1.0, lc.a.cwiseAbs().maxCoeff());
    if (lc.rel == Rel::Eq) {
      cols.push_back({lc.a, 1, j, true});
    } else if (lc.rel == Rel::Le && g >= -rs) {
      cols.push_back({lc.a, 1, j, false});
    } else if (lc.rel == Rel::Ge && -g >= -rs) {
      cols.push_back({Vector(-lc.a), 1, j, false});
    }
  }
  for (int j = 0; j < int(prog.quad.size()); ++j) {
    const auto& qc = prog.quad[j];
    double g = v.dot(qc.H * v) + qc.c.dot(v) - qc.d;
    if (g >= -act) cols.push_back({Vector(2.0 * qc.H * v + qc.c), 2, j, false});
  }
  struct SocCol {
    int idx;
    int comp;  // -1: head coefficient (z0), else tail component
  };
  std::vector<std::pair<SocCol, int>> soc_cols;  // (info, column position)
  std::vector<Col> soc_raw;
  for (int j = 0; j < int(prog.soc.size()); ++j) {
    const auto& sc = prog.soc[j];
    double g = (sc.A * v + sc.b).norm() - sc.c.dot(v) - sc.d;
    if (g < -act) continue;
    // contribution -c z0 - A' z1 with ||z1|| <= z0
    cols.push_back({Vector(-sc.c), 3, j, false});
    soc_cols.push_back({{j, -1}, int(cols.size()) - 1});
    for (int r = 0; r < sc.A.rows(); ++r) {
      cols.push_back({Vector(-sc.A.row(r).transpose()), 3, j, true});
      soc_cols.push_back({{j, r}, int(cols.size()) - 1});
    }
  }

  Duals d;
  d.var_nonneg = Vector::Zero(n);
  d.lin = Vector::Zero(int(prog.lin.size()));
  d.quad = Vector::Zero(int(prog.quad.size()));
  d.soc.assign(prog.soc.size(), Vector());
  if (cols.empty()) return d;

  // two rounds: plain least squares, drop wrong-signed columns, refit
  std::vector<int> keep(cols.size());
  for (size_t k = 0; k < cols.size(); ++k) keep[k] = int(k);
  Vector lam;
  for (int round = 0; round < 3; ++round) {
    Matrix A(n, int(keep.size()));
    for (size_t k = 0; k < keep.size(); ++k) A.col(int(k)) = cols[keep[k]].g;
    lam = A.colPivHouseholderQr().solve(-grad);
    std::vector<int> next;
    for (size_t k = 0; k < keep.size(); ++k)
      if (cols[keep[k]].sign_free || lam[int(k)] > -1e-9) next.push_back(keep[k]);
    if (next.size() == keep.size()) break;
    keep = std::move(next);
    if (keep.empty()) return d;
  }
  for (size_t j = 0; j < prog.soc.size(); ++j)
    d.soc[j] = Vector::Zero(int(prog.soc[j].A.rows()) + 1);
  for (size_t k = 0; k < keep.size(); ++k) {
    const Col& c = cols[keep[k]];
    double val = c.sign_free ? lam[int(k)] : std::max(lam[int(k)], 0.0);
    if (c.kind == 0)
      d.var_nonneg[c.idx] = val;
    else if (c.kind == 1)
      d.lin[c.idx] = val;
    else if (c.kind == 2)
      d.quad[c.idx] = val;
    else {
      for (const auto& [info, pos] : soc_cols)
        if (pos == keep[k]) {
          if (info.comp < 0)
            d.soc[info.idx][0] = val;
          else
            d.soc[info.idx][info.comp + 1] = val;
        }
    }
  }
  // dual-cone sanity for fitted SOC multipliers
  for (size_t j = 0; j < prog.soc.size(); ++j)
    if (d.soc[j].size()) {
      double z0 = d.soc[j][0];
      double tail = d.soc[j].tail(d.soc[j].size() - 1).norm();
      if (tail > z0 + 1e-7) d.soc[j].setZero();  // reject: verification will fail
    }
  return d;
}

// Fix nonnegative variables forced to zero by rows like -sum z_l >= 0; such
// rows leave the feasible set without a strict interior, which the central
// path cannot handle.
std::vector<bool> forced_zero_vars(const MathProgram& prog) {
  const int n = prog.num_vars();
  std::vector<bool> fixed(n, false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& lc : prog.lin) {
      if (lc.rel == Rel::Eq) continue;
      const double sgn = (lc.rel == Rel::Ge) ? 1.0 : -1.0;
      if (sgn * lc.b < 0.0 || std::abs(lc.b) > 0.0) continue;
      bool all_bad = true;
      bool any_live = false;
      for (int i = 0; i < n && all_bad; ++i) {
        double a = sgn * lc.a[i];
        if (a == 0.0 || fixed[i]) continue;
        any_live = true;
        if (a > 0.0 || !prog.var_nonneg[i]) all_bad = false;
      }
      if (all_bad && any_live) {
        for (int i = 0; i < n; ++i)
          if (sgn * lc.a[i] < 0.0 && !fixed[i] && prog.var_nonneg[i]) {
            fixed[i] = true;
            changed = true;
          }
      }
    }
  }
  return fixed;
}

struct Reduction {
  MathProgram prog;
  std::vector<int> var_map;   // reduced index -> original index
  std::vector<int> row_map;   // reduced lin row -> original lin row
  bool active = false;
};

Reduction reduce_program(const MathProgram& prog) {
  Reduction red;
  auto fixed = forced_zero_vars(prog);
  red.active = std::any_of(fixed.begin(), fixed.end(), [](bool b) { return b; });
  if (!red.active) return red;
  const int n = prog.num_vars();
  std::vector<int> to_red(n, -1);
  for (int i = 0; i < n; ++i)
    if (!fixed[i]) {
      to_red[i] = red.prog.add_var(prog.var_names[i], prog.var_nonneg[i]);
      red.var_map.push_back(i);
    }
  const int nr = red.prog.num_vars();
  auto shrink = [&](const Vector& v) {
    Vector out(nr);
    for (int i = 0; i < nr; ++i) out[i] = v[red.var_map[i]];
    return out;
  };
  for (int j = 0; j < int(prog.lin.size()); ++j) {
    Vector a = shrink(prog.lin[j].a);
    if (a.cwiseAbs().maxCoeff() == 0.0) {
      // row became constant; verify it is trivially satisfied
      double b = prog.lin[j].b;
      bool ok = (prog.lin[j].rel == Rel::Ge) ? (0.0 >= b)
                : (prog.lin[j].rel == Rel::Le) ? (0.0 <= b)
                                               : (b == 0.0);
      require(ok, ErrorCode::SolverFailure, "presolve: inconsistent fixed row");
      continue;
    }
    red.row_map.push_back(j);
    red.prog.add_linear(a, prog.lin[j].rel, prog.lin[j].b, prog.lin[j].label);
  }
  for (const auto& qc : prog.quad) {
    Matrix H(nr, nr);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nr; ++j) H(i, j) = qc.H(red.var_map[i], red.var_map[j]);
    red.prog.add_quadratic(H, shrink(qc.c), qc.d, qc.label);
  }
  for (const auto& sc : prog.soc) {
    Matrix A(sc.A.rows(), nr);
    for (int j = 0; j < nr; ++j) A.col(j) = sc.A.col(red.var_map[j]);
    red.prog.add_soc(A, sc.b, shrink(sc.c), sc.d, sc.label);
  }
  red.prog.obj.c = prog.obj.c.size() ? shrink(prog.obj.c) : Vector();
  red.prog.obj.c0 = prog.obj.c0;
  if (prog.obj.H.size()) {
    Matrix H(nr, nr);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nr; ++j)
        H(i, j) = prog.obj.H(red.var_map[i], red.var_map[j]);
    red.prog.obj.H = H;
  }
  return red;
}

SolveOutput solve_inner(const SolverRequest& req, bool lp_only);

SolveOutput solve_reduced(const SolverRequest& req, bool lp_only) {
  Reduction red = reduce_program(*req.prog);
  if (!red.active) return solve_inner(req, lp_only);
  SolverRequest rq = req;
  rq.prog = &red.prog;
  if (req.warm) {
    Vector w(red.prog.num_vars());
    for (int i = 0; i < red.prog.num_vars(); ++i) w[i] = (*req.warm)[red.var_map[i]];
    rq.warm = w;
  }
  SolveOutput so = solve_inner(rq, lp_only);
  const MathProgram& orig = *req.prog;
  SolveOutput out;
  out.point = so.point;
  if (so.point.v.size()) {
    Vector v = Vector::Zero(orig.num_vars());
    for (int i = 0; i < red.prog.num_vars(); ++i)
      v[red.var_map[i]] = so.point.v[i];
    out.point.v = v;
    out.point.objective = orig.obj.value(v);
  }
  out.duals.var_nonneg = Vector::Zero(orig.num_vars());
  out.duals.lin = Vector::Zero(int(orig.lin.size()));
  out.duals.quad = Vector::Zero(int(orig.quad.size()));
  out.duals.soc.assign(orig.soc.size(), Vector());
  if (so.duals.var_nonneg.size() == red.prog.num_vars())
    for (int i = 0; i < red.prog.num_vars(); ++i)
      out.duals.var_nonneg[red.var_map[i]] = so.duals.var_nonneg[i];
  if (so.duals.lin.size() == int(red.row_map.size()))
    for (size_t j = 0; j < red.row_map.size(); ++j)
      out.duals.lin[red.row_map[j]] = so.duals.lin[int(j)];
  if (so.duals.quad.size() == int(orig.quad.size())) out.duals.quad = so.duals.quad;
  if (so.duals.soc.size() == orig.soc.size()) out.duals.soc = so.duals.soc;
  return out;
}

SolveOutput solve_inner(const SolverRequest& req, bool lp_only) {
  req.check();
  const MathProgram& prog = *req.prog;
  if (lp_only)
    require(prog.is_linear(), ErrorCode::WrongRoute,
            "solve_lp: program is not linear");
  require(prog.is_convex(), ErrorCode::RouteRefused,
          "solve_convex: program is flagged nonconvex");

  ConeMap map;
  ConicStandardForm sf = lower(prog, map);
  IpmOptions opts;
  opts.feas_tol = req.feas_tol;
  opts.gap_tol = req.gap_tol;
  opts.rel_gap_tol = req.gap_tol;
  opts.max_iter = req.max_iter;

  SolveOutput out;
  // quick inconsistency check on the equality block
  if (sf.A.rows()) {
    Vector xls = sf.A.colPivHouseholderQr().solve(sf.b);
    double rnorm = (sf.A * xls - sf.b).norm();
    if (rnorm > 1e-7 * std::max(1.0, sf.b.norm())) {
      out.point.status = SolveStatus::Infeasible;
      out.point.info["eq_residual"] = rnorm;
      return out;
    }
  }

  IpmResult r = solve_conic(sf, opts);
  if (r.status == SolveStatus::Optimal) {
    out.point = finish(prog, map, r, true, &out.duals);
    return out;
  }

  // main solve did not converge: try to certify infeasibility or unboundedness
  IpmResult fp = feasibility_phase(sf, opts);
  if (fp.status == SolveStatus::Optimal && fp.pobj < -1e-7) {
    // verify the Farkas certificate
    bool cert_ok = false;
    if (fp.z.size()) {
      Vector atz = sf.G.transpose() * fp.z;
      if (sf.A.rows() && fp.y.size()) atz += sf.A.transpose() * fp.y;
      double crit = sf.h.dot(fp.z) + (sf.A.rows() && fp.y.size() ? sf.b.dot(fp.y) : 0.0);
      double zmargin = 0.0;
      {
        int offn = 0;
        double m = std::numeric_limits<double>::infinity();
        for (int i = 0; i < sf.K.nonneg; ++i) m = std::min(m, fp.z[i]);
        offn = sf.K.nonneg;
        for (int k : sf.K.soc) {
          double tail = (k > 1) ? fp.z.segment(offn + 1, k - 1).norm() : 0.0;
          m = std::min(m, fp.z[offn] - tail);
          offn += k;
        }
        zmargin = m;
      }
      cert_ok = atz.norm() <= 1e-6 * std::max(1.0, fp.z.norm()) &&
                crit < 0 && zmargin >= -1e-8;
    }
    if (cert_ok) {
      out.point.status = SolveStatus::Infeasible;
      out.point.info["feas_margin"] = fp.pobj;
      out.point.info["certified"] = 1.0;
      return out;
    }
  }
  Vector ray;
  if (find_unbounded_ray(prog, sf, opts, ray)) {
    out.point.status = SolveStatus::Unbounded;
    out.point.v = ray;
    return out;
  }
  // rescue: the iterate may sit at a degenerate optimum the central path
  // cannot certify; polish it and verify KKT with independently fitted
  // multipliers before claiming optimality
  if (r.x.size() && r.pres <= 1e-5) {
    Vector vp = r.x;
    bool polished = try_polish(prog, map, r, vp);
    Duals fitted = fit_duals(prog, vp);
    KktResidual kr = check_kkt(prog, vp, fitted);
    if (kr.within(1e-6)) {
      out.point.v = vp;
      out.point.objective = prog.obj.value(vp);
      out.point.status = SolveStatus::Optimal;
      out.point.info["rescued"] = 1.0;
      out.point.info["polished"] = polished ? 1.0 : 0.0;
      out.point.info["kkt_stationarity"] = kr.stationarity;
      out.duals = fitted;
      return out;
    }
  }
  out.point = finish(prog, map, r, false, &out.duals);
  out.point.status = SolveStatus::IterationLimit;
  return out;
}

}  // namespace

SolutionPoint solve_lp(const SolverRequest& req) {
  return solve_reduced(req, true).point;
}

SolutionPoint solve_convex(const SolverRequest& req) {
  return solve_reduced(req, false).point;
}

SolveOutput solve_convex_full(const SolverRequest& req) {
  return solve_reduced(req, false);
}

KktResidual check_kkt(const MathProgram& prog, const Vector& v,
                      const Duals& duals) {
  KktResidual out;
  out.feasibility = prog.max_violation(v);
  const int n = prog.num_vars();
  Vector grad = prog.obj.c.size() ? Vector(prog.obj.c) : Vector(Vector::Zero(n));
  if (prog.obj.H.size()) grad += 2.0 * prog.obj.H * v;
  double compl_worst = 0.0;
  for (int i = 0; i < n; ++i)
    if (prog.var_nonneg[i] && duals.var_nonneg.size() == n) {
      grad[i] -= duals.var_nonneg[i];
      compl_worst = std::max(compl_worst,
                             std::abs(duals.var_nonneg[i] * v[i]));
    }
  for (size_t j = 0; j < prog.lin.size(); ++j) {
    const auto& lc = prog.lin[j];
    double lam = duals.lin.size() == int(prog.lin.size()) ? duals.lin[j] : 0.0;
    // convention: multipliers enter as + for Le rows, - for Ge rows
    if (lc.rel == Rel::Le) {
      grad += lam * lc.a;
      compl_worst = std::max(compl_worst, std::abs(lam * (lc.a.dot(v) - lc.b)));
    } else if (lc.rel == Rel::Ge) {
      grad -= lam * lc.a;
      compl_worst = std::max(compl_worst, std::abs(lam * (lc.a.dot(v) - lc.b)));
    } else {
      grad += lam * lc.a;  // equality: sign free
    }
  }
  for (size_t j = 0; j < prog.quad.size(); ++j) {
    const auto& qc = prog.quad[j];
    double lam = duals.quad.size() == int(prog.quad.size()) ? duals.quad[j] : 0.0;
    grad += lam * (2.0 * qc.H * v + qc.c);
    compl_worst = std::max(
        compl_worst, std::abs(lam * (v.dot(qc.H * v) + qc.c.dot(v) - qc.d)));
  }
  for (size_t j = 0; j < prog.soc.size(); ++j) {
    if (duals.soc.size() != prog.soc.size() || !duals.soc[j].size()) continue;
    const auto& sc = prog.soc[j];
    const Vector& z = duals.soc[j];
    grad += -sc.c * z[0] - sc.A.transpose() * z.tail(z.size() - 1);
    double resid = (sc.A * v + sc.b).norm() - sc.c.dot(v) - sc.d;
    compl_worst = std::max(compl_worst, std::abs(z[0] * resid));
  }
  out.stationarity = grad.cwiseAbs().maxCoeff() /
                     std::max(1.0, std::abs(prog.obj.value(v)));
  out.complementarity =
      compl_worst / std::max(1.0, std::abs(prog.obj.value(v)));
  return out;
}

}  // namespace rlcp
