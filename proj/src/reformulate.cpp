#include "rlcp/reformulate.hpp"

#include <Eigen/Eigenvalues>

#include "rlcp/solver.hpp"

namespace rlcp {

std::string route_name(Route r) {
  switch (r) {
    case Route::QUncertainBox: return "prop32-box";
    case Route::QUncertainBall1: return "prop32-ball1";
    case Route::QUncertainBall2: return "prop32-ball2";
    case Route::QConic: return "prop33-conic";
    case Route::PsdShiftsNonneg: return "prop34-nonneg";
    case Route::HiddenConvex: return "prop37-hidden-convex";
    case Route::CholeskySdp: return "thm39-sdp";
    case Route::GeneralNonconvex: return "prop42-nonconvex";
    case Route::ConicGeneral: return "cor43-conic";
    case Route::Scenarios: return "scenarios";
    case Route::AviSdp: return "prop51-avi-sdp";
  }
  return "?";
}

namespace {

Matrix sym(const Matrix& M) { return 0.5 * (M + M.transpose()); }

bool all_zero(const std::vector<Vector>& vs) {
  for (const auto& v : vs)
    if (v.size() && v.cwiseAbs().maxCoeff() > 0.0) return false;
  return true;
}

// worst-case of sum_l u_l w_l over the ball kinds, as data
double ball_max(const UncertaintySet& s, const Vector& w) {
  switch (s.kind) {
    case SetKind::BoxInf: return w.cwiseAbs().sum();
    case SetKind::BallOne: return w.size() ? w.cwiseAbs().maxCoeff() : 0.0;
    case SetKind::BallTwo: return w.norm();
    case SetKind::BoxInfNonneg: return w.cwiseMax(0.0).sum();
    case SetKind::BallOneNonneg:
      return w.size() ? std::max(0.0, w.maxCoeff()) : 0.0;
    default:
      throw Error(ErrorCode::RouteRefused, "ball_max: not a norm-ball set");
  }
}

// Constant row relief from an independent q-only uncertainty block:
// shift_i = min over the extra set of sum_l u_l [q_l]_i  (data, not variables).
Vector q_extra_row_shift(const UncertainLCP& p) {
  Vector shift = Vector::Zero(p.n());
  if (!p.q_extra) return shift;
  const auto& ex = *p.q_extra;
  for (int i = 0; i < p.n(); ++i) {
    Vector wi(int(ex.qs.size()));
    for (size_t l = 0; l < ex.qs.size(); ++l) wi[int(l)] = ex.qs[l][i];
    shift[i] = -ball_max(ex.set, Vector(-wi));
  }
  return shift;
}

// Objective-side worst case of the independent q block: appends epigraph
// variables to `prog` per the set kind and returns the linear objective
// contribution over the grown variable vector.
Vector add_q_extra_objective(MathProgram& prog, const UncertainLCP& p, int x0) {
  if (!p.q_extra) return Vector::Zero(prog.num_vars());
  const auto& ex = *p.q_extra;
  const int Le = int(ex.qs.size());
  const int n = p.n();
  auto xcoef = [&](const Vector& ql, int total) {
    Vector a = Vector::Zero(total);
    a.segment(x0, n) = ql;
    return a;
  };
  Vector lin;
  switch (ex.set.kind) {
    case SetKind::BoxInf:
    case SetKind::BoxInfNonneg: {
      const bool nonneg = ex.set.kind == SetKind::BoxInfNonneg;
      int s0 = prog.add_vars("s_ext", Le, nonneg);
      for (int l = 0; l < Le; ++l) {
        int total = prog.num_vars();
        Vector a = xcoef(ex.qs[l], total);
        a[s0 + l] = -1.0;
        prog.add_linear(a, Rel::Le, 0.0, "ext-epi+");
        if (!nonneg) {
          Vector a2 = xcoef(Vector(-ex.qs[l]), total);
          a2[s0 + l] = -1.0;
          prog.add_linear(a2, Rel::Le, 0.0, "ext-epi-");
        }
      }
      lin = Vector::Zero(prog.num_vars());
      lin.segment(s0, Le).setOnes();
      return lin;
    }
    case SetKind::BallOne:
    case SetKind::BallOneNonneg: {
      const bool nonneg = ex.set.kind == SetKind::BallOneNonneg;
      int s0 = prog.add_var("s_ext", nonneg);
      for (int l = 0; l < Le; ++l) {
        int total = prog.num_vars();
        Vector a = xcoef(ex.qs[l], total);
        a[s0] = -1.0;
        prog.add_linear(a, Rel::Le, 0.0, "ext-epi+");
        if (!nonneg) {
          Vector a2 = xcoef(Vector(-ex.qs[l]), total);
          a2[s0] = -1.0;
          prog.add_linear(a2, Rel::Le, 0.0, "ext-epi-");
        }
      }
      lin = Vector::Zero(prog.num_vars());
      lin[s0] = 1.0;
      return lin;
    }
    case SetKind::BallTwo: {
      int s0 = prog.add_var("s_ext", true);
      int total = prog.num_vars();
      Matrix A = Matrix::Zero(Le, total);
      for (int l = 0; l < Le; ++l) A.row(l).segment(x0, n) = ex.qs[l];
      Vector csel = Vector::Zero(total);
      csel[s0] = 1.0;
      prog.add_soc(A, Vector::Zero(Le), csel, 0.0, "ext-epi-soc");
      lin = Vector::Zero(prog.num_vars());
      lin[s0] = 1.0;
      return lin;
    }
    default:
      throw Error(ErrorCode::RouteRefused,
                  "independent q uncertainty must use a norm-ball set");
  }
}

// pad/extend the quadratic objective to the current variable count
void finish_objective(MathProgram& prog, const Matrix& Hx, const Vector& lin,
                      int x0, int n) {
  const int total = prog.num_vars();
  if (Hx.size()) {
    Matrix H = Matrix::Zero(total, total);
    H.block(x0, x0, n, n) = Hx;
    prog.obj.H = H;
  }
  Vector c = Vector::Zero(total);
  c.head(lin.size()) = lin;
  prog.obj.c = c;
}

RcArtifact make_artifact(MathProgram prog, int x0, int n, int t_idx, Route r) {
  prog.pad();
  RcArtifact art;
  art.program = std::move(prog);
  art.x_index = x0;
  art.n = n;
  for (int i = 0; i < n; ++i)
    art.x_slot.push_back(art.program.var_names[x0 + i]);
  art.t_index = t_idx;
  if (t_idx >= 0) art.t_slot = art.program.var_names[t_idx];
  art.route = r;
  return art;
}

void require_no_m_shift(const UncertainLCP& p, const char* who) {
  require(!p.any_m_shift(), ErrorCode::WrongRoute,
          std::string(who) + ": problem has M shifts (wrong route)");
}

void require_psd_m0(const UncertainLCP& p, const char* who) {
  require(classify_shift(p.family.M0) == ShiftSign::Psd, ErrorCode::RouteRefused,
          std::string(who) + ": symmetric part of M0 is not PSD");
}

double conic_slater_margin(const ConicSet& cs);

// append a K*-membership constraint for the variable block starting at v0
void add_dual_cone_membership(MathProgram& prog, const ConeProduct& K, int v0,
                              const std::string& label) {
  // nonnegative orthant and second-order cones are self-dual
  for (int i = 0; i < K.nonneg; ++i) prog.var_nonneg[v0 + i] = true;
  int off = K.nonneg;
  for (int kdim : K.soc) {
    int total = prog.num_vars();
    Matrix A = Matrix::Zero(kdim - 1, total);
    for (int r = 0; r < kdim - 1; ++r) A(r, v0 + off + 1 + r) = 1.0;
    Vector csel = Vector::Zero(total);
    csel[v0 + off] = 1.0;
    prog.add_soc(A, Vector::Zero(kdim - 1), csel, 0.0, label);
    off += kdim;
  }
}

}  // namespace

RcArtifact rc_q_uncertain(const UncertainLCP& problem) {
  require_no_m_shift(problem, "rc_q_uncertain");
  require_psd_m0(problem, "rc_q_uncertain");
  const auto& fam = problem.family;
  const int n = fam.n(), L = fam.L();
  const Vector shift = q_extra_row_shift(problem);
  const Matrix M0s = sym(fam.M0);

  MathProgram prog;
  int x0 = prog.add_vars("x", n, true);
  Route route;
  Vector lin;

  switch (problem.set.kind) {
    case SetKind::BoxInf: {
      route = Route::QUncertainBox;
      int tb = (L > 0) ? prog.add_vars("t", L, false) : 0;
      for (int l = 0; l < L; ++l) {
        int total = prog.num_vars();
        Vector a = Vector::Zero(total);
        a.segment(x0, n) = fam.qs[l];
        a[tb + l] = -1.0;
        prog.add_linear(a, Rel::Le, 0.0, "epi+");
        Vector a2 = Vector::Zero(total);
        a2.segment(x0, n) = -fam.qs[l];
        a2[tb + l] = -1.0;
        prog.add_linear(a2, Rel::Le, 0.0, "epi-");
      }
      Vector absq = Vector::Zero(n);
      for (int l = 0; l < L; ++l) absq += fam.qs[l].cwiseAbs();
      for (int i = 0; i < n; ++i) {
        Vector a = Vector::Zero(prog.num_vars());
        a.segment(x0, n) = fam.M0.row(i);
        prog.add_linear(a, Rel::Ge, -(fam.q0[i] - absq[i] + shift[i]), "feas");
      }
      lin = Vector::Zero(prog.num_vars());
      lin.segment(x0, n) = fam.q0;
      if (L > 0) lin.segment(tb, L).setOnes();
      break;
    }
    case SetKind::BallOne: {
      route = Route::QUncertainBall1;
      int t1 = (L > 0) ? prog.add_var("t", false) : -1;
      for (int l = 0; l < L; ++l) {
        int total = prog.num_vars();
        Vector a = Vector::Zero(total);
        a.segment(x0, n) = fam.qs[l];
        a[t1] = -1.0;
        prog.add_linear(a, Rel::Le, 0.0, "epi+");
        Vector a2 = Vector::Zero(total);
        a2.segment(x0, n) = -fam.qs[l];
        a2[t1] = -1.0;
        prog.add_linear(a2, Rel::Le, 0.0, "epi-");
      }
      if (L == 0) {
        for (int i = 0; i < n; ++i) {
          Vector a = Vector::Zero(prog.num_vars());
          a.segment(x0, n) = fam.M0.row(i);
          prog.add_linear(a, Rel::Ge, -(fam.q0[i] + shift[i]), "feas");
        }
      }
      for (int l = 0; l < L; ++l)
        for (int i = 0; i < n; ++i) {
          Vector a = Vector::Zero(prog.num_vars());
          a.segment(x0, n) = fam.M0.row(i);
          prog.add_linear(a, Rel::Ge,
                          -(fam.q0[i] - std::abs(fam.qs[l][i]) + shift[i]),
                          "feas");
        }
      lin = Vector::Zero(prog.num_vars());
      lin.segment(x0, n) = fam.q0;
      if (t1 >= 0) lin[t1] = 1.0;
      break;
    }
    case SetKind::BallTwo: {
      route = Route::QUncertainBall2;
      int t1 = -1;
      if (L > 0) {
        t1 = prog.add_var("t", true);
        int total = prog.num_vars();
        Matrix A = Matrix::Zero(L, total);
        for (int l = 0; l < L; ++l) A.row(l).segment(x0, n) = fam.qs[l];
        Vector csel = Vector::Zero(total);
        csel[t1] = 1.0;
        prog.add_soc(A, Vector::Zero(L), csel, 0.0, "epi-soc");
      }
      Vector qbar = Vector::Zero(n);
      for (int i = 0; i < n; ++i) {
        double s2 = 0;
        for (int l = 0; l < L; ++l) s2 += fam.qs[l][i] * fam.qs[l][i];
        qbar[i] = std::sqrt(s2);
      }
      for (int i = 0; i < n; ++i) {
        Vector a = Vector::Zero(prog.num_vars());
        a.segment(x0, n) = fam.M0.row(i);
        prog.add_linear(a, Rel::Ge, -(fam.q0[i] - qbar[i] + shift[i]), "feas");
      }
      lin = Vector::Zero(prog.num_vars());
      lin.segment(x0, n) = fam.q0;
      if (t1 >= 0) lin[t1] = 1.0;
      break;
    }
    default:
      throw Error(ErrorCode::WrongRoute,
                  "rc_q_uncertain: set kind " +
                      set_kind_name(problem.set.kind) +
                      " is not one of the three symmetric balls");
  }
  Vector extra = add_q_extra_objective(prog, problem, x0);
  extra.head(lin.size()) += lin;
  finish_objective(prog, M0s, extra, x0, n);
  return make_artifact(std::move(prog), x0, n, -1, route);
}

RcArtifact rc_q_conic(const UncertainLCP& problem) {
  require_no_m_shift(problem, "rc_q_conic");
  require_psd_m0(problem, "rc_q_conic");
  require(problem.set.kind == SetKind::Conic, ErrorCode::WrongRoute,
          "rc_q_conic: set kind is not conic");
  const auto& cs = *problem.set.conic;
  if (!cs.K.soc.empty()) {
    double margin = conic_slater_margin(cs);
    require(margin > 1e-9, ErrorCode::RouteRefused,
            "rc_q_conic: no strict-interior certificate for the "
            "non-polyhedral cone (margin " + std::to_string(margin) + ")");
  }
  const auto& fam = problem.family;
  const int n = fam.n(), L = fam.L();
  const int m = int(cs.P.rows());
  const int kq = int(cs.Q.cols());
  const Vector shift = q_extra_row_shift(problem);

  MathProgram prog;
  int x0 = prog.add_vars("x", n, true);
  int y0 = prog.add_vars("y", m, false);
  add_dual_cone_membership(prog, cs.K, y0, "y-in-Kdual");
  std::vector<int> z0(n);
  for (int i = 0; i < n; ++i) {
    z0[i] = prog.add_vars("z" + std::to_string(i), m, false);
    add_dual_cone_membership(prog, cs.K, z0[i], "z-in-Kdual");
  }
  const int total = prog.num_vars();

  for (int l = 0; l < L; ++l) {
    Vector a = Vector::Zero(total);
    a.segment(x0, n) = fam.qs[l];
    a.segment(y0, m) = cs.P.col(l);
    prog.add_linear(a, Rel::Eq, 0.0, "obj-dual");
  }
  for (int j = 0; j < kq; ++j) {
    Vector a = Vector::Zero(total);
    a.segment(y0, m) = cs.Q.col(j);
    prog.add_linear(a, Rel::Eq, 0.0, "obj-dual-q");
  }
  for (int i = 0; i < n; ++i) {
    Vector a = Vector::Zero(total);
    a.segment(x0, n) = fam.M0.row(i);
    a.segment(z0[i], m) = -cs.p;
    prog.add_linear(a, Rel::Ge, -(fam.q0[i] + shift[i]), "feas");
    for (int l = 0; l < L; ++l) {
      Vector al = Vector::Zero(total);
      al.segment(z0[i], m) = cs.P.col(l);
      prog.add_linear(al, Rel::Eq, fam.qs[l][i], "row-dual");
    }
    for (int j = 0; j < kq; ++j) {
      Vector aq = Vector::Zero(total);
      aq.segment(z0[i], m) = cs.Q.col(j);
      prog.add_linear(aq, Rel::Eq, 0.0, "row-dual-q");
    }
  }
  Vector lin = add_q_extra_objective(prog, problem, x0);
  lin.segment(x0, n) += fam.q0;
  lin.segment(y0, m) += cs.p;
  finish_objective(prog, sym(fam.M0), lin, x0, n);
  return make_artifact(std::move(prog), x0, n, -1, Route::QConic);
}

RcArtifact rc_psd_shifts_nonneg(const UncertainLCP& problem) {
  require(problem.set.kind == SetKind::BoxInfNonneg ||
              problem.set.kind == SetKind::BallOneNonneg,
          ErrorCode::WrongRoute,
          "rc_psd_shifts_nonneg: set kind must be a nonnegative box or 1-ball");
  require(problem.all_shifts_psd(), ErrorCode::RouteRefused,
          "rc_psd_shifts_nonneg: an indefinite shift refuses this route");
  require(all_zero(problem.family.qs), ErrorCode::WrongRoute,
          "rc_psd_shifts_nonneg: shared-u q shifts present; use the general "
          "route (independent q uncertainty goes in q_extra)");
  const auto& fam = problem.family;
  const int n = fam.n(), L = fam.L();
  const Vector shift = q_extra_row_shift(problem);

  MathProgram prog;
  int x0 = prog.add_vars("x", n, true);
  if (problem.set.kind == SetKind::BoxInfNonneg) {
    std::vector<int> zl(L);
    for (int l = 0; l < L; ++l)
      zl[l] = prog.add_vars("z" + std::to_string(l + 1), n, true);
    const int total = prog.num_vars();
    for (int i = 0; i < n; ++i) {
      Vector a = Vector::Zero(total);
      a.segment(x0, n) = fam.M0.row(i);
      for (int l = 0; l < L; ++l) a[zl[l] + i] = -1.0;
      prog.add_linear(a, Rel::Ge, -(fam.q0[i] + shift[i]), "feas");
    }
    for (int l = 0; l < L; ++l)
      for (int i = 0; i < n; ++i) {
        Vector a = Vector::Zero(total);
        a.segment(x0, n) = fam.Ms[l].row(i);
        a[zl[l] + i] = 1.0;
        prog.add_linear(a, Rel::Ge, 0.0, "z-split");
      }
    Matrix H = sym(fam.M0);
    for (int l = 0; l < L; ++l) H += sym(fam.Ms[l]);
    Vector lin = add_q_extra_objective(prog, problem, x0);
    lin.segment(x0, n) += fam.q0;
    finish_objective(prog, H, lin, x0, n);
    return make_artifact(std::move(prog), x0, n, -1, Route::PsdShiftsNonneg);
  }

  // BallOneNonneg: shared z, per-shift quadratic epigraph constraints
  int z0 = prog.add_vars("z", n, true);
  int tt = prog.add_var("t", false);
  const int total = prog.num_vars();
  auto add_epi = [&](const Matrix& Hl) {
    Matrix H = Matrix::Zero(total, total);
    H.block(x0, x0, n, n) = Hl;
    Vector c = Vector::Zero(total);
    c.segment(x0, n) = fam.q0;
    c[tt] = -1.0;
    prog.add_quadratic(H, c, 0.0, "epi");
  };
  if (L == 0) add_epi(sym(fam.M0));
  for (int l = 0; l < L; ++l) add_epi(sym(fam.M0) + sym(fam.Ms[l]));
  for (int i = 0; i < n; ++i) {
    Vector a = Vector::Zero(total);
    a.segment(x0, n) = fam.M0.row(i);
    a[z0 + i] = -1.0;
    prog.add_linear(a, Rel::Ge, -(fam.q0[i] + shift[i]), "feas");
  }
  for (int l = 0; l < L; ++l)
    for (int i = 0; i < n; ++i) {
      Vector a = Vector::Zero(total);
      a.segment(x0, n) = fam.Ms[l].row(i);
      a[z0 + i] = 1.0;
      prog.add_linear(a, Rel::Ge, 0.0, "z-split");
    }
  Vector lin = add_q_extra_objective(prog, problem, x0);
  lin[tt] += 1.0;
  finish_objective(prog, Matrix(), lin, x0, n);
  return make_artifact(std::move(prog), x0, n, tt, Route::PsdShiftsNonneg);
}

RcArtifact rc_hidden_convex(const UncertainLCP& problem) {
  require(problem.set.kind == SetKind::BoxInf ||
              problem.set.kind == SetKind::BallOne ||
              problem.set.kind == SetKind::BallTwo,
          ErrorCode::WrongRoute,
          "rc_hidden_convex: set kind must be a symmetric ball");
  require(problem.all_shifts_psd(), ErrorCode::RouteRefused,
          "rc_hidden_convex: an indefinite shift refuses this route");
  require(all_zero(problem.family.qs), ErrorCode::WrongRoute,
          "rc_hidden_convex: shared-u q shifts present; use the general route");
  const auto& fam = problem.family;
  const int n = fam.n(), L = fam.L();
  const Vector shift = q_extra_row_shift(problem);

  MathProgram prog;
  int x0 = prog.add_vars("x", n, true);

  if (problem.set.kind == SetKind::BoxInf) {
    std::vector<int> zl(L);
    for (int l = 0; l < L; ++l)
      zl[l] = prog.add_vars("z" + std::to_string(l + 1), n, true);
    const int total = prog.num_vars();
    for (int i = 0; i < n; ++i) {
      Vector a = Vector::Zero(total);
      a.segment(x0, n) = fam.M0.row(i);
      for (int l = 0; l < L; ++l) a[zl[l] + i] = -1.0;
      prog.add_linear(a, Rel::Ge, -(fam.q0[i] + shift[i]), "feas");
    }
    for (int l = 0; l < L; ++l)
      for (int i = 0; i < n; ++i) {
        Vector a = Vector::Zero(total);
        a.segment(x0, n) = fam.Ms[l].row(i);
        a[zl[l] + i] = -1.0;
        prog.add_linear(a, Rel::Le, 0.0, "abs+");  // M_l x <= z_l
        Vector a2 = Vector::Zero(total);
        a2.segment(x0, n) = fam.Ms[l].row(i);
        a2[zl[l] + i] = 1.0;
        prog.add_linear(a2, Rel::Ge, 0.0, "abs-");  // M_l x >= -z_l
      }
    Matrix H = sym(fam.M0);
    for (int l = 0; l < L; ++l) H += sym(fam.Ms[l]);
    Vector lin = add_q_extra_objective(prog, problem, x0);
    lin.segment(x0, n) += fam.q0;
    finish_objective(prog, H, lin, x0, n);
    return make_artifact(std::move(prog), x0, n, -1, Route::HiddenConvex);
  }

  if (problem.set.kind == SetKind::BallOne) {
    int z0 = prog.add_vars("z", n, true);
    int tt = prog.add_var("t", false);
    const int total = prog.num_vars();
    auto add_epi = [&](const Matrix& Hl) {
      Matrix H = Matrix::Zero(total, total);
      H.block(x0, x0, n, n) = Hl;
      Vector c = Vector::Zero(total);
      c.segment(x0, n) = fam.q0;
      c[tt] = -1.0;
      prog.add_quadratic(H, c, 0.0, "epi");
    };
    if (L == 0) add_epi(sym(fam.M0));
    for (int l = 0; l < L; ++l) add_epi(sym(fam.M0) + sym(fam.Ms[l]));
    for (int i = 0; i < n; ++i) {
      Vector a = Vector::Zero(total);
      a.segment(x0, n) = fam.M0.row(i);
      a[z0 + i] = -1.0;
      prog.add_linear(a, Rel::Ge, -(fam.q0[i] + shift[i]), "feas");
    }
    for (int l = 0; l < L; ++l)
      for (int i = 0; i < n; ++i) {
        Vector a = Vector::Zero(total);
        a.segment(x0, n) = fam.Ms[l].row(i);
        a[z0 + i] = -1.0;
        prog.add_linear(a, Rel::Le, 0.0, "abs+");
        Vector a2 = Vector::Zero(total);
        a2.segment(x0, n) = fam.Ms[l].row(i);
        a2[z0 + i] = 1.0;
        prog.add_linear(a2, Rel::Ge, 0.0, "abs-");
      }
    Vector lin = add_q_extra_objective(prog, problem, x0);
    lin[tt] += 1.0;
    finish_objective(prog, Matrix(), lin, x0, n);
    return make_artifact(std::move(prog), x0, n, tt, Route::HiddenConvex);
  }

  // BallTwo: norm-of-quadratics objective + per-row second-order rows
  int w0 = (L > 0) ? prog.add_vars("w", L, false) : 0;
  int t2 = (L > 0) ? prog.add_var("t2", true) : -1;
  {
    const int total = prog.num_vars();
    for (int l = 0; l < L; ++l) {
      Matrix H = Matrix::Zero(total, total);
      H.block(x0, x0, n, n) = sym(fam.Ms[l]);
      Vector c = Vector::Zero(total);
      c[w0 + l] = -1.0;
      prog.add_quadratic(H, c, 0.0, "w-def");  // x'M_l x <= w_l
    }
    if (L > 0) {
      Matrix A = Matrix::Zero(L, total);
      for (int l = 0; l < L; ++l) A(l, w0 + l) = 1.0;
      Vector csel = Vector::Zero(total);
      csel[t2] = 1.0;
      prog.add_soc(A, Vector::Zero(L), csel, 0.0, "norm-w");
    }
    for (int i = 0; i < n; ++i) {
      Matrix A = Matrix::Zero(L, total);
      for (int l = 0; l < L; ++l) A.row(l).segment(x0, n) = fam.Ms[l].row(i);
      Vector csel = Vector::Zero(total);
      csel.segment(x0, n) = fam.M0.row(i);
      prog.add_soc(A, Vector::Zero(L), csel, fam.q0[i] + shift[i], "feas-soc");
    }
  }
  Vector lin = add_q_extra_objective(prog, problem, x0);
  lin.segment(x0, n) += fam.q0;
  if (t2 >= 0) lin[t2] += 1.0;
  finish_objective(prog, sym(fam.M0), lin, x0, n);
  return make_artifact(std::move(prog), x0, n, -1, Route::HiddenConvex);
}

RcArtifact rc_general_nonconvex(const UncertainLCP& problem) {
  switch (problem.set.kind) {
    case SetKind::BoxInf:
    case SetKind::BallOne:
    case SetKind::BallTwo:
    case SetKind::BoxInfNonneg:
    case SetKind::BallOneNonneg:
      break;
    default:
      throw Error(ErrorCode::WrongRoute,
                  "rc_general_nonconvex: set kind must be a norm ball");
  }
  const auto& fam = problem.family;
  const int n = fam.n(), L = fam.L();
  const Vector shift = q_extra_row_shift(problem);
  const bool nonneg_u = problem.set.nonneg_restricted();

  MathProgram prog;
  int x0 = prog.add_vars("x", n, true);
  int tt = prog.add_var("t", false);

  std::vector<int> tau;  // one per shift for box kinds, a single scalar else
  const bool per_shift_tau = (problem.set.kind == SetKind::BoxInf ||
                              problem.set.kind == SetKind::BoxInfNonneg);
  if (L > 0) {
    if (per_shift_tau)
      for (int l = 0; l < L; ++l)
        tau.push_back(prog.add_var("tau[" + std::to_string(l) + "]", nonneg_u));
    else
      tau.push_back(
          prog.add_var("tau", problem.set.kind == SetKind::BallOneNonneg));
  }

  if (problem.set.kind == SetKind::BallOne ||
      problem.set.kind == SetKind::BallTwo ||
      problem.set.kind == SetKind::BallOneNonneg) {
    // w_l = x'M_l x + q_l'x couplings (quadratic equalities), then the norm
    int w0 = (L > 0) ? prog.add_vars("w", L, false) : 0;
    const int total = prog.num_vars();
    for (int l = 0; l < L; ++l) {
      Matrix H = Matrix::Zero(total, total);
      H.block(x0, x0, n, n) = sym(fam.Ms[l]);
      Vector c = Vector::Zero(total);
      c.segment(x0, n) = fam.qs[l];
      c[w0 + l] = -1.0;
      prog.add_quadratic(H, c, 0.0, "w-def-le");
      prog.add_quadratic(Matrix(-H), Vector(-c), 0.0, "w-def-ge");
    }
    if (L > 0) {
      if (problem.set.kind == SetKind::BallTwo) {
        Matrix A = Matrix::Zero(L, total);
        for (int l = 0; l < L; ++l) A(l, w0 + l) = 1.0;
        Vector csel = Vector::Zero(total);
        csel[tau[0]] = 1.0;
        prog.add_soc(A, Vector::Zero(L), csel, 0.0, "norm-w");
      } else {
        for (int l = 0; l < L; ++l) {
          Vector a = Vector::Zero(total);
          a[w0 + l] = 1.0;
          a[tau[0]] = -1.0;
          prog.add_linear(a, Rel::Le, 0.0, "tau+");
          if (problem.set.kind == SetKind::BallOne) {
            Vector a2 = Vector::Zero(total);
            a2[w0 + l] = -1.0;
            a2[tau[0]] = -1.0;
            prog.add_linear(a2, Rel::Le, 0.0, "tau-");
          }
        }
      }
    }
  } else {
    // BoxInf / BoxInfNonneg: tau_l bounds the shift quadratic directly
    const int total = prog.num_vars();
    for (int l = 0; l < L; ++l) {
      Matrix H = Matrix::Zero(total, total);
      H.block(x0, x0, n, n) = sym(fam.Ms[l]);
      Vector c = Vector::Zero(total);
      c.segment(x0, n) = fam.qs[l];
      c[tau[l]] = -1.0;
      prog.add_quadratic(H, c, 0.0, "tau-epi+");
      if (problem.set.kind == SetKind::BoxInf)
        prog.add_quadratic(Matrix(-H), Vector(-c), 0.0, "tau-epi-");
    }
  }

  {
    // master epigraph: x'M0x + q0'x + sum tau <= t
    const int total = prog.num_vars();
    Matrix H = Matrix::Zero(total, total);
    H.block(x0, x0, n, n) = sym(fam.M0);
    Vector c = Vector::Zero(total);
    c.segment(x0, n) = fam.q0;
    for (int ti : tau) c[ti] = 1.0;
    c[tt] = -1.0;
    prog.add_quadratic(H, c, 0.0, "master-epi");
  }

  if (problem.set.kind == SetKind::BoxInf ||
      problem.set.kind == SetKind::BoxInfNonneg) {
    std::vector<int> zl(L);
    for (int l = 0; l < L; ++l)
      zl[l] = prog.add_vars("z" + std::to_string(l + 1), n, true);
    const int total = prog.num_vars();
    for (int i = 0; i < n; ++i) {
      Vector a = Vector::Zero(total);
      a.segment(x0, n) = fam.M0.row(i);
      for (int l = 0; l < L; ++l) a[zl[l] + i] = -1.0;
      prog.add_linear(a, Rel::Ge, -(fam.q0[i] + shift[i]), "feas");
    }
    for (int l = 0; l < L; ++l)
      for (int i = 0; i < n; ++i) {
        Vector a = Vector::Zero(total);
        a.segment(x0, n) = fam.Ms[l].row(i);
        a[zl[l] + i] = 1.0;
        prog.add_linear(a, Rel::Ge, -fam.qs[l][i], "z-split");
        if (problem.set.kind == SetKind::BoxInf) {
          Vector a2 = Vector::Zero(total);
          a2.segment(x0, n) = fam.Ms[l].row(i);
          a2[zl[l] + i] = -1.0;
          prog.add_linear(a2, Rel::Le, -fam.qs[l][i], "z-split-");
        }
      }
  } else if (problem.set.kind == SetKind::BallOne ||
             problem.set.kind == SetKind::BallOneNonneg) {
    int z0 = prog.add_vars("z", n, true);
    const int total = prog.num_vars();
    for (int i = 0; i < n; ++i) {
      Vector a = Vector::Zero(total);
      a.segment(x0, n) = fam.M0.row(i);
      a[z0 + i] = -1.0;
      prog.add_linear(a, Rel::Ge, -(fam.q0[i] + shift[i]), "feas");
    }
    for (int l = 0; l < L; ++l)
      for (int i = 0; i < n; ++i) {
        Vector a = Vector::Zero(total);
        a.segment(x0, n) = fam.Ms[l].row(i);
        a[z0 + i] = 1.0;
        prog.add_linear(a, Rel::Ge, -fam.qs[l][i], "abs-");
        if (problem.set.kind == SetKind::BallOne) {
          Vector a2 = Vector::Zero(total);
          a2.segment(x0, n) = fam.Ms[l].row(i);
          a2[z0 + i] = -1.0;
          prog.add_linear(a2, Rel::Le, -fam.qs[l][i], "abs+");
        }
      }
  } else {  // BallTwo
    const int total = prog.num_vars();
    for (int i = 0; i < n; ++i) {
      Matrix A = Matrix::Zero(L, total);
      Vector b(L);
      for (int l = 0; l < L; ++l) {
        A.row(l).segment(x0, n) = fam.Ms[l].row(i);
        b[l] = fam.qs[l][i];
      }
      Vector csel = Vector::Zero(total);
      csel.segment(x0, n) = fam.M0.row(i);
      prog.add_soc(A, b, csel, fam.q0[i] + shift[i], "feas-soc");
    }
  }

  Vector lin = add_q_extra_objective(prog, problem, x0);
  lin[tt] += 1.0;
  finish_objective(prog, Matrix(), lin, x0, n);
  return make_artifact(std::move(prog), x0, n, tt, Route::GeneralNonconvex);
}

RcArtifact rc_conic_general(const UncertainLCP& problem) {
  require(problem.set.kind == SetKind::Conic, ErrorCode::WrongRoute,
          "rc_conic_general: set kind is not conic");
  const auto& cs = *problem.set.conic;
  if (!cs.K.soc.empty()) {
    double margin = conic_slater_margin(cs);
    require(margin > 1e-9, ErrorCode::RouteRefused,
            "rc_conic_general: no strict-interior certificate");
  }
  const auto& fam = problem.family;
  const int n = fam.n(), L = fam.L();
  const int m = int(cs.P.rows());
  const int kq = int(cs.Q.cols());
  const Vector shift = q_extra_row_shift(problem);

  MathProgram prog;
  int x0 = prog.add_vars("x", n, true);
  int y0 = prog.add_vars("y", m, false);
  add_dual_cone_membership(prog, cs.K, y0, "y-in-Kdual");
  std::vector<int> z0(n);
  for (int i = 0; i < n; ++i) {
    z0[i] = prog.add_vars("z" + std::to_string(i), m, false);
    add_dual_cone_membership(prog, cs.K, z0[i], "z-in-Kdual");
  }
  const int total = prog.num_vars();

  // (P'y)_l + x'M_l x + q_l'x = 0 (quadratic equality)
  for (int l = 0; l < L; ++l) {
    Matrix H = Matrix::Zero(total, total);
    H.block(x0, x0, n, n) = sym(fam.Ms[l]);
    Vector c = Vector::Zero(total);
    c.segment(x0, n) = fam.qs[l];
    c.segment(y0, m) = cs.P.col(l);
    prog.add_quadratic(H, c, 0.0, "obj-dual-le");
    prog.add_quadratic(Matrix(-H), Vector(-c), 0.0, "obj-dual-ge");
  }
  for (int j = 0; j < kq; ++j) {
    Vector a = Vector::Zero(total);
    a.segment(y0, m) = cs.Q.col(j);
    prog.add_linear(a, Rel::Eq, 0.0, "obj-dual-q");
  }
  for (int i = 0; i < n; ++i) {
    Vector a = Vector::Zero(total);
    a.segment(x0, n) = fam.M0.row(i);
    a.segment(z0[i], m) = -cs.p;
    prog.add_linear(a, Rel::Ge, -(fam.q0[i] + shift[i]), "feas");
    for (int l = 0; l < L; ++l) {
      Vector al = Vector::Zero(total);
      al.segment(z0[i], m) = cs.P.col(l);
      al.segment(x0, n) -= fam.Ms[l].row(i);
      prog.add_linear(al, Rel::Eq, fam.qs[l][i], "row-dual");
    }
    for (int j = 0; j < kq; ++j) {
      Vector aq = Vector::Zero(total);
      aq.segment(z0[i], m) = cs.Q.col(j);
      prog.add_linear(aq, Rel::Eq, 0.0, "row-dual-q");
    }
  }
  Vector lin = add_q_extra_objective(prog, problem, x0);
  lin.segment(x0, n) += fam.q0;
  lin.segment(y0, m) += cs.p;
  finish_objective(prog, sym(fam.M0), lin, x0, n);
  return make_artifact(std::move(prog), x0, n, -1, Route::ConicGeneral);
}

RcArtifact rc_finite_scenarios(const UncertainLCP& problem) {
  require(problem.set.kind == SetKind::FiniteScenarios, ErrorCode::WrongRoute,
          "rc_finite_scenarios: set kind is not finite");
  require(!problem.set.scenarios.empty(), ErrorCode::InvalidArgument,
          "rc_finite_scenarios: empty scenario list");
  const auto& fam = problem.family;
  const int n = fam.n();
  const Vector shift = q_extra_row_shift(problem);

  MathProgram prog;
  int x0 = prog.add_vars("x", n, true);
  int tt = prog.add_var("t", false);
  const int total_pre = prog.num_vars();
  int k = 0;
  for (const auto& u : problem.set.scenarios) {
    Matrix Mu = fam.M(u);
    Vector qu = fam.q(u);
    Matrix H = Matrix::Zero(total_pre, total_pre);
    H.block(x0, x0, n, n) = sym(Mu);
    Vector c = Vector::Zero(total_pre);
    c.segment(x0, n) = qu;
    c[tt] = -1.0;
    prog.add_quadratic(H, c, 0.0, "epi-s" + std::to_string(k));
    for (int i = 0; i < n; ++i) {
      Vector a = Vector::Zero(total_pre);
      a.segment(x0, n) = Mu.row(i);
      prog.add_linear(a, Rel::Ge, -(qu[i] + shift[i]),
                      "feas-s" + std::to_string(k));
    }
    ++k;
  }
  Vector lin = add_q_extra_objective(prog, problem, x0);
  lin[tt] += 1.0;
  finish_objective(prog, Matrix(), lin, x0, n);
  return make_artifact(std::move(prog), x0, n, tt, Route::Scenarios);
}

UncertainLCP box_vertex_reduction(const UncertainLCP& problem, int max_dim) {
  require(problem.set.kind == SetKind::BoxInf ||
              problem.set.kind == SetKind::BoxInfNonneg,
          ErrorCode::WrongRoute, "box_vertex_reduction: set is not a box");
  auto vs = problem.set.vertices(max_dim);
  return UncertainLCP::make(problem.family, UncertaintySet::finite(vs),
                            problem.q_extra);
}

Route route_auto(const UncertainLCP& p) {
  switch (p.set.kind) {
    case SetKind::FiniteScenarios: return Route::Scenarios;
    case SetKind::CholeskyUA: return Route::CholeskySdp;
    case SetKind::Conic:
      return p.any_m_shift() ? Route::ConicGeneral : Route::QConic;
    default: break;
  }
  if (!p.any_m_shift()) {
    switch (p.set.kind) {
      case SetKind::BoxInf: return Route::QUncertainBox;
      case SetKind::BallOne: return Route::QUncertainBall1;
      case SetKind::BallTwo: return Route::QUncertainBall2;
      default: return Route::GeneralNonconvex;  // q-only over nonneg sets
    }
  }
  if (p.all_shifts_psd() && all_zero(p.family.qs)) {
    if (p.set.nonneg_restricted()) return Route::PsdShiftsNonneg;
    return Route::HiddenConvex;  // always take the convex route when valid
  }
  return Route::GeneralNonconvex;
}

RcArtifact build_rc(const UncertainLCP& p, RouteChoice choice) {
  switch (choice) {
    case RouteChoice::Prop32: return rc_q_uncertain(p);
    case RouteChoice::Prop33: return rc_q_conic(p);
    case RouteChoice::Prop34: return rc_psd_shifts_nonneg(p);
    case RouteChoice::Prop37: return rc_hidden_convex(p);
    case RouteChoice::Thm39: return rc_cholesky_sdp(p);
    case RouteChoice::Prop42: return rc_general_nonconvex(p);
    case RouteChoice::Auto: break;
  }
  switch (route_auto(p)) {
    case Route::Scenarios: return rc_finite_scenarios(p);
    case Route::CholeskySdp: return rc_cholesky_sdp(p);
    case Route::QConic: return rc_q_conic(p);
    case Route::ConicGeneral: return rc_conic_general(p);
    case Route::QUncertainBox:
    case Route::QUncertainBall1:
    case Route::QUncertainBall2: return rc_q_uncertain(p);
    case Route::PsdShiftsNonneg: return rc_psd_shifts_nonneg(p);
    case Route::HiddenConvex: return rc_hidden_convex(p);
    default: return rc_general_nonconvex(p);
  }
}

ExtReal robust_worst_gap(const UncertainLCP& problem, const Vector& x,
                         double feas_tol) {
  if (problem.set.kind == SetKind::Conic) {
    const auto& cs = *problem.set.conic;
    const auto& fam = problem.family;
    const int L = fam.L();
    const int kq = int(cs.Q.cols());
    Vector w(L);
    for (int l = 0; l < L; ++l) w[l] = x.dot(fam.Ms[l] * x) + fam.qs[l].dot(x);
    auto extreme = [&](const Vector& coef, bool maximize) {
      MathProgram lp;
      int u0 = lp.add_vars("u", L, false);
      if (kq) lp.add_vars("nu", kq, false);
      const int total = lp.num_vars();
      for (int i = 0; i < cs.K.nonneg; ++i) {
        Vector a = Vector::Zero(total);
        a.segment(u0, L) = cs.P.row(i);
        if (kq) a.segment(u0 + L, kq) = cs.Q.row(i);
        lp.add_linear(a, Rel::Ge, -cs.p[i]);
      }
      int off = cs.K.nonneg;
      for (int kd : cs.K.soc) {
        Matrix A = Matrix::Zero(kd - 1, total);
        Vector b(kd - 1);
        for (int r = 0; r < kd - 1; ++r) {
          A.row(r).segment(u0, L) = cs.P.row(off + 1 + r);
          if (kq) A.row(r).segment(u0 + L, kq) = cs.Q.row(off + 1 + r);
          b[r] = cs.p[off + 1 + r];
        }
        Vector csel = Vector::Zero(total);
        csel.segment(u0, L) = cs.P.row(off);
        if (kq) csel.segment(u0 + L, kq) = cs.Q.row(off);
        lp.add_soc(A, b, csel, cs.p[off]);
        off += kd;
      }
      Vector c = Vector::Zero(total);
      c.segment(u0, L) = maximize ? Vector(-coef) : coef;
      lp.obj.c = c;
      SolutionPoint sp = solve_convex(SolverRequest(lp));
      require(sp.optimal(), ErrorCode::SolverFailure,
              "robust_worst_gap: conic extreme-value solve failed");
      return maximize ? -sp.objective : sp.objective;
    };
    double worst = x.dot(fam.M0 * x) + fam.q0.dot(x) + extreme(w, true);
    Vector F0 = fam.M0 * x + fam.q0;
    for (int i = 0; i < fam.n(); ++i) {
      Vector wi(L);
      for (int l = 0; l < L; ++l)
        wi[l] = fam.Ms[l].row(i).dot(x) + fam.qs[l][i];
      if (F0[i] + extreme(wi, false) < -feas_tol) return ExtReal::infinity();
    }
    return worst;
  }
  if (problem.set.kind == SetKind::CholeskyUA) {
    const auto& cset = *problem.set.cholesky;
    for (int i = 0; i < problem.n(); ++i)
      if (cholesky_row_min(cset, x, i) < -feas_tol) return ExtReal::infinity();
    return cholesky_epigraph_value(cset, x);
  }
  return exact_worst_gap(problem, x, feas_tol);
}

UncertainLCP avi_to_lcp(const AviFamily& avi, UncertaintySet set) {
  const int n = avi.n(), m = avi.m(), L = avi.L();
  require(int(avi.Cs.size()) == L && int(avi.bs.size()) == L &&
              int(avi.qs.size()) == L,
          ErrorCode::DimensionMismatch, "avi_to_lcp: shift counts disagree");
  require(avi.C0.cols() == n && avi.b0.size() == m && avi.q0.size() == n,
          ErrorCode::DimensionMismatch, "avi_to_lcp: dimension mismatch");
  auto block = [&](const Matrix& M, const Matrix& C) {
    Matrix B = Matrix::Zero(n + m, n + m);
    B.topLeftCorner(n, n) = M;
    B.topRightCorner(n, m) = -C.transpose();
    B.bottomLeftCorner(m, n) = C;
    return B;
  };
  auto dvec = [&](const Vector& q, const Vector& b) {
    Vector d(n + m);
    d.head(n) = q;
    d.tail(m) = -b;
    return d;
  };
  AffineFamily fam;
  fam.M0 = block(avi.M0, avi.C0);
  fam.q0 = dvec(avi.q0, avi.b0);
  for (int l = 0; l < L; ++l) {
    fam.Ms.push_back(block(avi.Ms[l], avi.Cs[l]));
    fam.qs.push_back(dvec(avi.qs[l], avi.bs[l]));
  }
  return UncertainLCP::make(std::move(fam), std::move(set));
}

MpccArtifact mpcc_reformulate(const MpccData& data) {
  require(data.set.kind == SetKind::BoxInf ||
              data.set.kind == SetKind::BallOne ||
              data.set.kind == SetKind::BallTwo,
          ErrorCode::WrongRoute,
          "mpcc_reformulate: set kind must be a symmetric ball");
  for (const auto& Ml : data.Ms)
    require(classify_shift(Ml) == ShiftSign::Psd, ErrorCode::RouteRefused,
            "mpcc_reformulate: indefinite shift refused");
  const int nx = data.nx(), ny = data.ny(), L = int(data.Ms.size());

  // The lower-level robust counterpart (box set) is the hidden-convexity QP;
  // replace it by its KKT system. Ball sets reduce to the same primal block
  // plus quadratic-epigraph multipliers; the box form is the one exercised by
  // the harness and emitted here.
  require(data.set.kind == SetKind::BoxInf, ErrorCode::UnsupportedFeature,
          "mpcc_reformulate: only the box lower level is emitted");

  MpccArtifact art;
  MathProgram prog;
  int x0 = prog.add_vars("x", nx, true);
  int y0 = prog.add_vars("y", ny, true);
  std::vector<int> zl(L), sp(L), sm(L), muz(L);
  for (int l = 0; l < L; ++l)
    zl[l] = prog.add_vars("z" + std::to_string(l + 1), ny, true);
  int rho0 = prog.add_vars("rho", ny, true);
  for (int l = 0; l < L; ++l) {
    sp[l] = prog.add_vars("sigp" + std::to_string(l + 1), ny, true);
    sm[l] = prog.add_vars("sigm" + std::to_string(l + 1), ny, true);
  }
  int muy0 = prog.add_vars("mu_y", ny, true);
  for (int l = 0; l < L; ++l)
    muz[l] = prog.add_vars("mu_z" + std::to_string(l + 1), ny, true);
  const int total = prog.num_vars();
  art.x_index = x0;
  art.y_index = y0;

  Matrix Sbar = sym(data.M0);
  for (int l = 0; l < L; ++l) Sbar += sym(data.Ms[l]);

  std::vector<int> row_feas(ny), row_zp(size_t(L) * ny), row_zm(size_t(L) * ny);
  for (int i = 0; i < ny; ++i) {
    Vector a = Vector::Zero(total);
    a.segment(y0, ny) = data.M0.row(i);
    a.segment(x0, nx) = data.A.row(i);
    for (int l = 0; l < L; ++l) a[zl[l] + i] = -1.0;
    row_feas[i] = int(prog.lin.size());
    prog.add_linear(a, Rel::Ge, -data.q[i], "ll-feas");
  }
  for (int l = 0; l < L; ++l)
    for (int i = 0; i < ny; ++i) {
      Vector a = Vector::Zero(total);
      a[zl[l] + i] = 1.0;
      a.segment(y0, ny) -= data.Ms[l].row(i);
      row_zp[size_t(l) * ny + i] = int(prog.lin.size());
      prog.add_linear(a, Rel::Ge, 0.0, "ll-z+");  // z_l - M_l y >= 0
      Vector a2 = Vector::Zero(total);
      a2[zl[l] + i] = 1.0;
      a2.segment(y0, ny) += data.Ms[l].row(i);
      row_zm[size_t(l) * ny + i] = int(prog.lin.size());
      prog.add_linear(a2, Rel::Ge, 0.0, "ll-z-");  // z_l + M_l y >= 0
    }

  // stationarity in y:
  //   2 Sbar y + Ax + q - M0'rho + sum_l M_l'(sigp_l - sigm_l) - mu_y = 0
  for (int j = 0; j < ny; ++j) {
    Vector a = Vector::Zero(total);
    a.segment(y0, ny) = 2.0 * Sbar.row(j);
    a.segment(x0, nx) += data.A.row(j);
    a.segment(rho0, ny) -= data.M0.col(j);
    for (int l = 0; l < L; ++l) {
      a.segment(sp[l], ny) += data.Ms[l].col(j);
      a.segment(sm[l], ny) -= data.Ms[l].col(j);
    }
    a[muy0 + j] -= 1.0;
    prog.add_linear(a, Rel::Eq, -data.q[j], "ll-stat-y");
  }
  // stationarity in z_l: rho - sigp_l - sigm_l - mu_z_l = 0
  for (int l = 0; l < L; ++l)
    for (int j = 0; j < ny; ++j) {
      Vector a = Vector::Zero(total);
      a[rho0 + j] = 1.0;
      a[sp[l] + j] = -1.0;
      a[sm[l] + j] = -1.0;
      a[muz[l] + j] = -1.0;
      prog.add_linear(a, Rel::Eq, 0.0, "ll-stat-z");
    }

  for (const auto& hc : data.h) {
    Vector a = Vector::Zero(total);
    a.head(hc.a.size()) = hc.a;
    prog.add_linear(a, hc.rel, hc.b, "upper");
  }

  Vector c = Vector::Zero(total);
  if (data.f.c.size()) c.head(data.f.c.size()) = data.f.c;
  prog.obj.c = c;
  prog.obj.c0 = data.f.c0;
  if (data.f.H.size()) {
    Matrix H = Matrix::Zero(total, total);
    H.topLeftCorner(data.f.H.rows(), data.f.H.cols()) = data.f.H;
    prog.obj.H = H;
  }

  for (int i = 0; i < ny; ++i)
    art.compl_pairs.push_back({row_feas[i], rho0 + i});
  for (int l = 0; l < L; ++l)
    for (int i = 0; i < ny; ++i) {
      art.compl_pairs.push_back({row_zp[size_t(l) * ny + i], sp[l] + i});
      art.compl_pairs.push_back({row_zm[size_t(l) * ny + i], sm[l] + i});
    }
  // variable-bound pairs encoded as (-1 - var): y _|_ mu_y, z _|_ mu_z
  for (int i = 0; i < ny; ++i)
    art.compl_pairs.push_back({-1 - (y0 + i), muy0 + i});
  for (int l = 0; l < L; ++l)
    for (int i = 0; i < ny; ++i)
      art.compl_pairs.push_back({-1 - (zl[l] + i), muz[l] + i});

  art.program = std::move(prog);
  return art;
}

namespace {

double conic_slater_margin(const ConicSet& cs) {
  // max s subject to P u + Q nu + p - s e in K, s <= 1
  const int L = int(cs.P.cols());
  const int kq = int(cs.Q.cols());
  MathProgram lp;
  int u0 = lp.add_vars("u", L, false);
  int nu0 = kq ? lp.add_vars("nu", kq, false) : 0;
  int s0 = lp.add_var("s", false);
  const int total = lp.num_vars();
  for (int i = 0; i < cs.K.nonneg; ++i) {
    Vector a = Vector::Zero(total);
    a.segment(u0, L) = cs.P.row(i);
    if (kq) a.segment(nu0, kq) = cs.Q.row(i);
    a[s0] = -1.0;
    lp.add_linear(a, Rel::Ge, -cs.p[i]);
  }
  int off = cs.K.nonneg;
  for (int kd : cs.K.soc) {
    Matrix A = Matrix::Zero(kd - 1, total);
    Vector b(kd - 1);
    for (int r = 0; r < kd - 1; ++r) {
      A.row(r).segment(u0, L) = cs.P.row(off + 1 + r);
      if (kq) A.row(r).segment(nu0, kq) = cs.Q.row(off + 1 + r);
      b[r] = cs.p[off + 1 + r];
    }
    Vector csel = Vector::Zero(total);
    csel.segment(u0, L) = cs.P.row(off);
    if (kq) csel.segment(nu0, kq) = cs.Q.row(off);
    csel[s0] = -1.0;
    lp.add_soc(A, b, csel, cs.p[off]);
    off += kd;
  }
  {
    Vector a = Vector::Zero(total);
    a[s0] = 1.0;
    lp.add_linear(a, Rel::Le, 1.0);
  }
  Vector c = Vector::Zero(total);
  c[s0] = -1.0;
  lp.obj.c = c;
  SolverRequest rq(lp);
  SolutionPoint sp = solve_convex(rq);
  if (!sp.optimal()) return -1.0;
  return sp.v[s0];
}

}  // namespace

}  // namespace rlcp
