#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>

#include "rlcp/reformulate.hpp"

namespace rlcp {

namespace {

// Per-row data of the quadratic-in-xi constraint min b'xi + xi'C xi over the
// unit 2-ball: values b in R^L, C in R^{LxL}, constant a.
struct RowData {
  double a;
  Vector b;
  Matrix C;
};

// Arrowhead data of the epigraph constraint: top-left constant c00 (without
// t and tau), top vector v = (-q_l'x/2), bottom block rows B(l,:) = (A_l x)'.
struct ArrowData {
  double c00;   // -q0'x
  Vector v;     // length L
  Matrix B;     // (L+1) x n : rows (A_0 x)', (A_1 x)', ...
};

// t_min(tau): smallest t making the arrowhead PSD at fixed tau, via the
// generalized Schur complement on the (1,1) slot.
double arrow_t_min(const ArrowData& d, double tau) {
  const int L = int(d.v.size());
  const int n = int(d.B.cols());
  Matrix S = Matrix::Zero(L + n, L + n);
  S.topLeftCorner(L, L) = tau * Matrix::Identity(L, L);
  S.bottomRightCorner(n, n) = Matrix::Identity(n, n);
  for (int l = 0; l < L; ++l) S.block(l, L, 1, n) = d.B.row(l + 1);
  S.block(L, 0, n, L) = S.topRightCorner(L, n).transpose();
  Vector w(L + n);
  w.head(L) = d.v;
  w.tail(n) = d.B.row(0).transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  const Vector ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -1e-9 * scale)
    return std::numeric_limits<double>::infinity();
  Vector wt = es.eigenvectors().transpose() * w;
  double quad = 0;
  for (int k = 0; k < ev.size(); ++k) {
    if (ev[k] > 1e-11 * scale)
      quad += wt[k] * wt[k] / ev[k];
    else if (std::abs(wt[k]) > 1e-8 * std::max(1.0, w.norm()))
      return std::numeric_limits<double>::infinity();  // range violated
  }
  // need c00 + t - tau - quad >= 0
  return quad + tau - d.c00;
}

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  int iters = 200) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int k = 0; k < iters; ++k) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

// exact worst-case epigraph value: minimize t_min(tau) over tau > 0
std::pair<double, double> arrow_value(const ArrowData& d) {
  auto f = [&](double logtau) { return arrow_t_min(d, std::exp(logtau)); };
  double best_log = golden_min(f, std::log(1e-9), std::log(1e9));
  double tau = std::exp(best_log);
  return {arrow_t_min(d, tau), tau};
}

// robust row minimum: maximize y1 + y2max(y1) + a over y1 <= min(0, lmin(C))
struct RowOut {
  double margin;
  double y1, y2;
};
RowOut row_value(const RowData& d) {
  const int L = int(d.b.size());
  Eigen::SelfAdjointEigenSolver<Matrix> es(d.C);
  const double lmin = es.eigenvalues().minCoeff();
  const double scale =
      std::max({1.0, es.eigenvalues().cwiseAbs().maxCoeff(), d.b.norm()});
  auto y2max = [&](double y1) {
    Matrix Cm = d.C - y1 * Matrix::Identity(L, L);
    Eigen::SelfAdjointEigenSolver<Matrix> e2(Cm);
    Vector bt = e2.eigenvectors().transpose() * (0.5 * d.b);
    double quad = 0;
    for (int k = 0; k < L; ++k) {
      if (e2.eigenvalues()[k] > 1e-12 * scale)
        quad += bt[k] * bt[k] / e2.eigenvalues()[k];
      else if (std::abs(bt[k]) > 1e-9 * scale)
        return -std::numeric_limits<double>::infinity();
    }
    return -quad;
  };
  const double hi = std::min(0.0, lmin) - 1e-14 * scale;
  const double lo = hi - 1e6 * scale;
  auto f = [&](double y1) { return -(y1 + y2max(y1)); };
  double y1 = golden_min(f, lo, hi, 300);
  RowOut out;
  out.y1 = y1;
  out.y2 = y2max(y1);
  out.margin = y1 + out.y2 + d.a;
  return out;
}

ArrowData cholesky_arrow(const CholeskySet& set, const Vector& x) {
  const int L = set.L();
  const int n = int(x.size());
  ArrowData d;
  d.c00 = -set.q[0].dot(x);
  d.v = Vector(L);
  for (int l = 0; l < L; ++l) d.v[l] = -0.5 * set.q[l + 1].dot(x);
  d.B = Matrix(L + 1, n);
  for (int l = 0; l <= L; ++l) d.B.row(l) = (set.A[l] * x).transpose();
  return d;
}

RowData cholesky_row(const CholeskySet& set, const Vector& x, int i) {
  const int L = set.L();
  RowData d;
  d.a = (set.A[0].transpose() * set.A[0]).row(i).dot(x) + set.q[0][i];
  d.b = Vector(L);
  d.C = Matrix(L, L);
  for (int l = 0; l < L; ++l) {
    Matrix cross = set.A[l + 1].transpose() * set.A[0] +
                   set.A[0].transpose() * set.A[l + 1];
    d.b[l] = cross.row(i).dot(x) + set.q[l + 1][i];
    for (int m = 0; m < L; ++m) {
      if (l == m)
        d.C(l, l) = (set.A[l + 1].transpose() * set.A[l + 1]).row(i).dot(x);
      else {
        Matrix cm = set.A[l + 1].transpose() * set.A[m + 1] +
                    set.A[m + 1].transpose() * set.A[l + 1];
        d.C(l, m) = 0.5 * cm.row(i).dot(x);
      }
    }
  }
  return d;
}

}  // namespace

double cholesky_epigraph_value(const CholeskySet& set, const Vector& x) {
  return arrow_value(cholesky_arrow(set, x)).first;
}

double cholesky_row_min(const CholeskySet& set, const Vector& x, int i) {
  // the SDPTRC margin equals the true minimum (exact S-procedure on a ball)
  return row_value(cholesky_row(set, x, i)).margin;
}

LmiFeasPoint cholesky_feasible_point(const CholeskySet& set, const Vector& x) {
  LmiFeasPoint out;
  const int n = int(x.size());
  auto [tval, tau] = arrow_value(cholesky_arrow(set, x));
  if (!std::isfinite(tval)) return out;
  out.t = tval;
  out.tau = tau;
  out.y1 = Vector(n);
  out.y2 = Vector(n);
  for (int i = 0; i < n; ++i) {
    RowOut r = row_value(cholesky_row(set, x, i));
    if (r.margin < -1e-7) return out;
    out.y1[i] = r.y1;
    out.y2[i] = r.y2;
  }
  out.feasible = true;
  return out;
}

RcArtifact rc_cholesky_sdp(const UncertainLCP& problem) {
  require(problem.set.kind == SetKind::CholeskyUA, ErrorCode::WrongRoute,
          "rc_cholesky_sdp: set kind is not the Cholesky family");
  const auto& cs = *problem.set.cholesky;
  const int n = problem.n();
  const int L = cs.L();

  MathProgram prog;
  int x0 = prog.add_vars("x", n, true);
  int tt = prog.add_var("t", false);
  int tau = prog.add_var("tau", false);
  int y1 = prog.add_vars("y1", n, false);
  int y2 = prog.add_vars("y2", n, false);
  const int total = prog.num_vars();

  // arrowhead LMI, size (1 + L + n)
  {
    PsdConstraint pc;
    pc.label = "epigraph-lmi";
    const int N = 1 + L + n;
    pc.F0 = Matrix::Zero(N, N);
    pc.F0.bottomRightCorner(n, n) = Matrix::Identity(n, n);
    auto Fx = [&](int j) {
      Matrix F = Matrix::Zero(N, N);
      F(0, 0) = -cs.q[0][j];
      for (int l = 1; l <= L; ++l) F(0, l) = F(l, 0) = -0.5 * cs.q[l][j];
      for (int l = 0; l <= L; ++l)
        for (int r = 0; r < n; ++r) {
          F(l == 0 ? 0 : l, 1 + L + r) += (l == 0 ? cs.A[0] : cs.A[l])(r, j);
          F(1 + L + r, l == 0 ? 0 : l) = F(l == 0 ? 0 : l, 1 + L + r);
        }
      return F;
    };
    for (int j = 0; j < n; ++j) {
      pc.vars.push_back(x0 + j);
      pc.F.push_back(Fx(j));
    }
    Matrix Ft = Matrix::Zero(N, N);
    Ft(0, 0) = 1.0;
    pc.vars.push_back(tt);
    pc.F.push_back(Ft);
    Matrix Ftau = Matrix::Zero(N, N);
    Ftau(0, 0) = -1.0;
    for (int l = 1; l <= L; ++l) Ftau(l, l) = 1.0;
    pc.vars.push_back(tau);
    pc.F.push_back(Ftau);
    prog.psd.push_back(std::move(pc));
  }

  // per-row LMIs, size (1 + L), plus the scalar rows
  for (int i = 0; i < n; ++i) {
    PsdConstraint pc;
    pc.label = "row-lmi-" + std::to_string(i);
    const int N = 1 + L;
    pc.F0 = Matrix::Zero(N, N);
    for (int l = 0; l < L; ++l)
      pc.F0(0, l + 1) = pc.F0(l + 1, 0) = 0.5 * cs.q[l + 1][i];
    auto Fx = [&](int j) {
      Matrix F = Matrix::Zero(N, N);
      for (int l = 0; l < L; ++l) {
        Matrix cross = cs.A[l + 1].transpose() * cs.A[0] +
                       cs.A[0].transpose() * cs.A[l + 1];
        F(0, l + 1) = F(l + 1, 0) = 0.5 * cross(i, j);
        for (int m = 0; m < L; ++m) {
          if (l == m)
            F(l + 1, l + 1) = (cs.A[l + 1].transpose() * cs.A[l + 1])(i, j);
          else {
            Matrix cm = cs.A[l + 1].transpose() * cs.A[m + 1] +
                        cs.A[m + 1].transpose() * cs.A[l + 1];
            F(l + 1, m + 1) = 0.5 * cm(i, j);
          }
        }
      }
      return F;
    };
    for (int j = 0; j < n; ++j) {
      pc.vars.push_back(x0 + j);
      pc.F.push_back(Fx(j));
    }
    Matrix Fy1 = Matrix::Zero(N, N);
    for (int l = 1; l <= L; ++l) Fy1(l, l) = -1.0;
    pc.vars.push_back(y1 + i);
    pc.F.push_back(Fy1);
    Matrix Fy2 = Matrix::Zero(N, N);
    Fy2(0, 0) = -1.0;
    pc.vars.push_back(y2 + i);
    pc.F.push_back(Fy2);
    prog.psd.push_back(std::move(pc));

    Vector a = Vector::Zero(total);
    a[y1 + i] = 1.0;
    prog.add_linear(a, Rel::Le, 0.0, "y1-sign");
    Vector a2 = Vector::Zero(total);
    a2[y1 + i] = 1.0;
    a2[y2 + i] = 1.0;
    a2.segment(x0, n) = (cs.A[0].transpose() * cs.A[0]).row(i);
    prog.add_linear(a2, Rel::Ge, -cs.q[0][i], "row-scalar");
  }

  Vector c = Vector::Zero(total);
  c[tt] = 1.0;
  prog.obj.c = c;
  return [&] {
    RcArtifact art;
    art.program = std::move(prog);
    art.x_index = x0;
    art.n = n;
    for (int i = 0; i < n; ++i)
      art.x_slot.push_back(art.program.var_names[x0 + i]);
    art.t_index = tt;
    art.t_slot = "t";
    art.route = Route::CholeskySdp;
    return art;
  }();
}

namespace {

ArrowData avi_arrow(const AviSqrtFamily& avi, const Vector& z) {
  const int n = avi.n(), m = avi.m(), L = avi.L();
  Vector x = z.head(n), lam = z.tail(m);
  ArrowData d;
  d.c00 = -(avi.q0.dot(x) - avi.b0.dot(lam));
  d.v = Vector(L);
  for (int l = 0; l < L; ++l)
    d.v[l] = -0.5 * (avi.qs[l].dot(x) - avi.bs[l].dot(lam));
  d.B = Matrix(L + 1, n);
  d.B.row(0) = (avi.S0 * x).transpose();
  for (int l = 0; l < L; ++l) d.B.row(l + 1) = (avi.Ss[l] * x).transpose();
  return d;
}

RowData avi_row(const AviSqrtFamily& avi, const Vector& z, int i) {
  const int n = avi.n(), m = avi.m(), L = avi.L();
  Vector x = z.head(n), lam = z.tail(m);
  RowData d;
  d.a = (avi.S0.transpose() * avi.S0).row(i).dot(x) -
        avi.C0.col(i).dot(lam) + avi.q0[i];
  d.b = Vector(L);
  d.C = Matrix(L, L);
  for (int l = 0; l < L; ++l) {
    Matrix cross =
        avi.Ss[l].transpose() * avi.S0 + avi.S0.transpose() * avi.Ss[l];
    d.b[l] = cross.row(i).dot(x) - avi.Cs[l].col(i).dot(lam) + avi.qs[l][i];
    for (int mm = 0; mm < L; ++mm) {
      if (l == mm)
        d.C(l, l) = (avi.Ss[l].transpose() * avi.Ss[l]).row(i).dot(x);
      else {
        Matrix cm = avi.Ss[l].transpose() * avi.Ss[mm] +
                    avi.Ss[mm].transpose() * avi.Ss[l];
        d.C(l, mm) = 0.5 * cm.row(i).dot(x);
      }
    }
  }
  return d;
}

}  // namespace

LmiFeasPoint avi_sdp_feasible_point(const AviSqrtFamily& avi, const Vector& z) {
  LmiFeasPoint out;
  const int n = avi.n(), m = avi.m(), L = avi.L();
  auto [tval, tau] = arrow_value(avi_arrow(avi, z));
  if (!std::isfinite(tval)) return out;
  out.t = tval;
  out.tau = tau;
  out.y1 = Vector(n);
  out.y2 = Vector(n);
  for (int i = 0; i < n; ++i) {
    RowOut r = row_value(avi_row(avi, z, i));
    if (r.margin < -1e-7) return out;
    out.y1[i] = r.y1;
    out.y2[i] = r.y2;
  }
  // affine rows C(u)x - b(u) >= 0 over the ball
  Vector x = z.head(n);
  for (int j = 0; j < m; ++j) {
    double head = avi.C0.row(j).dot(x) - avi.b0[j];
    double tail2 = 0;
    for (int l = 0; l < L; ++l) {
      double v = avi.Cs[l].row(j).dot(x) - avi.bs[l][j];
      tail2 += v * v;
    }
    if (head - std::sqrt(tail2) < -1e-7) return out;
  }
  out.feasible = true;
  return out;
}

RcArtifact rc_avi_sdp(const AviSqrtFamily& avi) {
  const int n = avi.n(), m = avi.m(), L = avi.L();
  require(int(avi.Cs.size()) == L && int(avi.bs.size()) == L &&
              int(avi.qs.size()) == L,
          ErrorCode::DimensionMismatch, "rc_avi_sdp: shift counts disagree");

  MathProgram prog;
  int x0 = prog.add_vars("x", n, true);
  int lam0 = prog.add_vars("lam", m, true);
  int tt = prog.add_var("t", false);
  int tau = prog.add_var("tau", false);
  int y1 = prog.add_vars("y1", n, false);
  int y2 = prog.add_vars("y2", n, false);
  const int total = prog.num_vars();

  // epigraph arrowhead LMI over z = (x, lam)
  {
    PsdConstraint pc;
    pc.label = "epigraph-lmi";
    const int N = 1 + L + n;
    pc.F0 = Matrix::Zero(N, N);
    pc.F0.bottomRightCorner(n, n) = Matrix::Identity(n, n);
    for (int j = 0; j < n; ++j) {
      Matrix F = Matrix::Zero(N, N);
      F(0, 0) = -avi.q0[j];
      for (int l = 0; l < L; ++l) F(0, l + 1) = F(l + 1, 0) = -0.5 * avi.qs[l][j];
      for (int r = 0; r < n; ++r) {
        F(0, 1 + L + r) += avi.S0(r, j);
        F(1 + L + r, 0) = F(0, 1 + L + r);
        for (int l = 0; l < L; ++l) {
          F(l + 1, 1 + L + r) += avi.Ss[l](r, j);
          F(1 + L + r, l + 1) = F(l + 1, 1 + L + r);
        }
      }
      pc.vars.push_back(x0 + j);
      pc.F.push_back(F);
    }
    for (int r = 0; r < m; ++r) {
      Matrix F = Matrix::Zero(N, N);
      F(0, 0) = avi.b0[r];
      for (int l = 0; l < L; ++l) F(0, l + 1) = F(l + 1, 0) = 0.5 * avi.bs[l][r];
      pc.vars.push_back(lam0 + r);
      pc.F.push_back(F);
    }
    Matrix Ft = Matrix::Zero(N, N);
    Ft(0, 0) = 1.0;
    pc.vars.push_back(tt);
    pc.F.push_back(Ft);
    Matrix Ftau = Matrix::Zero(N, N);
    Ftau(0, 0) = -1.0;
    for (int l = 1; l <= L; ++l) Ftau(l, l) = 1.0;
    pc.vars.push_back(tau);
    pc.F.push_back(Ftau);
    prog.psd.push_back(std::move(pc));
  }

  // per-row LMIs for M(u)x - C(u)'lam + q(u) >= 0
  for (int i = 0; i < n; ++i) {
    PsdConstraint pc;
    pc.label = "row-lmi-" + std::to_string(i);
    const int N = 1 + L;
    pc.F0 = Matrix::Zero(N, N);
    for (int l = 0; l < L; ++l)
      pc.F0(0, l + 1) = pc.F0(l + 1, 0) = 0.5 * avi.qs[l][i];
    for (int j = 0; j < n; ++j) {
      Matrix F = Matrix::Zero(N, N);
      for (int l = 0; l < L; ++l) {
        Matrix cross =
            avi.Ss[l].transpose() * avi.S0 + avi.S0.transpose() * avi.Ss[l];
        F(0, l + 1) = F(l + 1, 0) = 0.5 * cross(i, j);
        for (int mm = 0; mm < L; ++mm) {
          if (l == mm)
            F(l + 1, l + 1) = (avi.Ss[l].transpose() * avi.Ss[l])(i, j);
          else {
            Matrix cm = avi.Ss[l].transpose() * avi.Ss[mm] +
                        avi.Ss[mm].transpose() * avi.Ss[l];
            F(l + 1, mm + 1) = 0.5 * cm(i, j);
          }
        }
      }
      pc.vars.push_back(x0 + j);
      pc.F.push_back(F);
    }
    for (int r = 0; r < m; ++r) {
      Matrix F = Matrix::Zero(N, N);
      for (int l = 0; l < L; ++l)
        F(0, l + 1) = F(l + 1, 0) = -0.5 * avi.Cs[l](r, i);
      pc.vars.push_back(lam0 + r);
      pc.F.push_back(F);
    }
    Matrix Fy1 = Matrix::Zero(N, N);
    for (int l = 1; l <= L; ++l) Fy1(l, l) = -1.0;
    pc.vars.push_back(y1 + i);
    pc.F.push_back(Fy1);
    Matrix Fy2 = Matrix::Zero(N, N);
    Fy2(0, 0) = -1.0;
    pc.vars.push_back(y2 + i);
    pc.F.push_back(Fy2);
    prog.psd.push_back(std::move(pc));

    Vector a = Vector::Zero(total);
    a[y1 + i] = 1.0;
    prog.add_linear(a, Rel::Le, 0.0, "y1-sign");
    Vector a2 = Vector::Zero(total);
    a2[y1 + i] = 1.0;
    a2[y2 + i] = 1.0;
    a2.segment(x0, n) = (avi.S0.transpose() * avi.S0).row(i);
    a2.segment(lam0, m) = -avi.C0.col(i);
    prog.add_linear(a2, Rel::Ge, -avi.q0[i], "row-scalar");
  }

  // affine rows C(u)x - b(u) >= 0 over the 2-ball, as arrow PSD blocks
  for (int j = 0; j < m; ++j) {
    PsdConstraint pc;
    pc.label = "polyrow-arrow-" + std::to_string(j);
    const int N = 1 + L;
    pc.F0 = Matrix::Zero(N, N);
    pc.F0(0, 0) = -avi.b0[j];
    for (int l = 0; l < L; ++l) {
      pc.F0(l + 1, l + 1) = -avi.b0[j];
      pc.F0(0, l + 1) = pc.F0(l + 1, 0) = -avi.bs[l][j];
    }
    for (int i = 0; i < n; ++i) {
      Matrix F = Matrix::Zero(N, N);
      F(0, 0) = avi.C0(j, i);
      for (int l = 0; l < L; ++l) {
        F(l + 1, l + 1) = avi.C0(j, i);
        F(0, l + 1) = F(l + 1, 0) = avi.Cs[l](j, i);
      }
      pc.vars.push_back(x0 + i);
      pc.F.push_back(F);
    }
    prog.psd.push_back(std::move(pc));
  }

  Vector c = Vector::Zero(total);
  c[tt] = 1.0;
  prog.obj.c = c;

  RcArtifact art;
  art.program = std::move(prog);
  art.x_index = x0;
  art.n = n + m;  // the primal slot is the full z = (x, lam)
  for (int i = 0; i < n + m; ++i)
    art.x_slot.push_back(art.program.var_names[x0 + i]);
  art.t_index = tt;
  art.t_slot = "t";
  art.route = Route::AviSdp;
  return art;
}

}  // namespace rlcp
