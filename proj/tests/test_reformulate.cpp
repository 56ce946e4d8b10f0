#include <doctest.h>

#include <rlcp/bnb.hpp>
#include <rlcp/reformulate.hpp>
#include <rlcp/solver.hpp>

#include "oracles.hpp"

using namespace rlcp;

namespace {

AffineFamily random_family(Rng& rng, int n, int L, bool psd_M0,
                           bool psd_shifts, double q_shift_scale) {
  AffineFamily f;
  Matrix R(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) R(i, j) = rng.normal();
  f.M0 = psd_M0 ? Matrix(R.transpose() * R / n + 0.2 * Matrix::Identity(n, n))
                : Matrix(R);
  f.q0 = Vector(n);
  for (int i = 0; i < n; ++i) f.q0[i] = rng.uniform(0.5, 2.0);
  for (int l = 0; l < L; ++l) {
    Matrix S(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) S(i, j) = 0.4 * rng.normal();
    f.Ms.push_back(psd_shifts ? Matrix(S.transpose() * S / n) : Matrix(S));
    Vector q(n);
    for (int i = 0; i < n; ++i) q[i] = q_shift_scale * rng.normal();
    f.qs.push_back(q);
  }
  return f;
}

double solve_rc_value(const RcArtifact& art, bool local = false) {
  SolverRequest rq(art.program);
  rq.gap_tol = 1e-10;
  SolutionPoint sp = local ? solve_local(rq, 12, 3) : solve_convex(rq);
  REQUIRE(sp.optimal());
  return sp.objective;
}

}  // namespace

TEST_CASE("rc_q_uncertain") {
  SUBCASE("L = 0 reduces to the nominal program") {
    Rng rng(1);
    AffineFamily f = random_family(rng, 3, 0, true, true, 0.0);
    auto p = UncertainLCP::make(f, UncertaintySet::box_inf(0));
    RcArtifact art = rc_q_uncertain(p);
    CHECK(art.program.is_convex());
    SolveOutput so = solve_convex_full(SolverRequest(art.program));
    REQUIRE(so.point.optimal());
    // nominal LCP with q0 > 0 is solved by x = 0 at value 0
    CHECK(so.point.objective == doctest::Approx(0.0).epsilon(1e-7));
  }
  SUBCASE("n=1 box: optimum matches vertex enumeration") {
    AffineFamily f;
    f.M0 = Matrix::Constant(1, 1, 1.0);
    f.q0 = Vector::Constant(1, 1.0);
    f.Ms = {Matrix::Zero(1, 1)};
    f.qs = {Vector::Constant(1, 0.5)};
    auto p = UncertainLCP::make(f, UncertaintySet::box_inf(1));
    RcArtifact art = rc_q_uncertain(p);
    SolutionPoint sp = solve_convex(SolverRequest(art.program));
    REQUIRE(sp.optimal());
    CHECK(sp.objective == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(art.extract_x(sp)[0] == doctest::Approx(0.0).epsilon(1e-6));
    // vertex oracle over u in {-1, +1}
    double oracle = test_oracle::grid_minimax(p, 41);
    CHECK(std::abs(sp.objective - oracle) <= 1e-4);
  }
  SUBCASE("wrong-route and route-refused errors") {
    Rng rng(2);
    AffineFamily f = random_family(rng, 2, 1, true, true, 0.1);
    f.Ms[0] = Matrix::Identity(2, 2);  // nonzero M shift
    auto p = UncertainLCP::make(f, UncertaintySet::box_inf(1));
    CHECK_THROWS_WITH_AS(rc_q_uncertain(p),
                         doctest::Contains("wrong route"), Error);
    AffineFamily g = random_family(rng, 2, 1, false, true, 0.1);
    g.M0 << 0, 2, -3, 0;
    g.M0(0, 0) = -1;  // indefinite symmetric part
    auto p2 = UncertainLCP::make(g, UncertaintySet::box_inf(1));
    CHECK_THROWS_AS(rc_q_uncertain(p2), Error);
  }
  SUBCASE("random 2-d instances match the grid/vertex minimax oracle") {
    for (uint64_t seed = 10; seed < 16; ++seed) {
      Rng rng(seed);
      AffineFamily f = random_family(rng, 2, 2, true, true, 0.3);
      for (auto kind : {SetKind::BoxInf, SetKind::BallOne, SetKind::BallTwo}) {
        for (auto& Ml : f.Ms) Ml.setZero();
        UncertaintySet s{kind, 2, std::nullopt, std::nullopt, {}};
        auto p = UncertainLCP::make(f, s);
        RcArtifact art = rc_q_uncertain(p);
        double rc = solve_rc_value(art);
        double oracle = test_oracle::grid_minimax(p, 41);
        CHECK(std::abs(rc - oracle) <=
              1e-4 * std::max(1.0, std::abs(oracle)));
      }
    }
  }
}

TEST_CASE("rc_q_conic cross-route consistency") {
  for (uint64_t seed = 21; seed < 27; ++seed) {
    Rng rng(seed);
    const int n = 2, L = 2;
    AffineFamily f = random_family(rng, n, L, true, true, 0.3);
    for (auto& Ml : f.Ms) Ml.setZero();
    SUBCASE("") {}
    // box encoded as orthant cone: P = [I; -I], p = ones
    {
      auto pbox = UncertainLCP::make(f, UncertaintySet::box_inf(L));
      double v1 = solve_rc_value(rc_q_uncertain(pbox));
      ConicSet cs;
      cs.P = Matrix::Zero(2 * L, L);
      cs.P.topRows(L) = Matrix::Identity(L, L);
      cs.P.bottomRows(L) = -Matrix::Identity(L, L);
      cs.Q = Matrix::Zero(2 * L, 0);
      cs.p = Vector::Ones(2 * L);
      cs.K.nonneg = 2 * L;
      auto pconic = UncertainLCP::make(f, UncertaintySet::conic_set(cs));
      double v2 = solve_rc_value(rc_q_conic(pconic));
      CHECK(std::abs(v1 - v2) <= 1e-6 * std::max(1.0, std::abs(v1)));
    }
    // 2-ball encoded as a second-order cone: head 1, tail u
    {
      auto pball = UncertainLCP::make(f, UncertaintySet::ball_two(L));
      double v1 = solve_rc_value(rc_q_uncertain(pball));
      ConicSet cs;
      cs.P = Matrix::Zero(L + 1, L);
      cs.P.bottomRows(L) = Matrix::Identity(L, L);
      cs.Q = Matrix::Zero(L + 1, 0);
      cs.p = Vector::Zero(L + 1);
      cs.p[0] = 1.0;
      cs.K.soc = {L + 1};
      auto pconic = UncertainLCP::make(f, UncertaintySet::conic_set(cs));
      double v2 = solve_rc_value(rc_q_conic(pconic));
      CHECK(std::abs(v1 - v2) <= 1e-6 * std::max(1.0, std::abs(v1)));
    }
  }
  SUBCASE("all q shifts zero reduces to the nominal value") {
    Rng rng(30);
    AffineFamily f = random_family(rng, 2, 1, true, true, 0.0);
    f.Ms[0].setZero();
    ConicSet cs;
    cs.P = Matrix::Identity(1, 1);
    cs.Q = Matrix::Zero(1, 0);
    cs.p = Vector::Ones(1);
    cs.K.nonneg = 1;
    auto p = UncertainLCP::make(f, UncertaintySet::conic_set(cs));
    double v = solve_rc_value(rc_q_conic(p));
    auto pnom = UncertainLCP::make(f, UncertaintySet::box_inf(1));
    double vnom = solve_rc_value(rc_q_uncertain(pnom));
    CHECK(std::abs(v - vnom) <= 1e-6 * std::max(1.0, std::abs(vnom)));
  }
}

TEST_CASE("rc_psd_shifts_nonneg") {
  SUBCASE("L=1 with zero shift reduces to the nominal QP on both routes") {
    Rng rng(3);
    AffineFamily f = random_family(rng, 3, 1, true, true, 0.0);
    f.Ms[0].setZero();
    auto pbox = UncertainLCP::make(f, UncertaintySet::box_inf_nonneg(1));
    auto pball = UncertainLCP::make(f, UncertaintySet::ball_one_nonneg(1));
    double v1 = solve_rc_value(rc_psd_shifts_nonneg(pbox));
    double v2 = solve_rc_value(rc_psd_shifts_nonneg(pball));
    CHECK(std::abs(v1 - v2) <= 1e-6 * std::max(1.0, std::abs(v1)));
  }
  SUBCASE("indefinite shift is refused") {
    Rng rng(4);
    AffineFamily f = random_family(rng, 2, 1, true, false, 0.0);
    Matrix ind(2, 2);
    ind << 1, 0, 0, -1;
    f.Ms[0] = ind;
    auto p = UncertainLCP::make(f, UncertaintySet::box_inf_nonneg(1));
    CHECK_THROWS_AS(rc_psd_shifts_nonneg(p), Error);
  }
  SUBCASE("random n=3: optimum equals the vertex oracle") {
    // max of a convex function over the box/simplex is attained at the listed
    // vertex sets, so the scenario reduction is exact
    for (uint64_t seed = 40; seed < 46; ++seed) {
      Rng rng(seed);
      AffineFamily f = random_family(rng, 3, 2, true, true, 0.0);
      for (auto& q : f.qs) q.setZero();
      auto pbox = UncertainLCP::make(f, UncertaintySet::box_inf_nonneg(2));
      double v = solve_rc_value(rc_psd_shifts_nonneg(pbox));
      auto scen = box_vertex_reduction(pbox);
      double vs = solve_rc_value(rc_finite_scenarios(scen), true);
      CHECK(std::abs(v - vs) <= 1e-4 * std::max(1.0, std::abs(v)));

      auto pball = UncertainLCP::make(f, UncertaintySet::ball_one_nonneg(2));
      double vb = solve_rc_value(rc_psd_shifts_nonneg(pball));
      // vertices of the nonneg 1-ball: {0, e_1, ..., e_L}
      auto verts = UncertaintySet::ball_one_nonneg(2).vertices();
      auto scen2 = UncertainLCP::make(f, UncertaintySet::finite(verts));
      double vb2 = solve_rc_value(rc_finite_scenarios(scen2), true);
      CHECK(std::abs(vb - vb2) <= 1e-4 * std::max(1.0, std::abs(vb)));
    }
  }
}

TEST_CASE("rc_hidden_convex") {
  SUBCASE("scenario region coincidence on the paper's diag(1,2) example") {
    // M(u) = u diag(1,2), q = (2,2), U = [-1,1]: the robust feasible region
    // equals the u=1 scenario region
    AffineFamily f;
    f.M0 = Matrix::Zero(2, 2);
    f.q0 = Vector::Constant(2, 2.0);
    Matrix D(2, 2);
    D << 1, 0, 0, 2;
    f.Ms = {D};
    f.qs = {Vector::Zero(2)};
    auto p = UncertainLCP::make(f, UncertaintySet::box_inf(1));
    RcArtifact art = rc_hidden_convex(p);
    // robust feasibility of x equals feasibility at u = 1:
    // M0 x + q - z >= 0 with z >= |M1 x| componentwise, and
    // M(1) x + q = D x + q >= 0 automatically on x >= 0.
    // the epigraph regions R_u nest: the worst-case quadratic over u equals
    // the u = 1 scenario value on x >= 0 (the intersection equals R_1)
    Rng rng(5);
    for (int k = 0; k < 100; ++k) {
      Vector x(2);
      x << rng.uniform(0, 3), rng.uniform(0, 3);
      double worst = -1e300;
      for (double u = -1.0; u <= 1.0 + 1e-12; u += 0.01)
        worst = std::max(worst, u * x.dot(D * x) + f.q0.dot(x));
      double at_one = x.dot(D * x) + f.q0.dot(x);
      CHECK(worst == doctest::Approx(at_one).epsilon(1e-12));
    }
    (void)art;
  }
  SUBCASE("zero shifts reduce to the nominal program") {
    Rng rng(6);
    AffineFamily f = random_family(rng, 2, 1, true, true, 0.0);
    f.Ms[0].setZero();
    auto p = UncertainLCP::make(f, UncertaintySet::box_inf(1));
    double v = solve_rc_value(rc_hidden_convex(p));
    auto pq = UncertainLCP::make(f, UncertaintySet::box_inf(1));
    double vq = solve_rc_value(rc_q_uncertain(pq));
    CHECK(std::abs(v - vq) <= 1e-6 * std::max(1.0, std::abs(v)));
  }
  SUBCASE("n=2 L=1 2-ball: optimum matches a 201-point grid oracle") {
    for (uint64_t seed = 50; seed < 54; ++seed) {
      Rng rng(seed);
      AffineFamily f = random_family(rng, 2, 1, true, true, 0.0);
      f.qs[0].setZero();
      auto p = UncertainLCP::make(f, UncertaintySet::ball_two(1));
      double v = solve_rc_value(rc_hidden_convex(p));
      double oracle = test_oracle::grid_minimax(p, 201);
      CHECK(std::abs(v - oracle) <= 1e-4 * std::max(1.0, std::abs(v)));
    }
  }
}

TEST_CASE("rc_general_nonconvex") {
  SUBCASE("PSD shifts, zero q shifts: equals the hidden-convex value via bnb") {
    for (uint64_t seed = 60; seed < 63; ++seed) {
      Rng rng(seed);
      AffineFamily f = random_family(rng, 2, 1, true, true, 0.0);
      f.qs[0].setZero();
      auto p = UncertainLCP::make(f, UncertaintySet::box_inf(1));
      double vconv = solve_rc_value(rc_hidden_convex(p));
      RcArtifact art = rc_general_nonconvex(p);
      CHECK_FALSE(art.program.is_convex());  // two-sided quadratic rows
      BnbOptions bo;
      bo.eps = 1e-6;
      BnbResult r = bnb_solve(p, art, bo);
      REQUIRE(r.incumbent.status == SolveStatus::Optimal);
      CHECK(std::abs(r.incumbent.objective - vconv) <=
            1e-5 * std::max(1.0, std::abs(vconv)));
      CHECK(r.stats.lb_monotone);
    }
  }
  SUBCASE("L = 0 gives the nominal program") {
    Rng rng(64);
    AffineFamily f = random_family(rng, 2, 0, true, true, 0.0);
    auto p = UncertainLCP::make(f, UncertaintySet::box_inf_nonneg(0));
    RcArtifact art = rc_general_nonconvex(p);
    double v = solve_rc_value(art);
    CHECK(v == doctest::Approx(0.0).epsilon(1e-7));  // q0 > 0: x = 0 solves
  }
}

TEST_CASE("box_vertex_reduction") {
  SUBCASE("L=1 box gives {-1, +1}") {
    Rng rng(7);
    AffineFamily f = random_family(rng, 2, 1, true, true, 0.1);
    auto p = UncertainLCP::make(f, UncertaintySet::box_inf(1));
    auto scen = box_vertex_reduction(p);
    REQUIRE(scen.set.scenarios.size() == 2);
    CHECK(scen.set.scenarios[0][0] == -1.0);
    CHECK(scen.set.scenarios[1][0] == 1.0);
  }
  SUBCASE("L=2 nonneg box gives the four 0/1 vertices") {
    Rng rng(8);
    AffineFamily f = random_family(rng, 2, 2, true, true, 0.1);
    auto p = UncertainLCP::make(f, UncertaintySet::box_inf_nonneg(2));
    auto scen = box_vertex_reduction(p);
    CHECK(scen.set.scenarios.size() == 4);
  }
  SUBCASE("L > 16 is refused") {
    AffineFamily f;
    const int L = 17;
    f.M0 = Matrix::Identity(2, 2);
    f.q0 = Vector::Ones(2);
    for (int l = 0; l < L; ++l) {
      f.Ms.push_back(Matrix::Zero(2, 2));
      f.qs.push_back(Vector::Zero(2));
    }
    auto p = UncertainLCP::make(f, UncertaintySet::box_inf(L));
    CHECK_THROWS_AS(box_vertex_reduction(p), Error);
  }
}

TEST_CASE("rc_finite_scenarios self-consistency") {
  Rng rng(9);
  const int n = 3;
  std::vector<Vector> us = {Vector::Zero(2), Vector::Unit(2, 0),
                            Vector::Unit(2, 1)};
  AffineFamily f = random_family(rng, n, 2, true, true, 0.2);
  auto p = UncertainLCP::make(f, UncertaintySet::finite(us));
  RcArtifact art = rc_finite_scenarios(p);
  SolutionPoint sp = solve_convex(SolverRequest(art.program));
  REQUIRE(sp.optimal());
  Vector x = art.extract_x(sp).cwiseMax(0.0);
  auto rep = residual_report(p, x, ProbeSpec::scenarios());
  REQUIRE(rep.worst_gap.is_finite());
  CHECK(rep.worst_gap.value() <= sp.objective + 1e-5);
  CHECK(rep.infeasibility <= 1e-6);
}

TEST_CASE("route table") {
  Rng rng(77);
  AffineFamily fq = random_family(rng, 2, 1, true, true, 0.2);
  fq.Ms[0].setZero();
  CHECK(route_auto(UncertainLCP::make(fq, UncertaintySet::box_inf(1))) ==
        Route::QUncertainBox);
  AffineFamily fm = random_family(rng, 2, 1, true, true, 0.0);
  fm.qs[0].setZero();
  CHECK(route_auto(UncertainLCP::make(fm, UncertaintySet::box_inf(1))) ==
        Route::HiddenConvex);
  CHECK(route_auto(UncertainLCP::make(fm, UncertaintySet::box_inf_nonneg(1))) ==
        Route::PsdShiftsNonneg);
  AffineFamily fi = fm;
  Matrix ind(2, 2);
  ind << 1, 0, 0, -1;
  fi.Ms[0] = ind;
  CHECK(route_auto(UncertainLCP::make(fi, UncertaintySet::box_inf(1))) ==
        Route::GeneralNonconvex);
  CHECK(route_auto(UncertainLCP::make(
            fm, UncertaintySet::finite({Vector::Zero(1)}))) == Route::Scenarios);
}

TEST_CASE("upper-bound validity invariant") {
  // for every builder and optimizer x: worst_gap(x) <= t + 1e-5, infeas <= 1e-6
  for (uint64_t seed = 80; seed < 86; ++seed) {
    Rng rng(seed);
    AffineFamily f = random_family(rng, 3, 2, true, true, 0.0);
    for (auto& q : f.qs) q.setZero();
    for (auto kind : {SetKind::BoxInf, SetKind::BallOne, SetKind::BallTwo,
                      SetKind::BoxInfNonneg, SetKind::BallOneNonneg}) {
      UncertaintySet s{kind, 2, std::nullopt, std::nullopt, {}};
      auto p = UncertainLCP::make(f, s);
      RcArtifact art = build_rc(p);
      SolverRequest rq(art.program);
      rq.gap_tol = 1e-10;
      SolutionPoint sp = solve_convex(rq);
      REQUIRE(sp.optimal());
      Vector x = art.extract_x(sp).cwiseMax(0.0);
      ExtReal wg = exact_worst_gap(p, x, 1e-6);
      REQUIRE(wg.is_finite());
      CHECK(wg.value() <= sp.objective + 1e-5 * std::max(1.0, sp.objective));
      CHECK(exact_infeasibility(p, x) <= 1e-6);
    }
  }
}

TEST_CASE("scaling covariance") {
  Rng rng(90);
  AffineFamily f = random_family(rng, 2, 1, true, true, 0.3);
  f.Ms[0].setZero();
  auto p = UncertainLCP::make(f, UncertaintySet::ball_two(1));
  double v1 = solve_rc_value(rc_q_uncertain(p));
  const double alpha = 3.5;
  AffineFamily g = f;
  g.M0 *= alpha;
  g.q0 *= alpha;
  for (auto& q : g.qs) q *= alpha;
  auto p2 = UncertainLCP::make(g, UncertaintySet::ball_two(1));
  double v2 = solve_rc_value(rc_q_uncertain(p2));
  CHECK(v2 == doctest::Approx(alpha * v1).epsilon(1e-6));
}

TEST_CASE("monotone nesting of PSD-shift feasible regions") {
  // x'M(u)x <= x'M(u')x for 0 <= u <= u' componentwise under PSD shifts
  Rng rng(91);
  for (int inst = 0; inst < 10; ++inst) {
    AffineFamily f = random_family(rng, 3, 2, true, true, 0.0);
    for (int k = 0; k < 100; ++k) {
      Vector x(3);
      for (int i = 0; i < 3; ++i) x[i] = rng.uniform(0, 2);
      Vector u(2), up(2);
      for (int l = 0; l < 2; ++l) {
        u[l] = rng.uniform(0, 1);
        up[l] = u[l] + rng.uniform(0, 1);
      }
      double gu = x.dot(f.M(u) * x);
      double gup = x.dot(f.M(up) * x);
      CHECK(gu <= gup + 1e-9 * std::max(1.0, std::abs(gup)));
    }
  }
}

TEST_CASE("avi_to_lcp") {
  SUBCASE("m = 0 is the identity transformation") {
    Rng rng(92);
    AviFamily avi;
    avi.M0 = Matrix::Identity(2, 2);
    avi.C0 = Matrix::Zero(0, 2);
    avi.b0 = Vector::Zero(0);
    avi.q0 = Vector::Ones(2);
    auto p = avi_to_lcp(avi, UncertaintySet::box_inf(0));
    CHECK(p.n() == 2);
    CHECK(p.family.M0.isApprox(avi.M0));
  }
  SUBCASE("block quadratic form: z'B(u)z = x'M(u)x") {
    Rng rng(93);
    AviFamily avi;
    const int n = 3, m = 2;
    Matrix R(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) R(i, j) = rng.normal();
    avi.M0 = R.transpose() * R;
    avi.C0 = Matrix(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) avi.C0(i, j) = rng.normal();
    avi.b0 = Vector::Ones(m);
    avi.q0 = Vector::Ones(n);
    Matrix S1(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) S1(i, j) = 0.1 * rng.normal();
    avi.Ms = {S1};
    avi.Cs = {Matrix::Zero(m, n)};
    avi.bs = {Vector::Zero(m)};
    avi.qs = {Vector::Zero(n)};
    auto p = avi_to_lcp(avi, UncertaintySet::ball_two(1));
    for (int k = 0; k < 100; ++k) {
      Vector z(n + m);
      for (int i = 0; i < n + m; ++i) z[i] = rng.normal();
      Vector u = Vector::Constant(1, rng.uniform(-1, 1));
      double zBz = z.dot(p.family.M(u) * z);
      double xMx = z.head(n).dot((avi.M0 + u[0] * S1) * z.head(n));
      CHECK(zBz == doctest::Approx(xMx).epsilon(1e-10));
    }
  }
}

TEST_CASE("mpcc_reformulate") {
  Rng rng(94);
  const int nx = 2, ny = 2, L = 1;
  MpccData d;
  d.A = Matrix::Zero(ny, nx);
  d.A << 1, 0, 0, 1;
  Matrix R(ny, ny);
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < ny; ++j) R(i, j) = rng.normal();
  d.M0 = R.transpose() * R + 0.5 * Matrix::Identity(ny, ny);
  Matrix S(ny, ny);
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < ny; ++j) S(i, j) = 0.3 * rng.normal();
  d.Ms = {S.transpose() * S};
  d.q = Vector::Ones(ny);
  d.set = UncertaintySet::box_inf(L);
  d.f.c = Vector::Ones(nx + ny);
  MpccArtifact art = mpcc_reformulate(d);
  CHECK(validate(art.program).empty());
  CHECK(art.compl_pairs.size() == size_t(ny + 2 * L * ny + ny + L * ny));

  SUBCASE("primal block matches the hidden-convex feasible set pointwise") {
    // with A = I: F = x + M(u)y + ... embed x as a constant through samples
    for (int k = 0; k < 100; ++k) {
      Vector x(nx), y(ny), z(ny);
      for (int i = 0; i < nx; ++i) x[i] = rng.uniform(0, 2);
      for (int i = 0; i < ny; ++i) y[i] = rng.uniform(0, 2);
      // candidate z = |M1 y| satisfies the split rows with equality
      z = (d.Ms[0] * y).cwiseAbs();
      // membership in the emitted primal rows
      bool emitted_ok = true;
      Vector full = Vector::Zero(art.program.num_vars());
      full.segment(art.x_index, nx) = x;
      full.segment(art.y_index, ny) = y;
      full.segment(art.y_index + ny, ny) = z;  // z block follows y
      for (const auto& lc : art.program.lin) {
        if (lc.label != "ll-feas" && lc.label != "ll-z+" && lc.label != "ll-z-")
          continue;
        double g = lc.a.dot(full) - lc.b;
        if (lc.rel == Rel::Ge && g < -1e-9) emitted_ok = false;
      }
      // direct robust feasibility: M0 y + x + q - sum|M1 y| >= 0
      bool direct_ok =
          ((d.M0 * y + x + d.q - (d.Ms[0] * y).cwiseAbs()).minCoeff() >= -1e-9);
      CHECK(emitted_ok == direct_ok);
    }
  }
  SUBCASE("L = 0 gives the classical MPCC with the nominal LCP block") {
    MpccData d0 = d;
    d0.Ms.clear();
    d0.set = UncertaintySet::box_inf(0);
    MpccArtifact a0 = mpcc_reformulate(d0);
    // complementarity pairs: rho-rows + y-bounds
    CHECK(a0.compl_pairs.size() == size_t(2 * ny));
  }
}
