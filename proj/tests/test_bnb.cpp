#include <doctest.h>
#include <fstream>

#include <rlcp/bnb.hpp>
#include <rlcp/reformulate.hpp>

#include "oracles.hpp"

using namespace rlcp;

namespace {

// the section 6.2 style instance: M(u) = u1 S1 - u2 S2, q(u) = u1 q1 + u2 q2
UncertainLCP ex62_instance(int n, uint64_t seed) {
  Rng rng(seed);
  Vector en(n);
  for (int i = 0; i < n; ++i) en[i] = i + 1;
  Matrix S1 = en * en.transpose();
  Matrix B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = rng.normal();
  Matrix S2 = 1e4 * B.transpose() * B;
  AffineFamily f;
  f.M0 = Matrix::Zero(n, n);
  f.q0 = Vector::Zero(n);
  f.Ms = {S1, Matrix(-S2)};
  f.qs = {Vector(-en), Vector(10.0 / (n * (n + 1.0)) * (S2 * en))};
  return UncertainLCP::make(f, UncertaintySet::box_inf_nonneg(2));
}

}  // namespace

TEST_CASE("secant validity") {
  // (y - l)(u + l) + l^2 >= y^2 on l <= y <= u
  Rng rng(1);
  int bad = 0;
  for (int k = 0; k < 100000; ++k) {
    double l = rng.uniform(-5, 5);
    double u = l + rng.uniform(0, 10);
    double y = rng.uniform(l, u);
    double secant = (y - l) * (u + l) + l * l;
    if (secant < y * y - 1e-9 * std::max(1.0, y * y)) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("eigen split reconstruction") {
  Rng rng(2);
  MathProgram p;
  p.add_vars("x", 4, true);
  Matrix A(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) A(i, j) = rng.normal();
  p.add_quadratic(0.5 * (A + A.transpose()), Vector::Zero(4), 1.0);
  EigenSplit sp = eigen_split(p);
  Matrix rec = sp.Hplus[0];
  for (const auto& t : sp.terms)
    rec -= t.lambda * t.nu * t.nu.transpose();
  CHECK((rec - p.quad[0].H).norm() <= 1e-8 * std::max(1.0, p.quad[0].H.norm()));
}

TEST_CASE("bound_box basics") {
  SUBCASE("unit box in 2-d with nu = e1, lambda = 4 gives [0, 2]") {
    MathProgram p;
    p.add_vars("x", 2, true);
    Vector e0 = Vector::Zero(2);
    e0[0] = 1;
    p.add_linear(e0, Rel::Le, 1.0);
    Vector e1 = Vector::Zero(2);
    e1[1] = 1;
    p.add_linear(e1, Rel::Le, 1.0);
    Matrix H = Matrix::Zero(2, 2);
    H(0, 0) = -4.0;  // one negative eigendirection e1 with lambda 4
    p.add_quadratic(H, Vector::Zero(2), 0.0);
    EigenSplit sp = eigen_split(p);
    REQUIRE(sp.terms.size() == 1);
    auto box = bound_box(p, sp);
    REQUIRE(box.has_value());
    // y = sqrt(4) * (+-e1)'x over [0,1]^2: width 2 regardless of sign
    double lo = (*box)[0].first, hi = (*box)[0].second;
    CHECK(std::abs(hi - lo) == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(std::min(std::abs(lo), std::abs(hi)) == doctest::Approx(0.0).epsilon(1e-7));
  }
  SUBCASE("X = {0} collapses all bounds to zero") {
    MathProgram p;
    p.add_vars("x", 2, true);
    Vector ones = Vector::Ones(2);
    p.add_linear(ones, Rel::Le, 0.0);  // x >= 0 and sum <= 0 -> x = 0
    Matrix H = -Matrix::Identity(2, 2);
    p.add_quadratic(H, Vector::Zero(2), 0.0);
    EigenSplit sp = eigen_split(p);
    auto box = bound_box(p, sp);
    REQUIRE(box.has_value());
    for (auto& [lo, hi] : *box) {
      CHECK(std::abs(lo) <= 1e-7);
      CHECK(std::abs(hi) <= 1e-7);
    }
  }
  SUBCASE("unbounded LP refuses with a remediation hint") {
    MathProgram p;
    p.add_vars("x", 1, true);  // x >= 0 only: max x unbounded
    Matrix H = -Matrix::Identity(1, 1);
    p.add_quadratic(H, Vector::Zero(1), 0.0);
    EigenSplit sp = eigen_split(p);
    CHECK_THROWS_WITH_AS(bound_box(p, sp),
                         doctest::Contains("add box bounds"), Error);
  }
}

TEST_CASE("relax properties") {
  // zero-width node: relaxation equals the restricted original value
  MathProgram p;
  p.add_var("x", true);
  int t = p.add_var("t", false);
  p.obj.c = Vector::Zero(2);
  p.obj.c[t] = 1.0;
  Matrix H = Matrix::Zero(2, 2);
  H(0, 0) = -1.0;
  Vector lc = Vector::Zero(2);
  lc[t] = -1.0;
  p.add_quadratic(H, lc, 0.0);  // -x^2 <= t
  Vector ex = Vector::Zero(2);
  ex[0] = 1.0;
  p.add_linear(ex, Rel::Le, 2.0);
  EigenSplit sp = eigen_split(p);
  REQUIRE(sp.terms.size() == 1);
  BnbNode node;
  double yfix = std::sqrt(1.0) * 1.5;  // x fixed at 1.5 via y = x
  double sgn = sp.terms[0].nu[0] > 0 ? 1.0 : -1.0;
  node.lo = {sgn * yfix};
  node.hi = {sgn * yfix};
  if (node.lo[0] > node.hi[0]) std::swap(node.lo[0], node.hi[0]);
  MathProgram rel = relax(p, sp, node);
  CHECK(rel.is_convex());
  SolutionPoint s = solve_convex(SolverRequest(rel));
  REQUIRE(s.optimal());
  CHECK(s.objective == doctest::Approx(-1.5 * 1.5).epsilon(1e-6));
}

TEST_CASE("bnb 1-d epigraph certifies the grid optimum") {
  // min t s.t. -x^2 + 2x <= t, 0 <= x <= 2: optimum 0 at x in {0, 2}
  MathProgram p;
  p.add_var("x", true);
  int t = p.add_var("t", false);
  p.obj.c = Vector::Zero(2);
  p.obj.c[t] = 1.0;
  Matrix H = Matrix::Zero(2, 2);
  H(0, 0) = -1.0;
  Vector lc = Vector::Zero(2);
  lc[0] = 2.0;
  lc[t] = -1.0;
  p.add_quadratic(H, lc, 0.0);
  Vector ex = Vector::Zero(2);
  ex[0] = 1.0;
  p.add_linear(ex, Rel::Le, 2.0);
  auto exact = [&](const Vector& v) { return -v[0] * v[0] + 2.0 * v[0]; };
  BnbOptions opts;
  opts.eps = 1e-6;
  BnbResult r = bnb_solve(p, exact, opts);
  REQUIRE(r.incumbent.status == SolveStatus::Optimal);
  // 10^4-point grid oracle
  double grid_best = 1e300;
  for (int k = 0; k <= 10000; ++k) {
    double x = 2.0 * k / 10000.0;
    grid_best = std::min(grid_best, -x * x + 2 * x);
  }
  CHECK(std::abs(r.incumbent.objective - grid_best) <= 1e-6);
  CHECK(r.stats.converged);
  CHECK(r.stats.lb_monotone);
  CHECK(r.stats.glb_ub - r.stats.glb_lb < 1e-6 + 1e-12);
}

TEST_CASE("convex instance terminates at the root") {
  Rng rng(4);
  MathProgram p;
  p.add_vars("x", 3, true);
  Matrix R(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) R(i, j) = rng.normal();
  p.obj.H = R.transpose() * R;
  p.obj.c = Vector::Constant(3, -1.0);
  auto exact = [&](const Vector& v) { return p.obj.value(v); };
  BnbResult r = bnb_solve(p, exact, BnbOptions{});
  CHECK(r.stats.nodes_solved == 1);
  CHECK(r.stats.converged);
}

TEST_CASE("section 6.2 instance: bnb certifies and beats multistart") {
  auto prob = ex62_instance(4, 42);
  RcArtifact art = rc_general_nonconvex(prob);
  CHECK_FALSE(art.program.is_convex());
  BnbOptions opts;
  opts.eps = 1e-4;
  opts.trace_path = "/tmp/rlcp_bnb_trace.txt";
  BnbResult r = bnb_solve(prob, art, opts);
  REQUIRE(r.incumbent.status == SolveStatus::Optimal);
  CHECK(r.stats.converged);
  CHECK(r.stats.glb_ub - r.stats.glb_lb <= opts.eps + 1e-12);
  CHECK(r.stats.lb_monotone);
  CHECK(r.stats.pruning_sound);

  // incumbent must not exceed the multistart local value
  SolverRequest rq(art.program);
  SolutionPoint loc = solve_local(rq, 20, 7);
  if (loc.optimal()) {
    CHECK(r.incumbent.objective <= loc.objective + 1e-6);
  }
  // and the trace file exists with one line per logged node
  std::ifstream tf("/tmp/rlcp_bnb_trace.txt");
  CHECK(tf.good());
}

TEST_CASE("sandwich property on a 2-d nonconvex instance") {
  auto prob = ex62_instance(2, 11);
  RcArtifact art = rc_general_nonconvex(prob);
  BnbOptions opts;
  opts.eps = 1e-5;
  BnbResult r = bnb_solve(prob, art, opts);
  REQUIRE(r.incumbent.status == SolveStatus::Optimal);
  // exhaustive x-grid oracle over the feasible box
  double grid_best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 300; ++i)
    for (int j = 0; j <= 300; ++j) {
      Vector x(2);
      x << 3.0 * i / 300, 3.0 * j / 300;
      double g = exact_worst_gap(prob, x, 1e-7).as_double();
      grid_best = std::min(grid_best, g);
    }
  CHECK(r.stats.glb_lb - 1e-6 <= grid_best);
  CHECK(grid_best <= r.stats.glb_ub + 1e-6);
  CHECK(std::abs(r.incumbent.objective - grid_best) <= 2e-3);
}
