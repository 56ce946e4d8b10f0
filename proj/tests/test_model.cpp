
#include <doctest.h>

#include <rlcp/model.hpp>

using namespace rlcp;

namespace {

AffineFamily small_family() {
  AffineFamily f;
  f.M0 = Matrix::Identity(2, 2);
  f.q0 = Vector::Ones(2);
  f.Ms = {Matrix::Identity(2, 2)};
  f.qs = {Vector::Zero(2)};
  return f;
}

}  // namespace

TEST_CASE("eval_map") {
  AffineFamily f = small_family();
  SUBCASE("zero point returns q(u)") {
    Vector u = Vector::Constant(1, 0.7);
    Vector r = eval_map(f, Vector::Zero(2), u);
    CHECK(r.isApprox(f.q(u)));
  }
  SUBCASE("nominal scenario") {
    Vector x(2);
    x << 2, 3;
    Vector r = eval_map(f, x, Vector::Zero(1));
    CHECK(r.isApprox(Vector(f.M0 * x + f.q0)));
  }
  SUBCASE("hand arithmetic: n=2, L=1, M0=M1=I, q0=(1,1), x=(1,2), u=0.5") {
    Vector x(2);
    x << 1, 2;
    Vector r = eval_map(f, x, Vector::Constant(1, 0.5));
    CHECK(r[0] == doctest::Approx(2.5));
    CHECK(r[1] == doctest::Approx(4.0));
  }
  SUBCASE("dimension mismatch is a structured error") {
    CHECK_THROWS_AS(eval_map(f, Vector::Zero(3), Vector::Zero(1)), Error);
    CHECK_THROWS_AS(eval_map(f, Vector::Zero(2), Vector::Zero(2)), Error);
  }
}

TEST_CASE("gap_value") {
  AffineFamily f = small_family();
  SUBCASE("zero point with q(u) >= 0 gives 0") {
    ExtReal g = gap_value(f, Vector::Zero(2), Vector::Zero(1));
    CHECK(g.is_finite());
    CHECK(g.value() == 0.0);
  }
  SUBCASE("infeasible point maps to +inf, not a sentinel") {
    AffineFamily f2 = f;
    f2.q0 = Vector::Constant(2, -5.0);
    ExtReal g = gap_value(f2, Vector::Zero(2), Vector::Zero(1));
    CHECK(g.is_inf());
  }
  SUBCASE("negative x is rejected") {
    Vector x(2);
    x << -1, 0;
    CHECK_THROWS_AS(gap_value(f, x, Vector::Zero(1)), Error);
  }
  SUBCASE("nonnegativity invariant: feasible gap is >= 0") {
    Rng rng(11);
    for (int k = 0; k < 200; ++k) {
      Vector x(2), u(1);
      x << rng.uniform(0, 3), rng.uniform(0, 3);
      u << rng.uniform(-1, 1);
      ExtReal g = gap_value(f, x, u);
      if (g.is_finite()) CHECK(g.value() >= -1e-12);
    }
  }
}

TEST_CASE("symmetrize") {
  SUBCASE("symmetric input is a fixed point") {
    AffineFamily f = small_family();
    auto pair = symmetrize(f);
    CHECK(pair.sym.M0.isApprox(f.M0));
    CHECK(pair.sym.Ms[0].isApprox(f.Ms[0]));
  }
  SUBCASE("forced by formula: [[0,2],[0,0]] -> [[0,1],[1,0]]") {
    AffineFamily f = small_family();
    f.M0 << 0, 2, 0, 0;
    auto pair = symmetrize(f);
    Matrix expect(2, 2);
    expect << 0, 1, 1, 0;
    CHECK(pair.sym.M0.isApprox(expect));
    CHECK(pair.original.M0(0, 1) == 2.0);  // rows preserved for constraints
  }
  SUBCASE("quadratic form unchanged on random 3x3 family") {
    Rng rng(5);
    AffineFamily f;
    f.M0 = Matrix(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) f.M0(i, j) = rng.normal();
    f.q0 = Vector::Zero(3);
    auto pair = symmetrize(f);
    for (int k = 0; k < 100; ++k) {
      Vector x(3);
      for (int i = 0; i < 3; ++i) x[i] = rng.normal();
      CHECK(x.dot(f.M0 * x) ==
            doctest::Approx(x.dot(pair.sym.M0 * x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("psd classification") {
  CHECK(classify_shift(Matrix::Identity(3, 3)) == ShiftSign::Psd);
  CHECK(classify_shift(Matrix(-Matrix::Identity(3, 3))) == ShiftSign::Nsd);
  Matrix ind = Matrix::Zero(2, 2);
  ind(0, 0) = 1;
  ind(1, 1) = -1;
  CHECK(classify_shift(ind) == ShiftSign::Indefinite);
  // skew part does not affect the classification
  Matrix skew(2, 2);
  skew << 0, 1, -1, 0;
  CHECK(classify_shift(skew) == ShiftSign::Psd);
  // tolerance: tiny negative eigenvalue still counts as PSD
  Matrix nearpsd = Matrix::Identity(2, 2);
  nearpsd(1, 1) = -5e-10;
  CHECK(classify_shift(nearpsd) == ShiftSign::Psd);
}

TEST_CASE("uncertainty set sampling and vertices") {
  SUBCASE("vertices of boxes") {
    auto s = UncertaintySet::box_inf(1);
    auto v = s.vertices();
    REQUIRE(v.size() == 2);
    CHECK(v[0][0] == -1.0);
    CHECK(v[1][0] == 1.0);
    auto s2 = UncertaintySet::box_inf_nonneg(2);
    CHECK(s2.vertices().size() == 4);
    auto s3 = UncertaintySet::box_inf(17);
    CHECK_THROWS_AS(s3.vertices(), Error);
  }
  SUBCASE("samples stay inside their sets and are seed-deterministic") {
    for (auto kind_set :
         {UncertaintySet::box_inf(3), UncertaintySet::ball_one(3),
          UncertaintySet::ball_two(3), UncertaintySet::box_inf_nonneg(3),
          UncertaintySet::ball_one_nonneg(3)}) {
      auto us = kind_set.sample(500, 42);
      auto us2 = kind_set.sample(500, 42);
      for (size_t k = 0; k < us.size(); ++k) {
        const Vector& u = us[k];
        CHECK(u.isApprox(us2[k]));
        switch (kind_set.kind) {
          case SetKind::BoxInf: CHECK(u.cwiseAbs().maxCoeff() <= 1.0); break;
          case SetKind::BallOne: CHECK(u.cwiseAbs().sum() <= 1.0 + 1e-12); break;
          case SetKind::BallTwo: CHECK(u.norm() <= 1.0 + 1e-12); break;
          case SetKind::BoxInfNonneg:
            CHECK(u.minCoeff() >= 0.0);
            CHECK(u.maxCoeff() <= 1.0);
            break;
          case SetKind::BallOneNonneg:
            CHECK(u.minCoeff() >= 0.0);
            CHECK(u.sum() <= 1.0 + 1e-12);
            break;
          default: break;
        }
      }
    }
  }
}

TEST_CASE("residual_report") {
  // scenario problem: M = I, two scenarios shifting q
  AffineFamily f;
  f.M0 = Matrix::Identity(2, 2);
  f.q0 = Vector::Ones(2);
  f.Ms = {Matrix::Zero(2, 2)};
  f.qs = {Vector::Ones(2)};
  auto prob = UncertainLCP::make(
      f, UncertaintySet::finite({Vector::Zero(1), Vector::Ones(1)}));

  SUBCASE("solution of every scenario has worst_gap 0") {
    // x=0 solves both (q(u) >= 0 for u in {0,1})
    auto rep = residual_report(prob, Vector::Zero(2), ProbeSpec::scenarios());
    CHECK(rep.worst_gap.is_finite());
    CHECK(rep.worst_gap.value() == doctest::Approx(0.0));
    CHECK(rep.infeasibility == 0.0);
    CHECK(rep.per_scenario.size() == 2);
  }
  SUBCASE("worst_gap equals the max of per-scenario gaps") {
    Vector x(2);
    x << 1, 2;
    auto rep = residual_report(prob, x, ProbeSpec::scenarios());
    ExtReal worst(-1e300);
    for (auto& [u, g] : rep.per_scenario) worst = ExtReal::max(worst, g);
    CHECK(rep.worst_gap.as_double() == worst.as_double());
  }
  SUBCASE("infeasibility is zero iff all scenarios feasible") {
    AffineFamily f2 = f;
    f2.qs = {Vector::Constant(2, -3.0)};
    auto prob2 = UncertainLCP::make(
        f2, UncertaintySet::finite({Vector::Zero(1), Vector::Ones(1)}));
    auto rep = residual_report(prob2, Vector::Zero(2), ProbeSpec::scenarios());
    CHECK(rep.infeasibility == doctest::Approx(4.0));  // 2 rows at -2 each
    CHECK(rep.worst_gap.is_inf());
  }
}

TEST_CASE("exact worst gap agrees with dense sampling on ball sets") {
  Rng rng(17);
  for (auto kind : {SetKind::BoxInf, SetKind::BallOne, SetKind::BallTwo,
                    SetKind::BoxInfNonneg, SetKind::BallOneNonneg}) {
    AffineFamily f;
    const int n = 3, L = 2;
    f.M0 = Matrix::Identity(n, n);
    f.q0 = Vector::Constant(n, 2.0);
    for (int l = 0; l < L; ++l) {
      Matrix Ml(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Ml(i, j) = 0.2 * rng.normal();
      f.Ms.push_back(Ml);
      f.qs.push_back(Vector::Constant(n, 0.1 * rng.normal()));
    }
    UncertaintySet s{kind, L, std::nullopt, std::nullopt, {}};
    auto prob = UncertainLCP::make(f, s);
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(0, 1);
    ExtReal exact = exact_worst_gap(prob, x);
    auto rep = residual_report(prob, x, ProbeSpec::uniform(20000, 3));
    if (exact.is_finite()) {
      REQUIRE(rep.worst_gap.is_finite());
      CHECK(rep.worst_gap.value() <= exact.value() + 1e-9);
      CHECK(rep.worst_gap.value() >= exact.value() - 0.05 * std::abs(exact.value()) - 1e-6);
    }
  }
}

TEST_CASE("section 2.1 style closed-form residual check") {
  // lower block only: S(xi,eta) = xi S1 + eta S2 over the simplex,
  // q(u) = u e over [0,1]; worst residual at y is
  // max{y'S1y, y'S2y} + y'e.
  const int n = 4;
  Vector en(n);
  for (int i = 0; i < n; ++i) en[i] = i + 1;
  Matrix S1 = double(n) * Matrix::Identity(n, n) + en * en.transpose();
  Matrix S2 = Matrix::Ones(n, n) + en * en.transpose();
  AffineFamily f;
  f.M0 = Matrix::Zero(n, n);
  f.q0 = Vector::Zero(n);
  f.Ms = {S1, S2};
  f.qs = {Vector::Zero(n), Vector::Zero(n)};
  QExtra extra;
  extra.qs = {Vector::Ones(n)};
  extra.set = UncertaintySet::box_inf_nonneg(1);
  auto prob = UncertainLCP::make(f, UncertaintySet::ball_one_nonneg(2), extra);

  Vector y = Vector::Constant(n, 100.0);
  ExtReal got = exact_worst_gap(prob, y);
  double expect =
      std::max(y.dot(S1 * y), y.dot(S2 * y)) + y.sum();
  REQUIRE(got.is_finite());
  CHECK(got.value() == doctest::Approx(expect).epsilon(1e-12));
  // and the robust point y = 0 has zero residual
  CHECK(exact_worst_gap(prob, Vector::Zero(n)).value() == 0.0);
}
