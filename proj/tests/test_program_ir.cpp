
#include <doctest.h>

#include <rlcp/program_ir.hpp>

using namespace rlcp;

TEST_CASE("validate") {
  SUBCASE("empty program is clean") {
    MathProgram p;
    CHECK(validate(p).empty());
  }
  SUBCASE("asymmetric Hessian is flagged") {
    MathProgram p;
    p.add_vars("x", 2, false);
    QuadConstraint qc;
    qc.H = Matrix::Zero(2, 2);
    qc.H(0, 1) = 1.0;  // asymmetric on purpose (bypasses add_quadratic)
    qc.c = Vector::Zero(2);
    qc.d = 1.0;
    qc.convex = true;
    p.quad.push_back(qc);
    auto diags = validate(p);
    REQUIRE(!diags.empty());
    bool found = false;
    for (auto& d : diags)
      if (d.message.find("asymmetric Hessian") != std::string::npos) found = true;
    CHECK(found);
  }
  SUBCASE("convexity tag mismatch is flagged") {
    MathProgram p;
    p.add_var("x", false);
    QuadConstraint qc;
    qc.H = Matrix::Constant(1, 1, -1.0);
    qc.c = Vector::Zero(1);
    qc.d = 0.0;
    qc.convex = true;  // wrong on purpose
    p.quad.push_back(qc);
    auto diags = validate(p);
    CHECK(!diags.empty());
  }
  SUBCASE("builders symmetrize and tag on entry") {
    MathProgram p;
    p.add_vars("x", 2, false);
    Matrix H(2, 2);
    H << 0, 2, 0, 0;
    p.add_quadratic(H, Vector::Zero(2), 1.0);
    CHECK(p.quad[0].H(0, 1) == doctest::Approx(1.0));
    CHECK(p.quad[0].H(1, 0) == doctest::Approx(1.0));
    CHECK_FALSE(p.quad[0].convex);  // [[0,1],[1,0]] is indefinite
    CHECK(validate(p).empty());
  }
}

TEST_CASE("convexity flag flips with the sign of H") {
  MathProgram p;
  p.add_vars("x", 2, false);
  p.add_quadratic(Matrix::Identity(2, 2), Vector::Zero(2), 1.0);
  CHECK(p.is_convex());
  MathProgram q;
  q.add_vars("x", 2, false);
  q.add_quadratic(Matrix(-Matrix::Identity(2, 2)), Vector::Zero(2), 1.0);
  CHECK_FALSE(q.is_convex());
}

TEST_CASE("sdpa emission") {
  SUBCASE("1x1 psd block: min v s.t. v >= 0") {
    MathProgram p;
    p.add_var("v", false);
    p.obj.c = Vector::Constant(1, 1.0);
    PsdConstraint pc;
    pc.vars = {0};
    pc.F = {Matrix::Constant(1, 1, 1.0)};
    pc.F0 = Matrix::Zero(1, 1);
    p.psd.push_back(pc);
    std::string text = emit_sdpa(p);
    CHECK(text.find("1\n1\n1\n1\n") == 0);  // m, nblocks, sizes, c
    MathProgram back = parse_sdpa(text);
    CHECK(back.num_vars() == 1);
    REQUIRE(back.psd.size() == 1);
    CHECK(back.psd[0].F0.rows() == 1);
  }
  SUBCASE("emit -> parse -> emit is byte-identical") {
    MathProgram p;
    p.add_vars("v", 3, true);
    p.obj.c = Vector::Zero(3);
    p.obj.c[0] = 1.0;
    p.obj.c[2] = -0.25;
    PsdConstraint pc;
    pc.vars = {0, 1, 2};
    Matrix F1 = Matrix::Zero(2, 2), F2 = Matrix::Zero(2, 2), F3(2, 2);
    F1(0, 0) = 1.0;
    F2(0, 1) = F2(1, 0) = 0.5;
    F3 << 2, -1, -1, 3;
    pc.F = {F1, F2, F3};
    pc.F0 = Matrix::Identity(2, 2) * 0.125;
    p.psd.push_back(pc);
    Vector a(3);
    a << 1, 2, 3;
    p.add_linear(a, Rel::Ge, 1.5);
    p.add_linear(a, Rel::Eq, 2.0);
    std::string t1 = emit_sdpa(p);
    std::string t2 = emit_sdpa(parse_sdpa(t1));
    CHECK(t1 == t2);
  }
  SUBCASE("quadratic constraints are an unsupported-feature error") {
    MathProgram p;
    p.add_var("x", false);
    p.obj.c = Vector::Constant(1, 1.0);
    p.add_quadratic(Matrix::Identity(1, 1), Vector::Zero(1), 1.0);
    CHECK_THROWS_AS(emit_sdpa(p), Error);
  }
}

TEST_CASE("mp-v1 json dump") {
  MathProgram p;
  p.add_vars("x", 2, true);
  p.obj.c = Vector::Ones(2);
  p.add_quadratic(Matrix::Identity(2, 2), Vector::Zero(2), 1.0);
  std::string j = to_json_mp(p);
  CHECK(j.find("\"schema\": \"mp-v1\"") != std::string::npos);
  CHECK(j.find("\"convex\": true") != std::string::npos);
}
