#include "rlcp/program_ir.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>

#include "json.hpp"

namespace rlcp {

int MathProgram::add_var(const std::string& name, bool nonneg) {
  var_names.push_back(name);
  var_nonneg.push_back(nonneg);
  return int(var_names.size()) - 1;
}

int MathProgram::add_vars(const std::string& prefix, int count, bool nonneg) {
  int first = num_vars();
  for (int i = 0; i < count; ++i)
    add_var(prefix + "[" + std::to_string(i) + "]", nonneg);
  return first;
}

int MathProgram::var_index(const std::string& name) const {
  auto it = std::find(var_names.begin(), var_names.end(), name);
  require(it != var_names.end(), ErrorCode::InvalidArgument,
          "unknown variable " + name);
  return int(it - var_names.begin());
}

void MathProgram::add_linear(const Vector& a, Rel rel, double b,
                             std::string label) {
  require(a.size() == num_vars(), ErrorCode::DimensionMismatch,
          "add_linear: coefficient length mismatch");
  lin.push_back({a, rel, b, std::move(label)});
}

void MathProgram::add_quadratic(const Matrix& H, const Vector& c, double d,
                                std::string label) {
  require(H.rows() == num_vars() && H.cols() == num_vars() &&
              c.size() == num_vars(),
          ErrorCode::DimensionMismatch, "add_quadratic: dimension mismatch");
  QuadConstraint qc;
  qc.H = 0.5 * (H + H.transpose());
  qc.c = c;
  qc.d = d;
  Eigen::SelfAdjointEigenSolver<Matrix> es(qc.H, Eigen::EigenvaluesOnly);
  qc.convex = es.eigenvalues().minCoeff() >= -1e-9;
  qc.label = std::move(label);
  quad.push_back(std::move(qc));
}

void MathProgram::add_soc(const Matrix& A, const Vector& b, const Vector& c,
                          double d, std::string label) {
  require(A.cols() == num_vars() && c.size() == num_vars() &&
              b.size() == A.rows(),
          ErrorCode::DimensionMismatch, "add_soc: dimension mismatch");
  soc.push_back({A, b, c, d, std::move(label)});
}

void MathProgram::pad() {
  const int total = num_vars();
  auto padv = [&](Vector& v) {
    if (v.size() && v.size() < total) {
      Vector a = Vector::Zero(total);
      a.head(v.size()) = v;
      v = a;
    }
  };
  for (auto& lc : lin) padv(lc.a);
  for (auto& qc : quad) {
    if (qc.H.rows() < total) {
      Matrix H = Matrix::Zero(total, total);
      H.topLeftCorner(qc.H.rows(), qc.H.cols()) = qc.H;
      qc.H = H;
    }
    padv(qc.c);
  }
  for (auto& sc : soc) {
    if (sc.A.cols() < total) {
      Matrix A = Matrix::Zero(sc.A.rows(), total);
      A.leftCols(sc.A.cols()) = sc.A;
      sc.A = A;
    }
    padv(sc.c);
  }
  padv(obj.c);
  if (obj.H.size() && obj.H.rows() < total) {
    Matrix H = Matrix::Zero(total, total);
    H.topLeftCorner(obj.H.rows(), obj.H.cols()) = obj.H;
    obj.H = H;
  }
}

bool MathProgram::is_convex(double tol) const {
  for (const auto& qc : quad)
    if (!qc.convex) return false;
  if (obj.H.size()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(obj.H, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) return false;
  }
  return true;
}

bool MathProgram::is_linear() const {
  return quad.empty() && soc.empty() && psd.empty() && obj.H.size() == 0;
}

double MathProgram::max_violation(const Vector& v) const {
  double viol = 0.0;
  for (int i = 0; i < num_vars(); ++i)
    if (var_nonneg[i]) viol = std::max(viol, -v[i]);
  for (const auto& lc : lin) {
    double g = lc.a.dot(v) - lc.b;
    if (lc.rel == Rel::Le) viol = std::max(viol, g);
    else if (lc.rel == Rel::Ge) viol = std::max(viol, -g);
    else viol = std::max(viol, std::abs(g));
  }
  for (const auto& qc : quad)
    viol = std::max(viol, v.dot(qc.H * v) + qc.c.dot(v) - qc.d);
  for (const auto& sc : soc)
    viol = std::max(viol, (sc.A * v + sc.b).norm() - sc.c.dot(v) - sc.d);
  for (const auto& pc : psd) {
    Matrix S = pc.F0;
    for (size_t j = 0; j < pc.vars.size(); ++j) S += v[pc.vars[j]] * pc.F[j];
    Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
    viol = std::max(viol, -es.eigenvalues().minCoeff());
  }
  return viol;
}

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration-limit";
    case SolveStatus::Skipped: return "skipped";
    case SolveStatus::Failed: return "failed";
  }
  return "?";
}

std::vector<Diagnostic> validate(const MathProgram& prog) {
  std::vector<Diagnostic> out;
  const int n = prog.num_vars();
  if (int(prog.var_nonneg.size()) != n)
    out.push_back({"var-flags", "nonnegativity flag count mismatch"});
  if (prog.obj.c.size() && prog.obj.c.size() != n)
    out.push_back({"objective", "linear coefficient length mismatch"});
  if (prog.obj.H.size() &&
      (prog.obj.H.rows() != n || prog.obj.H.cols() != n))
    out.push_back({"objective", "quadratic term dimension mismatch"});
  if (prog.obj.H.size() &&
      (prog.obj.H - prog.obj.H.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    out.push_back({"objective", "asymmetric Hessian"});
  int k = 0;
  for (const auto& lc : prog.lin) {
    if (lc.a.size() != n)
      out.push_back({"linear", "constraint " + std::to_string(k) +
                                   ": coefficient length mismatch"});
    ++k;
  }
  k = 0;
  for (const auto& qc : prog.quad) {
    if (qc.H.rows() != n || qc.H.cols() != n || qc.c.size() != n)
      out.push_back({"quadratic", "constraint " + std::to_string(k) +
                                      ": dimension mismatch"});
    else {
      if ((qc.H - qc.H.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        out.push_back({"quadratic", "constraint " + std::to_string(k) +
                                        ": asymmetric Hessian"});
      Eigen::SelfAdjointEigenSolver<Matrix> es(
          0.5 * (qc.H + qc.H.transpose()), Eigen::EigenvaluesOnly);
      bool psd = es.eigenvalues().minCoeff() >= -1e-9;
      if (psd != qc.convex)
        out.push_back({"quadratic", "constraint " + std::to_string(k) +
                                        ": convexity tag disagrees with spectrum"});
    }
    ++k;
  }
  k = 0;
  for (const auto& sc : prog.soc) {
    if (sc.A.cols() != n || sc.c.size() != n || sc.b.size() != sc.A.rows())
      out.push_back(
          {"soc", "constraint " + std::to_string(k) + ": dimension mismatch"});
    ++k;
  }
  k = 0;
  for (const auto& pc : prog.psd) {
    if (pc.vars.size() != pc.F.size())
      out.push_back({"psd", "constraint " + std::to_string(k) +
                                ": coefficient count mismatch"});
    for (int vi : pc.vars)
      if (vi < 0 || vi >= n)
        out.push_back({"psd", "constraint " + std::to_string(k) +
                                  ": references undeclared variable"});
    const auto rows = pc.F0.rows();
    if (pc.F0.cols() != rows)
      out.push_back(
          {"psd", "constraint " + std::to_string(k) + ": F0 not square"});
    for (const auto& F : pc.F)
      if (F.rows() != rows || F.cols() != rows)
        out.push_back({"psd", "constraint " + std::to_string(k) +
                                  ": block size mismatch"});
    ++k;
  }
  return out;
}

std::string to_json_mp(const MathProgram& prog) {
  using nlohmann::json;
  json j;
  j["schema"] = "mp-v1";
  j["variables"] = json::array();
  for (int i = 0; i < prog.num_vars(); ++i)
    j["variables"].push_back(
        {{"name", prog.var_names[i]}, {"nonneg", bool(prog.var_nonneg[i])}});
  auto vec = [](const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  auto mat = [&](const Matrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(row);
    }
    return rows;
  };
  j["objective"] = {{"c", vec(prog.obj.c)}, {"c0", prog.obj.c0}};
  if (prog.obj.H.size()) j["objective"]["H"] = mat(prog.obj.H);
  j["linear"] = json::array();
  for (const auto& lc : prog.lin)
    j["linear"].push_back({{"a", vec(lc.a)},
                           {"rel", lc.rel == Rel::Le   ? "<="
                                   : lc.rel == Rel::Ge ? ">="
                                                       : "=="},
                           {"b", lc.b},
                           {"label", lc.label}});
  j["quadratic"] = json::array();
  for (const auto& qc : prog.quad)
    j["quadratic"].push_back({{"H", mat(qc.H)},
                              {"c", vec(qc.c)},
                              {"d", qc.d},
                              {"convex", qc.convex},
                              {"label", qc.label}});
  j["soc"] = json::array();
  for (const auto& sc : prog.soc)
    j["soc"].push_back({{"A", mat(sc.A)},
                        {"b", vec(sc.b)},
                        {"c", vec(sc.c)},
                        {"d", sc.d},
                        {"label", sc.label}});
  j["psd"] = json::array();
  for (const auto& pc : prog.psd) {
    json blk;
    blk["vars"] = pc.vars;
    blk["F0"] = mat(pc.F0);
    blk["F"] = json::array();
    for (const auto& F : pc.F) blk["F"].push_back(mat(F));
    blk["label"] = pc.label;
    j["psd"].push_back(blk);
  }
  return j.dump(2);
}

}  // namespace rlcp
