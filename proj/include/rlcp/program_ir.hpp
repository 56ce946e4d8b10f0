#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rlcp/model.hpp"
#include "rlcp/types.hpp"

namespace rlcp {

enum class Rel { Le, Ge, Eq };

struct LinearConstraint {
  Vector a;
  Rel rel;
  double b;  // a'v {<=,>=,==} b
  std::string label;
};

// v'H v + c'v <= d with H stored symmetric; convex tag from H's spectrum.
struct QuadConstraint {
  Matrix H;
  Vector c;
  double d;
  bool convex = true;
  std::string label;
};

// ||A v + b||_2 <= c'v + d
struct SocConstraint {
  Matrix A;
  Vector b;
  Vector c;
  double d;
  std::string label;
};

// sum_j v[vars[j]] F[j] + F0 >= 0 (PSD)
struct PsdConstraint {
  std::vector<int> vars;
  std::vector<Matrix> F;
  Matrix F0;
  std::string label;
};

struct Objective {
  Matrix H;  // may be 0x0 for a linear objective
  Vector c;
  double c0 = 0.0;
  double value(const Vector& v) const {
    double val = c.size() ? c.dot(v) : 0.0;
    if (H.size()) val += v.dot(H * v);
    return val + c0;
  }
};

struct MathProgram {
  std::vector<std::string> var_names;
  std::vector<bool> var_nonneg;
  Objective obj;
  std::vector<LinearConstraint> lin;
  std::vector<QuadConstraint> quad;
  std::vector<SocConstraint> soc;
  std::vector<PsdConstraint> psd;

  int num_vars() const { return int(var_names.size()); }
  int add_var(const std::string& name, bool nonneg);
  int add_vars(const std::string& prefix, int count, bool nonneg);
  int var_index(const std::string& name) const;

  void add_linear(const Vector& a, Rel rel, double b, std::string label = "");
  // H is symmetrized on entry; convexity tag computed from the spectrum.
  void add_quadratic(const Matrix& H, const Vector& c, double d,
                     std::string label = "");
  void add_soc(const Matrix& A, const Vector& b, const Vector& c, double d,
               std::string label = "");

  bool is_convex(double tol = 1e-9) const;
  bool is_linear() const;
  // zero-extend every stored row/objective to the current variable count
  // (builders may declare variables after adding constraints)
  void pad();
  // largest constraint violation at v (checks every constraint class)
  double max_violation(const Vector& v) const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit, Skipped, Failed };
std::string status_name(SolveStatus s);

struct SolutionPoint {
  Vector v;
  double objective = 0.0;
  SolveStatus status = SolveStatus::Failed;
  // solver diagnostics (gap, residuals, iterations, ...)
  std::map<std::string, double> info;
  bool optimal() const { return status == SolveStatus::Optimal; }
};

struct Diagnostic {
  std::string code;
  std::string message;
};

std::vector<Diagnostic> validate(const MathProgram& prog);

// SDPA sparse format (".dat-s"). Precondition: linear objective, only linear
// and PSD constraints. Round-trips byte-identically through parse_sdpa.
std::string emit_sdpa(const MathProgram& prog);
MathProgram parse_sdpa(const std::string& text);

// JSON dump of the full program ("mp-v1"), for debugging.
std::string to_json_mp(const MathProgram& prog);

}  // namespace rlcp
