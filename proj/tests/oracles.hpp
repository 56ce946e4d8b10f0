#pragma once

// Brute-force minimax oracles for reformulation tests: discretize the
// uncertainty set (exact vertices where the dependence is affine, boundary
// grids for the 2-ball), then minimize the max scenario gap by derivative-free
// compass search. Independent of the library's solve path.

#include <rlcp/model.hpp>

#include <cmath>
#include <limits>
#include <vector>

namespace test_oracle {

using rlcp::Matrix;
using rlcp::UncertainLCP;
using rlcp::Vector;

inline std::vector<Vector> discretize(const rlcp::UncertaintySet& s, int grid) {
  using rlcp::SetKind;
  switch (s.kind) {
    case SetKind::BoxInf:
    case SetKind::BoxInfNonneg:
    case SetKind::BallOne:
    case SetKind::BallOneNonneg:
      return s.vertices();
    case SetKind::FiniteScenarios:
      return s.scenarios;
    case SetKind::BallTwo: {
      std::vector<Vector> us;
      if (s.dim == 1) {
        for (int k = 0; k < grid; ++k) {
          Vector u(1);
          u[0] = -1.0 + 2.0 * k / (grid - 1);
          us.push_back(u);
        }
      } else if (s.dim == 2) {
        for (int k = 0; k < grid; ++k) {
          double th = 2.0 * M_PI * k / grid;
          Vector u(2);
          u << std::cos(th), std::sin(th);
          us.push_back(u);
        }
        us.push_back(Vector::Zero(2));
      } else {
        throw rlcp::Error(rlcp::ErrorCode::InvalidArgument,
                          "oracle: 2-ball grid only for L <= 2");
      }
      return us;
    }
    default:
      throw rlcp::Error(rlcp::ErrorCode::InvalidArgument,
                        "oracle: set kind not discretizable");
  }
}

// max over the scenario grid of the gap, +inf when any scenario row fails
inline double scenario_max(const UncertainLCP& p, const std::vector<Vector>& us,
                           const Vector& x) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& u : us) {
    rlcp::ExtReal g = rlcp::gap_value(p.family, x, u, 1e-9);
    if (g.is_inf()) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, g.value());
  }
  // independent q block: closed-form worst case added on top
  if (p.q_extra) {
    const auto& ex = *p.q_extra;
    double extra = 0;
    Vector w(int(ex.qs.size()));
    for (size_t l = 0; l < ex.qs.size(); ++l) w[int(l)] = ex.qs[l].dot(x);
    switch (ex.set.kind) {
      case rlcp::SetKind::BoxInf: extra = w.cwiseAbs().sum(); break;
      case rlcp::SetKind::BoxInfNonneg: extra = w.cwiseMax(0.0).sum(); break;
      case rlcp::SetKind::BallOne: extra = w.cwiseAbs().maxCoeff(); break;
      case rlcp::SetKind::BallOneNonneg:
        extra = std::max(0.0, w.maxCoeff());
        break;
      case rlcp::SetKind::BallTwo: extra = w.norm(); break;
      default: break;
    }
    worst += extra;
  }
  return worst;
}

// derivative-free compass search over x >= 0
inline double grid_minimax(const UncertainLCP& p, int grid = 41) {
  auto us = discretize(p.set, grid);
  const int n = p.n();
  auto F = [&](const Vector& x) { return scenario_max(p, us, x); };

  double best = std::numeric_limits<double>::infinity();
  rlcp::Rng rng(12345);
  std::vector<Vector> starts;
  starts.push_back(Vector::Zero(n));
  starts.push_back(Vector::Ones(n));
  for (int k = 0; k < 30; ++k) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(0.0, 4.0);
    starts.push_back(x);
  }
  for (auto x : starts) {
    double fx = F(x);
    double step = 1.0;
    for (int it = 0; it < 4000 && step > 1e-9; ++it) {
      bool improved = false;
      for (int i = 0; i < n && !improved; ++i) {
        for (double sgn : {1.0, -1.0}) {
          Vector xt = x;
          xt[i] = std::max(0.0, xt[i] + sgn * step);
          double ft = F(xt);
          if (ft < fx - 1e-15) {
            x = xt;
            fx = ft;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    best = std::min(best, fx);
  }
  return best;
}

}  // namespace test_oracle
