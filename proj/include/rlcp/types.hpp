#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace rlcp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorCode {
  DimensionMismatch,
  InvalidArgument,
  RouteRefused,
  WrongRoute,
  UnsupportedFeature,
  Unbounded,
  ParseError,
  SolverFailure,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

// Extended real: a finite double or +infinity, never a sentinel magnitude.
class ExtReal {
 public:
  ExtReal() : inf_(false), v_(0.0) {}
  ExtReal(double v) : inf_(false), v_(v) {}  // NOLINT: implicit by design
  static ExtReal infinity() {
    ExtReal r;
    r.inf_ = true;
    return r;
  }
  bool is_inf() const { return inf_; }
  bool is_finite() const { return !inf_; }
  // Value as a double, +inf mapped to the IEEE infinity (for printing/compares).
  double as_double() const {
    return inf_ ? std::numeric_limits<double>::infinity() : v_;
  }
  double value() const {
    require(!inf_, ErrorCode::InvalidArgument, "ExtReal: value() on +inf");
    return v_;
  }
  friend bool operator<(const ExtReal& a, const ExtReal& b) {
    return a.as_double() < b.as_double();
  }
  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    return a.inf_ == b.inf_ && (a.inf_ || a.v_ == b.v_);
  }
  static ExtReal max(const ExtReal& a, const ExtReal& b) { return a < b ? b : a; }

 private:
  bool inf_;
  double v_;
};

// Deterministic RNG: splitmix64-seeded xoshiro-style generator with
// platform-independent uniform/normal draws (std distributions are not
// reproducible across standard library implementations).
class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
    for (int i = 0; i < 4; ++i) {
      z += 0x9e3779b97f4a7c15ULL;
      uint64_t x = z;
      x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
      x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
      s_[i] = x ^ (x >> 31);
    }
  }
  uint64_t next_u64() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }
  // uniform in [0, 1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    // Box-Muller; discard the second draw for simplicity.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  int uniform_int(int n) { return int(next_u64() % uint64_t(n)); }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

}  // namespace rlcp
