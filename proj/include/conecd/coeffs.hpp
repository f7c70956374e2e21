#pragma once

// Volume distortion coefficients of the curvature-dimension condition.
//
//   S_k(theta)             = sin(sqrt(k) theta)/(sqrt(k) theta)     k > 0
//                          = 1                                       k = 0
//                          = sinh(sqrt(-k) theta)/(sqrt(-k) theta)   k < 0
//   sigma^{(t)}_{K,N}(theta) = +inf                      if K theta^2 >= N pi^2
//                          = t S_{K/N}(t theta)/S_{K/N}(theta)  otherwise
//   tau^{(t)}_{K,N}(theta)   = t^{1/N} sigma^{(t)}_{K,N-1}(theta)^{1-1/N}

#include <cmath>
#include <numbers>
#include <ostream>

#include "conecd/error.hpp"

namespace conecd {

/// A real number or +infinity. The infinite branch of sigma is kept explicit
/// instead of being folded into an IEEE infinity.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT: implicit on purpose

  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_finite() const { return !infinite_; }

  /// Finite value. Calling this on +inf is a logic error.
  double value() const {
    if (infinite_) throw DomainError("ExtendedReal::value() on +inf");
    return value_;
  }

  /// IEEE view, +inf mapped to std::numeric_limits<double>::infinity().
  double to_double() const { return infinite_ ? HUGE_VAL : value_; }

  friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& x) {
    if (x.infinite_) return os << "+inf";
    return os << x.value_;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

/// x^p for x >= 0 with x^0 = 1 for every x, including +inf, and
/// (+inf)^p = +inf for p > 0.
inline ExtendedReal pow(const ExtendedReal& x, double p) {
  if (p == 0.0) return 1.0;
  if (x.is_infinite()) {
    if (p > 0.0) return ExtendedReal::infinity();
    return 0.0;
  }
  return std::pow(x.value(), p);
}

/// Product of nonnegative extended reals. 0 * inf = +inf: the infinite branch
/// of the coefficient dominates.
inline ExtendedReal operator*(const ExtendedReal& a, const ExtendedReal& b) {
  if (a.is_infinite() || b.is_infinite()) return ExtendedReal::infinity();
  return a.value() * b.value();
}

/// Parameters of one coefficient evaluation.
struct DistortionParams {
  double K = 0.0;      // curvature bound
  double N = 1.0;      // dimension bound, >= 1 (>= 0 for the inner sigma of tau)
  double t = 0.0;      // interpolation fraction in [0,1]
  double theta = 0.0;  // distance >= 0

  void check(double min_dimension = 1.0) const {
    if (!(N >= min_dimension)) throw DomainError("distortion coefficient: N below admissible range");
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("distortion coefficient: t outside [0,1]");
    if (!(theta >= 0.0)) throw DomainError("distortion coefficient: negative theta");
  }
};

/// S_k(theta); returns the removable-singularity limit 1 at theta = 0.
inline double s_fun(double k, double theta) {
  if (theta < 0.0) throw DomainError("s_fun: negative theta");
  if (k == 0.0 || theta == 0.0) return 1.0;
  if (k > 0.0) {
    const double x = std::sqrt(k) * theta;
    return std::sin(x) / x;
  }
  const double x = std::sqrt(-k) * theta;
  return std::sinh(x) / x;
}

namespace detail {

// pi^2 = kPi2Hi + kPi2Lo to about 106 bits.
inline constexpr double kPi2Hi = 9.869604401089358;
inline constexpr double kPi2Lo = 6.265295508739711e-16;

}  // namespace detail

/// True iff sigma^{(t)}_{K,N}(theta) sits on its infinite branch. Both sides
/// of K theta^2 >= N pi^2 are formed in double-double arithmetic, so inputs
/// one ulp away from the boundary land on the correct side.
inline bool sigma_is_infinite(double K, double N, double theta) {
  const double th2 = theta * theta;
  const double th2_err = std::fma(theta, theta, -th2);
  const double lhs = K * th2;
  const double lhs_err = std::fma(K, th2, -lhs) + K * th2_err;
  const double rhs = N * detail::kPi2Hi;
  const double rhs_err = std::fma(N, detail::kPi2Hi, -rhs) + N * detail::kPi2Lo;
  if (lhs != rhs && std::abs(lhs - rhs) > 1e-14 * std::abs(rhs)) return lhs > rhs;
  return (lhs - rhs) + (lhs_err - rhs_err) >= 0.0;
}

/// sigma^{(t)}_{K,N}(theta). Accepts N >= 0 so that tau can call it with N-1.
/// At theta = 0 (finite branch) the value is t.
inline ExtendedReal sigma(const DistortionParams& p) {
  p.check(0.0);
  if (sigma_is_infinite(p.K, p.N, p.theta)) return ExtendedReal::infinity();
  if (p.theta == 0.0 || p.K == 0.0) return p.t;
  // On the finite branch N = 0 forces K < 0; the ratio is then the N -> 0+
  // limit, which decays to 0 for t < 1.
  if (p.N == 0.0) return p.t == 1.0 ? 1.0 : 0.0;
  const double k = p.K / p.N;
  return p.t * s_fun(k, p.t * p.theta) / s_fun(k, p.theta);
}

/// tau^{(t)}_{K,N}(theta) for N >= 1. At N = 1 the exponent 1-1/N vanishes and
/// the result is t regardless of the inner sigma.
inline ExtendedReal tau(const DistortionParams& p) {
  p.check(1.0);
  if (p.N == 1.0) return p.t;
  if (p.K == 0.0) return p.t;
  const ExtendedReal inner = sigma({p.K, p.N - 1.0, p.t, p.theta});
  return ExtendedReal(std::pow(p.t, 1.0 / p.N)) * pow(inner, 1.0 - 1.0 / p.N);
}

}  // namespace conecd
