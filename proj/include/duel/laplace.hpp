#pragma once

// Laplace-Carson transform pair
//
//   F(u, v) = u v \int\int exp(-u p - v q) f(p, q) dp dq
//
// and its numerical inverse by nested Gaver-Stehfest summation. Since the
// Laplace image is F / (u v), the Stehfest sum collapses to
//
//   f(p, q) ~ sum_k sum_l (V_k / k) (V_l / l) F(k ln2 / p, l ln2 / q).
//
// The weights V_k alternate in sign and grow to ~1e8 at order 14, so a nested
// sum cancels about 16 digits. Everything here is templated on the working
// type; the default is quad precision.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/float128.hpp>

#include "duel/errors.hpp"

namespace duel {

using quad = boost::multiprecision::float128;

inline constexpr int default_inversion_order = 14;
inline constexpr double inversion_warning_threshold = 1e-3;

inline void check_order(int order) {
  if (order < 8 || order > 20 || order % 2 != 0)
    throw domain_error("inversion order must be an even integer in [8, 20], got " + std::to_string(order));
}

/// Stehfest weights V_1..V_N.
template <class Real>
std::vector<Real> stehfest_weights(int order) {
  const int half = order / 2;
  auto fact = [](int n) {
    Real f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  std::vector<Real> v(order);
  for (int k = 1; k <= order; ++k) {
    Real s = 0;
    for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
      Real jp = 1;
      for (int i = 0; i < half; ++i) jp *= j;
      s += jp * fact(2 * j) / (fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k));
    }
    v[k - 1] = ((k + half) % 2 == 0) ? s : -s;
  }
  return v;
}

/// Weights for the Carson form, V_k / k.
template <class Real>
const std::vector<Real>& carson_weights(int order) {
  static thread_local std::map<int, std::vector<Real>> cache;
  auto it = cache.find(order);
  if (it == cache.end()) {
    auto v = stehfest_weights<Real>(order);
    for (int k = 1; k <= order; ++k) v[k - 1] /= k;
    it = cache.emplace(order, std::move(v)).first;
  }
  return it->second;
}

struct InversionResult {
  double value = 0.0;
  /// Same inversion at order - 2.
  double lower_order_value = 0.0;
  /// |value - lower_order_value| / max(|value|, 1e-6).
  double disagreement = 0.0;
  int order = default_inversion_order;
  bool warning() const noexcept { return disagreement > inversion_warning_threshold; }
};

inline double relative_disagreement(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-6); }

namespace detail {

template <class Real, class F>
Real stehfest_1d(F& f, double p, int order) {
  const auto& w = carson_weights<Real>(order);
  const Real a = boost::math::constants::ln_two<Real>() / Real(p);
  Real s = 0;
  for (int k = 1; k <= order; ++k) s += w[k - 1] * Real(f(a * k));
  return s;
}

template <class Real, class F>
Real stehfest_2d(F& f, double p, double q, int order) {
  const auto& w = carson_weights<Real>(order);
  const Real a = boost::math::constants::ln_two<Real>() / Real(p);
  const Real b = boost::math::constants::ln_two<Real>() / Real(q);
  Real s = 0;
  for (int k = 1; k <= order; ++k) {
    Real inner = 0;
    const Real u = a * k;
    for (int l = 1; l <= order; ++l) inner += w[l - 1] * Real(f(u, b * l));
    s += w[k - 1] * inner;
  }
  return s;
}

}  // namespace detail

/// Inverse of a univariate Laplace-Carson image F(u) at p > 0.
template <class Real = quad, class F>
InversionResult lc_inverse_1d(F&& f, double p, int order = default_inversion_order) {
  check_order(order);
  if (!(p > 0.0) || !std::isfinite(p)) throw domain_error("inversion point must be finite and > 0");
  InversionResult r;
  r.order = order;
  r.value = static_cast<double>(detail::stehfest_1d<Real>(f, p, order));
  r.lower_order_value = static_cast<double>(detail::stehfest_1d<Real>(f, p, order - 2));
  r.disagreement = relative_disagreement(r.value, r.lower_order_value);
  return r;
}

/// Inverse of a bivariate Laplace-Carson image F(u, v) at (p, q), p, q > 0.
template <class Real = quad, class F>
InversionResult lc_inverse(F&& f, double p, double q, int order = default_inversion_order) {
  check_order(order);
  if (!(p > 0.0) || !(q > 0.0) || !std::isfinite(p) || !std::isfinite(q))
    throw domain_error("inversion point must be finite and > 0");
  InversionResult r;
  r.order = order;
  r.value = static_cast<double>(detail::stehfest_2d<Real>(f, p, q, order));
  r.lower_order_value = static_cast<double>(detail::stehfest_2d<Real>(f, p, q, order - 2));
  r.disagreement = relative_disagreement(r.value, r.lower_order_value);
  return r;
}

/// Single-order bivariate inverse without the diagnostic pass.
template <class Real = quad, class F>
double lc_inverse_value(F&& f, double p, double q, int order) {
  return static_cast<double>(detail::stehfest_2d<Real>(f, p, q, order));
}

template <class Real = quad, class F>
double lc_inverse_1d_value(F&& f, double p, int order) {
  return static_cast<double>(detail::stehfest_1d<Real>(f, p, order));
}

// ---------------------------------------------------------------------------
// Forward transform by quadrature (test oracle for the inverter)

struct QuadratureOptions {
  /// Requested relative tolerance of each one-dimensional integral.
  double tolerance = 1e-30;
  /// Accepted error estimate, relative to the L1 norm of the integrand.
  double acceptance = 1e-24;
  /// Points where f is not smooth; integration is split there.
  std::vector<double> breakpoints;
};

/// u \int_0^inf exp(-u p) f(p) dp, split at the breakpoints; adaptive
/// Gauss-Kronrod on the finite pieces and exp-sinh on the tail.
template <class Real = quad, class F>
Real lc_forward_1d(F&& f, Real u, const QuadratureOptions& opt = {}) {
  using std::exp;
  if (!(u > 0)) throw domain_error("Laplace-Carson variable must have positive real part");
  std::vector<double> cuts;
  for (double b : opt.breakpoints)
    if (b > 0.0 && std::isfinite(b)) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto integrand = [&](Real p) { return u * exp(-u * p) * Real(f(p)); };
  Real total = 0, err_total = 0, l1_total = 0;
  Real lo = 0;
  for (double c : cuts) {
    Real err = 0, l1 = 0;
    total += boost::math::quadrature::gauss_kronrod<Real, 61>::integrate(integrand, lo, Real(c), 15,
                                                                        Real(opt.tolerance), &err, &l1);
    err_total += err;
    l1_total += l1;
    lo = Real(c);
  }
  boost::math::quadrature::exp_sinh<Real> es;
  Real err = 0, l1 = 0;
  // exp_sinh wants the lower limit at 0 for best node placement; shift.
  auto shifted = [&](Real s) { return integrand(s + lo); };
  total += es.integrate(shifted, Real(opt.tolerance), &err, &l1);
  err_total += err;
  l1_total += l1;
  if (err_total > Real(opt.acceptance) * std::max(Real(1), l1_total))
    throw accuracy_error("forward Laplace-Carson quadrature did not converge", static_cast<double>(total));
  return total;
}

/// uv \int\int exp(-up - vq) f(p, q) dp dq by nested one-dimensional
/// quadrature. Expensive; use lc_forward_separable when f = f1(p) f2(q).
template <class Real = quad, class F>
Real lc_forward(F&& f, Real u, Real v, const QuadratureOptions& opt_p = {}, const QuadratureOptions& opt_q = {}) {
  auto outer = [&](Real p) {
    return lc_forward_1d<Real>([&](Real q) { return Real(f(p, q)); }, v, opt_q);
  };
  return lc_forward_1d<Real>(outer, u, opt_p);
}

/// Forward transform of a product f1(p) f2(q), memoizing each factor by its
/// argument. The inverter probes the same few u and v values repeatedly.
template <class Real, class F1, class F2>
class SeparableLaplaceCarson {
 public:
  SeparableLaplaceCarson(F1 f1, F2 f2, QuadratureOptions o1 = {}, QuadratureOptions o2 = {})
      : f1_(std::move(f1)), f2_(std::move(f2)), o1_(std::move(o1)), o2_(std::move(o2)) {}

  Real operator()(Real u, Real v) {
    return lookup(c1_, u, [&] { return lc_forward_1d<Real>(f1_, u, o1_); }) *
           lookup(c2_, v, [&] { return lc_forward_1d<Real>(f2_, v, o2_); });
  }

 private:
  template <class G>
  static Real lookup(std::map<Real, Real>& c, Real key, G compute) {
    auto it = c.find(key);
    if (it == c.end()) it = c.emplace(key, compute()).first;
    return it->second;
  }

  F1 f1_;
  F2 f2_;
  QuadratureOptions o1_, o2_;
  std::map<Real, Real> c1_, c2_;
};

template <class Real = quad, class F1, class F2>
SeparableLaplaceCarson<Real, F1, F2> lc_forward_separable(F1 f1, F2 f2, QuadratureOptions o1 = {},
                                                          QuadratureOptions o2 = {}) {
  return {std::move(f1), std::move(f2), std::move(o1), std::move(o2)};
}

}  // namespace duel
