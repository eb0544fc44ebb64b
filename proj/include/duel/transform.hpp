#pragma once

// Analytic route: the joint functional
//
//   Phi(theta0, theta1, vartheta0, vartheta1)
//     = E[ exp(-theta0 S_{mu-1} - theta1 S_mu - vartheta0 T_{nu-1} - vartheta1 T_nu) 1{S_mu <= T_nu} ]
//
// evaluated from closed-form Laplace-Carson images and numerical inversion,
// and the exit-time moments obtained from it by differentiation.
//
// For one player with first epoch S_0 ~ D and cycles ~ C, threshold p and
// overshoot O = S_mu - p, the Carson image of
//
//   H(p, z) = E[ exp(-x0 S_{mu-1} - x1 S_mu) 1{O <= z} ]
//
// in (p -> u, z -> w) is
//
//   u / (u - w) * { D(x1 + w) - D(x1 + u)
//                   + D(x0 + x1 + u) [C(x1 + w) - C(x1 + u)] / (1 - C(x0 + x1 + u)) }
//
// where D(.) and C(.) are the Laplace-Stieltjes transforms E[exp(-x .)].
// Summing the geometric series over the epoch index is where the
// 1 / (1 - E[Gamma_2(sigma)]) factor comes from. The duel couples the players
// only through 1{O_A <= V - U + O_B}, which is integrated against B's
// overshoot density.

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "duel/engine.hpp"
#include "duel/errors.hpp"
#include "duel/laplace.hpp"
#include "duel/renewal.hpp"

namespace duel {

// ---------------------------------------------------------------------------
// Building blocks

/// d^k/dx^k E[exp(-x X)] for k = 0, 1, 2. Valid for x > -rate on the
/// exponential law.
template <class Real>
Real lst(const Distribution& d, Real x, int derivative = 0) {
  using std::exp;
  if (auto det = std::get_if<Distribution::Deterministic>(&d.law())) {
    const Real c = det->value;
    const Real e = exp(-c * x);
    return derivative == 0 ? e : derivative == 1 ? Real(-c * e) : Real(c * c * e);
  }
  const Real lam = std::get<Distribution::Exponential>(d.law()).rate;
  const Real den = lam + x;
  return derivative == 0 ? Real(lam / den) : derivative == 1 ? Real(-lam / (den * den)) : Real(2 * lam / (den * den * den));
}

/// E[exp(-x X)] for x >= 0.
inline double expected_exponential(const Distribution& d, double x) {
  if (!(x >= 0.0)) throw domain_error("expected_exponential needs x >= 0");
  return lst<double>(d, x);
}

/// The exponential kernels gamma(x, t) = exp(-x t) specialised to the
/// transform variables: lower-case for player B, upper-case for player A.
template <class Real>
struct GammaTerms {
  Real theta0 = 0, theta1 = 0, vartheta0 = 0, vartheta1 = 0;
  Real u = 0, v = 0;

  static Real gamma(Real x, Real t) {
    using std::exp;
    return exp(-x * t);
  }
  Real gamma0(Real t) const { return gamma(v, t); }
  Real gamma1(Real t) const { return gamma(vartheta0 + v, t); }
  Real gamma2(Real t) const { return gamma(vartheta0 + vartheta1 + v, t); }
  Real Gamma0(Real t) const { return gamma(u, t); }
  Real Gamma1(Real t) const { return gamma(theta0 + u, t); }
  Real Gamma2(Real t) const { return gamma(theta0 + theta1 + u, t); }
  Real GammaProd(Real t) const { return gamma2(t) * Gamma2(t); }
};

// ---------------------------------------------------------------------------
// One player's exit law

/// Carson image of H(p, z) for a process whose exit weights are
/// exp(-x0 pre - x1 exit). See the header comment for the formula.
template <class Real = quad>
class ExitTransform {
 public:
  ExitTransform(Distribution delay, Distribution cycle, double x0, double x1)
      : delay_(delay), cycle_(cycle), x0_(x0), x1_(x1) {}

  Real operator()(Real u, Real w) const {
    using std::abs;
    const Real a = x0_ + x1_ + u;
    const Real c = lst(delay_, a) / (1 - lst(cycle_, a));
    const Real diff = u - w;
    if (abs(diff) > Real(1e-10) * std::max(abs(u), abs(w))) {
      const Real bw = lst(delay_, x1_ + w) + c * lst(cycle_, x1_ + w);
      const Real bu = lst(delay_, x1_ + u) + c * lst(cycle_, x1_ + u);
      return u * (bw - bu) / diff;
    }
    // u ~ w: the bracket vanishes; second-order Taylor in (w - u).
    const Real b1 = lst(delay_, x1_ + u, 1) + c * lst(cycle_, x1_ + u, 1);
    const Real b2 = lst(delay_, x1_ + u, 2) + c * lst(cycle_, x1_ + u, 2);
    return -u * (b1 + b2 * (w - u) / 2);
  }

 private:
  Distribution delay_, cycle_;
  Real x0_, x1_;
};

/// Law of (pre-exit, exit) at a threshold, with weights exp(-x0 pre - x1 exit).
/// Either a single atom (deterministic laws, or a first epoch already past
/// the threshold) or a continuous overshoot handled through ExitTransform.
/// A deterministic first epoch d below the threshold is factored out by the
/// shift rule: the remaining process starts at 0 with threshold p - d.
class ExitLaw {
 public:
  ExitLaw(const RenewalSpec& spec, double threshold, double x0, double x1)
      : threshold_(threshold), transform_(Distribution::deterministic(0.0), spec.cycle, x0, x1) {
    check_advances(spec);
    const auto& delay = spec.initial_delay;
    if (delay.is_deterministic()) {
      const double d = delay.mean();
      if (d >= threshold) {
        atomic_ = true;
        atom_exit_ = d;
        atom_pre_ = 0.0;
      } else if (spec.cycle.is_deterministic()) {
        // Same accumulation as sample_path so both routes agree bit for bit.
        const double c = spec.cycle.mean();
        double t = d, pre = 0.0;
        while (t < threshold) {
          pre = t;
          t += c;
        }
        atomic_ = true;
        atom_exit_ = t;
        atom_pre_ = pre;
      } else {
        factor_ = std::exp(-(x0 + x1) * d);
        reduced_threshold_ = threshold - d;
      }
    } else {
      if (!(threshold > 0.0))
        throw analytic_unavailable_error("random first epoch with a zero threshold has no transform representation");
      transform_ = ExitTransform<quad>(delay, spec.cycle, x0, x1);
      reduced_threshold_ = threshold;
    }
    if (atomic_) atom_weight_ = std::exp(-x0 * atom_pre_ - x1 * atom_exit_);
  }

  bool atomic() const noexcept { return atomic_; }
  double threshold() const noexcept { return threshold_; }
  double atom_exit() const noexcept { return atom_exit_; }
  double atom_pre() const noexcept { return atom_pre_; }
  double atom_weight() const noexcept { return atom_weight_; }

  /// E[weight 1{overshoot <= z}], continuous case only.
  double cdf(double z, int order) const {
    if (z <= 0.0) return 0.0;
    if (!std::isfinite(z)) return total(order);
    return factor_ * lc_inverse_value(transform_, reduced_threshold_, z, order);
  }

  /// d/dz of cdf.
  double density(double z, int order) const {
    if (z <= 0.0) return 0.0;
    auto f = [this](quad u, quad w) { return w * transform_(u, w); };
    return factor_ * lc_inverse_value(f, reduced_threshold_, z, order);
  }

  /// E[weight], continuous case only.
  double total(int order) const {
    auto f = [this](quad u) { return transform_(u, quad(0)); };
    return factor_ * lc_inverse_1d_value(f, reduced_threshold_, order);
  }

 private:
  double threshold_;
  bool atomic_ = false;
  double atom_exit_ = 0.0, atom_pre_ = 0.0, atom_weight_ = 1.0;
  double factor_ = 1.0;
  double reduced_threshold_ = 0.0;
  ExitTransform<quad> transform_;
};

// ---------------------------------------------------------------------------
// Joint functional

struct PhiResult {
  double value = 0.0;
  double lower_order_value = 0.0;
  double disagreement = 0.0;
  int order = default_inversion_order;
  bool warning() const noexcept { return disagreement > inversion_warning_threshold; }
};

namespace detail {

inline void check_analytic_support(const DuelScenario& sc, double threshold_a, double threshold_b) {
  sc.validate();
  // S_mu >= U and T_nu >= V with monotone curves: the trace condition holds
  // everywhere as soon as it holds at (U, V).
  if (sc.condition_active() && sc.a.curve->eval(threshold_a) + sc.b.curve->eval(threshold_b) < 1.0)
    throw analytic_unavailable_error(
        "trace condition P_a(S_mu) + P_b(T_nu) >= 1 is not implied by the thresholds; use the Monte Carlo route");
}

inline double phi_at_order(const ExitLaw& a, const ExitLaw& b, int order) {
  const double U = a.threshold(), V = b.threshold();
  if (a.atomic() && b.atomic()) return a.atom_exit() <= b.atom_exit() ? a.atom_weight() * b.atom_weight() : 0.0;
  if (b.atomic()) return b.atom_weight() * a.cdf(b.atom_exit() - U, order);
  if (a.atomic()) {
    const double tot = b.total(order);
    const double below = a.atom_exit() > V ? b.cdf(a.atom_exit() - V, order) : 0.0;
    return a.atom_weight() * (tot - below);
  }
  const double z0 = std::max(0.0, U - V);
  auto integrand = [&](double s) {
    const double z = z0 + s;
    const double d = b.density(z, order);
    return d == 0.0 ? 0.0 : a.cdf(V - U + z, order) * d;
  };
  boost::math::quadrature::exp_sinh<double> es;
  double err = 0.0, l1 = 0.0;
  double v = es.integrate(integrand, 1e-10, &err, &l1);
  if (err > 1e-6 * std::max(1.0, l1)) throw accuracy_error("overshoot coupling integral did not converge", v);
  return v;
}

}  // namespace detail

/// Phi at the given transform arguments, with U = V = t* unless the scenario
/// sets its own thresholds. The result carries the same evaluation at
/// order - 2 as an accuracy diagnostic.
inline PhiResult phi_functional(const DuelScenario& sc, const TransformArgs& x, double t_star,
                                int order = default_inversion_order) {
  check_order(order);
  const double U = sc.threshold_a.value_or(t_star), V = sc.threshold_b.value_or(t_star);
  detail::check_analytic_support(sc, U, V);
  ExitLaw a(sc.a.renewal, U, x.theta0, x.theta1);
  ExitLaw b(sc.b.renewal, V, x.vartheta0, x.vartheta1);
  PhiResult r;
  r.order = order;
  r.value = detail::phi_at_order(a, b, order);
  if (a.atomic() && b.atomic()) {
    r.lower_order_value = r.value;
  } else {
    r.lower_order_value = detail::phi_at_order(a, b, order - 2);
    r.disagreement = relative_disagreement(r.value, r.lower_order_value);
  }
  return r;
}

// ---------------------------------------------------------------------------
// The closed form exactly as printed, kept as a diagnostic:
//
//   Phi = LC^{-1}( E[(1 - gamma0(tau))(1 - Gamma0(sigma))
//                    / (gamma1(tau)(1 - gamma2(tau)) Gamma1(sigma)(1 - Gamma(sigma)))] Gamma(t*) )(t*, t*)
//
// The expectation factorizes over the independent cycle laws. It ignores the
// first epochs and, for exponential cycles, diverges once u or v exceeds the
// cycle rate, which every Stehfest node set at realistic t* does.

namespace detail {

/// (1 - exp(-a t)) / (1 - exp(-b t)), with its limit a / b as t -> 0.
inline quad one_minus_ratio(quad a, quad b, quad t) {
  using boost::multiprecision::expm1;
  const quad num = -expm1(-a * t), den = -expm1(-b * t);
  return den == 0 ? a / b : num / den;
}

/// E[exp(growth X) rest(X)] with rest bounded; the growth factor is folded
/// into the exponential density so the integrand never overflows.
template <class F>
quad expect_over(const Distribution& d, F rest, quad growth, const char* who) {
  using std::exp;
  if (d.is_deterministic()) {
    const quad c = d.mean();
    return exp(growth * c) * rest(c);
  }
  const quad lam = std::get<Distribution::Exponential>(d.law()).rate;
  if (!(growth < lam))
    throw analytic_unavailable_error(std::string("printed form: expectation over ") + who +
                                     " diverges (integrand grows faster than the exponential density decays)");
  boost::math::quadrature::exp_sinh<quad> es;
  quad err = 0, l1 = 0;
  return es.integrate([&](quad t) { return lam * exp(-(lam - growth) * t) * rest(t); }, quad(1e-28), &err, &l1);
}

}  // namespace detail

inline InversionResult phi_printed(const DuelScenario& sc, const TransformArgs& x, double t_star,
                                   int order = default_inversion_order) {
  check_order(order);
  if (!(t_star > 0.0)) throw domain_error("printed form needs t* > 0");
  const auto& sigma = sc.a.renewal.cycle;
  const auto& tau = sc.b.renewal.cycle;
  auto image = [&](quad u, quad v) {
    GammaTerms<quad> g{x.theta0, x.theta1, x.vartheta0, x.vartheta1, u, v};
    // 1 / gamma1 and 1 / Gamma1 are the growth factors; the rest is bounded.
    auto tau_rest = [&](quad t) { return detail::one_minus_ratio(v, g.vartheta0 + g.vartheta1 + v, t); };
    auto sigma_rest = [&](quad s) {
      return detail::one_minus_ratio(u, g.theta0 + g.theta1 + u + g.vartheta0 + g.vartheta1 + v, s);
    };
    const quad et = detail::expect_over(tau, tau_rest, g.vartheta0 + v, "tau");
    const quad es = detail::expect_over(sigma, sigma_rest, g.theta0 + u, "sigma");
    return et * es * g.GammaProd(quad(t_star));
  };
  return lc_inverse(image, t_star, t_star, order);
}

// ---------------------------------------------------------------------------
// Moments by differentiation

struct MomentOptions {
  /// Finite-difference step in 1/time; 0 picks 0.02 / max(1, t*).
  double h = 0.0;
  int order = default_inversion_order;
  /// Relative disagreement allowed between the h and h/2 Richardson values.
  double richardson_tolerance = 1e-3;
};

struct DerivativeEstimate {
  double value = 0.0;
  /// Richardson values at h and h/2.
  double coarse = 0.0, fine = 0.0;
  double relative_change() const { return std::abs(fine - coarse) / std::max(std::abs(fine), 1e-300); }
};

/// -dPhi/dx at x = 0 along one argument, from one-sided differences with two
/// levels of Richardson extrapolation.
template <class Eval>
DerivativeEstimate minus_derivative_at_zero(Eval phi_along, double phi0, double h) {
  auto d1 = [&](double s) { return (phi0 - phi_along(s)) / s; };
  const double dh = d1(h), dh2 = d1(h / 2), dh4 = d1(h / 4);
  DerivativeEstimate e;
  e.coarse = 2 * dh2 - dh;
  e.fine = 2 * dh4 - dh2;
  e.value = e.fine + (e.fine - e.coarse) / 3;
  return e;
}

/// Analytic decision report. Headline moments are conditional on the trace
/// event (derivatives normalized by Phi at zero); the raw derivatives are
/// kept in `restricted`.
inline DecisionReport moments(const DuelScenario& sc, double t_star, const MomentOptions& opt = {}) {
  const int order = opt.order;
  const double h = opt.h > 0.0 ? opt.h : 0.02 / std::max(1.0, t_star);
  DuelScenario s = sc;
  s.t_star_override = t_star;
  const Thresholds th{t_star, sc.threshold_a.value_or(t_star), sc.threshold_b.value_or(t_star)};

  DecisionReport r;
  r.mode = Mode::analytic;
  fill_header(r, s, th);

  const PhiResult phi0 = phi_functional(s, {}, t_star, order);
  // Twelve independent evaluations: four directions at h, h/2, h/4.
  const double steps[3] = {h, h / 2, h / 4};
  std::vector<std::future<PhiResult>> jobs;
  for (int dir = 0; dir < 4; ++dir)
    for (double step : steps) {
      TransformArgs x;
      (dir == 0 ? x.theta1 : dir == 1 ? x.theta0 : dir == 2 ? x.vartheta1 : x.vartheta0) = step;
      jobs.push_back(std::async(std::launch::async, [&s, x, t_star, order] { return phi_functional(s, x, t_star, order); }));
    }
  std::vector<PhiResult> values;
  for (auto& j : jobs) values.push_back(j.get());
  double worst_disagreement = phi0.disagreement;
  for (const auto& v : values) worst_disagreement = std::max(worst_disagreement, v.disagreement);

  const char* names[] = {"E[S_mu]", "E[S_mu-1]", "E[T_nu]", "E[T_nu-1]"};
  double raw[4], cond[4];
  double worst_change = 0.0;
  for (int dir = 0; dir < 4; ++dir) {
    auto along = [&](double step) {
      for (int k = 0; k < 3; ++k)
        if (step == steps[k]) return values[3 * dir + k].value;
      throw std::logic_error("unexpected finite-difference step");
    };
    auto d = minus_derivative_at_zero(along, phi0.value, h);
    if (d.relative_change() > opt.richardson_tolerance && std::abs(d.fine) > 1e-12)
      throw accuracy_error(std::string("derivative for ") + names[dir] + " unstable under h -> h/2 (relative change " +
                               std::to_string(d.relative_change()) + ")",
                           d.value);
    if (std::abs(d.fine) > 1e-12) worst_change = std::max(worst_change, d.relative_change());
    raw[dir] = d.value;
    cond[dir] = phi0.value > 0.0 ? d.value / phi0.value : std::numeric_limits<double>::quiet_NaN();
  }

  using Q = Quantity;
  r.moments = {Q::exact(cond[0]), Q::exact(cond[1]), Q::exact(cond[2]), Q::exact(cond[3])};
  r.conditional = r.moments;
  r.restricted = ExitMoments{Q::exact(raw[0]), Q::exact(raw[1]), Q::exact(raw[2]), Q::exact(raw[3])};
  r.win_prob_a = Q::exact(phi0.value);
  r.confined_prob = Q::exact(phi0.value);
  r.inversion_disagreement = worst_disagreement;
  r.richardson_change = worst_change;
  if (worst_disagreement > inversion_warning_threshold)
    r.warnings.push_back("inversion orders " + std::to_string(order) + " and " + std::to_string(order - 2) +
                         " disagree by " + std::to_string(worst_disagreement) + " (relative)");
  if (!(phi0.value > 0.0)) {
    r.warnings.push_back("trace event has probability 0; conditional moments undefined");
  } else {
    fill_iteration_counts(r);
  }
  try {
    r.printed_phi = phi_printed(s, {}, t_star, order).value;
  } catch (const analytic_unavailable_error& e) {
    r.warnings.push_back(e.what());
  } catch (const domain_error& e) {
    r.warnings.push_back(std::string("printed form: ") + e.what());
  }
  return r;
}

}  // namespace duel
