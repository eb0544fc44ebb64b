#pragma once

// Accumulative success probability curves P(t) = A(t) / A(t_max).

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "duel/errors.hpp"

namespace duel {

inline constexpr double infinite_horizon = std::numeric_limits<double>::infinity();

struct Knot {
  double t;
  double p;
};

/// Immutable, validated success-probability curve. All parameter checks
/// happen in the factories; eval/inverse never see malformed state.
class SuccessCurve {
 public:
  struct ExponentialSaturation {
    double rate;
  };
  struct Logistic {
    double midpoint;
    double steepness;
  };
  struct LinearRamp {
    double t_ramp;
  };
  struct Tabulated {
    std::vector<Knot> knots;
  };
  using Params = std::variant<ExponentialSaturation, Logistic, LinearRamp, Tabulated>;

  /// P(t) = 1 - exp(-rate t).
  static SuccessCurve exponential_saturation(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate))
      throw validation_error("exponential-saturation rate must be finite and > 0");
    return SuccessCurve(ExponentialSaturation{rate});
  }

  /// P(t) = 1 / (1 + exp(-steepness (t - midpoint))).
  static SuccessCurve logistic(double midpoint, double steepness) {
    if (!std::isfinite(midpoint)) throw validation_error("logistic midpoint must be finite");
    if (!(steepness > 0.0) || !std::isfinite(steepness))
      throw validation_error("logistic steepness must be finite and > 0");
    return SuccessCurve(Logistic{midpoint, steepness});
  }

  /// P(t) = min(t / t_ramp, 1).
  static SuccessCurve linear_ramp(double t_ramp) {
    if (!(t_ramp > 0.0) || !std::isfinite(t_ramp))
      throw validation_error("linear-ramp t_ramp must be finite and > 0");
    return SuccessCurve(LinearRamp{t_ramp});
  }

  /// Piecewise-linear through the knots, constant outside them. Knots must be
  /// strictly increasing in t (t >= 0), nondecreasing in p, and end at p = 1.
  static SuccessCurve tabulated(std::vector<Knot> knots) {
    if (knots.empty()) throw validation_error("tabulated curve needs at least one knot");
    for (std::size_t i = 0; i < knots.size(); ++i) {
      const auto& k = knots[i];
      if (!std::isfinite(k.t) || k.t < 0.0)
        throw validation_error("tabulated knot " + std::to_string(i) + ": t must be finite and >= 0");
      if (!(k.p >= 0.0 && k.p <= 1.0))
        throw validation_error("tabulated knot " + std::to_string(i) + ": p must lie in [0,1]");
      if (i > 0 && !(k.t > knots[i - 1].t))
        throw validation_error("tabulated knot " + std::to_string(i) + ": t not strictly increasing");
      if (i > 0 && k.p < knots[i - 1].p)
        throw validation_error("tabulated knot " + std::to_string(i) + ": p decreases (curve must be monotone)");
    }
    if (knots.back().p != 1.0) throw validation_error("tabulated curve must end at p = 1");
    return SuccessCurve(Tabulated{std::move(knots)});
  }

  const Params& params() const noexcept { return params_; }

  std::string kind() const {
    return std::visit(
        [](const auto& c) -> std::string {
          using C = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<C, ExponentialSaturation>) return "exponential-saturation";
          else if constexpr (std::is_same_v<C, Logistic>) return "logistic";
          else if constexpr (std::is_same_v<C, LinearRamp>) return "linear-ramp";
          else return "tabulated";
        },
        params_);
  }

  /// Time at which P first equals 1, or infinite_horizon.
  double t_max() const {
    return std::visit(
        [](const auto& c) -> double {
          using C = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<C, LinearRamp>) return c.t_ramp;
          else if constexpr (std::is_same_v<C, Tabulated>) {
            auto it = std::find_if(c.knots.begin(), c.knots.end(), [](const Knot& k) { return k.p >= 1.0; });
            return it->t;
          } else return infinite_horizon;
        },
        params_);
  }

  double eval(double t) const {
    if (std::isnan(t) || t < 0.0) throw domain_error("curve evaluated at negative time");
    return std::visit(
        [t](const auto& c) -> double {
          using C = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<C, ExponentialSaturation>) {
            return -std::expm1(-c.rate * t);
          } else if constexpr (std::is_same_v<C, Logistic>) {
            return 1.0 / (1.0 + std::exp(-c.steepness * (t - c.midpoint)));
          } else if constexpr (std::is_same_v<C, LinearRamp>) {
            return std::min(t / c.t_ramp, 1.0);
          } else {
            const auto& k = c.knots;
            if (t <= k.front().t) return k.front().p;
            if (t >= k.back().t) return k.back().p;
            auto hi = std::upper_bound(k.begin(), k.end(), t, [](double x, const Knot& n) { return x < n.t; });
            auto lo = hi - 1;
            double w = (t - lo->t) / (hi->t - lo->t);
            return lo->p + w * (hi->p - lo->p);
          }
        },
        params_);
  }

  double operator()(double t) const { return eval(t); }

  /// Smallest t with P(t) >= p.
  double inverse(double p) const {
    if (std::isnan(p) || p < 0.0 || p > 1.0) throw domain_error("probability outside [0,1]");
    if (eval(0.0) >= p) return 0.0;
    return std::visit(
        [p](const auto& c) -> double {
          using C = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<C, ExponentialSaturation>) {
            if (p >= 1.0) throw unattainable_error("p = 1 is only reached in the limit");
            return -std::log1p(-p) / c.rate;
          } else if constexpr (std::is_same_v<C, Logistic>) {
            if (p >= 1.0) throw unattainable_error("p = 1 is only reached in the limit");
            return c.midpoint + std::log(p / (1.0 - p)) / c.steepness;
          } else if constexpr (std::is_same_v<C, LinearRamp>) {
            return p * c.t_ramp;
          } else {
            const auto& k = c.knots;
            auto hi = std::find_if(k.begin(), k.end(), [p](const Knot& n) { return n.p >= p; });
            // eval(0) < p rules out hi == begin() landing before the curve rises.
            auto lo = hi - 1;
            double w = (p - lo->p) / (hi->p - lo->p);
            return lo->t + w * (hi->t - lo->t);
          }
        },
        params_);
  }

 private:
  explicit SuccessCurve(Params p) : params_(std::move(p)) {}
  Params params_;
};

}  // namespace duel
