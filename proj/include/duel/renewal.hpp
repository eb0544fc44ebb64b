#pragma once

// Renewal point processes of decision epochs S_0 < S_1 < ... with i.i.d.
// increments after a (possibly random) first epoch.

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "duel/errors.hpp"
#include "duel/rng.hpp"

namespace duel {

class Distribution {
 public:
  struct Deterministic {
    double value;
  };
  struct Exponential {
    double rate;
  };
  using Law = std::variant<Deterministic, Exponential>;

  static Distribution deterministic(double value) {
    if (!(value >= 0.0) || !std::isfinite(value))
      throw validation_error("deterministic value must be finite and >= 0");
    return Distribution(Deterministic{value});
  }

  static Distribution exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw validation_error("exponential rate must be finite and > 0");
    return Distribution(Exponential{rate});
  }

  const Law& law() const noexcept { return law_; }
  bool is_deterministic() const noexcept { return std::holds_alternative<Deterministic>(law_); }
  std::string kind() const { return is_deterministic() ? "deterministic" : "exponential"; }

  double mean() const noexcept {
    if (auto d = std::get_if<Deterministic>(&law_)) return d->value;
    return 1.0 / std::get<Exponential>(law_).rate;
  }

  double sample(Stream& s) const {
    if (auto d = std::get_if<Deterministic>(&law_)) return d->value;
    return s.exponential(std::get<Exponential>(law_).rate);
  }

  friend bool operator==(const Distribution& a, const Distribution& b) {
    if (a.law_.index() != b.law_.index()) return false;
    return a.is_deterministic() ? std::get<Deterministic>(a.law_).value == std::get<Deterministic>(b.law_).value
                                : std::get<Exponential>(a.law_).rate == std::get<Exponential>(b.law_).rate;
  }

 private:
  explicit Distribution(Law l) : law_(l) {}
  Law law_;
};

struct RenewalSpec {
  Distribution initial_delay = Distribution::deterministic(0.0);
  Distribution cycle = Distribution::deterministic(1.0);

  friend bool operator==(const RenewalSpec&, const RenewalSpec&) = default;
};

/// Epochs up to and including the first one at or past the horizon.
struct EpochPath {
  std::vector<double> times;
  double horizon = 0.0;
};

inline double mean_cycle(const RenewalSpec& spec) noexcept { return spec.cycle.mean(); }

inline void check_advances(const RenewalSpec& spec) {
  if (spec.cycle.is_deterministic() && spec.cycle.mean() == 0.0)
    throw degenerate_process_error("cycle is deterministic(0): epochs never advance");
}

/// Samples S_0, S_1, ... until the first epoch >= horizon is included. The
/// path is a pure function of (spec, horizon, stream state).
inline EpochPath sample_path(const RenewalSpec& spec, double horizon, Stream& stream) {
  check_advances(spec);
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw domain_error("horizon must be finite and >= 0");
  EpochPath path;
  path.horizon = horizon;
  double t = spec.initial_delay.sample(stream);
  path.times.push_back(t);
  while (t < horizon) {
    double step = spec.cycle.sample(stream);
    // An exponential draw can round to zero; it would break strict ordering.
    if (step <= 0.0) continue;
    t += step;
    path.times.push_back(t);
  }
  return path;
}

}  // namespace duel
