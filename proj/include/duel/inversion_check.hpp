#pragma once

// Round trip of the Laplace-Carson pair on three closed-form originals:
// a constant, a separable exponential and an indicator. Used by the
// check-inversion command.

#include <cmath>
#include <string>
#include <vector>

#include "duel/laplace.hpp"

namespace duel {

struct RoundTripCase {
  std::string name;
  double max_relative_error = 0.0;
  double worst_p = 0.0, worst_q = 0.0;
  int points = 0;
};

/// Grid {0.25, 0.5, 1}^2; originals exp(-p - q), 1{p < 10} 1{q < 10} and 1.
/// Forward transforms come from quadrature, not from the known images.
inline std::vector<RoundTripCase> inversion_round_trip(int order = default_inversion_order) {
  check_order(order);
  const double grid[] = {0.25, 0.5, 1.0};
  auto run = [&](std::string name, auto forward, auto exact) {
    RoundTripCase c;
    c.name = std::move(name);
    for (double p : grid)
      for (double q : grid) {
        const double got = lc_inverse_value(forward, p, q, order);
        const double want = exact(p, q);
        const double err = std::abs(got - want) / std::abs(want);
        if (err >= c.max_relative_error) {
          c.max_relative_error = err;
          c.worst_p = p;
          c.worst_q = q;
        }
        ++c.points;
      }
    return c;
  };

  std::vector<RoundTripCase> out;
  {
    auto one = [](quad) { return quad(1); };
    auto f = lc_forward_separable<quad>(one, one);
    out.push_back(run("constant", [&](quad u, quad v) { return f(u, v); }, [](double, double) { return 1.0; }));
  }
  {
    auto e = [](quad x) { return exp(-x); };
    auto f = lc_forward_separable<quad>(e, e);
    out.push_back(run("separable exponential", [&](quad u, quad v) { return f(u, v); },
                      [](double p, double q) { return std::exp(-p - q); }));
  }
  {
    auto step = [](quad x) { return x < 10 ? quad(1) : quad(0); };
    QuadratureOptions o;
    o.breakpoints = {10.0};
    auto f = lc_forward_separable<quad>(step, step, o, o);
    out.push_back(run("indicator", [&](quad u, quad v) { return f(u, v); }, [](double, double) { return 1.0; }));
  }
  return out;
}

}  // namespace duel
