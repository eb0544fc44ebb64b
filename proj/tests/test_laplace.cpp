#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "duel/inversion_check.hpp"
#include "duel/laplace.hpp"

using duel::quad;

TEST(Stehfest, WeightsSumToZero) {
  for (int n = 8; n <= 20; n += 2) {
    auto v = duel::stehfest_weights<quad>(n);
    quad s = std::accumulate(v.begin(), v.end(), quad(0));
    EXPECT_LT(static_cast<double>(abs(s)), 1e-20) << "order " << n;
  }
}

TEST(Stehfest, KnownLowOrderWeights) {
  auto v = duel::stehfest_weights<double>(8);
  const double want[] = {-1.0 / 3, 145.0 / 3, -906, 16394.0 / 3, -43130.0 / 3, 18730, -35840.0 / 3, 8960.0 / 3};
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(v[k], want[k], 1e-9 * std::abs(want[k]));
}

TEST(Stehfest, OrderValidated) {
  EXPECT_THROW(duel::check_order(7), duel::domain_error);
  EXPECT_THROW(duel::check_order(6), duel::domain_error);
  EXPECT_THROW(duel::check_order(22), duel::domain_error);
  EXPECT_NO_THROW(duel::check_order(14));
}

TEST(Inverse1d, ExponentialAndConstant) {
  // Carson image of exp(-a p) is u / (u + a).
  for (double p : {0.2, 1.0}) {
    auto r = duel::lc_inverse_1d([](quad u) { return u / (u + 1); }, p);
    EXPECT_NEAR(r.value, std::exp(-p), 1e-5 * std::exp(-p)) << "p=" << p;
    EXPECT_FALSE(r.warning());
  }
  // Far into the tail the order-14 error reaches 3e-4 and the N vs N-2 check notices.
  auto far = duel::lc_inverse_1d([](quad u) { return u / (u + 1); }, 3.0);
  EXPECT_GT(std::abs(far.value - std::exp(-3.0)), 1e-5 * std::exp(-3.0));
  EXPECT_TRUE(far.warning());
  EXPECT_NEAR(duel::lc_inverse_1d([](quad) { return quad(1); }, 5.0).value, 1.0, 1e-12);
}

TEST(Inverse2d, ProductOfExponentials) {
  auto f = [](quad u, quad v) { return u / (u + 2) * v / (v + quad(0.5)); };
  auto r = duel::lc_inverse(f, 0.3, 0.7);
  const double want = std::exp(-0.6 - 0.35);
  EXPECT_NEAR(r.value, want, 1e-5 * want);
  EXPECT_LT(r.disagreement, 1e-3);
}

TEST(Inverse, RejectsNonPositivePoint) {
  EXPECT_THROW(duel::lc_inverse_1d([](quad) { return quad(1); }, 0.0), duel::domain_error);
  EXPECT_THROW(duel::lc_inverse([](quad, quad) { return quad(1); }, 1.0, -1.0), duel::domain_error);
}

TEST(Forward, MatchesClosedForms) {
  for (double u : {0.1, 1.0, 7.5}) {
    quad uq = u;
    EXPECT_NEAR(static_cast<double>(duel::lc_forward_1d([](quad p) { return exp(-p); }, uq)), u / (u + 1), 1e-20);
    duel::QuadratureOptions o;
    o.breakpoints = {3.0};
    // u \int_0^3 exp(-u p) dp = 1 - exp(-3u)
    EXPECT_NEAR(static_cast<double>(duel::lc_forward_1d([](quad p) { return p < 3 ? quad(1) : quad(0); }, uq, o)),
                1 - std::exp(-3 * u), 1e-15);
  }
}

TEST(Forward, NestedMatchesSeparable) {
  auto f = [](quad p, quad q) { return exp(-p - 2 * q); };
  quad u = 0.8, v = 1.3;
  const double want = 0.8 / 1.8 * 1.3 / 3.3;
  EXPECT_NEAR(static_cast<double>(duel::lc_forward(f, u, v)), want, 1e-15);
}

TEST(RoundTrip, ThreeClosedFormPairs) {
  for (const auto& c : duel::inversion_round_trip()) {
    EXPECT_EQ(c.points, 9);
    EXPECT_LE(c.max_relative_error, 1e-5) << c.name << " worst at (" << c.worst_p << ", " << c.worst_q << ")";
  }
}
