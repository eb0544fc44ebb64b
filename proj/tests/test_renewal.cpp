#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "duel/renewal.hpp"
#include "duel/rng.hpp"
#include "duel/stats.hpp"

using duel::Distribution;
using duel::RenewalSpec;
using duel::Stream;

TEST(Stream, AddressedByKey) {
  Stream a(7, 3, 0), b(7, 3, 0), c(7, 3, 1), d(7, 4, 0), e(8, 3, 0);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
  EXPECT_NE(x, e());
}

TEST(Stream, UniformRangeAndMean) {
  Stream s(1, 0);
  duel::Accumulator acc;
  for (int i = 0; i < 200000; ++i) {
    double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    acc.add(u);
  }
  EXPECT_NEAR(acc.mean(), 0.5, 4 * acc.estimate().std_error);
  EXPECT_NEAR(acc.variance(), 1.0 / 12.0, 2e-3);
}

TEST(Distribution, Validation) {
  EXPECT_THROW(Distribution::deterministic(-1.0), duel::validation_error);
  EXPECT_THROW(Distribution::exponential(0.0), duel::validation_error);
  EXPECT_THROW(Distribution::exponential(-2.0), duel::validation_error);
  EXPECT_NO_THROW(Distribution::deterministic(0.0));
  EXPECT_DOUBLE_EQ(Distribution::exponential(0.25).mean(), 4.0);
}

TEST(Distribution, ExponentialSampleMoments) {
  auto d = Distribution::exponential(0.5);
  Stream s(11, 0);
  duel::Accumulator acc;
  for (int i = 0; i < 200000; ++i) acc.add(d.sample(s));
  EXPECT_NEAR(acc.mean(), 2.0, 4 * acc.estimate().std_error);
  EXPECT_NEAR(acc.variance(), 4.0, 0.1);
}

TEST(SamplePath, DeterministicLattice) {
  RenewalSpec spec{Distribution::deterministic(5.0), Distribution::deterministic(4.0)};
  Stream s(0, 0);
  auto path = duel::sample_path(spec, 17.95, s);
  EXPECT_EQ(path.times, (std::vector<double>{5, 9, 13, 17, 21}));
}

TEST(SamplePath, FirstEpochPastHorizon) {
  RenewalSpec spec{Distribution::deterministic(30.0), Distribution::exponential(1.0)};
  Stream s(0, 0);
  auto path = duel::sample_path(spec, 17.95, s);
  ASSERT_EQ(path.times.size(), 1u);
  EXPECT_DOUBLE_EQ(path.times[0], 30.0);
}

TEST(SamplePath, Invariants) {
  RenewalSpec spec{Distribution::exponential(0.3), Distribution::exponential(0.7)};
  for (std::uint64_t rep = 0; rep < 2000; ++rep) {
    Stream s(5, rep);
    const double horizon = 0.5 + static_cast<double>(rep % 40);
    auto path = duel::sample_path(spec, horizon, s);
    ASSERT_FALSE(path.times.empty());
    EXPECT_GE(path.times.back(), horizon);
    for (std::size_t i = 0; i + 1 < path.times.size(); ++i) {
      EXPECT_LT(path.times[i], path.times[i + 1]);
      EXPECT_LT(path.times[i], horizon);
    }
  }
}

TEST(SamplePath, ReproducibleFromStream) {
  RenewalSpec spec{Distribution::deterministic(1.0), Distribution::exponential(0.2)};
  Stream a(9, 42, 1), b(9, 42, 1);
  EXPECT_EQ(duel::sample_path(spec, 50.0, a).times, duel::sample_path(spec, 50.0, b).times);
}

TEST(SamplePath, DegenerateCycleRejected) {
  RenewalSpec spec{Distribution::deterministic(0.0), Distribution::deterministic(0.0)};
  Stream s(0, 0);
  EXPECT_THROW(duel::sample_path(spec, 1.0, s), duel::degenerate_process_error);
  RenewalSpec ok{Distribution::deterministic(0.0), Distribution::deterministic(2.0)};
  EXPECT_THROW(duel::sample_path(ok, -1.0, s), duel::domain_error);
}

TEST(Accumulator, MergeMatchesSinglePass) {
  duel::Accumulator whole, left, right;
  Stream s(3, 0);
  for (int i = 0; i < 1000; ++i) {
    double x = s.exponential(1.0);
    whole.add(x);
    (i < 377 ? left : right).add(x);
  }
  left.merge(right);
  EXPECT_EQ(left.count(), whole.count());
  EXPECT_NEAR(left.mean(), whole.mean(), 1e-13);
  EXPECT_NEAR(left.variance(), whole.variance(), 1e-12);
}

TEST(Accumulator, ConstantSamplesExact) {
  duel::Accumulator a, b;
  for (int i = 0; i < 5000; ++i) (i % 3 ? a : b).add(18.0);
  a.merge(b);
  EXPECT_EQ(a.mean(), 18.0);
  EXPECT_EQ(a.estimate().std_error, 0.0);
}
