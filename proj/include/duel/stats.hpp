#pragma once

#include <cmath>
#include <cstdint>

namespace duel {

struct SimEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t replications = 0;
};

/// Running mean / variance (Welford), mergeable with Chan's update. Merging
/// a fixed sequence of accumulators in a fixed order is bit-reproducible, and
/// a stream of identical samples keeps the mean exactly equal to the sample.
class Accumulator {
 public:
  void add(double x) noexcept {
    ++n_;
    double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  void merge(const Accumulator& o) noexcept {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    double n = static_cast<double>(n_ + o.n_);
    double delta = o.mean_ - mean_;
    mean_ += delta * (static_cast<double>(o.n_) / n);
    m2_ += o.m2_ + delta * delta * (static_cast<double>(n_) * static_cast<double>(o.n_) / n);
    n_ += o.n_;
  }

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

  SimEstimate estimate() const noexcept {
    double se = n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
    return {mean_, se, n_};
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace duel
