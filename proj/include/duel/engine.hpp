#pragma once

// Crossing moment, exit indices and the Monte Carlo route for the duel.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "duel/curves.hpp"
#include "duel/errors.hpp"
#include "duel/renewal.hpp"
#include "duel/rng.hpp"
#include "duel/stats.hpp"

namespace duel {

// ---------------------------------------------------------------------------
// t*

/// inf{t >= 0 : P_a(t) + P_b(t) >= 1}, located by doubling then bisection to
/// absolute tolerance `tol`. The returned point always satisfies the
/// inequality.
inline double compute_t_star(const SuccessCurve& a, const SuccessCurve& b, double tol = 1e-12) {
  if (!(tol > 0.0)) throw domain_error("t* tolerance must be > 0");
  auto crossed = [&](double t) { return a.eval(t) + b.eval(t) >= 1.0; };
  if (crossed(0.0)) return 0.0;

  double hi = std::min(a.t_max(), b.t_max());
  if (!std::isfinite(hi)) {
    hi = 1.0;
    while (!crossed(hi)) {
      hi *= 2.0;
      if (hi > 1e15) throw no_crossing_error("P_a + P_b stays below 1 up to t = 1e15");
    }
  } else if (!crossed(hi)) {
    throw no_crossing_error("P_a + P_b stays below 1 within the curve horizons");
  }

  double lo = 0.0;
  while (hi - lo > tol) {
    double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (crossed(mid) ? hi : lo) = mid;
  }
  return hi;
}

// ---------------------------------------------------------------------------
// Exit indices

struct ExitRecord {
  std::size_t index = 0;
  double exit_time = 0.0;
  /// Epoch just before the exit; 0 when the exit index is 0.
  double pre_exit_time = 0.0;
};

inline ExitRecord exit_index(const std::vector<double>& times, double threshold) {
  auto it = std::lower_bound(times.begin(), times.end(), threshold);
  if (it == times.end()) throw insufficient_path_error("path ends before reaching the threshold");
  ExitRecord r;
  r.index = static_cast<std::size_t>(it - times.begin());
  r.exit_time = *it;
  r.pre_exit_time = r.index == 0 ? 0.0 : *(it - 1);
  return r;
}

inline ExitRecord exit_index(const EpochPath& path, double threshold) { return exit_index(path.times, threshold); }

// ---------------------------------------------------------------------------
// Scenario

struct Player {
  std::string name;
  std::optional<SuccessCurve> curve;
  RenewalSpec renewal;
};

struct DuelScenario {
  std::string time_unit = "months";
  Player a{"A", std::nullopt, {}};
  Player b{"B", std::nullopt, {}};
  std::optional<double> t_star_override;
  /// Distinct thresholds for general threshold games; both default to t*.
  std::optional<double> threshold_a;
  std::optional<double> threshold_b;
  /// Evaluate 1{P_a(S_mu) + P_b(T_nu) >= 1}; ignored when a curve is absent.
  bool trace_condition = true;

  void validate() const {
    if (!t_star_override && !(a.curve && b.curve))
      throw validation_error("t_star is required unless both players declare a curve");
    if (t_star_override && !(*t_star_override >= 0.0 && std::isfinite(*t_star_override)))
      throw validation_error("t_star must be finite and >= 0");
    for (auto th : {threshold_a, threshold_b})
      if (th && !(*th >= 0.0 && std::isfinite(*th))) throw validation_error("thresholds must be finite and >= 0");
    check_advances(a.renewal);
    check_advances(b.renewal);
  }

  double t_star(double tol = 1e-12) const {
    if (t_star_override) return *t_star_override;
    if (!(a.curve && b.curve)) throw validation_error("t_star is required unless both players declare a curve");
    return compute_t_star(*a.curve, *b.curve, tol);
  }

  bool condition_active() const noexcept { return trace_condition && a.curve && b.curve; }

  /// 1{P_a(s) + P_b(t) >= 1}, or true when the condition is not in force.
  bool condition_holds(double s, double t) const {
    if (!condition_active()) return true;
    return a.curve->eval(s) + b.curve->eval(t) >= 1.0;
  }
};

struct Thresholds {
  double t_star;
  double a;
  double b;
};

inline Thresholds resolve_thresholds(const DuelScenario& sc) {
  double ts = sc.t_star();
  return {ts, sc.threshold_a.value_or(ts), sc.threshold_b.value_or(ts)};
}

// ---------------------------------------------------------------------------
// Reports

enum class Mode { deterministic, monte_carlo, analytic };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::deterministic: return "deterministic";
    case Mode::monte_carlo: return "monte-carlo";
    case Mode::analytic: return "analytic";
  }
  return "?";
}

struct Quantity {
  double value = 0.0;
  std::optional<double> std_error;
  std::optional<std::uint64_t> replications;

  static Quantity exact(double v) { return {v, std::nullopt, std::nullopt}; }
  static Quantity from(const SimEstimate& e) { return {e.mean, e.std_error, e.replications}; }
};

struct ExitMoments {
  Quantity S_mu, S_mu_minus_1, T_nu, T_nu_minus_1;
};

struct DecisionReport {
  Mode mode = Mode::deterministic;
  std::string time_unit = "months";
  std::string name_a = "A", name_b = "B";
  double t_star = 0.0;
  double threshold_a = 0.0, threshold_b = 0.0;
  double mean_delay_a = 0.0, mean_delay_b = 0.0;
  double mean_cycle_a = 0.0, mean_cycle_b = 0.0;
  /// Iteration counts from the floor rule applied to the headline moments.
  long mu = 0, nu = 0;
  /// Headline moments: exact values (deterministic), unconditional means
  /// (monte-carlo), or means on the trace event {S_mu <= T_nu} (analytic).
  ExitMoments moments;
  /// P(S_mu <= T_nu); for the analytic route this is Phi at zero arguments.
  Quantity win_prob_a;
  /// P(S_mu <= T_nu and the trace condition).
  Quantity confined_prob;
  /// Means conditional on the trace event.
  std::optional<ExitMoments> conditional;
  /// Analytic only: -dPhi at zero, i.e. E[X 1{trace event}] without normalizing.
  std::optional<ExitMoments> restricted;
  /// Monte Carlo only: sample mean of the integer exit indices.
  std::optional<Quantity> mean_index_mu, mean_index_nu;
  /// Analytic only: worst relative disagreement between inversion orders N
  /// and N - 2 over all evaluations, and Phi(0) from the printed closed form
  /// when that form is computable.
  std::optional<double> inversion_disagreement;
  std::optional<double> printed_phi;
  /// Analytic only: worst relative change of the Richardson-extrapolated
  /// derivatives between steps h and h/2.
  std::optional<double> richardson_change;
  std::vector<std::string> warnings;
};

/// Cycles completed after the first epoch: floor((E[exit] - E[first epoch]) / E[cycle]).
/// Ratios within 1e-6 (relative) of an integer snap to it so that numerically
/// differentiated moments like 17.9999999 still count 3 cycles of 6.
inline long iteration_count(double mean_exit, double mean_delay, double mean_cycle) {
  if (!(mean_cycle > 0.0)) return 0;
  double r = (mean_exit - mean_delay) / mean_cycle;
  double k = std::round(r);
  if (std::abs(r - k) <= 1e-6 * std::max(1.0, std::abs(r))) return static_cast<long>(k);
  return static_cast<long>(std::floor(r));
}

inline void fill_header(DecisionReport& r, const DuelScenario& sc, const Thresholds& th) {
  r.time_unit = sc.time_unit;
  r.name_a = sc.a.name;
  r.name_b = sc.b.name;
  r.t_star = th.t_star;
  r.threshold_a = th.a;
  r.threshold_b = th.b;
  r.mean_delay_a = sc.a.renewal.initial_delay.mean();
  r.mean_delay_b = sc.b.renewal.initial_delay.mean();
  r.mean_cycle_a = mean_cycle(sc.a.renewal);
  r.mean_cycle_b = mean_cycle(sc.b.renewal);
}

inline void fill_iteration_counts(DecisionReport& r) {
  r.mu = iteration_count(r.moments.S_mu.value, r.mean_delay_a, r.mean_cycle_a);
  r.nu = iteration_count(r.moments.T_nu.value, r.mean_delay_b, r.mean_cycle_b);
}

// ---------------------------------------------------------------------------
// Replications

struct ReplicationRecord {
  ExitRecord a;
  ExitRecord b;
  bool a_first = false;   // S_mu <= T_nu (ties to A)
  bool condition = true;  // trace condition on (S_mu, T_nu)
  bool confined() const noexcept { return a_first && condition; }
};

/// One replication: A and B draw from separate lanes of the replication's
/// stream so their paths do not depend on each other's length.
inline ReplicationRecord simulate_replication(const DuelScenario& sc, const Thresholds& th, std::uint64_t seed,
                                              std::uint64_t replication) {
  Stream sa(seed, replication, 0);
  Stream sb(seed, replication, 1);
  auto pa = sample_path(sc.a.renewal, th.a, sa);
  auto pb = sample_path(sc.b.renewal, th.b, sb);
  ReplicationRecord r;
  r.a = exit_index(pa, th.a);
  r.b = exit_index(pb, th.b);
  r.a_first = r.a.exit_time <= r.b.exit_time;
  r.condition = sc.condition_holds(r.a.exit_time, r.b.exit_time);
  return r;
}

inline unsigned default_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Replications are processed in fixed-size chunks; each chunk is reduced on
/// its own and the chunk results are merged in chunk order. Any number of
/// worker threads therefore yields bit-identical output.
template <class ChunkResult, class Body>
std::vector<ChunkResult> run_chunked(std::uint64_t replications, unsigned threads, Body body) {
  constexpr std::uint64_t chunk = 4096;
  const std::uint64_t n_chunks = (replications + chunk - 1) / chunk;
  std::vector<ChunkResult> out(n_chunks);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t c = next++; c < n_chunks; c = next++) {
      std::uint64_t lo = c * chunk, hi = std::min(replications, lo + chunk);
      for (std::uint64_t i = lo; i < hi; ++i) body(out[c], i);
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::uint64_t>(n_chunks, 1))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return out;
}

struct SimulationAccumulators {
  Accumulator s_mu, s_pre, t_nu, t_pre, idx_mu, idx_nu, a_first, confined;
  Accumulator c_s_mu, c_s_pre, c_t_nu, c_t_pre;

  void merge(const SimulationAccumulators& o) {
    for (auto [x, y] : {std::pair{&s_mu, &o.s_mu}, {&s_pre, &o.s_pre}, {&t_nu, &o.t_nu}, {&t_pre, &o.t_pre},
                        {&idx_mu, &o.idx_mu}, {&idx_nu, &o.idx_nu}, {&a_first, &o.a_first},
                        {&confined, &o.confined}, {&c_s_mu, &o.c_s_mu}, {&c_s_pre, &o.c_s_pre},
                        {&c_t_nu, &o.c_t_nu}, {&c_t_pre, &o.c_t_pre}})
      x->merge(*y);
  }
};

/// Monte Carlo estimate of the decision parameters.
inline DecisionReport simulate(const DuelScenario& sc, std::uint64_t replications, std::uint64_t seed,
                               unsigned threads = default_threads()) {
  if (replications < 1) throw validation_error("replications must be >= 1");
  sc.validate();
  const Thresholds th = resolve_thresholds(sc);

  auto chunks = run_chunked<SimulationAccumulators>(replications, threads, [&](SimulationAccumulators& acc,
                                                                               std::uint64_t i) {
    auto r = simulate_replication(sc, th, seed, i);
    acc.s_mu.add(r.a.exit_time);
    acc.s_pre.add(r.a.pre_exit_time);
    acc.t_nu.add(r.b.exit_time);
    acc.t_pre.add(r.b.pre_exit_time);
    acc.idx_mu.add(static_cast<double>(r.a.index));
    acc.idx_nu.add(static_cast<double>(r.b.index));
    acc.a_first.add(r.a_first ? 1.0 : 0.0);
    acc.confined.add(r.confined() ? 1.0 : 0.0);
    if (r.confined()) {
      acc.c_s_mu.add(r.a.exit_time);
      acc.c_s_pre.add(r.a.pre_exit_time);
      acc.c_t_nu.add(r.b.exit_time);
      acc.c_t_pre.add(r.b.pre_exit_time);
    }
  });
  SimulationAccumulators total;
  for (const auto& c : chunks) total.merge(c);

  DecisionReport r;
  r.mode = Mode::monte_carlo;
  fill_header(r, sc, th);
  auto q = [](const Accumulator& a) { return Quantity::from(a.estimate()); };
  r.moments = {q(total.s_mu), q(total.s_pre), q(total.t_nu), q(total.t_pre)};
  r.win_prob_a = q(total.a_first);
  r.confined_prob = q(total.confined);
  if (total.c_s_mu.count() > 0)
    r.conditional = ExitMoments{q(total.c_s_mu), q(total.c_s_pre), q(total.c_t_nu), q(total.c_t_pre)};
  else
    r.warnings.push_back("trace event never occurred; conditional means unavailable");
  r.mean_index_mu = q(total.idx_mu);
  r.mean_index_nu = q(total.idx_nu);
  fill_iteration_counts(r);
  return r;
}

/// Mean-value analysis: every law is replaced by a point mass at its mean and
/// the single resulting path is evaluated exactly. No randomness involved.
inline DecisionReport deterministic_report(const DuelScenario& sc) {
  sc.validate();
  DuelScenario det = sc;
  for (Player* p : {&det.a, &det.b}) {
    p->renewal.initial_delay = Distribution::deterministic(p->renewal.initial_delay.mean());
    p->renewal.cycle = Distribution::deterministic(p->renewal.cycle.mean());
  }
  const Thresholds th = resolve_thresholds(sc);
  auto rec = simulate_replication(det, th, 0, 0);

  DecisionReport r;
  r.mode = Mode::deterministic;
  fill_header(r, sc, th);
  using Q = Quantity;
  r.moments = {Q::exact(rec.a.exit_time), Q::exact(rec.a.pre_exit_time), Q::exact(rec.b.exit_time),
               Q::exact(rec.b.pre_exit_time)};
  r.win_prob_a = Q::exact(rec.a_first ? 1.0 : 0.0);
  r.confined_prob = Q::exact(rec.confined() ? 1.0 : 0.0);
  if (rec.confined()) r.conditional = r.moments;
  fill_iteration_counts(r);
  return r;
}

// ---------------------------------------------------------------------------
// Joint functional, Monte Carlo side

/// Transform variables of the joint functional: theta0/theta1 weight A's
/// pre-exit/exit times, vartheta0/vartheta1 weight B's.
struct TransformArgs {
  double theta0 = 0.0;
  double theta1 = 0.0;
  double vartheta0 = 0.0;
  double vartheta1 = 0.0;
};

/// Sample mean of exp(-theta0 S_{mu-1} - theta1 S_mu - vartheta0 T_{nu-1} - vartheta1 T_nu)
/// on the trace event.
inline SimEstimate estimate_phi(const DuelScenario& sc, const TransformArgs& x, std::uint64_t replications,
                                std::uint64_t seed, unsigned threads = default_threads()) {
  if (replications < 1) throw validation_error("replications must be >= 1");
  sc.validate();
  const Thresholds th = resolve_thresholds(sc);
  auto chunks = run_chunked<Accumulator>(replications, threads, [&](Accumulator& acc, std::uint64_t i) {
    auto r = simulate_replication(sc, th, seed, i);
    double v = 0.0;
    if (r.confined())
      v = std::exp(-x.theta0 * r.a.pre_exit_time - x.theta1 * r.a.exit_time - x.vartheta0 * r.b.pre_exit_time -
                   x.vartheta1 * r.b.exit_time);
    acc.add(v);
  });
  Accumulator total;
  for (const auto& c : chunks) total.merge(c);
  return total.estimate();
}

}  // namespace duel
