#pragma once

// The classical distance-domain duel: steps 1..N, A moves on odd steps and B
// on even ones. The mover either shoots (hits with its probability at that
// step and wins, otherwise the opponent wins) or waits and hands the move to
// the opponent at the next step. At step N the mover must shoot.
//
// Waiting at step i < N is worth 1 - p_O[i+1] to the mover if the opponent
// then shoots, and the opponent shoots at i+1 exactly when that beats what it
// can get later. Working backward, the mover at i shoots iff
//
//   p_M[i] + p_O[i+1] > 1,
//
// which is the sum-of-probabilities threshold read across the move
// boundary. Ties go to waiting. The same-index reading p_a[i] + p_b[i] >= 1
// is exposed too; it does not always match backward induction.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "duel/errors.hpp"

namespace duel {

enum class Shooter { a, b };

inline const char* to_string(Shooter s) { return s == Shooter::a ? "A" : "B"; }

inline constexpr double classical_tie_tolerance = 1e-12;

struct ClassicalDuel {
  /// Per-step hit probabilities, index 0 is step 1.
  std::vector<double> p_a, p_b;

  int steps() const noexcept { return static_cast<int>(p_a.size()); }

  void validate() const {
    if (p_a.empty() || p_a.size() != p_b.size())
      throw validation_error("p_a and p_b must have the same positive length");
    for (const auto* p : {&p_a, &p_b})
      for (std::size_t i = 0; i < p->size(); ++i) {
        if (!((*p)[i] >= 0.0 && (*p)[i] <= 1.0)) throw validation_error("probabilities must lie in [0, 1]");
        if (i > 0 && (*p)[i] < (*p)[i - 1]) throw validation_error("probabilities must be nondecreasing in the step");
      }
    if (p_a.back() + p_b.back() < 1.0 - classical_tie_tolerance)
      throw no_crossing_error("p_a[N] + p_b[N] < 1: no crossing by the final step");
  }

  Shooter mover(int step) const noexcept { return step % 2 == 1 ? Shooter::a : Shooter::b; }
};

struct ClassicalSolution {
  /// First step at which the threshold rule shoots.
  int shoot_step = 0;
  Shooter shooter = Shooter::a;
  /// First step at which the backward-induction solution shoots, and A's
  /// winning probability under it.
  int backward_induction_step = 0;
  double win_prob_a = 0.0;
  /// First step with p_a[i] + p_b[i] >= 1.
  int same_index_step = 0;

  bool rule_matches_induction() const noexcept { return shoot_step == backward_induction_step; }
};

/// First step where the mover's threshold p_M[i] + p_O[i+1] > 1 holds, or N.
inline int threshold_rule_step(const ClassicalDuel& d) {
  d.validate();
  const int n = d.steps();
  for (int i = 1; i < n; ++i) {
    const bool a_moves = d.mover(i) == Shooter::a;
    const double mine = a_moves ? d.p_a[i - 1] : d.p_b[i - 1];
    const double theirs = a_moves ? d.p_b[i] : d.p_a[i];
    if (mine + theirs > 1.0 + classical_tie_tolerance) return i;
  }
  return n;
}

/// First step with p_a[i] + p_b[i] >= 1.
inline int same_index_step(const ClassicalDuel& d) {
  d.validate();
  for (int i = 1; i <= d.steps(); ++i)
    if (d.p_a[i - 1] + d.p_b[i - 1] >= 1.0 - classical_tie_tolerance) return i;
  return d.steps();
}

struct InductionResult {
  int shoot_step = 0;
  double win_prob_a = 0.0;
};

/// Solves the game from the last step backward.
inline InductionResult backward_induction(const ClassicalDuel& d) {
  d.validate();
  const int n = d.steps();
  auto shoot_value = [&](int i) {  // A's winning probability if the mover shoots at i
    return d.mover(i) == Shooter::a ? d.p_a[i - 1] : 1.0 - d.p_b[i - 1];
  };
  double w = shoot_value(n);
  int first = n;
  for (int i = n - 1; i >= 1; --i) {
    const double s = shoot_value(i);
    const bool shoot = d.mover(i) == Shooter::a ? s > w + classical_tie_tolerance : s < w - classical_tie_tolerance;
    if (shoot) {
      w = s;
      first = i;
    }
  }
  return {first, w};
}

inline ClassicalSolution classical_duel(const ClassicalDuel& d) {
  ClassicalSolution s;
  s.shoot_step = threshold_rule_step(d);
  s.shooter = d.mover(s.shoot_step);
  const auto bi = backward_induction(d);
  s.backward_induction_step = bi.shoot_step;
  s.win_prob_a = bi.win_prob_a;
  s.same_index_step = same_index_step(d);
  return s;
}

struct ExhaustiveCount {
  std::uint64_t instances = 0;
  std::uint64_t rule_mismatches = 0;
  std::uint64_t same_index_mismatches = 0;
};

/// Counts, over every pair of nondecreasing sequences with values in
/// {0, 1/g, ..., 1} of length `steps` satisfying p_a[N] + p_b[N] >= 1, the
/// instances where the threshold rule (and the same-index rule) pick a
/// different first shooting step than backward induction.
///
/// Pairs number in the hundreds of billions at N = 12, so the sweep runs
/// backward over steps with state (p_a[i], p_b[i], induction value, two match
/// flags); all probabilities stay integer multiples of 1/g.
inline ExhaustiveCount exhaustive_count(int steps, int g = 10) {
  if (steps < 1) throw domain_error("steps must be >= 1");
  if (g < 1 || g > 100) throw domain_error("grid must be in [1, 100]");
  const int m = g + 1;
  // index: (((pa * m + pb) * m + w) * 2 + rule_ok) * 2 + same_ok
  auto idx = [m](int pa, int pb, int w, int r, int s) { return (((pa * m + pb) * m + w) * 2 + r) * 2 + s; };
  std::vector<std::uint64_t> cur(static_cast<std::size_t>(m * m * m * 4), 0), next;

  const bool a_last = steps % 2 == 1;
  for (int pa = 0; pa <= g; ++pa)
    for (int pb = 0; pb <= g; ++pb)
      if (pa + pb >= g) cur[idx(pa, pb, a_last ? pa : g - pb, 1, 1)] += 1;

  for (int i = steps - 1; i >= 1; --i) {
    next.assign(cur.size(), 0);
    const bool a_moves = i % 2 == 1;
    for (int pa1 = 0; pa1 <= g; ++pa1)
      for (int pb1 = 0; pb1 <= g; ++pb1)
        for (int w1 = 0; w1 <= g; ++w1)
          for (int r1 = 0; r1 < 2; ++r1)
            for (int s1 = 0; s1 < 2; ++s1) {
              const std::uint64_t c = cur[idx(pa1, pb1, w1, r1, s1)];
              if (c == 0) continue;
              for (int pa = 0; pa <= pa1; ++pa)
                for (int pb = 0; pb <= pb1; ++pb) {
                  const bool rule = a_moves ? pa + pb1 > g : pb + pa1 > g;
                  const bool induction = a_moves ? pa > w1 : g - pb < w1;
                  const bool same = pa + pb >= g;
                  const int w = induction ? (a_moves ? pa : g - pb) : w1;
                  const int r = rule && induction ? 1 : rule != induction ? 0 : r1;
                  const int s = same && induction ? 1 : same != induction ? 0 : s1;
                  next[idx(pa, pb, w, r, s)] += c;
                }
            }
    cur.swap(next);
  }

  ExhaustiveCount out;
  for (int pa = 0; pa <= g; ++pa)
    for (int pb = 0; pb <= g; ++pb)
      for (int w = 0; w <= g; ++w)
        for (int r = 0; r < 2; ++r)
          for (int s = 0; s < 2; ++s) {
            const std::uint64_t c = cur[idx(pa, pb, w, r, s)];
            out.instances += c;
            if (!r) out.rule_mismatches += c;
            if (!s) out.same_index_mismatches += c;
          }
  return out;
}

}  // namespace duel
