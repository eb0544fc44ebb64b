#pragma once

#include <stdexcept>
#include <string>

namespace duel {

/// Argument outside an operation's mathematical domain (negative time,
/// probability outside [0,1], ...).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed input caught at construction or load time. Maps to CLI exit
/// code 1.
class validation_error : public std::invalid_argument {
 public:
  explicit validation_error(const std::string& what, int line = 0)
      : std::invalid_argument(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A numerical routine could not reach its accuracy target. Carries the
/// best estimate it did reach. Maps to CLI exit code 2.
class accuracy_error : public std::runtime_error {
 public:
  accuracy_error(const std::string& what, double estimate)
      : std::runtime_error(what), estimate_(estimate) {}

  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

/// A requested probability level is never reached by a curve.
class unattainable_error : public domain_error {
 public:
  using domain_error::domain_error;
};

/// P_a + P_b never reaches 1 inside the searchable horizon.
class no_crossing_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A renewal process that can never advance past its first epoch.
class degenerate_process_error : public validation_error {
 public:
  using validation_error::validation_error;
};

/// A path was truncated before the threshold of interest.
class insufficient_path_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The closed-form route is not available for this scenario (distribution
/// kind, trace condition, or a divergent expectation).
class analytic_unavailable_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace duel
