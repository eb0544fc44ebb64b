#pragma once

// The bundled case study: A is ready at month 0 and needs 6 months per
// development cycle; B is ready at month 5 and needs 4. The crossing moment
// is given directly as 17.95 months. scenarios/case_study.json holds the
// same document.

#include <string_view>

#include "duel/engine.hpp"
#include "duel/scenario.hpp"

namespace duel {

inline constexpr std::string_view case_study_document = R"({
  "schema_version": 1,
  "time_unit": "months",
  "player_a": {
    "name": "A",
    "initial_delay": {"kind": "deterministic", "value": 0},
    "cycle": {"kind": "deterministic", "value": 6}
  },
  "player_b": {
    "name": "B",
    "initial_delay": {"kind": "deterministic", "value": 5},
    "cycle": {"kind": "deterministic", "value": 4}
  },
  "t_star": 17.95,
  "mode": "deterministic",
  "replications": 100000,
  "seed": 1
}
)";

inline ScenarioFile case_study_scenario() { return load_scenario(case_study_document); }

/// Deterministic evaluation of the bundled scenario.
inline DecisionReport run_case_study() { return deterministic_report(case_study_scenario().scenario); }

}  // namespace duel
