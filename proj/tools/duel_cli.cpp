// Command-line front end: duel <subcommand> [options]
//
// Exit codes: 0 success, 1 invalid input, 2 numerical accuracy failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "duel/duel.hpp"

namespace {

struct Common {
  std::string scenario;
  std::string format = "human";
  std::string out;
  unsigned threads = duel::default_threads();
};

struct Output {
  std::string text;
  bool accuracy_failure = false;
};

void write(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw duel::validation_error("cannot write " + c.out);
  f << text;
}

duel::ScenarioFile scenario_or_case_study(const Common& c) {
  return c.scenario.empty() ? duel::case_study_scenario() : duel::load_scenario_file(c.scenario);
}

bool inversion_failed(const duel::DecisionReport& r) {
  return r.inversion_disagreement && *r.inversion_disagreement > duel::inversion_warning_threshold;
}

std::string render_many(const std::vector<duel::DecisionReport>& reports, duel::ReportFormat fmt) {
  if (reports.size() == 1) return duel::emit_report(reports.front(), fmt);
  if (fmt == duel::ReportFormat::json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(duel::report_json(r));
    return arr.dump(2) + "\n";
  }
  std::string s;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (i > 0) s += "\n";
    s += duel::emit_report(reports[i], fmt);
  }
  return s;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw duel::validation_error("not a number: \"" + item + "\"");
    }
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-player stochastic duel solver"};
  app.require_subcommand(1);

  Common c;
  std::uint64_t replications = 0, seed = 0;
  int order = duel::default_inversion_order;
  double step = 0.0;

  auto add_common = [&](CLI::App* sub, bool with_scenario) {
    if (with_scenario) sub->add_option("--scenario", c.scenario, "Scenario file (JSON); default: bundled case study");
    sub->add_option("--format", c.format, "human, json or csv")->check(CLI::IsMember({"human", "json", "csv"}));
    sub->add_option("--out", c.out, "Write the report here instead of stdout");
  };

  auto* solve = app.add_subcommand("solve", "Crossing moment t* only");
  add_common(solve, true);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates");
  add_common(simulate, true);
  simulate->add_option("--replications", replications, "Replications (default: scenario value)");
  simulate->add_option("--seed", seed, "Seed (default: scenario value)");
  simulate->add_option("--threads", c.threads, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);

  auto* analyze = app.add_subcommand("analyze", "Closed-form functional with numerical inversion");
  add_common(analyze, true);
  analyze->add_option("--order", order, "Gaver-Stehfest order (even, 8..20)");
  analyze->add_option("--step", step, "Finite-difference step for the moments (default 0.02 / max(1, t*))");

  auto* run = app.add_subcommand("run", "Evaluate the scenario in the mode it declares");
  add_common(run, true);
  run->add_option("--replications", replications, "Replications (default: scenario value)");
  run->add_option("--seed", seed, "Seed (default: scenario value)");
  run->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--order", order, "Gaver-Stehfest order (even, 8..20)");

  auto* case_study = app.add_subcommand("case-study", "Bundled case study, deterministic mode");
  add_common(case_study, false);

  std::string pa, pb;
  int exhaustive = 0;
  auto* classic = app.add_subcommand("classic-duel", "Classical duel: threshold rule and backward induction");
  classic->add_option("--p-a", pa, "Comma-separated hit probabilities of A per step");
  classic->add_option("--p-b", pb, "Comma-separated hit probabilities of B per step");
  classic->add_option("--exhaustive", exhaustive, "Compare the rules on every 0.1-grid instance up to N steps")
      ->check(CLI::Range(1, 20));
  classic->add_option("--format", c.format, "human or json")->check(CLI::IsMember({"human", "json"}));
  classic->add_option("--out", c.out, "Write the result here instead of stdout");

  auto* check = app.add_subcommand("check-inversion", "Round-trip self test of the transform inverter");
  check->add_option("--order", order, "Gaver-Stehfest order (even, 8..20)");
  check->add_option("--format", c.format, "human or json")->check(CLI::IsMember({"human", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    const auto fmt = duel::parse_report_format(c.format);
    Output out;

    if (*solve) {
      auto f = scenario_or_case_study(c);
      f.scenario.validate();
      const auto th = duel::resolve_thresholds(f.scenario);
      if (fmt == duel::ReportFormat::json) {
        out.text = nlohmann::json{{"t_star", th.t_star}, {"time_unit", f.scenario.time_unit},
                                  {"computed", !f.scenario.t_star_override.has_value()}}
                       .dump(2) +
                   "\n";
      } else if (fmt == duel::ReportFormat::csv) {
        out.text = "quantity,mean,std_error,replications\nt_star," + duel::detail::shortest(th.t_star) + ",,\n";
      } else {
        char buf[128];
        std::snprintf(buf, sizeof buf, "t* = %.12g %s (%s)\n", th.t_star, f.scenario.time_unit.c_str(),
                      f.scenario.t_star_override ? "configured" : "computed from the curves");
        out.text = buf;
      }
    } else if (*simulate) {
      auto f = scenario_or_case_study(c);
      auto r = duel::simulate(f.scenario, replications ? replications : f.replications,
                              simulate->count("--seed") ? seed : f.seed, c.threads);
      out.text = duel::emit_report(r, fmt);
    } else if (*analyze) {
      auto f = scenario_or_case_study(c);
      f.scenario.validate();
      duel::MomentOptions opt;
      opt.order = order;
      opt.h = step;
      auto r = duel::moments(f.scenario, f.scenario.t_star(), opt);
      out.text = duel::emit_report(r, fmt);
      out.accuracy_failure = inversion_failed(r);
    } else if (*run) {
      auto f = scenario_or_case_study(c);
      const auto reps = replications ? replications : f.replications;
      const auto sd = run->count("--seed") ? seed : f.seed;
      std::vector<duel::DecisionReport> reports;
      using duel::RunMode;
      if (f.mode == RunMode::deterministic || f.mode == RunMode::all)
        reports.push_back(duel::deterministic_report(f.scenario));
      if (f.mode == RunMode::monte_carlo || f.mode == RunMode::all)
        reports.push_back(duel::simulate(f.scenario, reps, sd, c.threads));
      if (f.mode == RunMode::analytic || f.mode == RunMode::all) {
        f.scenario.validate();
        duel::MomentOptions opt;
        opt.order = order;
        reports.push_back(duel::moments(f.scenario, f.scenario.t_star(), opt));
        out.accuracy_failure = inversion_failed(reports.back());
      }
      out.text = render_many(reports, fmt);
    } else if (*case_study) {
      out.text = duel::emit_report(duel::run_case_study(), fmt);
    } else if (*classic) {
      if (exhaustive > 0) {
        nlohmann::json rows = nlohmann::json::array();
        std::ostringstream o;
        o << "steps  instances  threshold-rule mismatches  same-index mismatches\n";
        for (int n = 1; n <= exhaustive; ++n) {
          auto e = duel::exhaustive_count(n);
          o << n << "  " << e.instances << "  " << e.rule_mismatches << "  " << e.same_index_mismatches << "\n";
          rows.push_back({{"steps", n},
                          {"instances", e.instances},
                          {"threshold_rule_mismatches", e.rule_mismatches},
                          {"same_index_mismatches", e.same_index_mismatches}});
          out.accuracy_failure |= e.rule_mismatches > 0;
        }
        out.text = fmt == duel::ReportFormat::json ? rows.dump(2) + "\n" : o.str();
      } else {
        if (pa.empty() || pb.empty()) throw duel::validation_error("classic-duel needs --p-a and --p-b, or --exhaustive");
        duel::ClassicalDuel d{parse_list(pa), parse_list(pb)};
        auto s = duel::classical_duel(d);
        if (fmt == duel::ReportFormat::json) {
          out.text = nlohmann::json{{"steps", d.steps()},
                                    {"shoot_step", s.shoot_step},
                                    {"shooter", duel::to_string(s.shooter)},
                                    {"backward_induction_step", s.backward_induction_step},
                                    {"win_prob_a", s.win_prob_a},
                                    {"same_index_step", s.same_index_step}}
                         .dump(2) +
                     "\n";
        } else {
          std::ostringstream o;
          o << "shoot at step " << s.shoot_step << " (" << duel::to_string(s.shooter) << " moves)\n"
            << "backward induction: step " << s.backward_induction_step << ", P(A wins) = " << s.win_prob_a << "\n"
            << "same-index rule p_a[i] + p_b[i] >= 1: step " << s.same_index_step << "\n";
          out.text = o.str();
        }
      }
    } else if (*check) {
      auto cases = duel::inversion_round_trip(order);
      nlohmann::json arr = nlohmann::json::array();
      std::ostringstream o;
      for (const auto& rt : cases) {
        const bool ok = rt.max_relative_error <= 1e-5;
        out.accuracy_failure |= !ok;
        o << (ok ? "ok    " : "FAIL  ") << rt.name << ": max relative error " << rt.max_relative_error << " over "
          << rt.points << " points (worst at p=" << rt.worst_p << ", q=" << rt.worst_q << ")\n";
        arr.push_back({{"case", rt.name},
                       {"max_relative_error", rt.max_relative_error},
                       {"points", rt.points},
                       {"ok", ok}});
      }
      out.text = fmt == duel::ReportFormat::json ? arr.dump(2) + "\n" : o.str();
    }

    write(c, out.text);
    if (out.accuracy_failure) {
      std::cerr << "error: numerical accuracy diagnostics exceeded their tolerance\n";
      return 2;
    }
    return 0;
  } catch (const duel::accuracy_error& e) {
    std::cerr << "error: " << e.what() << " (best estimate " << e.estimate() << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
