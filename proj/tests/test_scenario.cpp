#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "duel/case_study.hpp"
#include "duel/classical.hpp"
#include "duel/report.hpp"
#include "duel/scenario.hpp"

using duel::ClassicalDuel;
using duel::ReportFormat;

namespace {

const std::string base = R"({
  "schema_version": 1,
  "player_a": {
    "initial_delay": {"kind": "deterministic", "value": 0},
    "cycle": {"kind": "exponential", "rate": 0.5}
  },
  "player_b": {
    "initial_delay": {"kind": "deterministic", "value": 1},
    "cycle": {"kind": "deterministic", "value": 2}
  },
  "t_star": 4
})";

int error_line(const std::string& doc) {
  try {
    duel::load_scenario(doc);
  } catch (const duel::validation_error& e) {
    return e.line();
  }
  return -1;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  auto pos = s.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return s.replace(pos, from.size(), to);
}

ClassicalDuel make_duel(int n, const std::function<double(int)>& a, const std::function<double(int)>& b) {
  ClassicalDuel d;
  for (int i = 1; i <= n; ++i) {
    d.p_a.push_back(a(i));
    d.p_b.push_back(b(i));
  }
  return d;
}

// Game-tree search: A's winning probability and first shooting step when the
// game is entered at `step`. Ties go to waiting.
std::pair<double, int> solve_tree(const ClassicalDuel& d, int step) {
  const bool a_moves = step % 2 == 1;
  const double shoot = a_moves ? d.p_a[step - 1] : 1.0 - d.p_b[step - 1];
  if (step == d.steps()) return {shoot, step};
  auto wait = solve_tree(d, step + 1);
  const bool better = a_moves ? shoot > wait.first + 1e-12 : shoot < wait.first - 1e-12;
  return better ? std::pair{shoot, step} : wait;
}

void monotone_sequences(int n, int g, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == n) {
    out.push_back(cur);
    return;
  }
  for (int v = cur.empty() ? 0 : cur.back(); v <= g; ++v) {
    cur.push_back(v);
    monotone_sequences(n, g, cur, out);
    cur.pop_back();
  }
}

}  // namespace

TEST(LoadScenario, BundledFile) {
  auto f = duel::load_scenario_file(std::string(DUEL_SOURCE_DIR) + "/scenarios/case_study.json");
  const auto& sc = f.scenario;
  EXPECT_EQ(sc.a.renewal.initial_delay, duel::Distribution::deterministic(0));
  EXPECT_EQ(sc.a.renewal.cycle, duel::Distribution::deterministic(6));
  EXPECT_EQ(sc.b.renewal.initial_delay, duel::Distribution::deterministic(5));
  EXPECT_EQ(sc.b.renewal.cycle, duel::Distribution::deterministic(4));
  EXPECT_EQ(*sc.t_star_override, 17.95);
  EXPECT_EQ(f.mode, duel::RunMode::deterministic);
  EXPECT_EQ(emit_scenario(f), emit_scenario(duel::case_study_scenario()));
}

TEST(LoadScenario, CurvesWithoutTStar) {
  auto doc = replace(base, R"("t_star": 4)", R"("mode": "monte-carlo")");
  doc = replace(doc, R"("player_a": {)", R"("player_a": {"curve": {"kind": "exponential-saturation", "rate": 1},)");
  doc = replace(doc, R"("player_b": {)", R"("player_b": {"curve": {"kind": "exponential-saturation", "rate": 1},)");
  auto f = duel::load_scenario(doc);
  EXPECT_FALSE(f.scenario.t_star_override);
  EXPECT_NEAR(f.scenario.t_star(), std::log(2.0), 1e-9);
}

TEST(LoadScenario, LineAnchoredErrors) {
  EXPECT_EQ(error_line(replace(base, R"("rate": 0.5)", R"("rate": -0.5)")), 5);
  EXPECT_EQ(error_line(replace(base, R"("t_star": 4)", R"("t_star": 4, "mode": "monte-carlo",
  "replications": 0)")), 12);
  EXPECT_EQ(error_line(replace(base, R"("t_star": 4)", R"("t_star": 4,
  "colour": "red")")), 12);
  EXPECT_EQ(error_line(replace(base, R"("kind": "deterministic", "value": 2)", R"("kind": "gamma", "shape": 2)")), 9);
  EXPECT_EQ(error_line(replace(base, R"("schema_version": 1)", R"("schema_version": 2)")), 2);
  EXPECT_EQ(error_line(replace(base, R"("t_star": 4)", R"("seed": 1)")), 3);
  EXPECT_EQ(error_line(replace(base, R"("player_a": {)", R"("player_a": {
    "curve": {"kind": "tabulated", "knots": [[0, 0.5], [1, 0.3], [2, 1]]},)")), 4);
  EXPECT_GT(error_line(base.substr(0, base.size() - 3)), 0);
}

TEST(LoadScenario, ZeroReplicationsOnlyMatterForMonteCarlo) {
  EXPECT_NO_THROW(duel::load_scenario(replace(base, R"("t_star": 4)", R"("t_star": 4, "replications": 0)")));
  EXPECT_THROW(duel::load_scenario(replace(base, R"("t_star": 4)", R"("t_star": 4, "replications": 0, "mode": "all")")),
               duel::validation_error);
}

TEST(EmitScenario, RoundTripsEveryKind) {
  duel::ScenarioFile f;
  auto& sc = f.scenario;
  sc.time_unit = "weeks";
  sc.a = {"north", duel::SuccessCurve::logistic(16, 0.5),
          {duel::Distribution::exponential(0.3), duel::Distribution::exponential(1.0 / 6)}};
  sc.b = {"south", duel::SuccessCurve::tabulated({{0, 0.1}, {2.5, 0.4}, {7, 1}}),
          {duel::Distribution::deterministic(5), duel::Distribution::deterministic(4)}};
  sc.threshold_a = 3.25;
  sc.trace_condition = false;
  f.mode = duel::RunMode::all;
  f.replications = 123;
  f.seed = 99;
  const auto text = duel::emit_scenario(f);
  auto back = duel::load_scenario(text);
  EXPECT_EQ(duel::emit_scenario(back), text);
  EXPECT_EQ(back.scenario.a.renewal, sc.a.renewal);
  EXPECT_EQ(back.scenario.b.renewal, sc.b.renewal);
  EXPECT_EQ(back.scenario.a.curve->eval(17.3), sc.a.curve->eval(17.3));
  EXPECT_EQ(*back.scenario.threshold_a, 3.25);
  EXPECT_FALSE(back.scenario.threshold_b);
  EXPECT_FALSE(back.scenario.trace_condition);
  EXPECT_EQ(back.seed, 99u);

  sc.a.curve = duel::SuccessCurve::exponential_saturation(0.1);
  sc.b.curve = duel::SuccessCurve::linear_ramp(30);
  EXPECT_EQ(duel::emit_scenario(duel::load_scenario(duel::emit_scenario(f))), duel::emit_scenario(f));
}

TEST(CaseStudy, MatchesDecisionTable) {
  auto r = duel::run_case_study();
  EXPECT_EQ(r.t_star, 17.95);
  EXPECT_EQ(r.mu, 3);
  EXPECT_EQ(r.moments.S_mu.value, 18.0);
  EXPECT_EQ(r.nu, 4);
  EXPECT_EQ(r.moments.T_nu.value, 21.0);
  EXPECT_EQ(r.moments.T_nu_minus_1.value, 17.0);
  EXPECT_LT(r.t_star, r.moments.S_mu.value);
  EXPECT_LT(r.moments.S_mu.value, r.moments.T_nu.value);
  EXPECT_EQ(r.win_prob_a.value, 1.0);
  EXPECT_EQ(duel::emit_report(r, ReportFormat::json), duel::emit_report(duel::run_case_study(), ReportFormat::json));
}

TEST(Report, HumanHasTableRows) {
  const auto text = duel::emit_report(duel::run_case_study(), ReportFormat::human);
  for (const char* row : {"t*         17.95", "E[mu]      3", "E[S_mu]    18", "E[nu]      4", "E[T_nu]    21"})
    EXPECT_NE(text.find(row), std::string::npos) << row << "\n" << text;
}

TEST(Report, JsonRoundTrip) {
  auto sc = duel::case_study_scenario().scenario;
  sc.a.renewal.cycle = duel::Distribution::exponential(1.0 / 6);
  auto r = duel::simulate(sc, 3000, 4, 1);
  auto j = nlohmann::json::parse(duel::emit_report(r, ReportFormat::json));
  EXPECT_EQ(j["moments"]["S_mu"]["value"].get<double>(), r.moments.S_mu.value);
  EXPECT_EQ(j["moments"]["S_mu"]["std_error"].get<double>(), *r.moments.S_mu.std_error);
  EXPECT_EQ(j["win_prob_a"]["value"].get<double>(), r.win_prob_a.value);
  EXPECT_EQ(j["mu"].get<long>(), r.mu);
  EXPECT_EQ(j["t_star"].get<double>(), r.t_star);
  EXPECT_EQ(j["mode"], "monte-carlo");
}

TEST(Report, CsvColumnsFollowMode) {
  auto det = duel::emit_report(duel::run_case_study(), ReportFormat::csv);
  EXPECT_EQ(det.substr(0, det.find('\n')), "quantity,mean,std_error,replications");
  EXPECT_NE(det.find("\nS_mu,18,,\n"), std::string::npos) << det;

  auto sc = duel::case_study_scenario().scenario;
  sc.b.renewal.cycle = duel::Distribution::exponential(0.25);
  auto mc = duel::emit_report(duel::simulate(sc, 2000, 1, 1), ReportFormat::csv);
  auto line = mc.substr(mc.find("\nT_nu,") + 1);
  line = line.substr(0, line.find('\n'));
  std::vector<std::string> cols;
  for (std::size_t s = 0, e; (e = line.find(',', s)) != std::string::npos || s <= line.size(); s = e + 1) {
    cols.push_back(line.substr(s, e == std::string::npos ? std::string::npos : e - s));
    if (e == std::string::npos) break;
  }
  ASSERT_EQ(cols.size(), 4u) << line;
  EXPECT_FALSE(cols[2].empty());
  EXPECT_EQ(cols[3], "2000");
}

TEST(Classical, Examples) {
  auto s1 = duel::classical_duel(make_duel(10, [](int i) { return i / 10.0; }, [](int i) { return i / 10.0; }));
  EXPECT_EQ(s1.shoot_step, 5);
  EXPECT_EQ(s1.shooter, duel::Shooter::a);
  EXPECT_TRUE(s1.rule_matches_induction());

  auto s2 = duel::classical_duel(make_duel(1, [](int) { return 0.5; }, [](int) { return 0.5; }));
  EXPECT_EQ(s2.shoot_step, 1);

  auto s3 = duel::classical_duel(make_duel(10, [](int i) { return i / 10.0; }, [](int i) { return i / 20.0; }));
  EXPECT_EQ(s3.shoot_step, 7);
  EXPECT_EQ(s3.backward_induction_step, 7);
}

TEST(Classical, SameIndexRuleCanDisagree) {
  // B at step 2 prefers 1 - 0.4 = 0.6 over waiting for A's 0.7 at step 3.
  ClassicalDuel d{{0, 0.4, 0.7, 1}, {0, 0.4, 0.7, 1}};
  auto s = duel::classical_duel(d);
  EXPECT_EQ(s.backward_induction_step, 2);
  EXPECT_EQ(s.shoot_step, 2);
  EXPECT_EQ(s.same_index_step, 3);
}

TEST(Classical, Validation) {
  EXPECT_THROW(duel::classical_duel({{0.1, 0.2}, {0.1, 0.2}}), duel::no_crossing_error);
  EXPECT_THROW(duel::classical_duel({{0.5, 0.4}, {0.5, 1.0}}), duel::validation_error);
  EXPECT_THROW(duel::classical_duel({{0.5}, {0.5, 1.0}}), duel::validation_error);
  EXPECT_THROW(duel::classical_duel({{1.5}, {0.5}}), duel::validation_error);
}

TEST(Classical, RuleMatchesGameTreeOnSmallGrids) {
  for (int n = 1; n <= 4; ++n) {
    std::vector<std::vector<int>> seqs;
    std::vector<int> cur;
    monotone_sequences(n, 10, cur, seqs);
    std::uint64_t instances = 0, same_mismatch = 0;
    for (const auto& a : seqs)
      for (const auto& b : seqs) {
        if (a.back() + b.back() < 10) continue;
        ClassicalDuel d;
        for (int i = 0; i < n; ++i) {
          d.p_a.push_back(a[i] / 10.0);
          d.p_b.push_back(b[i] / 10.0);
        }
        const auto tree = solve_tree(d, 1);
        const auto s = duel::classical_duel(d);
        ASSERT_EQ(s.shoot_step, tree.second);
        ASSERT_EQ(s.backward_induction_step, tree.second);
        ASSERT_NEAR(s.win_prob_a, tree.first, 1e-12);
        ++instances;
        same_mismatch += s.same_index_step != tree.second;
      }
    auto count = duel::exhaustive_count(n);
    EXPECT_EQ(count.instances, instances);
    EXPECT_EQ(count.rule_mismatches, 0u);
    EXPECT_EQ(count.same_index_mismatches, same_mismatch);
  }
}
