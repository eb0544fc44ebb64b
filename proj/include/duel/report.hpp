#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "duel/engine.hpp"
#include "duel/errors.hpp"

namespace duel {

enum class ReportFormat { human, json, csv };

inline ReportFormat parse_report_format(const std::string& s) {
  if (s == "human") return ReportFormat::human;
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  throw validation_error("unknown format \"" + s + "\" (human, json, csv)");
}

namespace detail {

inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string num(const Quantity& q) {
  std::string s = num(q.value);
  if (q.std_error) s += " +/- " + num(*q.std_error);
  return s;
}

/// Shortest text that parses back to the same double.
inline std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

struct Row {
  std::string key;
  Quantity q;
};

/// Every quantity of a report in a fixed order, keyed as in the JSON output.
inline std::vector<Row> rows(const DecisionReport& r) {
  using Q = Quantity;
  std::vector<Row> out{
      {"t_star", Q::exact(r.t_star)},
      {"mu", Q::exact(static_cast<double>(r.mu))},
      {"S_mu", r.moments.S_mu},
      {"nu", Q::exact(static_cast<double>(r.nu))},
      {"T_nu", r.moments.T_nu},
      {"S_mu_minus_1", r.moments.S_mu_minus_1},
      {"T_nu_minus_1", r.moments.T_nu_minus_1},
      {"win_prob_a", r.win_prob_a},
      {"confined_prob", r.confined_prob},
  };
  if (r.conditional) {
    out.push_back({"conditional.S_mu", r.conditional->S_mu});
    out.push_back({"conditional.S_mu_minus_1", r.conditional->S_mu_minus_1});
    out.push_back({"conditional.T_nu", r.conditional->T_nu});
    out.push_back({"conditional.T_nu_minus_1", r.conditional->T_nu_minus_1});
  }
  if (r.restricted) {
    out.push_back({"restricted.S_mu", r.restricted->S_mu});
    out.push_back({"restricted.S_mu_minus_1", r.restricted->S_mu_minus_1});
    out.push_back({"restricted.T_nu", r.restricted->T_nu});
    out.push_back({"restricted.T_nu_minus_1", r.restricted->T_nu_minus_1});
  }
  if (r.mean_index_mu) out.push_back({"mean_index_mu", *r.mean_index_mu});
  if (r.mean_index_nu) out.push_back({"mean_index_nu", *r.mean_index_nu});
  return out;
}

inline nlohmann::json quantity_json(const Quantity& q) {
  nlohmann::json j = {{"value", q.value}};
  j["std_error"] = q.std_error ? nlohmann::json(*q.std_error) : nlohmann::json(nullptr);
  j["replications"] = q.replications ? nlohmann::json(*q.replications) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json moments_json(const ExitMoments& m) {
  return {{"S_mu", quantity_json(m.S_mu)},
          {"S_mu_minus_1", quantity_json(m.S_mu_minus_1)},
          {"T_nu", quantity_json(m.T_nu)},
          {"T_nu_minus_1", quantity_json(m.T_nu_minus_1)}};
}

inline std::string human(const DecisionReport& r) {
  std::ostringstream o;
  const std::string& u = r.time_unit;
  o << "Decision parameters (" << to_string(r.mode) << ", time unit: " << u << ")\n";
  o << "  " << r.name_a << ": first epoch mean " << num(r.mean_delay_a) << ", cycle mean " << num(r.mean_cycle_a)
    << "\n";
  o << "  " << r.name_b << ": first epoch mean " << num(r.mean_delay_b) << ", cycle mean " << num(r.mean_cycle_b)
    << "\n\n";

  struct Line {
    std::string param, value, desc;
  };
  std::vector<Line> table{
      {"Parameter", "Value", "Description"},
      {"t*", num(r.t_star), "Crossing moment: earliest time with P_a + P_b >= 1"},
      {"E[mu]", std::to_string(r.mu), "Cycles " + r.name_a + " runs after its first epoch before exiting"},
      {"E[S_mu]", num(r.moments.S_mu), "Exit time of " + r.name_a + " (first epoch at or past its threshold)"},
      {"E[nu]", std::to_string(r.nu), "Cycles " + r.name_b + " runs after its first epoch before exiting"},
      {"E[T_nu]", num(r.moments.T_nu), "Exit time of " + r.name_b + " (first epoch at or past its threshold)"},
  };
  std::size_t w0 = 0, w1 = 0;
  for (const auto& l : table) {
    w0 = std::max(w0, l.param.size());
    w1 = std::max(w1, l.value.size());
  }
  for (const auto& l : table) o << pad(l.param, w0 + 2) << pad(l.value, w1 + 2) << l.desc << "\n";

  o << "\nAdditional quantities\n";
  o << "  E[S_mu-1]            " << num(r.moments.S_mu_minus_1) << "\n";
  o << "  E[T_nu-1]            " << num(r.moments.T_nu_minus_1) << "\n";
  o << "  P(S_mu <= T_nu)      " << num(r.win_prob_a) << "\n";
  o << "  P(trace event)       " << num(r.confined_prob) << "\n";
  if (r.threshold_a != r.t_star || r.threshold_b != r.t_star)
    o << "  thresholds U, V      " << num(r.threshold_a) << ", " << num(r.threshold_b) << "\n";
  if (r.conditional && r.mode == Mode::monte_carlo) {
    o << "  on the trace event:  E[S_mu] " << num(r.conditional->S_mu) << ", E[T_nu] " << num(r.conditional->T_nu)
      << ", E[S_mu-1] " << num(r.conditional->S_mu_minus_1) << ", E[T_nu-1] " << num(r.conditional->T_nu_minus_1)
      << "\n";
  }
  if (r.mean_index_mu && r.mean_index_nu)
    o << "  mean exit indices    " << num(*r.mean_index_mu) << ", " << num(*r.mean_index_nu) << "\n";
  if (r.inversion_disagreement)
    o << "  inversion N vs N-2   " << num(*r.inversion_disagreement) << " (relative)\n";
  if (r.richardson_change) o << "  Richardson h vs h/2  " << num(*r.richardson_change) << " (relative)\n";
  if (r.printed_phi) o << "  printed-form Phi(0)  " << num(*r.printed_phi) << "\n";
  for (const auto& w : r.warnings) o << "warning: " << w << "\n";
  return o.str();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace detail

inline nlohmann::json report_json(const DecisionReport& r) {
  using nlohmann::json;
  json j;
  j["mode"] = to_string(r.mode);
  j["time_unit"] = r.time_unit;
  j["players"] = {{"a", {{"name", r.name_a}, {"mean_initial_delay", r.mean_delay_a}, {"mean_cycle", r.mean_cycle_a}}},
                  {"b", {{"name", r.name_b}, {"mean_initial_delay", r.mean_delay_b}, {"mean_cycle", r.mean_cycle_b}}}};
  j["t_star"] = r.t_star;
  j["thresholds"] = {{"a", r.threshold_a}, {"b", r.threshold_b}};
  j["mu"] = r.mu;
  j["nu"] = r.nu;
  j["moments"] = detail::moments_json(r.moments);
  j["win_prob_a"] = detail::quantity_json(r.win_prob_a);
  j["confined_prob"] = detail::quantity_json(r.confined_prob);
  j["conditional"] = r.conditional ? detail::moments_json(*r.conditional) : json(nullptr);
  j["restricted"] = r.restricted ? detail::moments_json(*r.restricted) : json(nullptr);
  j["mean_index_mu"] = r.mean_index_mu ? detail::quantity_json(*r.mean_index_mu) : json(nullptr);
  j["mean_index_nu"] = r.mean_index_nu ? detail::quantity_json(*r.mean_index_nu) : json(nullptr);
  j["inversion_disagreement"] = r.inversion_disagreement ? json(*r.inversion_disagreement) : json(nullptr);
  j["printed_phi"] = r.printed_phi ? json(*r.printed_phi) : json(nullptr);
  j["richardson_change"] = r.richardson_change ? json(*r.richardson_change) : json(nullptr);
  j["warnings"] = r.warnings;
  return j;
}

/// Renders a report. JSON keys are fixed and sorted; CSV has one row per
/// quantity with blank std_error/replications for exact values.
inline std::string emit_report(const DecisionReport& r, ReportFormat format) {
  switch (format) {
    case ReportFormat::human: return detail::human(r);
    case ReportFormat::json: return report_json(r).dump(2) + "\n";
    case ReportFormat::csv: {
      std::ostringstream o;
      o << "quantity,mean,std_error,replications\n";
      for (const auto& row : detail::rows(r)) {
        o << detail::csv_field(row.key) << ',' << detail::shortest(row.q.value) << ',';
        if (row.q.std_error) o << detail::shortest(*row.q.std_error);
        o << ',';
        if (row.q.replications) o << *row.q.replications;
        o << '\n';
      }
      return o.str();
    }
  }
  return {};
}

}  // namespace duel
