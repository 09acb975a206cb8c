#pragma once

// Tabular artifacts shared by the command-line front end. Every row is a JSON
// object; CSV and pretty output select a fixed column list from it, JSON emits
// the whole object. Non-integer numbers are rendered once, as strings, through
// the canonical scientific renderer so that all three formats carry the same
// digits and repeated runs produce identical bytes.

#include "partition_lab/bounds.hpp"
#include "partition_lab/bromwich.hpp"
#include "partition_lab/ext_real.hpp"
#include "partition_lab/lattice.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace partition_lab::report {

using Json = nlohmann::ordered_json;

inline constexpr int kDigits = 12;

enum class Format { csv, json, pretty };

inline std::string to_string(Format f) {
  switch (f) {
    case Format::csv:
      return "csv";
    case Format::json:
      return "json";
    case Format::pretty:
      return "pretty";
  }
  return "?";
}

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  if (s == "pretty") return Format::pretty;
  throw std::invalid_argument("unknown format \"" + s + "\" (expected csv, json or pretty)");
}

inline std::string render(const ExtReal& x) { return x.to_scientific(kDigits); }
inline std::string render(double x) { return ExtReal::from_double(x, 53).to_scientific(kDigits); }
inline std::string render(const BigInt& n) { return n.get_str(); }
inline std::string render(const Rational& r) { return r.get_str(); }

/// Short form for grid parameters inside case labels: 0.5, 10, 1.5.
inline std::string param(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

inline std::string join(const std::vector<std::uint64_t>& v, char sep = ' ') {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(sep);
    out += std::to_string(v[i]);
  }
  return out;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<Json> rows;

  bool all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const Json& r) { return !r.contains("pass") || r["pass"] == true; });
  }
};

// ---------------------------------------------------------------- verdicts

inline const std::vector<std::string>& verdict_columns() {
  static const std::vector<std::string> cols = {"label", "N", "exact", "lower", "upper",
                                                "log_lower_margin", "log_upper_margin", "pass"};
  return cols;
}

inline Json verdict_row(const bounds::BoundVerdict& v) {
  Json row;
  row["label"] = v.label;
  row["N"] = v.n;
  row["exact"] = render(v.exact);
  row["lower"] = v.lower ? Json(render(*v.lower)) : Json(nullptr);
  row["upper"] = render(v.upper);
  row["log_lower_margin"] = v.lower ? Json(render(v.log_lower_margin)) : Json(nullptr);
  row["log_upper_margin"] = render(v.log_upper_margin);
  row["pass"] = v.pass();
  row["pass_lower"] = v.pass_lower;
  row["pass_upper"] = v.pass_upper;
  row["decisive"] = v.decisive;
  row["precision"] = static_cast<long>(v.precision);
  if (!v.notes.empty()) {
    Json notes = Json::object();
    for (const auto& [k, val] : v.notes) notes[k] = val;
    row["notes"] = notes;
  }
  return row;
}

inline void sort_verdicts(std::vector<bounds::BoundVerdict>& rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return std::tie(a.label, a.n) < std::tie(b.label, b.n); });
}

inline Table verdict_table(std::vector<bounds::BoundVerdict> verdicts) {
  sort_verdicts(verdicts);
  Table t{verdict_columns(), {}};
  for (const auto& v : verdicts) t.rows.push_back(verdict_row(v));
  return t;
}

// ---------------------------------------------------------------- slopes

inline const std::vector<std::string>& slope_columns() {
  static const std::vector<std::string> cols = {"label", "N_min", "N_max", "expected", "measured", "tolerance", "pass"};
  return cols;
}

inline Json slope_row(const bounds::SlopeReport& r) {
  Json row;
  row["label"] = r.label;
  row["N_min"] = r.n_min;
  row["N_max"] = r.n_max;
  row["expected"] = render(r.exponent_expected);
  row["measured"] = render(r.exponent_measured);
  row["tolerance"] = render(r.tolerance);
  row["pass"] = r.pass;
  Json samples = Json::array();
  for (const auto& [n, ratio] : r.samples) samples.push_back(Json::array({n, render(ratio)}));
  row["samples"] = samples;
  return row;
}

// ---------------------------------------------------------------- lattice

inline const std::vector<std::string>& oracle_columns() {
  static const std::vector<std::string> cols = {"check", "case", "N", "detail", "pass"};
  return cols;
}

inline Json monomial_row(const lattice::MonomialReport& r) {
  Json row;
  row["check"] = "monomial";
  row["case"] = "r=" + join(r.r, ':');
  row["N"] = r.bound;
  row["detail"] = "series_one=" + render(r.series_one) + " lattice_one=" + render(r.lattice_one) +
                  " series_zero=" + render(r.series_zero) + " lattice_zero=" + render(r.lattice_zero);
  row["pass"] = r.series_one == r.lattice_one && r.series_zero == r.lattice_zero;
  row["series_one"] = render(r.series_one);
  row["lattice_one"] = render(r.lattice_one);
  row["series_zero"] = render(r.series_zero);
  row["lattice_zero"] = render(r.lattice_zero);
  return row;
}

inline Json sandwich_row(const lattice::SandwichReport& r) {
  Json row;
  row["check"] = "sandwich";
  row["case"] = "w=" + join(r.weights, ':');
  row["N"] = r.bound;
  row["detail"] = "count_one=" + render(r.count_one) + " volume=" + render(r.volume) +
                  " count_zero=" + render(r.count_zero);
  row["pass"] = r.count_one <= r.volume && r.volume <= r.count_zero;
  row["count_one"] = render(r.count_one);
  row["volume"] = render(r.volume);
  row["count_zero"] = render(r.count_zero);
  return row;
}

inline Json curved_row(const lattice::CurvedSandwichReport& r) {
  Json row;
  row["check"] = "curved_sandwich";
  row["case"] = "h=" + r.h + " w=" + join(r.weights, ':');
  row["N"] = r.bound;
  row["detail"] = "count_minus=" + render(r.count_minus) + " volume=" + render(r.volume.estimate) + " ci=[" +
                  render(r.volume.ci_low) + "," + render(r.volume.ci_high) + "] count_plus=" + render(r.count_plus);
  row["pass"] = r.status != lattice::CurvedStatus::fail;
  row["status"] = lattice::to_string(r.status);
  row["samples"] = r.volume.samples;
  row["seed"] = r.volume.seed;
  return row;
}

// ---------------------------------------------------------------- quadrature

inline const std::vector<std::string>& quadrature_columns() {
  static const std::vector<std::string> cols = {"check", "case", "quadrature", "reference", "rel_error", "tolerance",
                                                "pass"};
  return cols;
}

inline Json quadrature_row(const std::string& check, const std::string& params, const bromwich::InversionResult& r,
                           const ExtReal& reference, double tolerance) {
  const double rel = std::fabs((r.value - reference).to_double() / reference.to_double());
  Json row;
  row["check"] = check;
  row["case"] = params;
  row["quadrature"] = render(r.value);
  row["reference"] = render(reference);
  row["rel_error"] = render(rel);
  row["tolerance"] = render(tolerance);
  row["pass"] = rel <= tolerance;
  row["method"] = bromwich::to_string(r.method);
  row["nodes"] = r.nodes;
  return row;
}

inline Json perron_row(const bromwich::PerronBoundReport& r) {
  Json row;
  row["check"] = "perron_bound";
  row["case"] = "c=" + param(r.c);
  row["quadrature"] = render(r.fitted_constant);
  row["reference"] = render(r.allowed_constant);
  row["rel_error"] = nullptr;
  row["tolerance"] = nullptr;
  row["pass"] = r.pass;
  if (r.worst) {
    row["worst_x"] = render(r.worst->x);
    row["worst_T"] = render(r.worst->T);
  }
  return row;
}

// ---------------------------------------------------------------- emitters

inline std::string cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline Json summary(const Table& t) {
  std::size_t passed = 0;
  Json failures = Json::array();
  for (const auto& r : t.rows) {
    if (!r.contains("pass") || r["pass"] == true) {
      ++passed;
      continue;
    }
    const std::string key = r.contains("label") ? cell(r["label"]) : cell(r["check"]) + ":" + cell(r["case"]);
    failures.push_back(r.contains("N") ? key + "@" + cell(r["N"]) : key);
  }
  Json s;
  s["rows"] = t.rows.size();
  s["passed"] = passed;
  s["failed"] = t.rows.size() - passed;
  s["pass"] = failures.empty();
  s["failures"] = failures;
  return s;
}

inline void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      out << (i ? "," : "") << csv_field(r.contains(t.columns[i]) ? cell(r[t.columns[i]]) : "");
    }
    out << '\n';
  }
}

inline void write_pretty(std::ostream& out, const Table& t, const Json& s) {
  std::vector<std::size_t> width(t.columns.size());
  std::vector<std::vector<std::string>> cells;
  for (std::size_t i = 0; i < t.columns.size(); ++i) width[i] = t.columns[i].size();
  for (const auto& r : t.rows) {
    auto& line = cells.emplace_back();
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      line.push_back(r.contains(t.columns[i]) ? cell(r[t.columns[i]]) : "");
      if (line.back().empty()) line.back() = "-";
      width[i] = std::max(width[i], line.back().size());
    }
  }
  auto emit = [&](const std::vector<std::string>& line) {
    std::string text;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) text += "  ";
      text += line[i];
      if (i + 1 < line.size()) text.append(width[i] - line[i].size(), ' ');
    }
    out << text << '\n';
  };
  emit(t.columns);
  for (const auto& line : cells) emit(line);
  out << '\n'
      << s["passed"].get<std::size_t>() << "/" << s["rows"].get<std::size_t>() << " rows pass"
      << (s["pass"] == true ? "" : "; failures: " + std::to_string(s["failed"].get<std::size_t>())) << '\n';
}

/// Writes the artifact; JSON is {config, rows, summary}.
inline void write(std::ostream& out, Format f, const Json& config, const Table& t) {
  const Json s = summary(t);
  switch (f) {
    case Format::csv:
      write_csv(out, t);
      break;
    case Format::json: {
      Json doc;
      doc["config"] = config;
      doc["rows"] = t.rows;
      doc["summary"] = s;
      out << doc.dump(2) << '\n';
      break;
    }
    case Format::pretty:
      write_pretty(out, t, s);
      break;
  }
}

}  // namespace partition_lab::report
