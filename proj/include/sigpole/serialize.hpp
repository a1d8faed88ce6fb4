#pragma once

// JSON, CSV and plain-text renderings of results. Every JSON document
// carries the tool version, schema version and the run configuration.

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "sigpole/blowup.hpp"
#include "sigpole/poles.hpp"
#include "sigpole/quadrature.hpp"
#include "sigpole/signature.hpp"
#include "sigpole/version.hpp"

namespace sigpole {

using Json = nlohmann::ordered_json;

enum class OutputFormat { json, csv, text };

inline OutputFormat parse_output_format(std::string_view s) {
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  if (s == "text") return OutputFormat::text;
  throw ParseError("unknown output format '" + std::string(s) + "' (expected json, csv or text)");
}

inline std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::json: return "json";
    case OutputFormat::csv: return "csv";
    case OutputFormat::text: return "text";
  }
  return "json";
}

/// Default seed: the bytes of "FBM0".
inline constexpr std::uint64_t kDefaultSeed = 0x46424D30ULL;

struct RunConfig {
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t samples = 1'000'000;
  double tol = 1e-8;
  std::vector<std::int64_t> q;  // empty: 3^r
  NormalizationMode mode = NormalizationMode::matching;
  OutputFormat output = OutputFormat::json;
  int workers = 1;
  std::optional<Method> method;  // empty: auto

  EvalOptions eval_options() const { return {method, samples, seed, tol, workers}; }
};

inline std::string hex_seed(std::uint64_t seed) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%llX", static_cast<unsigned long long>(seed));
  return buf;
}

/// 17 significant digits, shortest form that round-trips.
inline std::string format_double(double v) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline Json to_json(const RunConfig& c) {
  Json j;
  j["seed"] = hex_seed(c.seed);
  j["samples"] = c.samples;
  j["tol"] = c.tol;
  if (c.q.empty())
    j["q"] = "3^r";
  else
    j["q"] = c.q;
  j["mode"] = to_string(c.mode);
  j["output"] = to_string(c.output);
  j["workers"] = c.workers;
  j["method"] = c.method ? to_string(*c.method) : "auto";
  return j;
}

inline Json envelope(const std::string& command, const RunConfig& config) {
  Json j;
  j["tool"] = "sigpole";
  j["version"] = kVersion;
  j["schema"] = kSchemaVersion;
  j["command"] = command;
  j["config"] = to_json(config);
  return j;
}

inline std::string provenance(Method m) {
  if (m == Method::closed_form) return "closed-form";
  return is_stochastic(m) ? "stochastic" : "deterministic";
}

// ---------------------------------------------------------------------------
// Poles

inline Json to_json(const RationalProgression& p) {
  return Json{{"offset", to_string(p.offset())}, {"step", to_string(p.step())}};
}

inline Json to_json(const PoleContribution& c) {
  Json j = to_json(c.progression);
  j["witness"] = to_string(c.witness);
  j["size"] = c.size;
  j["twice_bracket"] = 2 * c.bracket;
  return j;
}

inline Json to_json(const PoleSet& set) {
  Json arr = Json::array();
  for (const auto& p : set.progressions()) arr.push_back(to_json(p));
  return arr;
}

inline Json partition_poles_json(const PairPartition& partition, const std::vector<PoleContribution>& contributions) {
  Json j;
  j["pairs"] = to_string(partition);
  j["progressions"] = to_json(pole_set_of(contributions));
  Json list = Json::array();
  for (const auto& c : contributions) list.push_back(to_json(c));
  j["contributions"] = list;
  return j;
}

inline Json to_json(const PoleReport& report) {
  Json j;
  j["word"] = to_string(report.word);
  j["progressions"] = to_json(report.poles);
  Json parts = Json::array();
  for (const auto& p : report.partitions) parts.push_back(partition_poles_json(p.partition, p.contributions));
  j["partitions"] = parts;
  if (report.partitions.empty()) j["note"] = "no refining pair partitions";
  return j;
}

inline Json to_json(const BracketBreakdown& b) {
  return Json{{"size", b.size},
              {"augmented_components", b.augmented_components},
              {"deficient_points", b.deficient_points},
              {"twice_bracket", b.twice_bracket}};
}

// ---------------------------------------------------------------------------
// Evaluations

inline Json to_json(const EvalResult& r) {
  Json j;
  j["value"] = r.value;
  j["method"] = to_string(r.method);
  j["provenance"] = provenance(r.method);
  if (r.std_error) j["stderr"] = *r.std_error;
  if (r.robust_error) j["robust_err"] = *r.robust_error;
  if (r.tol) j["tol"] = *r.tol;
  j[is_stochastic(r.method) ? "samples" : "cells"] = r.count;
  if (r.seed) j["seed"] = hex_seed(*r.seed);
  if (r.workers) j["workers"] = *r.workers;
  j["H"] = r.H;
  j[r.method == Method::wick_grid ? "word" : "partition"] = r.subject;
  return j;
}

inline Json to_json(const MeanSignature& m) {
  Json j;
  j["word"] = to_string(m.word);
  j["H"] = m.H;
  j["mode"] = to_string(m.mode);
  j["value"] = m.value;
  j[m.stochastic ? "stderr" : "tol"] = m.uncertainty;
  if (m.method) {
    j["method"] = to_string(*m.method);
    j["provenance"] = provenance(*m.method);
  } else {
    j["method"] = "none";
    j["provenance"] = "exact";
    j["note"] = "no refining pair partitions";
  }
  j["prefactor"] = m.prefactor;
  j["sum_L"] = m.sum_l;
  j["other_mode_value"] = m.other_mode_value;
  if (m.discrepancy) j["discrepancy"] = *m.discrepancy;
  Json terms = Json::array();
  for (const auto& t : m.terms) terms.push_back(to_json(t.result));
  j["terms"] = terms;
  return j;
}

inline Json to_json(const GammaTable& t) {
  Json j;
  j["k"] = t.k;
  j["d"] = t.d;
  j["H"] = t.H;
  j["mode"] = to_string(t.mode);
  j["classes"] = t.classes;
  Json rows = Json::array();
  for (const auto& e : t.entries) {
    Json row;
    row["word"] = to_string(e.word);
    row["coefficient"] = e.value;
    row["method"] = e.method ? to_string(*e.method) : "none";
    row["provenance"] = e.method ? provenance(*e.method) : "exact";
    row[e.stochastic ? "stderr" : "tol"] = e.uncertainty;
    rows.push_back(row);
  }
  j["entries"] = rows;
  return j;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// word,coefficient,method,stderr with a comment line carrying mode and version.
inline std::string to_csv(const GammaTable& t, const RunConfig& config) {
  std::ostringstream out;
  out << "# sigpole " << kVersion << " mode=" << to_string(t.mode) << " k=" << t.k << " d=" << t.d
      << " H=" << format_double(t.H) << " seed=" << hex_seed(config.seed) << "\n";
  out << "word,coefficient,method,stderr\n";
  for (const auto& e : t.entries)
    out << csv_quote(to_string(e.word)) << "," << format_double(e.value) << ","
        << (e.method ? to_string(*e.method) : "none") << "," << format_double(e.uncertainty) << "\n";
  return out.str();
}

inline std::string to_csv(const MeanSignature& m, const RunConfig& config) {
  std::ostringstream out;
  out << "# sigpole " << kVersion << " mode=" << to_string(m.mode) << " H=" << format_double(m.H)
      << " seed=" << hex_seed(config.seed) << "\n";
  out << "word,value,method,stderr\n";
  out << csv_quote(to_string(m.word)) << "," << format_double(m.value) << ","
      << (m.method ? to_string(*m.method) : "none") << "," << format_double(m.uncertainty) << "\n";
  return out.str();
}

inline std::string to_csv(const EvalResult& r) {
  std::ostringstream out;
  out << "# sigpole " << kVersion << "\n";
  out << "partition,H,value,method,error,count\n";
  out << csv_quote(r.subject) << "," << format_double(r.H) << "," << format_double(r.value) << ","
      << to_string(r.method) << "," << format_double(r.uncertainty()) << "," << r.count << "\n";
  return out.str();
}

/// offset,step,witness,size,twice_bracket
inline std::string to_csv(const std::vector<PoleContribution>& contributions) {
  std::ostringstream out;
  out << "offset,step,witness,size,twice_bracket\n";
  for (const auto& c : contributions)
    out << to_string(c.progression.offset()) << "," << to_string(c.progression.step()) << ","
        << csv_quote(to_string(c.witness)) << "," << c.size << "," << 2 * c.bracket << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Chart descriptor

inline Json to_json(const BlowupChart& chart) {
  std::vector<std::int64_t> q(chart.q().values().begin(), chart.q().values().begin() + chart.n() + 1);
  return Json{{"n", chart.n()}, {"q", q}};
}

inline BlowupChart chart_from_json(const Json& j) {
  try {
    const int n = j.at("n").get<int>();
    return BlowupChart(n, GapFunction(j.at("q").get<std::vector<std::int64_t>>()));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("chart descriptor: ") + e.what());
  }
}

}  // namespace sigpole
