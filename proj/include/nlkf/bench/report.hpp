#ifndef NLKF_BENCH_REPORT_HPP
#define NLKF_BENCH_REPORT_HPP

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "nlkf/bench/config.hpp"

namespace nlkf {

struct FilterResult {
  std::string name;
  double mse_mean = 0.0;
  double mse_stderr = 0.0;
  // Benchmark B only: the parameter (mass) channel, reported separately.
  double param_mse = std::numeric_limits<double>::quiet_NaN();
  double mass_error_ratio = std::numeric_limits<double>::quiet_NaN();
  int failed_runs = 0;
  double total_time_s = 0.0;
  double per_step_median_us = 0.0;
};

struct ExperimentReport {
  std::string benchmark;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string jacobian_mode;
  std::string version = "nlkf 0.1.0";
  std::string machine;
  std::string notes;
  int mc_runs = 0;
  int horizon = 0;
  std::map<std::string, std::string> config_snapshot;
  std::vector<FilterResult> rows;
};

inline std::string machine_descriptor() {
  std::ostringstream os;
  os << "threads=" << std::thread::hardware_concurrency();
#if defined(__VERSION__)
  os << " compiler=gcc-compatible " << __VERSION__;
#endif
  return os.str();
}

namespace detail {

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

inline std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace detail

// Column order is fixed; the two timing columns come last so determinism
// comparisons can strip them.
inline std::string report_to_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << "filter,mse_mean,mse_stderr,param_mse,mass_error_ratio,failed_runs,"
        "total_time_s,per_step_median_us\n";
  for (const auto& row : r.rows) {
    os << detail::csv_quote(row.name) << ',' << detail::num(row.mse_mean) << ','
       << detail::num(row.mse_stderr) << ',' << detail::num(row.param_mse) << ','
       << detail::num(row.mass_error_ratio) << ',' << row.failed_runs << ','
       << detail::num(row.total_time_s) << ','
       << detail::num(row.per_step_median_us) << '\n';
  }
  return os.str();
}

// The CSV body with timing fields blanked, for byte-comparison across runs.
inline std::string report_determinism_body(const ExperimentReport& r) {
  std::istringstream in(report_to_csv(r));
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    // Drop the last two columns (timing).
    auto pos = line.rfind(',');
    if (pos != std::string::npos) pos = line.rfind(',', pos - 1);
    out << (pos == std::string::npos ? line : line.substr(0, pos)) << '\n';
  }
  return out.str();
}

inline nlohmann::ordered_json report_to_json(const ExperimentReport& r) {
  nlohmann::ordered_json j;
  j["benchmark"] = r.benchmark;
  j["seed"] = r.seed;
  j["config_hash"] = r.config_hash;
  j["jacobian_mode"] = r.jacobian_mode;
  j["version"] = r.version;
  j["machine"] = r.machine;
  j["notes"] = r.notes;
  j["mc_runs"] = r.mc_runs;
  j["horizon"] = r.horizon;
  j["config"] = r.config_snapshot;
  j["results"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json e;
    e["filter"] = row.name;
    e["mse_mean"] = row.mse_mean;
    e["mse_stderr"] = row.mse_stderr;
    if (!std::isnan(row.param_mse)) e["param_mse"] = row.param_mse;
    if (!std::isnan(row.mass_error_ratio))
      e["mass_error_ratio"] = row.mass_error_ratio;
    e["failed_runs"] = row.failed_runs;
    e["total_time_s"] = row.total_time_s;
    e["per_step_median_us"] = row.per_step_median_us;
    j["results"].push_back(e);
  }
  return j;
}

// Table 1/2 style layout: Filter | Execution Time (s) | MSE.
inline std::string report_to_markdown(const ExperimentReport& r) {
  const bool has_param =
      !r.rows.empty() && !std::isnan(r.rows.front().param_mse);
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header = {"Filter", "Execution Time (s)", "MSE"};
  if (has_param) header.push_back("Parameter MSE");
  cells.push_back(header);
  for (const auto& row : r.rows) {
    std::vector<std::string> line = {row.name, detail::num(row.total_time_s),
                                     detail::num(row.mse_mean)};
    if (has_param) line.push_back(detail::num(row.param_mse));
    cells.push_back(line);
  }
  std::vector<size_t> width(header.size(), 0);
  for (const auto& line : cells)
    for (size_t i = 0; i < line.size(); ++i)
      width[i] = std::max(width[i], line[i].size());

  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& line) {
    os << '|';
    for (size_t i = 0; i < line.size(); ++i)
      os << ' ' << std::left << std::setw(static_cast<int>(width[i])) << line[i]
         << " |";
    os << '\n';
  };
  emit(cells[0]);
  os << '|';
  for (size_t i = 0; i < width.size(); ++i)
    os << ' ' << std::string(width[i], '-') << " |";
  os << '\n';
  for (size_t i = 1; i < cells.size(); ++i) emit(cells[i]);
  return os.str();
}

inline void write_report(const ExperimentReport& r, const std::string& path,
                         const std::string& format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write report to " + path);
  if (format == "csv") out << report_to_csv(r);
  else if (format == "json") out << report_to_json(r).dump(2) << '\n';
  else if (format == "md") out << report_to_markdown(r);
  else throw DomainError("unknown report format: " + format);
}

inline ExperimentReport parse_json_report(const std::string& text) {
  const auto j = nlohmann::ordered_json::parse(text);
  ExperimentReport r;
  r.benchmark = j.at("benchmark");
  r.seed = j.at("seed");
  r.config_hash = j.at("config_hash");
  r.jacobian_mode = j.at("jacobian_mode");
  r.version = j.at("version");
  r.machine = j.at("machine");
  r.notes = j.at("notes");
  r.mc_runs = j.at("mc_runs");
  r.horizon = j.at("horizon");
  for (const auto& [k, v] : j.at("config").items())
    r.config_snapshot[k] = v.get<std::string>();
  for (const auto& e : j.at("results")) {
    FilterResult row;
    row.name = e.at("filter");
    row.mse_mean = e.at("mse_mean");
    row.mse_stderr = e.at("mse_stderr");
    if (e.contains("param_mse")) row.param_mse = e.at("param_mse");
    if (e.contains("mass_error_ratio"))
      row.mass_error_ratio = e.at("mass_error_ratio");
    row.failed_runs = e.at("failed_runs");
    row.total_time_s = e.at("total_time_s");
    row.per_step_median_us = e.at("per_step_median_us");
    r.rows.push_back(row);
  }
  return r;
}

}  // namespace nlkf

#endif
