// Benchmark driver: seeded Monte-Carlo filter comparisons, flop-count sweeps,
// and per-step trace dumps.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "nlkf/bench/benchmark_a.hpp"
#include "nlkf/bench/benchmark_b.hpp"
#include "nlkf/complexity.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitScenario = 3;
constexpr int kExitFilterFailures = 4;

std::vector<long> parse_n_range(const std::string& spec) {
  std::vector<long> out;
  if (spec.find(',') != std::string::npos) {
    std::istringstream is(spec);
    std::string tok;
    while (std::getline(is, tok, ',')) out.push_back(std::stol(tok));
  } else if (auto colon = spec.find(':'); colon != std::string::npos) {
    const long a = std::stol(spec.substr(0, colon));
    std::string rest = spec.substr(colon + 1);
    long step = 1, b;
    if (auto colon2 = rest.find(':'); colon2 != std::string::npos) {
      b = std::stol(rest.substr(0, colon2));
      step = std::stol(rest.substr(colon2 + 1));
    } else {
      b = std::stol(rest);
    }
    for (long n = a; n <= b; n += step) out.push_back(n);
  } else if (!spec.empty()) {
    out.push_back(std::stol(spec));
  }
  return out;
}

// m rules: "half" -> ceil(n/2), "equal" -> n, or an integer constant.
// j rules: "<k>n" -> k*n, or an integer constant.
std::function<long(long)> parse_rule(const std::string& spec) {
  if (spec == "half") return [](long n) { return (n + 1) / 2; };
  if (spec == "equal") return [](long n) { return n; };
  if (!spec.empty() && spec.back() == 'n') {
    const std::string head = spec.substr(0, spec.size() - 1);
    const long k = head.empty() ? 1 : std::stol(head);
    return [k](long n) { return k * n; };
  }
  const long c = std::stol(spec);
  return [c](long) { return c; };
}

int cmd_run(const std::string& config_path, const std::string& benchmark,
            const std::string& filters, int runs, long long seed,
            const std::string& out_path, const std::string& format) {
  nlkf::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = nlkf::load_config(config_path);
    if (!benchmark.empty()) {
      if (benchmark != "a" && benchmark != "b")
        throw nlkf::DomainError("benchmark must be a or b");
      cfg.benchmark = benchmark[0];
    }
    if (!filters.empty()) {
      cfg.filters.clear();
      std::istringstream is(filters);
      std::string tok;
      while (std::getline(is, tok, ','))
        cfg.filters.push_back(nlkf::bench_filter_from_name(tok));
    }
    if (runs > 0) {
      cfg.mc_runs = runs;
      cfg.maglev_mc_runs = runs;
    }
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  nlkf::ExperimentReport report;
  try {
    report = cfg.benchmark == 'a' ? nlkf::run_benchmark_a(cfg)
                                  : nlkf::run_benchmark_b(cfg);
  } catch (const nlkf::DomainError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitScenario;
  }

  try {
    if (out_path.empty() || out_path == "-") {
      if (format == "csv") std::cout << nlkf::report_to_csv(report);
      else if (format == "json")
        std::cout << nlkf::report_to_json(report).dump(2) << "\n";
      else std::cout << nlkf::report_to_markdown(report);
    } else {
      nlkf::write_report(report, out_path, format);
    }
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kExitConfig;
  }

  const int total_runs = report.mc_runs;
  for (const auto& row : report.rows)
    if (row.failed_runs > 0.01 * total_runs) {
      std::cerr << "filter " << row.name << " failed " << row.failed_runs << "/"
                << total_runs << " runs\n";
      return kExitFilterFailures;
    }
  return 0;
}

int cmd_sweep(const std::string& n_spec, const std::string& m_spec,
              const std::string& j_spec, const std::string& out_path) {
  std::vector<long> n_values;
  std::function<long(long)> m_rule, j_rule;
  try {
    n_values = parse_n_range(n_spec);
    if (n_values.empty()) throw nlkf::DomainError("empty n range");
    m_rule = parse_rule(m_spec);
    j_rule = parse_rule(j_spec);
  } catch (const std::exception& e) {
    std::cerr << "sweep error: " << e.what() << "\n";
    return kExitConfig;
  }

  const auto rows = nlkf::sweep_grid(n_values, m_rule, j_rule);
  std::ostringstream os;
  os << "n,m,j,ukf_flops,newkf_flops,reduction\n";
  for (const auto& r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%ld,%ld,%ld,%lld,%lld,%.10g\n", r.n, r.m,
                  r.j, static_cast<long long>(r.ukf_flops),
                  static_cast<long long>(r.newkf_flops), r.reduction);
    os << buf;
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << os.str();
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << out_path << "\n";
      return kExitConfig;
    }
    out << os.str();
  }
  std::cerr << nlkf::flop_model_notes() << "\n";
  return 0;
}

int cmd_trace(const std::string& config_path, int run_index,
              const std::string& out_path) {
  nlkf::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = nlkf::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  std::vector<nlkf::TraceRow> rows;
  try {
    rows = nlkf::trace_benchmark_a(cfg, run_index);
  } catch (const nlkf::DomainError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitScenario;
  }
  std::ostringstream os;
  os << "t,truth";
  std::vector<std::string> names;
  if (!rows.empty())
    for (const auto& [name, _] : rows.front().error) names.push_back(name);
  for (const auto& n : names) os << ",err_" << n << ",var_" << n;
  os << "\n";
  for (const auto& row : rows) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%d,%.10g", row.t, row.truth);
    os << buf;
    for (const auto& n : names) {
      std::snprintf(buf, sizeof(buf), ",%.10g,%.10g", row.error.at(n),
                    row.variance.at(n));
      os << buf;
    }
    os << "\n";
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << os.str();
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << out_path << "\n";
      return kExitConfig;
    }
    out << os.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nonlinear Kalman filter benchmark driver"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a Monte-Carlo benchmark");
  std::string run_benchmark, run_config, run_filters, run_out, run_format = "csv";
  int run_runs = -1;
  long long run_seed = -1;
  run->add_option("--benchmark", run_benchmark, "a or b");
  run->add_option("--config", run_config, "flat key=value config file");
  run->add_option("--filters", run_filters, "comma-separated filter list");
  run->add_option("--runs", run_runs, "Monte-Carlo run count");
  run->add_option("--seed", run_seed, "master seed");
  run->add_option("--out", run_out, "output path ('-' for stdout)");
  run->add_option("--format", run_format, "csv|json|md")
      ->check(CLI::IsMember({"csv", "json", "md"}));

  auto* sweep = app.add_subcommand("sweep", "flop-count reduction sweep");
  std::string sweep_n, sweep_m = "half", sweep_j = "10n", sweep_out;
  sweep->add_option("--n", sweep_n, "n values: list 'a,b,c' or range 'a:b[:step]'")
      ->required();
  sweep->add_option("--m", sweep_m, "m rule: 'half', 'equal', or a constant");
  sweep->add_option("--j", sweep_j, "j rule: '<k>n' or a constant");
  sweep->add_option("--out", sweep_out, "output CSV path ('-' for stdout)");

  auto* trace = app.add_subcommand("trace", "per-step error/covariance series");
  std::string trace_benchmark = "a", trace_config, trace_out;
  int trace_run = 0;
  trace->add_option("--benchmark", trace_benchmark, "only 'a' is traceable");
  trace->add_option("--config", trace_config, "flat key=value config file");
  trace->add_option("--run-index", trace_run, "Monte-Carlo run to trace");
  trace->add_option("--out", trace_out, "output CSV path ('-' for stdout)");

  auto* config = app.add_subcommand("config", "configuration helpers");
  bool config_defaults = false;
  config->add_flag("--defaults", config_defaults, "print the default config");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed())
    return cmd_run(run_config, run_benchmark, run_filters, run_runs, run_seed,
                   run_out, run_format);
  if (sweep->parsed()) return cmd_sweep(sweep_n, sweep_m, sweep_j, sweep_out);
  if (trace->parsed()) {
    if (trace_benchmark != "a") {
      std::cerr << "trace supports benchmark a only\n";
      return kExitConfig;
    }
    return cmd_trace(trace_config, trace_run, trace_out);
  }
  if (config->parsed()) {
    std::cout << nlkf::ExperimentConfig{}.serialize();
    return 0;
  }
  return kExitConfig;
}
