#ifndef NLKF_BENCH_CONFIG_HPP
#define NLKF_BENCH_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nlkf/errors.hpp"
#include "nlkf/models/maglev.hpp"
#include "nlkf/models/time_series.hpp"

namespace nlkf {

enum class BenchFilter {
  Ekf,
  Ssukf,
  Spukf,
  Ukf,
  NewKf,
  Pf,
  PfEkf,
  PfUkf,
  PfNewKf,
};

inline const char* bench_filter_name(BenchFilter f) {
  switch (f) {
    case BenchFilter::Ekf: return "EKF";
    case BenchFilter::Ssukf: return "SSUKF";
    case BenchFilter::Spukf: return "SPUKF";
    case BenchFilter::Ukf: return "UKF";
    case BenchFilter::NewKf: return "NewKF";
    case BenchFilter::Pf: return "PF";
    case BenchFilter::PfEkf: return "PF-EKF";
    case BenchFilter::PfUkf: return "PF-UKF";
    case BenchFilter::PfNewKf: return "PF-NewKF";
  }
  return "?";
}

inline BenchFilter bench_filter_from_name(const std::string& s) {
  for (BenchFilter f :
       {BenchFilter::Ekf, BenchFilter::Ssukf, BenchFilter::Spukf,
        BenchFilter::Ukf, BenchFilter::NewKf, BenchFilter::Pf,
        BenchFilter::PfEkf, BenchFilter::PfUkf, BenchFilter::PfNewKf})
    if (s == bench_filter_name(f)) return f;
  throw DomainError("unknown filter name: " + s);
}

inline bool is_particle_filter(BenchFilter f) {
  return f == BenchFilter::Pf || f == BenchFilter::PfEkf ||
         f == BenchFilter::PfUkf || f == BenchFilter::PfNewKf;
}

// Flat key-value experiment configuration. Every knob of both benchmarks is
// addressable here; `bench config --defaults` prints the full schema.
struct ExperimentConfig {
  char benchmark = 'a';
  std::vector<BenchFilter> filters = {
      BenchFilter::Ekf,  BenchFilter::Ssukf, BenchFilter::Spukf,
      BenchFilter::Ukf,  BenchFilter::NewKf, BenchFilter::Pf,
      BenchFilter::PfEkf, BenchFilter::PfUkf, BenchFilter::PfNewKf};
  int mc_runs = 1000;
  int horizon = 60;
  std::uint64_t seed = 20240901;
  int particle_count = 200;
  std::optional<double> ut_lambda;  // default: 3 - n per benchmark
  double ut_w0_simplex = 0.5;
  bool joseph_form = true;
  int threads = 0;       // 0 = hardware concurrency
  int timing_runs = 100;  // serialized timing phase

  // Benchmark A (time series)
  TimeSeriesModel ts;
  double ts_x0 = 1.0;
  double ts_est0 = 1.0;
  double ts_p0 = 1e-3;

  // Benchmark B (maglev)
  MaglevModel maglev;
  int maglev_horizon = 3000;
  int maglev_mc_runs = 20;
  double maglev_gap0 = 1e-2;
  double maglev_gap0_offset = 2e-3;  // initial gap error exciting the transient
  double maglev_mass_true = 10.0;
  double maglev_mass_step_time = -1.0;  // seconds; < 0 disables the load change
  double maglev_mass_step_value = 12.0;
  double maglev_mass_est0 = 13.0;
  double maglev_p0_gap = 1e-8;
  double maglev_p0_vel = 1e-4;
  double maglev_p0_cur = 1e-2;
  double maglev_p0_mass = 9.0;
  double maglev_sim_q_vel = 1e-6;  // truth process noise (velocity channel)
  double maglev_sim_q_cur = 1e-6;  // truth process noise (current channel)
  // Soft position loop: larger, slower gap transients keep the nonlinear
  // force term excited long enough for the mass channel to be observable.
  double maglev_ctrl_kp = 1500.0;
  double maglev_ctrl_kd = 60.0;

  std::map<std::string, std::string> to_map() const;
  static ExperimentConfig from_map(const std::map<std::string, std::string>& kv);

  std::string serialize() const {
    std::ostringstream os;
    for (const auto& [k, v] : to_map()) os << k << " = " << v << "\n";
    return os.str();
  }

  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : serialize()) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct ConfigIo {
  std::map<std::string, std::string>* out = nullptr;
  const std::map<std::string, std::string>* in = nullptr;

  void field(const std::string& key, double& v) {
    if (out) (*out)[key] = fmt_double(v);
    else if (auto it = in->find(key); it != in->end()) v = std::stod(it->second);
  }
  void field(const std::string& key, int& v) {
    if (out) (*out)[key] = std::to_string(v);
    else if (auto it = in->find(key); it != in->end()) v = std::stoi(it->second);
  }
  void field(const std::string& key, std::uint64_t& v) {
    if (out) (*out)[key] = std::to_string(v);
    else if (auto it = in->find(key); it != in->end()) v = std::stoull(it->second);
  }
  void field(const std::string& key, bool& v) {
    if (out) (*out)[key] = v ? "true" : "false";
    else if (auto it = in->find(key); it != in->end())
      v = (it->second == "true" || it->second == "1");
  }
};

}  // namespace detail

inline void config_fields(ExperimentConfig& c, detail::ConfigIo& io) {
  io.field("mc_runs", c.mc_runs);
  io.field("horizon", c.horizon);
  io.field("seed", c.seed);
  io.field("particle_count", c.particle_count);
  io.field("ut.w0_simplex", c.ut_w0_simplex);
  io.field("joseph_form", c.joseph_form);
  io.field("threads", c.threads);
  io.field("timing_runs", c.timing_runs);

  io.field("ts.omega", c.ts.omega);
  io.field("ts.phi", c.ts.phi);
  io.field("ts.gamma_shape", c.ts.gamma_shape);
  io.field("ts.gamma_scale", c.ts.gamma_scale);
  io.field("ts.obs_noise_var", c.ts.obs_noise_var);
  io.field("ts.switch_time", c.ts.switch_time);
  io.field("ts.x0", c.ts_x0);
  io.field("ts.est0", c.ts_est0);
  io.field("ts.p0", c.ts_p0);

  auto& mc = c.maglev.constants;
  io.field("maglev.mu0", mc.mu0);
  io.field("maglev.A_ag", mc.A_ag);
  io.field("maglev.N_turns", mc.N_turns);
  io.field("maglev.H_c", mc.H_c);
  io.field("maglev.L_PM", mc.L_PM);
  io.field("maglev.mu_r", mc.mu_r);
  io.field("maglev.A_PM", mc.A_PM);
  io.field("maglev.R_c", mc.R_c);
  io.field("maglev.h_geom", mc.h_geom);
  io.field("maglev.R_L", mc.R_L);
  io.field("maglev.R_coil", mc.R_coil);
  io.field("maglev.K_coeff", mc.K_coeff);
  io.field("maglev.g_gravity", mc.g_gravity);
  io.field("maglev.dt", c.maglev.dt);
  io.field("maglev.q_gap", c.maglev.q_gap);
  io.field("maglev.q_vel", c.maglev.q_vel);
  io.field("maglev.q_cur", c.maglev.q_cur);
  io.field("maglev.q_mass", c.maglev.q_mass);
  io.field("maglev.meas_noise_var", c.maglev.meas_noise_var);
  io.field("maglev.horizon", c.maglev_horizon);
  io.field("maglev.mc_runs", c.maglev_mc_runs);
  io.field("maglev.gap0", c.maglev_gap0);
  io.field("maglev.gap0_offset", c.maglev_gap0_offset);
  io.field("maglev.mass_true", c.maglev_mass_true);
  io.field("maglev.mass_step_time", c.maglev_mass_step_time);
  io.field("maglev.mass_step_value", c.maglev_mass_step_value);
  io.field("maglev.mass_est0", c.maglev_mass_est0);
  io.field("maglev.p0_gap", c.maglev_p0_gap);
  io.field("maglev.p0_vel", c.maglev_p0_vel);
  io.field("maglev.p0_cur", c.maglev_p0_cur);
  io.field("maglev.p0_mass", c.maglev_p0_mass);
  io.field("maglev.sim_q_vel", c.maglev_sim_q_vel);
  io.field("maglev.sim_q_cur", c.maglev_sim_q_cur);
  io.field("maglev.ctrl_kp", c.maglev_ctrl_kp);
  io.field("maglev.ctrl_kd", c.maglev_ctrl_kd);
}

inline std::map<std::string, std::string> ExperimentConfig::to_map() const {
  std::map<std::string, std::string> kv;
  kv["benchmark"] = std::string(1, benchmark);
  std::string fl;
  for (BenchFilter f : filters) {
    if (!fl.empty()) fl += ",";
    fl += bench_filter_name(f);
  }
  kv["filters"] = fl;
  if (ut_lambda) kv["ut.lambda"] = detail::fmt_double(*ut_lambda);
  detail::ConfigIo io;
  io.out = &kv;
  config_fields(const_cast<ExperimentConfig&>(*this), io);
  return kv;
}

inline ExperimentConfig ExperimentConfig::from_map(
    const std::map<std::string, std::string>& kv) {
  ExperimentConfig c;
  if (auto it = kv.find("benchmark"); it != kv.end()) {
    if (it->second != "a" && it->second != "b")
      throw DomainError("config: benchmark must be 'a' or 'b'");
    c.benchmark = it->second[0];
  }
  if (auto it = kv.find("filters"); it != kv.end()) {
    c.filters.clear();
    std::istringstream is(it->second);
    std::string tok;
    while (std::getline(is, tok, ','))
      if (!tok.empty()) c.filters.push_back(bench_filter_from_name(tok));
    if (c.filters.empty()) throw DomainError("config: empty filter list");
  }
  if (auto it = kv.find("ut.lambda"); it != kv.end())
    c.ut_lambda = std::stod(it->second);
  detail::ConfigIo io;
  io.in = &kv;
  config_fields(c, io);
  if (c.mc_runs < 1) throw DomainError("config: mc_runs must be >= 1");
  return c;
}

// Flat `key = value` file; '#' starts a comment.
inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = val;
  }
  return ExperimentConfig::from_map(kv);
}

}  // namespace nlkf

#endif
