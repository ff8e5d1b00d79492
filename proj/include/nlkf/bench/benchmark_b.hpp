#ifndef NLKF_BENCH_BENCHMARK_B_HPP
#define NLKF_BENCH_BENCHMARK_B_HPP

#include "nlkf/bench/benchmark_a.hpp"
#include "nlkf/models/maglev.hpp"

namespace nlkf {

struct MaglevTrajectory {
  std::vector<VectorXd> truth;     // truth[k], k = 0..horizon
  std::vector<double> controls;    // controls[k] applied from k to k+1
  std::vector<double> measurements;  // measurements[k], k = 1..horizon
};

struct BenchmarkBContext {
  ExperimentConfig cfg;
  SystemModel filter_model;
  UtParams ut;
  MaglevController controller;
  double initial_current = 0.0;

  explicit BenchmarkBContext(const ExperimentConfig& config) : cfg(config) {
    filter_model = cfg.maglev.filter_model();
    ut.lambda = cfg.ut_lambda.value_or(3.0 - filter_model.n);
    ut.w0_simplex = cfg.ut_w0_simplex;
    const auto eq = maglev_equilibrium(cfg.maglev_gap0, cfg.maglev_mass_true,
                                       cfg.maglev.constants);
    initial_current = eq.current;
    controller.gap_ref = cfg.maglev_gap0;
    controller.kp = cfg.maglev_ctrl_kp;
    controller.kd = cfg.maglev_ctrl_kd;
    controller.u_eq = eq.voltage;
  }

  double true_mass_at(int k) const {
    if (cfg.maglev_mass_step_time >= 0.0 &&
        k * cfg.maglev.dt >= cfg.maglev_mass_step_time)
      return cfg.maglev_mass_step_value;
    return cfg.maglev_mass_true;
  }

  // Closed-loop truth simulation; the control sequence computed from the true
  // state is recorded and later handed to every filter as a known input.
  MaglevTrajectory simulate(int run) const {
    Rng rng(derive_seed(cfg.seed ^ 0x6d61676cULL, run));
    MaglevTrajectory traj;
    const int horizon = cfg.maglev_horizon;
    traj.truth.reserve(horizon + 1);
    traj.controls.reserve(horizon);
    traj.measurements.assign(horizon + 1, 0.0);

    VectorXd x(4);
    x << cfg.maglev_gap0 + cfg.maglev_gap0_offset, 0.0, initial_current,
        true_mass_at(0);
    traj.truth.push_back(x);
    const double sd_vel = std::sqrt(cfg.maglev_sim_q_vel);
    const double sd_cur = std::sqrt(cfg.maglev_sim_q_cur);
    const double sd_meas = std::sqrt(cfg.maglev.meas_noise_var);
    for (int k = 1; k <= horizon; ++k) {
      const double u = controller.control(x);
      traj.controls.push_back(u);
      x = cfg.maglev.step(x, u, (k - 1) * cfg.maglev.dt);
      x(1) += sd_vel * normal_sample(rng);
      x(2) += sd_cur * normal_sample(rng);
      x(3) = true_mass_at(k);
      if (!(x(0) > 0.0))
        throw DomainError("maglev scenario: air gap left the physical domain");
      traj.truth.push_back(x);
      traj.measurements[k] = x(0) + sd_meas * normal_sample(rng);
    }
    return traj;
  }

  struct FilterRun {
    double airgap_mse = 0.0;
    double param_mse = 0.0;
    double mass_error_ratio = 0.0;
  };

  FilterRun run_filter(FilterKind kind, const MaglevTrajectory& traj) const {
    FilterOptions opt;
    opt.joseph = cfg.joseph_form;
    VectorXd mean0(4);
    mean0 << cfg.maglev_gap0, 0.0, initial_current, cfg.maglev_mass_est0;
    VectorXd p0(4);
    p0 << cfg.maglev_p0_gap, cfg.maglev_p0_vel, cfg.maglev_p0_cur,
        cfg.maglev_p0_mass;
    FilterState state{GaussianBelief(mean0, MatrixXd(p0.asDiagonal())), 0};

    const double initial_mass_error =
        std::abs(cfg.maglev_mass_est0 - true_mass_at(0));
    FilterRun out;
    const int horizon = cfg.maglev_horizon;
    for (int k = 1; k <= horizon; ++k) {
      state = filter_step(kind, state, filter_model,
                          VectorXd::Constant(1, traj.controls[k - 1]),
                          VectorXd::Constant(1, traj.measurements[k]), ut, opt);
      const double gap_err = state.belief.mean(0) - traj.truth[k](0);
      const double mass_err = state.belief.mean(3) - traj.truth[k](3);
      out.airgap_mse += gap_err * gap_err;
      out.param_mse += mass_err * mass_err;
      if (k == horizon && initial_mass_error > 0.0)
        out.mass_error_ratio = std::abs(mass_err) / initial_mass_error;
    }
    out.airgap_mse /= horizon;
    out.param_mse /= horizon;
    return out;
  }
};

inline ExperimentReport run_benchmark_b(const ExperimentConfig& cfg) {
  BenchmarkBContext ctx(cfg);
  std::vector<BenchFilter> filters;
  for (BenchFilter f : cfg.filters)
    if (f == BenchFilter::Ekf || f == BenchFilter::Ukf || f == BenchFilter::NewKf)
      filters.push_back(f);
  if (filters.empty())
    filters = {BenchFilter::Ekf, BenchFilter::Ukf, BenchFilter::NewKf};

  const int runs = cfg.maglev_mc_runs;
  struct Outcome {
    BenchmarkBContext::FilterRun run;
    bool failed = false;
  };
  std::vector<std::vector<Outcome>> outcomes(filters.size(),
                                             std::vector<Outcome>(runs));

  detail::parallel_runs(runs, cfg.threads, [&](int r) {
    const auto traj = ctx.simulate(r);
    for (size_t fi = 0; fi < filters.size(); ++fi) {
      try {
        outcomes[fi][r].run =
            ctx.run_filter(detail::kalman_kind(filters[fi]), traj);
      } catch (const FilterError&) {
        outcomes[fi][r].failed = true;
      }
    }
  });

  ExperimentReport report;
  report.benchmark = "b";
  report.seed = cfg.seed;
  {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(cfg.hash()));
    report.config_hash = buf;
  }
  report.jacobian_mode = "numeric(f)/analytic(h)";
  report.machine = machine_descriptor();
  report.mc_runs = runs;
  report.horizon = cfg.maglev_horizon;
  report.config_snapshot = cfg.to_map();
  report.notes = "maglev constants are placeholder values; absolute MSE "
                 "figures are not comparable across constant sets";

  for (size_t fi = 0; fi < filters.size(); ++fi) {
    FilterResult row;
    row.name = bench_filter_name(filters[fi]);
    double gap_sum = 0.0, gap_sq = 0.0, par_sum = 0.0, ratio_sum = 0.0;
    int ok = 0;
    for (const auto& out : outcomes[fi]) {
      if (out.failed) {
        ++row.failed_runs;
        continue;
      }
      gap_sum += out.run.airgap_mse;
      gap_sq += out.run.airgap_mse * out.run.airgap_mse;
      par_sum += out.run.param_mse;
      ratio_sum += out.run.mass_error_ratio;
      ++ok;
    }
    if (ok > 0) {
      row.mse_mean = gap_sum / ok;
      if (ok > 1)
        row.mse_stderr =
            std::sqrt((gap_sq / ok - row.mse_mean * row.mse_mean) / (ok - 1));
      row.param_mse = par_sum / ok;
      row.mass_error_ratio = ratio_sum / ok;
    }
    report.rows.push_back(row);
  }

  const int timing_runs = std::min(cfg.timing_runs, runs);
  std::vector<MaglevTrajectory> trajs;
  for (int r = 0; r < timing_runs; ++r) trajs.push_back(ctx.simulate(r));
  for (size_t fi = 0; fi < filters.size(); ++fi) {
    double total = 0.0;
    std::vector<double> per_run;
    for (int r = 0; r < timing_runs; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        ctx.run_filter(detail::kalman_kind(filters[fi]), trajs[r]);
      } catch (const FilterError&) {
        continue;
      }
      const auto t1 = std::chrono::steady_clock::now();
      const double dt = std::chrono::duration<double>(t1 - t0).count();
      total += dt;
      per_run.push_back(dt);
    }
    report.rows[fi].total_time_s = total;
    if (!per_run.empty()) {
      std::sort(per_run.begin(), per_run.end());
      report.rows[fi].per_step_median_us =
          per_run[per_run.size() / 2] / cfg.maglev_horizon * 1e6;
    }
  }
  return report;
}

}  // namespace nlkf

#endif
