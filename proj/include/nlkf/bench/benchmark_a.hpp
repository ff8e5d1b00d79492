#ifndef NLKF_BENCH_BENCHMARK_A_HPP
#define NLKF_BENCH_BENCHMARK_A_HPP

#include <atomic>
#include <chrono>
#include <cstring>
#include <thread>

#include "nlkf/bench/report.hpp"
#include "nlkf/particle.hpp"

namespace nlkf {

namespace detail {

inline std::uint64_t hash_doubles(const std::vector<double>& v) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double d : v) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

inline FilterKind kalman_kind(BenchFilter f) {
  switch (f) {
    case BenchFilter::Ekf: return FilterKind::Ekf;
    case BenchFilter::Ssukf: return FilterKind::Ssukf;
    case BenchFilter::Spukf: return FilterKind::Spukf;
    case BenchFilter::Ukf: return FilterKind::Ukf;
    case BenchFilter::NewKf: return FilterKind::NewKf;
    default: throw DomainError("not a Kalman-type filter");
  }
}

inline ProposalKind proposal_kind(BenchFilter f) {
  switch (f) {
    case BenchFilter::Pf: return ProposalKind::Prior;
    case BenchFilter::PfEkf: return ProposalKind::Ekf;
    case BenchFilter::PfUkf: return ProposalKind::Ukf;
    case BenchFilter::PfNewKf: return ProposalKind::NewKf;
    default: throw DomainError("not a particle filter");
  }
}

// Run all runs of [0, total) across a worker pool; results are written by
// run index so the outcome is independent of scheduling.
template <class Body>
void parallel_runs(int total, int threads, const Body& body) {
  int workers = threads > 0 ? threads
                            : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, total));
  if (workers == 1) {
    for (int r = 0; r < total; ++r) body(r);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int r = next.fetch_add(1); r < total; r = next.fetch_add(1)) body(r);
    });
  for (auto& t : pool) t.join();
}

}  // namespace detail

struct BenchmarkAContext {
  ExperimentConfig cfg;
  SystemModel filter_model;
  ParticleModel particle_model;
  UtParams ut;

  explicit BenchmarkAContext(const ExperimentConfig& config) : cfg(config) {
    filter_model = cfg.ts.filter_model();
    ut.lambda = cfg.ut_lambda.value_or(3.0 - filter_model.n);
    ut.w0_simplex = cfg.ut_w0_simplex;

    particle_model.n = 1;
    particle_model.kf_model = filter_model;
    particle_model.sample_transition = [ts = cfg.ts](const VectorXd& x, int t,
                                                     Rng& rng) {
      const double v = gamma_sample(ts.gamma_shape, ts.gamma_scale, rng);
      return VectorXd::Constant(1, ts.transition(x(0), t) + v);
    };
    particle_model.transition_log_pdf = [ts = cfg.ts](const VectorXd& xn,
                                                      const VectorXd& xp, int t) {
      return ts.transition_log_pdf(xn(0), xp(0), t);
    };
    particle_model.likelihood_log_pdf = [ts = cfg.ts](const VectorXd& y,
                                                      const VectorXd& x, int t) {
      return ts.likelihood_log_pdf(y(0), x(0), t);
    };
  }

  TimeSeriesModel::Trajectory simulate(int run) const {
    Rng rng(derive_seed(cfg.seed, run));
    return cfg.ts.simulate(cfg.horizon, cfg.ts_x0, rng);
  }

  // Posterior-mean estimate sequence of a Kalman-type filter, t = 1..horizon.
  std::vector<double> kalman_estimates(FilterKind kind,
                                       const std::vector<double>& measurements,
                                       double p0_scale = 1.0) const {
    FilterOptions opt;
    opt.joseph = cfg.joseph_form;
    FilterState state{GaussianBelief(VectorXd::Constant(1, cfg.ts_est0),
                                     MatrixXd::Constant(1, 1, cfg.ts_p0 * p0_scale)),
                      0};
    std::vector<double> est;
    est.reserve(cfg.horizon);
    const VectorXd u(0);
    for (int t = 1; t <= cfg.horizon; ++t) {
      state = filter_step(kind, state, filter_model, u,
                          VectorXd::Constant(1, measurements[t]), ut, opt);
      est.push_back(state.belief.mean(0));
    }
    return est;
  }

  std::vector<double> pf_estimates(ProposalKind kind,
                                   const std::vector<double>& measurements,
                                   std::uint64_t master_seed) const {
    const int n = cfg.particle_count;
    ParticleEnsemble ens;
    Rng init_rng(derive_seed(master_seed, 0xFFFFFFFFull));
    ens.particles.reserve(n);
    const double sd = std::sqrt(cfg.ts_p0);
    for (int i = 0; i < n; ++i)
      ens.particles.push_back(
          VectorXd::Constant(1, cfg.ts_est0 + sd * normal_sample(init_rng)));
    ens.weights = VectorXd::Constant(n, 1.0 / n);
    if (kind != ProposalKind::Prior)
      ens.per_particle_cov.assign(n, MatrixXd::Constant(1, 1, cfg.ts_p0));

    PfOptions opt;
    opt.ut_params = ut;
    std::vector<double> est;
    est.reserve(cfg.horizon);
    for (int t = 1; t <= cfg.horizon; ++t) {
      ens = pf_step(ens, particle_model, VectorXd::Constant(1, measurements[t]),
                    kind, master_seed, opt);
      est.push_back(ens.mean_estimate(0));
    }
    return est;
  }

  std::uint64_t pf_seed(int run, BenchFilter f) const {
    return derive_seed(cfg.seed ^ 0x70617274ULL,
                       static_cast<std::uint64_t>(run) * 16 +
                           static_cast<int>(f));
  }
};

struct RunOutcome {
  double mse = 0.0;
  bool failed = false;
};

inline double mse_of(const std::vector<double>& est,
                     const std::vector<double>& truth) {
  double acc = 0.0;
  for (size_t t = 0; t < est.size(); ++t) {
    const double e = est[t] - truth[t + 1];
    acc += e * e;
  }
  return acc / est.size();
}

inline ExperimentReport run_benchmark_a(const ExperimentConfig& cfg) {
  BenchmarkAContext ctx(cfg);
  const int runs = cfg.mc_runs;
  const auto& filters = cfg.filters;

  std::vector<std::vector<RunOutcome>> outcomes(
      filters.size(), std::vector<RunOutcome>(runs));

  detail::parallel_runs(runs, cfg.threads, [&](int r) {
    const auto traj = ctx.simulate(r);
    const std::uint64_t meas_hash = detail::hash_doubles(traj.measurements);
    for (size_t fi = 0; fi < filters.size(); ++fi) {
      // Every filter must consume the identical per-run measurement sequence.
      if (detail::hash_doubles(traj.measurements) != meas_hash)
        throw FilterError("measurement sequence mutated between filters");
      RunOutcome& out = outcomes[fi][r];
      try {
        std::vector<double> est;
        if (is_particle_filter(filters[fi]))
          est = ctx.pf_estimates(detail::proposal_kind(filters[fi]),
                                 traj.measurements, ctx.pf_seed(r, filters[fi]));
        else
          est = ctx.kalman_estimates(detail::kalman_kind(filters[fi]),
                                     traj.measurements);
        out.mse = mse_of(est, traj.truth);
      } catch (const FilterError&) {
        out.failed = true;
      }
    }
  });

  ExperimentReport report;
  report.benchmark = "a";
  report.seed = cfg.seed;
  {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(cfg.hash()));
    report.config_hash = buf;
  }
  report.jacobian_mode = "analytic";
  report.machine = machine_descriptor();
  report.mc_runs = runs;
  report.horizon = cfg.horizon;
  report.config_snapshot = cfg.to_map();

  for (size_t fi = 0; fi < filters.size(); ++fi) {
    FilterResult row;
    row.name = bench_filter_name(filters[fi]);
    double sum = 0.0, sumsq = 0.0;
    int ok = 0;
    for (const auto& out : outcomes[fi]) {
      if (out.failed) {
        ++row.failed_runs;
        continue;
      }
      sum += out.mse;
      sumsq += out.mse * out.mse;
      ++ok;
    }
    if (ok > 0) {
      row.mse_mean = sum / ok;
      if (ok > 1)
        row.mse_stderr =
            std::sqrt((sumsq / ok - row.mse_mean * row.mse_mean) / (ok - 1));
    }
    report.rows.push_back(row);
  }

  // Serialized timing phase: re-run a subset of runs per filter, timing only
  // the filter pass (simulation excluded).
  const int timing_runs = std::min(cfg.timing_runs, runs);
  std::vector<TimeSeriesModel::Trajectory> trajs;
  trajs.reserve(timing_runs);
  for (int r = 0; r < timing_runs; ++r) trajs.push_back(ctx.simulate(r));
  for (size_t fi = 0; fi < filters.size(); ++fi) {
    std::vector<double> per_run_s;
    per_run_s.reserve(timing_runs);
    double total = 0.0;
    for (int r = 0; r < timing_runs; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        if (is_particle_filter(filters[fi]))
          ctx.pf_estimates(detail::proposal_kind(filters[fi]),
                           trajs[r].measurements, ctx.pf_seed(r, filters[fi]));
        else
          ctx.kalman_estimates(detail::kalman_kind(filters[fi]),
                               trajs[r].measurements);
      } catch (const FilterError&) {
        continue;
      }
      const auto t1 = std::chrono::steady_clock::now();
      const double dt = std::chrono::duration<double>(t1 - t0).count();
      total += dt;
      per_run_s.push_back(dt);
    }
    report.rows[fi].total_time_s = total;
    if (!per_run_s.empty()) {
      std::sort(per_run_s.begin(), per_run_s.end());
      report.rows[fi].per_step_median_us =
          per_run_s[per_run_s.size() / 2] / cfg.horizon * 1e6;
    }
  }
  return report;
}

// Per-step error and posterior-variance series for one designated run
// (the published error/covariance figures).
struct TraceRow {
  int t;
  double truth;
  std::map<std::string, double> error;     // filter -> estimate - truth
  std::map<std::string, double> variance;  // filter -> posterior variance
};

inline std::vector<TraceRow> trace_benchmark_a(const ExperimentConfig& cfg,
                                               int run_index) {
  BenchmarkAContext ctx(cfg);
  const auto traj = ctx.simulate(run_index);
  std::vector<TraceRow> rows(cfg.horizon);
  for (int t = 1; t <= cfg.horizon; ++t) {
    rows[t - 1].t = t;
    rows[t - 1].truth = traj.truth[t];
  }
  FilterOptions opt;
  opt.joseph = cfg.joseph_form;
  for (BenchFilter f : cfg.filters) {
    if (is_particle_filter(f)) continue;
    const FilterKind kind = detail::kalman_kind(f);
    FilterState state{GaussianBelief(VectorXd::Constant(1, cfg.ts_est0),
                                     MatrixXd::Constant(1, 1, cfg.ts_p0)),
                      0};
    const VectorXd u(0);
    for (int t = 1; t <= cfg.horizon; ++t) {
      state = filter_step(kind, state, ctx.filter_model, u,
                          VectorXd::Constant(1, traj.measurements[t]), ctx.ut,
                          opt);
      rows[t - 1].error[bench_filter_name(f)] =
          state.belief.mean(0) - traj.truth[t];
      rows[t - 1].variance[bench_filter_name(f)] = state.belief.cov(0, 0);
    }
  }
  return rows;
}

}  // namespace nlkf

#endif
