// End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
// process exits nonzero if any check fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nlkf/bench/benchmark_a.hpp"
#include "nlkf/bench/benchmark_b.hpp"
#include "nlkf/complexity.hpp"
#include "nlkf/moment_oracle.hpp"

using namespace nlkf;

namespace {

int g_failures = 0;

void report(int id, const std::string& label, bool ok, const std::string& detail = "") {
  std::printf("[%s] %2d. %s%s%s\n", ok ? "PASS" : "FAIL", id, label.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. All Gaussian filters collapse to the classical Kalman filter on a random
//    3-state linear model over 100 steps.
void check_linear_equivalence() {
  std::mt19937_64 rng(2025);
  std::normal_distribution<double> dist;
  const int n = 3, m = 2;
  MatrixXd a(n, n), h(m, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = 0.4 * dist(rng);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = dist(rng);
  MatrixXd qa(n, n), ra(m, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) qa(i, j) = dist(rng);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) ra(i, j) = dist(rng);
  const MatrixXd q = qa * qa.transpose() + 0.1 * MatrixXd::Identity(n, n);
  const MatrixXd r = ra * ra.transpose() + 0.1 * MatrixXd::Identity(m, m);

  SystemModel model;
  model.n = n;
  model.m = m;
  model.f = [a](const VectorXd& x, const VectorXd&, int) { return VectorXd(a * x); };
  model.h = [h](const VectorXd& x, int) { return VectorXd(h * x); };
  model.jac_f = [a](const VectorXd&, const VectorXd&, int) { return a; };
  model.jac_h = [h](const VectorXd&, int) { return h; };
  model.Q = q;
  model.R = r;

  const UtParams params = UtParams::defaults_for(n);
  FilterState oracle{GaussianBelief(VectorXd::Zero(n), MatrixXd::Identity(n, n)), 0};
  const std::vector<FilterKind> kinds = {FilterKind::Ekf, FilterKind::Ukf,
                                         FilterKind::Ssukf, FilterKind::Spukf,
                                         FilterKind::NewKf};
  std::vector<FilterState> states(kinds.size(), oracle);

  double worst_mean = 0.0, worst_cov = 0.0;
  for (int step = 0; step < 100; ++step) {
    VectorXd y(m);
    for (int i = 0; i < m; ++i) y(i) = dist(rng);
    // Reference recursion, written out directly.
    const VectorXd xp = a * oracle.belief.mean;
    const MatrixXd pp = a * oracle.belief.cov * a.transpose() + q;
    const MatrixXd s = h * pp * h.transpose() + r;
    const MatrixXd k = pp * h.transpose() * s.inverse();
    oracle = {GaussianBelief(xp + k * (y - h * xp),
                             symmetrize((MatrixXd::Identity(n, n) - k * h) * pp)),
              oracle.step + 1};
    for (size_t fi = 0; fi < kinds.size(); ++fi) {
      states[fi] = filter_step(kinds[fi], states[fi], model, VectorXd(0), y, params);
      worst_mean = std::max(worst_mean,
                            (states[fi].belief.mean - oracle.belief.mean).norm());
      worst_cov = std::max(worst_cov,
                           (states[fi].belief.cov - oracle.belief.cov).norm() /
                               oracle.belief.cov.norm());
    }
  }
  report(1, "linear-model agreement with the classical recursion",
         worst_mean < 1e-8 && worst_cov < 1e-7,
         "mean err " + fmt(worst_mean) + ", rel cov err " + fmt(worst_cov));
}

// ---------------------------------------------------------------------------
// 2. Hybrid construction: from the same posterior, the hybrid filter's
//    predicted covariance is bit-equal to the EKF's and its predicted mean is
//    the transform mean of the same sigma set.
void check_hybrid_identity() {
  SystemModel model;
  model.n = 2;
  model.m = 1;
  model.f = [](const VectorXd& x, const VectorXd&, int) {
    VectorXd out(2);
    out << x(0) + 0.2 * std::sin(x(1)), 0.8 * x(1) + 0.1 * x(0) * x(0);
    return out;
  };
  // Zero measurement Jacobian: the gain vanishes, so the posterior exposes the
  // prediction stage unchanged.
  model.h = [](const VectorXd&, int) { return VectorXd::Zero(1); };
  model.jac_h = [](const VectorXd&, int) { return MatrixXd::Zero(1, 2); };
  model.Q = 0.01 * MatrixXd::Identity(2, 2);
  model.R = MatrixXd::Identity(1, 1);

  VectorXd x0(2);
  x0 << 0.3, -0.6;
  MatrixXd p0(2, 2);
  p0 << 0.4, 0.1, 0.1, 0.3;
  const FilterState init{GaussianBelief(x0, p0), 0};
  const UtParams params = UtParams::defaults_for(2);
  const VectorXd y = VectorXd::Zero(1);

  const FilterState ekf = ekf_step(init, model, VectorXd(0), y);
  const FilterState hybrid = newkf_step(init, model, VectorXd(0), y, params);

  const bool cov_bit_equal = ekf.belief.cov == hybrid.belief.cov;

  const auto set = symmetric_sigma_points(init.belief, params);
  std::vector<VectorXd> fx;
  for (const auto& p : set.points) fx.push_back(model.f(p, VectorXd(0), 0));
  const VectorXd ut_mean = unscented_mean(set, fx);
  const double mean_err = (hybrid.belief.mean - ut_mean).norm();

  report(2, "hybrid prediction: EKF covariance bit-for-bit, transform mean",
         cov_bit_equal && mean_err < 1e-12,
         std::string(cov_bit_equal ? "cov identical" : "cov differs") +
             ", mean err " + fmt(mean_err));
}

// ---------------------------------------------------------------------------
// 3. Mean-error order on sin(x) against the closed-form Gaussian expectation:
//    2nd order for linearization, 4th order for the transform, and the
//    transform never loses at any tested spread.
void check_order_hierarchy() {
  const VectorFn g = [](const VectorXd& x) {
    return VectorXd::Constant(1, std::sin(x(0)));
  };
  const auto true_mean = [](const GaussianBelief& b) {
    return VectorXd::Constant(1, std::sin(b.mean(0)) * std::exp(-0.5 * b.cov(0, 0)));
  };
  GaussianBelief base(VectorXd::Constant(1, 0.5), MatrixXd::Identity(1, 1));
  const std::vector<double> scales = {0.01, 0.02, 0.05, 0.1, 0.2};
  UtParams params;
  params.lambda = 0.0;  // lambda = 2 would also match 4th moments in 1-d,
                        // hiding the generic 4th-order error term

  const auto lin = convergence_order(TransformMethod::Linearized, g, base,
                                     scales, true_mean, params);
  const auto ut = convergence_order(TransformMethod::Ut, g, base, scales,
                                    true_mean, params);

  bool ut_never_worse = true;
  for (double s : scales) {
    GaussianBelief b(base.mean, s * s * base.cov);
    const double te = true_mean(b)(0);
    const double le =
        std::abs(approximate_moments(TransformMethod::Linearized, g, b, params)
                     .first(0) - te);
    const double ue =
        std::abs(approximate_moments(TransformMethod::Ut, g, b, params)
                     .first(0) - te);
    if (ue > le) ut_never_worse = false;
  }

  const bool ok = !lin.exact && !ut.exact &&
                  std::abs(lin.slope - 2.0) <= 0.3 &&
                  std::abs(ut.slope - 4.0) <= 0.5 && ut_never_worse;
  report(3, "error order 2 (linearized) vs 4 (transform) on sin", ok,
         "slopes " + fmt(lin.slope) + " / " + fmt(ut.slope));
}

// ---------------------------------------------------------------------------
// 4. Quadratic exactness: transform mean of x^2 is exactly mean^2 + var;
//    linearization drops the var term entirely.
void check_quadratic_exactness() {
  const VectorFn g = [](const VectorXd& x) {
    return VectorXd::Constant(1, x(0) * x(0));
  };
  std::mt19937_64 rng(77);
  std::normal_distribution<double> dist;
  std::uniform_real_distribution<double> var_dist(0.01, 4.0);
  const UtParams params = UtParams::defaults_for(1);

  double worst_ut = 0.0, worst_hybrid = 0.0, worst_lin = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double mean = 3.0 * dist(rng);
    const double var = var_dist(rng);
    GaussianBelief b(VectorXd::Constant(1, mean), MatrixXd::Constant(1, 1, var));
    const double want = mean * mean + var;

    const double ut_mean =
        approximate_moments(TransformMethod::Ut, g, b, params).first(0);
    worst_ut = std::max(worst_ut, std::abs(ut_mean - want));

    // Hybrid prediction stage, exposed through a zero-gain measurement.
    SystemModel model;
    model.n = 1;
    model.m = 1;
    model.f = [](const VectorXd& x, const VectorXd&, int) {
      return VectorXd::Constant(1, x(0) * x(0));
    };
    model.jac_f = [](const VectorXd& x, const VectorXd&, int) {
      return MatrixXd::Constant(1, 1, 2.0 * x(0));
    };
    model.h = [](const VectorXd&, int) { return VectorXd::Zero(1); };
    model.jac_h = [](const VectorXd&, int) { return MatrixXd::Zero(1, 1); };
    model.Q = 1e-6 * MatrixXd::Identity(1, 1);
    model.R = MatrixXd::Identity(1, 1);
    const FilterState out =
        newkf_step({b, 0}, model, VectorXd(0), VectorXd::Zero(1), params);
    worst_hybrid = std::max(worst_hybrid, std::abs(out.belief.mean(0) - want));

    const double lin_mean =
        approximate_moments(TransformMethod::Linearized, g, b, params).first(0);
    // Linearization must miss by exactly the variance.
    worst_lin = std::max(worst_lin, std::abs((want - lin_mean) - var));
  }
  report(4, "transform mean of x^2 is exact; linearization misses by the variance",
         worst_ut < 1e-10 && worst_hybrid < 1e-10 && worst_lin < 1e-7,
         "ut " + fmt(worst_ut) + ", hybrid " + fmt(worst_hybrid) + ", lin " +
             fmt(worst_lin));
}

// ---------------------------------------------------------------------------
// 5. Operation-count golden values.
void check_flop_goldens() {
  const bool exact = ukf_flops({1, 1, 5}) == 117 && newkf_flops({1, 1, 5}) == 40 &&
                     ukf_flops({4, 1, 30}) == 1656 && newkf_flops({4, 1, 30}) == 823;
  const double r115 = reduction_ratio({1, 1, 5});
  const double r4130 = reduction_ratio({4, 1, 30});
  const std::string notes = flop_model_notes();
  const bool ok = exact && std::abs(r115 - 0.658) < 5e-4 &&
                  std::abs(r4130 - 0.503) < 5e-4 &&
                  notes.find("inconsistent") != std::string::npos;
  report(5, "operation-count golden values and the flagged 61% discrepancy", ok,
         "reductions " + fmt(r115) + ", " + fmt(r4130));
}

// ---------------------------------------------------------------------------
// 6. Large-dimension sweep: reduction within [0.70, 0.80] for m = ceil(n/2),
//    j = 10n, n in {50, 100, 200}.
void check_sweep_band() {
  bool ok = true;
  std::string detail;
  for (long n : {50L, 100L, 200L}) {
    const double r = reduction_ratio({n, (n + 1) / 2, 10 * n});
    if (!(r >= 0.70 && r <= 0.80)) ok = false;
    if (!detail.empty()) detail += ", ";
    detail += "n=" + std::to_string(n) + ": " + fmt(r);
  }
  report(6, "reduction ratio in [0.70, 0.80] for the m = n/2 sweep", ok, detail);
}

// ---------------------------------------------------------------------------
// 7. Time-series benchmark: accuracy orderings and the runtime ratio over the
//    default 1000-run configuration.
void check_benchmark_a() {
  ExperimentConfig cfg;  // defaults: 1000 runs, horizon 60, all 9 filters
  const auto rep = run_benchmark_a(cfg);
  auto row = [&](const std::string& name) -> const FilterResult& {
    for (const auto& r : rep.rows)
      if (r.name == name) return r;
    throw DomainError("missing row " + name);
  };
  const double ekf = row("EKF").mse_mean;
  const double ukf = row("UKF").mse_mean;
  const double hyb = row("NewKF").mse_mean;
  const double pf = row("PF").mse_mean;
  const double pf_hyb = row("PF-NewKF").mse_mean;
  const double t_ratio = row("NewKF").total_time_s / row("UKF").total_time_s;

  const bool a = ekf > ukf;
  const bool b = std::abs(hyb - ukf) / ukf <= 0.15;
  const bool c = pf_hyb < pf;
  const bool d = t_ratio >= 0.3 && t_ratio <= 0.8;
  report(7, "time-series benchmark orderings and runtime ratio", a && b && c && d,
         "mse EKF " + fmt(ekf) + " UKF " + fmt(ukf) + " hybrid " + fmt(hyb) +
             " PF " + fmt(pf) + " PF-hybrid " + fmt(pf_hyb) + ", time ratio " +
             fmt(t_ratio));
}

// ---------------------------------------------------------------------------
// 8. Levitation benchmark: parameter-estimation orderings, air-gap parity, and
//    mass convergence under the default scenario.
void check_benchmark_b() {
  ExperimentConfig cfg;
  cfg.benchmark = 'b';
  const auto rep = run_benchmark_b(cfg);
  auto row = [&](const std::string& name) -> const FilterResult& {
    for (const auto& r : rep.rows)
      if (r.name == name) return r;
    throw DomainError("missing row " + name);
  };
  const auto& ekf = row("EKF");
  const auto& ukf = row("UKF");
  const auto& hyb = row("NewKF");

  const bool param_order =
      hyb.param_mse < ekf.param_mse && ukf.param_mse < ekf.param_mse;
  const double gap_max =
      std::max({ekf.mse_mean, ukf.mse_mean, hyb.mse_mean});
  const double gap_min =
      std::min({ekf.mse_mean, ukf.mse_mean, hyb.mse_mean});
  const bool gap_parity = gap_max <= 2.0 * gap_min;
  const bool converged =
      hyb.mass_error_ratio <= 0.10 && ukf.mass_error_ratio <= 0.10;
  const bool no_failures =
      ekf.failed_runs == 0 && ukf.failed_runs == 0 && hyb.failed_runs == 0;

  report(8, "levitation benchmark parameter orderings and mass convergence",
         param_order && gap_parity && converged && no_failures,
         "param mse EKF " + fmt(ekf.param_mse) + " UKF " + fmt(ukf.param_mse) +
             " hybrid " + fmt(hyb.param_mse) + ", gap spread " +
             fmt(gap_max / gap_min) + "x, mass ratios " +
             fmt(ukf.mass_error_ratio) + "/" + fmt(hyb.mass_error_ratio));
}

// ---------------------------------------------------------------------------
// 9. Per-step process-function call counts, exact.
void check_call_accounting() {
  bool ok = true;
  std::string detail;
  for (int n : {1, 4}) {
    SystemModel base;
    base.n = n;
    base.m = 1;
    base.f = [](const VectorXd& x, const VectorXd&, int) {
      return VectorXd((0.9 * x.array() + 0.01 * x.array().square()).matrix());
    };
    base.jac_f = [n](const VectorXd& x, const VectorXd&, int) {
      return MatrixXd((0.9 + 0.02 * x.array()).matrix().asDiagonal());
    };
    base.h = [](const VectorXd& x, int) { return VectorXd::Constant(1, x(0)); };
    base.jac_h = [n](const VectorXd&, int) {
      MatrixXd h = MatrixXd::Zero(1, n);
      h(0, 0) = 1.0;
      return h;
    };
    base.Q = 0.01 * MatrixXd::Identity(n, n);
    base.R = MatrixXd::Identity(1, 1);

    const UtParams params = UtParams::defaults_for(n);
    const std::vector<std::pair<FilterKind, long>> expected = {
        {FilterKind::Ukf, 2L * n + 1},
        {FilterKind::NewKf, 2L * n + 1},
        {FilterKind::Ssukf, n + 2L},
        {FilterKind::Spukf, 1L},
    };
    for (const auto& [kind, want] : expected) {
      auto counts = std::make_shared<CallCounts>();
      const SystemModel counted = instrument(base, counts);
      const FilterState init{
          GaussianBelief(VectorXd::Constant(n, 0.1), MatrixXd::Identity(n, n)), 0};
      filter_step(kind, init, counted, VectorXd(0), VectorXd::Zero(1), params);
      if (counts->f_calls != want) {
        ok = false;
        detail += std::string(filter_name(kind)) + "(n=" + std::to_string(n) +
                  "): " + std::to_string(counts->f_calls) + " vs " +
                  std::to_string(want) + "; ";
      }
    }
  }
  report(9, "exact per-step process-function call counts", ok, detail);
}

// ---------------------------------------------------------------------------
// 10. Positive-semidefiniteness under an adversarially tight prior over
//     10,000 steps on both benchmark systems.
void check_psd_robustness() {
  bool ok = true;
  std::string detail;

  // Scalar benchmark system, long horizon.
  {
    TimeSeriesModel ts;
    const SystemModel model = ts.filter_model();
    Rng rng(5150);
    const auto traj = ts.simulate(10000, 1.0, rng);
    const UtParams params = UtParams::defaults_for(1);
    for (FilterKind kind : {FilterKind::Ekf, FilterKind::Ukf, FilterKind::NewKf,
                            FilterKind::Spukf, FilterKind::Ssukf}) {
      FilterState state{GaussianBelief(VectorXd::Constant(1, 1.0),
                                       1e-12 * MatrixXd::Identity(1, 1)),
                        0};
      try {
        for (int t = 1; t <= 10000; ++t) {
          state = filter_step(kind, state, model, VectorXd(0),
                              VectorXd::Constant(1, traj.measurements[t]), params);
          state.belief.check_psd();  // throws NotPsdError on violation
        }
      } catch (const FilterError& e) {
        ok = false;
        detail += std::string(filter_name(kind)) + "/scalar: " + e.what() + "; ";
      }
    }
  }

  // Levitation system, closed loop.
  {
    ExperimentConfig cfg;
    cfg.benchmark = 'b';
    cfg.maglev_horizon = 10000;
    cfg.maglev_p0_gap = cfg.maglev_p0_vel = cfg.maglev_p0_cur =
        cfg.maglev_p0_mass = 1e-12;
    BenchmarkBContext ctx(cfg);
    const auto traj = ctx.simulate(0);
    for (FilterKind kind :
         {FilterKind::Ekf, FilterKind::Ukf, FilterKind::NewKf}) {
      try {
        ctx.run_filter(kind, traj);
      } catch (const FilterError& e) {
        ok = false;
        detail += std::string(filter_name(kind)) + "/maglev: " + e.what() + "; ";
      }
    }
  }
  report(10, "covariances stay PSD for 10,000 steps from a 1e-12 prior", ok,
         detail);
}

// ---------------------------------------------------------------------------
// 11. CLI determinism: two runs with the same seed produce byte-identical CSV
//     bodies once the timing columns are stripped.
std::string strip_timing(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.rfind(',');
    if (pos != std::string::npos && pos > 0) pos = line.rfind(',', pos - 1);
    out << (pos == std::string::npos ? line : line.substr(0, pos)) << '\n';
  }
  return out.str();
}

void check_cli_determinism() {
  const std::string exe = BENCH_EXECUTABLE;
  const std::string cmd_base = "\"" + exe +
                               "\" run --benchmark a --runs 60 --seed 31337 "
                               "--format csv --out ";
  const int rc1 = std::system((cmd_base + "acc_det_1.csv").c_str());
  const int rc2 = std::system((cmd_base + "acc_det_2.csv").c_str());
  bool ok = rc1 == 0 && rc2 == 0;
  std::string detail;
  if (!ok) {
    detail = "exit codes " + std::to_string(rc1) + "/" + std::to_string(rc2);
  } else {
    const std::string b1 = strip_timing("acc_det_1.csv");
    const std::string b2 = strip_timing("acc_det_2.csv");
    ok = !b1.empty() && b1 == b2;
    if (!ok) detail = "stripped bodies differ";
  }
  std::remove("acc_det_1.csv");
  std::remove("acc_det_2.csv");
  report(11, "repeated CLI runs agree byte-for-byte modulo timing", ok, detail);
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  check_linear_equivalence();
  check_hybrid_identity();
  check_order_hierarchy();
  check_quadratic_exactness();
  check_flop_goldens();
  check_sweep_band();
  check_benchmark_a();
  check_benchmark_b();
  check_call_accounting();
  check_psd_robustness();
  check_cli_determinism();
  const double secs = std::chrono::duration<double>(clock::now() - t0).count();
  std::printf("%d/11 checks passed in %.1f s\n", 11 - g_failures, secs);
  return g_failures == 0 ? 0 : 1;
}
