#ifndef NLKF_MODELS_TIME_SERIES_HPP
#define NLKF_MODELS_TIME_SERIES_HPP

#include <cmath>
#include <vector>

#include "nlkf/rng.hpp"
#include "nlkf/system_model.hpp"

namespace nlkf {

inline double timeseries_process(double x, int t, double v, double omega = 4e-2,
                                 double phi = 0.5) {
  return 1.0 + std::sin(omega * M_PI * t) + phi * x + v;
}

// Quadratic branch up to and including the switch time, affine branch after.
inline double timeseries_measure(double x, int t, double noise, double phi = 0.5,
                                 int switch_time = 30) {
  if (t <= switch_time) return phi * x * x + noise;
  return phi * x - 2.0 + noise;
}

// Scalar benchmark system: Gamma-distributed process noise, Gaussian
// observation noise, and a measurement model that switches from quadratic to
// affine after the switch time.
struct TimeSeriesModel {
  double omega = 4e-2;
  double phi = 0.5;
  double gamma_shape = 2.0;
  double gamma_scale = 3.0;
  double obs_noise_var = 1e-5;
  int switch_time = 30;

  double noise_mean() const { return gamma_shape * gamma_scale; }
  double noise_var() const { return gamma_shape * gamma_scale * gamma_scale; }

  // Deterministic part of the transition, without any noise compensation.
  double transition(double x, int t) const {
    return timeseries_process(x, t, 0.0, omega, phi);
  }

  double measure(double x, int t) const {
    return timeseries_measure(x, t, 0.0, phi, switch_time);
  }

  // Model handed to the Gaussian filters: the Gamma noise mean is folded into
  // f so the assumed process noise is zero-mean with the Gamma variance.
  SystemModel filter_model() const {
    SystemModel model;
    model.n = 1;
    model.m = 1;
    model.f = [*this](const VectorXd& x, const VectorXd&, int t) {
      return VectorXd::Constant(1, transition(x(0), t) + noise_mean());
    };
    model.h = [*this](const VectorXd& x, int t) {
      return VectorXd::Constant(1, measure(x(0), t));
    };
    model.jac_f = [phi = phi](const VectorXd&, const VectorXd&, int) {
      return MatrixXd::Constant(1, 1, phi);
    };
    model.jac_h = [*this](const VectorXd& x, int t) {
      const double d = (t <= switch_time) ? 2.0 * phi * x(0) : phi;
      return MatrixXd::Constant(1, 1, d);
    };
    model.Q = MatrixXd::Constant(1, 1, noise_var());
    model.R = MatrixXd::Constant(1, 1, obs_noise_var);
    return model;
  }

  struct Trajectory {
    std::vector<double> truth;         // truth[t], t = 0..horizon
    std::vector<double> measurements;  // measurements[t], t = 1..horizon (index 0 unused)
  };

  Trajectory simulate(int horizon, double x0, Rng& rng) const {
    Trajectory traj;
    traj.truth.resize(horizon + 1);
    traj.measurements.assign(horizon + 1, 0.0);
    traj.truth[0] = x0;
    for (int t = 1; t <= horizon; ++t) {
      const double v = gamma_sample(gamma_shape, gamma_scale, rng);
      traj.truth[t] = timeseries_process(traj.truth[t - 1], t - 1, v, omega, phi);
      const double n = std::sqrt(obs_noise_var) * normal_sample(rng);
      traj.measurements[t] =
          timeseries_measure(traj.truth[t], t, n, phi, switch_time);
    }
    return traj;
  }

  double transition_log_pdf(double x_next, double x_prev, int t) const {
    return gamma_log_pdf(x_next - transition(x_prev, t), gamma_shape,
                         gamma_scale);
  }

  double likelihood_log_pdf(double y, double x, int t) const {
    return normal_log_pdf(y, measure(x, t), obs_noise_var);
  }
};

}  // namespace nlkf

#endif
