#ifndef NLKF_MOMENT_ORACLE_HPP
#define NLKF_MOMENT_ORACLE_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "nlkf/numeric.hpp"
#include "nlkf/rng.hpp"
#include "nlkf/sigma_points.hpp"

namespace nlkf {

struct MomentEstimate {
  VectorXd mean;
  MatrixXd cov;
  long n_samples = 0;
  VectorXd standard_error;
};

// Monte-Carlo ground truth: sample mean/covariance of g over Gaussian draws,
// with per-component standard errors. Kahan-compensated accumulation keeps the
// reduction order-independent in precision.
inline MomentEstimate mc_moments(const VectorFn& g, const GaussianBelief& belief,
                                 long n_samples, Rng& rng) {
  if (n_samples < 10000)
    throw DomainError("mc_moments: need at least 1e4 samples");
  const MatrixXd root = matrix_sqrt(belief.cov);
  const int n = belief.dim();

  std::vector<VectorXd> samples;
  samples.reserve(n_samples);
  VectorXd z(n);
  for (long s = 0; s < n_samples; ++s) {
    for (int i = 0; i < n; ++i) z(i) = normal_sample(rng);
    VectorXd y = g(belief.mean + root * z);
    if (!y.allFinite()) throw DomainError("mc_moments: non-finite g output");
    samples.push_back(std::move(y));
  }

  const int d = static_cast<int>(samples.front().size());
  VectorXd mean = VectorXd::Zero(d), mean_c = VectorXd::Zero(d);
  for (const auto& y : samples) {
    for (int i = 0; i < d; ++i) {
      const double term = y(i) / n_samples - mean_c(i);
      const double t = mean(i) + term;
      mean_c(i) = (t - mean(i)) - term;
      mean(i) = t;
    }
  }
  MatrixXd cov = MatrixXd::Zero(d, d);
  for (const auto& y : samples) {
    const VectorXd r = y - mean;
    cov += r * r.transpose();
  }
  cov /= (n_samples - 1);

  MomentEstimate est;
  est.mean = mean;
  est.cov = symmetrize(cov);
  est.n_samples = n_samples;
  est.standard_error =
      (cov.diagonal().array() / n_samples).sqrt().matrix();
  return est;
}

enum class TransformMethod { Linearized, Ut, SimplexUt, SinglePointUt };

// Mean and covariance of g(x) under the belief, per approximation method.
inline std::pair<VectorXd, MatrixXd> approximate_moments(
    TransformMethod method, const VectorFn& g, const GaussianBelief& belief,
    const UtParams& params = {}) {
  switch (method) {
    case TransformMethod::Linearized: {
      const VectorXd mean = g(belief.mean);
      const MatrixXd j = numeric_jacobian(g, belief.mean);
      return {mean, j * belief.cov * j.transpose()};
    }
    case TransformMethod::Ut:
    case TransformMethod::SimplexUt: {
      SigmaPointSet set = method == TransformMethod::Ut
                              ? symmetric_sigma_points(belief, params)
                              : spherical_simplex_points(belief, params);
      std::vector<VectorXd> y;
      y.reserve(set.points.size());
      for (const auto& p : set.points) y.push_back(g(p));
      const VectorXd mean = unscented_mean(set, y);
      return {mean, unscented_covariance(set, y, mean)};
    }
    case TransformMethod::SinglePointUt: {
      SigmaPointSet set = symmetric_sigma_points(belief, params);
      const VectorXd g0 = g(set.points[0]);
      const MatrixXd j = numeric_jacobian(g, set.points[0]);
      std::vector<VectorXd> y;
      y.reserve(set.points.size());
      y.push_back(g0);
      for (size_t i = 1; i < set.points.size(); ++i)
        y.push_back(g0 + j * (set.points[i] - set.points[0]));
      const VectorXd mean = unscented_mean(set, y);
      return {mean, unscented_covariance(set, y, mean)};
    }
  }
  throw DomainError("approximate_moments: unknown method");
}

struct TransformError {
  double mean_err = 0.0;
  double cov_err = 0.0;
  bool inconclusive = false;  // oracle noise above 10% of the difference
};

inline TransformError transform_error(TransformMethod method, const VectorFn& g,
                                      const GaussianBelief& belief,
                                      const MomentEstimate& oracle,
                                      const UtParams& params = {}) {
  const auto [mean, cov] = approximate_moments(method, g, belief, params);
  TransformError err;
  err.mean_err = (mean - oracle.mean).norm();
  err.cov_err = (cov - oracle.cov).norm();
  if (oracle.standard_error.norm() > 0.1 * err.mean_err) err.inconclusive = true;
  return err;
}

struct OrderFit {
  double slope = 0.0;
  bool exact = false;  // all errors at round-off; no meaningful slope
};

// Fit log(mean error) against log(scale) for beliefs with covariance scaled
// by s^2. The oracle supplies the true transformed mean per scale; closed
// forms keep the fit tight.
inline OrderFit convergence_order(
    TransformMethod method, const VectorFn& g, const GaussianBelief& belief,
    const std::vector<double>& scales,
    const std::function<VectorXd(const GaussianBelief&)>& true_mean,
    const UtParams& params = {}) {
  if (scales.size() < 4)
    throw DomainError("convergence_order: need at least 4 scales");
  std::vector<double> log_s, log_e;
  for (double s : scales) {
    GaussianBelief scaled(belief.mean, s * s * belief.cov);
    const auto [mean, cov] = approximate_moments(method, g, scaled, params);
    (void)cov;
    const double err = (mean - true_mean(scaled)).norm();
    if (err < 1e-12) continue;
    log_s.push_back(std::log(s));
    log_e.push_back(std::log(err));
  }
  if (log_s.size() < 2) return {0.0, true};

  const size_t k = log_s.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < k; ++i) {
    sx += log_s[i];
    sy += log_e[i];
    sxx += log_s[i] * log_s[i];
    sxy += log_s[i] * log_e[i];
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return {slope, false};
}

}  // namespace nlkf

#endif
