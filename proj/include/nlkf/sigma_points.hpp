#ifndef NLKF_SIGMA_POINTS_HPP
#define NLKF_SIGMA_POINTS_HPP

#include <cmath>
#include <vector>

#include "nlkf/gaussian.hpp"

namespace nlkf {

// Spread parameter lambda for the symmetric 2n+1 set and the center weight
// for the spherical-simplex set. Default lambda follows kappa = 3 - n.
struct UtParams {
  double lambda = 0.0;
  double w0_simplex = 0.5;

  static UtParams defaults_for(int n) {
    UtParams p;
    p.lambda = 3.0 - n;
    return p;
  }
};

struct SigmaPointSet {
  std::vector<VectorXd> points;
  std::vector<double> mean_weights;
  std::vector<double> cov_weights;

  int count() const { return static_cast<int>(points.size()); }
};

// Symmetric set: chi_0 = mean, chi_i = mean +/- column i of sqrt((n+lambda) P).
// W_0 = lambda/(n+lambda), W_i = 1/(2(n+lambda)); mean and covariance weights
// coincide.
inline SigmaPointSet symmetric_sigma_points(const GaussianBelief& belief,
                                            const UtParams& params) {
  const int n = belief.dim();
  const double nl = n + params.lambda;
  if (!(nl > 0.0))
    throw DomainError("symmetric_sigma_points: n + lambda must be positive");
  const MatrixXd root = matrix_sqrt(nl * belief.cov);

  SigmaPointSet set;
  set.points.reserve(2 * n + 1);
  set.points.push_back(belief.mean);
  for (int i = 0; i < n; ++i) set.points.push_back(belief.mean + root.col(i));
  for (int i = 0; i < n; ++i) set.points.push_back(belief.mean - root.col(i));

  set.mean_weights.assign(2 * n + 1, 1.0 / (2.0 * nl));
  set.mean_weights[0] = params.lambda / nl;
  set.cov_weights = set.mean_weights;
  return set;
}

// Spherical-simplex set of n+2 points (Julier 2003). The unit vector set is
// built by the dimension recursion and scaled through the Cholesky factor of
// the covariance; point radius grows like sqrt(n).
inline SigmaPointSet spherical_simplex_points(const GaussianBelief& belief,
                                              const UtParams& params) {
  const int n = belief.dim();
  const double w0 = params.w0_simplex;
  if (!(w0 >= 0.0 && w0 < 1.0))
    throw DomainError("spherical_simplex_points: w0 must be in [0,1)");
  const double w = (1.0 - w0) / (n + 1);

  // Unit-covariance vectors X_i, i = 0..n+1, built up one dimension at a time.
  std::vector<VectorXd> x(n + 2);
  for (auto& v : x) v = VectorXd::Zero(n);
  x[1](0) = -1.0 / std::sqrt(2.0 * w);
  x[2](0) = 1.0 / std::sqrt(2.0 * w);
  for (int j = 2; j <= n; ++j) {
    const double a = 1.0 / std::sqrt(j * (j + 1) * w);
    for (int i = 1; i <= j; ++i) x[i](j - 1) = -a;
    x[j + 1](j - 1) = j * a;
  }

  const MatrixXd root = matrix_sqrt(belief.cov);
  SigmaPointSet set;
  set.points.reserve(n + 2);
  for (const auto& v : x) set.points.push_back(belief.mean + root * v);
  set.mean_weights.assign(n + 2, w);
  set.mean_weights[0] = w0;
  set.cov_weights = set.mean_weights;
  return set;
}

inline VectorXd unscented_mean(const SigmaPointSet& set,
                               const std::vector<VectorXd>& transformed) {
  if (transformed.size() != set.points.size())
    throw DimensionError("unscented_mean: point/transform cardinality mismatch");
  VectorXd mean = VectorXd::Zero(transformed.front().size());
  for (size_t i = 0; i < transformed.size(); ++i)
    mean += set.mean_weights[i] * transformed[i];
  return mean;
}

inline MatrixXd unscented_covariance(const SigmaPointSet& set,
                                     const std::vector<VectorXd>& transformed,
                                     const VectorXd& transformed_mean) {
  if (transformed.size() != set.points.size())
    throw DimensionError(
        "unscented_covariance: point/transform cardinality mismatch");
  const auto d = transformed_mean.size();
  MatrixXd cov = MatrixXd::Zero(d, d);
  for (size_t i = 0; i < transformed.size(); ++i) {
    VectorXd r = transformed[i] - transformed_mean;
    cov += set.cov_weights[i] * (r * r.transpose());
  }
  return symmetrize(cov);
}

// Cross covariance between the source points and their transforms.
inline MatrixXd unscented_cross_covariance(const SigmaPointSet& set,
                                           const VectorXd& source_mean,
                                           const std::vector<VectorXd>& transformed,
                                           const VectorXd& transformed_mean) {
  if (transformed.size() != set.points.size())
    throw DimensionError(
        "unscented_cross_covariance: point/transform cardinality mismatch");
  MatrixXd cov = MatrixXd::Zero(source_mean.size(), transformed_mean.size());
  for (size_t i = 0; i < transformed.size(); ++i)
    cov += set.cov_weights[i] * (set.points[i] - source_mean) *
           (transformed[i] - transformed_mean).transpose();
  return cov;
}

}  // namespace nlkf

#endif
