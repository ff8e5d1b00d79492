#ifndef NLKF_GAUSSIAN_HPP
#define NLKF_GAUSSIAN_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "nlkf/errors.hpp"

namespace nlkf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd symmetrize(const MatrixXd& a) {
  return 0.5 * (a + a.transpose());
}

// Plain Cholesky used only to locate the failing leading minor for
// diagnostics; Eigen's LLT does not report the index.
inline int failing_leading_minor(const MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  MatrixXd l = MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0)) return j + 1;
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i)
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
  }
  return 0;
}

// Per-thread factorization counter for the cost-accounting harness.
inline thread_local long matrix_sqrt_calls = 0;

// Lower-triangular L with L L^T = cov. Retries with a jitter ladder
// eps * trace(cov)/n * I for eps in {1e-12, 1e-10, 1e-8} before giving up.
inline MatrixXd matrix_sqrt(const MatrixXd& cov) {
  ++matrix_sqrt_calls;
  const int n = static_cast<int>(cov.rows());
  if (cov.cols() != n) throw DimensionError("matrix_sqrt: matrix not square");
  const MatrixXd sym = symmetrize(cov);
  Eigen::LLT<MatrixXd> llt(sym);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  const double scale = sym.trace() / n;
  for (double eps : {1e-12, 1e-10, 1e-8}) {
    MatrixXd jittered = sym + eps * std::max(scale, 1.0) * MatrixXd::Identity(n, n);
    llt.compute(jittered);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  int minor = failing_leading_minor(sym);
  throw NotPsdError(
      "matrix_sqrt: matrix not positive definite after jitter; leading minor " +
          std::to_string(minor) + " not positive",
      minor);
}

// Mean vector plus symmetrized covariance. Construction enforces symmetry
// and checks the covariance is PSD up to a small relative slack.
struct GaussianBelief {
  VectorXd mean;
  MatrixXd cov;

  GaussianBelief() = default;

  GaussianBelief(VectorXd mean_in, const MatrixXd& cov_in)
      : mean(std::move(mean_in)), cov(symmetrize(cov_in)) {
    if (cov.rows() != mean.size() || cov.cols() != mean.size())
      throw DimensionError("GaussianBelief: mean/cov dimension mismatch");
    // Cheap necessary condition on every construction; the full spectral
    // check is available through check_psd(). A negative diagonal entry is
    // already a PSD violation.
    const double hi = cov.diagonal().maxCoeff();
    const double lo = cov.diagonal().minCoeff();
    if (!cov.allFinite() || lo < -1e-9 * std::max(hi, 0.0))
      throw NotPsdError(
          "GaussianBelief: covariance diagonal negative (min " +
              std::to_string(lo) + ")",
          0);
  }

  int dim() const { return static_cast<int>(mean.size()); }

  void check_psd() const {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    double lo = ev.minCoeff();
    double hi = ev.maxCoeff();
    if (lo < -1e-9 * std::max(hi, 0.0))
      throw NotPsdError("GaussianBelief: covariance not PSD (min eigenvalue " +
                            std::to_string(lo) + ")",
                        0);
  }
};

}  // namespace nlkf

#endif
