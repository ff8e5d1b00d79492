#ifndef NLKF_FILTERS_HPP
#define NLKF_FILTERS_HPP

#include <string>
#include <vector>

#include "nlkf/sigma_points.hpp"
#include "nlkf/system_model.hpp"

namespace nlkf {

struct FilterState {
  GaussianBelief belief;
  int step = 0;
};

struct FilterOptions {
  // Joseph form (I-KH)P(I-KH)^T + KRK^T; switch off for the literal
  // (I-KH)P form of the published algorithm.
  bool joseph = true;
  double condition_threshold = 1e12;
};

namespace detail {

inline void check_innovation(const MatrixXd& s, double threshold) {
  if (s.rows() == 1) {  // scalar innovation: conditioning reduces to positivity
    if (!(s(0, 0) > 0.0))
      throw SingularInnovationError(
          "innovation variance not positive",
          std::numeric_limits<double>::infinity());
    return;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  const double cond = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(lo > 0.0) || cond > threshold)
    throw SingularInnovationError(
        "innovation covariance ill-conditioned (cond ~ " + std::to_string(cond) + ")",
        cond);
}

// Solve X S = B, i.e. X = B S^{-1}, through the Cholesky factor of S.
inline MatrixXd right_solve(const MatrixXd& b, const MatrixXd& s) {
  Eigen::LLT<MatrixXd> llt(s);
  if (llt.info() != Eigen::Success)
    throw SingularInnovationError("innovation covariance not positive definite",
                                  std::numeric_limits<double>::infinity());
  return llt.solve(b.transpose()).transpose();
}

// Measurement update with an explicit measurement Jacobian (EKF / New KF).
inline GaussianBelief jacobian_update(const GaussianBelief& predicted,
                                      const VectorXd& y_pred, const MatrixXd& h,
                                      const MatrixXd& r, const VectorXd& y,
                                      const FilterOptions& opt) {
  const MatrixXd s = symmetrize(h * predicted.cov * h.transpose() + r);
  check_innovation(s, opt.condition_threshold);
  const MatrixXd k = right_solve(predicted.cov * h.transpose(), s);
  const VectorXd mean = predicted.mean + k * (y - y_pred);
  MatrixXd cov;
  if (opt.joseph) {
    const MatrixXd a =
        MatrixXd::Identity(predicted.dim(), predicted.dim()) - k * h;
    cov = a * predicted.cov * a.transpose() + k * r * k.transpose();
  } else {
    cov = (MatrixXd::Identity(predicted.dim(), predicted.dim()) - k * h) *
          predicted.cov;
  }
  return GaussianBelief(mean, cov);
}

// Measurement update from unscented cross covariance (UKF family).
inline GaussianBelief cross_cov_update(const GaussianBelief& predicted,
                                       const VectorXd& y_pred, const MatrixXd& s,
                                       const MatrixXd& p_xy, const VectorXd& y,
                                       const FilterOptions& opt) {
  check_innovation(s, opt.condition_threshold);
  const MatrixXd k = right_solve(p_xy, s);
  const VectorXd mean = predicted.mean + k * (y - y_pred);
  const MatrixXd cov = predicted.cov - k * s * k.transpose();
  return GaussianBelief(mean, cov);
}

}  // namespace detail

// F P F^T + Q about the posterior mean. Shared by EKF and New KF so both
// produce bit-identical predicted covariances from the same posterior.
inline MatrixXd linearized_predicted_cov(const FilterState& state,
                                         const SystemModel& model,
                                         const VectorXd& u) {
  const MatrixXd f =
      model.jac_f ? model.jac_f(state.belief.mean, u, state.step)
                  : model.process_jacobian(state.belief.mean, u, state.step);
  return f * state.belief.cov * f.transpose() + model.Q;
}

inline FilterState ekf_step(const FilterState& state, const SystemModel& model,
                            const VectorXd& u, const VectorXd& y,
                            const FilterOptions& opt = {}) {
  const int t = state.step;
  const VectorXd x_pred = model.f(state.belief.mean, u, t);
  const MatrixXd p_pred = linearized_predicted_cov(state, model, u);
  const GaussianBelief predicted(x_pred, p_pred);

  const VectorXd y_pred = model.h(x_pred, t + 1);
  const MatrixXd h = model.jac_h ? model.jac_h(x_pred, t + 1)
                                 : model.measurement_jacobian(x_pred, t + 1);
  return {detail::jacobian_update(predicted, y_pred, h, model.R, y, opt), t + 1};
}

namespace detail {

using PointGen = SigmaPointSet (*)(const GaussianBelief&, const UtParams&);

// Full unscented step shared by UKF (symmetric points) and SSUKF (simplex
// points): sigma points are redrawn from the predicted belief for the
// measurement stage.
inline FilterState ut_step(const FilterState& state, const SystemModel& model,
                           const VectorXd& u, const VectorXd& y,
                           const UtParams& params, PointGen gen,
                           const FilterOptions& opt) {
  const int t = state.step;
  SigmaPointSet set = gen(state.belief, params);
  std::vector<VectorXd> fx;
  fx.reserve(set.points.size());
  for (const auto& p : set.points) fx.push_back(model.f(p, u, t));
  const VectorXd x_pred = unscented_mean(set, fx);
  const MatrixXd p_pred = unscented_covariance(set, fx, x_pred) + model.Q;
  const GaussianBelief predicted(x_pred, p_pred);

  SigmaPointSet mset = gen(predicted, params);
  std::vector<VectorXd> hy;
  hy.reserve(mset.points.size());
  for (const auto& p : mset.points) hy.push_back(model.h(p, t + 1));
  const VectorXd y_pred = unscented_mean(mset, hy);
  const MatrixXd s = unscented_covariance(mset, hy, y_pred) + model.R;
  const MatrixXd p_xy =
      unscented_cross_covariance(mset, predicted.mean, hy, y_pred);
  return {cross_cov_update(predicted, y_pred, s, p_xy, y, opt), t + 1};
}

}  // namespace detail

inline FilterState ukf_step(const FilterState& state, const SystemModel& model,
                            const VectorXd& u, const VectorXd& y,
                            const UtParams& params,
                            const FilterOptions& opt = {}) {
  return detail::ut_step(state, model, u, y, params, &symmetric_sigma_points,
                         opt);
}

inline FilterState ssukf_step(const FilterState& state, const SystemModel& model,
                              const VectorXd& u, const VectorXd& y,
                              const UtParams& params,
                              const FilterOptions& opt = {}) {
  return detail::ut_step(state, model, u, y, params, &spherical_simplex_points,
                         opt);
}

// Hybrid step: unscented predicted mean from a single sigma draw, linearized
// covariances throughout, and the measurement mean taken from the propagated
// points passed through h (no redraw).
inline FilterState newkf_step(const FilterState& state, const SystemModel& model,
                              const VectorXd& u, const VectorXd& y,
                              const UtParams& params,
                              const FilterOptions& opt = {}) {
  const int t = state.step;
  SigmaPointSet set = symmetric_sigma_points(state.belief, params);
  std::vector<VectorXd> fx;
  fx.reserve(set.points.size());
  for (const auto& p : set.points) fx.push_back(model.f(p, u, t));
  const VectorXd x_pred = unscented_mean(set, fx);
  const MatrixXd p_pred = linearized_predicted_cov(state, model, u);
  const GaussianBelief predicted(x_pred, p_pred);

  std::vector<VectorXd> hy;
  hy.reserve(fx.size());
  for (const auto& p : fx) hy.push_back(model.h(p, t + 1));
  const VectorXd y_pred = unscented_mean(set, hy);
  const MatrixXd h = model.jac_h ? model.jac_h(x_pred, t + 1)
                                 : model.measurement_jacobian(x_pred, t + 1);
  return {detail::jacobian_update(predicted, y_pred, h, model.R, y, opt), t + 1};
}

// Single-point variant: only the central point goes through f; the rest are
// reconstructed from its first-order expansion. Measurement stage matches the
// UKF.
inline FilterState spukf_step(const FilterState& state, const SystemModel& model,
                              const VectorXd& u, const VectorXd& y,
                              const UtParams& params,
                              const FilterOptions& opt = {}) {
  const int t = state.step;
  SigmaPointSet set = symmetric_sigma_points(state.belief, params);
  const VectorXd f0 = model.f(set.points[0], u, t);
  const MatrixXd jf = model.jac_f
                          ? model.jac_f(set.points[0], u, t)
                          : model.process_jacobian(set.points[0], u, t);
  std::vector<VectorXd> fx;
  fx.reserve(set.points.size());
  fx.push_back(f0);
  for (size_t i = 1; i < set.points.size(); ++i)
    fx.push_back(f0 + jf * (set.points[i] - set.points[0]));
  const VectorXd x_pred = unscented_mean(set, fx);
  const MatrixXd p_pred = unscented_covariance(set, fx, x_pred) + model.Q;
  const GaussianBelief predicted(x_pred, p_pred);

  SigmaPointSet mset = symmetric_sigma_points(predicted, params);
  std::vector<VectorXd> hy;
  hy.reserve(mset.points.size());
  for (const auto& p : mset.points) hy.push_back(model.h(p, t + 1));
  const VectorXd y_pred = unscented_mean(mset, hy);
  const MatrixXd s = unscented_covariance(mset, hy, y_pred) + model.R;
  const MatrixXd p_xy =
      unscented_cross_covariance(mset, predicted.mean, hy, y_pred);
  return {detail::cross_cov_update(predicted, y_pred, s, p_xy, y, opt), t + 1};
}

enum class FilterKind { Ekf, Ukf, NewKf, Spukf, Ssukf };

inline const char* filter_name(FilterKind k) {
  switch (k) {
    case FilterKind::Ekf: return "EKF";
    case FilterKind::Ukf: return "UKF";
    case FilterKind::NewKf: return "NewKF";
    case FilterKind::Spukf: return "SPUKF";
    case FilterKind::Ssukf: return "SSUKF";
  }
  return "?";
}

inline FilterState filter_step(FilterKind kind, const FilterState& state,
                               const SystemModel& model, const VectorXd& u,
                               const VectorXd& y, const UtParams& params,
                               const FilterOptions& opt = {}) {
  switch (kind) {
    case FilterKind::Ekf: return ekf_step(state, model, u, y, opt);
    case FilterKind::Ukf: return ukf_step(state, model, u, y, params, opt);
    case FilterKind::NewKf: return newkf_step(state, model, u, y, params, opt);
    case FilterKind::Spukf: return spukf_step(state, model, u, y, params, opt);
    case FilterKind::Ssukf: return ssukf_step(state, model, u, y, params, opt);
  }
  throw DomainError("filter_step: unknown filter kind");
}

}  // namespace nlkf

#endif
