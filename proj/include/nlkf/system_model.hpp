#ifndef NLKF_SYSTEM_MODEL_HPP
#define NLKF_SYSTEM_MODEL_HPP

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "nlkf/numeric.hpp"

namespace nlkf {

// Discrete-time nonlinear system x_k = f(x_{k-1}, u, t) + w, y_k = h(x_k, t) + v.
// Analytic Jacobians are optional; filters fall back to central differences.
struct SystemModel {
  int n = 0;
  int m = 0;
  std::function<VectorXd(const VectorXd&, const VectorXd&, int)> f;
  std::function<VectorXd(const VectorXd&, int)> h;
  std::function<MatrixXd(const VectorXd&, const VectorXd&, int)> jac_f;  // may be empty
  std::function<MatrixXd(const VectorXd&, int)> jac_h;                   // may be empty
  MatrixXd Q;
  MatrixXd R;

  bool has_analytic_jacobians() const {
    return static_cast<bool>(jac_f) && static_cast<bool>(jac_h);
  }

  MatrixXd process_jacobian(const VectorXd& x, const VectorXd& u, int t) const {
    if (jac_f) return jac_f(x, u, t);
    return numeric_jacobian([&](const VectorXd& v) { return f(v, u, t); }, x);
  }

  MatrixXd measurement_jacobian(const VectorXd& x, int t) const {
    if (jac_h) return jac_h(x, t);
    return numeric_jacobian([&](const VectorXd& v) { return h(v, t); }, x);
  }
};

// Call counters for the flop-model accounting tests. Jacobian evaluations are
// counted separately and do not contribute to f/h call counts even when
// numeric differentiation is used underneath.
struct CallCounts {
  long f_calls = 0;
  long h_calls = 0;
  long jac_f_calls = 0;
  long jac_h_calls = 0;
  void reset() { *this = CallCounts{}; }
};

inline SystemModel instrument(const SystemModel& model,
                              std::shared_ptr<CallCounts> counts) {
  SystemModel wrapped = model;
  wrapped.f = [inner = model.f, counts](const VectorXd& x, const VectorXd& u,
                                        int t) {
    ++counts->f_calls;
    return inner(x, u, t);
  };
  wrapped.h = [inner = model.h, counts](const VectorXd& x, int t) {
    ++counts->h_calls;
    return inner(x, t);
  };
  // Route Jacobians through the uninstrumented functions so numeric
  // differentiation does not inflate f/h counts.
  wrapped.jac_f = [m = model, counts](const VectorXd& x, const VectorXd& u,
                                      int t) {
    ++counts->jac_f_calls;
    return m.process_jacobian(x, u, t);
  };
  wrapped.jac_h = [m = model, counts](const VectorXd& x, int t) {
    ++counts->jac_h_calls;
    return m.measurement_jacobian(x, t);
  };
  return wrapped;
}

// Scalar polynomial system for the moment-order tests: f and h both equal the
// polynomial with the given coefficients (highest degree first).
inline SystemModel polynomial_test_model(int degree,
                                         const std::vector<double>& coeffs) {
  if (degree < 1 || degree > 4)
    throw DomainError("polynomial_test_model: degree must be in 1..4");
  if (static_cast<int>(coeffs.size()) != degree + 1)
    throw DimensionError("polynomial_test_model: need degree+1 coefficients");

  auto eval = [coeffs](double x) {
    double y = 0.0;
    for (double c : coeffs) y = y * x + c;
    return y;
  };
  auto deriv = [coeffs, degree](double x) {
    double y = 0.0;
    for (int i = 0; i < degree; ++i) y = y * x + coeffs[i] * (degree - i);
    return y;
  };

  SystemModel model;
  model.n = 1;
  model.m = 1;
  model.f = [eval](const VectorXd& x, const VectorXd&, int) {
    return VectorXd::Constant(1, eval(x(0)));
  };
  model.h = [eval](const VectorXd& x, int) {
    return VectorXd::Constant(1, eval(x(0)));
  };
  model.jac_f = [deriv](const VectorXd& x, const VectorXd&, int) {
    return MatrixXd::Constant(1, 1, deriv(x(0)));
  };
  model.jac_h = [deriv](const VectorXd& x, int) {
    return MatrixXd::Constant(1, 1, deriv(x(0)));
  };
  model.Q = MatrixXd::Zero(1, 1);
  model.R = MatrixXd::Identity(1, 1);
  return model;
}

}  // namespace nlkf

#endif
