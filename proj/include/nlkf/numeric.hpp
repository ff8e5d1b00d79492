#ifndef NLKF_NUMERIC_HPP
#define NLKF_NUMERIC_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "nlkf/gaussian.hpp"

namespace nlkf {

using VectorFn = std::function<VectorXd(const VectorXd&)>;

// Central differences, step h_i = cbrt(eps) * max(1, |x_i|) per coordinate.
inline MatrixXd numeric_jacobian(const VectorFn& fn, const VectorXd& x) {
  const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  const VectorXd f0 = fn(x);
  MatrixXd jac(f0.size(), x.size());
  VectorXd xp = x, xm = x;
  for (int i = 0; i < x.size(); ++i) {
    const double h = base * std::max(1.0, std::abs(x(i)));
    xp(i) = x(i) + h;
    xm(i) = x(i) - h;
    const VectorXd fp = fn(xp);
    const VectorXd fm = fn(xm);
    if (!fp.allFinite() || !fm.allFinite())
      throw DomainError("numeric_jacobian: non-finite output at coordinate " +
                        std::to_string(i));
    jac.col(i) = (fp - fm) / (2.0 * h);
    xp(i) = x(i);
    xm(i) = x(i);
  }
  return jac;
}

// Classical 4th-order Runge-Kutta step for dx/dt = deriv(x, u, t).
template <class Deriv>
VectorXd rk4_step(const Deriv& deriv, const VectorXd& x, const VectorXd& u,
                  double t, double dt) {
  if (!(dt > 0.0)) throw DomainError("rk4_step: dt must be positive");
  const VectorXd k1 = deriv(x, u, t);
  const VectorXd k2 = deriv(x + 0.5 * dt * k1, u, t + 0.5 * dt);
  const VectorXd k3 = deriv(x + 0.5 * dt * k2, u, t + 0.5 * dt);
  const VectorXd k4 = deriv(x + dt * k3, u, t + dt);
  if (!k1.allFinite() || !k2.allFinite() || !k3.allFinite() || !k4.allFinite())
    throw DomainError("rk4_step: non-finite stage derivative");
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace nlkf

#endif
