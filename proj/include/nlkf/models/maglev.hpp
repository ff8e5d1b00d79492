#ifndef NLKF_MODELS_MAGLEV_HPP
#define NLKF_MODELS_MAGLEV_HPP

#include <cmath>

#include "nlkf/numeric.hpp"
#include "nlkf/system_model.hpp"

namespace nlkf {

// Physical constants of the hybrid permanent-magnet / electromagnet
// suspension. The published plant gives no values, so these are documented
// placeholders sized so the open-loop plant levitates near a 10 mm gap.
// Every experiment records the constant set it ran with.
struct MaglevConstants {
  double mu0 = 4.0e-7 * M_PI;  // vacuum permeability [H/m]
  double A_ag = 1e-2;          // air-gap pole area [m^2]
  double N_turns = 400.0;      // coil turns
  double H_c = 9e5;            // magnet coercivity [A/m]
  double L_PM = 1e-2;          // magnet length [m]
  double mu_r = 1.05;          // magnet relative permeability
  double A_PM = 1e-2;          // magnet cross-section [m^2]
  double R_c = 1e5;            // leakage reluctance coefficient
  double h_geom = 2e-2;        // yoke path length [m]
  double R_L = 1e6;            // leakage path reluctance
  double R_coil = 2.0;         // coil resistance [Ohm]
  double K_coeff = 1e-4;       // coil flux coefficient [H*m]
  double g_gravity = 9.81;     // gravity [m/s^2]

  // Gap-independent part of the effective magnetic path length.
  double path_offset() const {
    return L_PM * A_ag / (mu_r * A_PM) + R_c * (h_geom / R_L + mu0 * A_ag) +
           h_geom * L_PM / (mu0 * mu_r * A_PM * R_L);
  }
};

// State: x1 air gap [m], x2 vertical velocity [m/s], x3 coil current [A],
// x4 carried mass [kg]. Mass dynamics are zero; disturbance enters only as
// filter process noise.
inline VectorXd maglev_derivative(const VectorXd& x, double u,
                                  const MaglevConstants& c) {
  const double x1 = x(0), x2 = x(1), x3 = x(2), mass = x(3);
  if (!(x1 > 0.0)) throw DomainError("maglev_derivative: air gap not positive");
  if (!(mass > 0.0)) throw DomainError("maglev_derivative: mass not positive");

  const double mmf = c.N_turns * x3 - c.H_c * c.L_PM;
  const double den = 2.0 * x1 + c.path_offset();

  VectorXd dx(4);
  dx(0) = x2;
  dx(1) = -c.mu0 * c.A_ag * mmf * mmf / (mass * den * den) + c.g_gravity;
  dx(2) = x2 * x3 / x1 - c.R_coil * x1 * x3 / c.K_coeff + x1 * u / c.K_coeff;
  dx(3) = 0.0;
  return dx;
}

// Coil current and voltage that hold a given mass in equilibrium at the
// reference gap (zero velocity, zero acceleration).
struct MaglevEquilibrium {
  double current;
  double voltage;
};

inline MaglevEquilibrium maglev_equilibrium(double gap, double mass,
                                            const MaglevConstants& c) {
  const double den = 2.0 * gap + c.path_offset();
  const double mmf = std::sqrt(mass * c.g_gravity * den * den / (c.mu0 * c.A_ag));
  // Lower branch: the permanent magnet provides the lift, the coil trims it.
  const double current = (c.H_c * c.L_PM - mmf) / c.N_turns;
  return {current, c.R_coil * current};
}

// Proportional-derivative gap regulator on the true state; keeps the
// open-loop-unstable plant levitating during truth simulation. The recorded
// voltage sequence is shared with the filters as a known input.
struct MaglevController {
  double gap_ref = 1e-2;
  double kp = 4000.0;
  double kd = 120.0;
  double u_eq = 0.0;

  double control(const VectorXd& x) const {
    return u_eq - kp * (x(0) - gap_ref) - kd * x(1);
  }
};

// Discrete-time model for the filters: one RK4 step of the plant derivative
// per sample, gap measurement, numeric Jacobians.
struct MaglevModel {
  MaglevConstants constants;
  double dt = 1e-3;
  double q_gap = 1e-10;
  double q_vel = 1e-6;
  double q_cur = 1e-6;
  double q_mass = 1e-4;    // random-walk disturbance on the augmented mass
  double meas_noise_var = 1e-8;  // gap sensor variance [m^2]

  VectorXd step(const VectorXd& x, double u, double t) const {
    return rk4_step(
        [this](const VectorXd& s, const VectorXd& uv, double) {
          return maglev_derivative(s, uv(0), constants);
        },
        x, VectorXd::Constant(1, u), t, dt);
  }

  SystemModel filter_model() const {
    SystemModel model;
    model.n = 4;
    model.m = 1;
    model.f = [*this](const VectorXd& x, const VectorXd& u, int t) {
      return step(x, u(0), t * dt);
    };
    model.h = [](const VectorXd& x, int) { return x.head(1); };
    model.jac_h = [](const VectorXd&, int) {
      MatrixXd h = MatrixXd::Zero(1, 4);
      h(0, 0) = 1.0;
      return h;
    };
    model.Q = VectorXd{{q_gap, q_vel, q_cur, q_mass}}.asDiagonal();
    model.R = MatrixXd::Constant(1, 1, meas_noise_var);
    return model;
  }
};

}  // namespace nlkf

#endif
