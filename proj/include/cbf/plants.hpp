#pragma once

#include <Eigen/Dense>

#include "cbf/safety_filter.hpp"

namespace cbf {

// --- Nonholonomic ground robot: x = (q_x, q_y, v, theta), u = (vdot, thetadot)

PlantLinearization unicycle_fields(const Eigen::Vector4d& x);

struct UnicycleGains {
  double k1 = 0.5;
  double k2 = 3.0;
  double k3 = 3.0;
};

// Goal-seeking desired control; falls back to pure braking at the goal where
// the bearing angle is undefined.
Eigen::Vector2d unicycle_desired(const Eigen::Vector4d& x,
                                 const Eigen::Vector2d& goal,
                                 const UnicycleGains& gains = {});

// --- Attitude-stabilized quadrotor

struct QuadParams {
  double mass = 0.1;
  double gravity = 9.81;
  double k1 = 3.4e3;    // attitude proportional
  double k2 = 116.67;   // attitude rate damping
  double k3 = 1950.0;   // yaw-rate gain
  double k4 = 3.9e3;    // thrust tracking
};

struct QuadrotorState {
  Eigen::Vector3d q = Eigen::Vector3d::Zero();   // position
  Eigen::Vector3d p = Eigen::Vector3d::Zero();   // velocity
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();  // body -> inertial
  Eigen::Vector3d omega = Eigen::Vector3d::Zero();  // body angular velocity
  double thrust = 0.0;
};

struct QuadCommands {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
  double thrust = 0.0;
};

// One RK4 step of the full dynamics with the commanded attitude/thrust held
// constant; R is re-orthonormalized after the step.
QuadrotorState quad_full_step(const QuadrotorState& state,
                              const QuadCommands& commands, double dt,
                              const QuadParams& params = {});

// Inverts a commanded translational acceleration into (yaw=0, pitch, roll,
// thrust). Requires u_z > -g; u_z is clamped to -g + 0.5 beyond that.
QuadCommands quad_command_map(const Eigen::Vector3d& u, const QuadParams& params = {});

// Inertial acceleration produced when the attitude exactly tracks the
// commands (the forward map; used to cross-check the inversion).
Eigen::Vector3d quad_command_acceleration(const QuadCommands& commands,
                                          const QuadParams& params = {});

// Double-integrator approximation: x = (q, p), u = translational acceleration.
PlantLinearization quad_approx_fields(const Eigen::Matrix<double, 6, 1>& x);

// u_d = 3 tanh(q_g - q) - 2 p, elementwise.
Eigen::Vector3d quad_desired(const Eigen::Vector3d& q, const Eigen::Vector3d& p,
                             const Eigen::Vector3d& goal);

// 3-2-1 Euler angles (yaw, pitch, roll) of R.
Eigen::Vector3d euler_321(const Eigen::Matrix3d& R);

}  // namespace cbf
