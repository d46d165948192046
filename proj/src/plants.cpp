#include "cbf/plants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cbf {

PlantLinearization unicycle_fields(const Eigen::Vector4d& x) {
  if (!x.allFinite()) {
    throw std::invalid_argument("unicycle_fields: non-finite state");
  }
  const double v = x(2);
  const double theta = x(3);
  const double c = std::cos(theta);
  const double s = std::sin(theta);

  PlantLinearization plant;
  plant.f = Eigen::Vector4d(v * c, v * s, 0.0, 0.0);
  plant.g = Eigen::MatrixXd::Zero(4, 2);
  plant.g(2, 0) = 1.0;
  plant.g(3, 1) = 1.0;
  plant.dfdx = Eigen::MatrixXd::Zero(4, 4);
  plant.dfdx(0, 2) = c;
  plant.dfdx(0, 3) = -v * s;
  plant.dfdx(1, 2) = s;
  plant.dfdx(1, 3) = v * c;
  return plant;
}

Eigen::Vector2d unicycle_desired(const Eigen::Vector4d& x,
                                 const Eigen::Vector2d& goal,
                                 const UnicycleGains& gains) {
  const double v = x(2);
  const double theta = x(3);
  const double dx = x(0) - goal.x();
  const double dy = x(1) - goal.y();
  const double rho = std::hypot(dx, dy);
  if (rho < 1e-6) {
    // Bearing undefined at the goal; brake.
    return {-(gains.k1 + gains.k3) * v, 0.0};
  }
  const double delta = std::atan2(dy, dx) - theta + std::numbers::pi;
  const double sd = std::sin(delta);
  const double cd = std::cos(delta);
  const double u1 = -(gains.k1 + gains.k3) * v +
                    (1.0 + gains.k1 * gains.k3) * rho * cd +
                    gains.k1 * (rho * gains.k2 + v) * sd * sd;
  const double u2 = (gains.k2 + v / rho) * sd;
  return {u1, u2};
}

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& w) {
  Eigen::Matrix3d m;
  m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return m;
}

using QuadVec = Eigen::Matrix<double, 19, 1>;

QuadVec pack(const QuadrotorState& s) {
  QuadVec v;
  v.segment<3>(0) = s.q;
  v.segment<3>(3) = s.p;
  Eigen::Map<Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(v.data() + 6) = s.R;
  v.segment<3>(15) = s.omega;
  v(18) = s.thrust;
  return v;
}

QuadrotorState unpack(const QuadVec& v) {
  QuadrotorState s;
  s.q = v.segment<3>(0);
  s.p = v.segment<3>(3);
  s.R = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(v.data() + 6);
  s.omega = v.segment<3>(15);
  s.thrust = v(18);
  return s;
}

QuadVec quad_derivative(const QuadVec& xv, const QuadCommands& cmd,
                        const QuadParams& prm) {
  const QuadrotorState s = unpack(xv);
  const Eigen::Vector3d e3 = Eigen::Vector3d::UnitZ();

  const Eigen::Vector3d euler = euler_321(s.R);
  const double psi_rate_num = 0.0;  // commanded yaw is identically zero
  const double phi = euler(2);
  const double theta = euler(1);
  const double cphi = std::cos(phi), sphi = std::sin(phi);
  const double cth = std::cos(theta), sth = std::sin(theta);
  const double tth = sth / cth;

  // Body rates -> 3-2-1 Euler angle rates.
  const double phi_dot = s.omega.x() + s.omega.y() * sphi * tth + s.omega.z() * cphi * tth;
  const double theta_dot = s.omega.y() * cphi - s.omega.z() * sphi;
  const double psi_dot = (s.omega.y() * sphi + s.omega.z() * cphi) / cth;

  Eigen::Matrix3d euler_to_body;
  euler_to_body << 1.0, 0.0, -sth,
                   0.0, cphi, sphi * cth,
                   0.0, -sphi, cphi * cth;
  const Eigen::Vector3d pd(prm.k1 * (cmd.roll - phi) - prm.k2 * phi_dot,
                           prm.k1 * (cmd.pitch - theta) - prm.k2 * theta_dot,
                           prm.k3 * (psi_rate_num - psi_dot));

  QuadVec dv;
  dv.segment<3>(0) = s.p;
  dv.segment<3>(3) = (s.thrust / prm.mass) * (s.R * e3) - prm.gravity * e3;
  Eigen::Map<Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(dv.data() + 6) =
      s.R * skew(s.omega);
  dv.segment<3>(15) = euler_to_body * pd;
  dv(18) = prm.k4 * (cmd.thrust - s.thrust);
  return dv;
}

Eigen::Matrix3d reorthonormalize(const Eigen::Matrix3d& R) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d out = svd.matrixU() * svd.matrixV().transpose();
  if (out.determinant() < 0.0) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = -1.0;
    out = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return out;
}

}  // namespace

Eigen::Vector3d euler_321(const Eigen::Matrix3d& R) {
  const double yaw = std::atan2(R(1, 0), R(0, 0));
  const double pitch = -std::asin(std::clamp(R(2, 0), -1.0, 1.0));
  const double roll = std::atan2(R(2, 1), R(2, 2));
  return {yaw, pitch, roll};
}

QuadrotorState quad_full_step(const QuadrotorState& state,
                              const QuadCommands& commands, double dt,
                              const QuadParams& params) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("quad_full_step: dt must be positive");
  }
  const QuadVec x0 = pack(state);
  const QuadVec k1 = quad_derivative(x0, commands, params);
  const QuadVec k2 = quad_derivative(x0 + 0.5 * dt * k1, commands, params);
  const QuadVec k3 = quad_derivative(x0 + 0.5 * dt * k2, commands, params);
  const QuadVec k4 = quad_derivative(x0 + dt * k3, commands, params);
  const QuadVec x1 = x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!x1.allFinite()) {
    throw std::runtime_error("quad_full_step: integration produced non-finite state");
  }
  QuadrotorState next = unpack(x1);
  next.R = reorthonormalize(next.R);
  return next;
}

QuadCommands quad_command_map(const Eigen::Vector3d& u, const QuadParams& params) {
  double uz = u.z();
  if (uz + params.gravity <= 1e-9) {
    uz = -params.gravity + 0.5;
  }
  const double denom = uz + params.gravity;
  QuadCommands cmd;
  cmd.yaw = 0.0;
  cmd.pitch = std::atan(u.x() / denom);
  cmd.roll = std::atan(-u.y() * std::cos(cmd.pitch) / denom);
  cmd.thrust = denom * params.mass / (std::cos(cmd.roll) * std::cos(cmd.pitch));
  return cmd;
}

Eigen::Vector3d quad_command_acceleration(const QuadCommands& commands,
                                          const QuadParams& params) {
  const Eigen::Matrix3d R =
      (Eigen::AngleAxisd(commands.yaw, Eigen::Vector3d::UnitZ()) *
       Eigen::AngleAxisd(commands.pitch, Eigen::Vector3d::UnitY()) *
       Eigen::AngleAxisd(commands.roll, Eigen::Vector3d::UnitX()))
          .toRotationMatrix();
  return (commands.thrust / params.mass) * (R * Eigen::Vector3d::UnitZ()) -
         params.gravity * Eigen::Vector3d::UnitZ();
}

PlantLinearization quad_approx_fields(const Eigen::Matrix<double, 6, 1>& x) {
  PlantLinearization plant;
  plant.dfdx = Eigen::MatrixXd::Zero(6, 6);
  plant.dfdx.topRightCorner(3, 3) = Eigen::Matrix3d::Identity();
  plant.f = plant.dfdx * x;
  plant.g = Eigen::MatrixXd::Zero(6, 3);
  plant.g.bottomRows(3) = Eigen::Matrix3d::Identity();
  return plant;
}

Eigen::Vector3d quad_desired(const Eigen::Vector3d& q, const Eigen::Vector3d& p,
                             const Eigen::Vector3d& goal) {
  return 3.0 * (goal - q).array().tanh().matrix() - 2.0 * p;
}

}  // namespace cbf
