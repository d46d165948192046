#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cbf/jet.hpp"

namespace cbf {

// Linear extended class-K function alpha(s) = gain * s.
struct ClassKLinear {
  double gain;
};

struct CascadeConfig {
  int relative_degree;  // 1 or 2
  std::vector<ClassKLinear> alphas;  // length = relative_degree
};

// Plant data at the current state: drift f, input matrix g, Jacobian of f.
struct PlantLinearization {
  Eigen::VectorXd f;
  Eigen::MatrixXd g;
  Eigen::MatrixXd dfdx;
};

struct Psi1 {
  double value;             // psi_1 = dh/dt + grad_x(h).f + alpha_1(h)
  Eigen::VectorXd grad_x;   // state gradient of psi_1
  double ddt;               // partial of psi_1 with respect to t
};

// First cascade step. Requires the full 2-jet of h; the barrier is assumed
// input-decoupled (L_g h = 0), so psi_1 has no direct u dependence.
Psi1 psi1(const Jet2& h_jet, const PlantLinearization& plant, ClassKLinear alpha1);

// Affine constraint a.u + b >= 0 extracted from the psi cascade.
struct ConstraintRow {
  Eigen::VectorXd a;
  double b;
};

ConstraintRow constraint_row(const Jet2& h_jet, const PlantLinearization& plant,
                             const CascadeConfig& config);

enum class QpStatus { kInactive = 0, kActive = 1, kInfeasible = 2 };

struct QpResult {
  Eigen::VectorXd u;
  QpStatus status;
};

// argmin |u - u_d|^2 subject to a.u + b >= 0, in closed form: pass-through
// when already feasible, half-space projection when active, infeasible when
// a vanishes with b < 0.
QpResult solve_qp(const ConstraintRow& row, const Eigen::VectorXd& u_d);

}  // namespace cbf
