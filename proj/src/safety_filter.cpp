#include "cbf/safety_filter.hpp"

#include <cmath>
#include <stdexcept>

namespace cbf {

namespace {
constexpr double kRowNormEps = 1e-10;
}

Psi1 psi1(const Jet2& h_jet, const PlantLinearization& plant, ClassKLinear alpha1) {
  const int n = static_cast<int>(plant.f.size());
  if (h_jet.dim() != n + 1) {
    throw std::invalid_argument("psi1: jet dimension must be state dim + 1");
  }
  const Eigen::VectorXd grad_x = h_jet.grad.head(n);
  const double dh_dt = h_jet.grad(n);
  const Eigen::MatrixXd hxx = h_jet.hess.topLeftCorner(n, n);
  const Eigen::VectorXd hxt = h_jet.hess.col(n).head(n);
  const double htt = h_jet.hess(n, n);

  Psi1 out;
  out.value = dh_dt + grad_x.dot(plant.f) + alpha1.gain * h_jet.value;
  out.grad_x = hxt + hxx * plant.f + plant.dfdx.transpose() * grad_x +
               alpha1.gain * grad_x;
  out.ddt = htt + hxt.dot(plant.f) + alpha1.gain * dh_dt;
  return out;
}

ConstraintRow constraint_row(const Jet2& h_jet, const PlantLinearization& plant,
                             const CascadeConfig& config) {
  const int n = static_cast<int>(plant.f.size());
  if (config.relative_degree != 1 && config.relative_degree != 2) {
    throw std::invalid_argument("constraint_row: relative degree must be 1 or 2");
  }
  if (static_cast<int>(config.alphas.size()) != config.relative_degree) {
    throw std::invalid_argument("constraint_row: need one alpha per cascade level");
  }

  ConstraintRow row;
  if (config.relative_degree == 1) {
    const Eigen::VectorXd grad_x = h_jet.grad.head(n);
    row.a = plant.g.transpose() * grad_x;
    row.b = h_jet.grad(n) + grad_x.dot(plant.f) +
            config.alphas[0].gain * h_jet.value;
  } else {
    const Psi1 p1 = psi1(h_jet, plant, config.alphas[0]);
    row.a = plant.g.transpose() * p1.grad_x;
    row.b = p1.ddt + p1.grad_x.dot(plant.f) + config.alphas[1].gain * p1.value;
  }
  if (!row.a.allFinite() || !std::isfinite(row.b)) {
    throw std::runtime_error("constraint_row: non-finite constraint (h=" +
                             std::to_string(h_jet.value) + ")");
  }
  return row;
}

QpResult solve_qp(const ConstraintRow& row, const Eigen::VectorXd& u_d) {
  if (!u_d.allFinite() || !row.a.allFinite() || !std::isfinite(row.b)) {
    throw std::invalid_argument("solve_qp: non-finite input");
  }
  const double slack = row.a.dot(u_d) + row.b;
  if (slack >= 0.0) {
    return {u_d, QpStatus::kInactive};
  }
  const double a_norm2 = row.a.squaredNorm();
  if (std::sqrt(a_norm2) <= kRowNormEps) {
    return {u_d, QpStatus::kInfeasible};
  }
  return {u_d - (slack / a_norm2) * row.a, QpStatus::kActive};
}

}  // namespace cbf
