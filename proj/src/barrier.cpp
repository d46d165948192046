#include "cbf/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cbf/soft_compose.hpp"

namespace cbf {

namespace {

using PosVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using PosMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

EllipsoidBarrier make_primitive(const Eigen::VectorXd& origin,
                                const Eigen::VectorXd& direction, double range,
                                const BarrierGeom& geom) {
  const int d = static_cast<int>(origin.size());
  EllipsoidBarrier prim;
  prim.center = origin + 0.5 * (geom.r_bar + range) * direction;

  const double a = 0.5 * (geom.r_bar - range) + geom.d_s;
  prim.inv_sq_axes = Eigen::VectorXd::Constant(d, 1.0 / (geom.d_w * geom.d_w));
  prim.inv_sq_axes(0) = 1.0 / (a * a);

  prim.rotation.resize(d, d);
  prim.rotation.col(0) = direction;
  if (d == 2) {
    prim.rotation.col(1) = Eigen::Vector2d(-direction.y(), direction.x());
  } else {
    // Any orthonormal completion works: the two minor axes are equal.
    Eigen::Vector3d dir3 = direction;
    Eigen::Vector3d seed = Eigen::Vector3d::UnitX();
    if (std::abs(dir3.x()) > 0.9) seed = Eigen::Vector3d::UnitY();
    const Eigen::Vector3d u = (seed - seed.dot(dir3) * dir3).normalized();
    prim.rotation.col(1) = u;
    prim.rotation.col(2) = dir3.cross(u);
  }
  if ((prim.rotation * prim.rotation.transpose() -
       Eigen::MatrixXd::Identity(d, d)).norm() > 1e-9) {
    throw std::runtime_error("build_local_barrier: rotation not orthonormal");
  }
  prim.quad = prim.rotation * prim.inv_sq_axes.asDiagonal() * prim.rotation.transpose();
  return prim;
}

}  // namespace

LocalBarrier build_local_barrier(const Scan& scan,
                                 const std::optional<FovBoundarySamples>& fov_samples,
                                 const BarrierGeom& geom, double kappa1) {
  if (scan.rays.empty()) {
    throw std::invalid_argument("build_local_barrier: empty scan");
  }
  if (!(geom.d_w > 0.0) || geom.d_s < 0.0) {
    throw std::invalid_argument("build_local_barrier: require d_w > 0, d_s >= 0");
  }
  if (!(kappa1 > 0.0)) {
    throw std::invalid_argument("build_local_barrier: kappa1 must be positive");
  }

  LocalBarrier barrier;
  barrier.epoch = scan.epoch;
  barrier.kappa1 = kappa1;
  barrier.position_dim = static_cast<int>(scan.origin.size());
  barrier.primitives.reserve(scan.rays.size() +
                             (fov_samples ? fov_samples->points.size() : 0));

  for (const Ray& ray : scan.rays) {
    barrier.primitives.push_back(
        make_primitive(scan.origin, ray.direction, ray.range, geom));
  }

  if (fov_samples) {
    // Boundary samples become pseudo-detections at their own range, so each
    // ellipse contains the sample and stretches out to r_bar. Samples closer
    // than the safety margin would swallow the scan origin itself; clamp the
    // range so sigma stays positive at the vehicle position.
    const double rho_min = std::max(2.0 * geom.d_s, 1e-6);
    const Eigen::Vector2d origin2 = scan.origin.head<2>();
    for (const Eigen::Vector2d& p : fov_samples->points) {
      const Eigen::Vector2d delta = p - origin2;
      const double rho = delta.norm();
      const double rho_eff = std::min(std::max(rho, rho_min), geom.r_bar);
      Eigen::Vector2d dir;
      if (rho > 1e-12) {
        dir = delta / rho;
      } else {
        dir = Eigen::Vector2d(std::cos(scan.heading), std::sin(scan.heading));
      }
      barrier.primitives.push_back(
          make_primitive(scan.origin, dir, rho_eff, geom));
    }
  }
  return barrier;
}

Jet2 eval_local_barrier(const LocalBarrier& barrier,
                        const Eigen::VectorXd& position) {
  const int d = barrier.position_dim;
  if (position.size() != d) {
    throw std::invalid_argument("eval_local_barrier: position dimension mismatch");
  }
  const std::size_t n = barrier.primitives.size();
  const double kappa = barrier.kappa1;

  // Soft-min accumulation, stabilized around the minimum primitive value.
  static thread_local std::vector<double> sigma;
  static thread_local std::vector<PosVec> grads;
  sigma.resize(n);
  grads.resize(n);

  double vmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const EllipsoidBarrier& prim = barrier.primitives[i];
    const PosVec delta = position - prim.center;
    const PosVec md = prim.quad * delta;
    sigma[i] = delta.dot(md) - 1.0;
    grads[i] = 2.0 * md;
    vmin = std::min(vmin, sigma[i]);
  }

  double sum = 0.0;
  PosVec g = PosVec::Zero(d);
  PosMat h = PosMat::Zero(d, d);
  PosMat outer = PosMat::Zero(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::exp(-kappa * (sigma[i] - vmin));
    sum += w;
    g.noalias() += w * grads[i];
    h.noalias() += w * 2.0 * barrier.primitives[i].quad;
    outer.noalias() += w * (grads[i] * grads[i].transpose());
  }
  g /= sum;
  h /= sum;
  outer /= sum;

  Jet2 out(d);
  out.value = vmin - std::log(sum) / kappa;
  out.grad = g;
  out.hess = h - kappa * (outer - g * g.transpose());
  return out;
}

Jet2 eval_local_barrier_state(const LocalBarrier& barrier,
                              const Eigen::VectorXd& state, int state_dim) {
  const int d = barrier.position_dim;
  if (state.size() < d || state_dim < d) {
    throw std::invalid_argument("eval_local_barrier_state: state too small");
  }
  const Jet2 pos_jet = eval_local_barrier(barrier, state.head(d));
  Jet2 out(state_dim + 1);
  out.value = pos_jet.value;
  out.grad.head(d) = pos_jet.grad;
  out.hess.topLeftCorner(d, d) = pos_jet.hess;
  return out;
}

BarrierBuffer warm_start_buffer(const LocalBarrier& b0, int window,
                                double sample_period, double kappa,
                                const HomotopyParams& blend) {
  if (window < 1) {
    throw std::invalid_argument("warm_start_buffer: window must be >= 1");
  }
  if (!(sample_period > 0.0)) {
    throw std::invalid_argument("warm_start_buffer: sample_period must be positive");
  }
  if (!(kappa > 0.0)) {
    throw std::invalid_argument("warm_start_buffer: kappa must be positive");
  }
  BarrierBuffer buffer{.history = {},
                       .window = window,
                       .sample_period = sample_period,
                       .kappa = kappa,
                       .epoch = b0.epoch,
                       .blend = blend};
  for (int i = 0; i <= window; ++i) {
    LocalBarrier copy = b0;
    copy.epoch = b0.epoch - i;
    buffer.history.push_back(std::move(copy));
  }
  return buffer;
}

BarrierBuffer advance_epoch(const BarrierBuffer& buffer,
                            const LocalBarrier& new_barrier) {
  if (new_barrier.epoch != buffer.epoch + 1) {
    throw std::invalid_argument("advance_epoch: epoch mismatch");
  }
  BarrierBuffer next = buffer;
  next.epoch = new_barrier.epoch;
  next.history.push_front(new_barrier);
  next.history.pop_back();
  return next;
}

Jet2 composite_h(const BarrierBuffer& buffer, const Eigen::VectorXd& state,
                 double t, int state_dim) {
  const int N = buffer.window;
  const double Ts = buffer.sample_period;
  const double tau_raw = t / Ts - static_cast<double>(buffer.epoch);
  if (tau_raw < -1e-9 || tau_raw > 1.0 + 1e-9) {
    throw std::runtime_error("composite_h: t outside the buffer's epoch interval");
  }
  const double tau = std::clamp(tau_raw, 0.0, 1.0);

  const int d = buffer.history.front().position_dim;
  const Eigen::VectorXd pos = state.head(d);

  // Argument jets live in (position, t) space; time enters only through the
  // homotopy blend of the newest and oldest barrier.
  std::vector<Jet2> args;
  args.reserve(N);
  for (int i = 1; i <= N - 1; ++i) {
    const Jet2 pj = eval_local_barrier(buffer.history[i], pos);
    Jet2 arg(d + 1);
    arg.value = pj.value;
    arg.grad.head(d) = pj.grad;
    arg.hess.topLeftCorner(d, d) = pj.hess;
    args.push_back(std::move(arg));
  }

  const Jet2 newest = eval_local_barrier(buffer.history.front(), pos);
  const Jet2 oldest = eval_local_barrier(buffer.history.back(), pos);
  const double e0 = eta(buffer.blend, tau);
  const double e1 = eta_derivative(buffer.blend, tau, 1) / Ts;
  const double e2 = eta_derivative(buffer.blend, tau, 2) / (Ts * Ts);

  Jet2 blend_arg(d + 1);
  blend_arg.value = e0 * newest.value + (1.0 - e0) * oldest.value;
  blend_arg.grad.head(d) = e0 * newest.grad + (1.0 - e0) * oldest.grad;
  blend_arg.grad(d) = e1 * (newest.value - oldest.value);
  blend_arg.hess.topLeftCorner(d, d) = e0 * newest.hess + (1.0 - e0) * oldest.hess;
  const JetVec cross = e1 * (newest.grad - oldest.grad);
  blend_arg.hess.col(d).head(d) = cross;
  blend_arg.hess.row(d).head(d) = cross.transpose();
  blend_arg.hess(d, d) = e2 * (newest.value - oldest.value);
  args.push_back(std::move(blend_arg));

  const Jet2 hx = softmax_jet(SoftParams(buffer.kappa, N), args);

  Jet2 out(state_dim + 1);
  out.value = hx.value;
  out.grad.head(d) = hx.grad.head(d);
  out.grad(state_dim) = hx.grad(d);
  out.hess.topLeftCorner(d, d) = hx.hess.topLeftCorner(d, d);
  out.hess.col(state_dim).head(d) = hx.hess.col(d).head(d);
  out.hess.row(state_dim).head(d) = hx.hess.row(d).head(d);
  out.hess(state_dim, state_dim) = hx.hess(d, d);
  return out;
}

}  // namespace cbf
