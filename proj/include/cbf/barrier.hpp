#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "cbf/homotopy.hpp"
#include "cbf/jet.hpp"
#include "cbf/world.hpp"

namespace cbf {

// One ellipse/ellipsoid primitive: sigma(x) = (chi(x)-c)^T R P R^T (chi(x)-c) - 1,
// with the 0-superlevel set the region outside the ellipsoid.
struct EllipsoidBarrier {
  Eigen::VectorXd center;
  Eigen::MatrixXd rotation;     // first column is the ray direction
  Eigen::VectorXd inv_sq_axes;  // diagonal of P: (a^-2, d_w^-2, [d_w^-2])
  Eigen::MatrixXd quad;         // cached R P R^T
};

struct BarrierGeom {
  double d_w;    // semi-minor axis length
  double d_s;    // safety margin added to the semi-major axis
  double r_bar;  // sensor radius
};

// Per-epoch barrier b_k: soft minimum over ellipsoid primitives.
struct LocalBarrier {
  long epoch = 0;
  std::vector<EllipsoidBarrier> primitives;
  double kappa1;
  int position_dim;
};

// Builds one primitive per scan ray plus, in limited-FOV mode, one per
// field-of-view boundary sample (treated as a pseudo-detection at the
// sample's own range).
LocalBarrier build_local_barrier(const Scan& scan,
                                 const std::optional<FovBoundarySamples>& fov_samples,
                                 const BarrierGeom& geom, double kappa1);

// Soft-min jet of b at the given position, in position coordinates only
// (the barrier is frozen in time within its epoch).
Jet2 eval_local_barrier(const LocalBarrier& barrier,
                        const Eigen::VectorXd& position);

// Same jet embedded in (x, t) space of dimension state_dim + 1, with the
// position occupying the leading state components.
Jet2 eval_local_barrier_state(const LocalBarrier& barrier,
                              const Eigen::VectorXd& state, int state_dim);

// Ring of the N+1 most recent local barriers b_k ... b_{k-N}.
struct BarrierBuffer {
  std::deque<LocalBarrier> history;  // front = b_k, back = b_{k-N}
  int window;                        // N
  double sample_period;              // T_s
  double kappa;                      // soft-max sharpness
  long epoch = 0;                    // current k
  HomotopyParams blend;
};

// Fills the history with N+1 copies of b0 so the composite barrier is
// well-defined and time-constant from the first scan.
BarrierBuffer warm_start_buffer(const LocalBarrier& b0, int window,
                                double sample_period, double kappa,
                                const HomotopyParams& blend);

// Shifts the history by one epoch; the new barrier's epoch must be k+1.
BarrierBuffer advance_epoch(const BarrierBuffer& buffer,
                            const LocalBarrier& new_barrier);

// Time-varying composite CBF h(x, t): soft maximum over the N-1 middle
// barriers and the homotopy blend of the newest and oldest. Full 2-jet in
// (x, t); requires t within the buffer's current epoch interval.
Jet2 composite_h(const BarrierBuffer& buffer, const Eigen::VectorXd& state,
                 double t, int state_dim);

}  // namespace cbf
