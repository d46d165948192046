#include "cbf/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cbf/plants.hpp"
#include "cbf/safety_filter.hpp"

namespace cbf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool limited_fov(const Scenario& s) { return s.cbf.fov < kTwoPi - 1e-12; }

// Plant adapter for the closed loop. The "filter state" is what the barrier
// cascade sees (the full state for the unicycle and double integrator, the
// (q, p) sub-state for the full quadrotor).
class PlantSim {
 public:
  virtual ~PlantSim() = default;
  virtual int filter_dim() const = 0;
  virtual int pos_dim() const = 0;
  virtual int input_dim() const = 0;
  virtual Eigen::VectorXd filter_state() const = 0;
  virtual Eigen::VectorXd log_state() const = 0;
  virtual double heading() const { return 0.0; }
  virtual PlantLinearization linearization() const = 0;
  virtual Eigen::VectorXd desired(const Eigen::VectorXd& goal) const = 0;
  virtual void step(const Eigen::VectorXd& u, double dt) = 0;
};

template <typename Deriv>
Eigen::VectorXd rk4(const Eigen::VectorXd& x, double dt, Deriv&& deriv) {
  const Eigen::VectorXd k1 = deriv(x);
  const Eigen::VectorXd k2 = deriv(x + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = deriv(x + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = deriv(x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

class UnicycleSim final : public PlantSim {
 public:
  explicit UnicycleSim(const Eigen::Vector4d& x0) : x_(x0) {}
  int filter_dim() const override { return 4; }
  int pos_dim() const override { return 2; }
  int input_dim() const override { return 2; }
  Eigen::VectorXd filter_state() const override { return x_; }
  Eigen::VectorXd log_state() const override { return x_; }
  double heading() const override { return x_(3); }
  PlantLinearization linearization() const override { return unicycle_fields(x_); }
  Eigen::VectorXd desired(const Eigen::VectorXd& goal) const override {
    return unicycle_desired(x_, goal.head<2>());
  }
  void step(const Eigen::VectorXd& u, double dt) override {
    x_ = rk4(x_, dt, [&u](const Eigen::VectorXd& x) {
      Eigen::VectorXd dx(4);
      dx << x(2) * std::cos(x(3)), x(2) * std::sin(x(3)), u(0), u(1);
      return dx;
    });
  }

 private:
  Eigen::Vector4d x_;
};

class QuadApproxSim final : public PlantSim {
 public:
  explicit QuadApproxSim(const Eigen::Matrix<double, 6, 1>& x0) : x_(x0) {}
  int filter_dim() const override { return 6; }
  int pos_dim() const override { return 3; }
  int input_dim() const override { return 3; }
  Eigen::VectorXd filter_state() const override { return x_; }
  Eigen::VectorXd log_state() const override { return x_; }
  PlantLinearization linearization() const override { return quad_approx_fields(x_); }
  Eigen::VectorXd desired(const Eigen::VectorXd& goal) const override {
    return quad_desired(x_.head<3>(), x_.tail<3>(), goal.head<3>());
  }
  void step(const Eigen::VectorXd& u, double dt) override {
    x_ = rk4(x_, dt, [&u](const Eigen::VectorXd& x) {
      Eigen::VectorXd dx(6);
      dx.head(3) = x.tail(3);
      dx.tail(3) = u;
      return dx;
    });
  }

 private:
  Eigen::Matrix<double, 6, 1> x_;
};

class QuadFullSim final : public PlantSim {
 public:
  explicit QuadFullSim(const Eigen::Matrix<double, 6, 1>& x0) {
    state_.q = x0.head<3>();
    state_.p = x0.tail<3>();
    state_.thrust = params_.mass * params_.gravity;  // hover trim
  }
  int filter_dim() const override { return 6; }
  int pos_dim() const override { return 3; }
  int input_dim() const override { return 3; }
  Eigen::VectorXd filter_state() const override {
    Eigen::VectorXd x(6);
    x << state_.q, state_.p;
    return x;
  }
  Eigen::VectorXd log_state() const override {
    Eigen::VectorXd x(19);
    x.head<3>() = state_.q;
    x.segment<3>(3) = state_.p;
    x.segment<9>(6) =
        Eigen::Map<const Eigen::Matrix<double, 9, 1>>(state_.R.data());
    x.segment<3>(15) = state_.omega;
    x(18) = state_.thrust;
    return x;
  }
  PlantLinearization linearization() const override {
    Eigen::Matrix<double, 6, 1> x;
    x << state_.q, state_.p;
    return quad_approx_fields(x);
  }
  Eigen::VectorXd desired(const Eigen::VectorXd& goal) const override {
    return quad_desired(state_.q, state_.p, goal.head<3>());
  }
  void step(const Eigen::VectorXd& u, double dt) override {
    const QuadCommands cmd = quad_command_map(u, params_);
    state_ = quad_full_step(state_, cmd, dt, params_);
  }

 private:
  QuadParams params_;
  QuadrotorState state_;
};

std::unique_ptr<PlantSim> make_plant(const Scenario& s) {
  switch (s.plant) {
    case PlantKind::kUnicycle:
      return std::make_unique<UnicycleSim>(Eigen::Vector4d(s.initial_state));
    case PlantKind::kQuadApprox:
      return std::make_unique<QuadApproxSim>(
          Eigen::Matrix<double, 6, 1>(s.initial_state));
    case PlantKind::kQuadFull:
      return std::make_unique<QuadFullSim>(
          Eigen::Matrix<double, 6, 1>(s.initial_state));
  }
  throw std::logic_error("make_plant: unreachable");
}

LocalBarrier barrier_from_scan_at(const Scenario& s, const PlantSim& plant,
                                  long epoch) {
  const Eigen::VectorXd pos = plant.filter_state().head(plant.pos_dim());
  ScanParams sp{s.cbf.ray_count, s.cbf.r_bar, s.cbf.fov, plant.heading()};
  const Scan sc = scan(s.world, pos, sp, epoch);
  std::optional<FovBoundarySamples> fov;
  if (limited_fov(s) && s.world.dimension == 2) {
    fov = fov_boundary(pos.head<2>(), plant.heading(), s.cbf.fov, s.cbf.r_bar,
                       s.cbf.boundary_samples);
  }
  return build_local_barrier(sc, fov, {s.cbf.d_w, s.cbf.d_s, s.cbf.r_bar},
                             s.cbf.kappa1);
}

CascadeConfig cascade_config(const Scenario& s) {
  CascadeConfig cfg;
  cfg.relative_degree = s.cbf.relative_degree;
  cfg.alphas.push_back({s.cbf.alpha1});
  if (s.cbf.relative_degree == 2) cfg.alphas.push_back({s.cbf.alpha2});
  return cfg;
}

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  out += buf;
}

}  // namespace

std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> diag;
  auto require = [&diag](bool ok, const std::string& msg) {
    if (!ok) diag.push_back(msg);
  };

  require(s.cbf.kappa1 > 0.0, "soft-min sharpness kappa1 must be positive");
  require(s.cbf.kappa > 0.0, "soft-max sharpness kappa must be positive");
  require(s.cbf.alpha1 > 0.0, "class-K gain must be positive (alpha1)");
  if (s.cbf.relative_degree == 2) {
    require(s.cbf.alpha2 > 0.0, "class-K gain must be positive (alpha2)");
  }
  require(s.cbf.relative_degree == 1 || s.cbf.relative_degree == 2,
          "relative degree must be 1 or 2");
  require(s.cbf.window >= 1, "window N must be >= 1");
  require(s.cbf.ray_count >= 1, "ray count P must be >= 1");
  require(s.cbf.sample_period > 0.0, "sample period T_s must be positive");
  require(s.cbf.lambda >= 1.0, "homotopy compression lambda must be >= 1");
  require(s.cbf.d_w > 0.0, "semi-minor axis d_w must be positive");
  require(s.cbf.d_s >= 0.0, "safety margin d_s must be nonnegative");
  require(s.cbf.r_bar > 0.0, "sensor radius r_bar must be positive");
  require(s.run.dt > 0.0, "integration step dt must be positive");
  require(s.run.duration >= 0.0, "duration must be nonnegative");

  const int expected_state = s.plant == PlantKind::kUnicycle ? 4 : 6;
  const int expected_goal = s.plant == PlantKind::kUnicycle ? 2 : 3;
  require(s.initial_state.size() == expected_state,
          "initial state has the wrong dimension for the plant");
  require(s.goal.size() == expected_goal, "goal has the wrong dimension");
  require(s.cbf.relative_degree == 2,
          "the shipped plants are relative degree 2 (position barrier with "
          "acceleration input)");
  if (s.plant == PlantKind::kUnicycle) {
    require(s.world.dimension == 2, "unicycle requires a 2D world");
  } else {
    require(s.world.dimension == 3, "quadrotor requires a 3D world");
  }

  if (limited_fov(s)) {
    require(s.world.dimension == 2, "limited FOV is supported in 2D only");
    require(s.cbf.boundary_samples >= 2,
            "limited FOV requires at least 2 boundary samples (L)");
  }

  if (s.run.dt > 0.0 && s.cbf.sample_period > 0.0) {
    const double ratio = s.cbf.sample_period / s.run.dt;
    require(std::abs(ratio - std::round(ratio)) < 1e-9,
            "T_s must be an integer multiple of dt");
  }

  if (!diag.empty()) return diag;

  if (s.initial_state.size() == expected_state) {
    const auto plant = make_plant(s);
    const Eigen::VectorXd pos = plant->filter_state().head(plant->pos_dim());
    for (int i = 0; i < pos.size(); ++i) {
      if (pos(i) < s.world.bounds_min(i) || pos(i) > s.world.bounds_max(i)) {
        diag.push_back("initial position outside world bounds");
        break;
      }
    }
    if (world_contains(s.world, pos)) {
      diag.push_back("initial state unsafe: inside an obstacle");
      return diag;
    }
    // The safety guarantee needs the initial state inside the composite
    // barrier's 0-superlevel set under the first scan.
    const LocalBarrier b0 = barrier_from_scan_at(s, *plant, 0);
    const BarrierBuffer buffer =
        warm_start_buffer(b0, s.cbf.window, s.cbf.sample_period, s.cbf.kappa,
                          HomotopyParams(s.cbf.relative_degree, s.cbf.lambda));
    const Jet2 jet =
        composite_h(buffer, plant->filter_state(), 0.0, plant->filter_dim());
    if (jet.value < 0.0) {
      diag.push_back("initial state unsafe: h(x0, 0) < 0");
    } else if (s.cbf.relative_degree == 2) {
      const Psi1 p1 = psi1(jet, plant->linearization(), {s.cbf.alpha1});
      if (p1.value < 0.0) {
        diag.push_back("initial state unsafe: psi1(x0, 0) < 0");
      }
    }
  }
  return diag;
}

RunLog run(const Scenario& s) {
  {
    const std::vector<std::string> diag = validate(s);
    if (!diag.empty()) {
      std::string msg = "scenario invalid:";
      for (const std::string& d : diag) msg += "\n  - " + d;
      throw std::invalid_argument(msg);
    }
  }

  const auto plant = make_plant(s);
  const int n = plant->filter_dim();
  const CascadeConfig cascade = cascade_config(s);
  const HomotopyParams blend(s.cbf.relative_degree, s.cbf.lambda);

  const long steps_per_epoch = std::lround(s.cbf.sample_period / s.run.dt);
  const long n_steps = std::lround(s.run.duration / s.run.dt);

  RunLog log;
  log.summary.min_h = std::numeric_limits<double>::infinity();
  log.summary.min_psi1 = std::numeric_limits<double>::infinity();

  std::optional<BarrierBuffer> buffer;

  for (long step = 0; step <= n_steps; ++step) {
    const double t = static_cast<double>(step) * s.run.dt;

    if (step % steps_per_epoch == 0) {
      const long k = step / steps_per_epoch;
      const LocalBarrier bk = barrier_from_scan_at(s, *plant, k);
      if (k == 0) {
        buffer = warm_start_buffer(bk, s.cbf.window, s.cbf.sample_period,
                                   s.cbf.kappa, blend);
      } else {
        buffer = advance_epoch(*buffer, bk);
      }
      log.epochs.push_back(
          {k, plant->filter_state().head(plant->pos_dim()), bk});
    }

    const Eigen::VectorXd fstate = plant->filter_state();
    const Jet2 jet = composite_h(*buffer, fstate, t, n);
    const PlantLinearization lin = plant->linearization();
    const Eigen::VectorXd u_d = plant->desired(s.goal);
    const ConstraintRow row = constraint_row(jet, lin, cascade);
    const QpResult qp = solve_qp(row, u_d);

    Eigen::VectorXd u = qp.u;
    bool abort_now = false;
    if (qp.status == QpStatus::kInfeasible) {
      ++log.summary.infeasible_steps;
      u = u_d;
      if (s.filter_mode == FilterMode::kStrict) {
        abort_now = true;
      }
    }

    double psi1_value = std::numeric_limits<double>::quiet_NaN();
    if (cascade.relative_degree == 2) {
      psi1_value = psi1(jet, lin, cascade.alphas[0]).value;
      log.summary.min_psi1 = std::min(log.summary.min_psi1, psi1_value);
    }
    log.summary.min_h = std::min(log.summary.min_h, jet.value);

    log.steps.push_back({t, plant->log_state(), u_d, u, jet.value, psi1_value,
                         static_cast<int>(qp.status), row.a, row.b});

    const Eigen::VectorXd pos = fstate.head(plant->pos_dim());
    if (world_contains(s.world, pos)) {
      ++log.summary.penetration_steps;
    }

    if (abort_now) {
      log.summary.aborted = true;
      log.summary.abort_reason = "safety filter infeasible at t=" + std::to_string(t);
      break;
    }
    if (step < n_steps) {
      plant->step(u, s.run.dt);
    }
  }

  const Eigen::VectorXd final_pos =
      plant->filter_state().head(plant->pos_dim());
  log.summary.final_goal_distance = (final_pos - s.goal).norm();
  log.summary.steps = static_cast<long>(log.steps.size());
  log.summary.epochs = static_cast<long>(log.epochs.size());
  if (log.summary.aborted) {
    log.summary.exit_code = 3;
  } else if (log.summary.penetration_steps > 0) {
    log.summary.exit_code = 2;
  } else {
    log.summary.exit_code = 0;
  }
  return log;
}

std::string csv_log(const RunLog& log) {
  std::string out;
  if (log.steps.empty()) return out;
  const auto& first = log.steps.front();
  out += "t";
  for (Eigen::Index i = 0; i < first.state.size(); ++i) {
    out += ",x" + std::to_string(i);
  }
  for (Eigen::Index i = 0; i < first.u_d.size(); ++i) {
    out += ",ud" + std::to_string(i);
  }
  for (Eigen::Index i = 0; i < first.u.size(); ++i) {
    out += ",u" + std::to_string(i);
  }
  out += ",h,psi1,qp_status\n";

  for (const StepRecord& rec : log.steps) {
    append_number(out, rec.t);
    for (Eigen::Index i = 0; i < rec.state.size(); ++i) {
      out += ',';
      append_number(out, rec.state(i));
    }
    for (Eigen::Index i = 0; i < rec.u_d.size(); ++i) {
      out += ',';
      append_number(out, rec.u_d(i));
    }
    for (Eigen::Index i = 0; i < rec.u.size(); ++i) {
      out += ',';
      append_number(out, rec.u(i));
    }
    out += ',';
    append_number(out, rec.h);
    out += ',';
    append_number(out, rec.psi1);
    out += ',' + std::to_string(rec.qp_status) + '\n';
  }
  return out;
}

nlohmann::json summary_json(const RunLog& log) {
  const RunSummary& s = log.summary;
  return {{"min_h", s.min_h},
          {"min_psi1", s.min_psi1},
          {"final_goal_distance", s.final_goal_distance},
          {"infeasible_steps", s.infeasible_steps},
          {"steps", s.steps},
          {"epochs", s.epochs},
          {"penetration_steps", s.penetration_steps},
          {"aborted", s.aborted},
          {"abort_reason", s.abort_reason},
          {"exit_code", s.exit_code}};
}

std::string epochs_jsonl(const RunLog& log) {
  std::string out;
  for (const EpochRecord& rec : log.epochs) {
    nlohmann::json j;
    j["k"] = rec.k;
    j["origin"] = std::vector<double>(rec.origin.data(),
                                      rec.origin.data() + rec.origin.size());
    j["primitive_count"] = rec.barrier.primitives.size();
    nlohmann::json prims = nlohmann::json::array();
    for (const EllipsoidBarrier& p : rec.barrier.primitives) {
      nlohmann::json jp;
      jp["center"] = std::vector<double>(p.center.data(),
                                         p.center.data() + p.center.size());
      jp["inv_sq_axes"] = std::vector<double>(
          p.inv_sq_axes.data(), p.inv_sq_axes.data() + p.inv_sq_axes.size());
      std::vector<double> rot;
      for (Eigen::Index r = 0; r < p.rotation.rows(); ++r) {
        for (Eigen::Index c = 0; c < p.rotation.cols(); ++c) {
          rot.push_back(p.rotation(r, c));
        }
      }
      jp["rotation"] = rot;
      prims.push_back(std::move(jp));
    }
    j["primitives"] = std::move(prims);
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace cbf
