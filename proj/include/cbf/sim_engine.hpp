#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cbf/barrier.hpp"
#include "cbf/scenario.hpp"

namespace cbf {

struct StepRecord {
  double t;
  Eigen::VectorXd state;  // full logged state (19 entries for quad_full)
  Eigen::VectorXd u_d;
  Eigen::VectorXd u;
  double h;
  double psi1;
  int qp_status;
  Eigen::VectorXd constraint_a;
  double constraint_b;
};

struct EpochRecord {
  long k;
  Eigen::VectorXd origin;
  LocalBarrier barrier;
};

struct RunSummary {
  double min_h = 0.0;
  double min_psi1 = 0.0;
  double final_goal_distance = 0.0;
  long infeasible_steps = 0;
  long steps = 0;
  long epochs = 0;
  long penetration_steps = 0;
  bool aborted = false;
  std::string abort_reason;
  int exit_code = 0;  // 0 safe, 2 safety violation, 3 infeasible abort
};

struct RunLog {
  std::vector<StepRecord> steps;
  std::vector<EpochRecord> epochs;
  RunSummary summary;
};

// Closed-loop simulation: perception at every kT_s, barrier rebuild, per-step
// safety filtering, RK4 integration. Deterministic given the scenario.
RunLog run(const Scenario& scenario);

// Non-throwing scenario checks; empty result means the scenario is runnable.
std::vector<std::string> validate(const Scenario& scenario);

// Deterministic serializations of the log.
std::string csv_log(const RunLog& log);
nlohmann::json summary_json(const RunLog& log);
std::string epochs_jsonl(const RunLog& log);

}  // namespace cbf
