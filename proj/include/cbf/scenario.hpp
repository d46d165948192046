#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cbf/world.hpp"

namespace cbf {

enum class PlantKind { kUnicycle, kQuadFull, kQuadApprox };
enum class FilterMode { kStrict, kLenient };

struct CbfParams {
  double kappa1 = 20.0;  // soft-min sharpness inside each local barrier
  double kappa = 20.0;   // soft-max sharpness of the composite
  int window = 2;        // N
  int ray_count = 100;   // P
  int boundary_samples = 0;  // L (limited-FOV mode only)
  double sample_period = 0.2;  // T_s
  double lambda = 1.0;
  int relative_degree = 2;
  double alpha1 = 20.0;
  double alpha2 = 20.0;
  double d_w = 0.3;
  double d_s = 0.3;
  double r_bar = 5.0;
  double fov = 2.0 * 3.14159265358979323846;  // rad; 2*pi = full circle
};

struct RunParams {
  double duration = 60.0;
  double dt = 0.005;
  unsigned seed = 0;
};

struct Scenario {
  std::string name;
  World world;
  PlantKind plant = PlantKind::kUnicycle;
  Eigen::VectorXd initial_state;  // unicycle: 4; quadrotor: (q, p), 6
  Eigen::VectorXd goal;
  CbfParams cbf;
  RunParams run;
  FilterMode filter_mode = FilterMode::kStrict;
};

// Strict parser: unknown keys anywhere in the document are rejected.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::string& path);

std::vector<std::string> preset_names();
Scenario preset(const std::string& name);

}  // namespace cbf
