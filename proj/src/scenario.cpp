#include "cbf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cbf {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& context) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw std::invalid_argument("scenario: unknown key '" + key + "' in " +
                                  context);
    }
  }
}

Eigen::VectorXd to_vector(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

json from_vector(const Eigen::VectorXd& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Obstacle obstacle_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "circle") {
    reject_unknown_keys(j, {"type", "center", "radius"}, "circle obstacle");
    return Circle{Eigen::Vector2d(to_vector(j.at("center"))),
                  j.at("radius").get<double>()};
  }
  if (type == "rect") {
    reject_unknown_keys(j, {"type", "center", "half_extents", "angle"},
                        "rect obstacle");
    return Rect{Eigen::Vector2d(to_vector(j.at("center"))),
                Eigen::Vector2d(to_vector(j.at("half_extents"))),
                j.value("angle", 0.0)};
  }
  if (type == "sphere") {
    reject_unknown_keys(j, {"type", "center", "radius"}, "sphere obstacle");
    return Sphere{Eigen::Vector3d(to_vector(j.at("center"))),
                  j.at("radius").get<double>()};
  }
  if (type == "box") {
    reject_unknown_keys(j, {"type", "center", "half_extents"}, "box obstacle");
    return Box{Eigen::Vector3d(to_vector(j.at("center"))),
               Eigen::Vector3d(to_vector(j.at("half_extents")))};
  }
  if (type == "cylinder") {
    reject_unknown_keys(j, {"type", "center", "radius", "z_min", "z_max"},
                        "cylinder obstacle");
    return CylinderZ{Eigen::Vector2d(to_vector(j.at("center"))),
                     j.at("radius").get<double>(), j.at("z_min").get<double>(),
                     j.at("z_max").get<double>()};
  }
  throw std::invalid_argument("scenario: unknown obstacle type '" + type + "'");
}

json obstacle_to_json(const Obstacle& obs) {
  json j;
  if (const auto* c = std::get_if<Circle>(&obs)) {
    j = {{"type", "circle"}, {"center", from_vector(c->center)}, {"radius", c->radius}};
  } else if (const auto* r = std::get_if<Rect>(&obs)) {
    j = {{"type", "rect"},
         {"center", from_vector(r->center)},
         {"half_extents", from_vector(r->half)},
         {"angle", r->angle}};
  } else if (const auto* s = std::get_if<Sphere>(&obs)) {
    j = {{"type", "sphere"}, {"center", from_vector(s->center)}, {"radius", s->radius}};
  } else if (const auto* b = std::get_if<Box>(&obs)) {
    j = {{"type", "box"},
         {"center", from_vector(b->center)},
         {"half_extents", from_vector(b->half)}};
  } else {
    const auto& cyl = std::get<CylinderZ>(obs);
    j = {{"type", "cylinder"},
         {"center", from_vector(cyl.center)},
         {"radius", cyl.radius},
         {"z_min", cyl.z_min},
         {"z_max", cyl.z_max}};
  }
  return j;
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"name", "plant", "world", "initial_state", "goal", "cbf",
                       "run", "filter_mode"},
                      "scenario");
  Scenario s;
  s.name = j.value("name", "");

  const std::string plant = j.at("plant").get<std::string>();
  if (plant == "unicycle") {
    s.plant = PlantKind::kUnicycle;
  } else if (plant == "quad_full") {
    s.plant = PlantKind::kQuadFull;
  } else if (plant == "quad_approx") {
    s.plant = PlantKind::kQuadApprox;
  } else {
    throw std::invalid_argument("scenario: unknown plant '" + plant + "'");
  }

  const json& jw = j.at("world");
  reject_unknown_keys(jw, {"dimension", "bounds_min", "bounds_max", "obstacles"},
                      "world");
  s.world.dimension = jw.at("dimension").get<int>();
  if (s.world.dimension != 2 && s.world.dimension != 3) {
    throw std::invalid_argument("scenario: world dimension must be 2 or 3");
  }
  s.world.bounds_min = to_vector(jw.at("bounds_min"));
  s.world.bounds_max = to_vector(jw.at("bounds_max"));
  for (const json& jo : jw.at("obstacles")) {
    s.world.obstacles.push_back(obstacle_from_json(jo));
  }

  s.initial_state = to_vector(j.at("initial_state"));
  s.goal = to_vector(j.at("goal"));

  const json& jc = j.at("cbf");
  reject_unknown_keys(jc,
                      {"kappa1", "kappa", "N", "P", "L", "T_s", "lambda", "r",
                       "alpha1", "alpha2", "d_w", "d_s", "r_bar", "fov_deg"},
                      "cbf");
  s.cbf.kappa1 = jc.at("kappa1").get<double>();
  s.cbf.kappa = jc.at("kappa").get<double>();
  s.cbf.window = jc.at("N").get<int>();
  s.cbf.ray_count = jc.at("P").get<int>();
  s.cbf.boundary_samples = jc.value("L", 0);
  s.cbf.sample_period = jc.at("T_s").get<double>();
  s.cbf.lambda = jc.value("lambda", 1.0);
  s.cbf.relative_degree = jc.value("r", 2);
  s.cbf.alpha1 = jc.at("alpha1").get<double>();
  s.cbf.alpha2 = jc.value("alpha2", 0.0);
  s.cbf.d_w = jc.at("d_w").get<double>();
  s.cbf.d_s = jc.at("d_s").get<double>();
  s.cbf.r_bar = jc.at("r_bar").get<double>();
  s.cbf.fov = jc.value("fov_deg", 360.0) * std::numbers::pi / 180.0;

  const json& jr = j.at("run");
  reject_unknown_keys(jr, {"duration", "dt", "seed"}, "run");
  s.run.duration = jr.at("duration").get<double>();
  s.run.dt = jr.at("dt").get<double>();
  s.run.seed = jr.value("seed", 0u);

  const std::string mode = j.value("filter_mode", "strict");
  if (mode == "strict") {
    s.filter_mode = FilterMode::kStrict;
  } else if (mode == "lenient") {
    s.filter_mode = FilterMode::kLenient;
  } else {
    throw std::invalid_argument("scenario: filter_mode must be strict or lenient");
  }
  return s;
}

json scenario_to_json(const Scenario& s) {
  json jw;
  jw["dimension"] = s.world.dimension;
  jw["bounds_min"] = from_vector(s.world.bounds_min);
  jw["bounds_max"] = from_vector(s.world.bounds_max);
  jw["obstacles"] = json::array();
  for (const Obstacle& obs : s.world.obstacles) {
    jw["obstacles"].push_back(obstacle_to_json(obs));
  }

  json j;
  j["name"] = s.name;
  switch (s.plant) {
    case PlantKind::kUnicycle: j["plant"] = "unicycle"; break;
    case PlantKind::kQuadFull: j["plant"] = "quad_full"; break;
    case PlantKind::kQuadApprox: j["plant"] = "quad_approx"; break;
  }
  j["world"] = jw;
  j["initial_state"] = from_vector(s.initial_state);
  j["goal"] = from_vector(s.goal);
  j["cbf"] = {{"kappa1", s.cbf.kappa1},
              {"kappa", s.cbf.kappa},
              {"N", s.cbf.window},
              {"P", s.cbf.ray_count},
              {"L", s.cbf.boundary_samples},
              {"T_s", s.cbf.sample_period},
              {"lambda", s.cbf.lambda},
              {"r", s.cbf.relative_degree},
              {"alpha1", s.cbf.alpha1},
              {"alpha2", s.cbf.alpha2},
              {"d_w", s.cbf.d_w},
              {"d_s", s.cbf.d_s},
              {"r_bar", s.cbf.r_bar},
              {"fov_deg", s.cbf.fov * 180.0 / std::numbers::pi}};
  j["run"] = {{"duration", s.run.duration}, {"dt", s.run.dt}, {"seed", s.run.seed}};
  j["filter_mode"] = s.filter_mode == FilterMode::kStrict ? "strict" : "lenient";
  return j;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open scenario file: " + path);
  }
  json j;
  in >> j;
  return scenario_from_json(j);
}

namespace {

World ground_world() {
  World w;
  w.dimension = 2;
  w.bounds_min = Eigen::Vector2d(0.0, 0.0);
  w.bounds_max = Eigen::Vector2d(16.0, 14.0);
  w.obstacles = {
      Circle{{8.0, 5.0}, 1.0},
      Circle{{3.0, 7.0}, 0.8},
      Rect{{12.0, 9.0}, {1.0, 0.6}, 0.3},
      Circle{{6.0, 11.0}, 0.9},
      Rect{{10.0, 2.5}, {0.8, 0.8}, 0.0},
      Circle{{13.0, 12.0}, 0.7},
  };
  return w;
}

World pillar_world() {
  World w;
  w.dimension = 3;
  w.bounds_min = Eigen::Vector3d(-15.0, -15.0, 0.0);
  w.bounds_max = Eigen::Vector3d(15.0, 15.0, 12.0);
  // Pillar spacing leaves corridors wider than twice the lateral barrier
  // inflation (d_w = 1.4 plus margins) so every preset goal is reachable.
  const double z0 = 0.0, z1 = 12.0;
  w.obstacles = {
      CylinderZ{{6.0, -6.0}, 1.0, z0, z1},  CylinderZ{{-3.0, -4.0}, 1.2, z0, z1},
      CylinderZ{{3.0, 2.0}, 1.0, z0, z1},   CylinderZ{{-6.0, 4.0}, 1.1, z0, z1},
      CylinderZ{{3.0, 9.0}, 0.9, z0, z1},   CylinderZ{{-4.0, 11.0}, 0.8, z0, z1},
  };
  return w;
}

Scenario ground_preset(const std::string& name, const Eigen::Vector2d& goal) {
  Scenario s;
  s.name = name;
  s.world = ground_world();
  s.plant = PlantKind::kUnicycle;
  s.initial_state = Eigen::Vector4d(5.0, 2.0, 0.0, 0.0);
  s.goal = goal;
  // Defaults in CbfParams already match the 360-degree ground configuration.
  return s;
}

Scenario quad_preset(const std::string& name, const Eigen::Vector3d& goal) {
  Scenario s;
  s.name = name;
  s.world = pillar_world();
  s.plant = PlantKind::kQuadApprox;
  s.initial_state = (Eigen::VectorXd(6) << 8.0, -10.0, 5.0, 0.0, 0.0, 0.0).finished();
  s.goal = goal;
  s.cbf.window = 3;
  s.cbf.ray_count = 300;
  s.cbf.alpha1 = 40.0;
  s.cbf.alpha2 = 2.5;
  s.cbf.d_w = 1.4;
  s.cbf.d_s = 0.1;
  s.cbf.r_bar = 10.0;
  return s;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"ground-360-a", "ground-360-b", "ground-360-c", "ground-fov",
          "quad-pillars-a", "quad-pillars-b", "quad-pillars-c",
          "quad-pillars-full"};
}

Scenario preset(const std::string& name) {
  if (name == "ground-360-a") return ground_preset(name, {13.0, 5.0});
  if (name == "ground-360-b") return ground_preset(name, {10.0, 13.0});
  if (name == "ground-360-c") return ground_preset(name, {1.0, 11.0});
  if (name == "ground-fov") {
    Scenario s = ground_preset(name, {11.0, 4.5});
    s.cbf.kappa1 = 30.0;
    s.cbf.kappa = 30.0;
    s.cbf.window = 6;
    s.cbf.boundary_samples = 400;
    s.cbf.alpha1 = 30.0;
    s.cbf.alpha2 = 30.0;
    s.cbf.fov = 100.0 * std::numbers::pi / 180.0;
    return s;
  }
  if (name == "quad-pillars-a") return quad_preset(name, {0.0, 10.0, 5.0});
  if (name == "quad-pillars-b") return quad_preset(name, {-10.0, 10.0, 8.0});
  if (name == "quad-pillars-c") return quad_preset(name, {-10.0, 0.0, 3.0});
  if (name == "quad-pillars-full") {
    Scenario s = quad_preset(name, {0.0, 10.0, 5.0});
    s.plant = PlantKind::kQuadFull;
    // The stiff inner attitude/thrust loops need a much smaller step.
    s.run.dt = 2.5e-4;
    s.run.duration = 20.0;
    return s;
  }
  throw std::invalid_argument("unknown preset: " + name);
}

}  // namespace cbf
