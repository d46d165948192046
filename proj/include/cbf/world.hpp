#pragma once

#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace cbf {

// 2D primitives
struct Circle {
  Eigen::Vector2d center;
  double radius;
};

struct Rect {
  Eigen::Vector2d center;
  Eigen::Vector2d half;  // half extents along the rect's own axes
  double angle = 0.0;    // rotation of the rect frame, rad
};

// 3D primitives
struct Sphere {
  Eigen::Vector3d center;
  double radius;
};

struct Box {
  Eigen::Vector3d center;
  Eigen::Vector3d half;
};

struct CylinderZ {
  Eigen::Vector2d center;  // axis location in the xy plane
  double radius;
  double z_min;
  double z_max;
};

using Obstacle = std::variant<Circle, Rect, Sphere, Box, CylinderZ>;

struct World {
  int dimension = 2;  // 2 or 3
  Eigen::VectorXd bounds_min;
  Eigen::VectorXd bounds_max;
  std::vector<Obstacle> obstacles;
};

// True if p lies inside (or on the surface of) any obstacle.
bool world_contains(const World& world, const Eigen::VectorXd& p);

// Distance to the nearest obstacle surface along the ray, or r_bar if none
// within range. An origin inside an obstacle reports range 0. Tangent grazes
// count as hits.
double raycast(const World& world, const Eigen::VectorXd& origin,
               const Eigen::VectorXd& direction, double r_bar);

struct Ray {
  Eigen::VectorXd direction;  // unit
  double range;               // in [0, r_bar]
  double azimuth;
  double elevation = 0.0;  // 3D only, measured from the horizontal plane
};

struct ScanParams {
  int ray_count;     // P
  double r_bar;      // sensor radius
  double fov;        // full angular width, rad; 2*pi means full circle (2D)
  double heading = 0.0;  // sector center for limited FOV
};

struct Scan {
  Eigen::VectorXd origin;
  std::vector<Ray> rays;
  double r_bar;
  double fov;
  double heading;
  long epoch = 0;
};

// 2D: P azimuths, world-frame equispaced for the 360 degree case, spanning
// the heading-centered sector otherwise. 3D: azimuth x elevation grid with
// ray_count rays total (full sphere; limited FOV is 2D-only).
Scan scan(const World& world, const Eigen::VectorXd& origin,
          const ScanParams& params, long epoch);

struct FovBoundarySamples {
  std::vector<Eigen::Vector2d> points;
};

// L points spaced uniformly in arc length along the boundary of the sensing
// sector: up the first radial edge, along the outer arc, back down the second
// edge. Requires fov < 2*pi.
FovBoundarySamples fov_boundary(const Eigen::Vector2d& origin, double heading,
                                double fov, double r_bar, int sample_count);

}  // namespace cbf
