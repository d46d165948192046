#include "cbf/world.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace cbf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double enter = -kInf;
  double exit = kInf;
  bool empty() const { return enter > exit; }
};

// Parameter interval where |o + t d| stays inside a centered ball of radius R
// (in however many coordinates the caller passed).
Interval ball_interval(const Eigen::VectorXd& o, const Eigen::VectorXd& d, double R) {
  const double a = d.squaredNorm();
  const double b = 2.0 * o.dot(d);
  const double c = o.squaredNorm() - R * R;
  if (a <= 0.0) {
    // Degenerate direction (e.g. vertical ray vs. cylinder cross-section).
    if (c <= 0.0) return {-kInf, kInf};
    return {1.0, 0.0};
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return {1.0, 0.0};
  const double sq = std::sqrt(disc);
  return {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)};
}

Interval slab_interval(double o, double d, double lo, double hi) {
  if (std::abs(d) < 1e-300) {
    if (o >= lo && o <= hi) return {-kInf, kInf};
    return {1.0, 0.0};
  }
  double t0 = (lo - o) / d;
  double t1 = (hi - o) / d;
  if (t0 > t1) std::swap(t0, t1);
  return {t0, t1};
}

Interval intersect(Interval a, Interval b) {
  return {std::max(a.enter, b.enter), std::min(a.exit, b.exit)};
}

// Entry distance along the ray into the solid primitive, if the ray hits it
// at parameter >= 0. Origin inside yields 0.
std::optional<double> hit_distance(Interval iv) {
  if (iv.empty() || iv.exit < 0.0) return std::nullopt;
  return std::max(iv.enter, 0.0);
}

std::optional<double> intersect_obstacle(const Obstacle& obs,
                                         const Eigen::VectorXd& o,
                                         const Eigen::VectorXd& d) {
  if (const auto* c = std::get_if<Circle>(&obs)) {
    return hit_distance(ball_interval(o - Eigen::VectorXd(c->center), d, c->radius));
  }
  if (const auto* r = std::get_if<Rect>(&obs)) {
    const Eigen::Rotation2Dd rot(-r->angle);
    const Eigen::Vector2d ol = rot * (Eigen::Vector2d(o) - r->center);
    const Eigen::Vector2d dl = rot * Eigen::Vector2d(d);
    Interval iv = intersect(slab_interval(ol.x(), dl.x(), -r->half.x(), r->half.x()),
                            slab_interval(ol.y(), dl.y(), -r->half.y(), r->half.y()));
    return hit_distance(iv);
  }
  if (const auto* s = std::get_if<Sphere>(&obs)) {
    return hit_distance(ball_interval(o - Eigen::VectorXd(s->center), d, s->radius));
  }
  if (const auto* b = std::get_if<Box>(&obs)) {
    Interval iv = slab_interval(o.x() - b->center.x(), d.x(), -b->half.x(), b->half.x());
    iv = intersect(iv, slab_interval(o.y() - b->center.y(), d.y(), -b->half.y(), b->half.y()));
    iv = intersect(iv, slab_interval(o.z() - b->center.z(), d.z(), -b->half.z(), b->half.z()));
    return hit_distance(iv);
  }
  const auto& cyl = std::get<CylinderZ>(obs);
  Eigen::VectorXd oxy(2), dxy(2);
  oxy << o.x() - cyl.center.x(), o.y() - cyl.center.y();
  dxy << d.x(), d.y();
  Interval iv = intersect(ball_interval(oxy, dxy, cyl.radius),
                          slab_interval(o.z(), d.z(), cyl.z_min, cyl.z_max));
  return hit_distance(iv);
}

bool contains_obstacle(const Obstacle& obs, const Eigen::VectorXd& p) {
  if (const auto* c = std::get_if<Circle>(&obs)) {
    return (Eigen::Vector2d(p) - c->center).norm() <= c->radius;
  }
  if (const auto* r = std::get_if<Rect>(&obs)) {
    const Eigen::Vector2d pl = Eigen::Rotation2Dd(-r->angle) * (Eigen::Vector2d(p) - r->center);
    return std::abs(pl.x()) <= r->half.x() && std::abs(pl.y()) <= r->half.y();
  }
  if (const auto* s = std::get_if<Sphere>(&obs)) {
    return (Eigen::Vector3d(p) - s->center).norm() <= s->radius;
  }
  if (const auto* b = std::get_if<Box>(&obs)) {
    const Eigen::Vector3d q = (Eigen::Vector3d(p) - b->center).cwiseAbs();
    return q.x() <= b->half.x() && q.y() <= b->half.y() && q.z() <= b->half.z();
  }
  const auto& cyl = std::get<CylinderZ>(obs);
  const double rho = (p.head<2>() - cyl.center).norm();
  return rho <= cyl.radius && p.z() >= cyl.z_min && p.z() <= cyl.z_max;
}

// Largest divisor of P no greater than the target, preferring one close to
// sqrt(P/2) so the grid is roughly twice as dense in azimuth as elevation.
int elevation_rows(int P) {
  const int target = std::max(1, static_cast<int>(std::lround(std::sqrt(P / 2.0))));
  for (int offset = 0; offset < P; ++offset) {
    if (target - offset >= 1 && P % (target - offset) == 0) return target - offset;
    if (target + offset <= P && P % (target + offset) == 0) return target + offset;
  }
  return 1;
}

}  // namespace

bool world_contains(const World& world, const Eigen::VectorXd& p) {
  for (const Obstacle& obs : world.obstacles) {
    if (contains_obstacle(obs, p)) return true;
  }
  return false;
}

double raycast(const World& world, const Eigen::VectorXd& origin,
               const Eigen::VectorXd& direction, double r_bar) {
  if (!(r_bar > 0.0)) {
    throw std::invalid_argument("raycast: r_bar must be positive");
  }
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("raycast: direction must be normalized");
  }
  double best = r_bar;
  for (const Obstacle& obs : world.obstacles) {
    if (auto t = intersect_obstacle(obs, origin, direction)) {
      best = std::min(best, *t);
    }
  }
  return best;
}

Scan scan(const World& world, const Eigen::VectorXd& origin,
          const ScanParams& params, long epoch) {
  if (params.ray_count < 1) {
    throw std::invalid_argument("scan: ray_count must be >= 1");
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;

  Scan out;
  out.origin = origin;
  out.r_bar = params.r_bar;
  out.fov = params.fov;
  out.heading = params.heading;
  out.epoch = epoch;
  out.rays.reserve(params.ray_count);

  if (world.dimension == 2) {
    const bool full = params.fov >= two_pi - 1e-12;
    for (int i = 0; i < params.ray_count; ++i) {
      double az;
      if (full) {
        az = two_pi * i / params.ray_count;
      } else if (params.ray_count == 1) {
        az = params.heading;
      } else {
        az = params.heading - params.fov / 2.0 +
             params.fov * i / (params.ray_count - 1);
      }
      Ray ray;
      ray.direction = Eigen::Vector2d(std::cos(az), std::sin(az));
      ray.azimuth = az;
      ray.range = raycast(world, origin, ray.direction, params.r_bar);
      out.rays.push_back(std::move(ray));
    }
    return out;
  }

  if (params.fov < two_pi - 1e-12) {
    throw std::invalid_argument("scan: limited FOV is supported in 2D only");
  }
  const int n_el = elevation_rows(params.ray_count);
  const int n_az = params.ray_count / n_el;
  for (int j = 0; j < n_el; ++j) {
    const double el = -std::numbers::pi / 2.0 + std::numbers::pi * (j + 0.5) / n_el;
    for (int i = 0; i < n_az; ++i) {
      const double az = two_pi * i / n_az;
      Ray ray;
      ray.direction = Eigen::Vector3d(std::cos(el) * std::cos(az),
                                      std::cos(el) * std::sin(az), std::sin(el));
      ray.azimuth = az;
      ray.elevation = el;
      ray.range = raycast(world, origin, ray.direction, params.r_bar);
      out.rays.push_back(std::move(ray));
    }
  }
  return out;
}

FovBoundarySamples fov_boundary(const Eigen::Vector2d& origin, double heading,
                                double fov, double r_bar, int sample_count) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (fov >= two_pi - 1e-12) {
    throw std::invalid_argument("fov_boundary: full-circle FOV has no boundary");
  }
  if (sample_count < 2) {
    throw std::invalid_argument("fov_boundary: need at least 2 samples");
  }
  if (!(r_bar > 0.0) || !(fov > 0.0)) {
    throw std::invalid_argument("fov_boundary: r_bar and fov must be positive");
  }

  const double a0 = heading - fov / 2.0;
  const double a1 = heading + fov / 2.0;
  const double arc_len = r_bar * fov;
  const double perimeter = 2.0 * r_bar + arc_len;

  FovBoundarySamples out;
  out.points.reserve(sample_count);
  for (int j = 0; j < sample_count; ++j) {
    const double s = perimeter * (j + 0.5) / sample_count;
    double angle, radius;
    if (s < r_bar) {
      angle = a0;
      radius = s;
    } else if (s < r_bar + arc_len) {
      angle = a0 + (s - r_bar) / r_bar;
      radius = r_bar;
    } else {
      angle = a1;
      radius = r_bar - (s - r_bar - arc_len);
    }
    out.points.emplace_back(origin.x() + radius * std::cos(angle),
                            origin.y() + radius * std::sin(angle));
  }
  return out;
}

}  // namespace cbf
