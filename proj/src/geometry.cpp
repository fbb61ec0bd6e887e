#include "fluxepr/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace fluxepr {

double shoelace_area(const std::vector<Eigen::Vector2d>& v) {
  double twice_area = 0.0;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % n];
    twice_area += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * twice_area;
}

namespace {

int orientation_sign(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                     const Eigen::Vector2d& c) {
  const double cross = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  const double scale = (b - a).norm() * ((c - a).norm() + (c - b).norm());
  if (std::abs(cross) <= 1e-14 * std::max(scale, 1e-300)) return 0;
  return cross > 0 ? 1 : -1;
}

bool on_segment(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
  return p.x() <= std::max(a.x(), b.x()) && p.x() >= std::min(a.x(), b.x()) &&
         p.y() <= std::max(a.y(), b.y()) && p.y() >= std::min(a.y(), b.y());
}

bool segments_intersect(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                        const Eigen::Vector2d& q1, const Eigen::Vector2d& q2) {
  const int o1 = orientation_sign(p1, p2, q1);
  const int o2 = orientation_sign(p1, p2, q2);
  const int o3 = orientation_sign(q1, q2, p1);
  const int o4 = orientation_sign(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace

bool polygon_is_simple(const std::vector<Eigen::Vector2d>& v) {
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t i2 = (i + 1) % n;
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t j2 = (j + 1) % n;
      // skip edges sharing a vertex
      if (i == j || i2 == j || i == j2) continue;
      if (segments_intersect(v[i], v[i2], v[j], v[j2])) return false;
    }
  }
  return true;
}

Eigen::Vector3d rodrigues_rotate(const Eigen::Vector3d& v, const Eigen::Vector3d& axis,
                                 double angle_rad) {
  const double norm = axis.norm();
  if (norm < 1e-300) throw std::invalid_argument("rotation axis must be nonzero");
  const Eigen::Vector3d k = axis / norm;
  const double c = std::cos(angle_rad);
  const double s = std::sin(angle_rad);
  return v * c + k.cross(v) * s + k * (k.dot(v)) * (1.0 - c);
}

Eigen::Matrix3d rotation_to_axis(const Eigen::Vector3d& axis) {
  const double norm = axis.norm();
  if (norm < 1e-300) throw std::invalid_argument("axis must be nonzero");
  const Eigen::Vector3d z = axis / norm;
  // reference picked away from z so the cross product stays well conditioned
  const Eigen::Vector3d ref =
      std::abs(z.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d y = z.cross(ref).normalized();
  const Eigen::Vector3d x = y.cross(z);
  Eigen::Matrix3d rot;
  rot.col(0) = x;
  rot.col(1) = y;
  rot.col(2) = z;
  return rot;
}

std::vector<Eigen::Vector2d> square_loop(double side_m) {
  const double half = 0.5 * side_m;
  return {Eigen::Vector2d(half, -half), Eigen::Vector2d(half, half),
          Eigen::Vector2d(-half, half), Eigen::Vector2d(-half, -half)};
}

}  // namespace fluxepr
