#pragma once

#include <Eigen/Dense>
#include <vector>

namespace fluxepr {

// signed shoelace area; positive for counter-clockwise winding
double shoelace_area(const std::vector<Eigen::Vector2d>& vertices);

// true when no two non-adjacent edges intersect
bool polygon_is_simple(const std::vector<Eigen::Vector2d>& vertices);

// rotate v by angle_rad about unit axis (Rodrigues formula)
Eigen::Vector3d rodrigues_rotate(const Eigen::Vector3d& v, const Eigen::Vector3d& axis,
                                 double angle_rad);

// proper rotation taking lab +z onto the given axis; the x/y columns complete
// a deterministic right-handed frame
Eigen::Matrix3d rotation_to_axis(const Eigen::Vector3d& axis);

// axis-aligned square of the given side length centred on the origin,
// counter-clockwise winding
std::vector<Eigen::Vector2d> square_loop(double side_m);

}  // namespace fluxepr
