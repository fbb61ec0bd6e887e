#include "fluxepr/coupling.hpp"

#include <cmath>
#include <stdexcept>

#include "fluxepr/constants.hpp"
#include "fluxepr/geometry.hpp"

namespace fluxepr {

double LoopGeometry::area_m2() const { return shoelace_area(vertices_m); }

void LoopGeometry::validate() const {
  if (vertices_m.size() < 3)
    throw std::invalid_argument("loop polygon needs at least 3 vertices");
  if (!polygon_is_simple(vertices_m))
    throw std::invalid_argument("loop polygon must be simple");
  if (!(shoelace_area(vertices_m) > 0.0))
    throw std::invalid_argument("loop polygon must have positive (counter-clockwise) area");
}

Eigen::Vector3d segment_field(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                              double current_a, const Eigen::Vector3d& point) {
  const Eigen::Vector3d ra = a - point;
  const Eigen::Vector3d rb = b - point;
  const double na = ra.norm();
  const double nb = rb.norm();

  // distance from the point to the segment
  const Eigen::Vector3d d = b - a;
  const double len2 = d.squaredNorm();
  double dist;
  if (len2 < 1e-300) {
    dist = na;
  } else {
    const double t = std::clamp(-ra.dot(d) / len2, 0.0, 1.0);
    dist = (ra + t * d).norm();
  }
  if (dist < 1e-12) throw std::domain_error("observation point lies on a loop wire");

  const Eigen::Vector3d cross = ra.cross(rb);
  const double denom = na * nb * (na * nb + ra.dot(rb));
  if (denom <= 0.0 || cross.squaredNorm() < 1e-300 * len2 * len2)
    return Eigen::Vector3d::Zero();  // on the segment's extension line

  return (constants::mu0 * current_a / (4.0 * M_PI)) * (na + nb) / denom * cross;
}

Eigen::Vector3d biot_savart_field(const LoopGeometry& loop, const Eigen::Vector3d& point) {
  loop.validate();
  Eigen::Vector3d field = Eigen::Vector3d::Zero();
  const std::size_t n = loop.vertices_m.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& p = loop.vertices_m[i];
    const Eigen::Vector2d& q = loop.vertices_m[(i + 1) % n];
    field += segment_field(Eigen::Vector3d(p.x(), p.y(), 0.0),
                           Eigen::Vector3d(q.x(), q.y(), 0.0), loop.current_a, point);
  }
  return field;
}

CouplingVector coupling_vector(const FluxQubit& qubit, const SpinSystem& sys,
                               const Eigen::Vector3d& position_m) {
  qubit.validate();
  sys.validate();
  LoopGeometry loop{qubit.loop_vertices_m, qubit.persistent_current_a};
  const Eigen::Vector3d b_loop = biot_savart_field(loop, position_m);
  const Eigen::Vector3d g_lab =
      constants::bohr_magneton_hz * (sys.g_tensor.transpose() * b_loop);
  // columns of zfs_axes are the spin frame axes in lab coordinates
  return CouplingVector{sys.zfs_axes.transpose() * g_lab};
}

SensingVolume sensing_volume(const LoopGeometry& loop, double effective_thickness_m,
                             double reference_frequency_hz) {
  loop.validate();
  if (!(effective_thickness_m > 0.0))
    throw std::invalid_argument("effective thickness must be positive");
  if (!(reference_frequency_hz > 0.0))
    throw std::invalid_argument("reference frequency must be positive");
  SensingVolume out;
  out.volume_m3 = loop.area_m2() * effective_thickness_m;
  const double wavelength = constants::speed_of_light / reference_frequency_hz;
  out.lambda_cubed_fraction = out.volume_m3 / (wavelength * wavelength * wavelength);
  return out;
}

double spins_in_volume(double density_per_m3, double volume_m3) {
  if (density_per_m3 < 0.0) throw std::invalid_argument("spin density must be non-negative");
  return density_per_m3 * volume_m3;
}

}  // namespace fluxepr
