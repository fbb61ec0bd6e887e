#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fluxepr/fluxqubit.hpp"
#include "fluxepr/spinsys.hpp"

namespace fluxepr {

// Planar current loop in the lab xy plane. Positive current circulates
// counter-clockwise (the sigma_3 = +1 persistent-current direction).
struct LoopGeometry {
  std::vector<Eigen::Vector2d> vertices_m;
  double current_a = 0.0;

  double area_m2() const;
  void validate() const;
};

// Field of one straight segment from a to b carrying current_a, exact
// closed form (no quadrature). Throws std::domain_error when the point lies
// on the segment (distance < 1e-12 m).
Eigen::Vector3d segment_field(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                              double current_a, const Eigen::Vector3d& point);

// Sum of the segment fields of the closed polygon, Tesla.
Eigen::Vector3d biot_savart_field(const LoopGeometry& loop, const Eigen::Vector3d& point);

struct CouplingVector {
  Eigen::Vector3d g_hz;  // components in the spin quantization (zfs) frame
};

// g = (mu_B/h) g_tensor^T B_loop(position), rotated into the spin frame.
// The loop carries +I_p, i.e. the sigma_3 = +1 circulation.
CouplingVector coupling_vector(const FluxQubit& qubit, const SpinSystem& sys,
                               const Eigen::Vector3d& position_m);

struct SensingVolume {
  double volume_m3;
  double lambda_cubed_fraction;  // volume / (c / f_ref)^3
};

SensingVolume sensing_volume(const LoopGeometry& loop, double effective_thickness_m,
                             double reference_frequency_hz);

double spins_in_volume(double density_per_m3, double volume_m3);

}  // namespace fluxepr
