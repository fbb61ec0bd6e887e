#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fluxepr/spinsys.hpp"

namespace fluxepr {

// Superconducting flux qubit: persistent current I_p, gap, and the planar
// loop polygon (lab xy plane, counter-clockwise).
struct FluxQubit {
  double persistent_current_a = 300e-9;
  double gap_hz = 5e9;
  std::vector<Eigen::Vector2d> loop_vertices_m;

  double loop_area_m2() const;
  void validate() const;
};

struct WorkingPoint {
  double flux_wb;
  double detuning_hz;      // eps = 2 I_p (Phi - Phi0/2) / h
  double frequency_hz;     // sqrt(eps^2 + gap^2)
  double mixing_angle_rad; // atan2(gap, eps), in (0, pi)
};

WorkingPoint working_point(const FluxQubit& qubit, double flux_wb);

double qubit_frequency(const FluxQubit& qubit, double flux_wb);

// d f_q / d Phi = (eps / f_q) * 2 I_p / h, Hz per Wb
double flux_to_frequency_slope(const FluxQubit& qubit, double flux_wb);

double mixing_angle(const FluxQubit& qubit, double flux_wb);

// The longitudinal model drops the transverse coupling term, which is only
// justified when sin(theta) is small at the working point.
bool far_detuned(const WorkingPoint& wp, double sin_theta_max = 0.1);

// Full qubit-transition shift 2 <state| g.S |state> in Hz for one spin in the
// given eigenstate; the factor 2 is the sigma_3 coefficient moving both qubit
// levels. Valid in the far-detuned regime (see far_detuned).
double dispersive_shift_per_spin(const Eigen::Vector3d& coupling_hz, int state_index,
                                 const SpinSpectrum& spectrum);

// Linear flux generated by a total ensemble moment, Wb.
double ensemble_flux_shift(double moment_total_jt, double flux_per_moment_wb_per_jt);

}  // namespace fluxepr
