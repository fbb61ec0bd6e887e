#include "fluxepr/fluxqubit.hpp"

#include <cmath>
#include <stdexcept>

#include "fluxepr/constants.hpp"
#include "fluxepr/geometry.hpp"

namespace fluxepr {

double FluxQubit::loop_area_m2() const { return shoelace_area(loop_vertices_m); }

void FluxQubit::validate() const {
  if (!(persistent_current_a > 0.0))
    throw std::invalid_argument("persistent current must be positive");
  if (!(gap_hz > 0.0)) throw std::invalid_argument("qubit gap must be positive");
  if (loop_vertices_m.size() < 3)
    throw std::invalid_argument("loop polygon needs at least 3 vertices");
  if (!polygon_is_simple(loop_vertices_m))
    throw std::invalid_argument("loop polygon must be simple (non-self-intersecting)");
  if (!(shoelace_area(loop_vertices_m) > 0.0))
    throw std::invalid_argument("loop polygon must wind counter-clockwise (positive area)");
}

WorkingPoint working_point(const FluxQubit& qubit, double flux_wb) {
  if (!std::isfinite(flux_wb)) throw std::invalid_argument("flux must be finite");
  WorkingPoint wp;
  wp.flux_wb = flux_wb;
  wp.detuning_hz = 2.0 * qubit.persistent_current_a *
                   (flux_wb - 0.5 * constants::flux_quantum) / constants::planck;
  wp.frequency_hz = std::hypot(wp.detuning_hz, qubit.gap_hz);
  wp.mixing_angle_rad = std::atan2(qubit.gap_hz, wp.detuning_hz);
  return wp;
}

double qubit_frequency(const FluxQubit& qubit, double flux_wb) {
  return working_point(qubit, flux_wb).frequency_hz;
}

double flux_to_frequency_slope(const FluxQubit& qubit, double flux_wb) {
  const WorkingPoint wp = working_point(qubit, flux_wb);
  return (wp.detuning_hz / wp.frequency_hz) * 2.0 * qubit.persistent_current_a /
         constants::planck;
}

double mixing_angle(const FluxQubit& qubit, double flux_wb) {
  return working_point(qubit, flux_wb).mixing_angle_rad;
}

bool far_detuned(const WorkingPoint& wp, double sin_theta_max) {
  return std::sin(wp.mixing_angle_rad) <= sin_theta_max;
}

double dispersive_shift_per_spin(const Eigen::Vector3d& coupling_hz, int state_index,
                                 const SpinSpectrum& spectrum) {
  if (state_index < 0 || state_index >= spectrum.eigenvalues.size())
    throw std::invalid_argument("eigenstate index out of range");
  const SpinOperators ops = spin_operators(spectrum.spin);
  const Eigen::MatrixXcd g_dot_s =
      coupling_hz.x() * ops.sx + coupling_hz.y() * ops.sy + coupling_hz.z() * ops.sz;
  const Eigen::VectorXcd v = spectrum.eigenvectors.col(state_index);
  return 2.0 * (v.adjoint() * g_dot_s * v)(0).real();
}

double ensemble_flux_shift(double moment_total_jt, double flux_per_moment_wb_per_jt) {
  if (!std::isfinite(moment_total_jt) || !std::isfinite(flux_per_moment_wb_per_jt))
    throw std::invalid_argument("flux shift inputs must be finite");
  return moment_total_jt * flux_per_moment_wb_per_jt;
}

}  // namespace fluxepr
