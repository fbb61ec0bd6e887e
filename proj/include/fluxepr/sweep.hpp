#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "fluxepr/fluxqubit.hpp"
#include "fluxepr/readout.hpp"
#include "fluxepr/spinsys.hpp"

namespace fluxepr {

struct DriveConfig {
  double f_start_hz = 2.6e9;
  double f_stop_hz = 3.2e9;
  int n_points = 601;
  double linewidth_hz = 3e6;  // gamma_s of the spin transition under drive
  double saturation = 10.0;   // s0, on-resonance saturation parameter
  double asymmetry_tail_hz = 0.0;  // optional one-sided exponential tail, 0 = off
};

struct RelaxationRates {
  double gamma_10_per_s = 1.0;
  double gamma_20_per_s = 1.0;
  double gamma_21_per_s = 0.0;
};

// How the per-spin flux contribution is parameterized:
//   flux_per_spin_wb   - direct delta-Phi per fully projected spin
//   flux_per_moment    - magnetization route, Wb per (J/T) along the loop normal
//   position_m         - Biot-Savart coupling vector at an explicit location
struct SpinEnsemble {
  SpinSystem base;  // molecular frame aligned with lab; orientations rotate it
  std::vector<Orientation> orientations{Orientation{}};
  double count = 0.0;
  std::optional<double> flux_per_spin_wb;
  std::optional<double> flux_per_moment_wb_per_jt;
  std::optional<Eigen::Vector3d> position_m;
  int moment_sign = -1;  // electron convention; +1 flips the detected flux

  void validate() const;
};

struct ExperimentConfig {
  FluxQubit qubit;
  ReadoutModel readout;  // center_hz is overwritten with f_q at the working flux
  SpinEnsemble spins;
  FieldConfig field;
  DriveConfig drive;
  RelaxationRates relaxation;
  double temperature_k = 0.02;
  double working_flux_offset_wb = 0.0;  // Phi_w - Phi0/2
  double probe_detuning_sign = 1.0;     // probe at f_q0 + sign * gamma/sqrt(3)
  double dynamic_range_hz = std::numeric_limits<double>::infinity();
  bool shot_noise = true;
  uint64_t seed = 1;

  void validate() const;
};

struct SweepRecord {
  double drive_frequency_hz;
  double qubit_shift_hz;
  double flux_shift_wb;
  double switching_probability;
  double noise;
};

// Fraction by which a continuous drive equalizes the populations of one
// transition: s0 L(delta) / (1 + s0 L(delta)) with Lorentzian
// L = gamma_s^2 / (delta^2 + gamma_s^2). 1 means zero time-averaged
// polarization of that transition.
double saturation_factor(double drive_frequency_hz, double transition_frequency_hz,
                         double gamma_s_hz, double s0);

// Steady state of the three-level rate equations with stimulated pumping on
// the 0->1 and 0->2 transitions and downward relaxation 1->0, 2->0, 2->1.
// Throws std::domain_error when an excited level has no decay path.
Eigen::Vector3d three_level_steady_state(double pump_1_per_s, double pump_2_per_s,
                                         const RelaxationRates& rates);

// Dual-tone EPR sweep: orientation-resolved transitions, drive saturation
// through the rate model, ensemble flux and qubit shift, Lorentzian readout
// at the steepest point with seeded shot noise. Grid points are independent
// (per-point substreams), so the parallel and serial versions agree bit for
// bit.
std::vector<SweepRecord> simulate_epr_sweep(const ExperimentConfig& cfg);
std::vector<SweepRecord> simulate_epr_sweep_serial(const ExperimentConfig& cfg);

struct PolarizationPoint {
  double temperature_k;
  double b_parallel_t;
  double flux_shift_wb;
};

// Static thermal-polarization flux map over a (T, B) grid, Fig. 2b style.
std::vector<PolarizationPoint> simulate_polarization_map(const ExperimentConfig& cfg,
                                                         const std::vector<double>& t_list_k,
                                                         const std::vector<double>& b_list_t);
std::vector<PolarizationPoint> simulate_polarization_map_serial(
    const ExperimentConfig& cfg, const std::vector<double>& t_list_k,
    const std::vector<double>& b_list_t);

struct QubitSpectrumMap {
  std::vector<double> flux_offsets_wb;   // applied flux minus Phi0/2
  std::vector<double> frequencies_hz;    // excitation frequencies
  std::vector<double> p_e;               // row-major, index [i_flux * n_f + i_f]
  double flux_shift_wb;                  // static ensemble shift at cfg.temperature_k
  double ridge_minimum_flux_offset_wb;   // applied offset where f_q is minimal
};

// Qubit spectroscopy map: Lorentzian ridge along f_q(Phi_applied + delta-Phi(T)),
// Fig. 2a style. Deterministic (no shot noise).
QubitSpectrumMap simulate_qubit_spectrum(const ExperimentConfig& cfg,
                                         const std::vector<double>& flux_offsets_wb,
                                         const std::vector<double>& frequencies_hz);
QubitSpectrumMap simulate_qubit_spectrum_serial(const ExperimentConfig& cfg,
                                                const std::vector<double>& flux_offsets_wb,
                                                const std::vector<double>& frequencies_hz);

// Static (drive-off) ensemble flux at the given temperature and field; the
// baseline shared by all three simulations above.
double static_flux_shift(const ExperimentConfig& cfg, double temperature_k,
                         const FieldConfig& field);

}  // namespace fluxepr
