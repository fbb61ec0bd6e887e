#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fluxepr/spinsys.hpp"
#include "fluxepr/sweep.hpp"

namespace fluxepr {

struct FitReport {
  std::vector<std::string> parameter_names;
  Eigen::VectorXd parameters;
  Eigen::MatrixXd covariance;
  double residual_norm = 0.0;  // sqrt(sum of squared residuals)
  int iterations = 0;
  bool converged = false;

  double value(const std::string& name) const;
  double standard_error(const std::string& name) const;
};

struct LmOptions {
  int max_iterations = 200;
  double relative_step = 1e-6;          // central-difference Jacobian step
  double gradient_tolerance = 1e-9;     // relative to the initial scaled gradient
  std::vector<double> parameter_scales; // step floors and gradient weights
};

// Damped least squares with numerical Jacobians. The model maps parameters
// to residuals; covariance is s^2 (J^T J)^-1 at the optimum.
FitReport levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    const Eigen::VectorXd& initial, const std::vector<std::string>& names,
    const LmOptions& options = {});

struct FrequencyPoint {
  double frequency_hz;
  double p_e;
};

// Fits V, f_q0, gamma_q of the Lorentzian readout curve. Self-starting from
// peak and half-width heuristics unless an initial guess is given.
FitReport fit_lorentzian(const std::vector<FrequencyPoint>& points,
                         std::optional<Eigen::Vector3d> initial = std::nullopt);

struct XyPoint {
  double x;
  double y;
};

// Ordinary least squares, closed form; parameters (slope, intercept).
FitReport fit_linear(const std::vector<XyPoint>& points);

struct PeakObservation {
  double b_parallel_t;
  double frequency_hz;
  int branch;  // excited level index of the transition, 1 or 2
};

struct SpinHamModel {
  SpinSystem spin_template;   // molecular-frame aligned; strain etc. held fixed
  FieldConfig field_template; // direction and misalignment axis of the sweep
  std::vector<Orientation> orientations{Orientation{}};
};

struct SpinHamFreeMask {
  bool g_e = true;
  bool zfs_d = true;
  bool misalignment = false;
};

// Nonlinear fit of EPR peak positions against the eigenvalue model
// (build_hamiltonian -> diagonalize -> transition_frequencies). Observations
// carry an explicit branch index; peaks of one branch are compared with the
// orientation-weighted mean of that branch.
FitReport fit_spin_hamiltonian(const std::vector<PeakObservation>& peaks,
                               const SpinHamModel& model, const SpinHamFreeMask& free_mask);

struct SensitivityInputs {
  double dpe = 0.0;           // switching-probability noise per 1 s
  double visibility = 0.0;
  double gamma_q_hz = 0.0;
  std::optional<double> persistent_current_a;
  std::optional<double> flux_per_spin_wb;
  std::optional<double> g_z_hz;
  double per_spin_shift_factor = 1.0;  // 1 for spin-1/2, 2 for the NV manifold

  double dpe_err = 0.0;
  double visibility_err = 0.0;
  double gamma_q_err = 0.0;
  double persistent_current_err = 0.0;
  double flux_per_spin_err = 0.0;
  double g_z_err = 0.0;
};

enum class SensitivityRoute { flux, coupling };

struct SensitivityEstimate {
  double n_min_per_sqrt_hz;
  double uncertainty;
};

// Minimum detectable spins per sqrt(Hz) at the steepest working point.
//   coupling route: N = dPe 8 gamma / (3 sqrt3 V factor g_z)
//   flux route:     N = dPe 8 h gamma / (3 sqrt3 V I_p (dPhi/dN))
// The two agree identically when dPhi/dN = h factor g_z / I_p. Uncertainty is
// first-order propagation of the provided input errors.
SensitivityEstimate estimate_sensitivity(const SensitivityInputs& in, SensitivityRoute route);

// relative deviation of the inputs from the flux/coupling consistency
// identity, in units of its propagated sigma; needs both route inputs
double sensitivity_route_inconsistency(const SensitivityInputs& in);

struct Peak {
  double frequency_hz;  // parabolic apex through the three samples at the dip
  double depth;         // topographic prominence of the dip
};

// Local-minimum detection on the qubit_shift column; ties break toward lower
// frequency. Only dips with prominence >= threshold are reported.
std::vector<Peak> detect_peaks(const std::vector<SweepRecord>& records,
                               double prominence_threshold_hz);

}  // namespace fluxepr
