#include "fluxepr/sweep.hpp"

#include <cmath>
#include <stdexcept>

#include "fluxepr/constants.hpp"
#include "fluxepr/coupling.hpp"
#include "fluxepr/rng.hpp"

namespace fluxepr {

void SpinEnsemble::validate() const {
  base.validate();
  if (count < 0.0) throw std::invalid_argument("spin count must be non-negative");
  if (moment_sign != 1 && moment_sign != -1)
    throw std::invalid_argument("moment_sign must be +1 or -1");
  const int routes = (flux_per_spin_wb ? 1 : 0) + (flux_per_moment_wb_per_jt ? 1 : 0) +
                     (position_m ? 1 : 0);
  if (routes != 1)
    throw std::invalid_argument(
        "exactly one of flux_per_spin_wb, flux_per_moment_wb_per_jt, position_m required");
  if (orientations.empty()) throw std::invalid_argument("orientation set must be non-empty");
  double weight_sum = 0.0;
  for (const auto& o : orientations) {
    if (!(o.weight > 0.0)) throw std::invalid_argument("orientation weights must be positive");
    weight_sum += o.weight;
  }
  if (std::abs(weight_sum - 1.0) > 1e-9)
    throw std::invalid_argument("orientation weights must sum to 1");
}

void ExperimentConfig::validate() const {
  qubit.validate();
  readout.validate();
  spins.validate();
  field.validate();
  if (!(temperature_k > 0.0)) throw std::invalid_argument("temperature must be positive");
  if (drive.n_points < 1) throw std::invalid_argument("drive needs at least one point");
  if (!(drive.f_stop_hz > drive.f_start_hz) && drive.n_points > 1)
    throw std::invalid_argument("drive range must be ascending");
  if (!(drive.linewidth_hz > 0.0))
    throw std::invalid_argument("drive linewidth must be positive");
  if (drive.saturation < 0.0) throw std::invalid_argument("saturation must be non-negative");
  if (drive.asymmetry_tail_hz < 0.0)
    throw std::invalid_argument("asymmetry tail must be non-negative");
  if (relaxation.gamma_10_per_s < 0.0 || relaxation.gamma_20_per_s < 0.0 ||
      relaxation.gamma_21_per_s < 0.0)
    throw std::invalid_argument("relaxation rates must be non-negative");
  if (!(dynamic_range_hz > 0.0))
    throw std::invalid_argument("dynamic range bound must be positive");
}

double saturation_factor(double drive_frequency_hz, double transition_frequency_hz,
                         double gamma_s_hz, double s0) {
  if (!(gamma_s_hz > 0.0)) throw std::invalid_argument("gamma_s must be positive");
  if (s0 < 0.0) throw std::invalid_argument("saturation parameter must be non-negative");
  const double delta = drive_frequency_hz - transition_frequency_hz;
  const double lorentz = gamma_s_hz * gamma_s_hz / (delta * delta + gamma_s_hz * gamma_s_hz);
  const double x = s0 * lorentz;
  return x / (1.0 + x);
}

namespace {

// Steady state of the rate equations with stimulated rates W on 0<->1 and
// 0<->2 and downward relaxation. The ground channels carry detailed-balance
// thermal upward rates (b = Boltzmann factor); the 2->1 cascade is one-way.
Eigen::Vector3d rate_steady_state(double w1, double w2, const RelaxationRates& r, double b1,
                                  double b2) {
  Eigen::Matrix3d m;
  m(0, 0) = -(w1 + w2 + r.gamma_10_per_s * b1 + r.gamma_20_per_s * b2);
  m(0, 1) = w1 + r.gamma_10_per_s;
  m(0, 2) = w2 + r.gamma_20_per_s;
  m(1, 0) = w1 + r.gamma_10_per_s * b1;
  m(1, 1) = -(w1 + r.gamma_10_per_s);
  m(1, 2) = r.gamma_21_per_s;
  m(2, 0) = w2 + r.gamma_20_per_s * b2;
  m(2, 1) = 0.0;
  m(2, 2) = -(w2 + r.gamma_20_per_s + r.gamma_21_per_s);

  // rows 1..2 of the rate matrix plus the normalization constraint
  Eigen::Matrix3d a;
  a.row(0) = Eigen::RowVector3d::Ones();
  a.row(1) = m.row(1);
  a.row(2) = m.row(2);
  const Eigen::Vector3d rhs(1.0, 0.0, 0.0);
  Eigen::FullPivLU<Eigen::Matrix3d> lu(a);
  if (!lu.isInvertible())
    throw std::domain_error("degenerate rate model: no relaxation path from an excited level");
  Eigen::Vector3d p = lu.solve(rhs);
  for (int i = 0; i < 3; ++i) p(i) = std::max(p(i), 0.0);
  return p / p.sum();
}

}  // namespace

Eigen::Vector3d three_level_steady_state(double pump_1_per_s, double pump_2_per_s,
                                         const RelaxationRates& rates) {
  if (pump_1_per_s < 0.0 || pump_2_per_s < 0.0)
    throw std::invalid_argument("pump rates must be non-negative");
  if (rates.gamma_10_per_s < 0.0 || rates.gamma_20_per_s < 0.0 || rates.gamma_21_per_s < 0.0)
    throw std::invalid_argument("relaxation rates must be non-negative");
  if (!(rates.gamma_10_per_s > 0.0) ||
      !(rates.gamma_20_per_s + rates.gamma_21_per_s > 0.0))
    throw std::domain_error("degenerate rate model: no relaxation path from an excited level");
  return rate_steady_state(pump_1_per_s, pump_2_per_s, rates, 0.0, 0.0);
}

namespace {

// Everything about one orientation that does not depend on the drive
// frequency: spectrum, per-eigenstate flux contribution, thermal factors.
struct OrientationSetup {
  double weight;
  SpinSpectrum spectrum;
  std::vector<double> transition_hz;      // 0 -> j, ascending j
  Eigen::VectorXd flux_per_state_wb;      // c_j, flux of one spin in state j
  Eigen::VectorXd thermal;                // populations at cfg.temperature_k
  Eigen::VectorXd rate_baseline;          // rate-model steady state, drive off
  std::vector<double> boltzmann;          // exp(-h f_j / k T) per excited level
};

std::vector<OrientationSetup> prepare_orientations(const ExperimentConfig& cfg,
                                                   double temperature_k,
                                                   const FieldConfig& field,
                                                   double slope_hz_per_wb) {
  std::vector<OrientationSetup> out;
  out.reserve(cfg.spins.orientations.size());

  for (const auto& orientation : cfg.spins.orientations) {
    const SpinSystem sys = oriented(cfg.spins.base, orientation.rotation);
    OrientationSetup setup;
    setup.weight = orientation.weight;
    setup.spectrum = diagonalize(build_hamiltonian(sys, field));
    const int dim = static_cast<int>(setup.spectrum.eigenvalues.size());

    for (const auto& t : setup.spectrum.transitions_from_ground())
      setup.transition_hz.push_back(t.frequency_hz);

    const SpinOperators ops = spin_operators(sys.spin);
    Eigen::MatrixXcd flux_op;
    if (cfg.spins.flux_per_spin_wb) {
      // projection on the quantization axis, normalized so a stretched state
      // (|m| = S) contributes the full per-spin flux
      const Eigen::Vector3d zp = sys.zfs_axes.col(2);
      flux_op = (*cfg.spins.flux_per_spin_wb / sys.spin) *
                (zp.x() * ops.sx + zp.y() * ops.sy + zp.z() * ops.sz);
    } else if (cfg.spins.flux_per_moment_wb_per_jt) {
      // magnetization route: moment along the loop normal (lab z)
      const Eigen::Vector3d w = cfg.spins.moment_sign * constants::bohr_magneton *
                                (sys.g_tensor.transpose() * Eigen::Vector3d::UnitZ());
      flux_op = *cfg.spins.flux_per_moment_wb_per_jt *
                (w.x() * ops.sx + w.y() * ops.sy + w.z() * ops.sz);
    } else {
      // Biot-Savart coupling at an explicit position; per-spin qubit shift
      // 2 <g.S> converted to flux through the working-point slope
      if (std::abs(slope_hz_per_wb) < 1e-300)
        throw std::domain_error(
            "zero qubit slope at the working point: cannot convert coupling to flux");
      const CouplingVector cv = coupling_vector(cfg.qubit, sys, *cfg.spins.position_m);
      const Eigen::Vector3d g_lab = sys.zfs_axes * cv.g_hz;
      flux_op = (2.0 / slope_hz_per_wb) *
                (g_lab.x() * ops.sx + g_lab.y() * ops.sy + g_lab.z() * ops.sz);
    }

    setup.flux_per_state_wb.resize(dim);
    for (int j = 0; j < dim; ++j) {
      const Eigen::VectorXcd v = setup.spectrum.eigenvectors.col(j);
      setup.flux_per_state_wb(j) = (v.adjoint() * flux_op * v)(0).real();
    }

    setup.thermal = thermal_populations(setup.spectrum, temperature_k);
    const double beta = constants::planck / (constants::boltzmann * temperature_k);
    for (const double f : setup.transition_hz)
      setup.boltzmann.push_back(std::exp(-beta * f));

    out.push_back(std::move(setup));
  }
  return out;
}

// populations of the driven rate model for one orientation; dim 2 and 3
Eigen::VectorXd driven_populations(const OrientationSetup& setup, double drive_hz,
                                   const DriveConfig& drive, const RelaxationRates& rates) {
  const int dim = static_cast<int>(setup.spectrum.eigenvalues.size());
  std::vector<double> x(setup.transition_hz.size());
  double x_total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double delta = drive_hz - setup.transition_hz[j];
    const double l = drive.linewidth_hz * drive.linewidth_hz /
                     (delta * delta + drive.linewidth_hz * drive.linewidth_hz);
    x[j] = drive.saturation * l;
    x_total += x[j];
  }
  if (x_total < 1e-300) return setup.rate_baseline;

  if (dim == 2) {
    const double w = x[0] * rates.gamma_10_per_s;
    const double ratio = (w + rates.gamma_10_per_s * setup.boltzmann[0]) /
                         (w + rates.gamma_10_per_s);
    Eigen::VectorXd p(2);
    p(0) = 1.0 / (1.0 + ratio);
    p(1) = ratio / (1.0 + ratio);
    return p;
  }
  // dim == 3, checked upfront
  const double w1 = x[0] * rates.gamma_10_per_s;
  const double w2 = x[1] * (rates.gamma_20_per_s + rates.gamma_21_per_s);
  return rate_steady_state(w1, w2, rates, setup.boltzmann[0], setup.boltzmann[1]);
}

// drive-off limit of the rate model; the sweep measures the drive response
// relative to this state
Eigen::VectorXd driven_populations_baseline(const OrientationSetup& setup,
                                            const RelaxationRates& rates) {
  const int dim = static_cast<int>(setup.spectrum.eigenvalues.size());
  if (dim == 2) {
    const double b = setup.boltzmann[0];
    Eigen::VectorXd p(2);
    p(0) = 1.0 / (1.0 + b);
    p(1) = b / (1.0 + b);
    return p;
  }
  if (dim == 3 && rates.gamma_10_per_s > 0.0 &&
      rates.gamma_20_per_s + rates.gamma_21_per_s > 0.0)
    return rate_steady_state(0.0, 0.0, rates, setup.boltzmann[0], setup.boltzmann[1]);
  return setup.thermal;
}

// the rate model must have a decay path from every excited level before any
// drive is applied
void check_rate_model(const ExperimentConfig& cfg) {
  if (!(cfg.drive.saturation > 0.0)) return;
  const int dim = cfg.spins.base.multiplicity();
  if (dim >= 2 && !(cfg.relaxation.gamma_10_per_s > 0.0))
    throw std::domain_error("degenerate rate model: no relaxation path from an excited level");
  if (dim >= 3 &&
      !(cfg.relaxation.gamma_20_per_s + cfg.relaxation.gamma_21_per_s > 0.0))
    throw std::domain_error("degenerate rate model: no relaxation path from an excited level");
}

std::vector<SweepRecord> epr_sweep_impl(const ExperimentConfig& cfg, bool parallel) {
  cfg.validate();
  if (cfg.spins.base.multiplicity() > 3)
    throw std::domain_error("the drive model supports spin 1/2 and spin 1 only");
  check_rate_model(cfg);

  const double working_flux = 0.5 * constants::flux_quantum + cfg.working_flux_offset_wb;
  const double slope = flux_to_frequency_slope(cfg.qubit, working_flux);
  if (std::abs(slope) < 1e-300)
    throw std::domain_error("zero qubit slope at the working point: no flux sensitivity");

  ReadoutModel readout = cfg.readout;
  readout.center_hz = qubit_frequency(cfg.qubit, working_flux);
  const double probe_hz = readout.center_hz + cfg.probe_detuning_sign *
                                                  optimal_working_point(readout).offset_hz;

  auto setups = prepare_orientations(cfg, cfg.temperature_k, cfg.field, slope);
  for (auto& s : setups)
    s.rate_baseline = driven_populations_baseline(s, cfg.relaxation);

  double static_flux = 0.0;
  for (const auto& s : setups)
    static_flux += cfg.spins.count * s.weight * s.thermal.dot(s.flux_per_state_wb);

  const int n = cfg.drive.n_points;
  const double f0 = cfg.drive.f_start_hz;
  const double df = n > 1 ? (cfg.drive.f_stop_hz - cfg.drive.f_start_hz) / (n - 1) : 0.0;

  // drive-induced response relative to the drive-off steady state; the
  // thermal baseline is carried by static_flux
  std::vector<double> flux_delta(static_cast<std::size_t>(n));
  std::exception_ptr failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (int i = 0; i < n; ++i) {
    try {
      const double drive_hz = f0 + i * df;
      double delta = 0.0;
      for (const auto& s : setups) {
        const Eigen::VectorXd p = driven_populations(s, drive_hz, cfg.drive, cfg.relaxation);
        delta += cfg.spins.count * s.weight *
                 (p - s.rate_baseline).dot(s.flux_per_state_wb);
      }
      flux_delta[static_cast<std::size_t>(i)] = delta;
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  (void)parallel;

  // optional one-sided exponential tail on the drive-induced response
  if (cfg.drive.asymmetry_tail_hz > 0.0 && n > 1 && df > 0.0) {
    std::vector<double> kernel;
    double norm = 0.0;
    for (int m = 0;; ++m) {
      const double k = std::exp(-m * df / cfg.drive.asymmetry_tail_hz);
      if (k < 1e-12 && m > 0) break;
      kernel.push_back(k);
      norm += k;
      if (m > 8 * n) break;
    }
    std::vector<double> smeared(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t m = 0; m < kernel.size() && m <= static_cast<std::size_t>(i); ++m)
        acc += kernel[m] * flux_delta[static_cast<std::size_t>(i) - m];
      smeared[static_cast<std::size_t>(i)] = acc / norm;
    }
    flux_delta = std::move(smeared);
  }

  std::vector<SweepRecord> records(static_cast<std::size_t>(n));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (int i = 0; i < n; ++i) {
    SweepRecord rec;
    rec.drive_frequency_hz = f0 + i * df;
    const double raw_shift = slope * (static_flux + flux_delta[static_cast<std::size_t>(i)]);
    rec.qubit_shift_hz = std::clamp(raw_shift, -cfg.dynamic_range_hz, cfg.dynamic_range_hz);
    rec.flux_shift_wb = rec.qubit_shift_hz / slope;
    const double detuning = probe_hz - (readout.center_hz + rec.qubit_shift_hz);
    const double p_true = readout.visibility * readout.linewidth_hz * readout.linewidth_hz /
                          (detuning * detuning + readout.linewidth_hz * readout.linewidth_hz);
    if (cfg.shot_noise) {
      const ReadoutSample sample =
          simulate_readout(readout, p_true, substream_seed(cfg.seed, static_cast<uint64_t>(i)));
      rec.switching_probability = sample.estimate;
      rec.noise = sample.standard_error;
    } else {
      rec.switching_probability = p_true;
      rec.noise = 0.0;
    }
    records[static_cast<std::size_t>(i)] = rec;
  }
  return records;
}

}  // namespace

std::vector<SweepRecord> simulate_epr_sweep(const ExperimentConfig& cfg) {
  return epr_sweep_impl(cfg, true);
}

std::vector<SweepRecord> simulate_epr_sweep_serial(const ExperimentConfig& cfg) {
  return epr_sweep_impl(cfg, false);
}

double static_flux_shift(const ExperimentConfig& cfg, double temperature_k,
                         const FieldConfig& field) {
  const double working_flux = 0.5 * constants::flux_quantum + cfg.working_flux_offset_wb;
  const double slope = flux_to_frequency_slope(cfg.qubit, working_flux);
  const auto setups = prepare_orientations(cfg, temperature_k, field, slope);
  double flux = 0.0;
  for (const auto& s : setups)
    flux += cfg.spins.count * s.weight * s.thermal.dot(s.flux_per_state_wb);
  return flux;
}

namespace {

std::vector<PolarizationPoint> polarization_map_impl(const ExperimentConfig& cfg,
                                                     const std::vector<double>& t_list,
                                                     const std::vector<double>& b_list,
                                                     bool parallel) {
  cfg.validate();
  for (const double t : t_list)
    if (!(t > 0.0)) throw std::invalid_argument("temperatures must be positive");
  for (const double b : b_list)
    if (b < 0.0) throw std::invalid_argument("field magnitudes must be non-negative");

  const long nt = static_cast<long>(t_list.size());
  const long nb = static_cast<long>(b_list.size());
  std::vector<PolarizationPoint> out(static_cast<std::size_t>(nt * nb));

  std::exception_ptr failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (long idx = 0; idx < nt * nb; ++idx) {
    try {
      const long it = idx / nb;
      const long ib = idx % nb;
      FieldConfig field = cfg.field;
      field.b_parallel_t = b_list[static_cast<std::size_t>(ib)];
      PolarizationPoint point;
      point.temperature_k = t_list[static_cast<std::size_t>(it)];
      point.b_parallel_t = field.b_parallel_t;
      point.flux_shift_wb = static_flux_shift(cfg, point.temperature_k, field);
      out[static_cast<std::size_t>(idx)] = point;
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  (void)parallel;
  return out;
}

QubitSpectrumMap qubit_spectrum_impl(const ExperimentConfig& cfg,
                                     const std::vector<double>& flux_offsets,
                                     const std::vector<double>& frequencies,
                                     bool parallel) {
  cfg.validate();
  for (std::size_t i = 1; i < flux_offsets.size(); ++i)
    if (flux_offsets[i] <= flux_offsets[i - 1])
      throw std::invalid_argument("flux offsets must be ascending");
  for (std::size_t i = 1; i < frequencies.size(); ++i)
    if (frequencies[i] <= frequencies[i - 1])
      throw std::invalid_argument("excitation frequencies must be ascending");

  QubitSpectrumMap map;
  map.flux_offsets_wb = flux_offsets;
  map.frequencies_hz = frequencies;
  map.flux_shift_wb = static_flux_shift(cfg, cfg.temperature_k, cfg.field);
  map.ridge_minimum_flux_offset_wb = -map.flux_shift_wb;

  const long ni = static_cast<long>(flux_offsets.size());
  const long nj = static_cast<long>(frequencies.size());
  map.p_e.assign(static_cast<std::size_t>(ni * nj), 0.0);
  const double g2 = cfg.readout.linewidth_hz * cfg.readout.linewidth_hz;

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (long i = 0; i < ni; ++i) {
    const double total_flux = 0.5 * constants::flux_quantum +
                              flux_offsets[static_cast<std::size_t>(i)] + map.flux_shift_wb;
    const double fq = qubit_frequency(cfg.qubit, total_flux);
    for (long j = 0; j < nj; ++j) {
      const double d = frequencies[static_cast<std::size_t>(j)] - fq;
      map.p_e[static_cast<std::size_t>(i * nj + j)] =
          cfg.readout.visibility * g2 / (d * d + g2);
    }
  }
  (void)parallel;
  return map;
}

}  // namespace

std::vector<PolarizationPoint> simulate_polarization_map(const ExperimentConfig& cfg,
                                                         const std::vector<double>& t_list_k,
                                                         const std::vector<double>& b_list_t) {
  return polarization_map_impl(cfg, t_list_k, b_list_t, true);
}

std::vector<PolarizationPoint> simulate_polarization_map_serial(
    const ExperimentConfig& cfg, const std::vector<double>& t_list_k,
    const std::vector<double>& b_list_t) {
  return polarization_map_impl(cfg, t_list_k, b_list_t, false);
}

QubitSpectrumMap simulate_qubit_spectrum(const ExperimentConfig& cfg,
                                         const std::vector<double>& flux_offsets_wb,
                                         const std::vector<double>& frequencies_hz) {
  return qubit_spectrum_impl(cfg, flux_offsets_wb, frequencies_hz, true);
}

QubitSpectrumMap simulate_qubit_spectrum_serial(const ExperimentConfig& cfg,
                                                const std::vector<double>& flux_offsets_wb,
                                                const std::vector<double>& frequencies_hz) {
  return qubit_spectrum_impl(cfg, flux_offsets_wb, frequencies_hz, false);
}

}  // namespace fluxepr
