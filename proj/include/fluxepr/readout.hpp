#pragma once

#include <cstdint>
#include <vector>

namespace fluxepr {

// Lorentzian switching-probability resonance of the qubit readout plus the
// repetition bookkeeping of the averaged SQUID measurement.
struct ReadoutModel {
  double visibility = 0.6;          // V in (0, 1]
  double linewidth_hz = 20e6;       // gamma_q, half width
  double center_hz = 7e9;           // f_q0
  int n_repetitions = 1000;
  double repetition_period_s = 200e-6;
  double drift_floor = 0.0;         // sigma_d, probability units

  void validate() const;
};

// P_e(f) = V gamma^2 / ((f - f_q0)^2 + gamma^2)
double switching_probability(const ReadoutModel& model, double frequency_hz);

struct SteepestPoint {
  double offset_hz;     // |f - f_q0| = gamma / sqrt(3)
  double slope_per_hz;  // |dP_e/df| there = 3 sqrt(3) V / (8 gamma)
};

SteepestPoint optimal_working_point(const ReadoutModel& model);

struct ReadoutSample {
  double estimate;        // sample mean of n_repetitions Bernoulli trials
  double standard_error;  // sqrt(p(1-p)/N) at the estimate
};

// Deterministic: same (model, p_true, seed) gives the identical sample on
// every platform (see rng.hpp for the generator contract).
ReadoutSample simulate_readout(const ReadoutModel& model, double p_true, uint64_t seed);

struct NoiseScanRow {
  long n_repetitions;
  double sigma_model;      // sqrt(p(1-p)/N + sigma_d^2)
  double sigma_empirical;  // sample std over Monte Carlo batches
};

// Batches draw a fresh slow-drift offset (normal, sigma_d) per batch, so the
// empirical noise reproduces the model floor. Batches run on substreams
// derived from (seed, row, batch) and may execute in parallel.
std::vector<NoiseScanRow> noise_vs_repetitions(const ReadoutModel& model, double p_true,
                                               const std::vector<long>& n_list,
                                               uint64_t seed, int batches = 300);

// serial reference, bit-identical to the parallel version
std::vector<NoiseScanRow> noise_vs_repetitions_serial(const ReadoutModel& model,
                                                      double p_true,
                                                      const std::vector<long>& n_list,
                                                      uint64_t seed, int batches = 300);

}  // namespace fluxepr
