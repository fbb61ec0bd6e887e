#include "fluxepr/readout.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fluxepr/rng.hpp"

namespace fluxepr {

void ReadoutModel::validate() const {
  if (!(visibility > 0.0) || visibility > 1.0)
    throw std::invalid_argument("visibility must be in (0, 1]");
  if (!(linewidth_hz > 0.0)) throw std::invalid_argument("linewidth must be positive");
  if (n_repetitions < 1) throw std::invalid_argument("n_repetitions must be >= 1");
  if (!(repetition_period_s > 0.0))
    throw std::invalid_argument("repetition period must be positive");
  if (drift_floor < 0.0) throw std::invalid_argument("drift floor must be non-negative");
}

double switching_probability(const ReadoutModel& model, double frequency_hz) {
  if (!std::isfinite(frequency_hz))
    throw std::invalid_argument("frequency must be finite");
  const double g2 = model.linewidth_hz * model.linewidth_hz;
  const double d = frequency_hz - model.center_hz;
  return model.visibility * g2 / (d * d + g2);
}

SteepestPoint optimal_working_point(const ReadoutModel& model) {
  model.validate();
  SteepestPoint sp;
  sp.offset_hz = model.linewidth_hz / std::sqrt(3.0);
  sp.slope_per_hz = 3.0 * std::sqrt(3.0) * model.visibility / (8.0 * model.linewidth_hz);
  return sp;
}

ReadoutSample simulate_readout(const ReadoutModel& model, double p_true, uint64_t seed) {
  if (!(p_true >= 0.0) || p_true > 1.0)
    throw std::invalid_argument("p_true must be in [0, 1]");
  Rng rng(seed);
  long hits = 0;
  for (int i = 0; i < model.n_repetitions; ++i)
    if (rng.bernoulli(p_true)) ++hits;
  ReadoutSample out;
  out.estimate = static_cast<double>(hits) / model.n_repetitions;
  out.standard_error = std::sqrt(out.estimate * (1.0 - out.estimate) / model.n_repetitions);
  return out;
}

namespace {

std::vector<NoiseScanRow> noise_scan_impl(const ReadoutModel& model, double p_true,
                                          const std::vector<long>& n_list, uint64_t seed,
                                          int batches, bool parallel) {
  model.validate();
  if (!(p_true >= 0.0) || p_true > 1.0)
    throw std::invalid_argument("p_true must be in [0, 1]");
  if (batches < 2) throw std::invalid_argument("need at least 2 batches");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw std::invalid_argument("repetition counts must be positive");
    if (i > 0 && n_list[i] <= n_list[i - 1])
      throw std::invalid_argument("repetition counts must be ascending");
  }

  std::vector<NoiseScanRow> rows(n_list.size());
  std::vector<double> estimates(n_list.size() * static_cast<std::size_t>(batches));

  const long total = static_cast<long>(n_list.size()) * batches;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (long idx = 0; idx < total; ++idx) {
    const std::size_t row = static_cast<std::size_t>(idx) / batches;
    const int batch = static_cast<int>(idx % batches);
    Rng rng(substream_seed(seed, row, static_cast<uint64_t>(batch)));
    // slow drift enters as a per-batch offset of the true probability
    const double offset = model.drift_floor > 0.0 ? model.drift_floor * rng.normal() : 0.0;
    const double p = std::clamp(p_true + offset, 0.0, 1.0);
    long hits = 0;
    const long n = n_list[row];
    for (long i = 0; i < n; ++i)
      if (rng.bernoulli(p)) ++hits;
    estimates[row * batches + batch] = static_cast<double>(hits) / n;
  }
  (void)parallel;

  for (std::size_t row = 0; row < n_list.size(); ++row) {
    double mean = 0.0;
    for (int b = 0; b < batches; ++b) mean += estimates[row * batches + b];
    mean /= batches;
    double var = 0.0;
    for (int b = 0; b < batches; ++b) {
      const double d = estimates[row * batches + b] - mean;
      var += d * d;
    }
    var /= (batches - 1);
    rows[row].n_repetitions = n_list[row];
    rows[row].sigma_model = std::sqrt(p_true * (1.0 - p_true) / n_list[row] +
                                      model.drift_floor * model.drift_floor);
    rows[row].sigma_empirical = std::sqrt(var);
  }
  return rows;
}

}  // namespace

std::vector<NoiseScanRow> noise_vs_repetitions(const ReadoutModel& model, double p_true,
                                               const std::vector<long>& n_list,
                                               uint64_t seed, int batches) {
  return noise_scan_impl(model, p_true, n_list, seed, batches, true);
}

std::vector<NoiseScanRow> noise_vs_repetitions_serial(const ReadoutModel& model,
                                                      double p_true,
                                                      const std::vector<long>& n_list,
                                                      uint64_t seed, int batches) {
  return noise_scan_impl(model, p_true, n_list, seed, batches, false);
}

}  // namespace fluxepr
