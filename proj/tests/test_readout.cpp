#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "fluxepr/readout.hpp"
#include "oracles.hpp"

using namespace fluxepr;

namespace {

ReadoutModel default_model() {
  ReadoutModel m;
  m.visibility = 0.6;
  m.linewidth_hz = 20e6;
  m.center_hz = 7e9;
  m.n_repetitions = 1000;
  m.repetition_period_s = 200e-6;
  return m;
}

}  // namespace

TEST_CASE("Lorentzian values at the peak, half width, and steepest offset") {
  const ReadoutModel m = default_model();
  CHECK(switching_probability(m, m.center_hz) == doctest::Approx(m.visibility));
  CHECK(switching_probability(m, m.center_hz + m.linewidth_hz) ==
        doctest::Approx(0.5 * m.visibility).epsilon(1e-12));
  CHECK(switching_probability(m, m.center_hz - m.linewidth_hz) ==
        doctest::Approx(0.5 * m.visibility).epsilon(1e-12));
  CHECK(switching_probability(m, m.center_hz + m.linewidth_hz / std::sqrt(3.0)) ==
        doctest::Approx(0.75 * m.visibility).epsilon(1e-12));
}

TEST_CASE("P_e is even about the centre and monotone on each side") {
  const ReadoutModel m = default_model();
  for (const double d : {1e6, 5e6, 2e7, 1e8})
    CHECK(switching_probability(m, m.center_hz + d) ==
          doctest::Approx(switching_probability(m, m.center_hz - d)).epsilon(1e-14));
  double previous = m.visibility;
  for (double d = 1e6; d < 2e8; d *= 1.7) {
    const double p = switching_probability(m, m.center_hz + d);
    CHECK(p < previous);
    previous = p;
  }
}

TEST_CASE("steepest point: worked example and finite-difference slope") {
  const ReadoutModel m = default_model();
  const SteepestPoint sp = optimal_working_point(m);
  CHECK(sp.offset_hz == doctest::Approx(11.547005e6).epsilon(1e-6));
  CHECK(sp.slope_per_hz == doctest::Approx(1.94855716e-8).epsilon(1e-7));

  const double h = 3e-6 * m.linewidth_hz;
  const double numeric = oracles::central_difference(
      [&m](double f) { return switching_probability(m, f); }, m.center_hz + sp.offset_hz,
      h);
  CHECK(std::abs(numeric) == doctest::Approx(sp.slope_per_hz).epsilon(1e-9));
}

TEST_CASE("steepest point identities hold for 100 random models") {
  fluxepr::Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    ReadoutModel m = default_model();
    m.visibility = testutil::uniform(rng, 0.05, 1.0);
    m.linewidth_hz = testutil::uniform(rng, 1e6, 1e8);
    const SteepestPoint sp = optimal_working_point(m);
    CHECK(sp.offset_hz ==
          doctest::Approx(m.linewidth_hz / std::sqrt(3.0)).epsilon(1e-9));
    CHECK(sp.slope_per_hz ==
          doctest::Approx(3.0 * std::sqrt(3.0) * m.visibility / (8.0 * m.linewidth_hz))
              .epsilon(1e-9));

    const double h = 3e-6 * m.linewidth_hz;
    const double numeric = oracles::central_difference(
        [&m](double f) { return switching_probability(m, f); },
        m.center_hz + sp.offset_hz, h);
    CHECK(std::abs(numeric) == doctest::Approx(sp.slope_per_hz).epsilon(1e-9));
  }
}

TEST_CASE("grid search locates the steepest point at gamma/sqrt(3)") {
  const ReadoutModel m = default_model();
  const double span = 3.0 * m.linewidth_hz;
  const int n = 20001;
  const double step = 2.0 * span / (n - 1);
  double best_slope = 0.0, best_f = 0.0;
  double previous = switching_probability(m, m.center_hz - span);
  for (int i = 1; i < n; ++i) {
    const double f = m.center_hz - span + i * step;
    const double p = switching_probability(m, f);
    const double slope = std::abs(p - previous) / step;
    if (slope > best_slope && f > m.center_hz) {  // positive-offset side
      best_slope = slope;
      best_f = f - 0.5 * step;
    }
    previous = p;
  }
  CHECK(std::abs(best_f - (m.center_hz + optimal_working_point(m).offset_hz)) <= step);
}

TEST_CASE("simulate_readout: degenerate inputs, scaling, determinism") {
  const ReadoutModel m = default_model();
  const ReadoutSample zero = simulate_readout(m, 0.0, 7);
  CHECK(zero.estimate == 0.0);
  CHECK(zero.standard_error == 0.0);
  const ReadoutSample one = simulate_readout(m, 1.0, 7);
  CHECK(one.estimate == 1.0);

  const ReadoutSample a = simulate_readout(m, 0.37, 123456);
  const ReadoutSample b = simulate_readout(m, 0.37, 123456);
  CHECK(a.estimate == b.estimate);
  CHECK(a.standard_error == b.standard_error);
  const ReadoutSample c = simulate_readout(m, 0.37, 123457);
  CHECK(a.estimate != c.estimate);  // different stream

  CHECK_THROWS_AS(simulate_readout(m, -0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(simulate_readout(m, 1.1, 1), std::invalid_argument);
}

TEST_CASE("Monte Carlo sample sigma matches the binomial closed form") {
  ReadoutModel m = default_model();
  m.n_repetitions = 1000;
  const int runs = 1000;
  double mean = 0.0, m2 = 0.0;
  for (int r = 0; r < runs; ++r) {
    const double est = simulate_readout(m, 0.5, substream_seed(99, r)).estimate;
    const double delta = est - mean;
    mean += delta / (r + 1);
    m2 += delta * (est - mean);
  }
  const double sample_sigma = std::sqrt(m2 / (runs - 1));
  CHECK(sample_sigma == doctest::Approx(0.0158114).epsilon(0.10));  // within 10%
}

TEST_CASE("empirical variance matches p(1-p)/N within 5 standard errors") {
  ReadoutModel m = default_model();
  m.drift_floor = 0.0;
  const double p = 0.5;
  const int batches = 2000;
  for (const long n : {100L, 1000L, 10000L}) {
    m.n_repetitions = static_cast<int>(n);
    const auto rows = noise_vs_repetitions(m, p, {n}, 2024, batches);
    REQUIRE(rows.size() == 1);
    const double var_expected = p * (1.0 - p) / n;
    const double var_emp = rows[0].sigma_empirical * rows[0].sigma_empirical;
    // SE of a sample variance of a near-normal estimator
    const double se = var_expected * std::sqrt(2.0 / (batches - 1));
    CHECK(std::abs(var_emp - var_expected) <= 5.0 * se);
  }
}

TEST_CASE("noise scan: pure 1/sqrt(N) scaling without drift") {
  ReadoutModel m = default_model();
  m.drift_floor = 0.0;
  const auto rows = noise_vs_repetitions(m, 0.5, {500, 2000}, 11, 1500);
  CHECK(rows[0].sigma_model / rows[1].sigma_model == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rows[0].sigma_empirical / rows[1].sigma_empirical ==
        doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("noise scan: drift floor bends the scaling beyond the knee") {
  ReadoutModel m = default_model();
  m.drift_floor = 0.005;
  const std::vector<long> n_list{100, 400, 1000, 2500, 5000, 10000};
  const auto rows = noise_vs_repetitions(m, 0.5, n_list, 77, 400);
  bool knee_found = false;
  for (const auto& row : rows) {
    const double pure = std::sqrt(0.25 / row.n_repetitions);
    const double deviation = row.sigma_model / pure - 1.0;
    if (row.n_repetitions <= 2500) CHECK(deviation < 0.20);
    if (deviation > 0.20) knee_found = true;
    // empirical tracks the model
    CHECK(row.sigma_empirical == doctest::Approx(row.sigma_model).epsilon(0.25));
  }
  CHECK(knee_found);
}

TEST_CASE("noise scan: serial and parallel versions agree bit for bit") {
  ReadoutModel m = default_model();
  m.drift_floor = 0.003;
  const std::vector<long> n_list{100, 1000, 3000};
  const auto par = noise_vs_repetitions(m, 0.45, n_list, 5, 64);
  const auto ser = noise_vs_repetitions_serial(m, 0.45, n_list, 5, 64);
  REQUIRE(par.size() == ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].sigma_model == ser[i].sigma_model);
    CHECK(par[i].sigma_empirical == ser[i].sigma_empirical);
  }
  CHECK_THROWS_AS(noise_vs_repetitions(m, 0.45, {100, 50}, 5, 64),
                  std::invalid_argument);
}
