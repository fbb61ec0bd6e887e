#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "fluxepr/constants.hpp"
#include "fluxepr/fluxqubit.hpp"
#include "fluxepr/geometry.hpp"
#include "oracles.hpp"

using namespace fluxepr;
namespace cn = fluxepr::constants;

namespace {

FluxQubit default_qubit() {
  FluxQubit q;
  q.persistent_current_a = 300e-9;
  q.gap_hz = 5e9;
  q.loop_vertices_m = square_loop(std::sqrt(47.2e-12));
  return q;
}

}  // namespace

TEST_CASE("dispersion: symmetry point, sqrt(2) point, worked example") {
  const FluxQubit q = default_qubit();
  const double half_phi0 = 0.5 * cn::flux_quantum;

  CHECK(qubit_frequency(q, half_phi0) == doctest::Approx(q.gap_hz).epsilon(1e-15));

  // flux where eps = gap
  const double flux_eps_eq_gap = half_phi0 + q.gap_hz * cn::planck /
                                                 (2.0 * q.persistent_current_a);
  CHECK(qubit_frequency(q, flux_eps_eq_gap) ==
        doctest::Approx(std::sqrt(2.0) * q.gap_hz).epsilon(1e-12));

  // 3 mPhi0 offset with the default parameters
  const WorkingPoint wp = working_point(q, half_phi0 + 3e-3 * cn::flux_quantum);
  CHECK(wp.detuning_hz == doctest::Approx(5.617e9).epsilon(2e-4));
  CHECK(wp.frequency_hz == doctest::Approx(7.52e9).epsilon(2e-4));
}

TEST_CASE("working point triple satisfies eps = f cos(theta), gap = f sin(theta)") {
  const FluxQubit q = default_qubit();
  fluxepr::Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const double offset = (rng.uniform() - 0.5) * 0.02 * cn::flux_quantum;
    const WorkingPoint wp = working_point(q, 0.5 * cn::flux_quantum + offset);
    CHECK(wp.detuning_hz ==
          doctest::Approx(wp.frequency_hz * std::cos(wp.mixing_angle_rad)).epsilon(1e-12));
    CHECK(q.gap_hz ==
          doctest::Approx(wp.frequency_hz * std::sin(wp.mixing_angle_rad)).epsilon(1e-12));
    CHECK(wp.mixing_angle_rad > 0.0);
    CHECK(wp.mixing_angle_rad < M_PI);
  }
}

TEST_CASE("dispersion is symmetric about Phi0/2 with minimum gap") {
  const FluxQubit q = default_qubit();
  const double half_phi0 = 0.5 * cn::flux_quantum;
  for (const double offset : {1e-4, 1e-3, 5e-3}) {
    const double delta = offset * cn::flux_quantum;
    CHECK(qubit_frequency(q, half_phi0 + delta) ==
          doctest::Approx(qubit_frequency(q, half_phi0 - delta)).epsilon(1e-14));
    CHECK(qubit_frequency(q, half_phi0 + delta) > q.gap_hz);
  }
}

TEST_CASE("flux-to-frequency slope: zero at symmetry, asymptote, finite difference") {
  const FluxQubit q = default_qubit();
  const double half_phi0 = 0.5 * cn::flux_quantum;
  CHECK(flux_to_frequency_slope(q, half_phi0) == 0.0);

  // |eps| / gap = 100
  const double asymptote = 2.0 * q.persistent_current_a / cn::planck;
  const double flux_far = half_phi0 + 100.0 * q.gap_hz * cn::planck /
                                          (2.0 * q.persistent_current_a);
  CHECK(flux_to_frequency_slope(q, flux_far) ==
        doctest::Approx(asymptote).epsilon(5e-5));  // within 0.005%

  fluxepr::Rng rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const double flux = half_phi0 + (rng.uniform() - 0.5) * 0.02 * cn::flux_quantum;
    const double h = 1e-8 * cn::flux_quantum;
    const double numeric = oracles::central_difference(
        [&q](double x) { return qubit_frequency(q, x); }, flux, h);
    const double analytic = flux_to_frequency_slope(q, flux);
    if (std::abs(analytic) > 1e-3 * asymptote)
      CHECK(numeric == doctest::Approx(analytic).epsilon(1e-6));
  }
}

TEST_CASE("mixing angle branch: pi/2 at eps=0, pi/4 at eps=gap, 3pi/4 at eps=-gap") {
  const FluxQubit q = default_qubit();
  const double half_phi0 = 0.5 * cn::flux_quantum;
  const double flux_gap = q.gap_hz * cn::planck / (2.0 * q.persistent_current_a);
  CHECK(mixing_angle(q, half_phi0) == doctest::Approx(M_PI / 2).epsilon(1e-14));
  CHECK(mixing_angle(q, half_phi0 + flux_gap) == doctest::Approx(M_PI / 4).epsilon(1e-12));
  CHECK(mixing_angle(q, half_phi0 - flux_gap) ==
        doctest::Approx(3 * M_PI / 4).epsilon(1e-12));

  CHECK(far_detuned(working_point(q, half_phi0 + 100 * flux_gap)));
  CHECK(!far_detuned(working_point(q, half_phi0 + flux_gap)));
}

TEST_CASE("dispersive shift per spin: NV states give 0 and -+2 g_z") {
  const SpinSystem nv = SpinSystem::isotropic(1.0, 2.05, 2.883e9, 5e6);
  FieldConfig field;
  field.b_parallel_t = 30e-3;  // Zeeman well above the strain mixing
  field.parallel_direction = Eigen::Vector3d::UnitZ();
  const auto spec = diagonalize(build_hamiltonian(nv, field));

  const double gz = 4.4e3;
  const Eigen::Vector3d g(0.0, 0.0, gz);
  CHECK(std::abs(dispersive_shift_per_spin(g, 0, spec)) < 0.02 * gz);
  CHECK(dispersive_shift_per_spin(g, 1, spec) == doctest::Approx(-2.0 * gz).epsilon(1e-3));
  CHECK(dispersive_shift_per_spin(g, 2, spec) == doctest::Approx(2.0 * gz).epsilon(1e-3));
}

TEST_CASE("dispersive shift matches a brute-force expectation value on mixed states") {
  // small field plus strain: eigenstates are genuine superpositions
  const SpinSystem nv = SpinSystem::isotropic(1.0, 2.05, 2.883e9, 5e6);
  FieldConfig field;
  field.b_parallel_t = 1e-4;
  field.parallel_direction = Eigen::Vector3d::UnitZ();
  const auto spec = diagonalize(build_hamiltonian(nv, field));

  const Eigen::Vector3d g(1.2e3, -0.4e3, 4.4e3);
  const auto ops = spin_operators(1.0);
  const Eigen::MatrixXcd op = g.x() * ops.sx + g.y() * ops.sy + g.z() * ops.sz;
  for (int state = 0; state < 3; ++state) {
    const Eigen::VectorXcd v = spec.eigenvectors.col(state);
    const double brute = 2.0 * (v.adjoint() * op * v)(0).real();
    CHECK(dispersive_shift_per_spin(g, state, spec) ==
          doctest::Approx(brute).epsilon(1e-12));
  }
  CHECK_THROWS_AS(dispersive_shift_per_spin(g, 3, spec), std::invalid_argument);
}

TEST_CASE("ensemble flux shift is linear") {
  CHECK(ensemble_flux_shift(0.0, 1e5) == 0.0);
  const double one = ensemble_flux_shift(3e-22, 2e4);
  CHECK(ensemble_flux_shift(6e-22, 2e4) == doctest::Approx(2.0 * one).epsilon(1e-15));
  // N polarized spins, each contributing dPhi/dN
  const double per_spin = 3.3e-24;
  CHECK(ensemble_flux_shift(1e4, per_spin) == doctest::Approx(1e4 * per_spin));
}

TEST_CASE("thermal dispersive shift and flux route close at the single-spin level") {
  // spin-1/2 with the quantization axis along the field
  const SpinSystem half = SpinSystem::isotropic(0.5, 2.0);
  FieldConfig field;
  field.b_parallel_t = 5e-3;
  field.parallel_direction = Eigen::Vector3d::UnitZ();
  const auto spec = diagonalize(build_hamiltonian(half, field));
  const Eigen::VectorXd p = thermal_populations(spec, 0.05);

  const double gz = 4.4e3;
  const Eigen::Vector3d g(0.0, 0.0, gz);
  double thermal_shift = 0.0;
  for (int i = 0; i < 2; ++i)
    thermal_shift += p(i) * dispersive_shift_per_spin(g, i, spec);

  // flux route with the consistent per-spin flux closes through the slope
  const FluxQubit q = default_qubit();
  const double working_flux = 0.5 * cn::flux_quantum + 3e-3 * cn::flux_quantum;
  const double slope = flux_to_frequency_slope(q, working_flux);
  const double flux_per_spin = thermal_shift / slope;
  CHECK(ensemble_flux_shift(1.0, flux_per_spin) * slope ==
        doctest::Approx(thermal_shift).epsilon(1e-9));
}

TEST_CASE("qubit validation rejects bad polygons and parameters") {
  FluxQubit q = default_qubit();
  q.persistent_current_a = 0.0;
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);

  q = default_qubit();
  q.loop_vertices_m = {{0, 0}, {1e-6, 0}};
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);

  q = default_qubit();
  std::swap(q.loop_vertices_m[1], q.loop_vertices_m[3]);  // clockwise
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);

  q = default_qubit();
  q.loop_vertices_m = {{0, 0}, {1e-6, 1e-6}, {1e-6, 0}, {0, 1e-6}};  // bowtie
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}
