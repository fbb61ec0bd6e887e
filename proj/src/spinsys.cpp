#include "fluxepr/spinsys.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "fluxepr/constants.hpp"
#include "fluxepr/geometry.hpp"

namespace fluxepr {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

void check_half_integer_spin(double spin) {
  const double doubled = 2.0 * spin;
  if (!(spin >= 0.5) || std::abs(doubled - std::lround(doubled)) > 1e-9)
    throw std::invalid_argument("spin must be a half-integer with S >= 1/2");
}

}  // namespace

SpinSystem SpinSystem::isotropic(double spin, double g_factor, double zfs_d_hz,
                                 double strain_e_hz) {
  SpinSystem sys;
  sys.spin = spin;
  sys.g_tensor = Eigen::Matrix3d::Identity() * g_factor;
  sys.zfs_d_hz = zfs_d_hz;
  sys.strain_e_hz = strain_e_hz;
  sys.validate();
  return sys;
}

bool SpinSystem::strain_exceeds_zfs() const {
  return std::abs(strain_e_hz) > std::abs(zfs_d_hz);
}

void SpinSystem::validate() const {
  check_half_integer_spin(spin);
  if ((g_tensor - g_tensor.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(g_tensor.cwiseAbs().maxCoeff(), 1.0))
    throw std::invalid_argument("g tensor must be symmetric");
  const Eigen::Matrix3d sym = 0.5 * (g_tensor + g_tensor.transpose());
  const auto eig = hermitian_eigensystem(sym.cast<std::complex<double>>());
  if (eig.eigenvalues.minCoeff() < -1e-12 * std::max(g_tensor.cwiseAbs().maxCoeff(), 1.0))
    throw std::invalid_argument("g tensor must be positive semidefinite");
  const Eigen::Matrix3d gram = zfs_axes.transpose() * zfs_axes;
  if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("zfs_axes must be orthogonal");
  if (std::abs(zfs_axes.determinant() - 1.0) > 1e-12)
    throw std::invalid_argument("zfs_axes must be a proper rotation (det +1)");
}

Eigen::Vector3d FieldConfig::field_vector() const {
  Eigen::Vector3d parallel = parallel_direction;
  if (misalignment_deg != 0.0)
    parallel = rodrigues_rotate(parallel, misalignment_axis,
                                misalignment_deg * M_PI / 180.0);
  return b_parallel_t * parallel + b_perpendicular_t * Eigen::Vector3d::UnitZ();
}

void FieldConfig::validate() const {
  if (b_parallel_t < 0.0 || b_perpendicular_t < 0.0)
    throw std::invalid_argument("field magnitudes must be non-negative");
  if (std::abs(parallel_direction.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("parallel_direction must be a unit vector");
  if (std::abs(misalignment_axis.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("misalignment_axis must be a unit vector");
}

SpinOperators spin_operators(double spin) {
  check_half_integer_spin(spin);
  const int dim = static_cast<int>(std::lround(2.0 * spin)) + 1;

  Eigen::MatrixXcd sz = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd splus = Eigen::MatrixXcd::Zero(dim, dim);
  // basis index i holds m = S - i (descending)
  for (int i = 0; i < dim; ++i) sz(i, i) = spin - i;
  for (int i = 1; i < dim; ++i) {
    const double m = spin - i;  // S+ |m> = sqrt(S(S+1) - m(m+1)) |m+1>
    splus(i - 1, i) = std::sqrt(spin * (spin + 1.0) - m * (m + 1.0));
  }
  const Eigen::MatrixXcd sminus = splus.adjoint();

  SpinOperators ops;
  ops.sx = 0.5 * (splus + sminus);
  ops.sy = -0.5 * kI * (splus - sminus);
  ops.sz = sz;
  return ops;
}

SpinHamiltonian build_hamiltonian(const SpinSystem& sys, const FieldConfig& field) {
  sys.validate();
  field.validate();

  const SpinOperators ops = spin_operators(sys.spin);
  const Eigen::Vector3d b = field.field_vector();

  // Zeeman: (mu_B/h) B^T g S, lab frame
  const Eigen::Vector3d zeeman_hz = constants::bohr_magneton_hz * (sys.g_tensor.transpose() * b);
  Eigen::MatrixXcd h = zeeman_hz.x() * ops.sx + zeeman_hz.y() * ops.sy + zeeman_hz.z() * ops.sz;

  // zero-field terms along the zfs frame axes
  const Eigen::Vector3d xp = sys.zfs_axes.col(0);
  const Eigen::Vector3d yp = sys.zfs_axes.col(1);
  const Eigen::Vector3d zp = sys.zfs_axes.col(2);
  const Eigen::MatrixXcd sxp = xp.x() * ops.sx + xp.y() * ops.sy + xp.z() * ops.sz;
  const Eigen::MatrixXcd syp = yp.x() * ops.sx + yp.y() * ops.sy + yp.z() * ops.sz;
  const Eigen::MatrixXcd szp = zp.x() * ops.sx + zp.y() * ops.sy + zp.z() * ops.sz;
  h += sys.zfs_d_hz * szp * szp + sys.strain_e_hz * (syp * syp - sxp * sxp);

  SpinHamiltonian result;
  result.matrix = 0.5 * (h + h.adjoint());
  result.spin = sys.spin;
  return result;
}

std::vector<Transition> SpinSpectrum::transitions_from_ground() const {
  std::vector<Transition> out;
  for (Eigen::Index k = 1; k < eigenvalues.size(); ++k)
    out.push_back({static_cast<int>(k), eigenvalues(k) - eigenvalues(0)});
  return out;
}

SpinSpectrum diagonalize(const SpinHamiltonian& hamiltonian) {
  const auto eig = hermitian_eigensystem(hamiltonian.matrix);
  SpinSpectrum spec;
  spec.eigenvalues = eig.eigenvalues;
  spec.eigenvectors = eig.eigenvectors;
  spec.spin = hamiltonian.spin;
  return spec;
}

std::vector<Transition> transition_frequencies(const SpinSpectrum& spectrum) {
  return spectrum.transitions_from_ground();
}

Eigen::VectorXd thermal_populations(const SpinSpectrum& spectrum, double temperature_k,
                                    bool zero_temperature_limit) {
  const Eigen::Index n = spectrum.eigenvalues.size();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);

  if (zero_temperature_limit) {
    // equal weight over the degenerate ground manifold
    const double span = spectrum.eigenvalues(n - 1) - spectrum.eigenvalues(0);
    const double tol = 1e-12 * std::max(span, 1.0) + 1e-9;
    int count = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (spectrum.eigenvalues(i) - spectrum.eigenvalues(0) <= tol) ++count;
    for (Eigen::Index i = 0; i < n; ++i)
      if (spectrum.eigenvalues(i) - spectrum.eigenvalues(0) <= tol) p(i) = 1.0 / count;
    return p;
  }

  if (!(temperature_k > 0.0))
    throw std::invalid_argument("temperature must be positive (or use the T->0 flag)");

  const double beta = constants::planck / (constants::boltzmann * temperature_k);
  double z = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    p(i) = std::exp(-beta * (spectrum.eigenvalues(i) - spectrum.eigenvalues(0)));
    z += p(i);
  }
  return p / z;
}

double magnetization(const SpinSystem& sys, const SpinSpectrum& spectrum,
                     double temperature_k, const Eigen::Vector3d& axis, int moment_sign) {
  if (std::abs(axis.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("magnetization axis must be a unit vector");
  if (moment_sign != 1 && moment_sign != -1)
    throw std::invalid_argument("moment_sign must be +1 or -1");

  const Eigen::VectorXd p = thermal_populations(spectrum, temperature_k);
  const SpinOperators ops = spin_operators(sys.spin);

  // mu . axis = sign mu_B (g^T axis) . S
  const Eigen::Vector3d w =
      moment_sign * constants::bohr_magneton * (sys.g_tensor.transpose() * axis);
  const Eigen::MatrixXcd moment_op = w.x() * ops.sx + w.y() * ops.sy + w.z() * ops.sz;

  double m = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const Eigen::VectorXcd v = spectrum.eigenvectors.col(i);
    m += p(i) * (v.adjoint() * moment_op * v)(0).real();
  }
  return m;
}

std::vector<Orientation> nv_orientations() {
  const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  const Eigen::Vector3d axes[4] = {
      {1.0, 1.0, 1.0}, {1.0, -1.0, -1.0}, {1.0, -1.0, 1.0}, {1.0, 1.0, -1.0}};
  std::vector<Orientation> out;
  for (const auto& axis : axes)
    out.push_back({rotation_to_axis(axis * inv_sqrt3), 0.25});
  return out;
}

SpinSystem oriented(const SpinSystem& base, const Eigen::Matrix3d& rotation) {
  SpinSystem sys = base;
  sys.zfs_axes = rotation * base.zfs_axes;
  sys.g_tensor = rotation * base.g_tensor * rotation.transpose();
  return sys;
}

}  // namespace fluxepr
