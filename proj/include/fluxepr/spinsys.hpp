#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "fluxepr/eigensolver.hpp"

namespace fluxepr {

// Effective spin system: spin quantum number S, lab-frame g tensor, and the
// zero-field splitting D / strain E defined in the frame given by zfs_axes
// (columns = zero-field frame axes expressed in lab coordinates).
struct SpinSystem {
  double spin = 0.5;
  Eigen::Matrix3d g_tensor = Eigen::Matrix3d::Identity() * 2.0;
  double zfs_d_hz = 0.0;
  double strain_e_hz = 0.0;
  Eigen::Matrix3d zfs_axes = Eigen::Matrix3d::Identity();

  static SpinSystem isotropic(double spin, double g_factor, double zfs_d_hz = 0.0,
                              double strain_e_hz = 0.0);

  int multiplicity() const { return static_cast<int>(std::lround(2.0 * spin)) + 1; }
  bool strain_exceeds_zfs() const;  // soft flag, |E| > |D|
  void validate() const;            // throws std::invalid_argument
};

// Applied field: an in-plane component of magnitude b_parallel_t along
// parallel_direction (optionally tilted by misalignment_deg about
// misalignment_axis) plus a perpendicular component along lab +z.
struct FieldConfig {
  double b_parallel_t = 0.0;
  double b_perpendicular_t = 0.0;
  Eigen::Vector3d parallel_direction = Eigen::Vector3d::UnitX();
  double misalignment_deg = 0.0;
  Eigen::Vector3d misalignment_axis = Eigen::Vector3d::UnitZ();

  Eigen::Vector3d field_vector() const;  // composed B, Tesla, lab frame
  void validate() const;
};

// Hamiltonian in the Sz eigenbasis with m = S..-S (descending), entries in Hz
// (energy divided by the Planck constant).
struct SpinHamiltonian {
  Eigen::MatrixXcd matrix;
  double spin = 0.5;
};

struct Transition {
  int level;           // excited-state index k, transition 0 -> k
  double frequency_hz;
};

struct SpinSpectrum {
  Eigen::VectorXd eigenvalues;    // Hz, ascending
  Eigen::MatrixXcd eigenvectors;  // unitary columns
  double spin = 0.5;

  std::vector<Transition> transitions_from_ground() const;
};

struct SpinOperators {
  Eigen::MatrixXcd sx, sy, sz;
};

// Ladder-operator construction in the Sz eigenbasis for any half-integer S.
SpinOperators spin_operators(double spin);

// H/h = (mu_B/h) B^T g S + D Sz'^2 + E (Sy'^2 - Sx'^2); the Zeeman term uses
// the lab frame, the zero-field terms the zfs_axes frame.
SpinHamiltonian build_hamiltonian(const SpinSystem& sys, const FieldConfig& field);

SpinSpectrum diagonalize(const SpinHamiltonian& hamiltonian);

std::vector<Transition> transition_frequencies(const SpinSpectrum& spectrum);

// Boltzmann populations over the spectrum. With zero_temperature_limit the
// temperature argument is ignored and weight is split over the (possibly
// degenerate) ground level.
Eigen::VectorXd thermal_populations(const SpinSpectrum& spectrum, double temperature_k,
                                    bool zero_temperature_limit = false);

// Thermal-equilibrium magnetic moment along the given unit axis, J/T.
// Electron convention mu = -mu_B g S; flip via moment_sign = +1.
double magnetization(const SpinSystem& sys, const SpinSpectrum& spectrum,
                     double temperature_k, const Eigen::Vector3d& axis,
                     int moment_sign = -1);

// One member of an orientation ensemble: rigid rotation of the molecular
// frame plus statistical weight.
struct Orientation {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  double weight = 1.0;
};

// The four <111> NV axes. Signs are canonicalized to positive x component so
// that an in-plane [100] field projects positively on every quantization
// axis and the four sites stay exactly degenerate.
std::vector<Orientation> nv_orientations();

// Rotates a molecular-frame-aligned system (zfs_axes = identity convention)
// into the given orientation: zfs axes and g tensor rotate together.
SpinSystem oriented(const SpinSystem& base, const Eigen::Matrix3d& rotation);

}  // namespace fluxepr
