#pragma once

#include <Eigen/Dense>

#include "fluxepr/geometry.hpp"
#include "fluxepr/rng.hpp"

namespace testutil {

inline double uniform(fluxepr::Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.uniform();
}

inline Eigen::MatrixXcd random_hermitian(fluxepr::Rng& rng, int n, double scale = 1.0) {
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = scale * (2.0 * rng.uniform() - 1.0);
    for (int j = i + 1; j < n; ++j) {
      const std::complex<double> z(scale * (2.0 * rng.uniform() - 1.0),
                                   scale * (2.0 * rng.uniform() - 1.0));
      m(i, j) = z;
      m(j, i) = std::conj(z);
    }
  }
  return m;
}

inline Eigen::Vector3d random_unit(fluxepr::Rng& rng) {
  while (true) {
    Eigen::Vector3d v(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0,
                      2.0 * rng.uniform() - 1.0);
    const double n = v.norm();
    if (n > 1e-3 && n < 1.0) return v / n;
  }
}

inline Eigen::Matrix3d random_rotation(fluxepr::Rng& rng) {
  const Eigen::Vector3d axis = random_unit(rng);
  const double angle = 6.283185307179586 * rng.uniform();
  Eigen::Matrix3d r;
  r.col(0) = fluxepr::rodrigues_rotate(Eigen::Vector3d::UnitX(), axis, angle);
  r.col(1) = fluxepr::rodrigues_rotate(Eigen::Vector3d::UnitY(), axis, angle);
  r.col(2) = fluxepr::rodrigues_rotate(Eigen::Vector3d::UnitZ(), axis, angle);
  return r;
}

}  // namespace testutil
