#include "fluxepr/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

namespace fluxepr {

namespace {

double off_diagonal_norm(const Eigen::MatrixXcd& m) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j) sum += std::norm(m(i, j));
  return std::sqrt(sum);
}

}  // namespace

EigenSystem hermitian_eigensystem(const Eigen::MatrixXcd& matrix) {
  const Eigen::Index n = matrix.rows();
  if (n == 0 || matrix.cols() != n) throw std::invalid_argument("matrix must be square");
  if (n > 16) throw std::invalid_argument("Jacobi eigensolver is limited to dimension 16");

  const double scale = matrix.cwiseAbs().maxCoeff();
  const double herm_defect = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
  if (herm_defect > 1e-9 * std::max(scale, 1e-300))
    throw std::invalid_argument("matrix is not Hermitian");

  // symmetrize roundoff before iterating
  Eigen::MatrixXcd a = 0.5 * (matrix + matrix.adjoint());
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(n, n);

  const double frob = std::max(a.norm(), 1e-300);
  const double tol = 1e-15 * frob;
  const int max_sweeps = 60;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_diagonal_norm(a) <= tol) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const std::complex<double> apq = a(p, q);
        const double beta = std::abs(apq);
        if (beta <= 1e-300) continue;

        // phase rotation reduces the pivot to the real symmetric case
        const std::complex<double> phase = apq / beta;  // e^{i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * beta);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // columns of the 2x2 unitary: G(:,p) = (c, -s e^{-i phi}),
        // G(:,q) = (s, c e^{-i phi})
        const std::complex<double> gqp = -s * std::conj(phase);
        const std::complex<double> gqq = c * std::conj(phase);

        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const std::complex<double> akp = a(k, p);
          const std::complex<double> akq = a(k, q);
          a(k, p) = c * akp + gqp * akq;
          a(k, q) = s * akp + gqq * akq;
          a(p, k) = std::conj(a(k, p));
          a(q, k) = std::conj(a(k, q));
        }
        a(p, p) = app - t * beta;
        a(q, q) = aqq + t * beta;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        for (Eigen::Index k = 0; k < n; ++k) {
          const std::complex<double> ukp = u(k, p);
          const std::complex<double> ukq = u(k, q);
          u(k, p) = c * ukp + gqp * ukq;
          u(k, q) = s * ukp + gqq * ukq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&a](Eigen::Index i, Eigen::Index j) {
    return a(i, i).real() < a(j, j).real();
  });

  EigenSystem result;
  result.eigenvalues.resize(n);
  result.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    result.eigenvalues(k) = a(order[static_cast<std::size_t>(k)],
                              order[static_cast<std::size_t>(k)]).real();
    result.eigenvectors.col(k) = u.col(order[static_cast<std::size_t>(k)]);
  }
  return result;
}

}  // namespace fluxepr
