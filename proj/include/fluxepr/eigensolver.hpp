#pragma once

#include <Eigen/Dense>

namespace fluxepr {

struct EigenSystem {
  Eigen::VectorXd eigenvalues;    // ascending
  Eigen::MatrixXcd eigenvectors;  // unitary, column k pairs with eigenvalue k
};

// Cyclic Jacobi diagonalization for complex Hermitian matrices up to 16x16.
// The matrices in this problem are tiny (spin multiplicities), where Jacobi
// is accurate to machine precision and needs no workspace machinery.
// Throws std::invalid_argument for non-square, oversized, or non-Hermitian
// input (Hermiticity tolerance 1e-9 relative in the max norm).
EigenSystem hermitian_eigensystem(const Eigen::MatrixXcd& matrix);

}  // namespace fluxepr
