#pragma once

#include <vector>

#include "asymdet/core.hpp"

namespace asymdet::linalg {

// One eigenvalue with optional right/left eigenvectors. When vectors are
// requested, `right` has unit norm and `left` is scaled so left^* right = 1.
struct EigenPair {
  Complex value;
  ComplexVector right;
  ComplexVector left;
  // Set when the eigenvalue sits in a cluster tighter than 1e-10 * ||M||_op;
  // the vectors are then numerically unreliable.
  bool ill_conditioned = false;
};

// Dense nonsymmetric eigendecomposition (real Schur reduction). Eigenvalues
// come back with multiplicity; left vectors are recovered from the transposed
// problem and renormalized to biorthogonality.
std::vector<EigenPair> eig_general(const Matrix& m, bool want_vectors);

// Largest singular value by power iteration on M^T M. Starts from the
// all-ones direction with a tiny fixed perturbation; stops when the relative
// change is below tol or after 10000 sweeps.
double op_norm(const Eigen::Ref<const Matrix>& m, double tol = 1e-12);

// All singular values, descending.
Vector svd_values(const Eigen::Ref<const Matrix>& m);

// (M - zI)^{-1} B for complex z. Throws when the shifted matrix is singular
// or its estimated 1-norm condition number exceeds cond_cap.
ComplexMatrix solve_shifted(const Matrix& m, Complex z, const ComplexMatrix& b,
                            double cond_cap = 1e14);

}  // namespace asymdet::linalg
