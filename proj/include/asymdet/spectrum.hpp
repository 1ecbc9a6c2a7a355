#pragma once

#include <vector>

#include "asymdet/core.hpp"
#include "asymdet/linalg.hpp"

namespace asymdet::spectrum {

// Right/left eigenvector pair of the (p+n) linearization, biorthogonally
// normalized: ||right|| = 1 and left^* right = 1.
struct EigenvectorPair {
  ComplexVector right;
  ComplexVector left;
};

// Half spectrum of the linearization [[0,H1],[H2^T,0]]: the min(p,n) values
// with argument in (-pi/2, pi/2], sorted by descending magnitude with a
// positive-argument member leading each conjugate pair. The full spectrum is
// {+lambda} u {-lambda} u {0^(|n-p|)}.
struct SpectrumResult {
  ComplexVector lambdas;
  Index zero_multiplicity = 0;
  bool pairs_negated = true;
  std::vector<EigenvectorPair> vectors;  // leading |vectors| indices
};

Matrix build_linearization(const Matrix& h1, const Matrix& h2);

// Eigenvalues via the smaller of the two products H1 H2^T / H2^T H1;
// lambda_j is the principal square root (Re >= 0, purely imaginary mapped to
// +i). Eigenvectors of the linearization for the leading `want_vectors`
// indices are reconstructed from the product eigenvectors.
SpectrumResult eigs_asym(const Matrix& h1, const Matrix& h2, Index want_vectors = 0);

Vector singular_baseline(const Matrix& h);

// <a, P~ a> for the cluster's random projection P~ = sum_j w~_j w^_j^*.
// The imaginary part is returned as well; it should be small for
// well-separated clusters.
Complex eigvec_projection(const SpectrumResult& result, const std::vector<Index>& cluster,
                          const ComplexVector& a);

// Basis-invariant route to the same projection: a numerical contour integral
// of a^*(Y - z)^{-1} a around the cluster, evaluated through the p x p
// product resolvent. Used when cluster members are too close for individual
// eigenvectors to be trustworthy.
Complex projection_via_contour(const Matrix& h1, const Matrix& h2, Complex center, double radius,
                               const ComplexVector& a, int nodes = 24);

}  // namespace asymdet::spectrum
