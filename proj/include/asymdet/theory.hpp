#pragma once

#include <vector>

#include "asymdet/core.hpp"
#include "asymdet/model.hpp"

namespace asymdet::theory {

// Detection threshold sqrt(||T||_op / n).
double threshold(const model::VarianceProfile& profile, Index n);

// Fixed point of the four coupled positive-vector equations
//   1/u1 = eta + Tb v2 + |z|^2 / (eta + Tb u2)        (Tb = T/n, and the
//   1/u2 = eta + Tb' v1 + |z|^2 / (eta + Tb' u1)       three siblings),
// found by damped iteration from u = v = 1/(eta+1).
struct DysonSolution {
  double eta = 0.0;
  double z_abs = 0.0;
  Vector u1, u2, v1, v2;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;

  double mean_u() const;  // dimension-weighted average of (u1,u2)
  double mean_v() const;
  double max_component() const;
};

DysonSolution dyson_solve(const model::VarianceProfile& profile, Index n, double z_abs, double eta,
                          double tol = 1e-12, int max_iter = 100000, double damping = 0.5);

// Approximate membership in the self-consistent pseudospectrum: solves the
// fixed point on the grid eta in {1e-2,1e-3,1e-4} and tests whether
// max_j u_j / eta exceeds 1/tau at the finest eta.
bool pseudospectrum_member(const model::VarianceProfile& profile, Index n, double z_abs,
                           double tau);

enum class QfKind { A, B, C, D };

// Limiting covariance of sqrt(n)-scaled resolvent quadratic forms at
// spectral point z (|z| = z_abs). Kinds:
//   A: u_i^T Gb(z) v_i with u,v in R^p      B: psi^T Gcb(z) phi with psi,phi in R^n
//   C: q^T X1 Gcb(z) gamma, q in R^p, gamma in R^n
//   D: eta^T Gcb(z) X2^T r, eta in R^n, r in R^p  (same kernel as C)
double qf_covariance(const model::VarianceProfile& profile, Index n, double z_abs, QfKind kind,
                     const Vector& x_i, const Vector& y_i, const Vector& x_j, const Vector& y_j);

// Sherman-Morrison closed form for rank-one profiles T = col row^T;
// the oracle for the dense kernel path.
double qf_covariance_rank1(const Vector& col, const Vector& row, Index n, double z_abs, QfKind kind,
                           const Vector& x_i, const Vector& y_i, const Vector& x_j,
                           const Vector& y_j);

struct FluctuationSpec {
  double var_g = 0.0;        // kernel-sum variance of the Gaussian component
  double var_linear = 0.0;   // variance of u^T Sigma X1 v + v^T X2^T Sigma^T u
  double var_total = 0.0;    // var_linear + var_g / n
  double z_abs_used = 0.0;   // spectral argument fed to the kernels (= d^2)

  // Prediction for Var(lambda_i - d_i). The outlier responds to the noise
  // through the unit eigenvector (u;v)/sqrt(2) of the signal linearization,
  // which squares to a factor 1/4 on both fluctuation components.
  double outlier_variance() const { return var_total / 4.0; }
};

// Three-kernel fluctuation variance for the outlier tied to (u, v, d).
// Requires d above threshold; when `all_strengths` is supplied, also checks
// the pairwise separation (default floor 0.05) and rejects violations.
FluctuationSpec fluct_variance(const model::VarianceProfile& profile, Index n,
                               const model::SigmaSpec& sigma, const Vector& u, const Vector& v,
                               double d, const Vector& all_strengths = Vector(),
                               double separation_floor = 0.05);

enum class EdgeMethod { FlatClosedForm, MonteCarlo };

// Right end point of the null singular-value distribution: sqrt(t)(1+sqrt(p/n))
// for flat profiles, otherwise the median largest singular value over
// Monte Carlo null samples.
double null_edge(const model::VarianceProfile& profile, Index p, Index n, EdgeMethod method,
                 Index trials = 50, std::uint64_t seed = 0);

// Stated large-n limit of E Tr(X^k) for the iid block linearization:
// 2 (p/n)^{m+1} when k = 4m, zero otherwise.
double trace_moment_limit(Index p, Index n, Index k);

// Exact finite-n moments derived directly from independence and mean zero;
// kept alongside the stated limit so Monte Carlo output can be judged against
// both. E Tr(X^2) = 0, E Tr(X^4) = 2p/n, Var Tr(X^2) = 4p/n.
double trace_moment_exact_mean4(Index p, Index n);
double trace_moment_exact_var2(Index p, Index n);

// det(A+B) as the signed sum over equal-size index subsets I, J of
// det(A[I,J]) det(B[I^c,J^c]). Guarded to dimension <= 10.
double det_sum_expansion(const Matrix& a, const Matrix& b);

// det(I + D W^*(Xcal - lambda)^{-1} W) for the signal eigenbasis
// w_{+-i} = (u_i; +-v_i)/sqrt(2); |result| near zero certifies lambda as an
// eigenvalue of the noise-plus-signal linearization.
Complex secular_value(const Matrix& noise_linearization, const model::SignalSpec& signal,
                      Complex lambda);

// Same determinant evaluated through the p x p product resolvent of the two
// noise blocks N1, N2 (one complex LU instead of the (p+n) solve).
Complex secular_value_blocks(const Matrix& n1, const Matrix& n2, const model::SignalSpec& signal,
                             Complex lambda);

}  // namespace asymdet::theory
