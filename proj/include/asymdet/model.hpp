#pragma once

#include <optional>
#include <string>
#include <vector>

#include "asymdet/core.hpp"

namespace asymdet::model {

// Rank-k signal S = sum_i d_i u_i v_i^T with orthonormal singular vectors.
// Strengths are validated descending and capped; vector blocks with a Gram
// deviation in (1e-10, 1e-6] are re-orthogonalized, anything worse is
// rejected.
struct SignalSpec {
  Vector d;  // descending, nonnegative, d(0) <= strength_cap
  Matrix U;  // p x k
  Matrix V;  // n x k

  SignalSpec() = default;
  SignalSpec(Vector d_in, Matrix u_in, Matrix v_in, double strength_cap = 100.0);

  Index k() const { return d.size(); }
  Index p() const { return U.rows(); }
  Index n() const { return V.rows(); }
};

// Spike multiplier Sigma = I + Xi diag(sigma) Theta^T.
struct SigmaSpec {
  Vector sigmas;  // descending, nonnegative
  Matrix Xi;      // p x r
  Matrix Theta;   // p x r

  SigmaSpec() = default;
  SigmaSpec(Vector sigmas_in, Matrix xi_in, Matrix theta_in, double inverse_norm_cap = 10.0);

  static SigmaSpec identity(Index p) { return SigmaSpec(Vector(), Matrix(p, 0), Matrix(p, 0)); }
  // Spikes on the leading standard basis directions (Xi = Theta = [e_1..e_r]).
  static SigmaSpec standard_basis(Index p, const Vector& sigmas);

  Index r() const { return sigmas.size(); }
  Index p() const { return Xi.rows(); }
  // Warning when sigma_max exceeds n^{1/4} for the intended sample size.
  std::optional<std::string> scale_warning(Index n) const;
};

// Entrywise variance profile: Var(sqrt(n) x_ij) = t_ij, with strictly
// positive entries.
struct VarianceProfile {
  Matrix T;
  double t_lo = 0.0;
  double t_hi = 0.0;

  VarianceProfile() = default;
  explicit VarianceProfile(Matrix t_in);

  static VarianceProfile ones(Index p, Index n, double scale = 1.0);
  // Equal-height row blocks with the given per-block values.
  static VarianceProfile row_blocks(Index p, Index n, const std::vector<double>& values);

  Index p() const { return T.rows(); }
  Index n() const { return T.cols(); }
  bool is_flat() const { return t_hi - t_lo <= 1e-12 * t_hi; }
};

enum class NoiseLaw { Gaussian, StudentT, Rademacher };

struct NoiseDistribution {
  NoiseLaw law = NoiseLaw::Gaussian;
  double nu = 0.0;  // StudentT only, must exceed 2

  static NoiseDistribution gaussian() { return {NoiseLaw::Gaussian, 0.0}; }
  static NoiseDistribution student_t(double nu);
  static NoiseDistribution rademacher() { return {NoiseLaw::Rademacher, 0.0}; }
};

enum class NConvention { PPlusN, N, P };

struct ExperimentConfig {
  Index p = 0;
  Index n = 0;
  SignalSpec signal;
  SigmaSpec sigma;
  VarianceProfile profile;
  NoiseDistribution dist;
  Index trials = 1;
  std::uint64_t seed = 0;

  bool retain_components = false;           // keep X1, X2, S, Sigma on samples
  std::optional<double> truncate_at;        // optional pre-truncation level M
  NConvention n_convention = NConvention::PPlusN;

  // Throws on dimensional inconsistency; returns accumulated warnings.
  std::vector<std::string> validate() const;
  Index detection_scale() const;  // the N entering the detection rule
};

Matrix sigma_matrix(const SigmaSpec& spec, Index p);
double sigma_max(const SigmaSpec& spec, Index p);  // ||Sigma||_op

Matrix signal_matrix(const SignalSpec& spec);

// The simulation-study planting u_i = e_{i+2}, v_i = e_{i+3} (1-based).
SignalSpec standard_basis_signal(Index p, Index n, const std::vector<double>& d);

}  // namespace asymdet::model
