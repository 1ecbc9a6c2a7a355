#include "asymdet/model.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "asymdet/linalg.hpp"

namespace asymdet::model {

namespace {

double gram_deviation(const Matrix& q) {
  if (q.cols() == 0) return 0.0;
  Matrix g = q.transpose() * q;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

// Modified Gram-Schmidt, in place.
void reorthogonalize(Matrix& q) {
  for (Index j = 0; j < q.cols(); ++j) {
    for (Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    const double nrm = q.col(j).norm();
    require(nrm > 1e-12, "orthonormal block has a (near) dependent column");
    q.col(j) /= nrm;
  }
}

void validate_orthonormal(Matrix& q, const char* what) {
  require(all_finite(q), "orthonormal block has non-finite entries");
  const double dev = gram_deviation(q);
  if (dev <= 1e-10) return;
  if (dev <= 1e-6) {
    reorthogonalize(q);
    return;
  }
  throw std::invalid_argument(std::string(what) + ": columns are not orthonormal (Gram deviation " +
                              std::to_string(dev) + ")");
}

void validate_descending_nonneg(const Vector& v, const char* what) {
  for (Index i = 0; i < v.size(); ++i) {
    require(std::isfinite(v[i]) && v[i] >= 0.0, "strengths must be finite and nonnegative");
    if (i > 0) require(v[i] <= v[i - 1] + 1e-15, "strengths must be descending");
  }
  (void)what;
}

}  // namespace

SignalSpec::SignalSpec(Vector d_in, Matrix u_in, Matrix v_in, double strength_cap)
    : d(std::move(d_in)), U(std::move(u_in)), V(std::move(v_in)) {
  require(U.cols() == d.size() && V.cols() == d.size(), "SignalSpec: rank mismatch");
  validate_descending_nonneg(d, "d");
  if (d.size() > 0) require(d[0] <= strength_cap, "SignalSpec: leading strength exceeds cap");
  validate_orthonormal(U, "SignalSpec.U");
  validate_orthonormal(V, "SignalSpec.V");
}

SigmaSpec::SigmaSpec(Vector sigmas_in, Matrix xi_in, Matrix theta_in, double inverse_norm_cap)
    : sigmas(std::move(sigmas_in)), Xi(std::move(xi_in)), Theta(std::move(theta_in)) {
  require(Xi.cols() == sigmas.size() && Theta.cols() == sigmas.size(), "SigmaSpec: rank mismatch");
  require(Xi.rows() == Theta.rows(), "SigmaSpec: Xi/Theta row mismatch");
  validate_descending_nonneg(sigmas, "sigmas");
  validate_orthonormal(Xi, "SigmaSpec.Xi");
  validate_orthonormal(Theta, "SigmaSpec.Theta");

  if (sigmas.size() > 0) {
    const Matrix s = sigma_matrix(*this, Xi.rows());
    Eigen::PartialPivLU<Matrix> lu(s);
    const double det_mag = std::abs(lu.determinant());
    require(std::isfinite(det_mag) && det_mag > 1e-300, "SigmaSpec: Sigma is singular");
    // ||Sigma^{-1}||_op by power iteration on Sigma^{-T} Sigma^{-1} via solves.
    Vector v = Vector::Ones(s.rows());
    v /= v.norm();
    double nrm = 0.0;
    for (int it = 0; it < 200; ++it) {
      Vector w = lu.solve(v);
      const double wn = w.norm();
      Vector u = lu.transpose().solve(w);
      const double un = u.norm();
      if (un == 0.0) break;
      v = u / un;
      const double prev = nrm;
      nrm = wn;
      if (it > 3 && std::abs(nrm - prev) <= 1e-10 * nrm) break;
    }
    require(nrm <= inverse_norm_cap,
            "SigmaSpec: ||Sigma^{-1}||_op exceeds the invertibility cap");
  }
}

SigmaSpec SigmaSpec::standard_basis(Index p, const Vector& s) {
  require(s.size() <= p, "SigmaSpec::standard_basis: rank exceeds dimension");
  Matrix xi = Matrix::Zero(p, s.size());
  for (Index j = 0; j < s.size(); ++j) xi(j, j) = 1.0;
  return SigmaSpec(s, xi, xi);
}

std::optional<std::string> SigmaSpec::scale_warning(Index n) const {
  if (sigmas.size() == 0) return std::nullopt;
  const double cap = std::pow(static_cast<double>(n), 0.25);
  if (sigmas[0] > cap)
    return "sigma_1 = " + std::to_string(sigmas[0]) + " exceeds n^{1/4} = " + std::to_string(cap) +
           "; spike-size assumption violated at this n";
  return std::nullopt;
}

VarianceProfile::VarianceProfile(Matrix t_in) : T(std::move(t_in)) {
  require(T.size() > 0, "VarianceProfile: empty profile");
  require(all_finite(T), "VarianceProfile: non-finite entries");
  t_lo = T.minCoeff();
  t_hi = T.maxCoeff();
  require(t_lo > 0.0, "VarianceProfile: entries must be strictly positive");
}

VarianceProfile VarianceProfile::ones(Index p, Index n, double scale) {
  return VarianceProfile(Matrix::Constant(p, n, scale));
}

VarianceProfile VarianceProfile::row_blocks(Index p, Index n, const std::vector<double>& values) {
  require(!values.empty() && p % static_cast<Index>(values.size()) == 0,
          "VarianceProfile::row_blocks: block count must divide p");
  Matrix t(p, n);
  const Index h = p / static_cast<Index>(values.size());
  for (std::size_t b = 0; b < values.size(); ++b)
    t.middleRows(static_cast<Index>(b) * h, h).setConstant(values[b]);
  return VarianceProfile(std::move(t));
}

NoiseDistribution NoiseDistribution::student_t(double nu) {
  require(nu > 2.0, "StudentT requires nu > 2 (finite variance)");
  return {NoiseLaw::StudentT, nu};
}

std::vector<std::string> ExperimentConfig::validate() const {
  require(p > 0 && n > 0, "config: dimensions must be positive");
  require(trials >= 1, "config: trials must be >= 1");
  if (signal.k() > 0)
    require(signal.p() == p && signal.n() == n, "config: signal dimensions mismatch");
  if (sigma.r() > 0) require(sigma.p() == p, "config: sigma dimension mismatch");
  require(profile.p() == p && profile.n() == n, "config: profile dimensions mismatch");
  if (truncate_at) require(*truncate_at > 0.0, "config: truncation level must be positive");

  std::vector<std::string> warnings;
  if (auto w = sigma.scale_warning(n)) warnings.push_back(*w);
  return warnings;
}

Index ExperimentConfig::detection_scale() const {
  switch (n_convention) {
    case NConvention::N: return n;
    case NConvention::P: return p;
    default: return p + n;
  }
}

Matrix sigma_matrix(const SigmaSpec& spec, Index p) {
  require(spec.r() == 0 || spec.p() == p, "sigma_matrix: dimension mismatch");
  Matrix s = Matrix::Identity(p, p);
  if (spec.r() > 0) s += spec.Xi * spec.sigmas.asDiagonal() * spec.Theta.transpose();
  return s;
}

double sigma_max(const SigmaSpec& spec, Index p) {
  if (spec.r() == 0) return 1.0;
  return linalg::op_norm(sigma_matrix(spec, p));
}

Matrix signal_matrix(const SignalSpec& spec) {
  require(spec.p() > 0 && spec.n() > 0, "signal_matrix: empty spec");
  if (spec.k() == 0) return Matrix::Zero(spec.p(), spec.n());
  return spec.U * spec.d.asDiagonal() * spec.V.transpose();
}

SignalSpec standard_basis_signal(Index p, Index n, const std::vector<double>& d) {
  const Index k = static_cast<Index>(d.size());
  require(k <= std::min(p, n) - 6, "standard_basis_signal: dimensions too small for the planting");
  Vector dv(k);
  Matrix u = Matrix::Zero(p, k);
  Matrix v = Matrix::Zero(n, k);
  for (Index i = 0; i < k; ++i) {
    dv[i] = d[static_cast<std::size_t>(i)];
    u(i + 2, i) = 1.0;  // 1-based: u_i = e_{i+2}
    v(i + 3, i) = 1.0;  // 1-based: v_i = e_{i+3}
  }
  return SignalSpec(dv, u, v);
}

}  // namespace asymdet::model
