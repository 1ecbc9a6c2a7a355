#include "asymdet/sampler.hpp"

#include <cmath>

namespace asymdet::sampler {

namespace {

double draw_standardized(RngStream& s, const model::NoiseDistribution& dist) {
  switch (dist.law) {
    case model::NoiseLaw::Gaussian:
      return s.next_gaussian();
    case model::NoiseLaw::StudentT:
      return s.next_student_t(dist.nu) * std::sqrt((dist.nu - 2.0) / dist.nu);
    case model::NoiseLaw::Rademacher:
      return s.next_rademacher();
  }
  return 0.0;
}

}  // namespace

Matrix sample_noise(const model::VarianceProfile& profile, const model::NoiseDistribution& dist,
                    const RngStream& stream) {
  if (dist.law == model::NoiseLaw::StudentT)
    require(dist.nu > 2.0, "sample_noise: StudentT needs nu > 2");
  const Index p = profile.p();
  const Index n = profile.n();
  const double inv_n = 1.0 / static_cast<double>(n);

  Matrix x(p, n);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < n; ++j) {
      RngStream entry = stream.child(static_cast<std::uint64_t>(i * n + j));
      x(i, j) = draw_standardized(entry, dist) * std::sqrt(profile.T(i, j) * inv_n);
    }
  }
  return x;
}

SamplePair assemble_pair(const model::ExperimentConfig& config, Index trial) {
  config.validate();
  RngStream root = RngStream(config.seed).child(static_cast<std::uint64_t>(trial));

  Matrix x1 = sample_noise(config.profile, config.dist, root.child(1));
  Matrix x2 = sample_noise(config.profile, config.dist, root.child(2));
  if (config.truncate_at) {
    const Recenter mode = config.dist.law == model::NoiseLaw::Gaussian
                              ? Recenter::AnalyticGaussian
                              : Recenter::Empirical;
    x1 = truncate(x1, *config.truncate_at, config.n, mode);
    x2 = truncate(x2, *config.truncate_at, config.n, mode);
  }

  const Matrix sigma = model::sigma_matrix(config.sigma, config.p);
  const Matrix s = config.signal.k() > 0 ? model::signal_matrix(config.signal)
                                         : Matrix::Zero(config.p, config.n);

  SamplePair pair;
  pair.H1 = s + sigma * x1;
  pair.H2 = s + sigma * x2;
  if (config.retain_components) {
    pair.X1 = std::move(x1);
    pair.X2 = std::move(x2);
    pair.S = s;
    pair.Sigma = sigma;
  }
  return pair;
}

Matrix truncate(const Matrix& x, double m_level, Index n, Recenter mode) {
  require(m_level > 0.0, "truncate: level must be positive");
  const double cut = m_level / std::sqrt(static_cast<double>(n));
  Matrix y = (x.cwiseAbs().array() <= cut).select(x, 0.0);
  if (mode == Recenter::Empirical) y.array() -= y.mean();
  return y;
}

}  // namespace asymdet::sampler
