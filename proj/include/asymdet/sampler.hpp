#pragma once

#include <optional>

#include "asymdet/core.hpp"
#include "asymdet/model.hpp"
#include "asymdet/rng.hpp"

namespace asymdet::sampler {

// Two samples sharing the same signal and spike multiplier. Components are
// retained only when the config asks for validation mode.
struct SamplePair {
  Matrix H1;
  Matrix H2;
  std::optional<Matrix> X1, X2, S, Sigma;
};

// Independent entries, mean 0, variance t_ij / n. Student-t draws are
// standardized to unit variance before the profile scaling. Entry (i,j) owns
// the child stream with id i*n+j, so the matrix is identical no matter how
// the fill is scheduled.
Matrix sample_noise(const model::VarianceProfile& profile, const model::NoiseDistribution& dist,
                    const RngStream& stream);

// H_a = S + Sigma X_a for two independent X draws. The X streams are the
// children (1, 2) of stream(seed).child(trial).
SamplePair assemble_pair(const model::ExperimentConfig& config, Index trial);

enum class Recenter { AnalyticGaussian, Empirical };

// Entrywise truncation at |sqrt(n) x| <= M followed by mean recentering.
// A centered Gaussian keeps its exact zero recentering constant; other laws
// subtract the realized mean of the truncated matrix.
Matrix truncate(const Matrix& x, double m_level, Index n, Recenter mode = Recenter::Empirical);

}  // namespace asymdet::sampler
