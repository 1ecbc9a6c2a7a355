#pragma once

#include <string>
#include <vector>

#include "asymdet/core.hpp"
#include "asymdet/spectrum.hpp"

namespace asymdet::detector {

struct Detection {
  Complex lambda;      // representative (largest real part in the cluster)
  double estimate;     // mean real part over cluster members
  int multiplicity;    // cluster size including the conjugate partner
};

struct DetectionReport {
  double lambda_max_s = 0.0;
  double threshold_shift = 0.0;  // N^{-1/2} unless overridden
  Index N = 0;
  bool fallback = false;  // empty argument window; bulk-median substitute used
  std::vector<Detection> flagged;
  std::vector<Complex> unflagged_leading;

  std::string to_json() const;
};

// max_i |lambda_i| over arguments in [pi/log N, pi/2]; 0 when the window is
// empty (the report marks that case).
double lambda_max_s(const spectrum::SpectrumResult& spectrum, Index n_scale);

// Flags every stored eigenvalue with Re lambda >= lambda_max_s + shift
// (shift defaults to N^{-1/2}), merges conjugate partners and clusters closer
// than N^{-1/4}, and estimates each strength by the real part.
DetectionReport detect(const spectrum::SpectrumResult& spectrum, Index n_scale,
                       double shift_override = -1.0);

struct BaselineComparison {
  std::vector<double> sv_outliers;   // singular values above null_edge + 0.05
  std::vector<Detection> ev_detections;
  int sv_count = 0;
  int ev_count = 0;
};

// Singular-value detections of one sample against the eigenvalue rule.
BaselineComparison compare_baseline(const Matrix& h1, const spectrum::SpectrumResult& spectrum,
                                    double null_edge, Index n_scale);

}  // namespace asymdet::detector
