#include "asymdet/detector.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "asymdet/linalg.hpp"

namespace asymdet::detector {

namespace {

bool in_window(Complex lam, double lo) {
  const double arg = std::arg(lam);
  return arg >= lo && arg <= M_PI / 2 + 1e-15;
}

double bulk_median_magnitude(const ComplexVector& lam) {
  const Index m = lam.size();
  std::vector<double> mags;
  for (Index i = m / 2; i < m; ++i) mags.push_back(std::abs(lam[i]));
  if (mags.empty()) return 0.0;
  std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
  return mags[mags.size() / 2];
}

}  // namespace

double lambda_max_s(const spectrum::SpectrumResult& spectrum, Index n_scale) {
  require(n_scale >= 3, "lambda_max_s: N must be at least 3");
  require(spectrum.lambdas.size() > 0, "lambda_max_s: empty spectrum");
  const double lo = M_PI / std::log(static_cast<double>(n_scale));
  double best = 0.0;
  for (Index i = 0; i < spectrum.lambdas.size(); ++i)
    if (in_window(spectrum.lambdas[i], lo)) best = std::max(best, std::abs(spectrum.lambdas[i]));
  return best;
}

DetectionReport detect(const spectrum::SpectrumResult& spectrum, Index n_scale,
                       double shift_override) {
  DetectionReport report;
  report.N = n_scale;
  report.threshold_shift =
      shift_override >= 0.0 ? shift_override : 1.0 / std::sqrt(static_cast<double>(n_scale));

  const double lo = M_PI / std::log(static_cast<double>(n_scale));
  bool window_empty = true;
  for (Index i = 0; i < spectrum.lambdas.size() && window_empty; ++i)
    if (in_window(spectrum.lambdas[i], lo)) window_empty = false;

  if (window_empty) {
    // lambda_max_s = 0 would flag everything; fall back to the bulk median.
    report.fallback = true;
    report.lambda_max_s = bulk_median_magnitude(spectrum.lambdas);
  } else {
    report.lambda_max_s = lambda_max_s(spectrum, n_scale);
  }
  const double threshold = report.lambda_max_s + report.threshold_shift;

  std::vector<Complex> flagged;
  for (Index i = 0; i < spectrum.lambdas.size(); ++i)
    if (spectrum.lambdas[i].real() >= threshold) flagged.push_back(spectrum.lambdas[i]);
  std::sort(flagged.begin(), flagged.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });

  // Conjugate partners always merge; beyond that, flagged values closer than
  // N^{-1/4} collapse into one multi-strength detection.
  const double merge_tol = std::pow(static_cast<double>(n_scale), -0.25);
  std::vector<bool> used(flagged.size(), false);
  for (std::size_t i = 0; i < flagged.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    std::vector<Complex> cluster{flagged[i]};
    for (std::size_t j = i + 1; j < flagged.size(); ++j) {
      if (used[j]) continue;
      const bool conj_partner = std::abs(flagged[j] - std::conj(flagged[i])) <
                                1e-9 * (1.0 + std::abs(flagged[i]));
      bool near = conj_partner;
      for (const Complex& c : cluster)
        near = near || std::abs(flagged[j] - c) < merge_tol;
      if (near) {
        used[j] = true;
        cluster.push_back(flagged[j]);
      }
    }
    Detection det;
    det.lambda = cluster.front();
    det.multiplicity = static_cast<int>(cluster.size());
    double mean_re = 0.0;
    for (const Complex& c : cluster) mean_re += c.real();
    det.estimate = mean_re / static_cast<double>(cluster.size());
    report.flagged.push_back(det);
  }

  const Index lead = std::min<Index>(10, spectrum.lambdas.size());
  for (Index i = 0; i < lead; ++i) {
    const Complex lam = spectrum.lambdas[i];
    if (lam.real() < threshold) report.unflagged_leading.push_back(lam);
  }
  return report;
}

BaselineComparison compare_baseline(const Matrix& h1, const spectrum::SpectrumResult& spectrum,
                                    double null_edge, Index n_scale) {
  BaselineComparison cmp;
  const Vector sv = linalg::svd_values(h1);
  for (Index i = 0; i < sv.size(); ++i)
    if (sv[i] > null_edge + 0.05) cmp.sv_outliers.push_back(sv[i]);
  cmp.sv_count = static_cast<int>(cmp.sv_outliers.size());

  const DetectionReport report = detect(spectrum, n_scale);
  cmp.ev_detections = report.flagged;
  cmp.ev_count = static_cast<int>(report.flagged.size());
  return cmp;
}

std::string DetectionReport::to_json() const {
  std::ostringstream os;
  os.precision(12);
  os << "{\"lambda_max_s\":" << lambda_max_s << ",\"shift\":" << threshold_shift
     << ",\"N\":" << N << ",\"fallback\":" << (fallback ? "true" : "false") << ",\"flagged\":[";
  for (std::size_t i = 0; i < flagged.size(); ++i) {
    if (i) os << ",";
    os << "{\"re\":" << flagged[i].lambda.real() << ",\"im\":" << flagged[i].lambda.imag()
       << ",\"estimate\":" << flagged[i].estimate
       << ",\"multiplicity\":" << flagged[i].multiplicity << "}";
  }
  os << "]}";
  return os.str();
}

}  // namespace asymdet::detector
