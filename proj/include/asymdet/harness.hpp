#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "asymdet/core.hpp"
#include "asymdet/detector.hpp"
#include "asymdet/model.hpp"
#include "asymdet/theory.hpp"

namespace asymdet::harness {

// Runs fn(0..count-1) on a small pool; ASYMSPEC_THREADS caps the width.
// Work items must be independent; results keyed by index stay deterministic
// under any schedule.
void parallel_for(Index count, const std::function<void(Index)>& fn);

struct TrialRecord {
  Index index = 0;
  std::vector<Complex> leading_lambdas;  // up to 20
  detector::DetectionReport report;
  std::vector<double> baseline_leading;  // up to 20 singular values
  double wall_ms = 0.0;
};

struct SignalStat {
  double d = 0.0;
  bool supercritical = false;
  double detection_rate = 0.0;
  double bias = 0.0;       // mean(Re lambda - d)
  double variance = 0.0;   // sample variance of Re lambda
  double median_abs_err = 0.0;
};

struct ExperimentSummary {
  std::string name;
  std::string config_digest;
  Index trials = 0;
  std::vector<SignalStat> signals;
  std::map<std::string, double> metrics;  // scalar results and theory predictions
  std::string to_json() const;
};

// Detection-rate study against the first-order outlier locations.
ExperimentSummary run_first_order(const model::ExperimentConfig& config,
                                  std::vector<TrialRecord>* records = nullptr);

// Fluctuation of one outlier against the kernel-sum variance prediction.
ExperimentSummary run_second_order(const model::ExperimentConfig& config, Index signal_index);

// Singular-value false alarms versus eigenvalue detections.
ExperimentSummary run_heavy_tail_comparison(const model::ExperimentConfig& config);

// Outliers of an iid square matrix plus a diagonal low-rank shift.
ExperimentSummary run_iid_outlier(Index n, const std::vector<double>& c_values, Index trials,
                                  std::uint64_t seed, double outer_radius = 1.1,
                                  double match_tol = 0.15);

// Moments of Tr(X^k) for the null block linearization. Odd powers vanish
// identically (odd powers of the block matrix have zero diagonal blocks), so
// only even powers need sampling.
ExperimentSummary run_trace_moments(Index p, Index n, Index k_max, Index trials,
                                    std::uint64_t seed);

// Median |u^T (G(z)+1/z) v| across a dimension grid and its log-log slope.
ExperimentSummary run_qf_scaling(const std::vector<Index>& n_grid, Index trials,
                                 std::uint64_t seed);

// One seeded trial at a simulation-study configuration; writes ev.csv,
// sv.csv, ev.svg, sv.svg into out_dir.
// Names: gaussian_iid | gaussian_iid_multiple | gaussian_general | heavy_iid.
ExperimentSummary reproduce_figure(const std::string& name, const std::string& out_dir);

// The configuration behind each figure name (also used by tests).
model::ExperimentConfig figure_config(const std::string& name);

}  // namespace asymdet::harness
