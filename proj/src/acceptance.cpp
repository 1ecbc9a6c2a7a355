#include "asymdet/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>

#include "asymdet/config.hpp"
#include "asymdet/detector.hpp"
#include "asymdet/harness.hpp"
#include "asymdet/linalg.hpp"
#include "asymdet/rng.hpp"
#include "asymdet/sampler.hpp"
#include "asymdet/spectrum.hpp"
#include "asymdet/theory.hpp"

namespace asymdet::acceptance {

namespace {

using model::ExperimentConfig;
using model::NoiseDistribution;
using model::SigmaSpec;
using model::VarianceProfile;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

ExperimentConfig detection_study_config() {
  ExperimentConfig cfg;
  cfg.p = 800;
  cfg.n = 2000;
  cfg.trials = 20;
  cfg.seed = 101;
  cfg.profile = VarianceProfile::ones(cfg.p, cfg.n);
  cfg.dist = NoiseDistribution::gaussian();
  Vector sig(2);
  sig << 3.0, 2.0;
  cfg.sigma = SigmaSpec::standard_basis(cfg.p, sig);
  cfg.signal = model::standard_basis_signal(cfg.p, cfg.n, {1.5, 1.2, 0.5});
  cfg.retain_components = true;
  return cfg;
}

struct DetectionStudy {
  harness::ExperimentSummary summary;
  double max_secular = 0.0;  // |secular determinant| over all flagged outliers
  int flagged_total = 0;
};

// Criteria 1 and 10 share the same twenty trials; computed once.
const DetectionStudy& detection_study() {
  static const DetectionStudy study = [] {
    const ExperimentConfig cfg = detection_study_config();
    DetectionStudy out;
    std::vector<harness::TrialRecord> records;
    out.summary = harness::run_first_order(cfg, &records);

    for (const auto& rec : records) {
      const sampler::SamplePair pair = sampler::assemble_pair(cfg, rec.index);
      const Matrix n1 = pair.H1 - *pair.S;
      const Matrix n2 = pair.H2 - *pair.S;
      for (const auto& det : rec.report.flagged) {
        const Complex s = theory::secular_value_blocks(n1, n2, cfg.signal, det.lambda);
        out.max_secular = std::max(out.max_secular, std::abs(s));
        ++out.flagged_total;
      }
    }
    return out;
  }();
  return study;
}

CriterionResult criterion1() {
  CriterionResult r{1, "first-order detection", false, ""};
  const DetectionStudy& study = detection_study();
  const auto& sig = study.summary.signals;
  const double rate1 = sig[0].detection_rate;
  const double rate2 = sig[1].detection_rate;
  const double med1 = sig[0].median_abs_err;
  const double med2 = sig[1].median_abs_err;
  const double extra_rate = study.summary.metrics.at("extra_trial_rate");
  const double bound = study.summary.metrics.at("first_order_bound");

  const bool rates_ok = rate1 == 1.0 && rate2 == 1.0;
  const bool extras_ok = extra_rate <= 0.05;
  const bool bound_ok = med1 <= bound && med2 <= bound;
  const bool practical_ok = med1 <= 0.1 && med2 <= 0.1;
  r.pass = rates_ok && extras_ok && bound_ok && practical_ok;
  r.detail = "rate(d1)=" + fmt(rate1) + " rate(d2)=" + fmt(rate2) +
             " extra_trial_rate=" + fmt(extra_rate) + " (<=0.05)" +
             " med|l1-d1|=" + fmt(med1) + " med|l2-d2|=" + fmt(med2) + " bound=" + fmt(bound) +
             " practical<=0.1";
  return r;
}

CriterionResult criterion2() {
  CriterionResult r{2, "null calibration", false, ""};
  ExperimentConfig cfg;
  cfg.p = 200;
  cfg.n = 500;
  cfg.trials = 100;
  cfg.seed = 202;
  cfg.profile = VarianceProfile::ones(cfg.p, cfg.n);
  cfg.dist = NoiseDistribution::gaussian();
  cfg.signal = model::SignalSpec(Vector(), Matrix(cfg.p, 0), Matrix(cfg.n, 0));
  cfg.sigma = SigmaSpec::identity(cfg.p);

  const double edge =
      theory::null_edge(cfg.profile, cfg.p, cfg.n, theory::EdgeMethod::FlatClosedForm);

  auto run_null = [&](const ExperimentConfig& c, int& zero_flag, int& sv_hit) {
    std::vector<int> flags(static_cast<std::size_t>(c.trials));
    std::vector<int> svs(static_cast<std::size_t>(c.trials));
    harness::parallel_for(c.trials, [&](Index t) {
      const sampler::SamplePair pair = sampler::assemble_pair(c, t);
      const spectrum::SpectrumResult spec = spectrum::eigs_asym(pair.H1, pair.H2);
      const detector::BaselineComparison cmp =
          detector::compare_baseline(pair.H1, spec, edge, c.detection_scale());
      flags[static_cast<std::size_t>(t)] = cmp.ev_count;
      svs[static_cast<std::size_t>(t)] = cmp.sv_count;
    });
    zero_flag = 0;
    sv_hit = 0;
    for (Index t = 0; t < c.trials; ++t) {
      if (flags[static_cast<std::size_t>(t)] == 0) ++zero_flag;
      if (svs[static_cast<std::size_t>(t)] >= 1) ++sv_hit;
    }
  };

  int zero_plain = 0, sv_plain = 0;
  run_null(cfg, zero_plain, sv_plain);

  // Spiked null: sigma unspecified by the study definition; chosen small
  // enough that sigma_max^2 stays well under sqrt(n) at n = 500 while the
  // singular-value spike remains clearly supercritical.
  ExperimentConfig spiked = cfg;
  spiked.seed = 203;
  Vector sig(2);
  sig << 1.0, 0.5;
  spiked.sigma = SigmaSpec::standard_basis(cfg.p, sig);
  int zero_spiked = 0, sv_spiked = 0;
  run_null(spiked, zero_spiked, sv_spiked);

  const bool ok_plain = zero_plain >= 95;
  const bool ok_spiked = zero_spiked >= 95;
  const bool ok_sv = sv_spiked >= 90;
  r.pass = ok_plain && ok_spiked && ok_sv;
  r.detail = "zero-flag: plain " + std::to_string(zero_plain) + "/100, spiked " +
             std::to_string(zero_spiked) + "/100 (>=95); spiked SV outlier " +
             std::to_string(sv_spiked) + "/100 (>=90)";
  return r;
}

CriterionResult criterion3() {
  CriterionResult r{3, "second-order variance", false, ""};
  ExperimentConfig cfg;
  cfg.p = 400;
  cfg.n = 1000;
  cfg.trials = 500;
  cfg.seed = 303;
  cfg.profile = VarianceProfile::ones(cfg.p, cfg.n);
  cfg.dist = NoiseDistribution::gaussian();
  cfg.sigma = SigmaSpec::identity(cfg.p);
  cfg.signal = model::standard_basis_signal(cfg.p, cfg.n, {1.5});

  const harness::ExperimentSummary s = harness::run_second_order(cfg, 0);
  const double var_emp = s.metrics.at("empirical_variance");
  const double predicted = s.metrics.at("outlier_variance");
  const double ratio = s.metrics.at("ratio_to_outlier_variance");
  const double mean_dev = s.metrics.at("empirical_mean_dev");
  const double bias_tol =
      3.0 * std::sqrt(predicted / static_cast<double>(cfg.trials)) + 0.5 / static_cast<double>(cfg.n);

  // Rank-one closed form for the flat profile, the oracle for the kernel path:
  // terms 1+3 give (1+c)/(d^2(1-c/d^4)), the mixed term adds 2c/(d^4(1-c/d^4)).
  const double c = 0.4, d = 1.5;
  const double denom = 1.0 - c / std::pow(d, 4);
  const double var_g_oracle =
      (1.0 + c) / (d * d * denom) + 2.0 * c / (std::pow(d, 4) * denom);
  const double var_g = s.metrics.at("var_g");

  const bool ratio_ok = ratio >= 0.8 && ratio <= 1.25;
  const bool bias_ok = std::abs(mean_dev) <= bias_tol;
  const bool oracle_ok = std::abs(var_g - var_g_oracle) <= 1e-8 * var_g_oracle;
  r.pass = ratio_ok && bias_ok && oracle_ok;
  r.detail = "Var(l1-d1)=" + fmt(var_emp) + " predicted=" + fmt(predicted) +
             " ratio=" + fmt(ratio) + " (in [0.8,1.25]); literal var_total=" +
             fmt(s.metrics.at("var_total")) + " ratio " + fmt(s.metrics.at("ratio_to_var_total")) +
             "; |bias|=" + fmt(std::abs(mean_dev)) + " (<=" + fmt(bias_tol) +
             "); var_g kernel vs rank-1 oracle " + fmt(var_g) + " vs " + fmt(var_g_oracle);
  return r;
}

CriterionResult criterion4() {
  CriterionResult r{4, "heavy-tail contrast", false, ""};
  ExperimentConfig cfg;
  cfg.p = 800;
  cfg.n = 2000;
  cfg.trials = 20;
  cfg.seed = 404;
  cfg.profile = VarianceProfile::ones(cfg.p, cfg.n);
  cfg.dist = NoiseDistribution::student_t(2.2);
  cfg.sigma = SigmaSpec::identity(cfg.p);
  cfg.signal = model::standard_basis_signal(cfg.p, cfg.n, {1.5, 1.2});

  const harness::ExperimentSummary s = harness::run_heavy_tail_comparison(cfg);
  const double med_sv = s.metrics.at("median_sv_outliers");
  const double med_ev = s.metrics.at("median_ev_detections");
  const double rate1 = s.signals[0].detection_rate;
  const double rate2 = s.signals[1].detection_rate;

  r.pass = med_sv >= 5.0 && med_ev == 2.0 && rate1 >= 0.8 && rate2 >= 0.8;
  r.detail = "median SV outliers=" + fmt(med_sv) + " (>=5), median EV detections=" + fmt(med_ev) +
             " (==2), rates=" + fmt(rate1) + "/" + fmt(rate2) + " (>=0.8)";
  return r;
}

CriterionResult criterion5() {
  CriterionResult r{5, "iid outlier", false, ""};
  const harness::ExperimentSummary s = harness::run_iid_outlier(1000, {2.0}, 50, 505);
  const double near_rate = s.signals[0].detection_rate;
  const double clean_rate = s.metrics.at("clean_radius_rate");
  r.pass = near_rate >= 0.9 && clean_rate >= 0.9;
  r.detail = "nearest-to-2 within 0.15: " + fmt(near_rate) + " (>=0.9); all others inside 1.1: " +
             fmt(clean_rate) + " (>=0.9); median dist=" + fmt(s.signals[0].median_abs_err);
  return r;
}

CriterionResult criterion6() {
  CriterionResult r{6, "trace moments", false, ""};
  const harness::ExperimentSummary s = harness::run_trace_moments(400, 1000, 7, 200, 606);
  const double m4 = s.metrics.at("mean_k4");
  const double v2 = s.metrics.at("var_k2");
  bool odd_ok = true;
  for (int k : {1, 3, 5, 7}) odd_ok = odd_ok && std::abs(s.metrics.at("mean_k" + std::to_string(k))) <= 0.05;

  const bool m4_ok = std::abs(m4 - 0.32) <= 0.05;
  const bool v2_ok = v2 >= 0.3 && v2 <= 0.5;
  r.pass = m4_ok && odd_ok && v2_ok;
  r.detail = "mean TrX^4=" + fmt(m4) + " (window 0.32+-0.05; exact finite-n mean is 2p/n=" +
             fmt(s.metrics.at("exact_mean_k4")) + "); odd means zero: " + (odd_ok ? "yes" : "no") +
             "; Var TrX^2=" + fmt(v2) + " (window 0.4+-25%; exact finite-n variance is 4p/n=" +
             fmt(s.metrics.at("exact_var_k2")) + ")";
  return r;
}

CriterionResult criterion7() {
  CriterionResult r{7, "Dyson solver", false, ""};
  bool ok = true;
  std::ostringstream detail;
  for (const char* name : {"flat", "blocks"}) {
    const VarianceProfile profile =
        std::string(name) == "flat" ? VarianceProfile::ones(800, 2000)
                                    : VarianceProfile::row_blocks(800, 2000, {1.0, 1.5});
    const double z = 1.2 * theory::threshold(profile, 2000);
    double prev_ratio = -1.0;
    for (double eta : {1e-2, 1e-3, 1e-4}) {
      const theory::DysonSolution sol = theory::dyson_solve(profile, 2000, z, eta);
      const double balance = std::abs(sol.mean_u() - sol.mean_v());
      const double ratio = sol.max_component() / eta;
      const bool positive = sol.u1.minCoeff() > 0 && sol.u2.minCoeff() > 0 &&
                            sol.v1.minCoeff() > 0 && sol.v2.minCoeff() > 0;
      bool step_ok = sol.converged && sol.residual < 1e-12 && positive && balance <= 1e-8;
      if (prev_ratio > 0 && !(ratio / prev_ratio < 1.5)) step_ok = false;
      ok = ok && step_ok;
      if (eta == 1e-4)
        detail << name << ": res=" << fmt(sol.residual) << " iters=" << sol.iterations
               << " maxu/eta=" << fmt(ratio) << " bal=" << fmt(balance) << "; ";
      prev_ratio = ratio;
    }
  }
  r.pass = ok;
  r.detail = detail.str() + "residual<1e-12, positive, balanced, bounded u/eta";
  return r;
}

CriterionResult criterion8() {
  CriterionResult r{8, "quadratic-form scaling", false, ""};
  const harness::ExperimentSummary s = harness::run_qf_scaling({100, 200, 400, 800}, 200, 808);
  const double slope = s.metrics.at("slope_orth");
  r.pass = slope >= -0.65 && slope <= -0.35;
  r.detail = "log-log slope=" + fmt(slope) + " (in [-0.65,-0.35]); same-direction slope=" +
             fmt(s.metrics.at("slope_same"));
  return r;
}

CriterionResult criterion9() {
  CriterionResult r{9, "determinant identity", false, ""};
  RngStream root(909);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index dim = 1 + static_cast<Index>(trial % 6);
    RngStream s = root.child(static_cast<std::uint64_t>(trial));
    Matrix a(dim, dim), b(dim, dim);
    for (Index i = 0; i < dim; ++i)
      for (Index j = 0; j < dim; ++j) {
        a(i, j) = 2.0 * s.next_u01() - 1.0;
        b(i, j) = 2.0 * s.next_u01() - 1.0;
      }
    const double direct = (a + b).determinant();
    const double expanded = theory::det_sum_expansion(a, b);
    worst = std::max(worst, std::abs(direct - expanded));
  }
  r.pass = worst <= 1e-9;
  r.detail = "max |det(A+B) - expansion| = " + fmt(worst) + " over 200 pairs, dims 1-6 (<=1e-9)";
  return r;
}

CriterionResult criterion10() {
  CriterionResult r{10, "secular-equation certification", false, ""};
  const DetectionStudy& study = detection_study();
  r.pass = study.flagged_total > 0 && study.max_secular < 1e-6;
  r.detail = "max |secular| = " + fmt(study.max_secular) + " over " +
             std::to_string(study.flagged_total) + " flagged outliers (<1e-6)";
  return r;
}

CriterionResult criterion11() {
  CriterionResult r{11, "eigenvector projection", false, ""};
  ExperimentConfig cfg;
  cfg.p = 200;
  cfg.n = 500;
  cfg.trials = 20;
  cfg.seed = 1111;
  cfg.profile = VarianceProfile::ones(cfg.p, cfg.n);
  cfg.dist = NoiseDistribution::gaussian();
  cfg.sigma = SigmaSpec::identity(cfg.p);
  cfg.signal = model::standard_basis_signal(cfg.p, cfg.n, {1.5, 1.0});

  ComplexVector a(cfg.p + cfg.n);
  a.setZero();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  a.head(cfg.p) = (cfg.signal.U.col(0) * inv_sqrt2).cast<Complex>();
  a.tail(cfg.n) = (cfg.signal.V.col(0) * inv_sqrt2).cast<Complex>();

  std::vector<double> errs(static_cast<std::size_t>(cfg.trials));
  harness::parallel_for(cfg.trials, [&](Index t) {
    const sampler::SamplePair pair = sampler::assemble_pair(cfg, t);
    const spectrum::SpectrumResult spec = spectrum::eigs_asym(pair.H1, pair.H2, 2);
    // lambda_1 is the leading stored eigenvalue; its projection should be
    // near <a, P_1 a> = 1 for a = w_1.
    const Complex proj = spectrum::eigvec_projection(spec, {0}, a);
    errs[static_cast<std::size_t>(t)] = std::abs(proj - Complex(1.0, 0.0));
  });
  std::nth_element(errs.begin(), errs.begin() + errs.size() / 2, errs.end());
  const double med = errs[errs.size() / 2];

  const double delta1 = 1.5 - 1.0;  // gap to d2
  const double sig_max = 1.0;
  const double tol = (1.0 / delta1) * std::pow(500.0, -0.4) * sig_max * sig_max;
  r.pass = med <= tol;
  r.detail = "median |<a,P~a>-1| = " + fmt(med) + " (<= " + fmt(tol) + ")";
  return r;
}

}  // namespace

CriterionResult run_criterion(int id) {
  switch (id) {
    case 1: return criterion1();
    case 2: return criterion2();
    case 3: return criterion3();
    case 4: return criterion4();
    case 5: return criterion5();
    case 6: return criterion6();
    case 7: return criterion7();
    case 8: return criterion8();
    case 9: return criterion9();
    case 10: return criterion10();
    case 11: return criterion11();
    default: throw std::invalid_argument("unknown criterion id");
  }
}

std::vector<int> suite_criteria(const std::string& suite) {
  static const std::map<std::string, std::vector<int>> table = {
      {"first_order", {1, 10}},   {"null_calibration", {2}}, {"second_order", {3}},
      {"heavy_tail", {4}},        {"iid_outlier", {5}},      {"trace", {6}},
      {"dyson", {7}},             {"qf", {8}},               {"det_identity", {9}},
      {"eigenvector", {11}},      {"all", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}},
  };
  const auto it = table.find(suite);
  if (it == table.end()) throw std::invalid_argument("unknown suite: " + suite);
  return it->second;
}

std::vector<std::string> suite_names() {
  return {"first_order", "second_order", "heavy_tail", "iid_outlier", "trace",
          "qf",          "dyson",        "det_identity", "null_calibration", "eigenvector", "all"};
}

bool run_and_report(const std::vector<int>& ids) {
  bool all = true;
  for (int id : ids) {
    const CriterionResult r = run_criterion(id);
    std::printf("%s — criterion %d (%s): %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.detail.c_str());
    std::fflush(stdout);
    all = all && r.pass;
  }
  return all;
}

}  // namespace asymdet::acceptance
