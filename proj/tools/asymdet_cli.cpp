#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "asymdet/acceptance.hpp"
#include "asymdet/config.hpp"
#include "asymdet/detector.hpp"
#include "asymdet/harness.hpp"
#include "asymdet/io.hpp"
#include "asymdet/sampler.hpp"
#include "asymdet/spectrum.hpp"
#include "asymdet/theory.hpp"

namespace ad = asymdet;

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text << '\n';
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, int trials_override,
                 int parallel) {
  if (parallel > 0) setenv("ASYMSPEC_THREADS", std::to_string(parallel).c_str(), 1);
  ad::model::ExperimentConfig cfg = ad::config::load_config(config_path);
  for (const auto& w : cfg.validate()) std::cerr << "warning: " << w << '\n';
  if (trials_override > 0) cfg.trials = trials_override;

  std::filesystem::create_directories(out_dir);
  std::vector<ad::harness::TrialRecord> records;
  const ad::harness::ExperimentSummary summary = ad::harness::run_first_order(cfg, &records);
  write_text(out_dir + "/summary.json", summary.to_json());

  std::ofstream trials_csv(out_dir + "/trials.csv");
  trials_csv << "trial,lambda_max_s,n_flagged,wall_ms,top_estimates\n";
  trials_csv.precision(10);
  for (const auto& rec : records) {
    trials_csv << rec.index << ',' << rec.report.lambda_max_s << ',' << rec.report.flagged.size()
               << ',' << rec.wall_ms << ',';
    for (std::size_t i = 0; i < rec.report.flagged.size(); ++i) {
      if (i) trials_csv << ';';
      trials_csv << rec.report.flagged[i].estimate;
    }
    trials_csv << '\n';
  }
  std::cout << summary.to_json() << '\n';
  return 0;
}

int cmd_detect(const std::string& h1_path, const std::string& h2_path, const std::string& out_path,
               const std::string& n_convention) {
  const ad::Matrix h1 = ad::io::read_csv_matrix(h1_path);
  const ad::Matrix h2 = ad::io::read_csv_matrix(h2_path);
  if (h1.rows() != h2.rows() || h1.cols() != h2.cols())
    throw std::runtime_error("detect: H1 and H2 must have the same shape");

  ad::Index n_scale = h1.rows() + h1.cols();
  if (n_convention == "n")
    n_scale = h1.cols();
  else if (n_convention == "p")
    n_scale = h1.rows();
  else if (n_convention != "p+n")
    throw std::runtime_error("detect: --N-convention must be one of p+n|n|p");

  const ad::spectrum::SpectrumResult spec = ad::spectrum::eigs_asym(h1, h2);
  const ad::detector::DetectionReport report = ad::detector::detect(spec, n_scale);
  const std::string json = report.to_json();
  if (out_path.empty() || out_path == "-")
    std::cout << json << '\n';
  else
    write_text(out_path, json);
  return 0;
}

int cmd_theory(const std::string& config_path) {
  const ad::model::ExperimentConfig cfg = ad::config::load_config(config_path);
  const double thr = ad::theory::threshold(cfg.profile, cfg.n);
  double edge;
  if (cfg.profile.is_flat())
    edge = ad::theory::null_edge(cfg.profile, cfg.p, cfg.n, ad::theory::EdgeMethod::FlatClosedForm);
  else
    edge = ad::theory::null_edge(cfg.profile, cfg.p, cfg.n, ad::theory::EdgeMethod::MonteCarlo, 15,
                                 cfg.seed ^ 0x9e3779b9ull);

  std::ostringstream os;
  os.precision(12);
  os << "{\"threshold\":" << thr << ",\"null_edge\":" << edge;
  const double z = 1.2 * thr;
  os << ",\"dyson\":[";
  bool first = true;
  for (double eta : {1e-2, 1e-3, 1e-4}) {
    const ad::theory::DysonSolution sol = ad::theory::dyson_solve(cfg.profile, cfg.n, z, eta);
    if (!first) os << ',';
    first = false;
    os << "{\"eta\":" << eta << ",\"residual\":" << sol.residual
       << ",\"iterations\":" << sol.iterations << ",\"mean_u\":" << sol.mean_u()
       << ",\"converged\":" << (sol.converged ? "true" : "false") << "}";
  }
  os << "]";
  os << ",\"signals\":[";
  for (ad::Index i = 0; i < cfg.signal.k(); ++i) {
    if (i) os << ',';
    const double d = cfg.signal.d[i];
    os << "{\"d\":" << d;
    if (d > thr) {
      os << ",\"supercritical\":true";
      try {
        const ad::theory::FluctuationSpec fl =
            ad::theory::fluct_variance(cfg.profile, cfg.n, cfg.sigma, cfg.signal.U.col(i),
                                       cfg.signal.V.col(i), d, cfg.signal.d);
        os << ",\"var_linear\":" << fl.var_linear << ",\"var_g\":" << fl.var_g
           << ",\"var_total\":" << fl.var_total
           << ",\"outlier_variance\":" << fl.outlier_variance();
      } catch (const std::exception& e) {
        os << ",\"fluctuation_unavailable\":\"" << e.what() << "\"";
      }
    } else {
      os << ",\"supercritical\":false";
    }
    os << "}";
  }
  os << "]}";
  std::cout << os.str() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"signal detection from spiked noise via asymmetrized samples"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "run a Monte Carlo detection experiment");
  std::string sim_config, sim_out = "out";
  int sim_trials = 0, sim_parallel = 0;
  sim->add_option("--config", sim_config, "experiment config JSON")->required();
  sim->add_option("--out", sim_out, "output directory");
  sim->add_option("--trials", sim_trials, "override trial count");
  sim->add_option("--parallel", sim_parallel, "worker thread cap");

  auto* det = app.add_subcommand("detect", "detect signals from two sample matrices");
  std::string det_h1, det_h2, det_out, det_nconv = "p+n";
  det->add_option("--h1", det_h1, "first sample, dense CSV")->required();
  det->add_option("--h2", det_h2, "second sample, dense CSV")->required();
  det->add_option("--out", det_out, "report path (default stdout)");
  det->add_option("--N-convention", det_nconv, "p+n | n | p");

  auto* theo = app.add_subcommand("theory", "print threshold, null edge, Dyson and variance predictions");
  std::string theo_config;
  theo->add_option("--config", theo_config, "experiment config JSON")->required();

  auto* rep = app.add_subcommand("reproduce", "rerun a simulation-study figure");
  std::string rep_fig, rep_out = "figures";
  rep->add_option("--figure", rep_fig, "gaussian_iid | gaussian_iid_multiple | gaussian_general | heavy_iid")
      ->required();
  rep->add_option("--out", rep_out, "output directory");

  auto* chk = app.add_subcommand("check", "run acceptance suites");
  std::string chk_suite = "all";
  chk->add_option("--suite", chk_suite, "suite name (see --help-suites) or all");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_config, sim_out, sim_trials, sim_parallel);
    if (det->parsed()) return cmd_detect(det_h1, det_h2, det_out, det_nconv);
    if (theo->parsed()) return cmd_theory(theo_config);
    if (rep->parsed()) {
      const ad::harness::ExperimentSummary s = ad::harness::reproduce_figure(rep_fig, rep_out);
      std::cout << s.to_json() << '\n';
      return 0;
    }
    if (chk->parsed())
      return ad::acceptance::run_and_report(ad::acceptance::suite_criteria(chk_suite)) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
