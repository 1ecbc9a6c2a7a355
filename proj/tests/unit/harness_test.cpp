#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "asymdet/config.hpp"
#include "asymdet/harness.hpp"
#include "asymdet/io.hpp"
#include "asymdet/rng.hpp"

using namespace asymdet;
namespace hn = asymdet::harness;

namespace {

model::ExperimentConfig small_config() {
  model::ExperimentConfig cfg;
  cfg.p = 60;
  cfg.n = 150;
  cfg.trials = 6;
  cfg.seed = 4242;
  cfg.profile = model::VarianceProfile::ones(cfg.p, cfg.n);
  cfg.dist = model::NoiseDistribution::gaussian();
  cfg.sigma = model::SigmaSpec::identity(cfg.p);
  cfg.signal = model::standard_basis_signal(cfg.p, cfg.n, {2.2, 0.3});
  return cfg;
}

}  // namespace

TEST_CASE("run_first_order: detects the supercritical strength on a small config") {
  const hn::ExperimentSummary s = hn::run_first_order(small_config());
  REQUIRE(s.signals.size() == 2);
  CHECK(s.signals[0].supercritical);
  CHECK(!s.signals[1].supercritical);
  CHECK(s.signals[0].detection_rate >= 0.8);
  CHECK(s.signals[0].median_abs_err < 0.3);
  CHECK(s.metrics.at("threshold") == doctest::Approx(std::pow(0.4, 0.25)).epsilon(1e-10));
}

TEST_CASE("end-to-end determinism, serial equals parallel") {
  const model::ExperimentConfig cfg = small_config();

  setenv("ASYMSPEC_THREADS", "1", 1);
  const std::string serial = hn::run_first_order(cfg).to_json();
  setenv("ASYMSPEC_THREADS", "4", 1);
  const std::string parallel = hn::run_first_order(cfg).to_json();
  unsetenv("ASYMSPEC_THREADS");
  CHECK(serial == parallel);
  CHECK(serial == hn::run_first_order(cfg).to_json());
}

TEST_CASE("parallel_for propagates worker failures") {
  CHECK_THROWS(hn::parallel_for(8, [](Index i) {
    if (i == 5) throw std::runtime_error("boom");
  }));
}

TEST_CASE("run_second_order: sane moments on a small config") {
  model::ExperimentConfig cfg = small_config();
  cfg.signal = model::standard_basis_signal(cfg.p, cfg.n, {2.0});
  cfg.trials = 40;
  const hn::ExperimentSummary s = hn::run_second_order(cfg, 0);
  CHECK(std::abs(s.metrics.at("empirical_mean_dev")) < 0.2);
  CHECK(s.metrics.at("empirical_variance") > 0.0);
  CHECK(s.metrics.at("var_total") ==
        doctest::Approx(s.metrics.at("var_linear") + s.metrics.at("var_g") / 150.0));
  CHECK(s.metrics.at("outlier_variance") == doctest::Approx(s.metrics.at("var_total") / 4.0));
}

TEST_CASE("run_iid_outlier: strong shift found, subcritical shift not isolated") {
  const hn::ExperimentSummary s = hn::run_iid_outlier(150, {2.0, 0.5}, 8, 11);
  REQUIRE(s.signals.size() == 2);
  CHECK(s.signals[0].detection_rate >= 0.75);  // |nearest - 2| <= 0.15 at n = 150
  CHECK(s.metrics.at("outer_radius") == doctest::Approx(1.1));
}

TEST_CASE("run_trace_moments: odd powers vanish, even powers sampled") {
  const hn::ExperimentSummary s = hn::run_trace_moments(40, 100, 5, 30, 5);
  CHECK(s.metrics.at("mean_k1") == 0.0);
  CHECK(s.metrics.at("mean_k3") == 0.0);
  CHECK(s.metrics.at("mean_k5") == 0.0);
  CHECK(s.metrics.at("var_k2") > 0.0);
  CHECK(s.metrics.at("stated_limit_k4") == doctest::Approx(2.0 * 0.16));
  CHECK(s.metrics.at("exact_mean_k4") == doctest::Approx(0.8));
}

TEST_CASE("run_qf_scaling: slope is near -1/2 on a small grid") {
  const hn::ExperimentSummary s = hn::run_qf_scaling({100, 200, 400}, 120, 15);
  CHECK(s.metrics.at("slope_orth") < -0.25);
  CHECK(s.metrics.at("slope_orth") > -0.75);
}

TEST_CASE("run_heavy_tail_comparison: truncation knocks out singular-value spikes") {
  model::ExperimentConfig cfg;
  cfg.p = 400;
  cfg.n = 1000;
  cfg.trials = 8;
  cfg.seed = 555;
  cfg.profile = model::VarianceProfile::ones(cfg.p, cfg.n);
  cfg.dist = model::NoiseDistribution::student_t(2.2);
  cfg.sigma = model::SigmaSpec::identity(cfg.p);
  cfg.signal = model::SignalSpec(Vector(), Matrix(cfg.p, 0), Matrix(cfg.n, 0));

  const hn::ExperimentSummary raw = hn::run_heavy_tail_comparison(cfg);
  cfg.truncate_at = 50.0;
  const hn::ExperimentSummary trunc = hn::run_heavy_tail_comparison(cfg);
  CHECK(raw.metrics.at("median_sv_outliers") >= 2.0);
  CHECK(trunc.metrics.at("median_sv_outliers") < raw.metrics.at("median_sv_outliers"));
}

TEST_CASE("reproduce_figure: deterministic files with the expected flags") {
  const std::string dir = std::filesystem::temp_directory_path() / "asymdet_fig_test";
  std::filesystem::remove_all(dir);
  const hn::ExperimentSummary s = hn::reproduce_figure("gaussian_iid", dir);
  CHECK(s.metrics.at("flagged") == doctest::Approx(2.0));

  const auto slurp = [](const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  };
  const std::string ev_first = slurp(dir + "/ev.csv");
  CHECK(ev_first.find("index,re,im,magnitude,arg,flagged") == 0);
  // two flagged rows
  int flagged_rows = 0;
  std::istringstream lines(ev_first);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line))
    if (line.size() > 2 && line.substr(line.size() - 2) == ",1") ++flagged_rows;
  CHECK(flagged_rows == 2);

  hn::reproduce_figure("gaussian_iid", dir);
  CHECK(slurp(dir + "/ev.csv") == ev_first);  // byte-identical rerun
  CHECK(std::filesystem::exists(dir + "/sv.svg"));
  CHECK(std::filesystem::exists(dir + "/ev.svg"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("figure_config: heavy-tail variant swaps distribution and spikes") {
  const model::ExperimentConfig cfg = hn::figure_config("heavy_iid");
  CHECK(cfg.dist.law == model::NoiseLaw::StudentT);
  CHECK(cfg.sigma.r() == 0);
  CHECK_THROWS(hn::figure_config("nonexistent"));
}

TEST_CASE("config JSON round trip") {
  const std::string text = R"({
    "p": 40, "n": 100,
    "signal": {"d": [1.5, 0.5], "basis": "standard"},
    "sigma": {"sigmas": [2.0], "basis": "standard"},
    "profile": {"blocks": [1.0, 1.5]},
    "dist": {"student_t": 2.5},
    "trials": 3, "seed": 17, "N_convention": "n"
  })";
  const model::ExperimentConfig cfg = config::parse_config(text);
  CHECK(cfg.p == 40);
  CHECK(cfg.signal.k() == 2);
  CHECK(cfg.sigma.r() == 1);
  CHECK(cfg.profile.t_hi == 1.5);
  CHECK(cfg.dist.nu == doctest::Approx(2.5));
  CHECK(cfg.detection_scale() == 100);

  const model::ExperimentConfig back = config::parse_config(config::to_json(cfg));
  CHECK(back.p == cfg.p);
  CHECK((back.signal.U - cfg.signal.U).norm() < 1e-14);
  CHECK((back.profile.T - cfg.profile.T).norm() < 1e-14);
  CHECK(config::config_digest(back) == config::config_digest(cfg));
}

TEST_CASE("config: seed override from the environment") {
  setenv("ASYMSPEC_SEED", "987", 1);
  const model::ExperimentConfig cfg =
      config::parse_config(R"({"p":10,"n":14,"trials":1,"seed":5})");
  unsetenv("ASYMSPEC_SEED");
  CHECK(cfg.seed == 987);
}

TEST_CASE("csv matrix round trip") {
  RngStream s(33);
  Matrix m(5, 7);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 7; ++j) m(i, j) = 2.0 * s.next_u01() - 1.0;
  const std::string path = std::filesystem::temp_directory_path() / "asymdet_csv_test.csv";
  io::write_csv_matrix(path, m);
  const Matrix back = io::read_csv_matrix(path);
  CHECK((m - back).norm() == 0.0);
  std::filesystem::remove(path);
}
