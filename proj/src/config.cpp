#include "asymdet/config.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace asymdet::config {

using nlohmann::json;

namespace {

Matrix matrix_from_json(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  require(!rows.empty() && !rows.front().empty(), "config: empty matrix literal");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    require(rows[static_cast<std::size_t>(i)].size() == static_cast<std::size_t>(m.cols()),
            "config: ragged matrix literal");
    for (Index jx = 0; jx < m.cols(); ++jx)
      m(i, jx) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(jx)];
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

model::ExperimentConfig parse_config(const std::string& json_text) {
  const json j = json::parse(json_text);
  model::ExperimentConfig cfg;
  cfg.p = j.at("p").get<Index>();
  cfg.n = j.at("n").get<Index>();

  if (j.contains("signal")) {
    const json& sig = j.at("signal");
    const auto d = sig.value("d", std::vector<double>{});
    if (d.empty()) {
      cfg.signal = model::SignalSpec(Vector(), Matrix(cfg.p, 0), Matrix(cfg.n, 0));
    } else if (sig.value("basis", "standard") == std::string("standard")) {
      cfg.signal = model::standard_basis_signal(cfg.p, cfg.n, d);
    } else {
      Vector dv = Eigen::Map<const Vector>(d.data(), static_cast<Index>(d.size()));
      cfg.signal = model::SignalSpec(dv, matrix_from_json(sig.at("U")), matrix_from_json(sig.at("V")));
    }
  } else {
    cfg.signal = model::SignalSpec(Vector(), Matrix(cfg.p, 0), Matrix(cfg.n, 0));
  }

  if (j.contains("sigma")) {
    const json& sg = j.at("sigma");
    const auto s = sg.value("sigmas", std::vector<double>{});
    if (s.empty()) {
      cfg.sigma = model::SigmaSpec::identity(cfg.p);
    } else if (sg.value("basis", "standard") == std::string("standard")) {
      Vector sv = Eigen::Map<const Vector>(s.data(), static_cast<Index>(s.size()));
      cfg.sigma = model::SigmaSpec::standard_basis(cfg.p, sv);
    } else {
      Vector sv = Eigen::Map<const Vector>(s.data(), static_cast<Index>(s.size()));
      cfg.sigma =
          model::SigmaSpec(sv, matrix_from_json(sg.at("Xi")), matrix_from_json(sg.at("Theta")));
    }
  } else {
    cfg.sigma = model::SigmaSpec::identity(cfg.p);
  }

  const json profile = j.value("profile", json("ones"));
  if (profile.is_string()) {
    require(profile.get<std::string>() == "ones", "config: unknown profile name");
    cfg.profile = model::VarianceProfile::ones(cfg.p, cfg.n, j.value("scale", 1.0));
  } else if (profile.contains("blocks")) {
    cfg.profile = model::VarianceProfile::row_blocks(cfg.p, cfg.n,
                                                     profile.at("blocks").get<std::vector<double>>());
  } else if (profile.contains("explicit")) {
    cfg.profile = model::VarianceProfile(matrix_from_json(profile.at("explicit")));
  } else {
    throw std::invalid_argument("config: profile must be \"ones\", {blocks}, or {explicit}");
  }

  const json dist = j.value("dist", json("gaussian"));
  if (dist.is_string()) {
    const std::string name = dist.get<std::string>();
    if (name == "gaussian")
      cfg.dist = model::NoiseDistribution::gaussian();
    else if (name == "rademacher")
      cfg.dist = model::NoiseDistribution::rademacher();
    else
      throw std::invalid_argument("config: unknown distribution " + name);
  } else if (dist.contains("student_t")) {
    cfg.dist = model::NoiseDistribution::student_t(dist.at("student_t").get<double>());
  } else {
    throw std::invalid_argument("config: bad dist entry");
  }

  cfg.trials = j.value("trials", Index(1));
  cfg.seed = j.value("seed", std::uint64_t(0));
  cfg.retain_components = j.value("validation", false);
  if (j.contains("truncate")) cfg.truncate_at = j.at("truncate").get<double>();
  const std::string nc = j.value("N_convention", "p+n");
  if (nc == "p+n")
    cfg.n_convention = model::NConvention::PPlusN;
  else if (nc == "n")
    cfg.n_convention = model::NConvention::N;
  else if (nc == "p")
    cfg.n_convention = model::NConvention::P;
  else
    throw std::invalid_argument("config: N_convention must be p+n, n, or p");

  if (const char* env = std::getenv("ASYMSPEC_SEED")) cfg.seed = std::strtoull(env, nullptr, 10);
  cfg.validate();
  return cfg;
}

model::ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const model::ExperimentConfig& cfg) {
  json j;
  j["p"] = cfg.p;
  j["n"] = cfg.n;
  j["signal"]["d"] = std::vector<double>(cfg.signal.d.data(), cfg.signal.d.data() + cfg.signal.k());
  j["signal"]["basis"] = "explicit";
  if (cfg.signal.k() > 0) {
    j["signal"]["U"] = matrix_to_json(cfg.signal.U);
    j["signal"]["V"] = matrix_to_json(cfg.signal.V);
  }
  j["sigma"]["sigmas"] =
      std::vector<double>(cfg.sigma.sigmas.data(), cfg.sigma.sigmas.data() + cfg.sigma.r());
  j["sigma"]["basis"] = "explicit";
  if (cfg.sigma.r() > 0) {
    j["sigma"]["Xi"] = matrix_to_json(cfg.sigma.Xi);
    j["sigma"]["Theta"] = matrix_to_json(cfg.sigma.Theta);
  }
  if (cfg.profile.is_flat()) {
    j["profile"] = "ones";
    j["scale"] = cfg.profile.t_hi;
  } else {
    j["profile"]["explicit"] = matrix_to_json(cfg.profile.T);
  }
  switch (cfg.dist.law) {
    case model::NoiseLaw::Gaussian: j["dist"] = "gaussian"; break;
    case model::NoiseLaw::Rademacher: j["dist"] = "rademacher"; break;
    case model::NoiseLaw::StudentT: j["dist"]["student_t"] = cfg.dist.nu; break;
  }
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["validation"] = cfg.retain_components;
  if (cfg.truncate_at) j["truncate"] = *cfg.truncate_at;
  j["N_convention"] = cfg.n_convention == model::NConvention::PPlusN
                          ? "p+n"
                          : (cfg.n_convention == model::NConvention::N ? "n" : "p");
  return j.dump();
}

std::string config_digest(const model::ExperimentConfig& cfg) {
  const std::string text = to_json(cfg);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace asymdet::config
