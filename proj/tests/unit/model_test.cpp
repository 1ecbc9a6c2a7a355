#include <doctest.h>

#include "asymdet/linalg.hpp"
#include "asymdet/model.hpp"

using namespace asymdet;
namespace md = asymdet::model;

TEST_CASE("sigma_matrix: rank zero is the identity") {
  const md::SigmaSpec spec = md::SigmaSpec::identity(5);
  CHECK((md::sigma_matrix(spec, 5) - Matrix::Identity(5, 5)).norm() == 0.0);
  CHECK(md::sigma_max(spec, 5) == 1.0);
}

TEST_CASE("sigma_matrix: standard-basis spikes give a diagonal") {
  Vector s(2);
  s << 3, 2;
  const md::SigmaSpec spec = md::SigmaSpec::standard_basis(6, s);
  const Matrix sig = md::sigma_matrix(spec, 6);
  Matrix expect = Matrix::Identity(6, 6);
  expect(0, 0) = 4;
  expect(1, 1) = 3;
  CHECK((sig - expect).norm() < 1e-14);
  CHECK(md::sigma_max(spec, 6) == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("sigma_matrix: off-diagonal spike against the power-iteration oracle") {
  Vector s(1);
  s << 2;
  Matrix xi = Matrix::Zero(5, 1), th = Matrix::Zero(5, 1);
  xi(0, 0) = 1;
  th(1, 0) = 1;
  const md::SigmaSpec spec(s, xi, th);
  const Matrix sig = md::sigma_matrix(spec, 5);
  Matrix expect = Matrix::Identity(5, 5);
  expect(0, 1) = 2;
  CHECK((sig - expect).norm() < 1e-14);
  CHECK(md::sigma_max(spec, 5) == doctest::Approx(linalg::op_norm(sig)).epsilon(1e-12));
}

TEST_CASE("sigma validation: inverse norm cap") {
  // Sigma = I - (1 - 1/K') e1 e1^T has inverse norm K'; K' = 40 exceeds the cap.
  Vector s(1);
  s << 1.0 - 1.0 / 40.0;
  Matrix xi = Matrix::Zero(4, 1);
  xi(0, 0) = 1;
  Matrix th = -xi;
  CHECK_THROWS(md::SigmaSpec(s, xi, th));
}

TEST_CASE("sigma scale warning fires above n^{1/4}") {
  Vector s(1);
  s << 5.0;
  const md::SigmaSpec spec = md::SigmaSpec::standard_basis(8, s);
  CHECK(spec.scale_warning(100).has_value());      // 100^{1/4} ~ 3.16 < 5
  CHECK(!spec.scale_warning(100000).has_value());  // 100000^{1/4} ~ 17.8 > 5
}

TEST_CASE("signal_matrix: k = 0 gives the zero matrix") {
  const md::SignalSpec spec(Vector(), Matrix(4, 0), Matrix(6, 0));
  CHECK(md::signal_matrix(spec).norm() == 0.0);
}

TEST_CASE("signal_matrix: simulation-study planting hits exactly (3,4),(4,5),(5,6)") {
  const md::SignalSpec spec = md::standard_basis_signal(10, 12, {1.5, 1.2, 0.5});
  const Matrix s = md::signal_matrix(spec);
  int nonzeros = 0;
  for (Index i = 0; i < s.rows(); ++i)
    for (Index j = 0; j < s.cols(); ++j)
      if (s(i, j) != 0.0) ++nonzeros;
  CHECK(nonzeros == 3);
  // 1-indexed (3,4),(4,5),(5,6)
  CHECK(s(2, 3) == doctest::Approx(1.5));
  CHECK(s(3, 4) == doctest::Approx(1.2));
  CHECK(s(4, 5) == doctest::Approx(0.5));
}

TEST_CASE("signal_matrix: singular values recover the strengths") {
  const md::SignalSpec spec = md::standard_basis_signal(15, 20, {2.0, 1.0, 0.25});
  const Vector sv = linalg::svd_values(md::signal_matrix(spec));
  CHECK(sv[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sv[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sv[2] == doctest::Approx(0.25).epsilon(1e-12));
  for (Index i = 3; i < sv.size(); ++i) CHECK(sv[i] < 1e-12);
}

TEST_CASE("standard_basis_signal: dimension guard") {
  CHECK_THROWS(md::standard_basis_signal(8, 8, {1.0, 0.9, 0.8}));
}

TEST_CASE("SignalSpec validation") {
  SUBCASE("rejects clearly non-orthonormal vectors") {
    Matrix u = Matrix::Zero(5, 2);
    u(0, 0) = 1;
    u(0, 1) = 1;  // duplicate direction
    Matrix v = Matrix::Identity(6, 2);
    Vector d(2);
    d << 1, 0.5;
    CHECK_THROWS(md::SignalSpec(d, u, v));
  }
  SUBCASE("repairs small rounding and preserves intent") {
    Matrix u = Matrix::Identity(5, 2);
    u(2, 0) = 1e-7;  // Gram deviation ~1e-7, inside the repair band
    Matrix v = Matrix::Identity(6, 2);
    const md::SignalSpec spec(Vector::Ones(2), u, v);
    Matrix g = spec.U.transpose() * spec.U;
    g.diagonal().array() -= 1.0;
    CHECK(g.cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("rejects ascending strengths") {
    Vector d(2);
    d << 0.5, 1.0;
    CHECK_THROWS(md::SignalSpec(d, Matrix::Identity(5, 2), Matrix::Identity(6, 2)));
  }
  SUBCASE("enforces the strength cap") {
    Vector d(1);
    d << 101.0;
    CHECK_THROWS(md::SignalSpec(d, Matrix::Identity(5, 1), Matrix::Identity(6, 1)));
  }
}

TEST_CASE("NoiseDistribution: StudentT needs nu > 2") {
  CHECK_THROWS(md::NoiseDistribution::student_t(2.0));
  CHECK_THROWS(md::NoiseDistribution::student_t(1.5));
  CHECK(md::NoiseDistribution::student_t(2.2).nu == doctest::Approx(2.2));
}

TEST_CASE("VarianceProfile: zero entries rejected; blocks layout") {
  CHECK_THROWS(md::VarianceProfile(Matrix::Zero(3, 4)));
  const md::VarianceProfile t2 = md::VarianceProfile::row_blocks(8, 10, {1.0, 1.5});
  CHECK(t2.T(0, 0) == 1.0);
  CHECK(t2.T(4, 9) == 1.5);
  CHECK(t2.t_lo == 1.0);
  CHECK(t2.t_hi == 1.5);
  CHECK(!t2.is_flat());
  CHECK(md::VarianceProfile::ones(3, 3).is_flat());
}

TEST_CASE("ExperimentConfig: dimensional consistency") {
  md::ExperimentConfig cfg;
  cfg.p = 10;
  cfg.n = 14;
  cfg.profile = md::VarianceProfile::ones(10, 14);
  cfg.signal = md::standard_basis_signal(10, 14, {1.0});
  cfg.sigma = md::SigmaSpec::identity(10);
  cfg.trials = 2;
  CHECK(cfg.validate().empty());
  CHECK(cfg.detection_scale() == 24);
  cfg.n_convention = md::NConvention::N;
  CHECK(cfg.detection_scale() == 14);

  cfg.profile = md::VarianceProfile::ones(10, 13);
  CHECK_THROWS(cfg.validate());
}
