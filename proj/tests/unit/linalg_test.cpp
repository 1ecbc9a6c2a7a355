#include <doctest.h>

#include <algorithm>
#include <complex>
#include <vector>

#include "asymdet/linalg.hpp"
#include "asymdet/rng.hpp"

using namespace asymdet;
namespace la = asymdet::linalg;

namespace {

Matrix seeded_matrix(Index rows, Index cols, std::uint64_t seed) {
  RngStream s(seed);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = 2.0 * s.next_u01() - 1.0;
  return m;
}

// Characteristic polynomial coefficients by Faddeev-LeVerrier (trace
// recursion), then roots by Durand-Kerner. Independent of any Schur-based
// eigensolver.
std::vector<Complex> char_poly_roots(const Matrix& m) {
  const Index n = m.rows();
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[0] = 1.0;
  std::vector<double> power_trace(static_cast<std::size_t>(n) + 1, 0.0);
  Matrix pw = Matrix::Identity(n, n);
  for (Index k = 1; k <= n; ++k) {
    pw = pw * m;
    power_trace[static_cast<std::size_t>(k)] = pw.trace();
  }
  // Newton identities: k c_k = -(c_{k-1} s_1 + ... + c_0 s_k).
  for (Index k = 1; k <= n; ++k) {
    double ck = 0.0;
    for (Index j = 1; j <= k; ++j)
      ck -= c[static_cast<std::size_t>(k - j)] * power_trace[static_cast<std::size_t>(j)];
    c[static_cast<std::size_t>(k)] = ck / static_cast<double>(k);
  }
  // p(x) = x^n + c1 x^{n-1} + ... + cn; Durand-Kerner from spread starts.
  std::vector<Complex> roots(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    roots[static_cast<std::size_t>(i)] = std::pow(Complex(0.4, 0.9), static_cast<double>(i));
  auto eval = [&](Complex x) {
    Complex v = 1.0;
    for (Index k = 1; k <= n; ++k) v = v * x + c[static_cast<std::size_t>(k)];
    return v;
  };
  for (int it = 0; it < 500; ++it) {
    double moved = 0.0;
    for (Index i = 0; i < n; ++i) {
      Complex denom = 1.0;
      for (Index j = 0; j < n; ++j)
        if (j != i)
          denom *= roots[static_cast<std::size_t>(i)] - roots[static_cast<std::size_t>(j)];
      const Complex delta = eval(roots[static_cast<std::size_t>(i)]) / denom;
      roots[static_cast<std::size_t>(i)] -= delta;
      moved = std::max(moved, std::abs(delta));
    }
    if (moved < 1e-14) break;
  }
  return roots;
}

double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (const Complex& x : a) {
    double best = 1e300;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (std::abs(x - b[j]) < best) {
        best = std::abs(x - b[j]);
        arg = j;
      }
    }
    worst = std::max(worst, best);
    b.erase(b.begin() + static_cast<std::ptrdiff_t>(arg));
  }
  return worst;
}

}  // namespace

TEST_CASE("eig_general: identity") {
  const auto pairs = la::eig_general(Matrix::Identity(3, 3), false);
  for (const auto& p : pairs) CHECK(std::abs(p.value - Complex(1, 0)) < 1e-12);
}

TEST_CASE("eig_general: 2x2 antidiagonal has eigenvalues +-sqrt(ab)") {
  Matrix m(2, 2);
  m << 0, 2, 8, 0;
  auto pairs = la::eig_general(m, false);
  std::vector<double> vals{pairs[0].value.real(), pairs[1].value.real()};
  std::sort(vals.begin(), vals.end());
  CHECK(vals[0] == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(vals[1] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(std::abs(pairs[0].value.imag()) < 1e-12);
}

TEST_CASE("eig_general: random 4x4 matches characteristic polynomial roots") {
  const Matrix m = seeded_matrix(4, 4, 42);
  const auto pairs = la::eig_general(m, false);
  std::vector<Complex> got;
  for (const auto& p : pairs) got.push_back(p.value);
  CHECK(multiset_distance(got, char_poly_roots(m)) < 1e-8);
}

TEST_CASE("eig_general: conjugation closure of real spectra") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const Matrix m = seeded_matrix(7, 7, seed);
    const auto pairs = la::eig_general(m, false);
    std::vector<Complex> vals, conj_vals;
    for (const auto& p : pairs) {
      vals.push_back(p.value);
      conj_vals.push_back(std::conj(p.value));
    }
    CHECK(multiset_distance(vals, conj_vals) < 1e-8);
  }
}

TEST_CASE("eig_general: biorthogonal left/right vectors") {
  const Matrix m = seeded_matrix(6, 6, 7);
  const auto pairs = la::eig_general(m, true);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(pairs[i].right.norm() == doctest::Approx(1.0).epsilon(1e-10));
    const double resid = (m.cast<Complex>() * pairs[i].right - pairs[i].value * pairs[i].right).norm();
    CHECK(resid < 1e-8 * la::op_norm(m));
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      const Complex ip = pairs[i].left.dot(pairs[j].right);
      CHECK(std::abs(ip - (i == j ? Complex(1, 0) : Complex(0, 0))) < 1e-8);
    }
  }
}

TEST_CASE("eig_general: rejects non-square input") {
  CHECK_THROWS(la::eig_general(Matrix::Zero(2, 3), false));
}

TEST_CASE("eig_general: clustered eigenvalues flagged ill-conditioned") {
  Matrix m = Matrix::Zero(3, 3);
  m.diagonal() << 1.0, 1.0 + 1e-14, 5.0;  // gap far below 1e-10 * ||M||
  const auto pairs = la::eig_general(m, true);
  int flagged = 0;
  for (const auto& p : pairs)
    if (p.ill_conditioned) ++flagged;
  CHECK(flagged == 2);
  // the separated eigenvalue keeps usable vectors
  for (const auto& p : pairs)
    if (std::abs(p.value - Complex(5, 0)) < 1e-9) CHECK(!p.ill_conditioned);
}

TEST_CASE("op_norm: all-ones 800x2000 is sqrt(p n)") {
  const Matrix m = Matrix::Ones(800, 2000);
  CHECK(la::op_norm(m) == doctest::Approx(std::sqrt(1.6e6)).epsilon(1e-10));
  CHECK(la::op_norm(m) == doctest::Approx(1264.911).epsilon(1e-6));
}

TEST_CASE("op_norm: diagonal") {
  Matrix m = Matrix::Zero(3, 3);
  m.diagonal() << 3, -7, 2;
  CHECK(la::op_norm(m) == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("op_norm: two-block profile matches rank-1 closed form and SVD") {
  Matrix t(800, 2000);
  t.topRows(400).setConstant(1.0);
  t.bottomRows(400).setConstant(1.5);
  const double closed = std::sqrt(400.0 * (1.0 + 1.5 * 1.5)) * std::sqrt(2000.0);
  CHECK(closed == doctest::Approx(1612.452).epsilon(1e-6));
  CHECK(la::op_norm(t) == doctest::Approx(closed).epsilon(1e-10));
  CHECK(la::svd_values(t)[0] == doctest::Approx(closed).epsilon(1e-10));
}

TEST_CASE("op_norm: zero matrix") { CHECK(la::op_norm(Matrix::Zero(4, 5)) == 0.0); }

TEST_CASE("svd_values: identity and rank-1") {
  const Vector sv = la::svd_values(Matrix::Identity(5, 5));
  for (Index i = 0; i < 5; ++i) CHECK(sv[i] == doctest::Approx(1.0).epsilon(1e-12));

  Vector u(3), v(4);
  u << 2, 0, 0;
  v << 0, 3, 0, 0;
  const Vector sv2 = la::svd_values(u * v.transpose());
  CHECK(sv2[0] == doctest::Approx(6.0).epsilon(1e-12));
  for (Index i = 1; i < sv2.size(); ++i) CHECK(std::abs(sv2[i]) < 1e-12);
}

TEST_CASE("svd_values: random 5x7 against the Gram-matrix oracle") {
  const Matrix m = seeded_matrix(5, 7, 11);
  const Vector sv = la::svd_values(m);
  const auto gram_pairs = la::eig_general(Matrix(m * m.transpose()), false);
  std::vector<double> gram;
  for (const auto& p : gram_pairs) gram.push_back(std::sqrt(std::max(0.0, p.value.real())));
  std::sort(gram.rbegin(), gram.rend());
  for (Index i = 0; i < sv.size(); ++i) CHECK(sv[i] == doctest::Approx(gram[static_cast<std::size_t>(i)]).epsilon(1e-9));
  for (Index i = 0; i + 1 < sv.size(); ++i) CHECK(sv[i] >= sv[i + 1]);
}

TEST_CASE("op_norm agrees with svd_values on 100 seeded matrices") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Index rows = 3 + static_cast<Index>(seed % 13);
    const Index cols = 3 + static_cast<Index>((seed * 7) % 17);
    const Matrix m = seeded_matrix(rows, cols, 1000 + seed);
    const double a = la::op_norm(m);
    const double b = la::svd_values(m)[0];
    CHECK(std::abs(a - b) <= 1e-8 * b);
  }
}

TEST_CASE("solve_shifted: trivial cases") {
  const ComplexMatrix eye = ComplexMatrix::Identity(3, 3);
  const ComplexMatrix r1 = la::solve_shifted(Matrix::Zero(3, 3), Complex(-1, 0), eye);
  CHECK((r1 - eye).norm() < 1e-14);

  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 2, 3;
  const ComplexMatrix r2 = la::solve_shifted(d, Complex(1, 0), ComplexMatrix::Identity(2, 2));
  CHECK(std::abs(r2(0, 0) - Complex(1, 0)) < 1e-14);
  CHECK(std::abs(r2(1, 1) - Complex(0.5, 0)) < 1e-14);
}

TEST_CASE("solve_shifted: residual on a random system") {
  const Matrix m = seeded_matrix(6, 6, 17);
  const Complex z(0.3, 0.8);
  const ComplexMatrix b = seeded_matrix(6, 2, 18).cast<Complex>();
  const ComplexMatrix x = la::solve_shifted(m, z, b);
  ComplexMatrix a = m.cast<Complex>();
  a.diagonal().array() -= z;
  CHECK((a * x - b).norm() < 1e-10);
}

TEST_CASE("solve_shifted: rejects a singular shift") {
  Matrix d = Matrix::Zero(2, 2);
  d.diagonal() << 2, 3;
  CHECK_THROWS(la::solve_shifted(d, Complex(2, 0), ComplexMatrix::Identity(2, 2)));
}
