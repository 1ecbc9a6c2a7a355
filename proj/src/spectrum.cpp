#include "asymdet/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace asymdet::spectrum {

namespace {

// Real matrix times complex vector without casting the matrix.
ComplexVector apply_real(const Eigen::Ref<const Matrix>& a, const ComplexVector& v) {
  ComplexVector out(a.rows());
  out.real() = a * v.real();
  out.imag() = a * v.imag();
  return out;
}

Complex principal_sqrt(Complex mu) {
  Complex r = std::sqrt(mu);
  if (r.real() < 0.0) r = -r;
  if (r.real() == 0.0 && r.imag() < 0.0) r = -r;  // purely imaginary goes to +i
  return r;
}

void sort_convention(ComplexVector& lam) {
  std::vector<Index> idx(static_cast<std::size_t>(lam.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    const double ma = std::abs(lam[a]);
    const double mb = std::abs(lam[b]);
    if (ma != mb) return ma > mb;
    return std::arg(lam[a]) > std::arg(lam[b]);
  });
  ComplexVector sorted(lam.size());
  for (Index i = 0; i < lam.size(); ++i) sorted[i] = lam[idx[static_cast<std::size_t>(i)]];

  // Magnitudes of a conjugate pair may differ at roundoff level; enforce the
  // positive-argument-first adjacency inside a small tolerance band.
  const double band = 1e-9 * (sorted.size() > 0 ? std::abs(sorted[0]) : 0.0);
  for (Index i = 0; i + 1 < sorted.size(); ++i) {
    const Complex a = sorted[i];
    const Complex b = sorted[i + 1];
    if (std::abs(std::abs(a) - std::abs(b)) <= band &&
        std::abs(a - std::conj(b)) <= 10 * band && std::arg(a) < 0.0 && std::arg(b) > 0.0) {
      sorted[i] = b;
      sorted[i + 1] = a;
    }
  }
  lam = std::move(sorted);
}

}  // namespace

Matrix build_linearization(const Matrix& h1, const Matrix& h2) {
  require(h1.rows() == h2.rows() && h1.cols() == h2.cols(),
          "build_linearization: shape mismatch");
  const Index p = h1.rows();
  const Index n = h1.cols();
  Matrix y = Matrix::Zero(p + n, p + n);
  y.topRightCorner(p, n) = h1;
  y.bottomLeftCorner(n, p) = h2.transpose();
  return y;
}

SpectrumResult eigs_asym(const Matrix& h1, const Matrix& h2, Index want_vectors) {
  require(h1.rows() == h2.rows() && h1.cols() == h2.cols(), "eigs_asym: shape mismatch");
  const Index p = h1.rows();
  const Index n = h1.cols();
  const bool via_p = p <= n;
  const Matrix prod = via_p ? Matrix(h1 * h2.transpose()) : Matrix(h2.transpose() * h1);

  Eigen::EigenSolver<Matrix> es(prod, want_vectors > 0);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigs_asym: product eigensolver failed to converge");

  SpectrumResult result;
  result.zero_multiplicity = (p > n) ? p - n : n - p;
  result.lambdas.resize(std::min(p, n));
  for (Index i = 0; i < result.lambdas.size(); ++i)
    result.lambdas[i] = principal_sqrt(es.eigenvalues()[i]);
  sort_convention(result.lambdas);

  if (want_vectors > 0) {
    const Index m = std::min<Index>(want_vectors, result.lambdas.size());
    Eigen::EigenSolver<Matrix> est(prod.transpose(), true);
    if (est.info() != Eigen::Success)
      throw std::runtime_error("eigs_asym: transposed eigensolver failed to converge");

    std::vector<bool> used_r(static_cast<std::size_t>(prod.rows()), false);
    std::vector<bool> used_l(static_cast<std::size_t>(prod.rows()), false);
    for (Index i = 0; i < m; ++i) {
      const Complex lam = result.lambdas[i];
      const Complex mu = lam * lam;
      require(std::abs(lam) > 1e-12 * std::abs(result.lambdas[0]) + 1e-300,
              "eigs_asym: eigenvectors requested for a (near) zero eigenvalue");

      auto nearest = [&](const ComplexVector& vals, Complex target, std::vector<bool>& used) {
        Index arg = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Index j = 0; j < vals.size(); ++j) {
          if (used[static_cast<std::size_t>(j)]) continue;
          const double d = std::abs(vals[j] - target);
          if (d < best) {
            best = d;
            arg = j;
          }
        }
        used[static_cast<std::size_t>(arg)] = true;
        return arg;
      };
      const Index jr = nearest(es.eigenvalues(), mu, used_r);
      const Index jl = nearest(est.eigenvalues(), mu, used_l);

      ComplexVector x = es.eigenvectors().col(jr);
      ComplexVector y = est.eigenvectors().col(jl).conjugate();

      // Lift product eigenvectors to the linearization: for (H1 H2^T) x = mu x,
      // (x; H2^T x / lambda) is a right eigenvector of [[0,H1],[H2^T,0]], and
      // the left one comes from the transposed product the same way.
      EigenvectorPair pair;
      pair.right.resize(p + n);
      pair.left.resize(p + n);
      if (via_p) {
        pair.right << x, apply_real(h2.transpose(), x) / lam;
        pair.left << y, apply_real(h1.transpose(), y) / std::conj(lam);
      } else {
        pair.right << apply_real(h1, x) / lam, x;
        pair.left << apply_real(h2, y) / std::conj(lam), y;
      }
      pair.right /= pair.right.norm();
      const Complex c = pair.left.dot(pair.right);
      require(std::abs(c) > 1e-12, "eigs_asym: degenerate left/right normalization");
      pair.left /= std::conj(c);
      result.vectors.push_back(std::move(pair));
    }
  }
  return result;
}

Vector singular_baseline(const Matrix& h) { return linalg::svd_values(h); }

Complex eigvec_projection(const SpectrumResult& result, const std::vector<Index>& cluster,
                          const ComplexVector& a) {
  require(std::abs(a.norm() - 1.0) < 1e-8, "eigvec_projection: direction must be unit");
  Complex total = 0.0;
  for (Index j : cluster) {
    require(j >= 0 && static_cast<std::size_t>(j) < result.vectors.size(),
            "eigvec_projection: eigenvectors missing for cluster index");
    const EigenvectorPair& w = result.vectors[static_cast<std::size_t>(j)];
    const Complex norm_check = w.left.dot(w.right);
    require(std::abs(norm_check) > 1e-10, "eigvec_projection: degenerate normalization");
    total += a.dot(w.right) * w.left.dot(a);
  }
  return total;
}

Complex projection_via_contour(const Matrix& h1, const Matrix& h2, Complex center, double radius,
                               const ComplexVector& a, int nodes) {
  require(radius > 0.0 && nodes >= 4, "projection_via_contour: bad contour");
  const Index p = h1.rows();
  const Index n = h1.cols();
  require(a.size() == p + n, "projection_via_contour: direction length mismatch");
  const Matrix prod = h1 * h2.transpose();

  // a^*(Y - z)^{-1} a through the p x p resolvent G(z^2) = (H1 H2^T - z^2)^{-1}:
  //   (Y - z)^{-1} = [[z G, H1 Gc],[Gc H2^T, z Gc]],
  //   Gc(z^2) v = (H2^T G(z^2) H1 v - v) / z^2.
  auto quad = [&](Complex z) {
    const Complex z2 = z * z;
    ComplexMatrix shifted = prod.cast<Complex>();
    shifted.diagonal().array() -= z2;
    Eigen::PartialPivLU<ComplexMatrix> lu(shifted);
    const ComplexVector a1 = a.head(p);
    const ComplexVector a2 = a.tail(n);
    const ComplexVector g_a1 = lu.solve(a1);
    const ComplexVector g_h1a2 = lu.solve(apply_real(h1, a2));
    const ComplexVector gc_a2 = (apply_real(h2.transpose(), g_h1a2) - a2) / z2;
    const Complex top = a1.dot(z * g_a1 + apply_real(h1, gc_a2));
    const ComplexVector t = apply_real(h2.transpose(), a1);
    const ComplexVector gc_h2a1 = (apply_real(h2.transpose(), lu.solve(apply_real(h1, t))) - t) / z2;
    const Complex bottom = a2.dot(gc_h2a1 + z * gc_a2);
    return top + bottom;
  };

  Complex sum = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double th = 2.0 * M_PI * (static_cast<double>(k) + 0.5) / nodes;
    const Complex zeta = radius * Complex(std::cos(th), std::sin(th));
    sum += zeta * quad(center + zeta);
  }
  // -1/(2 pi i) contour integral of a^*(Y-z)^{-1} a dz, trapezoid rule.
  return -sum / static_cast<double>(nodes);
}

}  // namespace asymdet::spectrum
