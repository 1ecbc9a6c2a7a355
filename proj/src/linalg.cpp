#include "asymdet/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

namespace asymdet::linalg {

namespace {

// Match each eigenvalue of the transposed problem to one of the original;
// greedy nearest with a used-flag keeps conjugate pairs apart.
std::vector<Index> match_eigenvalues(const ComplexVector& target, const ComplexVector& cand) {
  const Index n = target.size();
  std::vector<Index> pick(n, -1);
  std::vector<bool> used(n, false);
  for (Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    Index arg = -1;
    for (Index j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double d = std::abs(target[i] - cand[j]);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    pick[i] = arg;
    used[arg] = true;
  }
  return pick;
}

}  // namespace

std::vector<EigenPair> eig_general(const Matrix& m, bool want_vectors) {
  require(m.rows() == m.cols(), "eig_general: matrix must be square");
  require(all_finite(m), "eig_general: non-finite entries");
  const Index n = m.rows();

  Eigen::EigenSolver<Matrix> es(m, want_vectors);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eig_general: eigensolver failed to converge (Eigen status " +
                             std::to_string(static_cast<int>(es.info())) + ")");

  std::vector<EigenPair> out(n);
  const ComplexVector vals = es.eigenvalues();
  for (Index i = 0; i < n; ++i) out[i].value = vals[i];

  if (want_vectors) {
    Eigen::EigenSolver<Matrix> est(m.transpose(), true);
    if (est.info() != Eigen::Success)
      throw std::runtime_error("eig_general: transposed eigensolver failed to converge");
    const ComplexVector tvals = est.eigenvalues();
    // Left eigenvector for lambda solves M^T l = conj(lambda) l.
    const ComplexVector conj_vals = vals.conjugate();
    const std::vector<Index> pick = match_eigenvalues(conj_vals, tvals);

    const double scale = op_norm(m, 1e-8);
    for (Index i = 0; i < n; ++i) {
      ComplexVector r = es.eigenvectors().col(i);
      r /= r.norm();
      ComplexVector l = est.eigenvectors().col(pick[i]);
      const Complex c = l.dot(r);  // l^H r
      if (std::abs(c) < 1e-14) {
        out[i].ill_conditioned = true;
      } else {
        l /= std::conj(c);
      }
      out[i].right = std::move(r);
      out[i].left = std::move(l);

      double gap = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < n; ++j)
        if (j != i) gap = std::min(gap, std::abs(vals[i] - vals[j]));
      if (n > 1 && gap < 1e-10 * std::max(scale, 1e-300)) out[i].ill_conditioned = true;
    }
  }
  return out;
}

double op_norm(const Eigen::Ref<const Matrix>& m, double tol) {
  require(all_finite(m), "op_norm: non-finite entries");
  if (m.size() == 0) return 0.0;

  Vector v = Vector::Ones(m.cols());
  // Tiny deterministic perturbation so a start vector orthogonal to the top
  // singular direction cannot stall the iteration.
  for (Index j = 0; j < v.size(); ++j)
    v[j] += 1e-8 * std::sin(0.7 * static_cast<double>(j + 1));
  v /= v.norm();

  double sigma = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vector w = m * v;
    const double s = w.norm();
    if (s == 0.0) return 0.0;
    Vector u = m.transpose() * w;
    const double un = u.norm();
    if (un == 0.0) return s;
    v = u / un;
    const double prev = sigma;
    sigma = s;
    if (it > 0 && std::abs(sigma - prev) <= tol * sigma) break;
  }
  return sigma;
}

Vector svd_values(const Eigen::Ref<const Matrix>& m) {
  require(all_finite(m), "svd_values: non-finite entries");
  if (m.rows() == 0 || m.cols() == 0) return Vector();
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

ComplexMatrix solve_shifted(const Matrix& m, Complex z, const ComplexMatrix& b, double cond_cap) {
  require(m.rows() == m.cols(), "solve_shifted: matrix must be square");
  require(m.rows() == b.rows(), "solve_shifted: rhs row mismatch");
  require(all_finite(m), "solve_shifted: non-finite entries");
  const Index n = m.rows();

  ComplexMatrix a = m.cast<Complex>();
  a.diagonal().array() -= z;
  Eigen::PartialPivLU<ComplexMatrix> lu(a);

  // Hager-style 1-norm estimate of ||A^{-1}||.
  ComplexVector x = ComplexVector::Constant(n, Complex(1.0 / static_cast<double>(n), 0.0));
  double inv_norm = 0.0;
  for (int pass = 0; pass < 4; ++pass) {
    ComplexVector y = lu.solve(x);
    inv_norm = y.cwiseAbs().sum();
    if (!std::isfinite(inv_norm)) break;
    ComplexVector s(n);
    for (Index i = 0; i < n; ++i) {
      const double ay = std::abs(y[i]);
      s[i] = ay > 0 ? y[i] / ay : Complex(1, 0);
    }
    ComplexVector t = lu.adjoint().solve(s);
    Index j;
    t.cwiseAbs().maxCoeff(&j);
    if (pass > 0 && std::abs(t[j]) <= t.dot(x).real()) break;
    x.setZero();
    x[j] = 1.0;
  }
  const double a_norm = a.cwiseAbs().colwise().sum().maxCoeff();
  const double cond = a_norm * inv_norm;
  if (!std::isfinite(cond) || cond > cond_cap)
    throw std::runtime_error("solve_shifted: shifted matrix is singular or ill-conditioned (cond~" +
                             std::to_string(cond) + ")");

  return lu.solve(b);
}

}  // namespace asymdet::linalg
