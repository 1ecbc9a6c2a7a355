#include "asymdet/theory.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <functional>

#include "asymdet/linalg.hpp"
#include "asymdet/rng.hpp"
#include "asymdet/sampler.hpp"

namespace asymdet::theory {

double threshold(const model::VarianceProfile& profile, Index n) {
  return std::sqrt(linalg::op_norm(profile.T) / static_cast<double>(n));
}

double DysonSolution::mean_u() const {
  const double p = static_cast<double>(u1.size());
  const double n = static_cast<double>(u2.size());
  return (p * u1.mean() + n * u2.mean()) / (p + n);
}

double DysonSolution::mean_v() const {
  const double p = static_cast<double>(v1.size());
  const double n = static_cast<double>(v2.size());
  return (p * v1.mean() + n * v2.mean()) / (p + n);
}

double DysonSolution::max_component() const {
  return std::max(std::max(u1.maxCoeff(), u2.maxCoeff()), std::max(v1.maxCoeff(), v2.maxCoeff()));
}

DysonSolution dyson_solve(const model::VarianceProfile& profile, Index n, double z_abs, double eta,
                          double tol, int max_iter, double damping) {
  require(eta > 0.0 && z_abs > 0.0, "dyson_solve: eta and |z| must be positive");
  const Matrix tn = profile.T / static_cast<double>(n);
  const double z2 = z_abs * z_abs;
  const Index p = tn.rows();
  const Index m = tn.cols();

  DysonSolution sol;
  sol.eta = eta;
  sol.z_abs = z_abs;
  sol.u1 = Vector::Constant(p, 1.0 / (eta + 1.0));
  sol.u2 = Vector::Constant(m, 1.0 / (eta + 1.0));
  sol.v1 = sol.u1;
  sol.v2 = sol.u2;

  auto rhs1 = [&](const Vector& a2, const Vector& b2) -> Vector {
    return (eta + (tn * b2).array() + z2 / (eta + (tn * a2).array())).matrix();
  };
  auto rhs2 = [&](const Vector& a1, const Vector& b1) -> Vector {
    return (eta + (tn.transpose() * b1).array() + z2 / (eta + (tn.transpose() * a1).array()))
        .matrix();
  };

  double best = std::numeric_limits<double>::infinity();
  int best_iter = 0;
  for (int it = 1; it <= max_iter; ++it) {
    const Vector ru1 = rhs1(sol.u2, sol.v2);
    const Vector ru2 = rhs2(sol.u1, sol.v1);
    const Vector rv1 = rhs1(sol.v2, sol.u2);
    const Vector rv2 = rhs2(sol.v1, sol.u1);

    sol.u1 = (1.0 - damping) * sol.u1 + damping * ru1.cwiseInverse();
    sol.u2 = (1.0 - damping) * sol.u2 + damping * ru2.cwiseInverse();
    sol.v1 = (1.0 - damping) * sol.v1 + damping * rv1.cwiseInverse();
    sol.v2 = (1.0 - damping) * sol.v2 + damping * rv2.cwiseInverse();
    sol.iterations = it;

    const double res =
        std::max(std::max((sol.u1.cwiseInverse() - rhs1(sol.u2, sol.v2)).cwiseAbs().maxCoeff(),
                          (sol.u2.cwiseInverse() - rhs2(sol.u1, sol.v1)).cwiseAbs().maxCoeff()),
                 std::max((sol.v1.cwiseInverse() - rhs1(sol.v2, sol.u2)).cwiseAbs().maxCoeff(),
                          (sol.v2.cwiseInverse() - rhs2(sol.v1, sol.u1)).cwiseAbs().maxCoeff()));
    sol.residual = res;
    if (res < tol) {
      sol.converged = true;
      break;
    }
    // rounding floor: stop once the residual has not improved for a while
    if (res < best) {
      best = res;
      best_iter = it;
    } else if (it - best_iter > 200) {
      break;
    }
  }
  return sol;
}

bool pseudospectrum_member(const model::VarianceProfile& profile, Index n, double z_abs,
                           double tau) {
  require(tau > 0.0, "pseudospectrum_member: tau must be positive");
  DysonSolution finest;
  for (double eta : {1e-2, 1e-3, 1e-4}) finest = dyson_solve(profile, n, z_abs, eta);
  if (!finest.converged)
    throw std::runtime_error("pseudospectrum_member: Dyson iteration did not converge");
  return finest.max_component() / finest.eta >= 1.0 / tau;
}

namespace {

void check_kernel_exists(const model::VarianceProfile& profile, Index n, double z_abs) {
  const double radius = linalg::op_norm(profile.T) / static_cast<double>(n);
  require(z_abs > radius, "resolvent kernel is singular: |z| must exceed ||T||_op / n");
}

// Solve [I - T^T T / (n^2 |z|^2)]^{-1} b  (n x n kernel, SPD in the valid region).
Vector kernel_rows_solve(const Matrix& t, Index n, double z_abs, const Vector& b) {
  const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(n) * z_abs * z_abs);
  Matrix k = Matrix::Identity(t.cols(), t.cols()) - scale * (t.transpose() * t);
  return Eigen::LDLT<Matrix>(k).solve(b);
}

// Solve [I - T T^T / (n^2 |z|^2)]^{-1} b  (p x p kernel).
Vector kernel_cols_solve(const Matrix& t, Index n, double z_abs, const Vector& b) {
  const double scale = 1.0 / (static_cast<double>(n) * static_cast<double>(n) * z_abs * z_abs);
  Matrix k = Matrix::Identity(t.rows(), t.rows()) - scale * (t * t.transpose());
  return Eigen::LDLT<Matrix>(k).solve(b);
}

}  // namespace

double qf_covariance(const model::VarianceProfile& profile, Index n, double z_abs, QfKind kind,
                     const Vector& x_i, const Vector& y_i, const Vector& x_j, const Vector& y_j) {
  check_kernel_exists(profile, n, z_abs);
  const Matrix& t = profile.T;
  const Index p = t.rows();
  const Index m = t.cols();
  const double nd = static_cast<double>(n);
  const double z4 = std::pow(z_abs, 4);

  const Vector wx = x_i.cwiseProduct(x_j);
  const Vector wy = y_i.cwiseProduct(y_j);

  switch (kind) {
    case QfKind::A: {
      require(x_i.size() == p && y_i.size() == p, "qf_covariance A: vectors must be p-dimensional");
      const Vector a = t.transpose() * wx;
      const Vector b = t.transpose() * wy;
      return a.dot(kernel_rows_solve(t, n, z_abs, b)) / (nd * z4);
    }
    case QfKind::B: {
      require(x_i.size() == m && y_i.size() == m, "qf_covariance B: vectors must be n-dimensional");
      const Vector a = t * wx;
      const Vector b = t * wy;
      return a.dot(kernel_cols_solve(t, n, z_abs, b)) / (nd * z4);
    }
    case QfKind::C:
    case QfKind::D: {
      require(x_i.size() == p && y_i.size() == m,
              "qf_covariance C/D: first vector p-, second n-dimensional");
      const Vector rhs = kernel_cols_solve(t, n, z_abs, t * wy);
      return wx.dot(t * (t.transpose() * rhs)) / (nd * nd * z4);
    }
  }
  return 0.0;
}

double qf_covariance_rank1(const Vector& col, const Vector& row, Index n, double z_abs, QfKind kind,
                           const Vector& x_i, const Vector& y_i, const Vector& x_j,
                           const Vector& y_j) {
  // T = col row^T: T^T T = ||col||^2 row row^T, and the Sherman-Morrison
  // inverse collapses every kernel to a scalar amplification 1/(1-rho) with
  // rho = ||col||^2 ||row||^2 / (n^2 |z|^2).
  const double nd = static_cast<double>(n);
  const double z2 = z_abs * z_abs;
  const double z4 = z2 * z2;
  const double c2 = col.squaredNorm();
  const double r2 = row.squaredNorm();
  const double rho = c2 * r2 / (nd * nd * z2);
  require(rho < 1.0, "qf_covariance_rank1: kernel singular");
  const double amp = 1.0 / (1.0 - rho);

  const Vector wx = x_i.cwiseProduct(x_j);
  const Vector wy = y_i.cwiseProduct(y_j);
  switch (kind) {
    case QfKind::A:
      // a = T^T wx = (col.wx) row; value = (col.wx)(col.wy) ||row||^2 amp / (n z^4)
      return col.dot(wx) * col.dot(wy) * r2 * amp / (nd * z4);
    case QfKind::B:
      return row.dot(wx) * row.dot(wy) * c2 * amp / (nd * z4);
    case QfKind::C:
    case QfKind::D:
      // wx^T T T^T K^{-1} T wy = (col.wx)(row.wy) c2 r2 amp
      return col.dot(wx) * row.dot(wy) * c2 * r2 * amp / (nd * nd * z4);
  }
  return 0.0;
}

FluctuationSpec fluct_variance(const model::VarianceProfile& profile, Index n,
                               const model::SigmaSpec& sigma, const Vector& u, const Vector& v,
                               double d, const Vector& all_strengths, double separation_floor) {
  const Index p = profile.p();
  require(u.size() == p && v.size() == profile.n(), "fluct_variance: vector dimensions mismatch");
  require(d > threshold(profile, n), "fluct_variance: strength is subcritical");
  for (Index i = 0; i < all_strengths.size(); ++i)
    for (Index j = i + 1; j < all_strengths.size(); ++j)
      require(std::abs(all_strengths[i] - all_strengths[j]) >= separation_floor,
              "fluct_variance: strengths violate the separation assumption");

  const double z_abs = d * d;
  check_kernel_exists(profile, n, z_abs);
  const Matrix& t = profile.T;
  const double nd = static_cast<double>(n);
  const double d2 = d * d;

  const Matrix sig = model::sigma_matrix(sigma, p);
  const Vector su = sig.transpose() * u;
  const Vector wu = su.cwiseProduct(su);  // (Sigma^T u)_a^2
  const Vector wv = v.cwiseProduct(v);

  // First term: rows-of-T kernel weighted by (Sigma^T u u^T Sigma) twice.
  const Vector a1 = t.transpose() * wu;
  const double term1 = (d2 / (nd * nd)) * a1.dot(kernel_rows_solve(t, n, z_abs, a1));
  // Middle term: mixed weights, T T^T kernel against columns of T.
  const Vector rhs = kernel_cols_solve(t, n, z_abs, t * wv);
  const double term2 = (2.0 / (nd * nd * nd)) * wu.dot(t * (t.transpose() * rhs));
  // Third term: columns-of-T kernel weighted by (v v^T) twice.
  const Vector a3 = t * wv;
  const double term3 = (d2 / (nd * nd)) * a3.dot(kernel_cols_solve(t, n, z_abs, a3));

  FluctuationSpec spec;
  spec.z_abs_used = z_abs;
  spec.var_g = (nd / (d2 * d2)) * (term1 + term2 + term3);
  spec.var_linear = 2.0 * wu.dot(t * wv) / nd;
  spec.var_total = spec.var_linear + spec.var_g / nd;
  return spec;
}

double null_edge(const model::VarianceProfile& profile, Index p, Index n, EdgeMethod method,
                 Index trials, std::uint64_t seed) {
  require(profile.p() == p && profile.n() == n, "null_edge: profile dimensions mismatch");
  if (method == EdgeMethod::FlatClosedForm) {
    require(profile.is_flat(), "null_edge: closed form requires a flat profile");
    const double c = static_cast<double>(p) / static_cast<double>(n);
    return std::sqrt(profile.t_hi) * (1.0 + std::sqrt(c));
  }
  require(trials >= 1, "null_edge: need at least one trial");
  std::vector<double> tops;
  RngStream root(seed);
  for (Index tr = 0; tr < trials; ++tr) {
    const Matrix x = sampler::sample_noise(profile, model::NoiseDistribution::gaussian(),
                                           root.child(static_cast<std::uint64_t>(tr)));
    tops.push_back(linalg::svd_values(x)[0]);
  }
  std::nth_element(tops.begin(), tops.begin() + tops.size() / 2, tops.end());
  return tops[tops.size() / 2];
}

double trace_moment_limit(Index p, Index n, Index k) {
  require(k >= 1, "trace_moment_limit: k must be positive");
  if (k % 4 != 0) return 0.0;
  const double c = static_cast<double>(p) / static_cast<double>(n);
  const Index m = k / 4;
  return 2.0 * std::pow(c, static_cast<double>(m + 1));
}

double trace_moment_exact_mean4(Index p, Index n) {
  return 2.0 * static_cast<double>(p) / static_cast<double>(n);
}

double trace_moment_exact_var2(Index p, Index n) {
  return 4.0 * static_cast<double>(p) / static_cast<double>(n);
}

namespace {

int subset_sign(const std::vector<int>& set, int dim) {
  // Parity of the permutation listing `set` then its complement.
  std::vector<int> perm(set.begin(), set.end());
  std::vector<bool> in(dim, false);
  for (int s : set) in[static_cast<std::size_t>(s)] = true;
  for (int i = 0; i < dim; ++i)
    if (!in[static_cast<std::size_t>(i)]) perm.push_back(i);
  int inversions = 0;
  for (std::size_t a = 0; a < perm.size(); ++a)
    for (std::size_t b = a + 1; b < perm.size(); ++b)
      if (perm[a] > perm[b]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

double minor_det(const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  const Index r = static_cast<Index>(rows.size());
  if (r == 0) return 1.0;
  Matrix sub(r, r);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j)
      sub(i, j) = m(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
  if (r == 1) return sub(0, 0);
  if (r == 2) return sub(0, 0) * sub(1, 1) - sub(0, 1) * sub(1, 0);
  return Eigen::PartialPivLU<Matrix>(sub).determinant();
}

void enumerate_subsets(int dim, int size, std::vector<std::vector<int>>& out) {
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == size) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < dim; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
}

std::vector<int> complement(const std::vector<int>& set, int dim) {
  std::vector<bool> in(dim, false);
  for (int s : set) in[static_cast<std::size_t>(s)] = true;
  std::vector<int> out;
  for (int i = 0; i < dim; ++i)
    if (!in[static_cast<std::size_t>(i)]) out.push_back(i);
  return out;
}

}  // namespace

double det_sum_expansion(const Matrix& a, const Matrix& b) {
  require(a.rows() == a.cols() && b.rows() == b.cols() && a.rows() == b.rows(),
          "det_sum_expansion: square matrices of equal size required");
  const int dim = static_cast<int>(a.rows());
  require(dim <= 10, "det_sum_expansion: dimension capped at 10 (term count doubles per row)");

  double total = 0.0;
  for (int r = 0; r <= dim; ++r) {
    std::vector<std::vector<int>> subsets;
    enumerate_subsets(dim, r, subsets);
    for (const auto& rows : subsets) {
      const std::vector<int> rows_c = complement(rows, dim);
      const int sign_rows = subset_sign(rows, dim);
      for (const auto& cols : subsets) {
        const std::vector<int> cols_c = complement(cols, dim);
        const int sign = sign_rows * subset_sign(cols, dim);
        total += sign * minor_det(a, rows, cols) * minor_det(b, rows_c, cols_c);
      }
    }
  }
  return total;
}

namespace {

ComplexMatrix signal_eigenbasis(const model::SignalSpec& signal) {
  const Index p = signal.p();
  const Index n = signal.n();
  const Index k = signal.k();
  ComplexMatrix w = ComplexMatrix::Zero(p + n, 2 * k);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < k; ++i) {
    w.col(i).head(p) = (signal.U.col(i) * inv_sqrt2).cast<Complex>();
    w.col(i).tail(n) = (signal.V.col(i) * inv_sqrt2).cast<Complex>();
    w.col(k + i).head(p) = (signal.U.col(i) * inv_sqrt2).cast<Complex>();
    w.col(k + i).tail(n) = (-signal.V.col(i) * inv_sqrt2).cast<Complex>();
  }
  return w;
}

ComplexVector signal_eigenvalues(const model::SignalSpec& signal) {
  const Index k = signal.k();
  ComplexVector d(2 * k);
  for (Index i = 0; i < k; ++i) {
    d[i] = signal.d[i];
    d[k + i] = -signal.d[i];
  }
  return d;
}

Complex secular_det(const ComplexMatrix& w, const ComplexVector& dvals, const ComplexMatrix& z) {
  const Index k2 = w.cols();
  ComplexMatrix small = ComplexMatrix::Identity(k2, k2);
  small += dvals.asDiagonal() * (w.adjoint() * z);
  if (k2 == 0) return Complex(1.0, 0.0);
  return Eigen::PartialPivLU<ComplexMatrix>(small).determinant();
}

}  // namespace

Complex secular_value(const Matrix& noise_linearization, const model::SignalSpec& signal,
                      Complex lambda) {
  require(signal.k() > 0, "secular_value: empty signal");
  require(noise_linearization.rows() == signal.p() + signal.n(),
          "secular_value: linearization dimension mismatch");
  const ComplexMatrix w = signal_eigenbasis(signal);
  const ComplexMatrix z = linalg::solve_shifted(noise_linearization, lambda, w);
  return secular_det(w, signal_eigenvalues(signal), z);
}

Complex secular_value_blocks(const Matrix& n1, const Matrix& n2, const model::SignalSpec& signal,
                             Complex lambda) {
  require(signal.k() > 0, "secular_value_blocks: empty signal");
  const Index p = n1.rows();
  const Index n = n1.cols();
  require(n2.rows() == p && n2.cols() == n && signal.p() == p && signal.n() == n,
          "secular_value_blocks: dimension mismatch");

  const Complex z2 = lambda * lambda;
  ComplexMatrix shifted = (n1 * n2.transpose()).cast<Complex>();
  shifted.diagonal().array() -= z2;
  Eigen::PartialPivLU<ComplexMatrix> lu(shifted);

  // Columns of (Xcal - lambda)^{-1} W through the p x p resolvent
  // G(z^2) = (N1 N2^T - z^2)^{-1} and Gc(z^2) y = (N2^T G N1 y - y)/z^2.
  const ComplexMatrix w = signal_eigenbasis(signal);
  ComplexMatrix resolvent_w(p + n, w.cols());
  for (Index c = 0; c < w.cols(); ++c) {
    const ComplexVector a = w.col(c).head(p);
    const ComplexVector b = w.col(c).tail(n);
    ComplexVector n1b(p);
    n1b.real() = n1 * b.real();
    n1b.imag() = n1 * b.imag();
    const ComplexVector g_a = lu.solve(a);
    const ComplexVector g_n1b = lu.solve(n1b);
    ComplexVector gc_b(n);
    {
      ComplexVector tmp(n);
      tmp.real() = n2.transpose() * g_n1b.real();
      tmp.imag() = n2.transpose() * g_n1b.imag();
      gc_b = (tmp - b) / z2;
    }
    ComplexVector gc_n2a(n);
    {
      ComplexVector t0(n);
      t0.real() = n2.transpose() * a.real();
      t0.imag() = n2.transpose() * a.imag();
      ComplexVector n1t(p);
      n1t.real() = n1 * t0.real();
      n1t.imag() = n1 * t0.imag();
      const ComplexVector g_n1t = lu.solve(n1t);
      ComplexVector tmp(n);
      tmp.real() = n2.transpose() * g_n1t.real();
      tmp.imag() = n2.transpose() * g_n1t.imag();
      gc_n2a = (tmp - t0) / z2;
    }
    ComplexVector n1_gcb(p);
    n1_gcb.real() = n1 * gc_b.real();
    n1_gcb.imag() = n1 * gc_b.imag();
    resolvent_w.col(c).head(p) = lambda * g_a + n1_gcb;
    resolvent_w.col(c).tail(n) = gc_n2a + lambda * gc_b;
  }
  return secular_det(w, signal_eigenvalues(signal), resolvent_w);
}

}  // namespace asymdet::theory
