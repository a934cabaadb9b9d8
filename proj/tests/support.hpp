#pragma once

// Independent oracles for the test suite. Nothing here calls the library's
// kernels: loops are written out so a bug in core cannot hide itself.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "landr/harness.hpp"
#include "landr/rng.hpp"

namespace oracle {

using landr::Complex;
using landr::DenseBlock;
using landr::Vector;

template <class S>
S naive_dot(const std::vector<S>& u, const std::vector<S>& v) {
  S s{0};
  for (std::size_t i = 0; i < u.size(); ++i) s += landr::conj(u[i]) * v[i];
  return s;
}

template <class S>
double naive_norm(const std::vector<S>& v) {
  double s = 0;
  for (const S& x : v) s += landr::abs2(x);
  return std::sqrt(s);
}

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <class S>
Mat<S> to_eigen(const DenseBlock<S>& V, std::size_t cols) {
  Mat<S> m(V.rows(), cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < V.rows(); ++i) m(i, j) = V.col(j)[i];
  return m;
}

template <class S>
Vec<S> to_eigen(const std::vector<S>& v) {
  return Eigen::Map<const Vec<S>>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Modified Gram-Schmidt, two passes.
template <class S>
DenseBlock<S> gram_schmidt(const std::vector<std::vector<S>>& vs) {
  DenseBlock<S> Q(vs.front().size(), vs.size());
  for (std::size_t j = 0; j < vs.size(); ++j) {
    std::vector<S> w = vs[j];
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < j; ++i) {
        std::vector<S> q(Q.col(i).begin(), Q.col(i).end());
        const S h = naive_dot(q, w);
        for (std::size_t t = 0; t < w.size(); ++t) w[t] -= h * q[t];
      }
    const double nw = naive_norm(w);
    for (std::size_t t = 0; t < w.size(); ++t) Q.col(j)[t] = w[t] / nw;
  }
  return Q;
}

/// Dense matrix of an operator, column by column.
template <class S>
Mat<S> dense(const landr::LinearOperator<S>& op) {
  const std::size_t n = op.size();
  Mat<S> a(n, n);
  std::vector<S> e(n, S{0});
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = S{1};
    const auto col = op.apply(e);
    for (std::size_t i = 0; i < n; ++i) a(i, j) = col[i];
    e[j] = S{0};
  }
  return a;
}

/// Textbook CG on a diagonal matrix: relative residual norms per iteration.
inline std::vector<double> naive_cg(const std::vector<double>& d, const std::vector<double>& b,
                                    double rtol, int maxit) {
  const std::size_t n = d.size();
  std::vector<double> x(n, 0.0), r = b, p = b, ap(n);
  const double bn = naive_norm(b);
  double rho = naive_dot(r, r);
  std::vector<double> hist{std::sqrt(rho) / bn};
  for (int it = 0; it < maxit && hist.back() > rtol; ++it) {
    for (std::size_t i = 0; i < n; ++i) ap[i] = d[i] * p[i];
    const double alpha = rho / naive_dot(p, ap);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rho_new = naive_dot(r, r);
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + rho_new / rho * p[i];
    rho = rho_new;
    hist.push_back(std::sqrt(rho) / bn);
  }
  return hist;
}

/// min over y of ||b - A K_j y|| for j = 1..steps, where K_j is an explicitly
/// orthonormalized Krylov basis. Relative to ||b||.
inline std::vector<double> dense_minres_history(const Mat<double>& A, const Vec<double>& b,
                                                int steps) {
  const Eigen::Index n = A.rows();
  Mat<double> Q(n, steps);
  Vec<double> w = b / b.norm();
  std::vector<double> out;
  for (int j = 0; j < steps; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < j; ++i) w -= Q.col(i).dot(w) * Q.col(i);
    Q.col(j) = w / w.norm();
    const Mat<double> AQ = A * Q.leftCols(j + 1);
    const Vec<double> y = AQ.colPivHouseholderQr().solve(b);
    out.push_back((b - AQ * y).norm() / b.norm());
    w = A * Q.col(j);
  }
  return out;
}

/// max_j ||(A V_m - V_{m+1} T̄) e_j||.
template <class S>
double recurrence_residual(const landr::LinearOperator<S>& op, const DenseBlock<S>& V,
                           const Eigen::MatrixXd& tbar) {
  const auto cols = static_cast<std::size_t>(tbar.cols());
  const Mat<S> Vm = to_eigen(V, static_cast<std::size_t>(tbar.rows()));
  double worst = 0;
  for (std::size_t j = 0; j < cols; ++j) {
    std::vector<S> v(V.col(j).begin(), V.col(j).end());
    const Vec<S> av = to_eigen(op.apply(v));
    const Vec<S> rhs = Vm * tbar.col(static_cast<Eigen::Index>(j)).cast<S>();
    worst = std::max(worst, (av - rhs).norm());
  }
  return worst;
}

/// ||A y - theta y|| for column i of V.
template <class S>
double direct_residual(const landr::LinearOperator<S>& op, const DenseBlock<S>& V,
                       std::size_t i, double theta) {
  std::vector<S> y(V.col(i).begin(), V.col(i).end());
  auto ay = op.apply(y);
  for (std::size_t t = 0; t < y.size(); ++t) ay[t] -= theta * y[t];
  return naive_norm(ay);
}

inline std::vector<double> random_diagonal(std::size_t n, double lo, double hi,
                                           std::uint64_t seed) {
  landr::Rng rng(seed);
  std::vector<double> d(n);
  for (auto& x : d) x = lo + (hi - lo) * rng.uniform();
  return d;
}

/// Hermitian n x n matrix with the given spectrum, rotated by a random unitary.
inline landr::CsrOperator<Complex> random_hermitian(const std::vector<double>& spectrum,
                                                    std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(spectrum.size());
  landr::Rng rng(seed);
  Mat<Complex> g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = Complex(rng.normal(), rng.normal());
  const Mat<Complex> q = Eigen::HouseholderQR<Mat<Complex>>(g).householderQ();
  Vec<Complex> lam(n);
  for (Eigen::Index i = 0; i < n; ++i) lam(i) = spectrum[static_cast<std::size_t>(i)];
  const Mat<Complex> a0 = q * lam.asDiagonal() * q.adjoint();
  const Mat<Complex> a = 0.5 * (a0 + a0.adjoint());
  std::vector<landr::Triplet> t;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      t.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                   a(i, j)});
  return landr::CsrOperator<Complex>::from_triplets(spectrum.size(), std::move(t));
}

}  // namespace oracle
