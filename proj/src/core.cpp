#include "landr/core.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace landr {

namespace counters {
namespace {
std::atomic<std::uint64_t> g_matvecs{0};
std::atomic<std::uint64_t> g_vecops{0};
}  // namespace

void add_matvecs(std::uint64_t n) { g_matvecs.fetch_add(n, std::memory_order_relaxed); }
void add_vecops(std::uint64_t n) { g_vecops.fetch_add(n, std::memory_order_relaxed); }
std::uint64_t matvecs() { return g_matvecs.load(std::memory_order_relaxed); }
std::uint64_t vecops() { return g_vecops.load(std::memory_order_relaxed); }
void reset() {
  g_matvecs.store(0);
  g_vecops.store(0);
}
}  // namespace counters

namespace {

template <Scalar S>
using EVec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <Scalar S>
using EMat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <Scalar S>
Eigen::Map<const EVec<S>> cmap(std::span<const S> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}
template <Scalar S>
Eigen::Map<EVec<S>> map(std::span<S> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}
template <Scalar S>
Eigen::Map<const EMat<S>> cmap(const DenseBlock<S>& V, std::size_t ncols) {
  return {V.data(), static_cast<Eigen::Index>(V.rows()),
          static_cast<Eigen::Index>(ncols)};
}

}  // namespace

template <Scalar S>
S dot(std::span<const S> u, std::span<const S> v) {
  require_same_size(u.size(), v.size(), "dot");
  counters::add_vecops(1);
  S acc{0};
  for (std::size_t i = 0; i < u.size(); ++i) acc += conj(u[i]) * v[i];
  return acc;
}

template <Scalar S>
double norm2(std::span<const S> v) {
  counters::add_vecops(1);
  double acc = 0;
  for (const S& x : v) acc += abs2(x);
  return std::sqrt(acc);
}

template <Scalar S>
void axpy(S alpha, std::span<const S> x, std::span<S> y) {
  require_same_size(x.size(), y.size(), "axpy");
  counters::add_vecops(1);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

template <Scalar S>
void xpay(std::span<const S> x, S beta, std::span<S> y) {
  require_same_size(x.size(), y.size(), "xpay");
  counters::add_vecops(1);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + beta * y[i];
}

template <Scalar S>
void scale(S alpha, std::span<S> x) {
  counters::add_vecops(1);
  for (S& v : x) v *= alpha;
}

template <Scalar S>
bool all_finite(std::span<const S> v) {
  for (const S& x : v)
    if (!std::isfinite(real(x)) || !std::isfinite(std::imag(x))) return false;
  return true;
}

template <Scalar S>
void DenseBlock<S>::set_col(std::size_t j, std::span<const S> v) {
  require_same_size(v.size(), rows_, "DenseBlock::set_col");
  std::copy(v.begin(), v.end(), col(j).begin());
}

template <Scalar S>
void DenseBlock<S>::resize_cols(std::size_t cols) {
  data_.resize(rows_ * cols, S{0});
  cols_ = cols;
}

template <Scalar S>
void block_adjoint_times(const DenseBlock<S>& V, std::size_t ncols,
                         std::span<const S> v, std::span<S> out) {
  require_same_size(v.size(), V.rows(), "block_adjoint_times");
  require_same_size(out.size(), ncols, "block_adjoint_times(out)");
  if (ncols == 0) return;
  counters::add_vecops(ncols);
  map(out).noalias() = cmap(V, ncols).adjoint() * cmap(v);
}

template <Scalar S>
void block_times_add(const DenseBlock<S>& V, std::span<const S> coef, S alpha,
                     std::span<S> y) {
  require_same_size(y.size(), V.rows(), "block_times_add");
  if (coef.empty()) return;
  counters::add_vecops(coef.size());
  map(y).noalias() += alpha * (cmap(V, coef.size()) * cmap(coef));
}

template <Scalar S>
void block_times_small(const DenseBlock<S>& V, std::span<const S> C,
                       std::size_t crows, std::size_t ccols, DenseBlock<S>& out) {
  require_same_size(C.size(), crows * ccols, "block_times_small");
  if (out.rows() != V.rows() || out.cols() < ccols)
    throw DimensionError("block_times_small: output block too small");
  counters::add_vecops(crows * ccols);
  Eigen::Map<const EMat<S>> c(C.data(), crows, ccols);
  Eigen::Map<EMat<S>> o(out.data(), out.rows(), ccols);
  o.noalias() = cmap(V, crows) * c;
}

template <Scalar S>
double orthodefect(const DenseBlock<S>& V, std::size_t ncols) {
  if (ncols == 0) return 0.0;
  auto Vm = cmap(V, ncols);
  EMat<S> G = Vm.adjoint() * Vm;
  G -= EMat<S>::Identity(ncols, ncols);
  // G is Hermitian: its 2-norm is the largest eigenvalue magnitude.
  Eigen::SelfAdjointEigenSolver<EMat<S>> es(G, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

#define LANDR_INSTANTIATE(S)                                                   \
  template S dot<S>(std::span<const S>, std::span<const S>);                   \
  template double norm2<S>(std::span<const S>);                                \
  template void axpy<S>(S, std::span<const S>, std::span<S>);                  \
  template void xpay<S>(std::span<const S>, S, std::span<S>);                  \
  template void scale<S>(S, std::span<S>);                                     \
  template bool all_finite<S>(std::span<const S>);                             \
  template class DenseBlock<S>;                                                \
  template void block_adjoint_times<S>(const DenseBlock<S>&, std::size_t,      \
                                       std::span<const S>, std::span<S>);      \
  template void block_times_add<S>(const DenseBlock<S>&, std::span<const S>, S, \
                                   std::span<S>);                              \
  template void block_times_small<S>(const DenseBlock<S>&, std::span<const S>, \
                                     std::size_t, std::size_t, DenseBlock<S>&); \
  template double orthodefect<S>(const DenseBlock<S>&, std::size_t);

LANDR_INSTANTIATE(double)
LANDR_INSTANTIATE(Complex)

}  // namespace landr
