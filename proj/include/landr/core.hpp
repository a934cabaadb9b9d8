#pragma once

// Scalar-generic dense kernels shared by every solver.
//
// Every length-n kernel bumps a process-wide vector-operation counter; every
// operator application bumps the matvec counter. Solvers report costs as
// differences of CounterSnapshot values.

#include <atomic>
#include <complex>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace landr {

using Complex = std::complex<double>;

template <class S>
concept Scalar = std::same_as<S, double> || std::same_as<S, Complex>;

template <Scalar S>
using Vector = std::vector<S>;

template <Scalar S>
inline constexpr bool is_complex_v = std::same_as<S, Complex>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline double conj(double x) { return x; }
inline Complex conj(Complex x) { return std::conj(x); }
inline double real(double x) { return x; }
inline double real(Complex x) { return x.real(); }
inline double abs2(double x) { return x * x; }
inline double abs2(Complex x) { return std::norm(x); }

// ---------------------------------------------------------------------------
// Instrumentation

namespace counters {

void add_matvecs(std::uint64_t n);
void add_vecops(std::uint64_t n);
std::uint64_t matvecs();
std::uint64_t vecops();
/// Only the harness should call this; solvers work with snapshots.
void reset();

}  // namespace counters

struct CounterSnapshot {
  std::uint64_t matvecs = 0;
  std::uint64_t vecops = 0;

  static CounterSnapshot now() {
    return {counters::matvecs(), counters::vecops()};
  }
  CounterSnapshot since(const CounterSnapshot& start) const {
    return {matvecs - start.matvecs, vecops - start.vecops};
  }
};

// ---------------------------------------------------------------------------
// BLAS-1

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw DimensionError(std::string(what) + ": length mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
}

/// <u, v> with the left argument conjugated.
template <Scalar S>
S dot(std::span<const S> u, std::span<const S> v);

template <Scalar S>
double norm2(std::span<const S> v);

/// y += alpha * x
template <Scalar S>
void axpy(S alpha, std::span<const S> x, std::span<S> y);

/// y = x + beta * y
template <Scalar S>
void xpay(std::span<const S> x, S beta, std::span<S> y);

template <Scalar S>
void scale(S alpha, std::span<S> x);

// Convenience overloads so call sites can pass vectors directly.
template <Scalar S>
S dot(const Vector<S>& u, const Vector<S>& v) {
  return dot<S>(std::span<const S>(u), std::span<const S>(v));
}
template <Scalar S>
double norm2(const Vector<S>& v) {
  return norm2<S>(std::span<const S>(v));
}
template <Scalar S>
void axpy(S alpha, const Vector<S>& x, Vector<S>& y) {
  axpy<S>(alpha, std::span<const S>(x), std::span<S>(y));
}

template <Scalar S>
bool all_finite(std::span<const S> v);

// ---------------------------------------------------------------------------
// Column-major block of length-n vectors.

template <Scalar S>
class DenseBlock {
 public:
  DenseBlock() = default;
  DenseBlock(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, S{0}) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<S> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const S> col(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }

  S* data() { return data_.data(); }
  const S* data() const { return data_.data(); }

  void set_col(std::size_t j, std::span<const S> v);
  /// Change column count; existing leading columns are kept.
  void resize_cols(std::size_t cols);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<S> data_;
};

/// out[0..ncols) = V[:, 0..ncols)^H v. Counts ncols vector ops.
template <Scalar S>
void block_adjoint_times(const DenseBlock<S>& V, std::size_t ncols,
                         std::span<const S> v, std::span<S> out);

/// y += alpha * V[:, 0..coef.size()) * coef. Counts coef.size() vector ops.
template <Scalar S>
void block_times_add(const DenseBlock<S>& V, std::span<const S> coef, S alpha,
                     std::span<S> y);

/// out = V[:, 0..C.rows) * C, where C is a (small) row-major-free column-major
/// matrix with the given shape. Counts C.rows * C.cols vector ops.
template <Scalar S>
void block_times_small(const DenseBlock<S>& V, std::span<const S> C,
                       std::size_t crows, std::size_t ccols, DenseBlock<S>& out);

/// ||V^H V - I||_2 over the leading ncols columns. Uninstrumented.
template <Scalar S>
double orthodefect(const DenseBlock<S>& V, std::size_t ncols);

template <Scalar S>
double orthodefect(const DenseBlock<S>& V) {
  return orthodefect(V, V.cols());
}

}  // namespace landr
