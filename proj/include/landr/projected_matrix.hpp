#pragma once

#include <Eigen/Dense>
#include <cstddef>

namespace landr {

/// The (m+1) x m projection T̄ with A V_m = V_{m+1} T̄_m. Always real: the
/// Lanczos coefficients of a Hermitian operator are real.
///
/// Layout after a restart with k retained vectors: the leading k x k block
/// holds the projection of A onto the retained vectors (diagonal for Lan-DR,
/// dense for Minres-DR), row/column k carry the couplings to v_{k+1}, and
/// everything after is tridiagonal.
struct ProjectedMatrix {
  Eigen::MatrixXd t;
  std::size_t k = 0;     // retained leading columns
  std::size_t cols = 0;  // completed columns

  ProjectedMatrix() = default;
  explicit ProjectedMatrix(std::size_t m) : t(Eigen::MatrixXd::Zero(m + 1, m)) {}

  std::size_t capacity() const { return static_cast<std::size_t>(t.cols()); }

  /// T_j: the leading cols x cols square block.
  Eigen::MatrixXd square() const { return t.topLeftCorner(cols, cols); }
  /// T̄_j: the leading (cols+1) x cols block.
  Eigen::MatrixXd bar() const { return t.topLeftCorner(cols + 1, cols); }
  /// t_{j+1,j} for the last completed column.
  double last_coupling() const { return cols == 0 ? 0.0 : t(cols, cols - 1); }

  /// First row index that can be nonzero in column j.
  std::size_t first_row(std::size_t j) const {
    if (j <= k) return 0;
    return j - 1;
  }
};

}  // namespace landr
