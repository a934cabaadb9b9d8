#pragma once

// O'Leary's block conjugate gradient for s right-hand sides at once.
// No deflation of converged or dependent columns: loss of rank in the
// direction block is reported as SolveStatus::Unstable.

#include "landr/dcg.hpp"

namespace landr {

struct BlockCgOptions {
  double rtol = 1e-8;
  int max_iterations = 5000;
  /// Recompute R = B - A X every this many block iterations (0 disables).
  int replace_every = 50;
  /// Abort when sigma_min / sigma_max of the column-normalized direction
  /// block falls below this, or P^H A P stops being positive definite.
  double rcond_min = 1e-12;
};

template <Scalar S>
struct BlockCgResult {
  DenseBlock<S> x;
  std::vector<ConvergenceHistory> histories;  // one per column
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
  std::uint64_t matvecs = 0;
  std::uint64_t vecops = 0;
  double last_rcond = 1.0;
};

template <Scalar S>
BlockCgResult<S> block_cg(const LinearOperator<S>& op, const DenseBlock<S>& B,
                          const BlockCgOptions& opts);

}  // namespace landr
