#pragma once

// Deflated CG for the second and later right-hand sides: a Galerkin
// projection over a DeflationSpace (A V_k = V_{k+1} T̄_k, so no extra
// matvecs), then plain CG.

#include "landr/landr.hpp"

namespace landr {

struct CgOptions {
  double rtol = 1e-8;
  int max_iterations = 10000;
  /// Recompute r = b - A x every this many iterations (0 disables).
  int replace_every = 100;
};

template <Scalar S>
struct SolveResult {
  Vector<S> x;
  Vector<S> r;
  ConvergenceHistory history;
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
};

template <Scalar S>
struct Projection {
  Vector<S> x;
  Vector<S> r;
  std::size_t excluded = 0;  // directions dropped for a zero Ritz value
};

/// Solve T_k d = V_k^H r0 and return x0 + V_k d, r0 - V_{k+1} T̄_k d.
/// T_k may be diagonal (Lan-DR) or dense (Minres-DR).
template <Scalar S>
Projection<S> deflation_project(const DeflationSpace<S>& ds, std::span<const S> x0,
                                std::span<const S> r0);

/// Previously computed solutions, kept orthonormal together with their
/// images under A. Used to project related right-hand sides.
template <Scalar S>
class SolutionSpace {
 public:
  explicit SolutionSpace(std::size_t n) : n_(n) {}

  /// Add x together with A x (typically b - r, so no matvec is spent).
  /// Returns false when x is numerically in the current span.
  bool add(std::span<const S> x, std::span<const S> ax);
  std::size_t size() const { return u_.size(); }

  /// Galerkin projection: x0 + U y, r0 - (AU) y with (U^H A U) y = U^H r0.
  Projection<S> project(std::span<const S> x0, std::span<const S> r0) const;

 private:
  std::size_t n_;
  std::vector<Vector<S>> u_;
  std::vector<Vector<S>> au_;
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> gram_;  // U^H A U
};

template <Scalar S>
SolveResult<S> cg(const LinearOperator<S>& op, std::span<const S> b, std::span<const S> x0,
                  const CgOptions& opts);

/// CG from a known iterate and residual (no initial matvec). `bnorm` scales
/// the recorded relative residuals.
template <Scalar S>
SolveResult<S> cg_from(const LinearOperator<S>& op, std::span<const S> b, Vector<S> x,
                       Vector<S> r, double bnorm, const CgOptions& opts);

template <Scalar S>
SolveResult<S> d_cg(const LinearOperator<S>& op, std::span<const S> b, std::span<const S> x0,
                    const DeflationSpace<S>& ds, const CgOptions& opts,
                    const SolutionSpace<S>* previous = nullptr);

}  // namespace landr
