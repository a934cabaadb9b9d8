#pragma once

// Minimum-residual counterparts for indefinite Hermitian systems:
// Minres-DR(m,k) restarts with harmonic Ritz vectors, Minres is the
// Paige-Saunders method, and D-Minres deflates with the space Minres-DR
// leaves behind.

#include "landr/dcg.hpp"

namespace landr {

struct HarmonicRitzSet {
  std::vector<double> values;     // target order
  Eigen::MatrixXd vectors;        // g_i, unit 2-norm columns (m x k)
  std::vector<double> residuals;  // ||T̄ g_i - theta_i [g_i; 0]||
  double shift = 0;               // nonzero when T_m was singular
  std::size_t size() const { return values.size(); }
};

/// k harmonic Ritz pairs of T̄ with respect to the origin, selected by
/// `target` (SmallestMagnitude means nearest the origin).
HarmonicRitzSet harmonic_ritz(const ProjectedMatrix& T, std::size_t k,
                              EigenTarget target = EigenTarget::SmallestMagnitude);

/// (m+1) x (k+1) with orthonormal columns: [orth(G); 0] and the
/// orthonormalized [-t_{m+1,m} T_m^{-1} e_m; 1].
Eigen::MatrixXd restart_map(const ProjectedMatrix& T, const HarmonicRitzSet& h);

template <Scalar S>
struct MinresUpdate {
  Vector<S> x;
  Vector<S> r;
  Vector<S> coefficients;
  double ls_residual = 0;  // min ||c - T̄ d||
};

/// min ||c - T̄_m d|| with x = x0 + V_m d, r = r0 - V_{m+1} T̄_m d.
template <Scalar S>
MinresUpdate<S> minres_update(const KrylovBasis<S>& V, const ProjectedMatrix& T,
                              std::span<const S> x0, std::span<const S> r0,
                              std::span<const S> c);

/// V_{m+1} P and P^T T̄_m P_{m,k}; the linear iterate is untouched.
template <Scalar S>
DeflationSpace<S> minres_restart(const KrylovBasis<S>& V, const ProjectedMatrix& T,
                                 const Eigen::MatrixXd& P);

/// Residual norm of min ||c - T̄_j d|| after every Lanczos step, by Givens QR
/// of the columns as they arrive.
template <Scalar S>
class LeastSquaresTracker {
 public:
  LeastSquaresTracker(std::size_t m, std::span<const S> c);
  void add_column(const ProjectedMatrix& T, std::size_t j);
  double residual() const;

 private:
  struct Rotation {
    std::size_t a, b;
    double c, s;
  };
  std::vector<Rotation> rot_;
  std::vector<S> g_;
  std::size_t cols_ = 0;
};

struct MinresOptions {
  double rtol = 1e-8;
  int max_iterations = 10000;
};

template <Scalar S>
SolveResult<S> minres(const LinearOperator<S>& op, std::span<const S> b, std::span<const S> x0,
                      const MinresOptions& opts);

/// Minres from a known iterate and residual (no initial matvec).
template <Scalar S>
SolveResult<S> minres_from(const LinearOperator<S>& op, std::span<const S> b, Vector<S> x,
                           Vector<S> r, double bnorm, const MinresOptions& opts);

template <Scalar S>
struct MinresDrResult {
  Vector<S> x;
  Vector<S> r;
  HarmonicRitzSet ritz;
  DeflationSpace<S> deflation;
  ConvergenceHistory history;
  SolveStatus status = SolveStatus::MaxIterations;
  bool linear_converged = false;
  bool eigen_converged = false;
  int cycles = 0;
  /// max ||P^T P - I|| over all restarts.
  double max_restart_defect = 0;
};

template <Scalar S>
MinresDrResult<S> minres_dr(const LinearOperator<S>& op, std::span<const S> b,
                            std::span<const S> x0, const SolverConfig& cfg);

/// Galerkin projection over `ds` (dense T_k allowed), then Minres.
template <Scalar S>
SolveResult<S> d_minres(const LinearOperator<S>& op, std::span<const S> b,
                        std::span<const S> x0, const DeflationSpace<S>& ds,
                        const MinresOptions& opts);

}  // namespace landr
