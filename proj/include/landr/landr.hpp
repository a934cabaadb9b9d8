#pragma once

// Lan-DR(m,k): restarted Lanczos that solves A x = b with a Galerkin
// projection while computing k Ritz pairs, which are kept in the subspace
// across restarts:
//
//   span{y_1, ..., y_k, r_0, A r_0, ..., A^{m-k-1} r_0}
//
// Each cycle keeps A V_m = V_{m+1} T̄_m, with T̄_m diagonal-plus-arrow in its
// leading (k+1) x (k+1) block and tridiagonal after that. Its leading part
// gives A V_k = V_{k+1} T̄_k, which is what later right-hand sides deflate
// with.

#include <optional>

#include "landr/history.hpp"
#include "landr/krylov_cycle.hpp"

namespace landr {

enum class EigenTarget { SmallestMagnitude, SmallestAlgebraic, LargestAlgebraic };

EigenTarget parse_target(std::string_view text);
std::string to_string(EigenTarget t);

struct SolverConfig {
  std::size_t m = 100;
  std::size_t k = 40;
  int max_cycles = 100;
  double lin_rtol = 1e-8;
  /// Eigenresidual target on ||A y - theta y|| for unit y.
  double eig_tol = 1e-8;
  std::size_t n_eig_wanted = 0;
  EigenTarget target = EigenTarget::SmallestMagnitude;
  ReorthPolicy policy = ReorthPolicy::k_so();
  bool full_first_cycle = true;
  /// Solve the linear system (step 4); false gives eigenvalue-only mode.
  bool solve_linear = true;
  /// Run exactly max_cycles even once everything has converged.
  bool run_all_cycles = false;
  /// Also retain this many of the largest algebraic Ritz pairs.
  std::size_t n_extra_largest = 0;
  bool record_orthodefect = true;
  bool trace_omega = false;

  std::size_t retained() const { return k + n_extra_largest; }
  /// Throws std::invalid_argument with a readable message.
  void validate(std::size_t n) const;
};

struct RitzSet {
  std::vector<double> values;     // theta_i, target order
  Eigen::MatrixXd vectors;        // g_i as columns (m x k), orthonormal
  std::vector<double> residuals;  // |t_{m+1,m} g_{m,i}|
  std::vector<double> couplings;  // t_{m+1,m} g_{m,i}
  std::size_t size() const { return values.size(); }
};

/// (V_{k+1}, T̄_k) with A V_k = V_{k+1} T̄_k. Immutable once built; safe to
/// share across concurrent deflated solves.
template <Scalar S>
struct DeflationSpace {
  DenseBlock<S> v;         // n x (k+1)
  Eigen::MatrixXd tbar;    // (k+1) x k

  std::size_t k() const { return static_cast<std::size_t>(tbar.cols()); }
  bool empty() const { return k() == 0; }
};

/// Select k eigenpairs of T_m by target (ties by original index) and attach
/// shortcut residual norms. `extra_largest` more pairs with the largest
/// algebraic values are appended when not already selected.
RitzSet compute_ritz(const ProjectedMatrix& T, std::size_t k, EigenTarget target,
                     std::size_t extra_largest = 0);

template <Scalar S>
Vector<S> ritz_vector(const KrylovBasis<S>& V, const RitzSet& ritz, std::size_t i);

template <Scalar S>
struct GalerkinUpdate {
  Vector<S> x;
  Vector<S> r;
  Vector<S> coefficients;  // d
  bool stagnated = false;
};

/// Step 4: solve T_m d = c, x = x0 + V_m d, r = r0 - V_{m+1} T̄_m d. When T_m is
/// numerically singular the iterate is left unchanged and `stagnated` set.
template <Scalar S>
GalerkinUpdate<S> galerkin_update(const KrylovBasis<S>& V, const ProjectedMatrix& T,
                                  std::span<const S> x0, std::span<const S> r0,
                                  std::span<const S> c);

/// Step 5 as a pure function: the retained basis [y_1..y_k, v_{m+1}] and its
/// (k+1) x k projection.
template <Scalar S>
DeflationSpace<S> restart_space(const KrylovBasis<S>& V, const ProjectedMatrix& T,
                                const RitzSet& ritz);

/// Incremental LDL^T of T_j that yields the Galerkin residual norm
/// |t_{j+1,j} d_j| after every Lanczos step, without forming d.
template <Scalar S>
class GalerkinTracker {
 public:
  GalerkinTracker(std::size_t m, std::span<const S> c);
  /// Row j of T must be complete through column j.
  void add_row(const ProjectedMatrix& T, std::size_t j);
  /// |t_{j+1,j} d_j| for the last added row.
  double residual(const ProjectedMatrix& T) const;

 private:
  Eigen::MatrixXd l_;
  std::vector<double> d_;
  std::vector<S> z_;
  std::vector<S> c_;
  std::size_t rows_ = 0;
};

template <Scalar S>
struct LanDrResult {
  Vector<S> x;
  Vector<S> r;
  RitzSet ritz;
  DeflationSpace<S> deflation;
  ConvergenceHistory history;
  SolveStatus status = SolveStatus::MaxIterations;
  bool linear_converged = false;
  bool eigen_converged = false;
  bool invariant_subspace = false;
  int cycles = 0;
};

/// Step-by-step driver. lan_dr() below runs the whole loop; the individual
/// steps are public for tests and for instrumentation.
template <Scalar S>
class LanDrEngine {
 public:
  LanDrEngine(const LinearOperator<S>& op, SolverConfig cfg);

  /// Step 2 from the given starting residual.
  ExtendStatus first_cycle(std::span<const S> r0);
  /// Step 3.
  RitzSet compute_ritz() const;
  /// Step 5.
  void restart(const RitzSet& ritz);
  /// Step 6.
  ExtendStatus continue_cycle();

  const KrylovCycle<S>& cycle() const { return cycle_; }
  KrylovCycle<S>& cycle() { return cycle_; }
  const KrylovBasis<S>& basis() const { return cycle_.basis(); }
  const ProjectedMatrix& projection() const { return cycle_.projection(); }
  const SolverConfig& config() const { return cfg_; }

 private:
  const LinearOperator<S>& op_;
  SolverConfig cfg_;
  KrylovCycle<S> cycle_;
};

template <Scalar S>
LanDrResult<S> lan_dr(const LinearOperator<S>& op, std::span<const S> b,
                      std::span<const S> x0, const SolverConfig& cfg);

}  // namespace landr
