#pragma once

#include <functional>

#include "landr/history.hpp"
#include "landr/operator.hpp"
#include "landr/projected_matrix.hpp"
#include "landr/reorth.hpp"

namespace landr {

/// The growing basis V_{m+1}; columns [0, filled) are live.
template <Scalar S>
struct KrylovBasis {
  DenseBlock<S> v;
  std::size_t filled = 0;
};

enum class ExtendStatus { Complete, Breakdown };

/// One restarted Lanczos process: basis, projection, and reorthogonalization
/// bookkeeping. Lan-DR and Minres-DR differ only in what they do between
/// cycles, so both drive this.
template <Scalar S>
class KrylovCycle {
 public:
  /// Called after column j of T̄ is complete and v_{j+1} is stored.
  using StepObserver = std::function<void(std::size_t j)>;

  KrylovCycle(const LinearOperator<S>& op, std::size_t m, ReorthPolicy policy,
              bool full_first_cycle);

  /// Begin the first cycle with v_1 = start / ||start||.
  void start(std::span<const S> start);

  /// Grow the basis to m+1 columns (step 2 / step 6), or stop at a lucky
  /// breakdown with the basis truncated.
  ExtendStatus extend(const StepObserver& observe = {});

  /// Replace the basis by `retained` (k+1 live columns, the last being the
  /// new v_{k+1}) and the projection by `leading` ((k+1) x k, row k holding
  /// the couplings). v_{k+1} is reorthogonalized against the first k.
  void restart(DenseBlock<S>&& retained, const Eigen::MatrixXd& leading);

  const LinearOperator<S>& op() const { return op_; }
  const KrylovBasis<S>& basis() const { return basis_; }
  const ProjectedMatrix& projection() const { return t_; }
  std::size_t m() const { return m_; }
  int cycle() const { return cycle_; }
  const ReorthPolicy& policy() const { return policy_; }
  double norm_estimate() const { return anorm_; }
  bool broke_down() const { return breakdown_; }

  ReorthLog& reorth_log() { return log_; }
  void enable_omega_trace(std::vector<OmegaSample>* sink) { omega_trace_ = sink; }

 private:
  void reorthogonalize_column(std::span<S> w, std::size_t column, std::size_t range_end,
                              int iter, double& beta);

  const LinearOperator<S>& op_;
  std::size_t m_;
  ReorthPolicy policy_;
  bool full_first_;
  KrylovBasis<S> basis_;
  ProjectedMatrix t_;
  OmegaState omega_;
  ReorthLog log_;
  std::vector<OmegaSample>* omega_trace_ = nullptr;
  int cycle_ = 0;
  double anorm_ = 0;
  bool breakdown_ = false;
};

}  // namespace landr
