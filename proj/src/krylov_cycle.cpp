#include "landr/krylov_cycle.hpp"

#include <algorithm>
#include <cmath>

namespace landr {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max-iterations";
    case SolveStatus::Indefinite: return "indefinite";
    case SolveStatus::Stagnated: return "stagnated";
    case SolveStatus::Unstable: return "unstable";
  }
  return "?";
}

std::optional<std::uint64_t> ConvergenceHistory::matvecs_to(double tol) const {
  for (const auto& p : points)
    if (p.resid_rel <= tol) return p.matvecs;
  return std::nullopt;
}

template <Scalar S>
KrylovCycle<S>::KrylovCycle(const LinearOperator<S>& op, std::size_t m, ReorthPolicy policy,
                            bool full_first_cycle)
    : op_(op),
      m_(m),
      policy_(policy),
      full_first_(full_first_cycle),
      omega_(m, op.size()) {
  if (m == 0 || m >= op.size() + 1)
    throw DimensionError("KrylovCycle: need 1 <= m <= n");
  policy_.validate();
  basis_.v = DenseBlock<S>(op.size(), m + 1);
}

template <Scalar S>
void KrylovCycle<S>::start(std::span<const S> start) {
  require_same_size(start.size(), op_.size(), "KrylovCycle::start");
  const double nrm = norm2<S>(start);
  if (nrm == 0.0) throw std::invalid_argument("KrylovCycle::start: zero starting vector");
  auto v0 = basis_.v.col(0);
  std::copy(start.begin(), start.end(), v0.begin());
  scale<S>(S{1.0 / nrm}, v0);
  basis_.filled = 1;
  t_ = ProjectedMatrix(m_);
  cycle_ = 1;
  anorm_ = 0;
  breakdown_ = false;
  omega_.reset(1);
}

template <Scalar S>
void KrylovCycle<S>::reorthogonalize_column(std::span<S> w, std::size_t column,
                                            std::size_t range_end, int iter, double& beta) {
  if (range_end == 0) return;
  GramSchmidtResult gs = orthogonalize_against<S>(w, basis_.v, range_end);
  beta = gs.norm_after;
  log_.events.push_back({cycle_, iter, column, range_end});
  omega_.mark_reorthogonalized(column, range_end);
}

template <Scalar S>
ExtendStatus KrylovCycle<S>::extend(const StepObserver& observe) {
  const std::size_t n = op_.size();
  const std::size_t k = t_.k;
  const bool first_cycle = cycle_ == 1;
  const bool pro = policy_.kind == ReorthKind::PRO || policy_.kind == ReorthKind::KPRO;
  Vector<S> w(n);
  std::vector<S> coupling;
  ReorthRange pending = ReorthRange::None;

  for (std::size_t j = t_.cols; j < m_; ++j) {
    const int iter = static_cast<int>(j - k) + 1;
    op_.apply(basis_.v.col(j), std::span<S>(w));

    // w -= sum_{l<j} T(l,j) v_l : the arrow column needs all retained
    // vectors, the tridiagonal tail only v_{j-1}.
    const std::size_t lo = t_.first_row(j);
    if (lo < j) {
      if (j - lo == 1) {
        axpy<S>(S{-t_.t(j - 1, j)}, basis_.v.col(j - 1), w);
      } else {
        coupling.assign(j, S{0});
        for (std::size_t l = lo; l < j; ++l) coupling[l] = -t_.t(l, j);
        block_times_add<S>(basis_.v, coupling, S{1}, w);
      }
    }
    const double alpha = real(dot<S>(basis_.v.col(j), w));
    axpy<S>(S{-alpha}, basis_.v.col(j), w);
    t_.t(j, j) = alpha;
    double beta = norm2<S>(w);

    const double prev_beta = j > 0 ? std::abs(t_.t(j, j - 1)) : 0.0;
    anorm_ = std::max(anorm_, std::abs(alpha) + beta + prev_beta);

    // Decide on reorthogonalization of the new vector (column j+1).
    ReorthDirective directive;
    const ReorthRange krange = policy_.k_variant() ? ReorthRange::FirstK : ReorthRange::AllFilled;
    if (first_cycle && full_first_) {
      directive = {ReorthRange::AllFilled, false};
    } else if (!first_cycle && iter == 1) {
      directive = {krange, false};  // v_{k+2}, always
    } else {
      if (pro) {
        t_.t(j + 1, j) = beta;
        omega_.update(t_, j);
      }
      if (pending != ReorthRange::None) {
        directive = {pending, false};
      } else {
        directive = policy_step(policy_, iter, pro ? &omega_ : nullptr, k);
      }
    }
    pending = directive.pair ? directive.range : ReorthRange::None;

    if (omega_trace_ != nullptr && pro && !(first_cycle && full_first_) && iter > 1 &&
        beta > 0) {
      std::vector<S> h(j + 1);
      Vector<S> unit(w);
      scale<S>(S{1.0 / beta}, unit);
      block_adjoint_times<S>(basis_.v, j + 1, unit, h);
      const std::size_t end = policy_.kind == ReorthKind::KPRO ? k : j + 1;
      double measured = 0;
      for (std::size_t i = 0; i < end; ++i) measured = std::max(measured, std::abs(h[i]));
      omega_trace_->push_back({cycle_, iter, directive.active(), omega_.max_estimate(end), measured});
    }

    if (directive.active()) {
      const std::size_t range_end = directive.range == ReorthRange::FirstK ? k : j + 1;
      reorthogonalize_column(w, j + 1, range_end, iter, beta);
    }
    if (!first_cycle && iter == 1) omega_.reset(j + 2);

    if (beta <= 1e-14 * anorm_) {
      t_.t(j + 1, j) = 0.0;
      t_.cols = j + 1;
      basis_.filled = j + 1;
      breakdown_ = true;
      if (observe) observe(j);
      return ExtendStatus::Breakdown;
    }
    t_.t(j + 1, j) = beta;
    if (j + 1 < m_) t_.t(j, j + 1) = beta;
    auto next = basis_.v.col(j + 1);
    std::copy(w.begin(), w.end(), next.begin());
    scale<S>(S{1.0 / beta}, next);
    basis_.filled = j + 2;
    t_.cols = j + 1;
    if (observe) observe(j);
  }
  return ExtendStatus::Complete;
}

template <Scalar S>
void KrylovCycle<S>::restart(DenseBlock<S>&& retained, const Eigen::MatrixXd& leading) {
  const std::size_t k = static_cast<std::size_t>(leading.cols());
  if (static_cast<std::size_t>(leading.rows()) != k + 1 || k >= m_)
    throw DimensionError("KrylovCycle::restart: leading block must be (k+1) x k with k < m");
  if (retained.rows() != op_.size()) throw DimensionError("KrylovCycle::restart: bad basis");
  retained.resize_cols(m_ + 1);
  basis_.v = std::move(retained);
  basis_.filled = k + 1;

  t_ = ProjectedMatrix(m_);
  t_.k = k;
  t_.cols = k;
  t_.t.topLeftCorner(k + 1, k) = leading;
  for (std::size_t i = 0; i < k; ++i) t_.t(i, k) = leading(k, i);
  ++cycle_;
  breakdown_ = false;

  // v_{k+1}, always against the retained vectors.
  auto vk = basis_.v.col(k);
  GramSchmidtResult gs = reorthogonalize<S>(vk, basis_.v, k);
  if (k > 0) log_.events.push_back({cycle_, 0, k, k});
  (void)gs;
  omega_.reset(k + 1);
}

template class KrylovCycle<double>;
template class KrylovCycle<Complex>;

}  // namespace landr
