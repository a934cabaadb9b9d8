#include "landr/dcg.hpp"

#include <algorithm>
#include <cmath>

namespace landr {

namespace {

template <Scalar S>
using EVec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <Scalar S>
using EMat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <Scalar S>
Vector<S> initial_residual(const LinearOperator<S>& op, std::span<const S> b,
                           std::span<const S> x0) {
  Vector<S> r(b.begin(), b.end());
  const bool zero = x0.empty() || std::all_of(x0.begin(), x0.end(), [](S v) { return v == S{0}; });
  if (!zero) {
    require_same_size(x0.size(), op.size(), "initial guess");
    Vector<S> ax = op.apply(x0);
    axpy<S>(S{-1}, std::span<const S>(ax), std::span<S>(r));
  }
  return r;
}

template <Scalar S>
SolveResult<S> run_cg(const LinearOperator<S>& op, std::span<const S> b, Vector<S> x,
                      Vector<S> r, double bnorm, const CgOptions& opts,
                      const CounterSnapshot& start) {
  SolveResult<S> res;
  const std::size_t n = op.size();
  auto record = [&](int it, double rn) {
    const CounterSnapshot used = CounterSnapshot::now().since(start);
    res.history.points.push_back({0, it, used.matvecs, used.vecops, rn / bnorm});
  };

  double rho = real(dot<S>(r, r));
  record(0, std::sqrt(rho));
  if (bnorm == 0.0 || std::sqrt(rho) <= opts.rtol * bnorm) {
    res.status = SolveStatus::Converged;
    if (bnorm == 0.0) std::fill(x.begin(), x.end(), S{0}), std::fill(r.begin(), r.end(), S{0});
  } else {
    Vector<S> p(r);
    Vector<S> ap(n);
    Vector<S> tr(n);
    int it = 0;
    bool restart = false;
    // Swap in the true residual. A large gap means the recursion followed a
    // different system (e.g. an inexact projected start), so also restart p.
    auto replace_residual = [&](Vector<S>& rr) {
      op.apply(x, tr);
      double gap = 0.0, size = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const S t = b[i] - tr[i];
        gap += std::norm(t - rr[i]);
        size += std::norm(t);
        rr[i] = t;
      }
      counters::add_vecops(2);
      restart = std::sqrt(gap) > 0.5 * std::sqrt(size);
      return true;
    };
    while (it < opts.max_iterations) {
      op.apply(p, ap);
      const double pap = real(dot<S>(p, ap));
      if (!(pap > 0.0)) {
        res.status = SolveStatus::Indefinite;
        break;
      }
      const S alpha{rho / pap};
      axpy<S>(alpha, p, x);
      ++it;
      bool replaced = false;
      if (opts.replace_every > 0 && it % opts.replace_every == 0) {
        axpy<S>(-alpha, ap, r);
        replaced = replace_residual(r);
      } else {
        axpy<S>(-alpha, ap, r);
      }
      double rho_new = real(dot<S>(r, r));
      if (std::sqrt(rho_new) <= opts.rtol * bnorm && !replaced) {
        // Confirm against b - A x before stopping.
        replaced = replace_residual(r);
        rho_new = real(dot<S>(r, r));
      }
      record(it, std::sqrt(rho_new));
      if (std::sqrt(rho_new) <= opts.rtol * bnorm) {
        res.status = SolveStatus::Converged;
        break;
      }
      if (restart) {
        p = r;
        restart = false;
      } else {
        xpay<S>(std::span<const S>(r), S{rho_new / rho}, std::span<S>(p));
      }
      rho = rho_new;
    }
    res.iterations = it;
  }
  const CounterSnapshot used = CounterSnapshot::now().since(start);
  res.history.matvecs = used.matvecs;
  res.history.vecops = used.vecops;
  res.x = std::move(x);
  res.r = std::move(r);
  return res;
}

}  // namespace

template <Scalar S>
Projection<S> deflation_project(const DeflationSpace<S>& ds, std::span<const S> x0,
                                std::span<const S> r0) {
  Projection<S> out;
  out.x.assign(x0.begin(), x0.end());
  out.r.assign(r0.begin(), r0.end());
  const std::size_t k = ds.k();
  if (k == 0) return out;
  require_same_size(r0.size(), ds.v.rows(), "deflation_project");

  std::vector<S> c(k);
  block_adjoint_times<S>(ds.v, k, r0, c);

  // T_k is symmetric: diagonal from Lan-DR, dense from Minres-DR. A spectral
  // solve handles both and lets zero Ritz values drop out.
  const auto K = static_cast<Eigen::Index>(k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ds.tbar.topRows(K));
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double lmax = lam.cwiseAbs().maxCoeff();
  EVec<S> rhs = Eigen::Map<const EVec<S>>(c.data(), K);
  EVec<S> coef = es.eigenvectors().transpose().template cast<S>() * rhs;
  for (Eigen::Index i = 0; i < K; ++i) {
    if (lmax == 0.0 || std::abs(lam(i)) <= 1e-14 * lmax) {
      coef(i) = S{0};
      ++out.excluded;
    } else {
      coef(i) /= lam(i);
    }
  }
  const EVec<S> d = es.eigenvectors().template cast<S>() * coef;
  std::vector<S> dv(d.data(), d.data() + K);
  block_times_add<S>(ds.v, dv, S{1}, out.x);

  const EVec<S> td = ds.tbar.template cast<S>() * d;
  std::vector<S> tdv(td.data(), td.data() + td.size());
  block_times_add<S>(ds.v, tdv, S{-1}, out.r);
  return out;
}

template <Scalar S>
bool SolutionSpace<S>::add(std::span<const S> x, std::span<const S> ax) {
  require_same_size(x.size(), n_, "SolutionSpace::add");
  require_same_size(ax.size(), n_, "SolutionSpace::add");
  Vector<S> u(x.begin(), x.end());
  Vector<S> au(ax.begin(), ax.end());
  const double before = norm2<S>(u);
  if (before == 0.0) return false;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < u_.size(); ++i) {
      const S h = dot<S>(u_[i], u);
      axpy<S>(-h, u_[i], u);
      axpy<S>(-h, au_[i], au);
    }
  }
  const double after = norm2<S>(u);
  if (after <= 1e-12 * before) return false;
  scale<S>(S{1.0 / after}, std::span<S>(u));
  scale<S>(S{1.0 / after}, std::span<S>(au));

  const auto s = static_cast<Eigen::Index>(u_.size());
  u_.push_back(std::move(u));
  au_.push_back(std::move(au));
  gram_.conservativeResize(s + 1, s + 1);
  for (Eigen::Index i = 0; i <= s; ++i) {
    gram_(i, s) = dot<S>(u_[static_cast<std::size_t>(i)], au_.back());
    gram_(s, i) = conj(gram_(i, s));
  }
  gram_(s, s) = S{real(gram_(s, s))};
  return true;
}

template <Scalar S>
Projection<S> SolutionSpace<S>::project(std::span<const S> x0, std::span<const S> r0) const {
  Projection<S> out;
  out.x.assign(x0.begin(), x0.end());
  out.r.assign(r0.begin(), r0.end());
  if (u_.empty()) return out;
  const auto s = static_cast<Eigen::Index>(u_.size());
  EVec<S> c(s);
  for (Eigen::Index i = 0; i < s; ++i) c(i) = dot<S>(std::span<const S>(u_[static_cast<std::size_t>(i)]), r0);
  const EVec<S> y = gram_.fullPivLu().solve(c);
  for (Eigen::Index i = 0; i < s; ++i) {
    axpy<S>(y(i), u_[static_cast<std::size_t>(i)], out.x);
    axpy<S>(-y(i), au_[static_cast<std::size_t>(i)], out.r);
  }
  return out;
}

template <Scalar S>
SolveResult<S> cg(const LinearOperator<S>& op, std::span<const S> b, std::span<const S> x0,
                  const CgOptions& opts) {
  require_same_size(b.size(), op.size(), "cg(b)");
  const CounterSnapshot start = CounterSnapshot::now();
  Vector<S> x(op.size(), S{0});
  if (!x0.empty()) x.assign(x0.begin(), x0.end());
  Vector<S> r = initial_residual(op, b, x0);
  return run_cg(op, b, std::move(x), std::move(r), norm2<S>(b), opts, start);
}

template <Scalar S>
SolveResult<S> cg_from(const LinearOperator<S>& op, std::span<const S> b, Vector<S> x,
                       Vector<S> r, double bnorm, const CgOptions& opts) {
  require_same_size(x.size(), op.size(), "cg_from(x)");
  require_same_size(r.size(), op.size(), "cg_from(r)");
  return run_cg(op, b, std::move(x), std::move(r), bnorm, opts, CounterSnapshot::now());
}

template <Scalar S>
SolveResult<S> d_cg(const LinearOperator<S>& op, std::span<const S> b, std::span<const S> x0,
                    const DeflationSpace<S>& ds, const CgOptions& opts,
                    const SolutionSpace<S>* previous) {
  require_same_size(b.size(), op.size(), "d_cg(b)");
  const CounterSnapshot start = CounterSnapshot::now();
  Vector<S> x(op.size(), S{0});
  if (!x0.empty()) x.assign(x0.begin(), x0.end());
  Vector<S> r = initial_residual(op, b, x0);

  if (previous != nullptr && previous->size() > 0) {
    Projection<S> p = previous->project(std::span<const S>(x), std::span<const S>(r));
    x = std::move(p.x);
    r = std::move(p.r);
  }
  if (!ds.empty()) {
    Projection<S> p = deflation_project<S>(ds, x, r);
    x = std::move(p.x);
    r = std::move(p.r);
  }
  return run_cg(op, b, std::move(x), std::move(r), norm2<S>(b), opts, start);
}

#define LANDR_INSTANTIATE(S)                                                                   \
  template Projection<S> deflation_project<S>(const DeflationSpace<S>&, std::span<const S>,   \
                                              std::span<const S>);                            \
  template class SolutionSpace<S>;                                                             \
  template SolveResult<S> cg<S>(const LinearOperator<S>&, std::span<const S>,                 \
                                std::span<const S>, const CgOptions&);                         \
  template SolveResult<S> cg_from<S>(const LinearOperator<S>&, std::span<const S>, Vector<S>, \
                                     Vector<S>, double, const CgOptions&);                     \
  template SolveResult<S> d_cg<S>(const LinearOperator<S>&, std::span<const S>,               \
                                  std::span<const S>, const DeflationSpace<S>&,                \
                                  const CgOptions&, const SolutionSpace<S>*);

LANDR_INSTANTIATE(double)
LANDR_INSTANTIATE(Complex)

}  // namespace landr
