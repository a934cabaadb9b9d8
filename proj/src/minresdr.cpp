#include "landr/minresdr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace landr {

namespace {

template <Scalar S>
using EVec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

double target_key(EigenTarget t, double v) {
  switch (t) {
    case EigenTarget::SmallestMagnitude: return std::abs(v);
    case EigenTarget::SmallestAlgebraic: return v;
    case EigenTarget::LargestAlgebraic: return -v;
  }
  return v;
}

// Real least squares applied to real and imaginary parts separately.
template <Scalar S, class Solver>
EVec<S> real_solve(const Solver& solver, const EVec<S>& rhs) {
  if constexpr (is_complex_v<S>) {
    const Eigen::VectorXd re = solver.solve(rhs.real());
    const Eigen::VectorXd im = solver.solve(rhs.imag());
    return re.template cast<S>() + Complex(0, 1) * im.template cast<S>();
  } else {
    return solver.solve(rhs);
  }
}

template <Scalar S>
Vector<S> residual_of(const LinearOperator<S>& op, std::span<const S> b, std::span<const S> x0) {
  Vector<S> r(b.begin(), b.end());
  if (!x0.empty() && std::any_of(x0.begin(), x0.end(), [](S v) { return v != S{0}; })) {
    require_same_size(x0.size(), op.size(), "initial guess");
    Vector<S> ax = op.apply(x0);
    axpy<S>(S{-1}, std::span<const S>(ax), std::span<S>(r));
  }
  return r;
}

template <Scalar S>
SolveResult<S> run_minres(const LinearOperator<S>& op, std::span<const S> b, Vector<S> x,
                          Vector<S> r, double bnorm, const MinresOptions& opts,
                          const CounterSnapshot& start) {
  const std::size_t n = op.size();
  SolveResult<S> res;
  auto record = [&](int it, double rn) {
    const CounterSnapshot used = CounterSnapshot::now().since(start);
    res.history.points.push_back({0, it, used.matvecs, used.vecops, bnorm > 0 ? rn / bnorm : 0.0});
  };

  double beta1 = norm2<S>(r);
  record(0, beta1);
  int it = 0;
  if (bnorm == 0.0 || beta1 <= opts.rtol * bnorm) {
    res.status = SolveStatus::Converged;
    res.iterations = 0;
    res.history.matvecs = CounterSnapshot::now().since(start).matvecs;
    res.history.vecops = CounterSnapshot::now().since(start).vecops;
    res.x = std::move(x);
    res.r = std::move(r);
    return res;
  }
  // Unpreconditioned Paige-Saunders recurrence; r1/r2 hold the two latest
  // unnormalized Lanczos vectors. phibar is only an estimate of ||b - A x||,
  // so a claimed convergence is checked against the true residual and the
  // recurrence restarted from it when the two disagree.
  Vector<S> r1(n), r2(n), v(n), y(n), w(n), w1(n), w2(n);
  for (;;) {
    std::fill(r1.begin(), r1.end(), S{0});
    std::copy(r.begin(), r.end(), r2.begin());
    std::fill(w.begin(), w.end(), S{0});
    std::fill(w2.begin(), w2.end(), S{0});
    double oldb = 0, beta = beta1, dbar = 0, epsln = 0, phibar = beta1;
    double cs = -1, sn = 0, anorm = 0;
    bool claimed = false;
    for (int local = 0; it < opts.max_iterations; ++local) {
      std::copy(r2.begin(), r2.end(), v.begin());
      scale<S>(S{1.0 / beta}, std::span<S>(v));
      op.apply(v, y);
      if (local > 0) axpy<S>(S{-beta / oldb}, r1, y);
      const double alfa = real(dot<S>(v, y));
      axpy<S>(S{-alfa / beta}, r2, y);
      r1.swap(r2);
      r2.swap(y);
      oldb = beta;
      beta = norm2<S>(r2);
      anorm = std::max(anorm, std::abs(alfa) + beta + oldb);

      const double oldeps = epsln;
      const double delta = cs * dbar + sn * alfa;
      const double gbar = sn * dbar - cs * alfa;
      epsln = sn * beta;
      dbar = -cs * beta;
      const double gamma = std::max(std::hypot(gbar, beta), std::numeric_limits<double>::min());
      cs = gbar / gamma;
      sn = beta / gamma;
      const double phi = cs * phibar;
      phibar *= sn;

      // w = (v - oldeps w1 - delta w2) / gamma
      w1.swap(w2);
      w2.swap(w);
      std::copy(v.begin(), v.end(), w.begin());
      axpy<S>(S{-oldeps}, w1, w);
      axpy<S>(S{-delta}, w2, w);
      scale<S>(S{1.0 / gamma}, std::span<S>(w));
      axpy<S>(S{phi}, w, x);
      ++it;
      record(it, std::abs(phibar));
      // Second test: invariant subspace, x is exact up to rounding.
      if (std::abs(phibar) <= opts.rtol * bnorm || beta <= 1e-14 * anorm) {
        claimed = true;
        break;
      }
    }
    r = residual_of<S>(op, b, x);
    const double rn = norm2<S>(r);
    if (rn <= opts.rtol * bnorm) {
      res.status = SolveStatus::Converged;
      break;
    }
    if (!claimed || it >= opts.max_iterations) break;
    beta1 = rn;
    record(it, rn);
  }
  res.iterations = it;
  const CounterSnapshot used = CounterSnapshot::now().since(start);
  res.history.matvecs = used.matvecs;
  res.history.vecops = used.vecops;
  res.x = std::move(x);
  res.r = std::move(r);
  return res;
}

}  // namespace

// ---------------------------------------------------------------------------

HarmonicRitzSet harmonic_ritz(const ProjectedMatrix& T, std::size_t k, EigenTarget target) {
  HarmonicRitzSet out;
  const std::size_t m = T.cols;
  if (m == 0) return out;
  const auto M = static_cast<Eigen::Index>(m);

  const Eigen::MatrixXd Tm = T.square();
  const double tnorm = T.bar().cwiseAbs().colwise().sum().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> plain(Tm, Eigen::EigenvaluesOnly);
  if (plain.eigenvalues().cwiseAbs().minCoeff() <= 1e-14 * tnorm) out.shift = 1e-12 * tnorm;

  // T̄^T T̄ g = theta T g, rewritten as the symmetric-definite pencil
  // T g = mu (T̄^T T̄) g with theta = 1/mu, all relative to the shift.
  Eigen::MatrixXd Tbar = T.bar();
  Tbar.topRows(M).diagonal().array() -= out.shift;
  const Eigen::MatrixXd Ts = Tbar.topRows(M);
  const Eigen::MatrixXd B = Tbar.transpose() * Tbar;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Ts, B);
  if (ges.info() != Eigen::Success) throw std::runtime_error("harmonic_ritz: eigensolver failed");

  std::vector<double> theta;
  std::vector<Eigen::Index> idx;
  const double mumax = ges.eigenvalues().cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < M; ++i) {
    const double mu = ges.eigenvalues()(i);
    if (std::abs(mu) <= 1e-15 * mumax) continue;  // infinite harmonic value
    theta.push_back(out.shift + 1.0 / mu);
    idx.push_back(i);
  }
  std::vector<std::size_t> order(theta.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return target_key(target, theta[a]) < target_key(target, theta[b]);
  });
  const std::size_t kk = std::min(k, order.size());
  out.vectors.resize(M, static_cast<Eigen::Index>(kk));
  const Eigen::MatrixXd Tb = T.bar();
  for (std::size_t c = 0; c < kk; ++c) {
    Eigen::VectorXd g = ges.eigenvectors().col(idx[order[c]]);
    g.normalize();
    const double th = theta[order[c]];
    out.vectors.col(static_cast<Eigen::Index>(c)) = g;
    out.values.push_back(th);
    Eigen::VectorXd res = Tb * g;
    res.head(M) -= th * g;
    out.residuals.push_back(res.norm());
  }
  return out;
}

Eigen::MatrixXd restart_map(const ProjectedMatrix& T, const HarmonicRitzSet& h) {
  const std::size_t m = T.cols;
  const std::size_t k = h.size();
  const auto M = static_cast<Eigen::Index>(m);
  const auto K = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(M + 1, K + 1);
  if (k > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(h.vectors);
    P.topLeftCorner(M, K) = qr.householderQ() * Eigen::MatrixXd::Identity(M, K);
  }
  Eigen::VectorXd p = Eigen::VectorXd::Zero(M + 1);
  p(M) = 1.0;
  const double beta = T.last_coupling();
  if (beta != 0.0) {
    Eigen::MatrixXd Ts = T.square();
    Ts.diagonal().array() -= h.shift;
    // T is symmetric, so T^{-T} e_m = T^{-1} e_m.
    Eigen::VectorXd em = Eigen::VectorXd::Zero(M);
    em(M - 1) = 1.0;
    p.head(M) = -beta * Ts.partialPivLu().solve(em);
  }
  for (int pass = 0; pass < 2; ++pass) p -= P.leftCols(K) * (P.leftCols(K).transpose() * p);
  P.col(K) = p.normalized();
  return P;
}

template <Scalar S>
MinresUpdate<S> minres_update(const KrylovBasis<S>& V, const ProjectedMatrix& T,
                              std::span<const S> x0, std::span<const S> r0,
                              std::span<const S> c) {
  const std::size_t m = T.cols;
  MinresUpdate<S> out;
  out.x.assign(x0.begin(), x0.end());
  out.r.assign(r0.begin(), r0.end());
  EVec<S> rhs = EVec<S>::Zero(static_cast<Eigen::Index>(m + 1));
  for (std::size_t i = 0; i < std::min(c.size(), m + 1); ++i)
    rhs(static_cast<Eigen::Index>(i)) = c[i];
  if (m == 0) {
    out.ls_residual = rhs.norm();
    return out;
  }
  const Eigen::MatrixXd Tb = T.bar();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Tb);
  const EVec<S> d = real_solve<S>(qr, rhs);
  const EVec<S> td = Tb.template cast<S>() * d;
  out.ls_residual = (rhs - td).norm();
  out.coefficients.assign(d.data(), d.data() + m);
  block_times_add<S>(V.v, out.coefficients, S{1}, out.x);
  std::vector<S> tdv(td.data(), td.data() + td.size());
  if (V.filled < m + 1) tdv.resize(V.filled);
  block_times_add<S>(V.v, tdv, S{-1}, out.r);
  return out;
}

template <Scalar S>
DeflationSpace<S> minres_restart(const KrylovBasis<S>& V, const ProjectedMatrix& T,
                                 const Eigen::MatrixXd& P) {
  const std::size_t m = T.cols;
  const auto M = static_cast<Eigen::Index>(m);
  const std::size_t k1 = static_cast<std::size_t>(P.cols());
  const std::size_t k = k1 - 1;
  const std::size_t rows = std::min(V.filled, m + 1);  // m after a breakdown

  DeflationSpace<S> ds;
  ds.v = DenseBlock<S>(V.v.rows(), k1);
  std::vector<S> c(rows * k1);
  for (std::size_t j = 0; j < k1; ++j)
    for (std::size_t i = 0; i < rows; ++i)
      c[j * rows + i] = S{P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))};
  block_times_small<S>(V.v, c, rows, k1, ds.v);

  ds.tbar = P.transpose() * T.bar() * P.topLeftCorner(M, static_cast<Eigen::Index>(k));
  const auto K = static_cast<Eigen::Index>(k);
  const Eigen::MatrixXd top = ds.tbar.topRows(K);
  ds.tbar.topRows(K) = 0.5 * (top + top.transpose());
  return ds;
}

// ---------------------------------------------------------------------------

template <Scalar S>
LeastSquaresTracker<S>::LeastSquaresTracker(std::size_t m, std::span<const S> c)
    : g_(m + 1, S{0}) {
  std::copy_n(c.begin(), std::min(c.size(), m + 1), g_.begin());
}

template <Scalar S>
void LeastSquaresTracker<S>::add_column(const ProjectedMatrix& T, std::size_t j) {
  // Columns of the leading block after a Minres-DR restart are dense, so
  // rotations are not restricted to neighbouring rows.
  const std::size_t last = std::max(j + 1, j < T.k ? T.k : 0);
  std::vector<double> col(g_.size(), 0.0);
  for (std::size_t i = 0; i <= last; ++i)
    col[i] = T.t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  for (const Rotation& q : rot_) {
    const double a = col[q.a], b = col[q.b];
    col[q.a] = q.c * a + q.s * b;
    col[q.b] = -q.s * a + q.c * b;
  }
  for (std::size_t i = last; i > j; --i) {
    if (col[i] == 0.0) continue;
    const double r = std::hypot(col[j], col[i]);
    const Rotation q{j, i, col[j] / r, col[i] / r};
    col[j] = r;
    col[i] = 0.0;
    const S a = g_[j], b = g_[i];
    g_[j] = q.c * a + q.s * b;
    g_[i] = -q.s * a + q.c * b;
    rot_.push_back(q);
  }
  cols_ = j + 1;
}

template <Scalar S>
double LeastSquaresTracker<S>::residual() const {
  double s = 0;
  for (std::size_t i = cols_; i < g_.size(); ++i) s += abs2(g_[i]);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------

template <Scalar S>
SolveResult<S> minres(const LinearOperator<S>& op, std::span<const S> b, std::span<const S> x0,
                      const MinresOptions& opts) {
  require_same_size(b.size(), op.size(), "minres(b)");
  const CounterSnapshot start = CounterSnapshot::now();
  Vector<S> x(op.size(), S{0});
  if (!x0.empty()) x.assign(x0.begin(), x0.end());
  Vector<S> r = residual_of<S>(op, b, x0);
  return run_minres<S>(op, b, std::move(x), std::move(r), norm2<S>(b), opts, start);
}

template <Scalar S>
SolveResult<S> minres_from(const LinearOperator<S>& op, std::span<const S> b, Vector<S> x,
                           Vector<S> r, double bnorm, const MinresOptions& opts) {
  require_same_size(x.size(), op.size(), "minres_from(x)");
  require_same_size(r.size(), op.size(), "minres_from(r)");
  return run_minres<S>(op, b, std::move(x), std::move(r), bnorm, opts, CounterSnapshot::now());
}

template <Scalar S>
SolveResult<S> d_minres(const LinearOperator<S>& op, std::span<const S> b,
                        std::span<const S> x0, const DeflationSpace<S>& ds,
                        const MinresOptions& opts) {
  require_same_size(b.size(), op.size(), "d_minres(b)");
  const CounterSnapshot start = CounterSnapshot::now();
  Vector<S> x(op.size(), S{0});
  if (!x0.empty()) x.assign(x0.begin(), x0.end());
  Vector<S> r = residual_of<S>(op, b, x0);
  if (!ds.empty()) {
    Projection<S> p = deflation_project<S>(ds, x, r);
    x = std::move(p.x);
    r = std::move(p.r);
  }
  return run_minres<S>(op, b, std::move(x), std::move(r), norm2<S>(b), opts, start);
}

template <Scalar S>
MinresDrResult<S> minres_dr(const LinearOperator<S>& op, std::span<const S> b,
                            std::span<const S> x0, const SolverConfig& cfg) {
  const std::size_t n = op.size();
  require_same_size(b.size(), n, "minres_dr(b)");
  cfg.validate(n);
  const CounterSnapshot start = CounterSnapshot::now();

  MinresDrResult<S> res;
  res.x.assign(n, S{0});
  if (!x0.empty()) res.x.assign(x0.begin(), x0.end());
  res.r = residual_of<S>(op, b, x0);
  const double bnorm = norm2<S>(b);
  if (bnorm == 0.0 || norm2<S>(res.r) == 0.0) {
    if (bnorm == 0.0) res.x.assign(n, S{0});
    res.status = SolveStatus::Converged;
    res.linear_converged = true;
    res.eigen_converged = cfg.n_eig_wanted == 0;
    return res;
  }

  KrylovCycle<S> kc(op, cfg.m, cfg.policy, cfg.full_first_cycle);
  if (cfg.trace_omega) kc.enable_omega_trace(&res.history.omega_trace);
  kc.start(res.r);
  std::vector<S> c{dot<S>(kc.basis().v.col(0), std::span<const S>(res.r))};

  int iteration = 0;
  for (;;) {
    LeastSquaresTracker<S> tracker(cfg.m, c);
    for (std::size_t i = 0; i < kc.projection().cols; ++i) tracker.add_column(kc.projection(), i);
    auto observe = [&](std::size_t j) {
      ++iteration;
      tracker.add_column(kc.projection(), j);
      const CounterSnapshot now = CounterSnapshot::now().since(start);
      res.history.points.push_back(
          {kc.cycle(), iteration, now.matvecs, now.vecops, tracker.residual() / bnorm});
    };
    const ExtendStatus status = kc.extend(observe);
    res.cycles = kc.cycle();

    MinresUpdate<S> up = minres_update<S>(kc.basis(), kc.projection(), res.x, res.r, c);
    res.x = std::move(up.x);
    res.r = std::move(up.r);
    const double resid = norm2<S>(std::span<const S>(res.r)) / bnorm;

    HarmonicRitzSet h = harmonic_ritz(kc.projection(), cfg.k, cfg.target);
    CycleRecord rec;
    rec.cycle = kc.cycle();
    rec.matvecs = CounterSnapshot::now().since(start).matvecs;
    rec.resid_rel = resid;
    rec.values = h.values;
    rec.residuals = h.residuals;
    if (cfg.record_orthodefect) rec.orthodefect = orthodefect(kc.basis().v, kc.projection().cols);
    if (!res.history.points.empty()) {
      res.history.points.back().resid_rel = resid;
      res.history.points.back().orthodefect = rec.orthodefect;
    }
    res.history.cycles.push_back(rec);

    res.linear_converged = !cfg.solve_linear || resid <= cfg.lin_rtol;
    res.eigen_converged = true;
    for (std::size_t i = 0; i < cfg.n_eig_wanted; ++i)
      if (i >= h.size() || h.residuals[i] > cfg.eig_tol) res.eigen_converged = false;

    const Eigen::MatrixXd P = restart_map(kc.projection(), h);
    const auto K1 = P.cols();
    res.max_restart_defect = std::max(
        res.max_restart_defect,
        (P.transpose() * P - Eigen::MatrixXd::Identity(K1, K1)).cwiseAbs().maxCoeff());
    DeflationSpace<S> ds = minres_restart<S>(kc.basis(), kc.projection(), P);

    const bool done = res.linear_converged && res.eigen_converged && !cfg.run_all_cycles;
    if (status == ExtendStatus::Breakdown || done || kc.cycle() >= cfg.max_cycles) {
      res.deflation = std::move(ds);
      res.ritz = std::move(h);
      break;
    }
    kc.restart(std::move(ds.v), ds.tbar);
    const std::size_t k1 = kc.basis().filled;
    c.assign(k1, S{0});
    block_adjoint_times<S>(kc.basis().v, k1, std::span<const S>(res.r), c);
  }

  res.history.reorth = kc.reorth_log();
  const CounterSnapshot used = CounterSnapshot::now().since(start);
  res.history.matvecs = used.matvecs;
  res.history.vecops = used.vecops;
  res.status = res.linear_converged && res.eigen_converged ? SolveStatus::Converged
                                                           : SolveStatus::MaxIterations;
  return res;
}

#define LANDR_INSTANTIATE(S)                                                                \
  template MinresUpdate<S> minres_update<S>(const KrylovBasis<S>&, const ProjectedMatrix&, \
                                            std::span<const S>, std::span<const S>,         \
                                            std::span<const S>);                            \
  template DeflationSpace<S> minres_restart<S>(const KrylovBasis<S>&, const ProjectedMatrix&, \
                                               const Eigen::MatrixXd&);                     \
  template class LeastSquaresTracker<S>;                                                    \
  template SolveResult<S> minres<S>(const LinearOperator<S>&, std::span<const S>,          \
                                    std::span<const S>, const MinresOptions&);              \
  template SolveResult<S> minres_from<S>(const LinearOperator<S>&, std::span<const S>,     \
                                         Vector<S>, Vector<S>, double, const MinresOptions&); \
  template SolveResult<S> d_minres<S>(const LinearOperator<S>&, std::span<const S>,        \
                                      std::span<const S>, const DeflationSpace<S>&,         \
                                      const MinresOptions&);                                \
  template MinresDrResult<S> minres_dr<S>(const LinearOperator<S>&, std::span<const S>,    \
                                          std::span<const S>, const SolverConfig&);

LANDR_INSTANTIATE(double)
LANDR_INSTANTIATE(Complex)

}  // namespace landr
