#include "landr/landr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace landr {

namespace {

template <Scalar S>
using EVec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <Scalar S>
using EMat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

double target_key(EigenTarget t, double v) {
  switch (t) {
    case EigenTarget::SmallestMagnitude: return std::abs(v);
    case EigenTarget::SmallestAlgebraic: return v;
    case EigenTarget::LargestAlgebraic: return -v;
  }
  return v;
}

bool is_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}
bool is_zero(std::span<const Complex> v) {
  return std::all_of(v.begin(), v.end(), [](Complex x) { return x == Complex(0, 0); });
}

}  // namespace

EigenTarget parse_target(std::string_view text) {
  if (text == "smallest-magnitude" || text == "sm") return EigenTarget::SmallestMagnitude;
  if (text == "smallest-algebraic" || text == "sa") return EigenTarget::SmallestAlgebraic;
  if (text == "largest-algebraic" || text == "la") return EigenTarget::LargestAlgebraic;
  throw std::invalid_argument("unknown eigenvalue target '" + std::string(text) +
                              "' (expected smallest-magnitude | smallest-algebraic | "
                              "largest-algebraic)");
}

std::string to_string(EigenTarget t) {
  switch (t) {
    case EigenTarget::SmallestMagnitude: return "smallest-magnitude";
    case EigenTarget::SmallestAlgebraic: return "smallest-algebraic";
    case EigenTarget::LargestAlgebraic: return "largest-algebraic";
  }
  return "?";
}

void SolverConfig::validate(std::size_t n) const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (k < 1) fail("k must be at least 1");
  if (retained() >= m)
    fail("need k < m (got k = " + std::to_string(retained()) + ", m = " + std::to_string(m) +
         "); lower --k or raise --m");
  if (m > n) fail("m = " + std::to_string(m) + " exceeds the matrix dimension " + std::to_string(n));
  if (!(lin_rtol > 0 && lin_rtol < 1)) fail("linear tolerance must lie in (0, 1)");
  if (!(eig_tol > 0 && eig_tol < 1)) fail("eigen tolerance must lie in (0, 1)");
  if (n_eig_wanted > k) fail("cannot want more eigenpairs than k");
  if (max_cycles < 1) fail("max_cycles must be at least 1");
  policy.validate();
}

// ---------------------------------------------------------------------------

RitzSet compute_ritz(const ProjectedMatrix& T, std::size_t k, EigenTarget target,
                     std::size_t extra_largest) {
  const std::size_t m = T.cols;
  RitzSet out;
  if (m == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.square());
  if (es.info() != Eigen::Success) throw std::runtime_error("compute_ritz: eigensolver failed");
  const Eigen::VectorXd& theta = es.eigenvalues();

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return target_key(target, theta(a)) < target_key(target, theta(b));
  });
  std::vector<std::size_t> chosen(order.begin(), order.begin() + std::min(k, m));
  // Eigen returns ascending values, so the largest sit at the end.
  for (std::size_t e = 0, idx = m; e < extra_largest && idx > 0; --idx) {
    if (std::find(chosen.begin(), chosen.end(), idx - 1) != chosen.end()) continue;
    chosen.push_back(idx - 1);
    ++e;
  }

  const double beta = T.last_coupling();
  out.vectors.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(chosen.size()));
  for (std::size_t c = 0; c < chosen.size(); ++c) {
    const auto i = static_cast<Eigen::Index>(chosen[c]);
    out.values.push_back(theta(i));
    out.vectors.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(i);
    const double coupling = beta * es.eigenvectors()(static_cast<Eigen::Index>(m) - 1, i);
    out.couplings.push_back(coupling);
    out.residuals.push_back(std::abs(coupling));
  }
  return out;
}

template <Scalar S>
Vector<S> ritz_vector(const KrylovBasis<S>& V, const RitzSet& ritz, std::size_t i) {
  const auto m = static_cast<std::size_t>(ritz.vectors.rows());
  std::vector<S> g(m);
  for (std::size_t r = 0; r < m; ++r) g[r] = ritz.vectors(static_cast<Eigen::Index>(r),
                                                            static_cast<Eigen::Index>(i));
  Vector<S> y(V.v.rows(), S{0});
  block_times_add<S>(V.v, g, S{1}, y);
  return y;
}

template <Scalar S>
GalerkinUpdate<S> galerkin_update(const KrylovBasis<S>& V, const ProjectedMatrix& T,
                                  std::span<const S> x0, std::span<const S> r0,
                                  std::span<const S> c) {
  const std::size_t m = T.cols;
  GalerkinUpdate<S> out;
  out.x.assign(x0.begin(), x0.end());
  out.r.assign(r0.begin(), r0.end());
  if (m == 0 || is_zero(c)) {
    out.coefficients.assign(m, S{0});
    return out;
  }
  EVec<S> rhs = EVec<S>::Zero(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < std::min(c.size(), m); ++i) rhs(static_cast<Eigen::Index>(i)) = c[i];

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(T.square());
  const double anorm = T.square().cwiseAbs().colwise().sum().maxCoeff();
  if (!(lu.rcond() > 1e-14) || anorm == 0.0) {
    out.stagnated = true;
    out.coefficients.assign(m, S{0});
    return out;
  }
  EVec<S> d;
  if constexpr (is_complex_v<S>) {
    d = lu.solve(rhs.real()).template cast<S>() +
        Complex(0, 1) * lu.solve(rhs.imag()).template cast<S>();
  } else {
    d = lu.solve(rhs);
  }
  out.coefficients.assign(d.data(), d.data() + m);
  block_times_add<S>(V.v, out.coefficients, S{1}, out.x);

  const EVec<S> td = T.bar().template cast<S>() * d;
  std::vector<S> tdv(td.data(), td.data() + td.size());
  if (V.filled < m + 1) tdv.resize(V.filled);  // breakdown: no v_{m+1}
  block_times_add<S>(V.v, tdv, S{-1}, out.r);
  return out;
}

template <Scalar S>
DeflationSpace<S> restart_space(const KrylovBasis<S>& V, const ProjectedMatrix& T,
                                const RitzSet& ritz) {
  const std::size_t m = T.cols;
  const std::size_t k = ritz.size();
  DeflationSpace<S> ds;
  ds.v = DenseBlock<S>(V.v.rows(), k + 1);
  std::vector<S> g(m * k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < m; ++i)
      g[j * m + i] = ritz.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  if (k > 0) block_times_small<S>(V.v, g, m, k, ds.v);
  if (V.filled > m) ds.v.set_col(k, V.v.col(m));

  ds.tbar = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k + 1), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    ds.tbar(ii, ii) = ritz.values[i];
    ds.tbar(static_cast<Eigen::Index>(k), ii) = ritz.couplings[i];
  }
  return ds;
}

// ---------------------------------------------------------------------------

template <Scalar S>
GalerkinTracker<S>::GalerkinTracker(std::size_t m, std::span<const S> c)
    : l_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m))),
      d_(m, 0.0),
      z_(m, S{0}),
      c_(c.begin(), c.end()) {}

template <Scalar S>
void GalerkinTracker<S>::add_row(const ProjectedMatrix& T, std::size_t j) {
  // Rows of T in the tridiagonal tail start at j-1, and so do the rows of L.
  const std::size_t first = T.first_row(j);
  const auto J = static_cast<Eigen::Index>(j);
  double diag = T.t(J, J);
  S z = j < c_.size() ? c_[j] : S{0};
  for (std::size_t i = first; i < j; ++i) {
    const auto I = static_cast<Eigen::Index>(i);
    double a = T.t(J, I);
    for (std::size_t l = first; l < i; ++l) {
      const auto L = static_cast<Eigen::Index>(l);
      a -= l_(J, L) * l_(I, L) * d_[l];
    }
    l_(J, I) = a / d_[i];
    diag -= l_(J, I) * l_(J, I) * d_[i];
    z -= l_(J, I) * z_[i];
  }
  if (diag == 0.0) diag = std::numeric_limits<double>::min();
  d_[j] = diag;
  z_[j] = z;
  rows_ = j + 1;
}

template <Scalar S>
double GalerkinTracker<S>::residual(const ProjectedMatrix& T) const {
  if (rows_ == 0) return 0.0;
  const std::size_t j = rows_ - 1;
  const double beta = T.t(static_cast<Eigen::Index>(j + 1), static_cast<Eigen::Index>(j));
  return std::abs(beta) * std::abs(z_[j] / d_[j]);
}

// ---------------------------------------------------------------------------

template <Scalar S>
LanDrEngine<S>::LanDrEngine(const LinearOperator<S>& op, SolverConfig cfg)
    : op_(op), cfg_(cfg), cycle_(op, (cfg.validate(op.size()), cfg.m), cfg.policy,
                                 cfg.full_first_cycle) {}

template <Scalar S>
ExtendStatus LanDrEngine<S>::first_cycle(std::span<const S> r0) {
  cycle_.start(r0);
  return cycle_.extend();
}

template <Scalar S>
RitzSet LanDrEngine<S>::compute_ritz() const {
  return landr::compute_ritz(cycle_.projection(), cfg_.k, cfg_.target, cfg_.n_extra_largest);
}

template <Scalar S>
void LanDrEngine<S>::restart(const RitzSet& ritz) {
  DeflationSpace<S> ds = restart_space(cycle_.basis(), cycle_.projection(), ritz);
  cycle_.restart(std::move(ds.v), ds.tbar);
}

template <Scalar S>
ExtendStatus LanDrEngine<S>::continue_cycle() {
  return cycle_.extend();
}

// ---------------------------------------------------------------------------

template <Scalar S>
LanDrResult<S> lan_dr(const LinearOperator<S>& op, std::span<const S> b,
                      std::span<const S> x0, const SolverConfig& cfg) {
  const std::size_t n = op.size();
  require_same_size(b.size(), n, "lan_dr(b)");
  if (!x0.empty()) require_same_size(x0.size(), n, "lan_dr(x0)");
  cfg.validate(n);

  const CounterSnapshot start = CounterSnapshot::now();
  LanDrResult<S> res;
  res.x.assign(n, S{0});
  if (!x0.empty()) res.x.assign(x0.begin(), x0.end());
  res.r.assign(b.begin(), b.end());
  if (!x0.empty() && !is_zero(x0)) {
    Vector<S> ax = op.apply(x0);
    axpy<S>(S{-1}, std::span<const S>(ax), std::span<S>(res.r));
  }
  const double bnorm = norm2<S>(b);
  if (bnorm == 0.0) {
    res.x.assign(n, S{0});
    res.r.assign(n, S{0});
    res.status = SolveStatus::Converged;
    res.linear_converged = res.eigen_converged = cfg.n_eig_wanted == 0;
    if (!res.eigen_converged) res.status = SolveStatus::MaxIterations;
    return res;
  }

  LanDrEngine<S> engine(op, cfg);
  KrylovCycle<S>& kc = engine.cycle();
  if (cfg.trace_omega) kc.enable_omega_trace(&res.history.omega_trace);

  const double r0norm = norm2<S>(std::span<const S>(res.r));
  if (r0norm <= cfg.lin_rtol * bnorm && cfg.n_eig_wanted == 0 && !cfg.run_all_cycles) {
    // x0 already solves the system and no eigenpairs are asked for.
    res.status = SolveStatus::Converged;
    res.linear_converged = res.eigen_converged = true;
    const CounterSnapshot used = CounterSnapshot::now().since(start);
    res.history.matvecs = used.matvecs;
    res.history.vecops = used.vecops;
    res.history.points.push_back({0, 0, used.matvecs, used.vecops, r0norm / bnorm});
    return res;
  }
  kc.start(r0norm > 0 ? std::span<const S>(res.r) : b);
  std::vector<S> c{dot<S>(kc.basis().v.col(0), std::span<const S>(res.r))};

  int iteration = 0;
  bool stagnated = false;
  for (;;) {
    GalerkinTracker<S> tracker(cfg.m, c);
    const ProjectedMatrix& T = kc.projection();
    for (std::size_t i = 0; i < T.cols; ++i) tracker.add_row(T, i);
    const double frozen = norm2<S>(std::span<const S>(res.r)) / bnorm;
    auto observe = [&](std::size_t j) {
      ++iteration;
      const CounterSnapshot now = CounterSnapshot::now().since(start);
      double resid = frozen;
      if (cfg.solve_linear) {
        tracker.add_row(kc.projection(), j);
        resid = tracker.residual(kc.projection()) / bnorm;
      }
      res.history.points.push_back({kc.cycle(), iteration, now.matvecs, now.vecops, resid});
    };
    const ExtendStatus status = kc.extend(observe);
    res.cycles = kc.cycle();

    // Step 3.
    RitzSet ritz = engine.compute_ritz();

    // Step 4.
    stagnated = false;
    if (cfg.solve_linear) {
      GalerkinUpdate<S> up = galerkin_update<S>(kc.basis(), kc.projection(), res.x, res.r, c);
      stagnated = up.stagnated;
      res.x = std::move(up.x);
      res.r = std::move(up.r);
    }
    const double resid = norm2<S>(std::span<const S>(res.r)) / bnorm;

    CycleRecord rec;
    rec.cycle = kc.cycle();
    rec.matvecs = CounterSnapshot::now().since(start).matvecs;
    rec.resid_rel = resid;
    rec.values = ritz.values;
    rec.residuals = ritz.residuals;
    if (cfg.record_orthodefect) rec.orthodefect = orthodefect(kc.basis().v, kc.projection().cols);
    if (!res.history.points.empty()) {
      res.history.points.back().resid_rel = resid;
      res.history.points.back().orthodefect = rec.orthodefect;
    }
    res.history.cycles.push_back(rec);

    res.linear_converged = !cfg.solve_linear || resid <= cfg.lin_rtol;
    res.eigen_converged = true;
    for (std::size_t i = 0; i < cfg.n_eig_wanted; ++i)
      if (i >= ritz.size() || ritz.residuals[i] > cfg.eig_tol) res.eigen_converged = false;

    const bool done = res.linear_converged && res.eigen_converged && !cfg.run_all_cycles;
    if (status == ExtendStatus::Breakdown || done || kc.cycle() >= cfg.max_cycles) {
      res.invariant_subspace = status == ExtendStatus::Breakdown;
      res.deflation = restart_space(kc.basis(), kc.projection(), ritz);
      res.ritz = std::move(ritz);
      break;
    }

    // Step 5, then the next cycle's c = V_{k+1}^H r (nonzero only in slot k+1
    // up to rounding).
    engine.restart(ritz);
    const std::size_t k1 = kc.basis().filled;
    c.assign(k1, S{0});
    block_adjoint_times<S>(kc.basis().v, k1, std::span<const S>(res.r), c);
  }

  res.history.reorth = kc.reorth_log();
  const CounterSnapshot used = CounterSnapshot::now().since(start);
  res.history.matvecs = used.matvecs;
  res.history.vecops = used.vecops;
  if (res.linear_converged && res.eigen_converged) {
    res.status = SolveStatus::Converged;
  } else if (stagnated && !res.linear_converged) {
    res.status = SolveStatus::Stagnated;
  } else {
    res.status = SolveStatus::MaxIterations;
  }
  return res;
}

#define LANDR_INSTANTIATE(S)                                                              \
  template Vector<S> ritz_vector<S>(const KrylovBasis<S>&, const RitzSet&, std::size_t);  \
  template GalerkinUpdate<S> galerkin_update<S>(const KrylovBasis<S>&,                    \
                                                const ProjectedMatrix&, std::span<const S>, \
                                                std::span<const S>, std::span<const S>);  \
  template DeflationSpace<S> restart_space<S>(const KrylovBasis<S>&, const ProjectedMatrix&, \
                                              const RitzSet&);                            \
  template class GalerkinTracker<S>;                                                      \
  template class LanDrEngine<S>;                                                          \
  template LanDrResult<S> lan_dr<S>(const LinearOperator<S>&, std::span<const S>,         \
                                    std::span<const S>, const SolverConfig&);

LANDR_INSTANTIATE(double)
LANDR_INSTANTIATE(Complex)

}  // namespace landr
