#include "landr/blockcg.hpp"

#include <cmath>

namespace landr {

namespace {

template <Scalar S>
using EMat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <Scalar S>
using BlockMap = Eigen::Map<EMat<S>>;

template <Scalar S>
BlockMap<S> as_matrix(DenseBlock<S>& b) {
  return BlockMap<S>(b.data(), static_cast<Eigen::Index>(b.rows()),
                     static_cast<Eigen::Index>(b.cols()));
}

template <Scalar S>
void apply_block(const LinearOperator<S>& op, const DenseBlock<S>& in, DenseBlock<S>& out) {
  for (std::size_t j = 0; j < in.cols(); ++j) op.apply(in.col(j), out.col(j));
}

}  // namespace

template <Scalar S>
BlockCgResult<S> block_cg(const LinearOperator<S>& op, const DenseBlock<S>& B,
                          const BlockCgOptions& opts) {
  const std::size_t n = op.size();
  const std::size_t s = B.cols();
  if (B.rows() != n) throw DimensionError("block_cg: right-hand side block has wrong length");
  const auto si = static_cast<Eigen::Index>(s);
  const std::uint64_t block_ops = s * s;
  const CounterSnapshot start = CounterSnapshot::now();

  BlockCgResult<S> res;
  res.x = DenseBlock<S>(n, s);
  res.histories.resize(s);
  if (s == 0) {
    res.status = SolveStatus::Converged;
    return res;
  }
  std::vector<double> bnorm(s);
  for (std::size_t j = 0; j < s; ++j) bnorm[j] = norm2<S>(B.col(j));

  DenseBlock<S> R = B, P = B, Q(n, s);
  auto X = as_matrix(res.x);
  auto Rm = as_matrix(R);
  auto Pm = as_matrix(P);
  auto Qm = as_matrix(Q);

  EMat<S> rho = Rm.adjoint() * Rm;
  counters::add_vecops(block_ops);

  auto record = [&](int it) {
    const CounterSnapshot used = CounterSnapshot::now().since(start);
    bool all = true;
    for (std::size_t j = 0; j < s; ++j) {
      const double rn = std::sqrt(std::max(0.0, real(rho(static_cast<Eigen::Index>(j),
                                                         static_cast<Eigen::Index>(j)))));
      const double rel = bnorm[j] > 0 ? rn / bnorm[j] : 0.0;
      res.histories[j].points.push_back({0, it, used.matvecs, used.vecops, rel});
      if (rel > opts.rtol) all = false;
    }
    return all;
  };

  int it = 0;
  bool done = record(0);
  while (!done && it < opts.max_iterations) {
    apply_block(op, P, Q);
    EMat<S> pap = Pm.adjoint() * Qm;
    counters::add_vecops(block_ops);
    pap = 0.5 * (pap + pap.adjoint()).eval();

    // Rank of the direction block, judged on P itself with unit columns:
    // the Gram spectrum would square this ratio.
    Eigen::VectorXd cn = Pm.colwise().norm().transpose();
    bool singular = (cn.array() == 0.0).any();
    if (!singular) {
      const EMat<S> scaled = Pm * cn.cwiseInverse().asDiagonal();
      Eigen::HouseholderQR<EMat<S>> qr(scaled);
      const EMat<S> rtri = qr.matrixQR().topRows(si).template triangularView<Eigen::Upper>();
      Eigen::JacobiSVD<EMat<S>> svd(rtri);
      const auto& sv = svd.singularValues();
      res.last_rcond = sv(0) > 0 ? sv(si - 1) / sv(0) : 0.0;
      singular = !(res.last_rcond >= opts.rcond_min);
      counters::add_vecops(block_ops);
    } else {
      res.last_rcond = 0.0;
    }
    Eigen::LDLT<EMat<S>> pap_ldlt(pap);
    if (!singular && (pap_ldlt.info() != Eigen::Success || !pap_ldlt.isPositive() ||
                      (pap_ldlt.vectorD().array().real() <= 0.0).any()))
      singular = true;
    if (singular) {
      res.status = SolveStatus::Unstable;
      break;
    }

    const EMat<S> alpha = pap_ldlt.solve(rho);
    X.noalias() += Pm * alpha;
    ++it;
    if (opts.replace_every > 0 && it % opts.replace_every == 0) {
      apply_block(op, res.x, R);
      Rm = Eigen::Map<const EMat<S>>(B.data(), Rm.rows(), si) - Rm;
    } else {
      Rm.noalias() -= Qm * alpha;
    }
    counters::add_vecops(2 * block_ops);

    EMat<S> rho_new = Rm.adjoint() * Rm;
    rho_new = 0.5 * (rho_new + rho_new.adjoint()).eval();
    counters::add_vecops(block_ops);
    const EMat<S> beta = rho.ldlt().solve(rho_new);
    rho = std::move(rho_new);
    done = record(it);
    if (done) break;
    Pm = Rm + Pm * beta;
    counters::add_vecops(block_ops);
  }
  if (done) res.status = SolveStatus::Converged;
  res.iterations = it;
  const CounterSnapshot used = CounterSnapshot::now().since(start);
  res.matvecs = used.matvecs;
  res.vecops = used.vecops;
  for (auto& h : res.histories) {
    h.matvecs = used.matvecs;
    h.vecops = used.vecops;
  }
  return res;
}

template BlockCgResult<double> block_cg<double>(const LinearOperator<double>&,
                                                const DenseBlock<double>&, const BlockCgOptions&);
template BlockCgResult<Complex> block_cg<Complex>(const LinearOperator<Complex>&,
                                                  const DenseBlock<Complex>&,
                                                  const BlockCgOptions&);

}  // namespace landr
