#include "landr/reorth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace landr {

namespace {

struct PolicyName {
  std::string_view name;
  ReorthKind kind;
};

constexpr PolicyName kPolicyNames[] = {
    {"full", ReorthKind::Full},           {"k-so", ReorthKind::KSO},
    {"periodic", ReorthKind::Periodic},   {"k-periodic", ReorthKind::KPeriodic},
    {"pro", ReorthKind::PRO},             {"k-pro", ReorthKind::KPRO},
    {"restart-only", ReorthKind::RestartOnly},
};

std::string_view name_of(ReorthKind kind) {
  for (const auto& p : kPolicyNames)
    if (p.kind == kind) return p.name;
  return "?";
}

}  // namespace

ReorthPolicy ReorthPolicy::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view param =
      colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);

  ReorthPolicy p;
  bool found = false;
  for (const auto& entry : kPolicyNames)
    if (entry.name == head) {
      p.kind = entry.kind;
      found = true;
    }
  if (!found)
    throw std::invalid_argument("unknown reorthogonalization policy '" + std::string(text) +
                                "' (expected " + reorth_policy_help() + ")");

  const bool periodic = p.kind == ReorthKind::Periodic || p.kind == ReorthKind::KPeriodic;
  const bool pro = p.kind == ReorthKind::PRO || p.kind == ReorthKind::KPRO;
  if (!param.empty() && !periodic && !pro)
    throw std::invalid_argument("policy '" + std::string(head) + "' takes no parameter");
  if (periodic) {
    if (param.empty())
      throw std::invalid_argument("policy '" + std::string(head) + "' needs a frequency, e.g. " +
                                  std::string(head) + ":40");
    auto [ptr, ec] = std::from_chars(param.data(), param.data() + param.size(), p.freq);
    if (ec != std::errc{} || ptr != param.data() + param.size())
      throw std::invalid_argument("bad reorthogonalization frequency '" + std::string(param) + "'");
  }
  if (pro && !param.empty()) {
    try {
      std::size_t used = 0;
      p.eta_exponent = std::stod(std::string(param), &used);
      if (used != param.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("bad PRO exponent '" + std::string(param) + "'");
    }
  }
  p.validate();
  return p;
}

std::string ReorthPolicy::to_string() const {
  std::ostringstream os;
  os << name_of(kind);
  if (kind == ReorthKind::Periodic || kind == ReorthKind::KPeriodic) os << ':' << freq;
  if (kind == ReorthKind::PRO || kind == ReorthKind::KPRO) os << ':' << eta_exponent;
  return os.str();
}

double ReorthPolicy::eta() const { return std::pow(OmegaState::eps, eta_exponent); }

void ReorthPolicy::validate() const {
  if (freq < 1) throw std::invalid_argument("reorthogonalization frequency must be >= 1");
  if (kind == ReorthKind::PRO || kind == ReorthKind::KPRO) {
    if (!(eta_exponent > 0.0 && eta_exponent < 1.0))
      throw std::invalid_argument("PRO exponent must lie in (0, 1)");
  }
}

std::string reorth_policy_help() {
  return "full | k-so | periodic:F | k-periodic:F | pro:E | k-pro:E | restart-only";
}

// ---------------------------------------------------------------------------
// Omega recurrence (Simon 1984). The projection column structure is read from
// T̄ directly, so the same update serves the tridiagonal tail and the
// arrow/dense leading block left by a restart.

OmegaState::OmegaState(std::size_t capacity, std::size_t n)
    : prev_(capacity + 1, eps), cur_(capacity + 1, eps), sqrt_n_(std::sqrt(double(n))) {}

void OmegaState::reset(std::size_t filled) {
  std::fill(prev_.begin(), prev_.end(), eps);
  std::fill(cur_.begin(), cur_.end(), eps);
  latest_ = filled == 0 ? 0 : filled - 1;
}

void OmegaState::update(const ProjectedMatrix& T, std::size_t j) {
  const auto& t = T.t;
  const std::size_t k = T.k;
  const double beta = t(j + 1, j);

  auto row_j = [&](std::size_t l) { return l == j ? 1.0 : cur_[l]; };
  auto row_jm1 = [&](std::size_t i) { return i + 1 == j ? 1.0 : prev_[i]; };

  auto col_abs = [&](std::size_t c) {
    double s = 0;
    const std::size_t hi = c < k ? k : c + 1;
    for (std::size_t l = T.first_row(c); l <= hi; ++l) s += std::abs(t(l, c));
    return s;
  };
  const double col_j = col_abs(j);

  std::vector<double> next(j + 1, eps);
  for (std::size_t i = 0; i < j; ++i) {
    // (A v_i)^H v_j expanded through column i of T̄.
    double raw = 0;
    const std::size_t lo = i <= k ? 0 : i - 1;
    const std::size_t hi = i < k ? k : i + 1;
    for (std::size_t l = lo; l <= hi && l <= j; ++l) raw += t(l, i) * row_j(l);
    // Minus the recurrence terms of column j. Rows older than j-1 only occur
    // in the arrow column, whose partners were reorthogonalized at restart.
    for (std::size_t l = T.first_row(j); l <= j; ++l) {
      const double w = l == j ? row_j(i) : l + 1 == j ? row_jm1(i) : l == i ? 1.0 : eps;
      raw -= t(l, j) * w;
    }
    const double psi = eps * (col_abs(i) + col_j);
    raw += raw >= 0 ? psi : -psi;
    // Signed, as in the original recurrence: cancellation between steps is
    // what keeps the estimate from growing geometrically.
    const double val = beta > 0 ? raw / beta : 1.0;
    next[i] = std::abs(val) < eps ? std::copysign(eps, val) : val;
  }
  next[j] = beta > 0 ? std::max(eps, eps * sqrt_n_ * col_j / beta) : 1.0;

  std::copy(cur_.begin(), cur_.begin() + static_cast<std::ptrdiff_t>(j), prev_.begin());
  std::copy(next.begin(), next.end(), cur_.begin());
  latest_ = j + 1;
}

void OmegaState::mark_reorthogonalized(std::size_t column, std::size_t range_end) {
  if (column != latest_) return;
  for (std::size_t i = 0; i < range_end && i < latest_; ++i) cur_[i] = eps;
}

double OmegaState::max_estimate(std::size_t range_end) const {
  double m = 0;
  for (std::size_t i = 0; i < std::min(range_end, latest_); ++i) m = std::max(m, std::abs(cur_[i]));
  return m;
}

// ---------------------------------------------------------------------------

ReorthDirective policy_step(const ReorthPolicy& policy, int iter, const OmegaState* omega,
                            std::size_t k) {
  const ReorthRange range = policy.k_variant() ? ReorthRange::FirstK : ReorthRange::AllFilled;
  switch (policy.kind) {
    case ReorthKind::Full:
    case ReorthKind::KSO:
      return {range, false};
    case ReorthKind::Periodic:
    case ReorthKind::KPeriodic:
      if (iter > 0 && iter % policy.freq == 0) return {range, true};
      return {};
    case ReorthKind::PRO:
    case ReorthKind::KPRO: {
      if (omega == nullptr) return {};
      const std::size_t end =
          policy.kind == ReorthKind::KPRO ? k : omega->latest_column();
      if (omega->max_estimate(end) >= policy.eta()) return {range, true};
      return {};
    }
    case ReorthKind::RestartOnly:
      return {};
  }
  return {};
}

std::size_t ReorthLog::count_after(int skip_cycles) const {
  return static_cast<std::size_t>(std::count_if(
      events.begin(), events.end(), [&](const ReorthEvent& e) { return e.cycle > skip_cycles; }));
}

// ---------------------------------------------------------------------------

template <Scalar S>
GramSchmidtResult orthogonalize_against(std::span<S> v, const DenseBlock<S>& V,
                                        std::size_t range_end) {
  GramSchmidtResult res;
  res.norm_before = norm2<S>(v);
  double current = res.norm_before;
  std::vector<S> h(range_end);
  for (int pass = 0; pass < 2; ++pass) {
    if (range_end == 0) break;
    block_adjoint_times<S>(V, range_end, v, h);
    block_times_add<S>(V, h, S{-1}, v);
    ++res.passes;
    const double after = norm2<S>(v);
    const bool dropped = after < current / std::sqrt(2.0);
    current = after;
    if (!dropped) break;
  }
  res.norm_after = current;
  res.breakdown = current <= 1e-14 * res.norm_before || current == 0.0;
  return res;
}

template <Scalar S>
GramSchmidtResult reorthogonalize(std::span<S> v, const DenseBlock<S>& V,
                                  std::size_t range_end) {
  GramSchmidtResult res = orthogonalize_against<S>(v, V, range_end);
  if (!res.breakdown) scale<S>(S{1.0 / res.norm_after}, v);
  return res;
}

template GramSchmidtResult orthogonalize_against<double>(std::span<double>,
                                                         const DenseBlock<double>&, std::size_t);
template GramSchmidtResult orthogonalize_against<Complex>(std::span<Complex>,
                                                          const DenseBlock<Complex>&, std::size_t);
template GramSchmidtResult reorthogonalize<double>(std::span<double>, const DenseBlock<double>&,
                                                   std::size_t);
template GramSchmidtResult reorthogonalize<Complex>(std::span<Complex>,
                                                    const DenseBlock<Complex>&, std::size_t);

}  // namespace landr
