#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "landr/core.hpp"
#include "landr/projected_matrix.hpp"

namespace landr {

enum class ReorthKind { Full, KSO, Periodic, KPeriodic, PRO, KPRO, RestartOnly };

/// When, and against which basis vectors, new Lanczos vectors get
/// reorthogonalized after the first cycle. Every policy also reorthogonalizes
/// v_{k+1} and v_{k+2} at each restart.
struct ReorthPolicy {
  ReorthKind kind = ReorthKind::Full;
  int freq = 1;                 // Periodic / KPeriodic
  double eta_exponent = 0.5;    // PRO / KPRO: tolerance eps^eta_exponent

  static ReorthPolicy full() { return {ReorthKind::Full}; }
  static ReorthPolicy k_so() { return {ReorthKind::KSO}; }
  static ReorthPolicy periodic(int f) { return {ReorthKind::Periodic, f}; }
  static ReorthPolicy k_periodic(int f) { return {ReorthKind::KPeriodic, f}; }
  static ReorthPolicy pro(double e) { return {ReorthKind::PRO, 1, e}; }
  static ReorthPolicy k_pro(double e) { return {ReorthKind::KPRO, 1, e}; }
  static ReorthPolicy restart_only() { return {ReorthKind::RestartOnly}; }

  /// "full", "k-so", "periodic:40", "k-periodic:40", "pro:0.5", "k-pro:0.75",
  /// "restart-only". Throws std::invalid_argument on anything else.
  static ReorthPolicy parse(std::string_view text);
  std::string to_string() const;

  /// Reorthogonalize only against the k retained vectors.
  bool k_variant() const {
    return kind == ReorthKind::KSO || kind == ReorthKind::KPeriodic ||
           kind == ReorthKind::KPRO;
  }
  double eta() const;
  void validate() const;
};

/// Names accepted by ReorthPolicy::parse, for help text.
std::string reorth_policy_help();

enum class ReorthRange { None, FirstK, AllFilled };

struct ReorthDirective {
  ReorthRange range = ReorthRange::None;
  bool pair = false;  // also reorthogonalize the next vector

  bool active() const { return range != ReorthRange::None; }
};

/// Estimates |<v_{j+1}, v_i>| with Simon's omega recurrence. Holds the two
/// most recent rows, indexed by basis column.
class OmegaState {
 public:
  static constexpr double eps = std::numeric_limits<double>::epsilon();

  OmegaState() = default;
  OmegaState(std::size_t capacity, std::size_t n);

  /// Every estimate back to the floor, e.g. after a restart with the
  /// restart vectors reorthogonalized. `filled` columns are live.
  void reset(std::size_t filled);

  /// Advance from column j to j+1, given T̄ with column j complete (including
  /// t_{j+1,j}). Rows j-1 and j must be current.
  void update(const ProjectedMatrix& T, std::size_t j);

  /// The vector at `column` was reorthogonalized against [0, range_end).
  void mark_reorthogonalized(std::size_t column, std::size_t range_end);

  /// max_i omega_{latest, i} over i in [0, range_end).
  double max_estimate(std::size_t range_end) const;
  /// Estimates for the newest column against [0, latest).
  std::span<const double> latest() const { return {cur_.data(), latest_}; }
  std::size_t latest_column() const { return latest_; }

 private:
  std::vector<double> prev_;  // omega for column latest_-1
  std::vector<double> cur_;   // omega for column latest_
  std::size_t latest_ = 0;
  double sqrt_n_ = 1.0;
};

/// Decide what to do after the recurrence step that produced the vector with
/// within-cycle index `iter` (1 = v_{k+2}). `omega` may be empty except for
/// PRO variants.
ReorthDirective policy_step(const ReorthPolicy& policy, int iter,
                            const OmegaState* omega, std::size_t k);

struct ReorthEvent {
  int cycle = 0;
  int iter = 0;              // within-cycle index; 0 = restart vector v_{k+1}
  std::size_t column = 0;    // basis column that was reorthogonalized
  std::size_t range_end = 0; // against columns [0, range_end)
};

struct ReorthLog {
  std::vector<ReorthEvent> events;
  /// Vectors reorthogonalized in cycles after `skip_cycles`.
  std::size_t count_after(int skip_cycles) const;
};

struct GramSchmidtResult {
  double norm_before = 0;
  double norm_after = 0;
  bool breakdown = false;
  int passes = 0;
};

/// Orthogonalize v against V[:, 0..range_end) with classical Gram–Schmidt and
/// a second pass when the norm drops by more than 1/sqrt(2). v is not
/// normalized.
template <Scalar S>
GramSchmidtResult orthogonalize_against(std::span<S> v, const DenseBlock<S>& V,
                                        std::size_t range_end);

/// orthogonalize_against followed by normalization. Breakdown (v numerically
/// in the span, relative norm below 1e-14) leaves v unnormalized.
template <Scalar S>
GramSchmidtResult reorthogonalize(std::span<S> v, const DenseBlock<S>& V,
                                  std::size_t range_end);

}  // namespace landr
