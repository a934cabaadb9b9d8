#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "landr/reorth.hpp"

namespace landr {

enum class SolveStatus {
  Converged,
  MaxIterations,  // also: max cycles reached
  Indefinite,     // CG met <p, Ap> <= 0
  Stagnated,      // Galerkin projection singular; iterate frozen
  Unstable,       // block-CG Gram matrix lost rank
};

std::string to_string(SolveStatus s);

inline constexpr double kNotMeasured = std::numeric_limits<double>::quiet_NaN();

struct HistoryPoint {
  int cycle = 0;           // 0 for non-restarted solvers
  int iteration = 0;       // global iteration (matvec-producing step) count
  std::uint64_t matvecs = 0;
  std::uint64_t vecops = 0;
  double resid_rel = 0;    // ||r|| / ||b||
  double orthodefect = kNotMeasured;
};

/// End-of-cycle snapshot for restarted eigen-solvers.
struct CycleRecord {
  int cycle = 0;
  std::uint64_t matvecs = 0;
  double resid_rel = 0;
  double orthodefect = kNotMeasured;
  std::vector<double> values;     // (harmonic) Ritz values, target order
  std::vector<double> residuals;  // eigenresidual norms, same order
};

/// Omega estimate vs measured inner products, one entry per Lanczos step when
/// tracing is enabled.
struct OmegaSample {
  int cycle = 0;
  int iter = 0;
  bool triggered = false;
  double estimate = 0;
  double measured = 0;
};

struct ConvergenceHistory {
  std::vector<HistoryPoint> points;
  std::vector<CycleRecord> cycles;
  ReorthLog reorth;
  std::vector<OmegaSample> omega_trace;
  std::uint64_t matvecs = 0;
  std::uint64_t vecops = 0;

  /// Matvec count at the first point with resid_rel <= tol.
  std::optional<std::uint64_t> matvecs_to(double tol) const;
  double final_resid() const { return points.empty() ? 0.0 : points.back().resid_rel; }
  int iterations() const { return points.empty() ? 0 : points.back().iteration; }
};

}  // namespace landr
