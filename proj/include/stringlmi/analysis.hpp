#pragma once

// Parameter studies over (c, c0, N): minimum certified wave speed, stability
// charts and checks of the order hierarchy.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stringlmi/sdp.hpp"
#include "stringlmi/system.hpp"

namespace stringlmi::analysis {

struct SpeedSearchOptions {
  int scan_points = 32;
  double tol = 1e-2;
  double margin = 1e-6;
  SolverOptions solver;
  /// Called after every solve. Chart sweeps call it from worker threads, so
  /// it must be thread-safe.
  std::function<void(const SystemDescription&, int order, const CertifyReport&)> on_solve;
};

struct MinSpeedResult {
  std::optional<double> c_min;
  /// Largest speed known not to be certified below c_min (bracket end of the
  /// bisection); empty when c_min is the bracket's lower end.
  std::optional<double> last_not_certified;
  int solves = 0;
};

/// Scan [c_lo, c_hi] on `scan_points` equispaced speeds, then bisect between
/// the last non-certified and first certified scan points down to `tol`.
/// Throws DomainError on an invalid bracket, tolerance or damping.
MinSpeedResult min_speed(const SystemDescription& sys, double c0, int order,
                         std::pair<double, double> bracket,
                         const SpeedSearchOptions& options = {});

enum class CellStatus { kFound, kNone, kError };

const char* to_string(CellStatus s) noexcept;

struct ChartCell {
  double c0 = 0.0;
  int order = 0;
  CellStatus status = CellStatus::kNone;
  std::optional<double> c_min;
  std::string message;  ///< error text for kError cells
};

struct StabilityChart {
  std::vector<double> c0_grid;
  std::vector<int> orders;
  /// Row-major by c0 then order: cells[i * orders.size() + j].
  std::vector<ChartCell> cells;
  std::uint64_t system_hash = 0;
  double margin = 0.0;
  std::pair<double, double> bracket;
  double tol = 0.0;

  const ChartCell& at(std::size_t c0_index, std::size_t order_index) const {
    return cells[c0_index * orders.size() + order_index];
  }

  /// "c0,N,c_min,status" with 6 significant digits; c_min empty unless found.
  std::string to_csv() const;

  /// (c0, lower order, higher order) triples where c_min increases with N by
  /// more than `slack`.
  std::vector<std::string> hierarchy_violations(double slack) const;
};

struct ChartOptions {
  SpeedSearchOptions search;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 1;
};

/// One min_speed search per (c0, N) cell. Cell failures are recorded, never
/// thrown. Throws ConfigError on an empty grid or order list.
StabilityChart stability_chart(const SystemDescription& sys, const std::vector<double>& c0_grid,
                               const std::vector<int>& orders, std::pair<double, double> bracket,
                               const ChartOptions& options = {});

struct HierarchyReport {
  int order = 0;
  double base_max_eig_psi = 0.0;
  /// (eps', max eig of Psi_{N+1} at diag(P_N, eps' I2), S, R)
  std::vector<std::pair<double, double>> padded;
  bool padded_negative = false;  ///< at the smallest eps' in the sweep
  SolveStatus resolve_status = SolveStatus::kNotCertified;
};

/// Order-N certificate padded to order N+1, plus an independent solve at N+1.
/// Throws ConfigError when N+1 exceeds the supported order and
/// PreconditionError when order N is not certified.
HierarchyReport hierarchy_check(const SystemDescription& sys, int order,
                                const SpeedSearchOptions& options = {});

}  // namespace stringlmi::analysis
