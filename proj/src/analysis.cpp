#include "stringlmi/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "stringlmi/error.hpp"
#include "stringlmi/legendre.hpp"
#include "stringlmi/lmi.hpp"

namespace stringlmi::analysis {

namespace {

constexpr const char* kModule = "analysis";

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

MinSpeedResult min_speed(const SystemDescription& sys, double c0, int order,
                         std::pair<double, double> bracket, const SpeedSearchOptions& options) {
  const auto [lo, hi] = bracket;
  if (!(lo > 0.0) || !(lo < hi) || !std::isfinite(hi)) {
    throw DomainError(kModule, "invalid speed bracket [" + fmt6(lo) + ", " + fmt6(hi) + "]");
  }
  if (!(options.tol > 0.0)) throw DomainError(kModule, "bisection tolerance must be positive");
  if (!(c0 > 0.0)) throw DomainError(kModule, "boundary damping c0 must be positive");
  if (options.scan_points < 2) throw ConfigError(kModule, "scan needs at least two points");

  MinSpeedResult out;
  auto certified = [&](double c) {
    ++out.solves;
    const SystemDescription inst = sys.with_wave(c, c0);
    const CertifyReport rep = certify(inst, order, options.margin, options.solver);
    if (options.on_solve) options.on_solve(inst, order, rep);
    return rep.status == SolveStatus::kFeasible;
  };

  const int m = options.scan_points;
  int first = -1;
  double prev = lo;
  for (int i = 0; i < m; ++i) {
    const double c = lo + (hi - lo) * i / (m - 1);
    if (certified(c)) {
      first = i;
      break;
    }
    prev = c;
  }
  if (first < 0) return out;
  if (first == 0) {
    out.c_min = lo;
    return out;
  }
  double bad = prev;
  double good = lo + (hi - lo) * first / (m - 1);
  while (good - bad > options.tol) {
    const double mid = 0.5 * (bad + good);
    if (certified(mid)) {
      good = mid;
    } else {
      bad = mid;
    }
  }
  out.c_min = good;
  out.last_not_certified = bad;
  return out;
}

const char* to_string(CellStatus s) noexcept {
  switch (s) {
    case CellStatus::kFound:
      return "found";
    case CellStatus::kNone:
      return "none";
    case CellStatus::kError:
      return "error";
  }
  return "error";
}

std::string StabilityChart::to_csv() const {
  std::ostringstream os;
  os << "c0,N,c_min,status\n";
  for (const auto& cell : cells) {
    os << fmt6(cell.c0) << ',' << cell.order << ',';
    if (cell.c_min) os << fmt6(*cell.c_min);
    os << ',' << to_string(cell.status) << '\n';
  }
  return os.str();
}

std::vector<std::string> StabilityChart::hierarchy_violations(double slack) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < c0_grid.size(); ++i) {
    for (std::size_t a = 0; a < orders.size(); ++a) {
      for (std::size_t b = 0; b < orders.size(); ++b) {
        if (orders[b] <= orders[a]) continue;
        const ChartCell& lower = at(i, a);
        const ChartCell& higher = at(i, b);
        if (lower.c_min && higher.c_min && *higher.c_min > *lower.c_min + slack) {
          out.push_back("c0=" + fmt6(c0_grid[i]) + ": N=" + std::to_string(orders[b]) + " c_min " +
                        fmt6(*higher.c_min) + " > N=" + std::to_string(orders[a]) + " c_min " +
                        fmt6(*lower.c_min));
        }
        if (lower.c_min && higher.status == CellStatus::kNone) {
          out.push_back("c0=" + fmt6(c0_grid[i]) + ": N=" + std::to_string(orders[b]) +
                        " has no certified speed but N=" + std::to_string(orders[a]) + " does");
        }
      }
    }
  }
  return out;
}

StabilityChart stability_chart(const SystemDescription& sys, const std::vector<double>& c0_grid,
                               const std::vector<int>& orders, std::pair<double, double> bracket,
                               const ChartOptions& options) {
  if (c0_grid.empty()) throw ConfigError(kModule, "empty c0 grid");
  if (orders.empty()) throw ConfigError(kModule, "empty order list");
  sys.validate();

  StabilityChart chart;
  chart.c0_grid = c0_grid;
  chart.orders = orders;
  chart.system_hash = sys.hash();
  chart.margin = options.search.margin;
  chart.bracket = bracket;
  chart.tol = options.search.tol;
  chart.cells.resize(c0_grid.size() * orders.size());

  auto run_cell = [&](std::size_t idx) {
    ChartCell& cell = chart.cells[idx];
    cell.c0 = c0_grid[idx / orders.size()];
    cell.order = orders[idx % orders.size()];
    try {
      const MinSpeedResult r = min_speed(sys, cell.c0, cell.order, bracket, options.search);
      cell.c_min = r.c_min;
      cell.status = r.c_min ? CellStatus::kFound : CellStatus::kNone;
    } catch (const std::exception& e) {
      cell.status = CellStatus::kError;
      cell.c_min.reset();
      cell.message = e.what();
    }
  };

  unsigned workers = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                          : options.threads;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(chart.cells.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < chart.cells.size(); ++i) run_cell(i);
    return chart;
  }
  // Each worker writes only its own cells, so the merge is by index.
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < chart.cells.size(); i = next++) run_cell(i);
    });
  }
  for (auto& t : pool) t.join();
  return chart;
}

HierarchyReport hierarchy_check(const SystemDescription& sys, int order,
                                const SpeedSearchOptions& options) {
  if (order < 0 || order + 1 > legendre::kMaxOrder) {
    throw ConfigError(kModule, "order " + std::to_string(order) +
                                   " has no successor within the supported range");
  }
  const LmiBlocks base = build_blocks(sys, order);
  const CertifyReport solved = certify(base, options.margin, options.solver);
  if (solved.status != SolveStatus::kFeasible) {
    throw PreconditionError(kModule, "instance is not certified at order " + std::to_string(order));
  }
  const Certificate& cert = *solved.certificate;

  HierarchyReport report;
  report.order = order;
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble_psi(base, cert.P, cert.S, cert.R),
                                                      Eigen::EigenvaluesOnly);
    report.base_max_eig_psi = es.eigenvalues().maxCoeff();
  }

  const LmiBlocks next = build_blocks(sys, order + 1);
  const int p = base.p_size();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pe(cert.P, Eigen::EigenvaluesOnly);
  const double scale = pe.eigenvalues().maxCoeff();
  for (double f : {1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
    const double eps = f * scale;
    Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(p + 2, p + 2);
    padded.topLeftCorner(p, p) = cert.P;
    padded.bottomRightCorner<2, 2>() = eps * Eigen::Matrix2d::Identity();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble_psi(next, padded, cert.S, cert.R),
                                                      Eigen::EigenvaluesOnly);
    report.padded.emplace_back(eps, es.eigenvalues().maxCoeff());
  }
  report.padded_negative = report.padded.back().second < 0.0;
  report.resolve_status = certify(next, options.margin, options.solver).status;
  return report;
}

}  // namespace stringlmi::analysis
