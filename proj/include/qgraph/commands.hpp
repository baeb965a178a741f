#pragma once

// Implementations behind the qgraph command-line subcommands.

#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qgraph/error.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/holonomy.hpp"
#include "qgraph/io.hpp"
#include "qgraph/spectral.hpp"
#include "qgraph/vertex.hpp"

namespace qgraph::cli {

inline constexpr const char* kTolEnv = "QUANTGRAPH_TOL";

/// --tol beats QUANTGRAPH_TOL beats the built-in 1e-8.
inline double resolve_tolerance(std::optional<double> flag) {
  if (flag) {
    if (!(*flag > 0.0)) throw Error(Errc::usage_error, "--tol must be positive");
    return *flag;
  }
  if (const char* env = std::getenv(kTolEnv); env && *env) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) {
      throw Error(Errc::usage_error, std::string(kTolEnv) + " is not a positive number");
    }
    return v;
  }
  return 1e-8;
}

/// "even", "odd", or "full"/"both" (whole eigenspace).
inline Sector parse_sector(const std::string& s) {
  if (s == "even") return Sector::even;
  if (s == "odd") return Sector::odd;
  if (s == "full" || s == "both") return Sector::none;
  throw Error(Errc::usage_error, "unknown sector '" + s + "' (expected even, odd or full)");
}

inline SecularProblem problem_at(const GraphDocument& doc, double theta) { return {doc.graph(), doc.family()(theta)}; }

inline ResultTable cmd_spectrum(const GraphDocument& doc, double theta, double kmax, double tol) {
  if (!(kmax > 0.0) || !std::isfinite(kmax)) throw Error(Errc::usage_error, "--kmax must be positive");
  const auto p = problem_at(doc, theta);
  ScanOptions opt = default_scan_options(p.graph(), tol);
  ResultTable table({"k", "lambda", "multiplicity"});
  for (const auto& r : find_eigenvalues(p, 0.0, kmax, opt)) {
    table.add_row({r.k, r.lambda(), static_cast<double>(r.multiplicity)});
  }
  return table;
}

/// One row per (eigenvalue, basis member, edge): u = cos_coef cos(kx) + sin_coef sin(kx)
/// on that edge (cos_coef + sin_coef x at k = 0). parity is +1 even, -1 odd, 0 unsplit.
inline ResultTable cmd_eigenfunctions(const GraphDocument& doc, double theta, double kmax, double tol) {
  if (!(kmax > 0.0) || !std::isfinite(kmax)) throw Error(Errc::usage_error, "--kmax must be positive");
  const auto p = problem_at(doc, theta);
  ScanOptions opt = default_scan_options(p.graph(), tol);
  ResultTable table({"k", "member", "parity", "edge", "cos_re", "cos_im", "sin_re", "sin_im"});

  const auto reflection = EndpointInvolution::edge_reflection(p.graph());
  const bool symmetric = reflection.commutator_defect(p) <= kMatrixTol;

  for (const auto& r : find_eigenvalues(p, 0.0, kmax, opt)) {
    const Eigenspace space = eigenspace_at(p, r.k, tol);
    std::vector<std::pair<double, const Eigenspace*>> parts;
    std::vector<std::pair<Sector, Eigenspace>> sectors;
    if (symmetric) {
      sectors = symmetry_sector(p, space, reflection);
      for (const auto& [s, sub] : sectors) parts.emplace_back(s == Sector::even ? 1.0 : -1.0, &sub);
    } else {
      parts.emplace_back(0.0, &space);
    }
    int member = 0;
    for (const auto& [parity, sub] : parts) {
      for (Eigen::Index j = 0; j < sub->coefficients.cols(); ++j, ++member) {
        for (int e = 0; e < p.graph().edge_count(); ++e) {
          const cplx alpha = sub->coefficients(2 * e, j);
          const cplx beta = sub->coefficients(2 * e + 1, j);
          const cplx sin_coef = r.k > 0.0 ? beta / r.k : beta;
          table.add_row({r.k, static_cast<double>(member), parity, static_cast<double>(e + 1), alpha.real(),
                         alpha.imag(), sin_coef.real(), sin_coef.imag()});
        }
      }
    }
  }
  return table;
}

inline SweepPlan make_plan(const GraphDocument& doc, int n, Sector sector, int steps, double tol) {
  if (n < 0) throw Error(Errc::usage_error, "--n must be non-negative");
  return SweepPlan{doc.family(), doc.graph(), steps, BranchTarget{n, sector, std::nullopt}, tol};
}

inline ResultTable cmd_sweep(const GraphDocument& doc, int n, Sector sector, int steps, double tol) {
  if (!doc.builtin_figure8) throw Error(Errc::usage_error, "sweep needs the builtin figure8_theta family");
  ResultTable table({"theta", "k", "a1", "a2"});
  for (const auto& row : amplitude_sweep(make_plan(doc, n, sector, steps, tol))) {
    table.add_row({row.theta, row.k, row.a1, row.a2});
  }
  return table;
}

inline std::string phase_text(double phi) {
  if (std::abs(phi) <= 1e-6) return "0";
  if (kPi - std::abs(phi) <= 1e-6) return "π";
  return format_number(phi);
}

struct BerryReport {
  HolonomyResult result;
  double k0 = 0.0;
  std::string summary;
};

inline BerryReport cmd_berry(const GraphDocument& doc, int n, Sector sector, int steps, double tol) {
  const auto path = track_branch(make_plan(doc, n, sector, steps, tol));
  BerryReport report{berry_phase(path), path.k.front(), {}};
  std::ostringstream out;
  out << "branch n=" << n << " sector=" << (sector == Sector::none ? "full" : sector_name(sector))
      << " k(0)=" << format_number(path.k.front()) << " steps=" << steps << " dim=" << path.dim() << "\n";
  out << "eigenphases:";
  for (double phi : report.result.eigenphases) out << " " << format_number(phi);
  out << "\n";
  for (std::size_t i = 0; i < report.result.eigenphases.size(); ++i) {
    out << "phase = " << phase_text(report.result.eigenphases[i]) << " ("
        << phase_class_name(report.result.classification[i]) << ")\n";
  }
  report.summary = out.str();
  return report;
}

inline std::string format_blocks(const EndpointPartition& blocks) {
  std::string out;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    out += b ? ",{" : "{";
    for (std::size_t i = 0; i < blocks[b].size(); ++i) out += (i ? "," : "") + std::to_string(blocks[b][i]);
    out += "}";
  }
  return out;
}

inline TopologySummary topology_at(const GraphDocument& doc, double theta) {
  const MetricGraph g = doc.graph();
  return effective_topology(g, split_vertices(g, doc.family()(theta)));
}

inline std::string cmd_topology(const GraphDocument& doc, double theta) {
  const auto t = topology_at(doc, theta);
  std::ostringstream out;
  out << "blocks " << format_blocks(t.blocks) << "\n"
      << "components " << t.components << "\n"
      << "betti1 " << t.betti1 << "\n";
  return out.str();
}

}  // namespace qgraph::cli
