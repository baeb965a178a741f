#pragma once

// Continuation of an eigenvalue branch around a closed parameter loop and the
// geometric phase of the transported eigenfunctions (discrete Wilson loop).

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qgraph/error.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/spectral.hpp"
#include "qgraph/vertex.hpp"

namespace qgraph {

/// Which branch to follow: the `index`-th distinct eigenvalue at theta = 0
/// (k = 0 counts as index 0 when present) or the single root inside
/// `k_window`. Sector::none tracks the whole eigenspace.
struct BranchTarget {
  int index = 1;
  Sector sector = Sector::even;
  std::optional<std::pair<double, double>> k_window;
};

struct SweepPlan {
  ConditionFamily family;
  MetricGraph graph;
  int steps = 256;
  BranchTarget target;
  double tol = 1e-8;
};

struct BranchPath {
  MetricGraph graph;
  double period = 2.0 * kPi;
  Sector sector = Sector::none;
  std::vector<double> theta;
  std::vector<double> k;
  /// Aligned sector bases, regular coordinates.
  std::vector<Eigenspace> bases;
  /// overlaps[j] = <basis j, basis j+1>.
  std::vector<CMatrix> overlaps;

  int dim() const { return bases.empty() ? 0 : static_cast<int>(bases.front().coefficients.cols()); }
};

enum class PhaseClass { trivial, nontrivial, generic };

inline std::string_view phase_class_name(PhaseClass c) {
  switch (c) {
    case PhaseClass::trivial: return "trivial";
    case PhaseClass::nontrivial: return "nontrivial";
    case PhaseClass::generic: return "generic";
  }
  return "generic";
}

struct HolonomyResult {
  CMatrix holonomy;
  std::vector<double> eigenphases;
  std::vector<PhaseClass> classification;
};

/// Unitary factor U V^* of O = U S V^*.
inline CMatrix polar_unitary(const CMatrix& o) {
  Eigen::JacobiSVD<CMatrix> svd(o, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

/// <A, B> for bases given in regular coordinates at k_a and k_b.
inline CMatrix basis_overlap(const MetricGraph& g, double k_a, const CMatrix& a, double k_b, const CMatrix& b) {
  const RVector w = regular_overlap(g, k_a, k_b);
  return a.adjoint() * w.asDiagonal() * b;
}

/// Angle in (-pi, pi]; values within 1e-9 of -pi are reported as pi.
inline double wrap_phase(double phi) {
  phi = std::remainder(phi, 2.0 * kPi);
  if (phi <= -kPi + 1e-9) phi += 2.0 * kPi;
  return phi;
}

namespace detail {

struct StepFailure {
  Errc code;
  std::string what;
};

struct TrackedState {
  double theta;
  double k;
  double velocity;
  CMatrix basis;
};

inline std::optional<Eigenspace> select_sector(const SecularProblem& p, const Eigenspace& full, Sector sector) {
  if (sector == Sector::none) return full;
  for (auto& [s, sub] : symmetry_sector(p, full)) {
    if (s == sector) return sub;
  }
  return std::nullopt;
}

inline SecularProblem problem_at(const SweepPlan& plan, double theta) { return {plan.graph, plan.family(theta)}; }

/// Roots inside [centre - w, centre + w] (clipped at 0).
inline std::vector<double> roots_in_window(const SecularProblem& p, double centre, double w, double tol) {
  const double lo = std::max(0.0, centre - w), hi = centre + w;
  std::vector<double> out;
  if (lo == 0.0 && nullity_at(p, 0.0, tol) > 0) out.push_back(0.0);
  ScanOptions opt;
  opt.tol = tol;
  opt.grid_divisions = 8;
  const auto residual = [&](double k) { return residual_at(p, k); };
  for (const auto& z : locate_zeros(residual, lo, hi, opt)) {
    if (z.k < zero_merge_radius(p.graph())) continue;  // the k = 0 root is handled exactly above
    out.push_back(z.k);
  }
  return out;
}

inline std::optional<StepFailure> advance(const SweepPlan& plan, TrackedState& state, double theta_to, double window,
                                          int dim) {
  const double dtheta = theta_to - state.theta;
  const SecularProblem p = problem_at(plan, theta_to);
  const double predictor = std::max(0.0, state.k + state.velocity * dtheta);

  const auto roots = roots_in_window(p, predictor, window, plan.tol);
  if (roots.empty()) {
    return StepFailure{Errc::step_too_coarse, "branch left the continuity window"};
  }
  if (roots.size() > 1) {
    return StepFailure{Errc::branch_ambiguity, "several roots inside the continuity window"};
  }
  const double k = roots.front();

  const auto sector = select_sector(p, eigenspace_at(p, k, plan.tol), plan.target.sector);
  if (!sector || sector->coefficients.cols() != dim) {
    return StepFailure{Errc::branch_ambiguity, "tracked subspace changed dimension"};
  }

  CMatrix next = sector->coefficients;
  const CMatrix o = basis_overlap(plan.graph, state.k, state.basis, k, next);
  if (dim == 1) {
    const double mag = std::abs(o(0, 0));
    if (mag < 1e-12) return StepFailure{Errc::step_too_coarse, "zero overlap between consecutive steps"};
    next *= std::conj(o(0, 0)) / mag;
  } else {
    Eigen::JacobiSVD<CMatrix> svd(o, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues()(dim - 1) < 1e-12) {
      return StepFailure{Errc::step_too_coarse, "singular overlap between consecutive steps"};
    }
    next = (next * svd.matrixV() * svd.matrixU().adjoint()).eval();
  }
  if (sector->real) next = next.real().cast<cplx>().eval();

  state.velocity = dtheta != 0.0 ? (k - state.k) / dtheta : 0.0;
  state.theta = theta_to;
  state.k = k;
  state.basis = std::move(next);
  return std::nullopt;
}

inline std::string theta_text(double theta) {
  std::ostringstream s;
  s.precision(17);
  s << theta;
  return s.str();
}

inline double initial_root(const SweepPlan& plan, const SecularProblem& p) {
  const auto& t = plan.target;
  if (t.k_window) {
    const auto [lo, hi] = *t.k_window;
    const auto roots = find_eigenvalues(p, lo, hi);
    if (roots.empty()) throw Error(Errc::domain_error, "no eigenvalue inside the requested k window at theta=0");
    if (roots.size() > 1) throw Error(Errc::branch_ambiguity, "several eigenvalues inside the k window at theta=0");
    return roots.front().k;
  }
  if (t.index < 0) throw Error(Errc::usage_error, "branch index must be non-negative");
  double kmax = kPi * (t.index + 2) / plan.graph.total_length() * 2.0;
  for (int attempt = 0; attempt < 12; ++attempt, kmax *= 2.0) {
    const auto roots = find_eigenvalues(p, 0.0, kmax);
    if (static_cast<int>(roots.size()) > t.index + 1) return roots[static_cast<std::size_t>(t.index)].k;
  }
  throw Error(Errc::domain_error, "could not locate branch " + std::to_string(t.index) + " at theta=0");
}

}  // namespace detail

inline void validate_plan(const SweepPlan& plan) {
  if (plan.steps < 16) {
    throw Error(Errc::step_too_coarse,
                "sweep needs at least 16 grid points (got " + std::to_string(plan.steps) + "); try doubling --steps");
  }
}

/// Follows the target branch over theta in [0, period] on `steps` grid points.
inline BranchPath track_branch(const SweepPlan& plan) {
  validate_plan(plan);
  const double period = plan.family.period();
  const double bound = 2.0 * period / (plan.steps * plan.graph.total_length());

  BranchPath path{plan.graph, period, plan.target.sector, {}, {}, {}, {}};

  const SecularProblem p0 = detail::problem_at(plan, 0.0);
  const double k0 = detail::initial_root(plan, p0);
  const auto start = detail::select_sector(p0, eigenspace_at(p0, k0, plan.tol), plan.target.sector);
  if (!start) {
    throw Error(Errc::domain_error, "eigenvalue at theta=0 has no " + std::string(sector_name(plan.target.sector)) +
                                        " member");
  }
  const int dim = static_cast<int>(start->coefficients.cols());

  detail::TrackedState state{0.0, k0, 0.0, start->coefficients};
  path.theta.push_back(0.0);
  path.k.push_back(k0);
  path.bases.push_back(*start);

  constexpr int kMaxHalvings = 8;
  for (int j = 1; j < plan.steps; ++j) {
    const double theta_to = j + 1 == plan.steps ? period : period * j / (plan.steps - 1);
    std::optional<detail::StepFailure> failure;
    detail::TrackedState trial = state;
    for (int level = 0; level <= kMaxHalvings; ++level) {
      trial = state;
      const int substeps = 1 << level;
      failure.reset();
      for (int s = 1; s <= substeps && !failure; ++s) {
        const double t = s == substeps ? theta_to : state.theta + (theta_to - state.theta) * s / substeps;
        failure = detail::advance(plan, trial, t, bound / substeps, dim);
      }
      if (!failure) break;
    }
    if (failure) {
      throw Error(failure->code, failure->what + " at theta=" + detail::theta_text(theta_to) +
                                     (failure->code == Errc::step_too_coarse ? "; try doubling the step count" : ""));
    }

    const CMatrix o = basis_overlap(plan.graph, state.k, state.basis, trial.k, trial.basis);
    const double smin = Eigen::JacobiSVD<CMatrix>(o).singularValues()(dim - 1);
    if (smin < 0.5) {
      throw Error(Errc::step_too_coarse, "overlap " + std::to_string(smin) + " below 0.5 at theta=" +
                                             detail::theta_text(theta_to) + "; try doubling the step count");
    }
    path.overlaps.push_back(o);
    state = std::move(trial);

    Eigenspace space = detail::make_space(state.k, state.basis, plan.target.sector, path.bases.front().real);
    path.theta.push_back(state.theta);
    path.k.push_back(state.k);
    path.bases.push_back(std::move(space));
  }
  return path;
}

/// Product of polar-unitarized overlaps around the loop, closed by comparing the
/// final basis with the initial one. Eigenvalues are gauge invariant.
inline CMatrix wilson_loop(const MetricGraph& g, const std::vector<double>& ks, const std::vector<CMatrix>& bases) {
  const auto n = bases.size();
  const auto dim = bases.front().cols();
  CMatrix w = CMatrix::Identity(dim, dim);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    w = (w * polar_unitary(basis_overlap(g, ks[j], bases[j], ks[j + 1], bases[j + 1]))).eval();
  }
  return (w * polar_unitary(basis_overlap(g, ks[n - 1], bases[n - 1], ks[0], bases[0]))).eval();
}

inline HolonomyResult holonomy_from_matrix(CMatrix w) {
  HolonomyResult out;
  Eigen::ComplexEigenSolver<CMatrix> eig(w);
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double phi = wrap_phase(std::arg(eig.eigenvalues()(i)));
    out.eigenphases.push_back(phi);
    if (std::abs(phi) <= 1e-6) {
      out.classification.push_back(PhaseClass::trivial);
    } else if (kPi - std::abs(phi) <= 1e-6) {
      out.classification.push_back(PhaseClass::nontrivial);
    } else {
      out.classification.push_back(PhaseClass::generic);
    }
  }
  std::sort(out.eigenphases.begin(), out.eigenphases.end());
  out.holonomy = std::move(w);
  return out;
}

inline HolonomyResult berry_phase(const BranchPath& path) {
  if (path.bases.size() < 2) throw Error(Errc::domain_error, "path has fewer than two points");
  const double span = path.theta.back() - path.theta.front();
  if (std::abs(span - path.period) > 1e-12 * path.period) throw Error(Errc::domain_error, "path is not closed");
  if (std::abs(path.k.back() - path.k.front()) > 1e-8 * std::max(1.0, path.k.front())) {
    throw Error(Errc::domain_error, "branch does not return to its starting eigenvalue");
  }
  std::vector<CMatrix> bases;
  for (const auto& b : path.bases) bases.push_back(b.coefficients);
  return holonomy_from_matrix(wilson_loop(path.graph, path.k, bases));
}

struct AmplitudeRow {
  double theta;
  double k;
  double a1;
  double a2;
};

/// Per grid point, the coefficients of cos(kx) (even) or sin(kx) (odd) on the
/// two edges of the figure-eight graph, taken from the tracked basis.
inline std::vector<AmplitudeRow> amplitude_sweep(const SweepPlan& plan) {
  if (plan.graph.edge_count() != 2 || plan.graph.vertex_count() != 1) {
    throw Error(Errc::unsupported_condition, "amplitude sweep is defined for the two-edge figure-eight graph");
  }
  if (plan.target.sector == Sector::none) {
    throw Error(Errc::unsupported_condition, "amplitude sweep needs an even or odd sector");
  }
  const BranchPath path = track_branch(plan);
  if (path.dim() != 1) throw Error(Errc::unsupported_condition, "amplitude sweep needs a one-dimensional sector");

  std::vector<AmplitudeRow> rows;
  for (std::size_t j = 0; j < path.theta.size(); ++j) {
    const CVector c = path.bases[j].coefficients.col(0);
    const double k = path.k[j];
    double a1 = 0.0, a2 = 0.0;
    if (plan.target.sector == Sector::even) {
      a1 = c(0).real();
      a2 = c(2).real();
    } else {
      const double scale = k > 0.0 ? 1.0 / k : 1.0;
      a1 = c(1).real() * scale;
      a2 = c(3).real() * scale;
    }
    rows.push_back({path.theta[j], k, a1, a2});
  }
  return rows;
}

}  // namespace qgraph
