// Acceptance checks for the figure-eight model. One PASS/FAIL line per criterion;
// exit status is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qgraph/qgraph.hpp"

using namespace qgraph;

namespace {

// pinned tolerances
constexpr double kRootTol = 1e-9;
constexpr double kGroundAmpTol = 1e-8;
constexpr double kSweepTol = 1e-6;
constexpr double kPhaseTol = 1e-6;
constexpr double kTrivialPhaseTol = 1e-8;
constexpr double kOracleTol = 1e-7;
constexpr double kMatrixInvTol = 1e-12;
constexpr double kResidualTol = 1e-8;
constexpr double kOrthoTol = 1e-8;
constexpr double kGaugeTol = 1e-6;
constexpr double kRefineTol = 1e-6;
constexpr double kSpectrumSeconds = 5.0;
constexpr double kBerrySeconds = 30.0;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [" << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SecularProblem figure_eight(double theta, double l1, double l2) {
  return {build_figure_eight(l1, l2), {build_s_theta(theta)}};
}

SweepPlan plan_for(int n, Sector sector, int steps, double l1 = 1.0, double l2 = 1.0) {
  return SweepPlan{family_figure_eight(), build_figure_eight(l1, l2), steps, BranchTarget{n, sector, {}}, 1e-8};
}

using Form = std::function<std::pair<double, double>(double)>;

// closed forms of the tracked amplitudes
const Form kOddIndexForm = [](double t) {
  return std::pair{std::cos(0.5 * t) - std::sin(0.5 * t), -std::cos(0.5 * t) - std::sin(0.5 * t)};
};
const Form kEvenIndexForm = [](double t) {
  return std::pair{std::cos(0.5 * t) + std::sin(0.5 * t), std::cos(0.5 * t) - std::sin(0.5 * t)};
};

double sup_error(const std::vector<AmplitudeRow>& rows, const Form& form, double scale = 1.0) {
  double err = 0.0;
  for (const auto& r : rows) {
    const auto [a1, a2] = form(r.theta);
    err = std::max({err, std::abs(r.a1 - scale * a1), std::abs(r.a2 - scale * a2)});
  }
  return err;
}

Outcome equal_length_spectrum() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double theta : {0.3, 1.0, 2.5, 4.0, 5.9}) {
    auto roots = find_eigenvalues(figure_eight(theta, 1.0, 1.0), 0.0, 10.0 * kPi);
    std::erase_if(roots, [](const auto& r) { return r.k == 0.0; });
    if (roots.size() != 10) {
      out.require(false, "theta=" + std::to_string(theta) + ": " + std::to_string(roots.size()) + " roots");
      continue;
    }
    for (int n = 1; n <= 10; ++n) {
      const auto& r = roots[static_cast<std::size_t>(n - 1)];
      worst = std::max(worst, std::abs(r.k - n * kPi));
      out.require(r.multiplicity == 2, "multiplicity at n=" + std::to_string(n));
    }
  }
  const double elapsed = seconds_since(t0);
  out.require(worst <= kRootTol, "root error");
  out.require(elapsed < kSpectrumSeconds, "runtime");
  out.detail << " max|k-n*pi|=" << worst << " time=" << elapsed << "s";
  return out;
}

Outcome ground_state() {
  Outcome out;
  // 16 angles 2*pi*j/16 sit on the 513-point grid at every 32nd point
  const auto rows = amplitude_sweep(plan_for(0, Sector::even, 513));
  double worst = 0.0;
  for (int j = 0; j < 16; ++j) {
    const auto& row = rows[static_cast<std::size_t>(32 * j)];
    const double theta = 2.0 * kPi * j / 16.0;
    out.require(std::abs(row.theta - theta) <= 1e-12, "grid alignment");
    out.require(row.k == 0.0, "tracked k");

    const auto p = figure_eight(theta, 1.0, 1.0);
    const auto roots = find_eigenvalues(p, 0.0, 1.0);
    out.require(!roots.empty() && roots.front().k == 0.0 && roots.front().multiplicity == 1, "k=0 simple");
    const auto sectors = symmetry_sector(p, eigenspace_at(p, 0.0));
    out.require(sectors.size() == 1 && sectors.front().first == Sector::even, "even ground state");

    const auto [a1, a2] = kEvenIndexForm(theta);
    worst = std::max({worst, std::abs(row.a1 - a1 / std::sqrt(2.0)), std::abs(row.a2 - a2 / std::sqrt(2.0))});
  }
  out.require(worst <= kGroundAmpTol, "amplitude error");
  out.detail << " max amplitude error=" << worst;
  return out;
}

Outcome special_spectra() {
  Outcome out;
  const std::vector<std::pair<double, std::vector<double>>> cases = {
      {0.0, {kPi / 2, kPi, 3 * kPi / 2, 2 * kPi}},
      {parse_angle("pi/2"), {kPi / 3, kPi, 5 * kPi / 3, 2 * kPi}},
      {parse_angle("3pi/2"), {2 * kPi / 3, kPi, 4 * kPi / 3, 2 * kPi}},
  };
  double worst = 0.0;
  for (const auto& [theta, expected] : cases) {
    auto roots = find_eigenvalues(figure_eight(theta, 1.0, 3.0), 0.0, 7.0);
    std::erase_if(roots, [](const auto& r) { return r.k == 0.0; });
    if (roots.size() != expected.size()) {
      out.require(false, "theta=" + std::to_string(theta) + ": " + std::to_string(roots.size()) + " roots");
      continue;
    }
    for (std::size_t i = 0; i < roots.size(); ++i) {
      worst = std::max(worst, std::abs(roots[i].k - expected[i]));
      out.require(roots[i].multiplicity == 2, "multiplicity");
    }
  }
  out.require(worst <= kRootTol, "root error");
  out.detail << " max root error=" << worst;
  return out;
}

Outcome amplitude_oracle() {
  Outcome out;
  const double even1 = sup_error(amplitude_sweep(plan_for(1, Sector::even, 512)), kOddIndexForm);
  const double even2 = sup_error(amplitude_sweep(plan_for(2, Sector::even, 512)), kEvenIndexForm);
  const auto odd1 = amplitude_sweep(plan_for(1, Sector::odd, 512));
  const auto odd2 = amplitude_sweep(plan_for(2, Sector::odd, 512));
  // odd sector against the even-sector forms with the index parity exchanged
  const double exchanged = std::max(sup_error(odd1, kEvenIndexForm), sup_error(odd2, kOddIndexForm));
  const double same = std::max(sup_error(odd1, kOddIndexForm), sup_error(odd2, kEvenIndexForm));
  out.require(even1 <= kSweepTol, "even n=1");
  out.require(even2 <= kSweepTol, "even n=2");
  out.require(exchanged <= kSweepTol, "odd sector, exchanged forms");
  out.detail << " even n=1 sup=" << even1 << " even n=2 sup=" << even2 << " odd exchanged sup=" << exchanged
             << " (odd against same-parity forms sup=" << same << ")";
  return out;
}

Outcome berry_phases() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int loops = 0;
  auto check = [&](int n, Sector s, double l2) {
    const auto r = berry_phase(track_branch(plan_for(n, s, 256, 1.0, l2)));
    for (double phi : r.eigenphases) worst = std::max(worst, kPi - std::abs(phi));
    ++loops;
  };
  for (int n = 0; n <= 5; ++n) {
    check(n, Sector::even, 1.0);
    if (n > 0) check(n, Sector::odd, 1.0);
  }
  for (int n = 1; n <= 3; ++n) {
    check(n, Sector::even, 1.3);
    check(n, Sector::odd, 1.3);
  }
  SweepPlan control = plan_for(1, Sector::even, 256);
  control.family = constant_family({build_s_theta(1.0)});
  const double trivial = std::abs(berry_phase(track_branch(control)).eigenphases.front());
  const double elapsed = seconds_since(t0);
  out.require(worst <= kPhaseTol, "phase pi");
  out.require(trivial <= kTrivialPhaseTol, "constant family");
  out.require(elapsed < kBerrySeconds, "runtime");
  out.detail << " loops=" << loops << " max|phi-pi|=" << worst << " control|phi|=" << trivial << " time=" << elapsed
             << "s";
  return out;
}

Outcome oracle_equivalence() {
  Outcome out;
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> th(0.0, 2.0 * kPi), len(0.5, 2.5);
  double worst = 0.0;
  std::size_t total = 0;
  for (int draw = 0; draw < 8; ++draw) {
    const double t = th(rng), l1 = len(rng), l2 = len(rng);
    const auto p = figure_eight(t, l1, l2);
    // the exponential basis degenerates at k = 0, so start just above it
    const double kmin = 0.05, kmax = 20.0;
    const auto fast = secular_roots_fastpath(p, kmin, kmax);
    const auto full = locate_zeros([&](double k) { return relative_sigma_min(assemble_system(p, k)); }, kmin, kmax,
                                   default_scan_options(p.graph()));
    if (fast.size() != full.size()) {
      out.require(false, "draw " + std::to_string(draw) + ": " + std::to_string(fast.size()) + " vs " +
                             std::to_string(full.size()) + " roots");
      continue;
    }
    total += fast.size();
    for (std::size_t i = 0; i < fast.size(); ++i) worst = std::max(worst, std::abs(fast[i] - full[i].k));
  }
  out.require(worst <= kOracleTol, "root sets differ");
  out.detail << " roots compared=" << total << " max difference=" << worst;
  return out;
}

Outcome topology_cycle() {
  Outcome out;
  const auto g = build_figure_eight(1.0, 1.0);
  auto expect = [&](const std::string& label, double theta, int components, int betti1) {
    const auto t = effective_topology(g, split_vertices(g, {build_s_theta(theta)}));
    const bool ok = t.components == components && t.betti1 == betti1;
    out.require(ok, label);
  };
  for (double theta : {0.3, 1.0, 2.0, 2.9, 4.0, 5.5}) expect("generic " + std::to_string(theta), theta, 1, 2);
  expect("pi/2", parse_angle("pi/2"), 2, 2);
  expect("3pi/2", parse_angle("3pi/2"), 2, 2);
  expect("0", 0.0, 1, 1);
  expect("pi", parse_angle("pi"), 1, 1);
  expect("2pi", parse_angle("2pi"), 1, 1);
  out.detail << " generic (1,2), pi/2 and 3pi/2 (2,2), 0 and pi (1,1)";
  return out;
}

Outcome invariant_suite() {
  Outcome out;
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> th(0.0, 2.0 * kPi), len(0.5, 2.5);

  double s_defect = 0.0;
  const CMatrix j = edge_reflection_matrix(2);
  for (int i = 0; i < 256; ++i) {
    const auto s = build_s_theta(th(rng));
    s_defect = std::max({s_defect, s.unitarity_defect(), s.hermiticity_defect(),
                         max_abs(j * s.matrix() - s.matrix() * j)});
  }

  double residual = 0.0, ortho = 0.0;
  for (int draw = 0; draw < 6; ++draw) {
    const auto p = figure_eight(th(rng), len(rng), len(rng));
    for (const auto& r : find_eigenvalues(p, 0.0, 15.0)) {
      const auto space = eigenspace_at(p, r.k);
      for (const auto& f : space.basis) residual = std::max(residual, vertex_residual(p, f));
      const CMatrix gram = gram_matrix(p.graph(), space);
      ortho = std::max(ortho, max_abs(gram - CMatrix::Identity(gram.rows(), gram.cols())));
      out.require(space.coefficients.imag().cwiseAbs().maxCoeff() == 0.0, "real basis");
    }
  }

  double gauge = 0.0, refine = 0.0;
  for (auto sector : {Sector::even, Sector::odd, Sector::none}) {
    const auto path = track_branch(plan_for(2, sector, 128, 1.0, 1.3));
    const auto base = berry_phase(path);
    std::vector<CMatrix> bases;
    for (const auto& b : path.bases) bases.push_back(b.coefficients);
    for (std::size_t i = 1; i + 1 < bases.size(); ++i) {
      const auto d = bases[i].cols();
      const Eigen::MatrixXd g =
          Eigen::MatrixXd::NullaryExpr(d, d, [&] { return std::normal_distribution<double>()(rng); });
      const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
      bases[i] = (bases[i] * q.cast<cplx>()).eval();
    }
    const auto moved = holonomy_from_matrix(wilson_loop(path.graph, path.k, bases));
    const auto fine = berry_phase(track_branch(plan_for(2, sector, 256, 1.0, 1.3)));
    for (std::size_t i = 0; i < base.eigenphases.size(); ++i) {
      gauge = std::max(gauge, std::abs(wrap_phase(moved.eigenphases[i] - base.eigenphases[i])));
      refine = std::max(refine, std::abs(wrap_phase(fine.eigenphases[i] - base.eigenphases[i])));
    }
  }

  out.require(s_defect <= kMatrixInvTol, "S_theta invariants");
  out.require(residual <= kResidualTol, "vertex residual");
  out.require(ortho <= kOrthoTol, "orthonormality");
  out.require(gauge <= kGaugeTol, "gauge invariance");
  out.require(refine <= kRefineTol, "grid refinement");
  out.detail << " S defect=" << s_defect << " residual=" << residual << " gram=" << ortho << " gauge=" << gauge
             << " refinement=" << refine;
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"equal-length spectrum", equal_length_spectrum},
      {"ground state", ground_state},
      {"special-angle spectra", special_spectra},
      {"amplitude sweep oracle", amplitude_oracle},
      {"berry phase", berry_phases},
      {"oracle equivalence", oracle_equivalence},
      {"topology cycle", topology_cycle},
      {"invariant suite", invariant_suite},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %zu %s:%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed;
}
