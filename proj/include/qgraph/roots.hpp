#pragma once

// Localization of zeros of a non-negative residual r(k) that touches zero
// (smallest relative singular value of a condition matrix). Zeros of even
// order in det() are ordinary V-shaped minima of r, so there is no sign
// change to bisect on; we scan a grid, bracket local minima and refine.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include "qgraph/error.hpp"

namespace qgraph {

struct ScanOptions {
  int grid_divisions = 2048;
  /// Upper bound on the grid step; 0 means no bound.
  double max_step = 0.0;
  /// Relative singular-value tolerance deciding "zero".
  double tol = 1e-8;
  /// Golden-section termination, relative to max(1, k).
  double k_tol = 1e-14;
  /// Sub-grid resolution used to separate close minima inside a cell.
  int subdivisions = 8;
  int max_depth = 3;
};

struct ResidualMinimum {
  double k;
  double residual;
};

namespace detail {

inline ResidualMinimum refine_minimum(const std::function<double(double)>& r, double a, double m, double b,
                                      double k_tol) {
  double fa = r(a), fm = r(m), fb = r(b);

  // three-point parabolic descent
  for (int it = 0; it < 6; ++it) {
    const double p = (m - a) * (m - a) * (fm - fb) - (m - b) * (m - b) * (fm - fa);
    const double q = (m - a) * (fm - fb) - (m - b) * (fm - fa);
    if (q == 0.0) break;
    const double x = m - 0.5 * p / q;
    if (!(x > a && x < b) || x == m) break;
    const double fx = r(x);
    if (fx >= fm) {
      if (x < m) { a = x; fa = fx; } else { b = x; fb = fx; }
      break;
    }
    if (x < m) { b = m; fb = fm; } else { a = m; fa = fm; }
    m = x;
    fm = fx;
  }

  // golden section
  constexpr double inv_phi = 0.6180339887498949;
  double best = m, fbest = fm;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = r(x1), f2 = r(x2);
  for (int it = 0; it < 200 && (b - a) > k_tol * std::max(1.0, std::abs(best)); ++it) {
    if (f1 < fbest) { best = x1; fbest = f1; }
    if (f2 < fbest) { best = x2; fbest = f2; }
    if (f1 <= f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = r(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = r(x2);
    }
  }
  if (f1 < fbest) { best = x1; fbest = f1; }
  if (f2 < fbest) { best = x2; fbest = f2; }
  return {best, fbest};
}

inline void collect_minima(const std::function<double(double)>& r, const std::vector<double>& ks,
                           const std::vector<double>& vals, const ScanOptions& opt, int depth,
                           std::vector<ResidualMinimum>& out) {
  const std::size_t n = ks.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || vals[i] <= vals[i - 1];
    const bool right_ok = i + 1 == n || vals[i] <= vals[i + 1];
    if (!left_ok || !right_ok) continue;
    const double a = ks[i == 0 ? 0 : i - 1];
    const double b = ks[i + 1 == n ? n - 1 : i + 1];
    if (b <= a) continue;

    if (depth < opt.max_depth) {
      // resolve several minima hiding in one bracket
      std::vector<double> sub_k, sub_v;
      const int m = 2 * opt.subdivisions;
      for (int j = 0; j <= m; ++j) {
        const double k = a + (b - a) * j / m;
        sub_k.push_back(k);
        sub_v.push_back(j == 0 ? (i == 0 ? vals[0] : vals[i - 1]) : j == m ? (i + 1 == n ? vals[n - 1] : vals[i + 1]) : r(k));
      }
      int interior_minima = 0;
      for (int j = 1; j < m; ++j) {
        if (sub_v[static_cast<std::size_t>(j)] <= sub_v[static_cast<std::size_t>(j - 1)] &&
            sub_v[static_cast<std::size_t>(j)] <= sub_v[static_cast<std::size_t>(j + 1)]) {
          ++interior_minima;
        }
      }
      if (interior_minima > 1) {
        collect_minima(r, sub_k, sub_v, opt, depth + 1, out);
        continue;
      }
    }
    // boundary minima only have a one-sided bracket
    const bool boundary = i == 0 || i + 1 == n;
    out.push_back(refine_minimum(r, a, boundary ? 0.5 * (a + b) : ks[i], b, opt.k_tol));
  }
}

}  // namespace detail

/// All k in [kmin, kmax] where `r` has a local minimum with r(k) <= tol, sorted.
/// Minima with tol < r <= 1e3 tol cannot be classified and raise root-refinement.
inline std::vector<ResidualMinimum> locate_zeros(const std::function<double(double)>& r, double kmin, double kmax,
                                                 const ScanOptions& opt) {
  if (!(kmax > kmin)) throw Error(Errc::domain_error, "empty search interval");
  double step = (kmax - kmin) / opt.grid_divisions;
  if (opt.max_step > 0.0) step = std::min(step, opt.max_step);
  const auto cells = static_cast<std::size_t>(std::ceil((kmax - kmin) / step));
  step = (kmax - kmin) / static_cast<double>(cells);

  std::vector<double> ks(cells + 1), vals(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    ks[i] = i == cells ? kmax : kmin + step * static_cast<double>(i);
    vals[i] = r(ks[i]);
  }

  std::vector<ResidualMinimum> minima;
  detail::collect_minima(r, ks, vals, opt, 0, minima);

  std::vector<ResidualMinimum> zeros;
  for (const auto& m : minima) {
    // a minimum pinned to the interval edge is a slope towards a root outside it
    const double edge = 1e-9 * std::max(1.0, std::abs(m.k));
    const bool at_edge = m.k - kmin <= edge || kmax - m.k <= edge;
    if (m.residual <= opt.tol) {
      zeros.push_back(m);
    } else if (m.residual <= 1e3 * opt.tol && !at_edge) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "minimum near k=" << m.k << " has residual " << m.residual << " (bracket [" << m.k - step << ", "
          << m.k + step << "]) that is neither a root nor clearly separated from zero";
      throw Error(Errc::root_refinement, msg.str());
    }
  }
  std::sort(zeros.begin(), zeros.end(), [](const auto& x, const auto& y) { return x.k < y.k; });

  std::vector<ResidualMinimum> merged;
  for (const auto& z : zeros) {
    if (!merged.empty() && z.k - merged.back().k <= 1e-8 * std::max(1.0, z.k)) {
      if (z.residual < merged.back().residual) merged.back() = z;
    } else {
      merged.push_back(z);
    }
  }
  return merged;
}

}  // namespace qgraph
