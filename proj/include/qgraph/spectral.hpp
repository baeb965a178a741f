#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/toms748_solve.hpp>

#include "qgraph/error.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/roots.hpp"
#include "qgraph/secular.hpp"
#include "qgraph/vertex.hpp"

namespace qgraph {

enum class Sector { even, odd, none };

inline std::string_view sector_name(Sector s) {
  switch (s) {
    case Sector::even: return "even";
    case Sector::odd: return "odd";
    case Sector::none: return "none";
  }
  return "none";
}

struct SpectralRoot {
  double k = 0.0;
  int multiplicity = 0;

  double lambda() const { return k * k; }
};

struct Eigenspace {
  double k = 0.0;
  int multiplicity = 0;
  Sector sector = Sector::none;
  /// True when the basis was made real-valued.
  bool real = false;
  std::vector<EdgeSolutionBasis> basis;
  /// Same basis in regular coordinates, one column per member.
  CMatrix coefficients;
};

// --- singular values --------------------------------------------------------

inline RVector singular_values(const CMatrix& m) { return Eigen::JacobiSVD<CMatrix>(m).singularValues(); }

/// sigma_min / max(sigma_max, floor).
inline double relative_sigma_min(const CMatrix& m, double floor = 0.0) {
  const RVector s = singular_values(m);
  const double scale = std::max(s(0), floor);
  return scale > 0.0 ? s(s.size() - 1) / scale : 0.0;
}

inline int count_small_singular_values(const CMatrix& m, double tol, double floor = 0.0) {
  const RVector s = singular_values(m);
  const double scale = std::max(s(0), floor);
  int count = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) <= tol * scale) ++count;
  }
  return count;
}

/// Lower bound for the norm of the regular system; keeps the relative residual
/// meaningful when every coefficient column vanishes at once.
inline double system_norm_floor(const SecularProblem& p, double k) {
  const CMatrix& s = p.global_scattering();
  const auto id = CMatrix::Identity(s.rows(), s.cols());
  return 1e-3 * std::sqrt((s - id).squaredNorm() + (s + id).squaredNorm()) * std::max(1.0, k);
}

inline double residual_at(const SecularProblem& p, double k) {
  return relative_sigma_min(regular_system(p, k), system_norm_floor(p, k));
}

inline int nullity_at(const SecularProblem& p, double k, double tol) {
  return count_small_singular_values(regular_system(p, k), tol, system_norm_floor(p, k));
}

/// Grid of (kmax - kmin)/2048, never coarser than pi/(4 * total length).
inline ScanOptions default_scan_options(const MetricGraph& g, double tol = 1e-8) {
  ScanOptions o;
  o.tol = tol;
  o.grid_divisions = 2048;
  o.max_step = kPi / (4.0 * g.total_length());
  return o;
}

/// Located zeros closer to 0 than this belong to the exact k = 0 root.
inline double zero_merge_radius(const MetricGraph& g) { return 1e-6 / g.total_length(); }

/// Eigenvalues k in (kmin, kmax] with multiplicities, plus k = 0 when kmin = 0
/// and the k = 0 system is singular.
inline std::vector<SpectralRoot> find_eigenvalues(const SecularProblem& p, double kmin, double kmax,
                                                  std::optional<ScanOptions> options = std::nullopt) {
  if (!(kmin >= 0.0) || !(kmax > kmin) || !std::isfinite(kmax)) {
    throw Error(Errc::domain_error, "need kmax > kmin >= 0");
  }
  const ScanOptions opt = options.value_or(default_scan_options(p.graph()));
  const auto residual = [&](double k) { return residual_at(p, k); };

  double step = (kmax - kmin) / opt.grid_divisions;
  if (opt.max_step > 0.0) step = std::min(step, opt.max_step);
  const auto zeros = locate_zeros(residual, kmin, kmax + step, opt);

  std::vector<SpectralRoot> out;
  if (kmin == 0.0) {
    const int m0 = nullity_at(p, 0.0, opt.tol);
    if (m0 > 0) out.push_back({0.0, m0});
  }
  const double lower = kmin == 0.0 ? zero_merge_radius(p.graph()) : kmin;
  for (const auto& z : zeros) {
    if (z.k <= lower * (1.0 + 1e-12) || z.k > kmax + 1e-10 * std::max(1.0, kmax)) continue;
    const int m = nullity_at(p, z.k, opt.tol);
    out.push_back({z.k, std::max(m, 1)});
  }
  return out;
}

/// Roots of the fast-path secular matrix S_e(k) - S_v, located by its smallest
/// singular value and confirmed against |det| <= det_tol.
inline std::vector<double> secular_roots_fastpath(const SecularProblem& p, double kmin, double kmax,
                                                  double det_tol = 1e-9) {
  ScanOptions opt = default_scan_options(p.graph());
  const auto residual = [&](double k) { return relative_sigma_min(secular_matrix_fastpath(p, k)); };
  std::vector<double> out;
  for (const auto& z : locate_zeros(residual, kmin, kmax, opt)) {
    if (std::abs(secular_det_fastpath(p, z.k)) <= det_tol) out.push_back(z.k);
  }
  return out;
}

/// Zeros of the figure-eight inner factor by sign changes and TOMS 748 bracketing.
inline std::vector<double> figure_eight_roots_bisection(double theta, double l1, double l2, double kmin, double kmax,
                                                        int cells = 4096) {
  const auto f = [&](double k) { return figure_eight_secular_factor(theta, l1, l2, k); };
  std::vector<double> out;
  const double h = (kmax - kmin) / cells;
  double a = kmin, fa = f(a);
  for (int i = 1; i <= cells; ++i) {
    const double b = kmin + h * i;
    const double fb = f(b);
    if (fa == 0.0) {
      out.push_back(a);
    } else if (fa * fb < 0.0) {
      std::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb,
                                                       boost::math::tools::eps_tolerance<double>(52), iters);
      out.push_back(0.5 * (r.first + r.second));
    }
    a = b;
    fa = fb;
  }
  if (fa == 0.0) out.push_back(a);
  return out;
}

// --- eigenspaces ------------------------------------------------------------

namespace detail {

/// Makes the first clearly nonzero coefficient of each column real positive.
inline void fix_column_phase(CMatrix& basis) {
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    const double scale = basis.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < basis.rows(); ++i) {
      const cplx c = basis(i, j);
      if (std::abs(c) > 1e-8 * scale) {
        basis.col(j) *= std::conj(c) / std::abs(c);
        break;
      }
    }
  }
}

inline cplx weighted_dot(const CVector& a, const RVector& w, const CVector& b) {
  return (a.conjugate().array() * w.array().cast<cplx>() * b.array()).sum();
}

/// Pivoted Gram-Schmidt under the diagonal weight `w`. A candidate counts as
/// numerically null once its projected norm is below `drop` times the largest
/// candidate norm. Stops after `limit` members.
inline CMatrix orthonormalize(const CMatrix& candidates, const RVector& w, double drop, Eigen::Index limit) {
  std::vector<CVector> pool;
  double scale = 0.0;
  for (Eigen::Index j = 0; j < candidates.cols(); ++j) {
    pool.emplace_back(candidates.col(j));
    scale = std::max(scale, std::sqrt(std::max(0.0, weighted_dot(pool.back(), w, pool.back()).real())));
  }

  std::vector<CVector> kept;
  while (static_cast<Eigen::Index>(kept.size()) < limit && !pool.empty()) {
    std::size_t best = 0;
    double best_norm = -1.0;
    for (std::size_t c = 0; c < pool.size(); ++c) {
      auto& v = pool[c];
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : kept) v -= weighted_dot(q, w, v) * q;
      }
      const double now = std::sqrt(std::max(0.0, weighted_dot(v, w, v).real()));
      if (now > best_norm) {
        best_norm = now;
        best = c;
      }
    }
    if (best_norm <= drop * scale) break;
    kept.push_back(pool[best] / best_norm);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
  }

  CMatrix out(candidates.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = kept[j];
  return out;
}

inline Eigenspace make_space(double k, CMatrix coefficients, Sector sector, bool real) {
  Eigenspace s;
  s.k = k;
  s.multiplicity = static_cast<int>(coefficients.cols());
  s.sector = sector;
  s.real = real;
  for (Eigen::Index j = 0; j < coefficients.cols(); ++j) s.basis.push_back(from_regular(k, coefficients.col(j)));
  s.coefficients = std::move(coefficients);
  return s;
}

}  // namespace detail

/// Orthonormal L2 basis of the eigenspace at k; real-valued whenever the
/// conditions are conjugation invariant.
inline Eigenspace eigenspace_at(const SecularProblem& p, double k, double tol = 1e-8) {
  const CMatrix m = regular_system(p, k);
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  const RVector s = svd.singularValues();
  const double scale = std::max(s(0), system_norm_floor(p, k));
  Eigen::Index nullity = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) <= tol * scale) ++nullity;
  }
  if (nullity == 0) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "k=" << k << " is not an eigenvalue (relative sigma_min " << s(s.size() - 1) / scale << ")";
    throw Error(Errc::not_an_eigenvalue, msg.str());
  }

  const CMatrix null = svd.matrixV().rightCols(nullity);
  const RVector w = regular_gram(p.graph(), k);

  CMatrix basis;
  bool real = false;
  if (p.all_symmetric()) {
    CMatrix candidates(null.rows(), 2 * nullity);
    candidates.leftCols(nullity) = null.real().cast<cplx>();
    candidates.rightCols(nullity) = null.imag().cast<cplx>();
    basis = detail::orthonormalize(candidates, w, 1e-10, nullity);
    basis = basis.real().cast<cplx>();
    real = basis.cols() == nullity;
  }
  if (!real) basis = detail::orthonormalize(null, w, 1e-10, nullity);
  detail::fix_column_phase(basis);
  return detail::make_space(k, std::move(basis), Sector::none, real);
}

/// L2 Gram matrix of an eigenspace basis (identity when orthonormal).
inline CMatrix gram_matrix(const MetricGraph& g, const Eigenspace& s) {
  const RVector w = regular_gram(g, s.k);
  return s.coefficients.adjoint() * w.asDiagonal() * s.coefficients;
}

// --- symmetry ---------------------------------------------------------------

/// Involution of the endpoint set that maps edges onto edges of equal length,
/// acting on functions by transporting them along the matched edges.
class EndpointInvolution {
 public:
  /// `images[j-1]` is the image of endpoint j (1-based).
  static EndpointInvolution create(const MetricGraph& g, std::vector<int> images) {
    const int n = g.endpoint_count();
    if (static_cast<int>(images.size()) != n) throw Error(Errc::symmetry_unavailable, "wrong involution size");
    for (int j = 1; j <= n; ++j) {
      const int i = images[static_cast<std::size_t>(j - 1)];
      if (i < 1 || i > n || images[static_cast<std::size_t>(i - 1)] != j) {
        throw Error(Errc::symmetry_unavailable, "endpoint map is not an involution");
      }
    }
    for (int e = 1; e <= g.edge_count(); ++e) {
      const int a = images[static_cast<std::size_t>(2 * e - 2)], b = images[static_cast<std::size_t>(2 * e - 1)];
      if (MetricGraph::edge_of(a) != MetricGraph::edge_of(b)) {
        throw Error(Errc::symmetry_unavailable, "involution splits edge " + std::to_string(e));
      }
      if (g.length(MetricGraph::edge_of(a)) != g.length(e)) {
        throw Error(Errc::symmetry_unavailable, "involution maps edges of different length");
      }
    }
    return EndpointInvolution(std::move(images));
  }

  /// x -> -x on every edge.
  static EndpointInvolution edge_reflection(const MetricGraph& g) {
    std::vector<int> images;
    for (int e = 1; e <= g.edge_count(); ++e) {
      images.push_back(2 * e);
      images.push_back(2 * e - 1);
    }
    return create(g, std::move(images));
  }

  const std::vector<int>& images() const { return images_; }

  CMatrix endpoint_matrix() const {
    const auto n = static_cast<Eigen::Index>(images_.size());
    CMatrix m = CMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) m(images_[static_cast<std::size_t>(j)] - 1, j) = 1.0;
    return m;
  }

  /// Action on regular coordinates: alpha is carried over, beta flips when the edge is reversed.
  CMatrix regular_matrix() const {
    const auto n = static_cast<Eigen::Index>(images_.size());
    CMatrix m = CMatrix::Zero(n, n);
    for (Eigen::Index e = 0; e < n / 2; ++e) {
      const int left_image = images_[static_cast<std::size_t>(2 * e)];
      const Eigen::Index target = MetricGraph::edge_of(left_image) - 1;
      const double orientation = MetricGraph::is_left(left_image) ? 1.0 : -1.0;
      m(2 * target, 2 * e) = 1.0;
      m(2 * target + 1, 2 * e + 1) = orientation;
    }
    return m;
  }

  EdgeSolutionBasis apply(const EdgeSolutionBasis& f) const {
    return from_regular(f.k, CVector(regular_matrix() * to_regular(f)));
  }

  /// Max entry of P S P^T - S for the global vertex matrix.
  double commutator_defect(const SecularProblem& p) const {
    const CMatrix pm = endpoint_matrix();
    return max_abs(pm * p.global_scattering() * pm.transpose() - p.global_scattering());
  }

 private:
  explicit EndpointInvolution(std::vector<int> images) : images_(std::move(images)) {}
  std::vector<int> images_;
};

/// Splits an eigenspace into the +1 (even) and -1 (odd) eigenspaces of the
/// involution. Only non-empty sectors are returned, even first.
inline std::vector<std::pair<Sector, Eigenspace>> symmetry_sector(const SecularProblem& p, const Eigenspace& space,
                                                                  const EndpointInvolution& j) {
  if (j.commutator_defect(p) > kMatrixTol) {
    throw Error(Errc::symmetry_unavailable, "vertex conditions do not commute with the involution");
  }
  const RVector w = regular_gram(p.graph(), space.k);
  const CMatrix& phi = space.coefficients;
  CMatrix a = phi.adjoint() * w.asDiagonal() * j.regular_matrix() * phi;
  a = 0.5 * (a + a.adjoint()).eval();
  RVector lambdas;
  CMatrix vectors;
  if (space.real) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.real());
    lambdas = eig.eigenvalues();
    vectors = eig.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(a);
    lambdas = eig.eigenvalues();
    vectors = eig.eigenvectors();
  }

  CMatrix even_vecs(phi.cols(), 0), odd_vecs(phi.cols(), 0);
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    const double lam = lambdas(i);
    if (std::abs(std::abs(lam) - 1.0) > 1e-6) {
      throw Error(Errc::symmetry_unavailable, "eigenspace is not invariant under the involution");
    }
    CMatrix& dst = lam > 0.0 ? even_vecs : odd_vecs;
    dst.conservativeResize(Eigen::NoChange, dst.cols() + 1);
    dst.col(dst.cols() - 1) = vectors.col(i);
  }

  std::vector<std::pair<Sector, Eigenspace>> out;
  for (auto [sector, vecs] : {std::pair{Sector::even, &even_vecs}, std::pair{Sector::odd, &odd_vecs}}) {
    if (vecs->cols() == 0) continue;
    CMatrix sub = phi * *vecs;
    detail::fix_column_phase(sub);
    out.emplace_back(sector, detail::make_space(space.k, std::move(sub), sector, space.real));
  }
  return out;
}

inline std::vector<std::pair<Sector, Eigenspace>> symmetry_sector(const SecularProblem& p, const Eigenspace& space) {
  return symmetry_sector(p, space, EndpointInvolution::edge_reflection(p.graph()));
}

}  // namespace qgraph
