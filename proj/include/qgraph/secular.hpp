#pragma once

// Condition systems for -u'' = k^2 u on a metric graph.
//
// Three coordinate systems for the edge solutions appear here:
//   exponential  u = c+ e^{ikx} + c- e^{-ikx}            (k > 0)
//   linear       u = a + b x                              (k = 0)
//   regular      u = alpha cos(kx) + beta sin(kx)/k       (all k >= 0; equals linear at k = 0)
// The regular coordinates never degenerate, so root finding and eigenspace
// construction work in them; the exponential/linear form is the public one.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qgraph/error.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/vertex.hpp"

namespace qgraph {

using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

/// Limiting values u(x_j) and inward normal derivatives du(x_j), endpoint order.
struct TraceVector {
  CVector values;
  CVector normal_derivatives;
};

/// (c_plus, c_minus) for k > 0, (a, b) for k = 0.
struct EdgeCoefficients {
  cplx c_plus;
  cplx c_minus;
};

struct EdgeSolutionBasis {
  double k = 0.0;
  std::vector<EdgeCoefficients> edges;
};

class SecularProblem {
 public:
  SecularProblem(MetricGraph graph, std::vector<VertexUnitary> conditions)
      : graph_(std::move(graph)), conditions_(std::move(conditions)) {
    if (static_cast<int>(conditions_.size()) != graph_.vertex_count()) {
      throw Error(Errc::invalid_partition, "one vertex matrix per vertex required");
    }
    const int n = graph_.endpoint_count();
    global_ = CMatrix::Zero(n, n);
    for (int v = 0; v < graph_.vertex_count(); ++v) {
      const auto& ends = graph_.vertices()[static_cast<std::size_t>(v)];
      const auto& s = conditions_[static_cast<std::size_t>(v)];
      if (s.dim() != static_cast<int>(ends.size())) {
        throw Error(Errc::invalid_partition,
                    "vertex " + std::to_string(v + 1) + " matrix size differs from its degree");
      }
      for (int i = 0; i < s.dim(); ++i) {
        for (int j = 0; j < s.dim(); ++j) {
          global_(ends[static_cast<std::size_t>(i)] - 1, ends[static_cast<std::size_t>(j)] - 1) = s(i, j);
        }
      }
      hermitian_ = hermitian_ && s.hermitian();
      symmetric_ = symmetric_ && s.symmetric();
    }
  }

  const MetricGraph& graph() const { return graph_; }
  const std::vector<VertexUnitary>& conditions() const { return conditions_; }

  /// Vertex matrices scattered into one 2N x 2N matrix in endpoint order.
  const CMatrix& global_scattering() const { return global_; }

  bool all_hermitian() const { return hermitian_; }
  /// Conjugation-invariant conditions: eigenfunctions can be chosen real.
  bool all_symmetric() const { return symmetric_; }

 private:
  MetricGraph graph_;
  std::vector<VertexUnitary> conditions_;
  CMatrix global_;
  bool hermitian_ = true;
  bool symmetric_ = true;
};

namespace detail {

/// Trace maps (values, normal derivatives) from stacked coefficients.
struct TraceMaps {
  CMatrix values;
  CMatrix derivatives;
};

inline TraceMaps regular_trace_maps(const MetricGraph& g, double k) {
  const int n = g.endpoint_count();
  TraceMaps t{CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
  for (int e = 0; e < g.edge_count(); ++e) {
    const double half = 0.5 * g.edges()[static_cast<std::size_t>(e)].length;
    const double c = std::cos(k * half);
    const double ksin = k * std::sin(k * half);
    const double sin_over_k = k > 0.0 ? std::sin(k * half) / k : half;
    const int l = 2 * e, r = 2 * e + 1;
    t.values(l, l) = c;
    t.values(l, r) = -sin_over_k;
    t.values(r, l) = c;
    t.values(r, r) = sin_over_k;
    // inward derivative: +u'(-l/2) on the left, -u'(l/2) on the right
    t.derivatives(l, l) = ksin;
    t.derivatives(l, r) = c;
    t.derivatives(r, l) = ksin;
    t.derivatives(r, r) = -c;
  }
  return t;
}

inline TraceMaps exponential_trace_maps(const MetricGraph& g, double k) {
  const int n = g.endpoint_count();
  TraceMaps t{CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
  for (int e = 0; e < g.edge_count(); ++e) {
    const double half = 0.5 * g.edges()[static_cast<std::size_t>(e)].length;
    const cplx ep = std::exp(kI * k * half);
    const cplx em = std::exp(-kI * k * half);
    const int l = 2 * e, r = 2 * e + 1;
    t.values(l, l) = em;
    t.values(l, r) = ep;
    t.values(r, l) = ep;
    t.values(r, r) = em;
    t.derivatives(l, l) = kI * k * em;
    t.derivatives(l, r) = -kI * k * ep;
    t.derivatives(r, l) = -kI * k * ep;
    t.derivatives(r, r) = kI * k * em;
  }
  return t;
}

inline CMatrix condition_matrix(const SecularProblem& p, const TraceMaps& t) {
  const auto& s = p.global_scattering();
  const auto id = CMatrix::Identity(s.rows(), s.cols());
  return kI * (s - id) * t.values - (s + id) * t.derivatives;
}

inline double sinc(double t) {
  if (std::abs(t) < 1e-4) return 1.0 - t * t / 6.0 + t * t * t * t / 120.0;
  return std::sin(t) / t;
}

}  // namespace detail

/// S_e(k): e^{ik l_n} at (2n-1, 2n) and (2n, 2n-1).
inline CMatrix edge_matrix(const MetricGraph& g, double k) {
  if (!(k > 0.0)) throw Error(Errc::domain_error, "edge matrix needs k > 0");
  const int n = g.endpoint_count();
  CMatrix m = CMatrix::Zero(n, n);
  for (int e = 0; e < g.edge_count(); ++e) {
    const cplx z = std::exp(kI * k * g.edges()[static_cast<std::size_t>(e)].length);
    m(2 * e, 2 * e + 1) = z;
    m(2 * e + 1, 2 * e) = z;
  }
  return m;
}

/// det(S_e(k) - S_v); only valid when the vertex scattering matrix is energy independent.
inline cplx secular_det_fastpath(const SecularProblem& p, double k) {
  if (!p.all_hermitian()) {
    throw Error(Errc::unsupported_condition, "fast path needs Hermitian vertex matrices");
  }
  return (edge_matrix(p.graph(), k) - p.global_scattering()).determinant();
}

/// S_e(k) - S_v, the matrix behind secular_det_fastpath.
inline CMatrix secular_matrix_fastpath(const SecularProblem& p, double k) {
  if (!p.all_hermitian()) {
    throw Error(Errc::unsupported_condition, "fast path needs Hermitian vertex matrices");
  }
  return edge_matrix(p.graph(), k) - p.global_scattering();
}

/// i(S-I) u - (S+I) du applied to exponential coefficients (linear basis at k = 0).
inline CMatrix assemble_system(const SecularProblem& p, double k) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw Error(Errc::domain_error, "k must be finite and non-negative");
  if (k == 0.0) return detail::condition_matrix(p, detail::regular_trace_maps(p.graph(), 0.0));
  return detail::condition_matrix(p, detail::exponential_trace_maps(p.graph(), k));
}

/// Same conditions in regular coordinates; continuous in k down to k = 0.
inline CMatrix regular_system(const SecularProblem& p, double k) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw Error(Errc::domain_error, "k must be finite and non-negative");
  return detail::condition_matrix(p, detail::regular_trace_maps(p.graph(), k));
}

/// sin(k (l1+l2)/2) + sin(theta) sin(k (l1-l2)/2); its zeros are the nonzero
/// spectrum of the figure-eight family.
inline double figure_eight_secular_factor(double theta, double l1, double l2, double k) {
  return std::sin(0.5 * k * (l1 + l2)) + exact_sin_cos(theta).first * std::sin(0.5 * k * (l1 - l2));
}

// --- coordinate changes -----------------------------------------------------

/// Stacked regular coordinates (alpha_1, beta_1, alpha_2, ...) of a solution.
inline CVector to_regular(const EdgeSolutionBasis& f) {
  CVector v(2 * static_cast<Eigen::Index>(f.edges.size()));
  for (std::size_t e = 0; e < f.edges.size(); ++e) {
    const auto& c = f.edges[e];
    const auto i = static_cast<Eigen::Index>(2 * e);
    if (f.k == 0.0) {
      v(i) = c.c_plus;
      v(i + 1) = c.c_minus;
    } else {
      v(i) = c.c_plus + c.c_minus;
      v(i + 1) = kI * f.k * (c.c_plus - c.c_minus);
    }
  }
  return v;
}

inline EdgeSolutionBasis from_regular(double k, const CVector& v) {
  EdgeSolutionBasis f;
  f.k = k;
  f.edges.resize(static_cast<std::size_t>(v.size() / 2));
  for (std::size_t e = 0; e < f.edges.size(); ++e) {
    const cplx alpha = v(static_cast<Eigen::Index>(2 * e));
    const cplx beta = v(static_cast<Eigen::Index>(2 * e + 1));
    if (k == 0.0) {
      f.edges[e] = {alpha, beta};
    } else {
      const cplx t = beta / (2.0 * kI * k);
      f.edges[e] = {0.5 * alpha + t, 0.5 * alpha - t};
    }
  }
  return f;
}

/// Pointwise value on edge n (1-based) at coordinate x.
inline cplx evaluate(const EdgeSolutionBasis& f, int edge, double x) {
  const auto& c = f.edges.at(static_cast<std::size_t>(edge - 1));
  if (f.k == 0.0) return c.c_plus + c.c_minus * x;
  return c.c_plus * std::exp(kI * f.k * x) + c.c_minus * std::exp(-kI * f.k * x);
}

/// Endpoint traces from the closed-form exponential (or linear) expressions.
inline TraceVector traces(const MetricGraph& g, const EdgeSolutionBasis& f) {
  const int n = g.endpoint_count();
  TraceVector t{CVector::Zero(n), CVector::Zero(n)};
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& c = f.edges.at(static_cast<std::size_t>(e));
    const double half = 0.5 * g.edges()[static_cast<std::size_t>(e)].length;
    if (f.k == 0.0) {
      t.values(2 * e) = c.c_plus - c.c_minus * half;
      t.values(2 * e + 1) = c.c_plus + c.c_minus * half;
      t.normal_derivatives(2 * e) = c.c_minus;
      t.normal_derivatives(2 * e + 1) = -c.c_minus;
    } else {
      const double k = f.k;
      auto val = [&](double x) { return c.c_plus * std::exp(kI * k * x) + c.c_minus * std::exp(-kI * k * x); };
      auto der = [&](double x) {
        return kI * k * (c.c_plus * std::exp(kI * k * x) - c.c_minus * std::exp(-kI * k * x));
      };
      t.values(2 * e) = val(-half);
      t.values(2 * e + 1) = val(half);
      t.normal_derivatives(2 * e) = der(-half);
      t.normal_derivatives(2 * e + 1) = -der(half);
    }
  }
  return t;
}

/// ||i(S-I)u - (S+I)du||_2 for a candidate eigenfunction.
inline double vertex_residual(const SecularProblem& p, const EdgeSolutionBasis& f) {
  const auto t = traces(p.graph(), f);
  const auto& s = p.global_scattering();
  const auto id = CMatrix::Identity(s.rows(), s.cols());
  return (kI * (s - id) * t.values - (s + id) * t.normal_derivatives).norm();
}

// --- L2 inner products in regular coordinates ----------------------------------

/// {int cos(k1 x) cos(k2 x), int sin(k1 x)/k1 * sin(k2 x)/k2} over [-l/2, l/2];
/// the mixed cos*sin integrals vanish by parity.
inline std::array<double, 2> edge_overlap(double length, double k1, double k2) {
  const double h = 0.5 * length;
  const double diff = k1 - k2, sum = k1 + k2;
  const double cc = h * (detail::sinc(diff * h) + detail::sinc(sum * h));

  double ss = 0.0;
  const double kmin = std::min(k1, k2);
  if (k1 == k2 && k1 * length < 1e-2) {
    const double t2 = (k1 * length) * (k1 * length);
    ss = length * length * length * (1.0 / 12.0 - t2 / 240.0 + t2 * t2 / 10080.0);
  } else if (k1 == k2 || kmin * length >= 0.5) {
    ss = h * (detail::sinc(diff * h) - detail::sinc(sum * h)) / (k1 * k2);
  } else {
    auto f = [](double k, double x) { return k > 0.0 ? std::sin(k * x) / k : x; };
    ss = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double x) { return f(k1, x) * f(k2, x); }, -h, h, 8, 1e-14);
  }
  return {cc, ss};
}

/// Diagonal of the cross Gram matrix between regular coordinates at k1 and k2.
inline RVector regular_overlap(const MetricGraph& g, double k1, double k2) {
  RVector d(g.endpoint_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto o = edge_overlap(g.edges()[static_cast<std::size_t>(e)].length, k1, k2);
    d(2 * e) = o[0];
    d(2 * e + 1) = o[1];
  }
  return d;
}

inline RVector regular_gram(const MetricGraph& g, double k) { return regular_overlap(g, k, k); }

/// L2 inner product <f, h> (conjugate-linear in f) of two solutions.
inline cplx inner_product(const MetricGraph& g, const EdgeSolutionBasis& f, const EdgeSolutionBasis& h) {
  const RVector w = regular_overlap(g, f.k, h.k);
  const CVector a = to_regular(f), b = to_regular(h);
  return (a.conjugate().array() * w.array().cast<cplx>() * b.array()).sum();
}

}  // namespace qgraph
