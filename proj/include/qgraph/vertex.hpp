#pragma once

// Unitary vertex conditions i(S - I) u = (S + I) du and the S_theta family.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qgraph/error.hpp"
#include "qgraph/graph.hpp"

namespace qgraph {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kMatrixTol = 1e-12;
inline constexpr double kBlockTol = 1e-10;

/// sin and cos that are exact (0, +-1) at integer multiples of pi/2, so that
/// the special parameter values produce exactly block-diagonal matrices.
inline std::pair<double, double> exact_sin_cos(double theta) {
  const double quarter = theta / (0.5 * kPi);
  const double nearest = std::round(quarter);
  if (std::abs(quarter - nearest) < 1e-13) {
    const long long m = ((static_cast<long long>(nearest) % 4) + 4) % 4;
    constexpr double s[4] = {0.0, 1.0, 0.0, -1.0};
    constexpr double c[4] = {1.0, 0.0, -1.0, 0.0};
    return {s[m], c[m]};
  }
  return {std::sin(theta), std::cos(theta)};
}

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

class VertexUnitary {
 public:
  /// Validates squareness and unitarity to `tol`.
  static VertexUnitary from_matrix(CMatrix entries, double tol = kMatrixTol) {
    if (entries.rows() != entries.cols() || entries.rows() == 0) {
      throw Error(Errc::unsupported_condition, "vertex matrix must be square and non-empty");
    }
    if (!entries.allFinite()) throw Error(Errc::unsupported_condition, "vertex matrix has non-finite entries");
    VertexUnitary out(std::move(entries));
    if (out.unitarity_defect() > tol) {
      throw Error(Errc::unsupported_condition,
                  "vertex matrix is not unitary (defect " + std::to_string(out.unitarity_defect()) + ")");
    }
    out.hermitian_ = out.hermiticity_defect() <= tol;
    out.symmetric_ = max_abs(out.entries_ - out.entries_.transpose()) <= tol;
    return out;
  }

  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& matrix() const { return entries_; }
  cplx operator()(int i, int j) const { return entries_(i, j); }

  bool hermitian() const { return hermitian_; }
  /// S = S^T; for unitary S this is what makes the operator commute with conjugation.
  bool symmetric() const { return symmetric_; }

  double unitarity_defect() const {
    const auto n = entries_.rows();
    return max_abs(entries_.adjoint() * entries_ - CMatrix::Identity(n, n));
  }
  double hermiticity_defect() const { return max_abs(entries_ - entries_.adjoint()); }

 private:
  explicit VertexUnitary(CMatrix entries) : entries_(std::move(entries)) {}

  CMatrix entries_;
  bool hermitian_ = false;
  bool symmetric_ = false;
};

/// Conditions split for Hermitian S: value_matrix * u = 0 and derivative_matrix * du = 0.
struct ConditionPair {
  CMatrix value_matrix;
  CMatrix derivative_matrix;
};

inline VertexUnitary build_s_theta(double theta) {
  const auto [s, c] = exact_sin_cos(theta);
  CMatrix m(4, 4);
  m << 0, s, 0, c,
       s, 0, c, 0,
       0, c, 0, -s,
       c, 0, -s, 0;
  return VertexUnitary::from_matrix(std::move(m));
}

inline ConditionPair condition_pair(const VertexUnitary& s) {
  if (!s.hermitian()) {
    throw Error(Errc::unsupported_condition,
                "value/derivative split needs a Hermitian vertex matrix; use the full system instead");
  }
  const auto id = CMatrix::Identity(s.dim(), s.dim());
  return {s.matrix() - id, s.matrix() + id};
}

/// Finest partition of 1..dim with |S_ij| <= tol across parts (support-graph components).
inline EndpointPartition block_partition(const VertexUnitary& s, double tol = kBlockTol) {
  const int d = s.dim();
  std::vector<int> label(static_cast<std::size_t>(d), -1);
  EndpointPartition blocks;
  for (int start = 0; start < d; ++start) {
    if (label[static_cast<std::size_t>(start)] >= 0) continue;
    const int id = static_cast<int>(blocks.size());
    blocks.emplace_back();
    std::vector<int> stack{start};
    label[static_cast<std::size_t>(start)] = id;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      blocks.back().push_back(i + 1);
      for (int j = 0; j < d; ++j) {
        if (label[static_cast<std::size_t>(j)] >= 0) continue;
        if (std::abs(s(i, j)) > tol || std::abs(s(j, i)) > tol) {
          label[static_cast<std::size_t>(j)] = id;
          stack.push_back(j);
        }
      }
    }
  }
  return canonical_partition(std::move(blocks));
}

/// Splits every vertex of `graph` by the support of its matrix; result uses global endpoint indices.
inline EndpointPartition split_vertices(const MetricGraph& graph, const std::vector<VertexUnitary>& conditions,
                                        double tol = kBlockTol) {
  if (static_cast<int>(conditions.size()) != graph.vertex_count()) {
    throw Error(Errc::invalid_partition, "one vertex matrix per vertex required");
  }
  EndpointPartition out;
  for (int v = 0; v < graph.vertex_count(); ++v) {
    const auto& ends = graph.vertices()[static_cast<std::size_t>(v)];
    const auto& s = conditions[static_cast<std::size_t>(v)];
    if (s.dim() != static_cast<int>(ends.size())) {
      throw Error(Errc::invalid_partition, "vertex " + std::to_string(v + 1) + " matrix size differs from its degree");
    }
    for (const auto& local : block_partition(s, tol)) {
      std::vector<int> block;
      for (int i : local) block.push_back(ends[static_cast<std::size_t>(i - 1)]);
      out.push_back(std::move(block));
    }
  }
  return canonical_partition(std::move(out));
}

/// Periodic one-parameter family of vertex conditions (one matrix per vertex).
class ConditionFamily {
 public:
  using Evaluator = std::function<std::vector<VertexUnitary>(double)>;

  ConditionFamily(Evaluator evaluator, double period, std::string name)
      : evaluator_(std::move(evaluator)), period_(period), name_(std::move(name)) {}

  std::vector<VertexUnitary> operator()(double theta) const { return evaluator_(theta); }
  double period() const { return period_; }
  const std::string& name() const { return name_; }

 private:
  Evaluator evaluator_;
  double period_;
  std::string name_;
};

inline ConditionFamily family_figure_eight() {
  return ConditionFamily([](double theta) { return std::vector<VertexUnitary>{build_s_theta(theta)}; },
                         2.0 * kPi, "figure8_theta");
}

/// Family that ignores its parameter.
inline ConditionFamily constant_family(std::vector<VertexUnitary> conditions) {
  return ConditionFamily([c = std::move(conditions)](double) { return c; }, 2.0 * kPi, "constant");
}

/// Endpoint permutation matrix of the reflection x -> -x on every edge (2n-1 <-> 2n).
inline CMatrix edge_reflection_matrix(int edge_count) {
  const int n = 2 * edge_count;
  CMatrix j = CMatrix::Zero(n, n);
  for (int e = 0; e < edge_count; ++e) {
    j(2 * e, 2 * e + 1) = 1.0;
    j(2 * e + 1, 2 * e) = 1.0;
  }
  return j;
}

}  // namespace qgraph
