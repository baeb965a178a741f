#pragma once

// Metric graph model: edges are intervals [-l/2, l/2], edge n (1-based) owns
// endpoints 2n-1 (left) and 2n (right), vertices partition the endpoints.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "qgraph/error.hpp"

namespace qgraph {

/// Endpoint partition; entries are 1-based endpoint indices.
using EndpointPartition = std::vector<std::vector<int>>;

struct EdgeGeom {
  double length = 1.0;

  double left() const { return -0.5 * length; }
  double right() const { return 0.5 * length; }
};

/// Sorts each block and orders blocks by their smallest member.
inline EndpointPartition canonical_partition(EndpointPartition blocks) {
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::sort(blocks.begin(), blocks.end());
  return blocks;
}

/// Throws invalid-partition unless `blocks` partitions {1, ..., endpoint_count}.
inline void validate_partition(const EndpointPartition& blocks, int endpoint_count) {
  std::vector<int> seen(static_cast<std::size_t>(endpoint_count), 0);
  for (const auto& block : blocks) {
    if (block.empty()) throw Error(Errc::invalid_partition, "empty block");
    for (int e : block) {
      if (e < 1 || e > endpoint_count) {
        throw Error(Errc::invalid_partition,
                    "endpoint " + std::to_string(e) + " outside 1.." + std::to_string(endpoint_count));
      }
      if (seen[static_cast<std::size_t>(e - 1)]++) {
        throw Error(Errc::invalid_partition, "endpoint " + std::to_string(e) + " appears twice");
      }
    }
  }
  for (int e = 1; e <= endpoint_count; ++e) {
    if (!seen[static_cast<std::size_t>(e - 1)]) {
      throw Error(Errc::invalid_partition, "endpoint " + std::to_string(e) + " not covered");
    }
  }
}

class MetricGraph {
 public:
  static MetricGraph create(std::vector<EdgeGeom> edges, EndpointPartition vertices) {
    if (edges.empty()) throw Error(Errc::invalid_geometry, "graph has no edges");
    for (std::size_t n = 0; n < edges.size(); ++n) {
      const double l = edges[n].length;
      if (!std::isfinite(l) || l <= 0.0) {
        throw Error(Errc::invalid_geometry,
                    "edge " + std::to_string(n + 1) + " has non-positive or non-finite length");
      }
    }
    validate_partition(vertices, 2 * static_cast<int>(edges.size()));
    return MetricGraph(std::move(edges), std::move(vertices));
  }

  const std::vector<EdgeGeom>& edges() const { return edges_; }
  const EndpointPartition& vertices() const { return vertices_; }

  int edge_count() const { return static_cast<int>(edges_.size()); }
  int endpoint_count() const { return 2 * edge_count(); }
  int vertex_count() const { return static_cast<int>(vertices_.size()); }

  /// 1-based edge index.
  const EdgeGeom& edge(int n) const { return edges_.at(static_cast<std::size_t>(n - 1)); }
  double length(int n) const { return edge(n).length; }

  double total_length() const {
    return std::accumulate(edges_.begin(), edges_.end(), 0.0,
                           [](double acc, const EdgeGeom& e) { return acc + e.length; });
  }

  static int edge_of(int endpoint) { return (endpoint + 1) / 2; }
  static bool is_left(int endpoint) { return endpoint % 2 == 1; }

  /// Coordinate of an endpoint on its own edge.
  double coordinate(int endpoint) const {
    const auto& e = edge(edge_of(endpoint));
    return is_left(endpoint) ? e.left() : e.right();
  }

  friend bool operator==(const MetricGraph& a, const MetricGraph& b) {
    if (a.edges_.size() != b.edges_.size()) return false;
    for (std::size_t i = 0; i < a.edges_.size(); ++i) {
      if (a.edges_[i].length != b.edges_[i].length) return false;
    }
    return a.vertices_ == b.vertices_;
  }

 private:
  MetricGraph(std::vector<EdgeGeom> edges, EndpointPartition vertices)
      : edges_(std::move(edges)), vertices_(std::move(vertices)) {}

  std::vector<EdgeGeom> edges_;
  EndpointPartition vertices_;
};

/// Two edges glued at a single degree-4 vertex {1,2,3,4}.
inline MetricGraph build_figure_eight(double l1, double l2) {
  return MetricGraph::create({EdgeGeom{l1}, EdgeGeom{l2}}, {{1, 2, 3, 4}});
}

struct TopologySummary {
  EndpointPartition blocks;
  int components = 0;
  int betti1 = 0;
};

/// Components and cycle rank of the graph whose vertices are `blocks` and
/// whose edges are the metric edges.
inline TopologySummary effective_topology(const MetricGraph& graph, const EndpointPartition& blocks) {
  const int endpoints = graph.endpoint_count();
  validate_partition(blocks, endpoints);

  std::vector<int> block_of(static_cast<std::size_t>(endpoints + 1), -1);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (int e : blocks[b]) block_of[static_cast<std::size_t>(e)] = static_cast<int>(b);
  }

  std::vector<int> parent(blocks.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };

  int components = static_cast<int>(blocks.size());
  for (int n = 1; n <= graph.edge_count(); ++n) {
    const int a = find(block_of[static_cast<std::size_t>(2 * n - 1)]);
    const int b = find(block_of[static_cast<std::size_t>(2 * n)]);
    if (a != b) {
      parent[static_cast<std::size_t>(a)] = b;
      --components;
    }
  }

  TopologySummary out;
  out.blocks = canonical_partition(blocks);
  out.components = components;
  out.betti1 = graph.edge_count() - static_cast<int>(blocks.size()) + components;
  return out;
}

}  // namespace qgraph
