#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "qgraph/graph.hpp"

using namespace qgraph;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::domain_error;
}

}  // namespace

TEST(FigureEight, EqualLengths) {
  const auto g = build_figure_eight(1.0, 1.0);
  EXPECT_EQ(g.edge_count(), 2);
  EXPECT_EQ(g.endpoint_count(), 4);
  EXPECT_EQ(g.vertex_count(), 1);
  EXPECT_EQ(g.vertices().front().size(), 4u);
}

TEST(FigureEight, SecondEdgeCoordinates) {
  const auto g = build_figure_eight(1.0, 3.0);
  EXPECT_DOUBLE_EQ(g.coordinate(3), -1.5);
  EXPECT_DOUBLE_EQ(g.coordinate(4), 1.5);
  EXPECT_DOUBLE_EQ(g.coordinate(1), -0.5);
  EXPECT_DOUBLE_EQ(g.total_length(), 4.0);
}

TEST(FigureEight, RejectsDegenerateLength) {
  EXPECT_EQ(code_of([] { build_figure_eight(0.0, 1.0); }), Errc::invalid_geometry);
  EXPECT_EQ(code_of([] { build_figure_eight(1.0, -2.0); }), Errc::invalid_geometry);
  EXPECT_EQ(code_of([] { build_figure_eight(1.0, std::numeric_limits<double>::infinity()); }),
            Errc::invalid_geometry);
}

TEST(MetricGraph, EndpointOwnership) {
  EXPECT_EQ(MetricGraph::edge_of(1), 1);
  EXPECT_EQ(MetricGraph::edge_of(2), 1);
  EXPECT_EQ(MetricGraph::edge_of(3), 2);
  EXPECT_TRUE(MetricGraph::is_left(3));
  EXPECT_FALSE(MetricGraph::is_left(4));
}

TEST(MetricGraph, RejectsBadPartitions) {
  EXPECT_EQ(code_of([] { MetricGraph::create({{1.0}, {1.0}}, {{1, 2, 3}}); }), Errc::invalid_partition);
  EXPECT_EQ(code_of([] { MetricGraph::create({{1.0}, {1.0}}, {{1, 2}, {2, 3, 4}}); }), Errc::invalid_partition);
  EXPECT_EQ(code_of([] { MetricGraph::create({{1.0}}, {{1, 2, 3}}); }), Errc::invalid_partition);
  EXPECT_EQ(code_of([] { MetricGraph::create({}, {}); }), Errc::invalid_geometry);
}

TEST(Topology, FigureEightPartitions) {
  const auto g = build_figure_eight(1.0, 1.0);
  auto t = effective_topology(g, {{1, 2, 3, 4}});
  EXPECT_EQ(t.components, 1);
  EXPECT_EQ(t.betti1, 2);
  t = effective_topology(g, {{1, 2}, {3, 4}});
  EXPECT_EQ(t.components, 2);
  EXPECT_EQ(t.betti1, 2);
  t = effective_topology(g, {{1, 4}, {2, 3}});
  EXPECT_EQ(t.components, 1);
  EXPECT_EQ(t.betti1, 1);
  t = effective_topology(g, {{1}, {2}, {3}, {4}});
  EXPECT_EQ(t.components, 2);
  EXPECT_EQ(t.betti1, 0);
}

TEST(Topology, PartitionMustCover) {
  const auto g = build_figure_eight(1.0, 1.0);
  EXPECT_EQ(code_of([&] { effective_topology(g, {{1, 2}, {3}}); }), Errc::invalid_partition);
}

namespace {

EndpointPartition random_partition(std::mt19937& rng, int endpoints) {
  std::vector<int> label(static_cast<std::size_t>(endpoints));
  std::uniform_int_distribution<int> pick(0, endpoints - 1);
  for (auto& l : label) l = pick(rng);
  EndpointPartition blocks(static_cast<std::size_t>(endpoints));
  for (int e = 1; e <= endpoints; ++e) blocks[static_cast<std::size_t>(label[static_cast<std::size_t>(e - 1)])].push_back(e);
  std::erase_if(blocks, [](const auto& b) { return b.empty(); });
  return blocks;
}

// Splits one block in two.
EndpointPartition refine(std::mt19937& rng, EndpointPartition blocks) {
  std::vector<std::size_t> splittable;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].size() > 1) splittable.push_back(b);
  }
  if (splittable.empty()) return blocks;
  auto& b = blocks[splittable[rng() % splittable.size()]];
  std::shuffle(b.begin(), b.end(), rng);
  const auto cut = 1 + rng() % (b.size() - 1);
  std::vector<int> tail(b.begin() + static_cast<long>(cut), b.end());
  b.resize(cut);
  blocks.push_back(tail);
  return blocks;
}

}  // namespace

TEST(TopologyProperty, RefinementNeverMergesComponents) {
  std::mt19937 rng(20241);
  for (int trial = 0; trial < 200; ++trial) {
    const int edges = 1 + static_cast<int>(rng() % 5);
    std::vector<EdgeGeom> geom(static_cast<std::size_t>(edges), EdgeGeom{1.0});
    const auto coarse = random_partition(rng, 2 * edges);
    const auto g = MetricGraph::create(geom, coarse);
    const auto fine = refine(rng, coarse);
    const auto a = effective_topology(g, coarse), b = effective_topology(g, fine);
    EXPECT_GE(b.components, a.components);
    EXPECT_GE(a.betti1, 0);
    EXPECT_GE(a.components, 1);
    EXPECT_EQ(a.betti1, edges - static_cast<int>(coarse.size()) + a.components);
  }
}

TEST(TopologyProperty, RelabelingInvariance) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int edges = 1 + static_cast<int>(rng() % 5);
    std::vector<EdgeGeom> geom(static_cast<std::size_t>(edges), EdgeGeom{1.0});
    const auto blocks = random_partition(rng, 2 * edges);
    const auto g = MetricGraph::create(geom, blocks);
    const auto base = effective_topology(g, blocks);

    // permute edges (keeping endpoint pairs together) and shuffle block order
    std::vector<int> perm(static_cast<std::size_t>(edges));
    std::iota(perm.begin(), perm.end(), 1);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto relabel = [&](int e) {
      const int edge = MetricGraph::edge_of(e);
      const int to = perm[static_cast<std::size_t>(edge - 1)];
      return MetricGraph::is_left(e) ? 2 * to - 1 : 2 * to;
    };
    EndpointPartition moved;
    for (const auto& b : blocks) {
      std::vector<int> nb;
      for (int e : b) nb.push_back(relabel(e));
      moved.push_back(nb);
    }
    std::shuffle(moved.begin(), moved.end(), rng);
    const auto other = effective_topology(MetricGraph::create(geom, moved), moved);
    EXPECT_EQ(other.components, base.components);
    EXPECT_EQ(other.betti1, base.betti1);
  }
}
