#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "rideshare/road_network.hpp"
#include "rideshare/shortest_path.hpp"

namespace rideshare {
namespace {

using testing::line_network;
using testing::random_grid;

RoadNetwork parse(const std::string& text) {
  std::istringstream in(text);
  return parse_network(in);
}

TEST(ParseNetwork, LineFile) {
  const auto net = parse("4 3\nE 0 1 4\nE 1 2 3\nE 2 3 5\n");
  EXPECT_EQ(net.vertex_count(), 4);
  EXPECT_EQ(net.edge_count(), 3u);
}

TEST(ParseNetwork, SingleVertexNoEdges) {
  const auto net = parse("1 0\n");
  EXPECT_EQ(net.vertex_count(), 1);
  EXPECT_EQ(net.edge_count(), 0u);
}

TEST(ParseNetwork, CommentsAndRounding) {
  const auto net = parse("# header follows\n3 2  # two edges\nE 0 1 2.4\nE 1 2 2.6\n");
  ASSERT_EQ(net.edge_count(), 2u);
  EXPECT_EQ(net.edges()[0].length, 2);
  EXPECT_EQ(net.edges()[1].length, 3);
}

TEST(ParseNetwork, DuplicateEdgesKeepMinimum) {
  const auto net = parse("2 3\nE 0 1 9\nE 1 0 4\nE 0 1 7\n");
  ASSERT_EQ(net.edge_count(), 1u);
  EXPECT_EQ(net.edges()[0].length, 4);
}

TEST(ParseNetwork, ZeroLengthIsValidationError) {
  EXPECT_THROW(parse("2 1\nE 0 1 0\n"), ValidationError);
}

TEST(ParseNetwork, DanglingIdIsValidationError) {
  EXPECT_THROW(parse("2 1\nE 0 2 5\n"), ValidationError);
}

TEST(ParseNetwork, MalformedLineReportsLineNumber) {
  try {
    parse("3 2\nE 0 1 5\nE 1 x 5\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ParseNetwork, EdgeCountMismatch) {
  EXPECT_THROW(parse("3 2\nE 0 1 5\n"), ParseError);
}

TEST(ParseNetwork, RoundTripWithCoords) {
  const auto net = random_grid(4, 5, 10, 90, 3);
  std::stringstream buf;
  write_network(buf, net);
  const auto back = parse_network(buf);
  EXPECT_EQ(back, net);
}

TEST(HubLabels, LineDistances) {
  const auto net = line_network();
  const HubLabelOracle oracle(net);
  EXPECT_EQ(oracle.distance(0, 3), 12);
  EXPECT_EQ(oracle.distance(1, 3), 8);
  EXPECT_EQ(oracle.distance(2, 2), 0);
}

TEST(HubLabels, UnreachableAcrossComponents) {
  const RoadNetwork net(4, {{0, 1, 5}, {2, 3, 5}});
  const HubLabelOracle oracle(net);
  EXPECT_FALSE(reachable(oracle.distance(0, 3)));
  EXPECT_EQ(oracle.distance(2, 3), 5);
}

TEST(HubLabels, MatchesDijkstraOnGrid) {
  const auto net = random_grid(25, 40, 50, 250, 11);  // 1,000 vertices
  const HubLabelOracle oracle(net);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<VertexId> pick(0, net.vertex_count() - 1);
  std::vector<std::vector<Meters>> rows(static_cast<std::size_t>(net.vertex_count()));
  int checked = 0;
  for (int k = 0; k < 10000; ++k) {
    const VertexId u = pick(rng);
    const VertexId v = pick(rng);
    if (rows[u].empty()) rows[u] = dijkstra(net, u);
    ASSERT_EQ(oracle.distance(u, v), rows[u][v]) << u << "->" << v;
    ++checked;
  }
  EXPECT_EQ(checked, 10000);
}

TEST(HubLabels, IdentitySymmetryTriangle) {
  const auto net = random_grid(12, 12, 20, 120, 2);
  const HubLabelOracle oracle(net);
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<VertexId> pick(0, net.vertex_count() - 1);
  for (VertexId u = 0; u < net.vertex_count(); ++u) EXPECT_EQ(oracle.distance(u, u), 0);
  for (int k = 0; k < 3000; ++k) {
    const VertexId a = pick(rng);
    const VertexId b = pick(rng);
    const VertexId c = pick(rng);
    EXPECT_EQ(oracle.distance(a, b), oracle.distance(b, a));
    EXPECT_LE(oracle.distance(a, c), oracle.distance(a, b) + oracle.distance(b, c));
  }
}

TEST(ShortestPathEdges, LineUniquePath) {
  const auto net = line_network();
  const HubLabelOracle oracle(net);
  const auto path = shortest_path_edges(net, oracle, 0, 2);
  ASSERT_EQ(path.size(), 2u);
  EXPECT_EQ(path[0], (Edge{0, 1, 4}));
  EXPECT_EQ(path[1], (Edge{1, 2, 3}));
  EXPECT_TRUE(shortest_path_edges(net, oracle, 1, 1).empty());
}

TEST(ShortestPathEdges, UnreachableThrows) {
  const RoadNetwork net(3, {{0, 1, 5}});
  const HubLabelOracle oracle(net);
  EXPECT_THROW(shortest_path_edges(net, oracle, 0, 2), std::invalid_argument);
}

// Reference: distances to the target from a plain Dijkstra, then the lowest
// neighbour id that stays on a shortest path.
std::vector<VertexId> reference_path(const RoadNetwork& net, VertexId u, VertexId v) {
  const auto to_target = dijkstra(net, v);
  std::vector<VertexId> walk{u};
  while (walk.back() != v) {
    const VertexId at = walk.back();
    VertexId next = kNoVertex;
    for (const Arc& a : net.neighbors(at)) {
      if (a.length + to_target[a.to] == to_target[at] && (next == kNoVertex || a.to < next)) next = a.to;
    }
    walk.push_back(next);
  }
  return walk;
}

TEST(ShortestPathEdges, UnitGridTieBreakAndLength) {
  // Unit lengths give many equal-cost paths.
  const auto net = random_grid(8, 8, 1, 1, 0);
  const HubLabelOracle oracle(net);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<VertexId> pick(0, net.vertex_count() - 1);
  for (int k = 0; k < 300; ++k) {
    const VertexId u = pick(rng);
    const VertexId v = pick(rng);
    const auto path = shortest_path_edges(net, oracle, u, v);
    Meters sum = 0;
    std::vector<VertexId> walk{u};
    for (const Edge& e : path) {
      ASSERT_EQ(e.u, walk.back());
      walk.push_back(e.v);
      sum += e.length;
    }
    EXPECT_EQ(sum, oracle.distance(u, v));
    EXPECT_EQ(walk, reference_path(net, u, v));
  }
}

TEST(Snap, NearestByCoordinate) {
  const auto net = random_grid(3, 3, 10, 10, 0);
  EXPECT_EQ(net.snap({31.0011, 121.0019}), 5);  // row 1, col 2
  EXPECT_THROW(line_network().snap({0, 0}), ValidationError);
}

}  // namespace
}  // namespace rideshare
