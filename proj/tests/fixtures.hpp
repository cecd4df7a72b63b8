#pragma once

#include <random>
#include <vector>

#include "rideshare/partition.hpp"
#include "rideshare/road_network.hpp"

namespace rideshare::testing {

// v0 -4- v1 -3- v2 -5- v3
inline RoadNetwork line_network() {
  return RoadNetwork(4, {{0, 1, 4}, {1, 2, 3}, {2, 3, 5}});
}

// Ten-vertex network with ids v1..v10 mapped to 0..9.
inline RoadNetwork four_part_network() {
  auto v = [](int k) { return static_cast<VertexId>(k - 1); };
  return RoadNetwork(10, {{v(1), v(3), 2},
                          {v(4), v(3), 3},
                          {v(4), v(6), 1},
                          {v(7), v(1), 1},
                          {v(7), v(4), 2},
                          {v(3), v(2), 1},
                          {v(6), v(5), 2},
                          {v(5), v(8), 2},
                          {v(6), v(9), 2},
                          {v(9), v(10), 1}});
}

// G1 = {v1, v4, v7}, G2 = {v2, v3}, G3 = {v5, v8}, G4 = {v6, v9, v10}.
inline Partition four_part_partition() {
  Partition p;
  p.parts = 4;
  p.assignment = {0, 1, 1, 0, 2, 3, 0, 2, 3, 3};
  return p;
}

// rows x cols grid with random integer lengths in [lo, hi] and coordinates.
inline RoadNetwork random_grid(int rows, int cols, Meters lo, Meters hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Meters> len(lo, hi);
  std::vector<Edge> edges;
  std::vector<Coord> coords;
  auto id = [&](int r, int c) { return static_cast<VertexId>(r * cols + c); };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      coords.push_back({31.0 + r * 0.001, 121.0 + c * 0.001});
      if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), len(rng)});
      if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), len(rng)});
    }
  }
  return RoadNetwork(static_cast<VertexId>(rows * cols), std::move(edges), std::move(coords));
}

}  // namespace rideshare::testing
