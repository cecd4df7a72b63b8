#pragma once

#include <cstdint>
#include <vector>

#include "rideshare/road_network.hpp"

namespace rideshare {

using PartId = std::int32_t;

struct PartitionOptions {
  /// Largest part may hold max(ceil(n/tau), floor(tolerance * n/tau)) vertices.
  double tolerance = 1.10;
  /// Independent seeded runs; the smallest cut wins.
  int trials = 4;
  /// Coarsening stops below this many vertices.
  int coarsen_to = 64;
};

struct Partition {
  PartId parts = 0;
  std::vector<PartId> assignment;  // vertex -> part
  std::size_t cut_edges = 0;
  /// Largest part size divided by n / parts.
  double balance = 0.0;

  std::vector<std::size_t> part_sizes() const;
};

/// Balanced min-cut partition into `parts` non-empty vertex groups
/// (multilevel recursive bisection, then k-way boundary refinement).
/// Deterministic for a fixed (net, parts, seed, options).
/// Throws std::invalid_argument if parts < 1 or parts > vertex_count.
Partition partition_network(const RoadNetwork& net, PartId parts, std::uint64_t seed,
                            const PartitionOptions& options = {});

std::size_t count_cut_edges(const RoadNetwork& net, const std::vector<PartId>& assignment);

/// Size cap used by partition_network for the given vertex count and tolerance.
std::size_t max_part_size(std::size_t vertex_count, PartId parts, double tolerance);

}  // namespace rideshare
