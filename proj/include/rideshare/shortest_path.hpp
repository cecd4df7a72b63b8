#pragma once

#include <span>
#include <vector>

#include "rideshare/road_network.hpp"

namespace rideshare {

/// Exact shortest-path distance queries. Implementations are immutable after
/// construction and safe for concurrent readers.
class DistanceOracle {
 public:
  virtual ~DistanceOracle() = default;
  /// kUnreachable when u and v lie in different components.
  virtual Meters distance(VertexId u, VertexId v) const = 0;
};

/// Single-source Dijkstra; unreachable vertices get kUnreachable.
std::vector<Meters> dijkstra(const RoadNetwork& net, VertexId source);

/// Multi-source Dijkstra: distance from the nearest member of `sources`.
std::vector<Meters> dijkstra(const RoadNetwork& net, std::span<const VertexId> sources);

/// Runs a fresh Dijkstra per query. Slow; used as fallback and test oracle.
class DijkstraOracle final : public DistanceOracle {
 public:
  explicit DijkstraOracle(const RoadNetwork& net) : net_(&net) {}
  Meters distance(VertexId u, VertexId v) const override;

 private:
  const RoadNetwork* net_;
};

/// Pruned landmark labeling (2-hop cover). Vertices are processed by
/// descending degree; each pruned Dijkstra only labels vertices whose distance
/// is not already covered by earlier hubs, so every query is exact.
class HubLabelOracle final : public DistanceOracle {
 public:
  explicit HubLabelOracle(const RoadNetwork& net);

  Meters distance(VertexId u, VertexId v) const override;

  std::size_t vertex_count() const { return offsets_.size() - 1; }
  std::size_t total_label_entries() const { return hubs_.size(); }
  /// Average label size, the per-query cost factor.
  double average_label_size() const;

 private:
  // Flattened labels: entries of vertex v live in [offsets_[v], offsets_[v+1]),
  // sorted by hub rank.
  std::vector<std::size_t> offsets_;
  std::vector<VertexId> hubs_;
  std::vector<Meters> dists_;
};

/// Edges of the shortest u->v path. At every step the lowest-id neighbour that
/// stays on a shortest path is taken, so the result is deterministic.
/// Throws std::invalid_argument when v is unreachable from u.
std::vector<Edge> shortest_path_edges(const RoadNetwork& net, const DistanceOracle& oracle,
                                      VertexId u, VertexId v);

}  // namespace rideshare
