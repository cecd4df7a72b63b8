#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "rideshare/types.hpp"

namespace rideshare {

struct Edge {
  VertexId u = 0;
  VertexId v = 0;
  Meters length = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Arc {
  VertexId to = 0;
  Meters length = 0;
};

struct Coord {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const Coord&, const Coord&) = default;
};

/// Undirected road graph with integer-meter edge lengths.
///
/// Vertex ids are dense in [0, vertex_count). Parallel edges collapse to the
/// shortest one; adjacency lists are sorted by neighbour id, which is what the
/// deterministic path tie-break relies on.
class RoadNetwork {
 public:
  RoadNetwork() = default;
  /// Throws ValidationError on dangling ids, self-loops, non-positive lengths
  /// or a coordinate table of the wrong size.
  RoadNetwork(VertexId vertex_count, std::vector<Edge> edges, std::vector<Coord> coords = {});

  VertexId vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Arc> neighbors(VertexId v) const {
    return {arcs_.data() + offsets_[v], arcs_.data() + offsets_[v + 1]};
  }
  std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

  bool has_coords() const { return !coords_.empty(); }
  const Coord& coord(VertexId v) const { return coords_.at(static_cast<std::size_t>(v)); }
  std::span<const Coord> coords() const { return coords_; }

  Meters max_edge_length() const { return max_edge_length_; }

  /// Nearest vertex to a lat/lon position (planar Euclidean over degrees).
  /// Requires coordinates.
  VertexId snap(const Coord& position) const;

  bool valid_vertex(VertexId v) const { return v >= 0 && v < vertex_count_; }

  friend bool operator==(const RoadNetwork& a, const RoadNetwork& b) {
    return a.vertex_count_ == b.vertex_count_ && a.edges_ == b.edges_ && a.coords_ == b.coords_;
  }

 private:
  VertexId vertex_count_ = 0;
  std::vector<Edge> edges_;  // canonical: u < v, sorted, unique
  std::vector<Coord> coords_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Arc> arcs_;
  Meters max_edge_length_ = 0;
};

/// Text format:
///   <vertex_count> <edge_count>
///   E <u> <v> <length_m>      (one per edge, real lengths rounded to meters)
///   C <id> <lat> <lon>        (optional, all or none)
/// `#` starts a comment.
RoadNetwork parse_network(std::istream& in);
RoadNetwork load_network(const std::filesystem::path& path);
void write_network(std::ostream& out, const RoadNetwork& net);
void save_network(const std::filesystem::path& path, const RoadNetwork& net);

}  // namespace rideshare
