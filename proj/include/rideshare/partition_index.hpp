#pragma once

#include <filesystem>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "rideshare/partition.hpp"
#include "rideshare/road_network.hpp"

namespace rideshare {

/// Lower-bound distance index over a vertex partition.
///
/// A vertex is a bridge when it has an edge into another part. For u outside
/// part v's bridges every path from u into another part leaves through one of
/// u's own bridges, so
///   lb(u, G) = d(G_u, G) + down(u)
///   lb(u, v) = d(G_u, G_v) + down(u) + down(v)
/// where d is the closest bridge-to-bridge distance between the parts and
/// down(u) is the distance from u to the nearest bridge of its own part
/// (0 for bridges). Same-part queries return 0.
///
/// Also tracks which drivers are currently inside each part.
class PartitionIndex {
 public:
  PartitionIndex() = default;
  /// One multi-source Dijkstra per part, seeded at the part's bridges.
  PartitionIndex(const RoadNetwork& net, const Partition& partition);

  PartId parts() const { return parts_; }
  PartId part_of(VertexId v) const { return assignment_[v]; }
  bool is_bridge(VertexId v) const { return bridge_[v] != 0; }
  Meters down(VertexId v) const { return down_[v]; }
  Meters part_distance(PartId a, PartId b) const { return matrix_[static_cast<std::size_t>(a) * parts_ + b]; }
  std::vector<VertexId> bridges(PartId p) const;

  Meters lb_vertex_part(VertexId u, PartId p) const {
    const PartId pu = assignment_[u];
    if (pu == p) return 0;
    return add_distance(part_distance(pu, p), down_[u]);
  }
  Meters lb_vertex_vertex(VertexId u, VertexId v) const {
    const PartId pu = assignment_[u];
    const PartId pv = assignment_[v];
    if (pu == pv) return 0;
    return add_distance(add_distance(part_distance(pu, pv), down_[u]), down_[v]);
  }

  // Dispatched driver sets.
  void place_driver(DriverId d, PartId p);
  /// Throws std::invalid_argument if d is not currently in `from`.
  void move_driver(DriverId d, PartId from, PartId to);
  void remove_driver(DriverId d);
  const std::vector<DriverId>& drivers_in(PartId p) const { return members_[p]; }
  /// Part holding d, or -1.
  PartId driver_part(DriverId d) const;
  std::size_t driver_count() const { return slots_.size(); }

  /// Text dump: parts, assignment, bridge flags, down values, then the
  /// row-major part matrix; unreachable entries are written as -1.
  void write(std::ostream& out) const;
  static PartitionIndex read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static PartitionIndex load(const std::filesystem::path& path);

  /// Index data equality (driver sets excluded).
  bool same_bounds(const PartitionIndex& other) const;

 private:
  struct Slot {
    PartId part;
    std::size_t position;
  };

  PartId parts_ = 0;
  std::vector<PartId> assignment_;
  std::vector<char> bridge_;
  std::vector<Meters> down_;
  std::vector<Meters> matrix_;
  std::vector<std::vector<DriverId>> members_;
  std::unordered_map<DriverId, Slot> slots_;
};

}  // namespace rideshare
