#include "rideshare/partition_index.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "rideshare/shortest_path.hpp"

namespace rideshare {

PartitionIndex::PartitionIndex(const RoadNetwork& net, const Partition& partition)
    : parts_(partition.parts), assignment_(partition.assignment) {
  const auto n = static_cast<std::size_t>(net.vertex_count());
  if (assignment_.size() != n) throw std::invalid_argument("partition does not match network");
  bridge_.assign(n, 0);
  for (const Edge& e : net.edges()) {
    if (assignment_[e.u] != assignment_[e.v]) {
      bridge_[e.u] = 1;
      bridge_[e.v] = 1;
    }
  }
  std::vector<std::vector<VertexId>> by_part(static_cast<std::size_t>(parts_));
  for (VertexId v = 0; v < net.vertex_count(); ++v) {
    if (bridge_[v]) by_part[assignment_[v]].push_back(v);
  }

  down_.assign(n, 0);
  matrix_.assign(static_cast<std::size_t>(parts_) * parts_, 0);
  for (PartId p = 0; p < parts_; ++p) {
    if (by_part[p].empty()) continue;  // no way out: bounds stay 0
    const auto dist = dijkstra(net, by_part[p]);
    for (VertexId v = 0; v < net.vertex_count(); ++v) {
      if (assignment_[v] == p) down_[v] = dist[v];
    }
    for (PartId q = 0; q < parts_; ++q) {
      if (q == p || by_part[q].empty()) continue;
      Meters best = kUnreachable;
      for (VertexId b : by_part[q]) best = std::min(best, dist[b]);
      matrix_[static_cast<std::size_t>(p) * parts_ + q] = best;
    }
  }
  members_.assign(static_cast<std::size_t>(parts_), {});
}

std::vector<VertexId> PartitionIndex::bridges(PartId p) const {
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < assignment_.size(); ++v) {
    if (assignment_[v] == p && bridge_[v]) out.push_back(static_cast<VertexId>(v));
  }
  return out;
}

void PartitionIndex::place_driver(DriverId d, PartId p) {
  if (p < 0 || p >= parts_) throw std::out_of_range("part id out of range");
  if (slots_.count(d)) throw std::invalid_argument("driver " + std::to_string(d) + " already placed");
  slots_[d] = Slot{p, members_[p].size()};
  members_[p].push_back(d);
}

void PartitionIndex::remove_driver(DriverId d) {
  const auto it = slots_.find(d);
  if (it == slots_.end()) throw std::invalid_argument("driver " + std::to_string(d) + " not placed");
  auto& list = members_[it->second.part];
  const std::size_t pos = it->second.position;
  list[pos] = list.back();
  slots_[list[pos]].position = pos;
  list.pop_back();
  slots_.erase(d);
}

void PartitionIndex::move_driver(DriverId d, PartId from, PartId to) {
  const auto it = slots_.find(d);
  if (it == slots_.end() || it->second.part != from) {
    throw std::invalid_argument("driver " + std::to_string(d) + " is not in part " + std::to_string(from));
  }
  if (from == to) return;
  remove_driver(d);
  place_driver(d, to);
}

PartId PartitionIndex::driver_part(DriverId d) const {
  const auto it = slots_.find(d);
  return it == slots_.end() ? -1 : it->second.part;
}

void PartitionIndex::write(std::ostream& out) const {
  const auto n = assignment_.size();
  out << parts_ << ' ' << n << '\n';
  for (std::size_t v = 0; v < n; ++v) out << assignment_[v] << (v + 1 == n ? "\n" : " ");
  for (std::size_t v = 0; v < n; ++v) out << static_cast<int>(bridge_[v]) << (v + 1 == n ? "\n" : " ");
  auto put = [&](Meters d) { out << (reachable(d) ? d : -1); };
  for (std::size_t v = 0; v < n; ++v) {
    put(down_[v]);
    out << (v + 1 == n ? "\n" : " ");
  }
  for (PartId p = 0; p < parts_; ++p) {
    for (PartId q = 0; q < parts_; ++q) {
      put(part_distance(p, q));
      out << (q + 1 == parts_ ? "\n" : " ");
    }
  }
}

PartitionIndex PartitionIndex::read(std::istream& in) {
  PartitionIndex idx;
  long long parts = 0;
  long long n = 0;
  if (!(in >> parts >> n) || parts < 1 || n < 0) throw ValidationError("bad index header");
  idx.parts_ = static_cast<PartId>(parts);
  idx.assignment_.resize(static_cast<std::size_t>(n));
  idx.bridge_.resize(static_cast<std::size_t>(n));
  idx.down_.resize(static_cast<std::size_t>(n));
  idx.matrix_.resize(static_cast<std::size_t>(parts * parts));
  auto get = [&](Meters& d) {
    if (!(in >> d)) throw ValidationError("truncated index file");
    if (d < 0) d = kUnreachable;
  };
  for (auto& p : idx.assignment_) {
    if (!(in >> p) || p < 0 || p >= idx.parts_) throw ValidationError("bad part id in index file");
  }
  for (auto& b : idx.bridge_) {
    int flag = 0;
    if (!(in >> flag)) throw ValidationError("truncated index file");
    b = static_cast<char>(flag != 0);
  }
  for (auto& d : idx.down_) get(d);
  for (auto& d : idx.matrix_) get(d);
  idx.members_.assign(static_cast<std::size_t>(parts), {});
  return idx;
}

void PartitionIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write index file " + path.string());
  write(out);
}

PartitionIndex PartitionIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open index file " + path.string());
  return read(in);
}

bool PartitionIndex::same_bounds(const PartitionIndex& other) const {
  return parts_ == other.parts_ && assignment_ == other.assignment_ && bridge_ == other.bridge_ &&
         down_ == other.down_ && matrix_ == other.matrix_;
}

}  // namespace rideshare
