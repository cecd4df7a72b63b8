#include "rideshare/shortest_path.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

namespace rideshare {

namespace {

using QueueEntry = std::pair<Meters, VertexId>;
using MinQueue = std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>>;

// splitmix64 finalizer; scatters equal-degree vertices so that grid-like
// networks do not get a row-major hub order (which blows labels up ~6x).
std::uint64_t scramble(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::vector<Meters> dijkstra(const RoadNetwork& net, std::span<const VertexId> sources) {
  std::vector<Meters> dist(static_cast<std::size_t>(net.vertex_count()), kUnreachable);
  MinQueue queue;
  for (VertexId s : sources) {
    if (!net.valid_vertex(s)) throw std::out_of_range("dijkstra source out of range");
    if (dist[s] != 0) {
      dist[s] = 0;
      queue.emplace(0, s);
    }
  }
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    for (const Arc& a : net.neighbors(u)) {
      const Meters nd = d + a.length;
      if (nd < dist[a.to]) {
        dist[a.to] = nd;
        queue.emplace(nd, a.to);
      }
    }
  }
  return dist;
}

std::vector<Meters> dijkstra(const RoadNetwork& net, VertexId source) {
  const VertexId sources[] = {source};
  return dijkstra(net, sources);
}

Meters DijkstraOracle::distance(VertexId u, VertexId v) const {
  if (!net_->valid_vertex(u) || !net_->valid_vertex(v)) throw std::out_of_range("vertex out of range");
  if (u == v) return 0;
  std::vector<Meters> dist(static_cast<std::size_t>(net_->vertex_count()), kUnreachable);
  MinQueue queue;
  dist[u] = 0;
  queue.emplace(0, u);
  while (!queue.empty()) {
    const auto [d, x] = queue.top();
    queue.pop();
    if (x == v) return d;
    if (d > dist[x]) continue;
    for (const Arc& a : net_->neighbors(x)) {
      const Meters nd = d + a.length;
      if (nd < dist[a.to]) {
        dist[a.to] = nd;
        queue.emplace(nd, a.to);
      }
    }
  }
  return kUnreachable;
}

HubLabelOracle::HubLabelOracle(const RoadNetwork& net) {
  const auto n = static_cast<std::size_t>(net.vertex_count());

  std::vector<VertexId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
    if (net.degree(a) != net.degree(b)) return net.degree(a) > net.degree(b);
    const auto ha = scramble(static_cast<std::uint64_t>(a));
    const auto hb = scramble(static_cast<std::uint64_t>(b));
    return ha != hb ? ha < hb : a < b;
  });

  // Build-time labels use hub *ranks* so each label is sorted by construction.
  struct Entry {
    VertexId rank;
    Meters dist;
  };
  std::vector<std::vector<Entry>> labels(n);

  std::vector<Meters> tentative(n, kUnreachable);
  std::vector<Meters> root_label(n + 1, kUnreachable);  // indexed by rank
  std::vector<VertexId> touched;
  MinQueue queue;

  for (std::size_t rank = 0; rank < n; ++rank) {
    const VertexId root = order[rank];
    for (const Entry& e : labels[root]) root_label[e.rank] = e.dist;

    tentative[root] = 0;
    touched.push_back(root);
    queue.emplace(0, root);
    while (!queue.empty()) {
      const auto [d, u] = queue.top();
      queue.pop();
      if (d > tentative[u]) continue;

      Meters covered = kUnreachable;
      for (const Entry& e : labels[u]) {
        const Meters via = root_label[e.rank];
        if (reachable(via)) covered = std::min(covered, via + e.dist);
      }
      if (covered <= d) continue;

      labels[u].push_back(Entry{static_cast<VertexId>(rank), d});
      for (const Arc& a : net.neighbors(u)) {
        const Meters nd = d + a.length;
        if (nd < tentative[a.to]) {
          if (tentative[a.to] == kUnreachable) touched.push_back(a.to);
          tentative[a.to] = nd;
          queue.emplace(nd, a.to);
        }
      }
    }

    for (VertexId v : touched) tentative[v] = kUnreachable;
    touched.clear();
    for (const Entry& e : labels[root]) root_label[e.rank] = kUnreachable;
  }

  offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + labels[v].size();
  hubs_.resize(offsets_.back());
  dists_.resize(offsets_.back());
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t k = offsets_[v];
    for (const Entry& e : labels[v]) {
      hubs_[k] = e.rank;
      dists_[k] = e.dist;
      ++k;
    }
    std::vector<Entry>().swap(labels[v]);
  }
}

Meters HubLabelOracle::distance(VertexId u, VertexId v) const {
  if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= vertex_count() ||
      static_cast<std::size_t>(v) >= vertex_count()) {
    throw std::out_of_range("vertex out of range");
  }
  if (u == v) return 0;
  std::size_t a = offsets_[u];
  const std::size_t a_end = offsets_[u + 1];
  std::size_t b = offsets_[v];
  const std::size_t b_end = offsets_[v + 1];
  Meters best = kUnreachable;
  while (a < a_end && b < b_end) {
    if (hubs_[a] == hubs_[b]) {
      best = std::min(best, dists_[a] + dists_[b]);
      ++a;
      ++b;
    } else if (hubs_[a] < hubs_[b]) {
      ++a;
    } else {
      ++b;
    }
  }
  return best;
}

double HubLabelOracle::average_label_size() const {
  return vertex_count() == 0 ? 0.0
                             : static_cast<double>(hubs_.size()) / static_cast<double>(vertex_count());
}

std::vector<Edge> shortest_path_edges(const RoadNetwork& net, const DistanceOracle& oracle,
                                      VertexId u, VertexId v) {
  std::vector<Edge> path;
  Meters remaining = oracle.distance(u, v);
  if (!reachable(remaining)) {
    throw std::invalid_argument("no path between " + std::to_string(u) + " and " + std::to_string(v));
  }
  VertexId cur = u;
  while (cur != v) {
    bool advanced = false;
    for (const Arc& a : net.neighbors(cur)) {
      if (a.length > remaining) continue;
      const Meters rest = oracle.distance(a.to, v);
      if (reachable(rest) && a.length + rest == remaining) {
        path.push_back(Edge{cur, a.to, a.length});
        remaining = rest;
        cur = a.to;
        advanced = true;
        break;
      }
    }
    if (!advanced) throw std::logic_error("oracle distances inconsistent with network");
  }
  return path;
}

}  // namespace rideshare
