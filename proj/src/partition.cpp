#include "rideshare/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>

namespace rideshare {

namespace {

// Weighted graph used inside the multilevel bisection. Edge weights count
// original edges, so the cut weight equals the number of cut road edges.
struct WGraph {
  int n = 0;
  std::vector<int> vw;
  std::vector<int> xadj{0};
  std::vector<int> adj;
  std::vector<int> ew;

  int total_weight() const { return std::accumulate(vw.begin(), vw.end(), 0); }
};

using Rng = std::mt19937_64;

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<int> shuffled(int n, Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng() % static_cast<std::uint64_t>(i + 1)]);
  return order;
}

// Heavy-edge matching; returns the coarse graph and fills `map`.
WGraph coarsen(const WGraph& g, std::vector<int>& map, Rng& rng, int max_vertex_weight) {
  map.assign(static_cast<std::size_t>(g.n), -1);
  int coarse_n = 0;
  for (int u : shuffled(g.n, rng)) {
    if (map[u] >= 0) continue;
    int best = -1;
    int best_w = -1;
    for (int e = g.xadj[u]; e < g.xadj[u + 1]; ++e) {
      const int v = g.adj[e];
      if (map[v] >= 0 || g.vw[u] + g.vw[v] > max_vertex_weight) continue;
      if (g.ew[e] > best_w) {
        best_w = g.ew[e];
        best = v;
      }
    }
    map[u] = coarse_n;
    if (best >= 0) map[best] = coarse_n;
    ++coarse_n;
  }

  WGraph c;
  c.n = coarse_n;
  c.vw.assign(static_cast<std::size_t>(coarse_n), 0);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(coarse_n));
  for (int u = 0; u < g.n; ++u) {
    c.vw[map[u]] += g.vw[u];
    members[map[u]].push_back(u);
  }
  std::vector<int> slot(static_cast<std::size_t>(coarse_n), -1);
  c.xadj.assign(1, 0);
  for (int cu = 0; cu < coarse_n; ++cu) {
    const auto begin = c.adj.size();
    for (int u : members[cu]) {
      for (int e = g.xadj[u]; e < g.xadj[u + 1]; ++e) {
        const int cv = map[g.adj[e]];
        if (cv == cu) continue;
        if (slot[cv] < 0) {
          slot[cv] = static_cast<int>(c.adj.size());
          c.adj.push_back(cv);
          c.ew.push_back(0);
        }
        c.ew[slot[cv]] += g.ew[e];
      }
    }
    for (auto k = begin; k < c.adj.size(); ++k) slot[c.adj[k]] = -1;
    c.xadj.push_back(static_cast<int>(c.adj.size()));
  }
  return c;
}

int cut_weight(const WGraph& g, const std::vector<char>& side) {
  int cut = 0;
  for (int u = 0; u < g.n; ++u) {
    for (int e = g.xadj[u]; e < g.xadj[u + 1]; ++e) {
      if (side[u] != side[g.adj[e]]) cut += g.ew[e];
    }
  }
  return cut / 2;
}

struct Bounds {
  int lo = 0;
  int hi = 0;
  int target = 0;

  int violation(int w0) const { return w0 < lo ? lo - w0 : (w0 > hi ? w0 - hi : 0); }
};

// Fiduccia-Mattheyses passes on side-0 weight within [lo, hi]. Starting from
// an unbalanced state it first walks toward balance.
void fm_refine(const WGraph& g, std::vector<char>& side, const Bounds& b, Rng& rng, int max_passes = 8) {
  std::vector<int> gain(static_cast<std::size_t>(g.n));
  std::vector<std::uint64_t> key(static_cast<std::size_t>(g.n));
  for (auto& k : key) k = rng();

  for (int pass = 0; pass < max_passes; ++pass) {
    int w0 = 0;
    for (int u = 0; u < g.n; ++u) {
      if (side[u] == 0) w0 += g.vw[u];
    }
    using Entry = std::tuple<int, std::uint64_t, int>;
    std::priority_queue<Entry> heap[2];
    for (int u = 0; u < g.n; ++u) {
      int ext = 0;
      int in = 0;
      for (int e = g.xadj[u]; e < g.xadj[u + 1]; ++e) (side[g.adj[e]] != side[u] ? ext : in) += g.ew[e];
      gain[u] = ext - in;
      heap[static_cast<int>(side[u])].emplace(gain[u], key[u], u);
    }
    std::vector<char> locked(static_cast<std::size_t>(g.n), 0);
    std::vector<int> moves;
    int cut = cut_weight(g, side);
    auto score = [&](int c, int w) { return std::make_tuple(b.violation(w), c, std::abs(w - b.target)); };
    auto best = score(cut, w0);
    std::size_t best_len = 0;
    const int patience = std::max(25, g.n / 20);
    int since_best = 0;

    auto top_movable = [&](int s) -> int {
      while (!heap[s].empty()) {
        const auto [gv, k, u] = heap[s].top();
        if (locked[u] || side[u] != s || gv != gain[u]) {
          heap[s].pop();
          continue;
        }
        const int nw = s == 0 ? w0 - g.vw[u] : w0 + g.vw[u];
        if (b.violation(nw) > 0 && b.violation(nw) >= b.violation(w0)) {
          heap[s].pop();  // too heavy for this pass
          continue;
        }
        return u;
      }
      return -1;
    };

    while (true) {
      const int a = top_movable(0);
      const int c = top_movable(1);
      int u = -1;
      if (a >= 0 && c >= 0) {
        u = std::make_pair(gain[a], key[a]) >= std::make_pair(gain[c], key[c]) ? a : c;
      } else {
        u = a >= 0 ? a : c;
      }
      if (u < 0) break;
      const int s = side[u];
      cut -= gain[u];
      w0 += s == 0 ? -g.vw[u] : g.vw[u];
      side[u] = static_cast<char>(1 - s);
      locked[u] = 1;
      moves.push_back(u);
      for (int e = g.xadj[u]; e < g.xadj[u + 1]; ++e) {
        const int v = g.adj[e];
        gain[v] += side[v] == side[u] ? -2 * g.ew[e] : 2 * g.ew[e];
        if (!locked[v]) heap[static_cast<int>(side[v])].emplace(gain[v], key[v], v);
      }
      gain[u] = -gain[u];
      const auto now = score(cut, w0);
      if (now < best) {
        best = now;
        best_len = moves.size();
        since_best = 0;
      } else if (b.violation(w0) == 0 && ++since_best > patience) {
        break;
      }
    }
    for (std::size_t k = moves.size(); k > best_len; --k) {
      const int u = moves[k - 1];
      side[u] = static_cast<char>(1 - side[u]);
    }
    if (best_len == 0) break;
  }
}

// Greedy graph growing: side 0 grows from a seed by best gain until it holds
// `target` weight.
std::vector<char> grow(const WGraph& g, int target, Rng& rng) {
  std::vector<char> side(static_cast<std::size_t>(g.n), 1);
  std::vector<int> gain(static_cast<std::size_t>(g.n), 0);
  using Entry = std::tuple<int, std::uint64_t, int>;
  std::priority_queue<Entry> frontier;
  int w0 = 0;
  std::vector<int> order = shuffled(g.n, rng);
  std::size_t next_seed = 0;
  while (w0 < target) {
    int u = -1;
    while (!frontier.empty()) {
      const auto [gv, k, v] = frontier.top();
      frontier.pop();
      if (side[v] == 1 && gv == gain[v]) {
        u = v;
        break;
      }
    }
    if (u < 0) {
      while (next_seed < order.size() && side[order[next_seed]] == 0) ++next_seed;
      if (next_seed == order.size()) break;
      u = order[next_seed];
    }
    if (w0 + g.vw[u] > target && w0 > 0 && target - w0 < g.vw[u] / 2) break;
    side[u] = 0;
    w0 += g.vw[u];
    for (int e = g.xadj[u]; e < g.xadj[u + 1]; ++e) {
      const int v = g.adj[e];
      if (side[v] == 0) continue;
      gain[v] += 2 * g.ew[e];
      frontier.emplace(gain[v], mix(static_cast<std::uint64_t>(v) ^ rng()), v);
    }
  }
  return side;
}

std::vector<char> bisect(const WGraph& g, const Bounds& b, Rng& rng, int coarsen_to) {
  std::vector<WGraph> levels{g};
  std::vector<std::vector<int>> maps;
  const int total = g.total_weight();
  const int cap = std::max(1, total / std::max(8, coarsen_to / 2));
  while (levels.back().n > coarsen_to) {
    std::vector<int> map;
    WGraph c = coarsen(levels.back(), map, rng, cap);
    if (c.n > levels.back().n * 9 / 10) break;
    maps.push_back(std::move(map));
    levels.push_back(std::move(c));
  }

  const WGraph& coarse = levels.back();
  std::vector<char> best;
  std::tuple<int, int> best_score{0, 0};
  for (int attempt = 0; attempt < 6; ++attempt) {
    auto side = grow(coarse, b.target, rng);
    fm_refine(coarse, side, b, rng);
    int w0 = 0;
    for (int u = 0; u < coarse.n; ++u) {
      if (side[u] == 0) w0 += coarse.vw[u];
    }
    const auto score = std::make_tuple(b.violation(w0), cut_weight(coarse, side));
    if (best.empty() || score < best_score) {
      best = std::move(side);
      best_score = score;
    }
  }

  for (std::size_t level = levels.size() - 1; level > 0; --level) {
    const auto& map = maps[level - 1];
    std::vector<char> fine(map.size());
    for (std::size_t u = 0; u < map.size(); ++u) fine[u] = best[map[u]];
    best = std::move(fine);
    fm_refine(levels[level - 1], best, b, rng);
  }
  return best;
}

WGraph induced(const RoadNetwork& net, const std::vector<VertexId>& vertices,
               std::vector<int>& local) {
  WGraph g;
  g.n = static_cast<int>(vertices.size());
  g.vw.assign(vertices.size(), 1);
  for (std::size_t k = 0; k < vertices.size(); ++k) local[vertices[k]] = static_cast<int>(k);
  for (VertexId v : vertices) {
    for (const Arc& a : net.neighbors(v)) {
      if (local[a.to] >= 0) {
        g.adj.push_back(local[a.to]);
        g.ew.push_back(1);
      }
    }
    g.xadj.push_back(static_cast<int>(g.adj.size()));
  }
  return g;
}

struct Splitter {
  const RoadNetwork& net;
  std::size_t cap;
  double level_tolerance;
  int coarsen_to;
  Rng& rng;
  std::vector<PartId>& assignment;
  std::vector<int> local;

  void run(std::vector<VertexId> vertices, PartId k, PartId first) {
    if (k == 1) {
      for (VertexId v : vertices) assignment[v] = first;
      return;
    }
    const PartId k0 = k / 2;
    const PartId k1 = k - k0;
    const auto s = static_cast<long long>(vertices.size());
    const long long m = static_cast<long long>(cap);
    const long long hard_hi = std::min<long long>(k0 * m, s - k1);
    const long long hard_lo = std::max<long long>(s - k1 * m, k0);
    const double t0 = static_cast<double>(s) * k0 / k;
    long long lo = std::max<long long>(hard_lo, static_cast<long long>(std::ceil(s - (s - t0) * level_tolerance)));
    long long hi = std::min<long long>(hard_hi, static_cast<long long>(std::floor(t0 * level_tolerance)));
    const long long target = std::clamp<long long>(std::llround(t0), hard_lo, hard_hi);
    if (lo > hi || target < lo || target > hi) lo = hi = target;
    const Bounds b{static_cast<int>(lo), static_cast<int>(hi), static_cast<int>(target)};

    WGraph g = induced(net, vertices, local);
    const auto side = bisect(g, b, rng, coarsen_to);
    for (VertexId v : vertices) local[v] = -1;

    std::vector<VertexId> left;
    std::vector<VertexId> right;
    for (std::size_t u = 0; u < vertices.size(); ++u) (side[u] == 0 ? left : right).push_back(vertices[u]);
    const auto left_size = static_cast<long long>(left.size());
    if (left_size < hard_lo || left_size > hard_hi) {
      throw std::logic_error("bisection left " + std::to_string(left_size) + " of " + std::to_string(s) +
                             " outside [" + std::to_string(hard_lo) + "," + std::to_string(hard_hi) + "]");
    }
    vertices.clear();
    vertices.shrink_to_fit();
    run(std::move(left), k0, first);
    run(std::move(right), k1, first + k0);
  }
};

void kway_refine(const RoadNetwork& net, std::vector<PartId>& assignment, PartId parts,
                 std::size_t cap, Rng& rng) {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(parts), 0);
  for (PartId p : assignment) ++sizes[p];
  std::vector<int> count(static_cast<std::size_t>(parts), 0);
  for (int pass = 0; pass < 10; ++pass) {
    bool moved = false;
    for (int v : shuffled(net.vertex_count(), rng)) {
      const PartId own = assignment[v];
      for (const Arc& a : net.neighbors(v)) ++count[assignment[a.to]];
      PartId best = own;
      int best_gain = 0;
      for (const Arc& a : net.neighbors(v)) {
        const PartId p = assignment[a.to];
        const int gain = count[p] - count[own];
        if (p != own && sizes[p] < cap && (gain > best_gain || (gain == best_gain && gain > 0 && p < best))) {
          best = p;
          best_gain = gain;
        }
      }
      for (const Arc& a : net.neighbors(v)) count[assignment[a.to]] = 0;
      if (best != own && sizes[own] > 1) {
        --sizes[own];
        ++sizes[best];
        assignment[v] = best;
        moved = true;
      }
    }
    if (!moved) break;
  }
}

}  // namespace

std::vector<std::size_t> Partition::part_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(parts), 0);
  for (PartId p : assignment) ++sizes[p];
  return sizes;
}

std::size_t max_part_size(std::size_t vertex_count, PartId parts, double tolerance) {
  const auto n = static_cast<double>(vertex_count);
  const auto even = static_cast<std::size_t>(std::ceil(n / parts));
  const auto loose = static_cast<std::size_t>(std::floor(tolerance * n / parts));
  return std::max(even, loose);
}

std::size_t count_cut_edges(const RoadNetwork& net, const std::vector<PartId>& assignment) {
  std::size_t cut = 0;
  for (const Edge& e : net.edges()) {
    if (assignment[e.u] != assignment[e.v]) ++cut;
  }
  return cut;
}

Partition partition_network(const RoadNetwork& net, PartId parts, std::uint64_t seed,
                            const PartitionOptions& options) {
  if (parts < 1 || parts > net.vertex_count()) {
    throw std::invalid_argument("partition count " + std::to_string(parts) + " outside [1, " +
                                std::to_string(net.vertex_count()) + "]");
  }
  const auto n = static_cast<std::size_t>(net.vertex_count());
  const std::size_t cap = max_part_size(n, parts, options.tolerance);
  const double depth = std::max(1.0, std::ceil(std::log2(static_cast<double>(parts))));
  const double level_tolerance = std::pow(options.tolerance, 1.0 / depth);

  Partition best;
  for (int trial = 0; trial < std::max(1, options.trials); ++trial) {
    Rng rng(mix(seed * 0x100000001b3ULL + static_cast<std::uint64_t>(trial)));
    std::vector<PartId> assignment(n, 0);
    std::vector<VertexId> all(n);
    std::iota(all.begin(), all.end(), 0);
    Splitter splitter{net, cap, level_tolerance, options.coarsen_to, rng, assignment,
                      std::vector<int>(n, -1)};
    splitter.run(std::move(all), parts, 0);
    kway_refine(net, assignment, parts, cap, rng);
    const std::size_t cut = count_cut_edges(net, assignment);
    if (trial == 0 || cut < best.cut_edges) {
      best.assignment = std::move(assignment);
      best.cut_edges = cut;
    }
  }
  best.parts = parts;
  const auto sizes = best.part_sizes();
  const auto largest = *std::max_element(sizes.begin(), sizes.end());
  best.balance = n == 0 ? 0.0 : static_cast<double>(largest) * parts / static_cast<double>(n);
  return best;
}

}  // namespace rideshare
