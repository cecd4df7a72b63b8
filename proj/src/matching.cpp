#include "rideshare/matching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <unordered_map>

namespace rideshare {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

std::vector<RiderId> unserved_ids(std::span<const WindowRider> riders, const std::vector<char>& served) {
  std::vector<RiderId> out;
  for (std::size_t r = 0; r < riders.size(); ++r) {
    if (!served[r]) out.push_back(riders[r].passenger.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t count_pairs(const std::vector<std::vector<std::size_t>>& lists) {
  std::uint64_t total = 0;
  for (const auto& l : lists) total += l.size();
  return total;
}

InsertionOutcome evaluate(const MatchContext& ctx, const Driver& d, const Passenger& p, UtilityKind kind) {
  return rider_insertion(d.trip, p, *ctx.oracle, ctx.index, kind, ctx.pruning);
}

// Greedy over a subset of riders with precomputed candidate lists.
void greedy_subset(const MatchContext& ctx, Fleet& fleet, std::span<const WindowRider> riders,
                   std::span<const std::size_t> subset, const std::vector<std::vector<std::size_t>>& cands,
                   std::vector<char>& served, MatchResult& out) {
  struct Entry {
    Utility u;
    RiderId rider;
    DriverId driver;
    std::size_t r;
    std::size_t d;
    std::size_t i;
    std::size_t j;
    Meters ad;
    std::uint64_t version;
  };
  auto later = [](const Entry& a, const Entry& b) {
    if (!(a.u == b.u)) return b.u < a.u;
    if (a.rider != b.rider) return a.rider > b.rider;
    return a.driver > b.driver;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(later)> heap(later);
  std::unordered_map<std::size_t, std::vector<std::size_t>> by_driver;
  std::unordered_map<std::size_t, std::uint64_t> version;

  auto push = [&](std::size_t r, std::size_t d) {
    const Passenger& p = riders[r].passenger;
    const auto o = evaluate(ctx, fleet[d], p, UtilityKind::kGreedy);
    out.counters += o.counters;
    if (o.feasible) heap.push({o.utility, p.id, fleet[d].id, r, d, o.i, o.j, o.ad, version[d]});
  };

  for (std::size_t r : subset) {
    for (std::size_t d : cands[r]) by_driver[d].push_back(r);
  }
  for (std::size_t r : subset) {
    for (std::size_t d : cands[r]) push(r, d);
  }
  while (!heap.empty()) {
    const Entry e = heap.top();
    heap.pop();
    if (served[e.r] || e.version != version[e.d]) continue;
    fleet[e.d].trip.insert(riders[e.r].passenger, e.i, e.j, *ctx.oracle);
    served[e.r] = 1;
    ++version[e.d];
    out.assigned.push_back({e.d, e.rider, e.i, e.j, e.ad, e.u});
    for (std::size_t r : by_driver[e.d]) {
      if (!served[r]) push(r, e.d);
    }
  }
}

}  // namespace

std::vector<std::vector<std::size_t>> filter_candidates(const MatchContext& ctx, const Fleet& fleet,
                                                        std::span<const WindowRider> riders) {
  std::vector<std::vector<std::size_t>> lists(riders.size());
  if (ctx.index == nullptr) {
    for (auto& l : lists) {
      l.resize(fleet.size());
      std::iota(l.begin(), l.end(), std::size_t{0});
    }
    return lists;
  }
  const PartitionIndex& idx = *ctx.index;
  std::vector<Meters> budget(riders.size());
  for (std::size_t r = 0; r < riders.size(); ++r) {
    budget[r] = riders[r].passenger.wait_limit - riders[r].passenger.consumed;
  }
  for (PartId part = 0; part < idx.parts(); ++part) {
    const auto& inside = idx.drivers_in(part);
    if (inside.empty()) continue;
    for (std::size_t r = 0; r < riders.size(); ++r) {
      const VertexId ls = riders[r].passenger.source;
      if (idx.lb_vertex_part(ls, part) > budget[r]) continue;
      for (DriverId d : inside) {
        const auto pos = static_cast<std::size_t>(d);
        if (idx.lb_vertex_vertex(ls, fleet[pos].location()) <= budget[r]) lists[r].push_back(pos);
      }
    }
  }
  for (auto& l : lists) std::sort(l.begin(), l.end());
  return lists;
}

MatchResult distance_first(const MatchContext& ctx, Fleet& fleet, std::span<const WindowRider> riders) {
  MatchResult out;
  const auto cands = filter_candidates(ctx, fleet, riders);
  out.candidate_pairs = count_pairs(cands);
  std::vector<std::size_t> order(riders.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (riders[a].request.t != riders[b].request.t) return riders[a].request.t < riders[b].request.t;
    return riders[a].passenger.id < riders[b].passenger.id;
  });
  std::vector<char> served(riders.size(), 0);
  for (std::size_t r : order) {
    const Passenger& p = riders[r].passenger;
    InsertionOutcome best;
    std::size_t best_d = kNone;
    for (std::size_t d : cands[r]) {
      const auto o = evaluate(ctx, fleet[d], p, UtilityKind::kDistanceFirst);
      out.counters += o.counters;
      if (o.feasible && (best_d == kNone || o.utility < best.utility)) {
        best = o;
        best_d = d;
      }
    }
    if (best_d == kNone) continue;
    fleet[best_d].trip.insert(p, best.i, best.j, *ctx.oracle);
    served[r] = 1;
    out.assigned.push_back({best_d, p.id, best.i, best.j, best.ad, best.utility});
  }
  out.unserved = unserved_ids(riders, served);
  return out;
}

MatchResult greedy(const MatchContext& ctx, Fleet& fleet, std::span<const WindowRider> riders) {
  MatchResult out;
  const auto cands = filter_candidates(ctx, fleet, riders);
  out.candidate_pairs = count_pairs(cands);
  std::vector<std::size_t> all(riders.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<char> served(riders.size(), 0);
  greedy_subset(ctx, fleet, riders, all, cands, served, out);
  out.unserved = unserved_ids(riders, served);
  return out;
}

namespace {

struct Box {
  double lat_lo, lat_hi, lon_lo, lon_hi;
};

void split_quadtree(const std::vector<Coord>& pos, std::vector<std::size_t> members, const Box& box,
                    std::size_t gamma, int depth, std::vector<std::vector<std::size_t>>& out) {
  if (members.empty()) return;
  bool one_point = true;
  for (std::size_t m : members) one_point = one_point && pos[m] == pos[members.front()];
  if (members.size() <= gamma || one_point || depth >= 48) {
    out.push_back(std::move(members));
    return;
  }
  const double mid_lat = (box.lat_lo + box.lat_hi) / 2;
  const double mid_lon = (box.lon_lo + box.lon_hi) / 2;
  std::vector<std::size_t> quad[4];  // SW, SE, NW, NE
  for (std::size_t m : members) {
    const int north = pos[m].lat >= mid_lat ? 1 : 0;
    const int east = pos[m].lon >= mid_lon ? 1 : 0;
    quad[north * 2 + east].push_back(m);
  }
  const Box boxes[4] = {{box.lat_lo, mid_lat, box.lon_lo, mid_lon},
                        {box.lat_lo, mid_lat, mid_lon, box.lon_hi},
                        {mid_lat, box.lat_hi, box.lon_lo, mid_lon},
                        {mid_lat, box.lat_hi, mid_lon, box.lon_hi}};
  for (int q = 0; q < 4; ++q) split_quadtree(pos, std::move(quad[q]), boxes[q], gamma, depth + 1, out);
}

}  // namespace

std::vector<std::vector<std::size_t>> quadtree_groups(const RoadNetwork& net,
                                                      std::span<const WindowRider> riders,
                                                      std::size_t gamma) {
  if (!net.has_coords()) throw ValidationError("divide-and-conquer needs vertex coordinates");
  std::vector<std::vector<std::size_t>> out;
  if (riders.empty()) return out;
  std::vector<Coord> pos;
  for (const auto& r : riders) pos.push_back(net.coord(r.passenger.source));
  Box box{pos[0].lat, pos[0].lat, pos[0].lon, pos[0].lon};
  for (const Coord& c : pos) {
    box.lat_lo = std::min(box.lat_lo, c.lat);
    box.lat_hi = std::max(box.lat_hi, c.lat);
    box.lon_lo = std::min(box.lon_lo, c.lon);
    box.lon_hi = std::max(box.lon_hi, c.lon);
  }
  std::vector<std::size_t> members(riders.size());
  std::iota(members.begin(), members.end(), std::size_t{0});
  split_quadtree(pos, std::move(members), box, std::max<std::size_t>(gamma, 1), 0, out);
  return out;
}

MatchResult divide_conquer(const MatchContext& ctx, Fleet& fleet, std::span<const WindowRider> riders,
                           std::size_t gamma) {
  MatchResult out;
  const auto groups = quadtree_groups(*ctx.net, riders, gamma);
  // Driver locations do not change inside a window, so one filter pass
  // serves every group.
  const auto cands = filter_candidates(ctx, fleet, riders);
  out.candidate_pairs = count_pairs(cands);
  std::vector<char> served(riders.size(), 0);
  for (const auto& g : groups) greedy_subset(ctx, fleet, riders, g, cands, served, out);
  out.unserved = unserved_ids(riders, served);
  return out;
}

namespace {

std::unordered_map<RiderId, int> rider_counts(std::span<const WindowRider> riders) {
  std::unordered_map<RiderId, int> rn;
  for (const auto& r : riders) rn[r.passenger.id] = r.passenger.riders;
  return rn;
}

WideInt lcm_of_counts(std::span<const WindowRider> riders) {
  std::int64_t l = 1;
  for (const auto& r : riders) l = std::lcm(l, static_cast<std::int64_t>(r.passenger.riders));
  return l;
}

class Annealer {
 public:
  Annealer(const MatchContext& ctx, Fleet& fleet, std::span<const WindowRider> riders,
           const MatchResult& init, std::vector<std::vector<std::size_t>> cands)
      : ctx_(ctx), fleet_(fleet), riders_(riders), cands_(std::move(cands)) {
    driver_of_.assign(riders.size(), kNone);
    ad_.assign(riders.size(), 0);
    order_.resize(fleet.size());
    den_ = lcm_of_counts(riders);
    std::unordered_map<RiderId, std::size_t> slot;
    for (std::size_t r = 0; r < riders.size(); ++r) slot[riders[r].passenger.id] = r;
    for (const auto& a : init.assigned) {
      const std::size_t r = slot.at(a.rider);
      driver_of_[r] = a.driver;
      order_[a.driver].push_back(r);
      ad_[r] = a.ad;
      sum_ += weight(r, a.ad);
      ++count_;
    }
    best_ = mean();
  }

  ExactMean mean() const { return {sum_, den_, count_}; }
  bool improved() const { return improvements_ > 0; }

  // One perturbation; returns true when accepted.
  bool perturb(std::mt19937_64& rng, double temperature, AnnealingStats& stats) {
    ++stats.moves;
    const std::size_t r = rng() % riders_.size();
    const std::size_t from = driver_of_[r];
    std::vector<std::size_t> options;
    for (std::size_t d : cands_[r]) {
      if (d != from) options.push_back(d);
    }
    if (options.empty()) return false;
    const std::size_t to = options[rng() % options.size()];
    const Passenger& p = riders_[r].passenger;
    const auto choices = feasible_insertions(fleet_[to].trip, p, *ctx_.oracle);
    if (choices.empty()) return false;
    const InsertionChoice c = choices[rng() % choices.size()];

    touch(to);
    if (from != kNone) touch(from);
    const Saved undo_to{fleet_[to].trip, order_[to]};
    const Saved undo_from = from != kNone ? Saved{fleet_[from].trip, order_[from]} : Saved{};
    const WideInt old_sum = sum_;
    const std::int64_t old_count = count_;
    std::vector<std::pair<std::size_t, Meters>> old_ads{{r, ad_[r]}};
    for (std::size_t x : order_[to]) old_ads.emplace_back(x, ad_[x]);
    if (from != kNone) {
      for (std::size_t x : order_[from]) old_ads.emplace_back(x, ad_[x]);
    }
    const ExactMean before = mean();

    if (from != kNone) {
      fleet_[from].trip.remove_rider(p.id, *ctx_.oracle);
      std::erase(order_[from], r);
      sum_ -= weight(r, ad_[r]);
      --count_;
    }
    fleet_[to].trip.insert(p, c.i, c.j, *ctx_.oracle);
    order_[to].push_back(r);
    driver_of_[r] = to;
    ++count_;
    sum_ += weight(r, 0);  // attributed below
    ad_[r] = 0;
    reattribute(to);
    if (from != kNone) reattribute(from);

    const double delta = mean().km() - before.km();
    const bool accept = delta <= 0.0 || uniform(rng) < std::exp(-delta / temperature);
    if (!accept) {
      // Restore both drivers and the attribution.
      fleet_[to].trip = undo_to.trip;
      order_[to] = undo_to.order;
      if (from != kNone) {
        fleet_[from].trip = undo_from.trip;
        order_[from] = undo_from.order;
      }
      driver_of_[r] = from;
      sum_ = old_sum;
      count_ = old_count;
      for (const auto& [x, ad] : old_ads) ad_[x] = ad;
      return false;
    }
    ++stats.accepted;
    dirty_.push_back(to);
    if (from != kNone) dirty_.push_back(from);
    const ExactMean now = mean();
    if (now < best_ || (now == best_ && count_ > best_.count)) {
      best_ = now;
      ++improvements_;
      ++stats.improvements;
      for (std::size_t d : dirty_) snapshot_[d] = Saved{fleet_[d].trip, order_[d]};
      dirty_.clear();
    }
    return true;
  }

  // Puts every touched driver back to the best state and lists its riders.
  MatchResult finish(const MatchResult& init) {
    for (auto& [d, saved] : snapshot_) {
      fleet_[d].trip = saved.trip;
      order_[d] = saved.order;
    }
    MatchResult out;
    out.counters = init.counters;
    out.candidate_pairs = init.candidate_pairs;
    std::vector<char> served(riders_.size(), 0);
    for (std::size_t d = 0; d < order_.size(); ++d) {
      const auto ranked = order_[d];
      std::vector<Meters> dist;
      std::vector<std::pair<std::size_t, std::size_t>> pos;
      replay(d, dist, &pos);
      for (std::size_t k = 0; k < ranked.size(); ++k) {
        const std::size_t r = ranked[k];
        const Passenger& p = riders_[r].passenger;
        const Meters ad = dist[k + 1] - dist[k];
        out.assigned.push_back({d, p.id, pos[k].first, pos[k].second, ad, Utility{ad, p.riders}});
        served[r] = 1;
      }
    }
    out.unserved = unserved_ids(riders_, served);
    return out;
  }

 private:
  struct Saved {
    TripSchedule trip;
    std::vector<std::size_t> order;
  };

  static double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

  WideInt weight(std::size_t r, Meters ad) const { return static_cast<WideInt>(ad) * (den_ / riders_[r].passenger.riders); }

  void touch(std::size_t d) {
    if (!snapshot_.count(d)) snapshot_.emplace(d, Saved{fleet_[d].trip, order_[d]});
  }

  // dist[k] = distance of the schedule keeping the first k window riders of
  // d; pos[k] = where rider k was inserted into the schedule with k riders.
  void replay(std::size_t d, std::vector<Meters>& dist,
              std::vector<std::pair<std::size_t, std::size_t>>* pos) const {
    const TripSchedule& tr = fleet_[d].trip;
    const auto& ranked = order_[d];
    std::unordered_map<RiderId, std::size_t> rank;
    for (std::size_t k = 0; k < ranked.size(); ++k) rank[riders_[ranked[k]].passenger.id] = k;
    dist.assign(ranked.size() + 1, 0);
    if (pos != nullptr) pos->assign(ranked.size(), {0, 0});
    for (std::size_t k = 0; k <= ranked.size(); ++k) {
      if (k == ranked.size()) {
        dist[k] = tr.total_distance();
        break;
      }
      Meters total = 0;
      VertexId at = tr.origin();
      std::size_t kept = 0;
      std::size_t pick = 0;
      for (const Stop& s : tr.stops()) {
        const auto it = rank.find(s.rider);
        const std::size_t rk = it == rank.end() ? 0 : it->second;
        if (it != rank.end() && rk > k) continue;
        if (it != rank.end() && rk == k) {
          // Rider k itself: positions relative to the stops kept so far.
          if (pos != nullptr) {
            if (s.kind == StopKind::kPickup) {
              pick = kept;
            } else {
              (*pos)[k] = {pick, kept - 1};
            }
          }
          ++kept;
          continue;
        }
        total = add_distance(total, ctx_.oracle->distance(at, s.vertex));
        at = s.vertex;
        ++kept;
      }
      dist[k] = total;
    }
  }

  void reattribute(std::size_t d) {
    const auto& ranked = order_[d];
    if (ranked.empty()) return;
    std::vector<Meters> dist;
    replay(d, dist, nullptr);
    for (std::size_t k = 0; k < ranked.size(); ++k) {
      const std::size_t r = ranked[k];
      sum_ -= weight(r, ad_[r]);
      ad_[r] = dist[k + 1] - dist[k];
      sum_ += weight(r, ad_[r]);
    }
  }

  const MatchContext& ctx_;
  Fleet& fleet_;
  std::span<const WindowRider> riders_;
  std::vector<std::vector<std::size_t>> cands_;
  std::vector<std::size_t> driver_of_;
  std::vector<Meters> ad_;
  std::vector<std::vector<std::size_t>> order_;
  WideInt den_ = 1;
  WideInt sum_ = 0;
  std::int64_t count_ = 0;
  ExactMean best_;
  std::uint64_t improvements_ = 0;
  std::unordered_map<std::size_t, Saved> snapshot_;
  std::vector<std::size_t> dirty_;
};

}  // namespace

MatchResult simulated_annealing(const MatchContext& ctx, Fleet& fleet,
                                std::span<const WindowRider> riders, const AnnealingParams& params,
                                AnnealingStats* stats) {
  MatchContext pruned = ctx;
  pruned.pruning = true;
  const auto cands = filter_candidates(pruned, fleet, riders);
  MatchResult init = greedy(pruned, fleet, riders);
  AnnealingStats local;
  AnnealingStats& st = stats != nullptr ? *stats : local;
  st = {};
  st.initial_utility = window_utility(init, riders);
  st.final_utility = st.initial_utility;
  if (riders.empty() || !(params.t0 > params.t_min) || params.decay <= 0.0) return init;

  Annealer annealer(pruned, fleet, riders, init, cands);
  std::mt19937_64 rng(params.seed);
  for (double t = params.t0; t > params.t_min; t *= 1.0 - params.decay) {
    for (std::uint64_t k = 0; k < params.perturbations; ++k) annealer.perturb(rng, t, st);
  }
  const bool improved = annealer.improved();
  MatchResult out = annealer.finish(init);
  if (!improved) return init;
  st.final_utility = window_utility(out, riders);
  return out;
}

double window_utility(const MatchResult& result, std::span<const WindowRider> riders) {
  return exact_window_utility(result, riders).km();
}

ExactMean exact_window_utility(const MatchResult& result, std::span<const WindowRider> riders) {
  const auto rn = rider_counts(riders);
  ExactMean m;
  for (const auto& a : result.assigned) m.den = std::lcm(static_cast<std::int64_t>(m.den), static_cast<std::int64_t>(rn.at(a.rider)));
  for (const auto& a : result.assigned) {
    m.sum += static_cast<WideInt>(a.ad) * (m.den / rn.at(a.rider));
    ++m.count;
  }
  return m;
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "df") return Algorithm::kDF;
  if (name == "df+p") return Algorithm::kDFP;
  if (name == "gr") return Algorithm::kGR;
  if (name == "gr+p") return Algorithm::kGRP;
  if (name == "dc") return Algorithm::kDC;
  if (name == "sa") return Algorithm::kSA;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kDF: return "df";
    case Algorithm::kDFP: return "df+p";
    case Algorithm::kGR: return "gr";
    case Algorithm::kGRP: return "gr+p";
    case Algorithm::kDC: return "dc";
    case Algorithm::kSA: return "sa";
  }
  return "?";
}

MatchResult run_matcher(const MatcherConfig& config, MatchContext ctx, Fleet& fleet,
                        std::span<const WindowRider> riders) {
  switch (config.algorithm) {
    case Algorithm::kDF:
    case Algorithm::kDFP:
      ctx.pruning = config.algorithm == Algorithm::kDFP;
      return distance_first(ctx, fleet, riders);
    case Algorithm::kGR:
    case Algorithm::kGRP:
      ctx.pruning = config.algorithm == Algorithm::kGRP;
      return greedy(ctx, fleet, riders);
    case Algorithm::kDC:
      ctx.pruning = true;
      return divide_conquer(ctx, fleet, riders, config.gamma);
    case Algorithm::kSA:
      return simulated_annealing(ctx, fleet, riders, config.annealing);
  }
  throw std::logic_error("unhandled algorithm");
}

}  // namespace rideshare
