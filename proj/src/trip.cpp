#include "rideshare/trip.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace rideshare {

void validate_request(const RiderRequest& r) {
  const std::string who = "request " + std::to_string(r.id);
  if (r.riders < 1) throw ValidationError(who + ": rn must be >= 1");
  if (!(r.wait_s >= 0.0)) throw ValidationError(who + ": negative waiting threshold");
  if (!(r.theta >= 0.0)) throw ValidationError(who + ": negative detour factor");
  if (r.source == r.destination) throw ValidationError(who + ": source equals destination");
}

Meters wait_distance(double wait_s, double speed_mps) {
  return static_cast<Meters>(std::llround(wait_s * speed_mps));
}

Meters ride_limit(Meters direct, double theta) {
  if (!reachable(direct)) return kUnreachable;
  // The epsilon keeps e.g. 1.6 * 10000 from landing on 15999.
  return static_cast<Meters>(std::floor((1.0 + theta) * static_cast<double>(direct) + 1e-6));
}

Passenger make_passenger(const RiderRequest& r, const DistanceOracle& oracle, double speed_mps,
                         double now) {
  Passenger p;
  p.id = r.id;
  p.riders = r.riders;
  p.source = r.source;
  p.destination = r.destination;
  p.direct = oracle.distance(r.source, r.destination);
  p.wait_limit = wait_distance(r.wait_s, speed_mps);
  p.ride_limit = ride_limit(p.direct, r.theta);
  p.consumed = std::max<Meters>(0, std::llround(speed_mps * (now - r.t)));
  return p;
}

const Passenger* TripSchedule::passenger(RiderId id) const {
  for (const auto& p : passengers_) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

Meters TripSchedule::partial_distance(std::size_t i, std::size_t j) const {
  if (i > j || j > stops_.size()) throw std::out_of_range("partial_distance index out of range");
  return prefix_[j] - prefix_[i];
}

Meters TripSchedule::slack(std::size_t k) const {
  if (k < 1 || k > stops_.size() + 1) throw std::out_of_range("slack index out of range");
  return pair_slack(k - 1, k);
}

Meters TripSchedule::pair_slack(std::size_t i, std::size_t k) const {
  const std::size_t n = stops_.size();
  if (i >= k || k > n + 1) throw std::out_of_range("pair_slack index out of range");
  return pair_[i * (n + 2) + k];
}

void TripSchedule::refresh(const DistanceOracle& oracle) {
  prefix_.assign(stops_.size() + 1, 0);
  for (std::size_t k = 1; k <= stops_.size(); ++k) {
    prefix_[k] = add_distance(prefix_[k - 1], oracle.distance(vertex(k - 1), vertex(k)));
  }
  refresh_derived();
}

void TripSchedule::refresh_derived() {
  const std::size_t n = stops_.size();
  if (prefix_.size() != n + 1) throw std::logic_error("prefix array out of sync with stops");

  int onboard = 0;
  for (const auto& p : passengers_) {
    if (p.onboard) onboard += p.riders;
  }
  cp_.assign(n + 1, capacity_ - onboard);
  for (std::size_t k = 1; k <= n; ++k) {
    const Stop& s = stops_[k - 1];
    cp_[k] = cp_[k - 1] + (s.kind == StopKind::kPickup ? -s.riders : s.riders);
  }

  // Surplus of every stop and, for dropoffs, where the ride started
  // (0 = already onboard).
  std::vector<Meters> surplus(n + 1, kUnreachable);
  std::vector<std::size_t> started(n + 1, 0);
  std::unordered_map<RiderId, std::size_t> pickup_at;
  for (std::size_t x = 1; x <= n; ++x) {
    const Stop& s = stops_[x - 1];
    const Passenger* p = passenger(s.rider);
    if (p == nullptr) throw std::logic_error("stop for unknown rider " + std::to_string(s.rider));
    if (!reachable(prefix_[x])) {
      surplus[x] = -kUnreachable;
      continue;
    }
    if (s.kind == StopKind::kPickup) {
      surplus[x] = p->wait_limit - p->consumed - prefix_[x];
      pickup_at[s.rider] = x;
    } else if (p->onboard) {
      surplus[x] = p->ride_limit - p->consumed - prefix_[x];
    } else {
      const auto it = pickup_at.find(s.rider);
      if (it == pickup_at.end()) {
        throw std::logic_error("dropoff before pickup for rider " + std::to_string(s.rider));
      }
      started[x] = it->second;
      surplus[x] = p->ride_limit - (prefix_[x] - prefix_[it->second]);
    }
  }

  pair_.assign((n + 1) * (n + 2), kUnreachable);
  for (std::size_t i = 0; i <= n; ++i) {
    Meters run = kUnreachable;
    for (std::size_t x = n; x > i; --x) {
      if (stops_[x - 1].kind == StopKind::kPickup || started[x] <= i) run = std::min(run, surplus[x]);
      pair_[i * (n + 2) + x] = run;
    }
  }
}

void TripSchedule::charge(Meters d) {
  for (auto& p : passengers_) p.consumed += d;
}

void TripSchedule::insert(const Passenger& p, std::size_t i, std::size_t j,
                          const DistanceOracle& oracle) {
  if (i > j || j > stops_.size()) throw std::out_of_range("insertion positions out of range");
  if (passenger(p.id) != nullptr) {
    throw std::invalid_argument("rider " + std::to_string(p.id) + " already on this schedule");
  }
  Passenger added = p;
  added.onboard = false;
  added.consumed = p.consumed + lag_;
  passengers_.push_back(added);
  const Stop pickup{p.source, StopKind::kPickup, p.id, p.riders};
  const Stop dropoff{p.destination, StopKind::kDropoff, p.id, p.riders};
  // Dropoff first so that index i is still valid for the pickup.
  stops_.insert(stops_.begin() + static_cast<std::ptrdiff_t>(j), dropoff);
  stops_.insert(stops_.begin() + static_cast<std::ptrdiff_t>(i), pickup);
  refresh(oracle);
}

void TripSchedule::remove_rider(RiderId id, const DistanceOracle& oracle) {
  const auto pit = std::find_if(passengers_.begin(), passengers_.end(),
                                [&](const Passenger& p) { return p.id == id; });
  if (pit == passengers_.end()) throw std::invalid_argument("rider " + std::to_string(id) + " not scheduled");
  if (pit->onboard) throw std::invalid_argument("rider " + std::to_string(id) + " is already onboard");
  passengers_.erase(pit);
  std::erase_if(stops_, [&](const Stop& s) { return s.rider == id; });
  refresh(oracle);
}

void TripSchedule::advance_origin(VertexId v, Meters driven, const DistanceOracle& oracle) {
  charge(driven);
  origin_ = v;
  if (stops_.empty()) return;
  const Meters first = oracle.distance(origin_, stops_.front().vertex);
  const Meters old_first = prefix_[1];
  for (std::size_t k = 1; k < prefix_.size(); ++k) prefix_[k] = prefix_[k] - old_first + first;
  refresh_derived();
}

Stop TripSchedule::complete_front_stop() {
  if (stops_.empty()) throw std::logic_error("no stop to complete");
  const Meters driven = prefix_[1];
  charge(driven);
  const Stop s = stops_.front();
  origin_ = s.vertex;
  stops_.erase(stops_.begin());
  prefix_.erase(prefix_.begin());
  for (auto& d : prefix_) d -= driven;
  auto pit = std::find_if(passengers_.begin(), passengers_.end(),
                          [&](const Passenger& p) { return p.id == s.rider; });
  if (s.kind == StopKind::kPickup) {
    pit->onboard = true;
    pit->consumed = 0;
  } else {
    passengers_.erase(pit);
  }
  refresh_derived();
  return s;
}

TripSchedule TripSchedule::from_parts(VertexId origin, int capacity, std::vector<Stop> stops,
                                      std::vector<Passenger> passengers,
                                      const DistanceOracle& oracle, Meters lag) {
  TripSchedule tr;
  tr.origin_ = origin;
  tr.capacity_ = capacity;
  tr.lag_ = lag;
  tr.stops_ = std::move(stops);
  tr.passengers_ = std::move(passengers);
  tr.refresh(oracle);
  return tr;
}

void check_capacity_profile(const TripSchedule& tr) {
  for (std::size_t k = 0; k <= tr.size(); ++k) {
    if (tr.cp(k) < 0) {
      throw ValidationError("capacity exceeded after stop " + std::to_string(k));
    }
  }
}

Meters delta_d(const DistanceOracle& oracle, VertexId a, VertexId b, VertexId c) {
  const Meters ab = oracle.distance(a, b);
  const Meters bc = oracle.distance(b, c);
  const Meters ac = oracle.distance(a, c);
  if (!reachable(ab) || !reachable(bc) || !reachable(ac)) return kUnreachable;
  return ab + bc - ac;
}

Meters additional_distance(const TripSchedule& tr, const Passenger& p, std::size_t i,
                           std::size_t j, const DistanceOracle& oracle) {
  const std::size_t n = tr.size();
  if (i > j || j > n) throw std::out_of_range("insertion positions out of range");
  const Meters direct = oracle.distance(p.source, p.destination);
  if (i == n) return add_distance(oracle.distance(tr.vertex(n), p.source), direct);
  if (i == j) {
    const Meters a = oracle.distance(tr.vertex(i), p.source);
    const Meters b = oracle.distance(p.destination, tr.vertex(i + 1));
    if (!reachable(a) || !reachable(b) || !reachable(direct)) return kUnreachable;
    return a + direct + b - tr.leg(i + 1);
  }
  const Meters ds = delta_d(oracle, tr.vertex(i), p.source, tr.vertex(i + 1));
  if (j < n) return add_distance(ds, delta_d(oracle, tr.vertex(j), p.destination, tr.vertex(j + 1)));
  return add_distance(ds, oracle.distance(tr.vertex(n), p.destination));
}

TripSchedule apply_insertion(const TripSchedule& tr, const Passenger& p, std::size_t i,
                             std::size_t j, const DistanceOracle& oracle) {
  TripSchedule out = tr;
  out.insert(p, i, j, oracle);
  return out;
}

BruteForceReport check_feasible_bruteforce(const TripSchedule& tr, const DistanceOracle& oracle) {
  return check_feasible_bruteforce(tr, oracle, 1, 0);
}

BruteForceReport check_feasible_bruteforce(const TripSchedule& tr, const DistanceOracle& oracle,
                                           std::size_t k, Meters extra) {
  BruteForceReport report;
  const auto stops = tr.stops();
  const auto passengers = tr.passengers();

  int load = 0;
  for (const auto& p : passengers) {
    if (p.onboard) load += p.riders;
  }
  if (load > tr.capacity()) report.capacity_ok = false;

  std::unordered_map<RiderId, Meters> picked_at;
  std::unordered_map<RiderId, int> seen;
  Meters travelled = 0;
  VertexId at = tr.origin();
  for (std::size_t x = 1; x <= stops.size(); ++x) {
    const Stop& s = stops[x - 1];
    travelled = add_distance(travelled, oracle.distance(at, s.vertex));
    if (x == k) travelled = add_distance(travelled, extra);
    at = s.vertex;
    const auto pit = std::find_if(passengers.begin(), passengers.end(),
                                  [&](const Passenger& p) { return p.id == s.rider; });
    if (pit == passengers.end()) throw std::logic_error("stop for unknown rider");
    ++seen[s.rider];
    const bool judged = x >= k;
    if (s.kind == StopKind::kPickup) {
      if (pit->onboard || picked_at.count(s.rider)) throw std::logic_error("duplicate pickup");
      load += s.riders;
      picked_at[s.rider] = travelled;
      if (judged && (!reachable(travelled) || pit->consumed + travelled > pit->wait_limit)) {
        report.late_pickup.push_back(s.rider);
      }
    } else {
      load -= s.riders;
      Meters ride = kUnreachable;
      if (pit->onboard) {
        ride = add_distance(pit->consumed, travelled);
      } else {
        const auto it = picked_at.find(s.rider);
        if (it == picked_at.end()) throw std::logic_error("dropoff before pickup");
        if (reachable(travelled)) ride = travelled - it->second;
      }
      if (judged && (!reachable(ride) || ride > pit->ride_limit)) report.long_ride.push_back(s.rider);
    }
    if (load > tr.capacity() || load < 0) report.capacity_ok = false;
  }
  for (const auto& p : passengers) {
    if (seen[p.id] != (p.onboard ? 1 : 2)) throw std::logic_error("rider stops do not match passenger state");
  }
  report.feasible = report.capacity_ok && report.late_pickup.empty() && report.long_ride.empty();
  return report;
}

}  // namespace rideshare
