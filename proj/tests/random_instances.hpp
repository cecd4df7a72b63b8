#pragma once

#include <random>

#include "rideshare/shortest_path.hpp"
#include "rideshare/trip.hpp"

namespace rideshare::testing {

struct InstanceShape {
  int max_stops = 10;
  int capacity_max = 4;
  Meters wait_lo = 300;
  Meters wait_hi = 3000;
  double theta_lo = 0.1;
  double theta_hi = 1.0;
};

inline Passenger random_passenger(RiderId id, VertexId vertex_count, const DistanceOracle& oracle,
                                  std::mt19937_64& rng, const InstanceShape& shape, int max_rn = 2) {
  std::uniform_int_distribution<VertexId> pick(0, vertex_count - 1);
  Passenger p;
  p.id = id;
  p.riders = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_rn));
  p.source = pick(rng);
  do {
    p.destination = pick(rng);
  } while (p.destination == p.source);
  p.direct = oracle.distance(p.source, p.destination);
  p.wait_limit = std::uniform_int_distribution<Meters>(shape.wait_lo, shape.wait_hi)(rng);
  p.ride_limit = ride_limit(p.direct, std::uniform_real_distribution<double>(shape.theta_lo, shape.theta_hi)(rng));
  p.consumed = std::uniform_int_distribution<Meters>(0, p.wait_limit / 4)(rng);
  return p;
}

/// A feasible schedule built by random insertions (accepted only when the
/// brute-force check passes), optionally with riders already onboard.
inline TripSchedule random_schedule(VertexId vertex_count, const DistanceOracle& oracle,
                                    std::mt19937_64& rng, const InstanceShape& shape,
                                    RiderId& next_id) {
  std::uniform_int_distribution<VertexId> pick(0, vertex_count - 1);
  const int capacity = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(shape.capacity_max));
  const VertexId origin = pick(rng);
  const int onboard = static_cast<int>(rng() % 3);
  std::vector<Stop> stops;
  std::vector<Passenger> riders;
  int load = 0;
  for (int k = 0; k < onboard && load < capacity; ++k) {
    Passenger p = random_passenger(next_id++, vertex_count, oracle, rng, shape, 1);
    p.source = origin;
    p.direct = oracle.distance(p.source, p.destination);
    if (p.destination == origin) continue;
    p.onboard = true;
    // Generous enough that the initial state is usually feasible.
    p.ride_limit = ride_limit(p.direct, 0.5 + shape.theta_hi);
    p.consumed = 0;
    riders.push_back(p);
    stops.push_back({p.destination, StopKind::kDropoff, p.id, p.riders});
    load += p.riders;
  }
  TripSchedule tr = TripSchedule::from_parts(origin, capacity, stops, riders, oracle);
  if (!check_feasible_bruteforce(tr, oracle).feasible) tr = TripSchedule(origin, capacity);

  for (int attempt = 0; attempt < 40 && static_cast<int>(tr.size()) + 2 <= shape.max_stops; ++attempt) {
    const Passenger p = random_passenger(next_id, vertex_count, oracle, rng, shape);
    const std::size_t n = tr.size();
    const auto i = static_cast<std::size_t>(rng() % (n + 1));
    const auto j = i + static_cast<std::size_t>(rng() % (n - i + 1));
    TripSchedule candidate = apply_insertion(tr, p, i, j, oracle);
    if (check_feasible_bruteforce(candidate, oracle).feasible) {
      tr = std::move(candidate);
      ++next_id;
    }
  }
  return tr;
}

}  // namespace rideshare::testing
