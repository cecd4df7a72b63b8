#pragma once

#include <span>
#include <vector>

#include "rideshare/shortest_path.hpp"
#include "rideshare/types.hpp"

namespace rideshare {

struct RiderRequest {
  RiderId id = 0;
  double t = 0.0;  // submission time, seconds
  VertexId source = kNoVertex;
  VertexId destination = kNoVertex;
  int riders = 1;
  double wait_s = 300.0;
  double theta = 0.6;
};

/// Throws ValidationError when rn < 1, w < 0, theta < 0 or source == destination.
void validate_request(const RiderRequest& r);

enum class StopKind { kPickup, kDropoff };

struct Stop {
  VertexId vertex = kNoVertex;
  StopKind kind = StopKind::kPickup;
  RiderId rider = 0;
  int riders = 1;

  friend bool operator==(const Stop&, const Stop&) = default;
};

/// Constraint state of one rider that is scheduled on (or riding in) a vehicle.
///
/// `consumed` is distance already charged against the rider: while waiting it
/// counts toward the pickup budget, once onboard it is the ride so far.
struct Passenger {
  RiderId id = 0;
  int riders = 1;
  VertexId source = kNoVertex;
  VertexId destination = kNoVertex;
  Meters direct = 0;      // dis(source, destination)
  Meters wait_limit = 0;  // w_dist
  Meters ride_limit = 0;  // floor((1 + theta) * direct)
  Meters consumed = 0;
  bool onboard = false;

  friend bool operator==(const Passenger&, const Passenger&) = default;
};

Meters wait_distance(double wait_s, double speed_mps);
Meters ride_limit(Meters direct, double theta);

/// Builds the constraint record for a request submitted at r.t and matched at
/// `now`. The time spent waiting for the window to close is debited as
/// round(sp * (now - t)).
Passenger make_passenger(const RiderRequest& r, const DistanceOracle& oracle, double speed_mps,
                         double now);

/// A driver's pending stops o_1..o_n behind the current location o_0, with
/// the derived arrays the insertion kernel reads:
///   prefix(k)   dis_a(o_0, o_k), k in [0, n]
///   cp(k)       seats free after the first k stops, k in [0, n]
///   slack(k)    largest detour that can be added before o_k, k in [1, n+1]
///   pair_slack(i, k)  largest detour before o_k that also delays every rider
///                     picked up at or before o_i, i < k
///
/// A dropoff whose pickup is still ahead of an insertion point is not delayed
/// by a detour there (its ride starts later), so slack only counts dropoffs of
/// riders picked up before the detour.
class TripSchedule {
 public:
  TripSchedule() = default;
  TripSchedule(VertexId origin, int capacity) : origin_(origin), capacity_(capacity) {
    refresh_derived();
  }

  VertexId origin() const { return origin_; }
  int capacity() const { return capacity_; }
  std::size_t size() const { return stops_.size(); }
  bool empty() const { return stops_.empty(); }
  std::span<const Stop> stops() const { return stops_; }
  const Stop& stop(std::size_t k) const { return stops_[k - 1]; }  // 1-based
  /// o_k for k in [0, n].
  VertexId vertex(std::size_t k) const { return k == 0 ? origin_ : stops_[k - 1].vertex; }

  std::span<const Passenger> passengers() const { return passengers_; }
  const Passenger* passenger(RiderId id) const;

  /// Distance the vehicle is behind origin() after snapping forward to a
  /// vertex. A rider added now starts with this much extra consumed.
  Meters lag() const { return lag_; }
  void set_lag(Meters lag) { lag_ = lag; }

  Meters leg(std::size_t k) const { return prefix_[k] - prefix_[k - 1]; }  // dis(o_{k-1}, o_k)
  Meters prefix(std::size_t k) const { return prefix_[k]; }
  Meters total_distance() const { return prefix_.back(); }
  Meters partial_distance(std::size_t i, std::size_t j) const;
  int cp(std::size_t k) const { return cp_[k]; }
  Meters slack(std::size_t k) const;
  Meters pair_slack(std::size_t i, std::size_t k) const;
  /// Remaining pickup budget of a rider being inserted now.
  Meters wait_budget(const Passenger& p) const { return p.wait_limit - p.consumed - lag_; }

  /// Recomputes legs from the oracle and all derived arrays. O(n^2).
  void refresh(const DistanceOracle& oracle);

  /// Inserts p's pickup after o_i and its dropoff after o_j (positions in the
  /// current schedule, 0 <= i <= j <= n) and refreshes. The new passenger
  /// starts with p.consumed + lag() charged. Existing stops keep their order.
  void insert(const Passenger& p, std::size_t i, std::size_t j, const DistanceOracle& oracle);

  /// Drops both stops of a scheduled (not yet onboard) rider.
  void remove_rider(RiderId id, const DistanceOracle& oracle);

  /// Moves o_0 to `v` after driving `driven` meters toward o_1.
  void advance_origin(VertexId v, Meters driven, const DistanceOracle& oracle);

  /// Arrives at o_1 (driving leg(1)) and executes it. Returns the stop.
  Stop complete_front_stop();

  /// Appends stops verbatim; for tests and replay. Passengers must be listed
  /// for every rider that has a stop.
  static TripSchedule from_parts(VertexId origin, int capacity, std::vector<Stop> stops,
                                 std::vector<Passenger> passengers, const DistanceOracle& oracle,
                                 Meters lag = 0);

 private:
  void refresh_derived();
  void charge(Meters d);

  VertexId origin_ = kNoVertex;
  int capacity_ = 0;
  Meters lag_ = 0;
  std::vector<Stop> stops_;
  std::vector<Passenger> passengers_;
  std::vector<Meters> prefix_{0};
  std::vector<int> cp_{0};
  // pair_[i * (n + 2) + k], valid for i < k <= n + 1.
  std::vector<Meters> pair_;
};

/// Throws ValidationError if any cp(k) is negative.
void check_capacity_profile(const TripSchedule& tr);

/// dis(a,b) + dis(b,c) - dis(a,c); kUnreachable if any leg is unreachable.
Meters delta_d(const DistanceOracle& oracle, VertexId a, VertexId b, VertexId c);

/// Trip-distance increase from inserting p at (i, j), computed in O(1) from
/// cached prefix distances.
Meters additional_distance(const TripSchedule& tr, const Passenger& p, std::size_t i,
                           std::size_t j, const DistanceOracle& oracle);

/// Copy of tr with p inserted at (i, j); no feasibility check.
TripSchedule apply_insertion(const TripSchedule& tr, const Passenger& p, std::size_t i,
                             std::size_t j, const DistanceOracle& oracle);

/// Per-rider constraint check by direct recomputation from stop order and
/// fresh oracle distances. No cached arrays are read.
struct BruteForceReport {
  bool feasible = true;
  bool capacity_ok = true;
  std::vector<RiderId> late_pickup;
  std::vector<RiderId> long_ride;
};
BruteForceReport check_feasible_bruteforce(const TripSchedule& tr, const DistanceOracle& oracle);

/// Same check with `extra` meters added to the leg into o_k (1-based), i.e. a
/// uniform detour before stop k. Only stops at or after k are judged.
BruteForceReport check_feasible_bruteforce(const TripSchedule& tr, const DistanceOracle& oracle,
                                           std::size_t k, Meters extra);

}  // namespace rideshare
