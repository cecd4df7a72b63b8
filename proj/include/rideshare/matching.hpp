#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rideshare/insertion.hpp"
#include "rideshare/partition_index.hpp"
#include "rideshare/road_network.hpp"
#include "rideshare/shortest_path.hpp"
#include "rideshare/trip.hpp"

namespace rideshare {

struct Driver {
  DriverId id = 0;
  TripSchedule trip;    // origin() is the current location
  Meters odometer = 0;  // total distance driven

  VertexId location() const { return trip.origin(); }
};

/// Drivers are addressed by their position in this vector; positions follow
/// ascending driver id.
using Fleet = std::vector<Driver>;

/// A request being matched in the current window, with its constraint record
/// already debited for the time it waited for the window to close.
struct WindowRider {
  RiderRequest request;
  Passenger passenger;
};

struct MatchContext {
  const RoadNetwork* net = nullptr;
  const DistanceOracle* oracle = nullptr;
  /// Lower bounds and the dispatched sets, which hold fleet positions.
  const PartitionIndex* index = nullptr;
  bool pruning = true;
};

struct Assignment {
  std::size_t driver = 0;  // fleet position
  RiderId rider = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  Meters ad = 0;
  Utility utility;

  friend bool operator==(const Assignment& a, const Assignment& b) {
    return a.driver == b.driver && a.rider == b.rider && a.i == b.i && a.j == b.j && a.ad == b.ad &&
           a.utility.ad == b.utility.ad && a.utility.riders == b.utility.riders;
  }
};

struct MatchResult {
  /// In application order; replaying the inserts in this order against the
  /// pre-window schedules reproduces the post-window schedules.
  std::vector<Assignment> assigned;
  std::vector<RiderId> unserved;  // ascending
  LemmaCounters counters;
  std::uint64_t candidate_pairs = 0;  // (driver, rider) pairs surviving the filter

  /// Assignments and unserved riders only.
  bool same_matching(const MatchResult& other) const {
    return assigned == other.assigned && unserved == other.unserved;
  }
};

/// Per-rider candidate drivers (fleet positions, ascending). A part is skipped
/// when its lower bound from the rider's source exceeds the remaining pickup
/// budget, then each driver inside is tested with the vertex bound.
std::vector<std::vector<std::size_t>> filter_candidates(const MatchContext& ctx, const Fleet& fleet,
                                                        std::span<const WindowRider> riders);

/// Riders one at a time by (submission time, id); each goes to the candidate
/// with the smallest additional distance, ties to the lower fleet position.
MatchResult distance_first(const MatchContext& ctx, Fleet& fleet, std::span<const WindowRider> riders);

/// Repeatedly commits the globally smallest AD / rn pair, then re-evaluates
/// the remaining pairs of the chosen driver. Ties: rider id, then driver id.
MatchResult greedy(const MatchContext& ctx, Fleet& fleet, std::span<const WindowRider> riders);

/// Groups riders by a quadtree over their source coordinates (at most gamma
/// per leaf unless they share one point) in Z order: SW, SE, NW, NE.
std::vector<std::vector<std::size_t>> quadtree_groups(const RoadNetwork& net,
                                                      std::span<const WindowRider> riders,
                                                      std::size_t gamma);

/// Runs greedy on every quadtree group in order over the shared fleet.
/// Throws ValidationError when the network has no coordinates.
MatchResult divide_conquer(const MatchContext& ctx, Fleet& fleet, std::span<const WindowRider> riders,
                           std::size_t gamma);

struct AnnealingParams {
  std::uint64_t perturbations = 10000;
  double t0 = 5.0;
  double decay = 0.001;
  /// Cooling stops once T <= t_min. The default gives ten cooling steps.
  double t_min = 4.95;
  std::uint64_t seed = 1;
};

struct AnnealingStats {
  std::uint64_t moves = 0;
  std::uint64_t accepted = 0;
  std::uint64_t improvements = 0;
  double initial_utility = 0.0;
  double final_utility = 0.0;
};

/// Starts from greedy with pruning and perturbs single riders. The returned
/// solution is the best one visited: lowest mean AD / rn, then most served.
/// Per-rider AD is attributed by replaying each driver's window riders in
/// insertion order.
MatchResult simulated_annealing(const MatchContext& ctx, Fleet& fleet,
                                std::span<const WindowRider> riders, const AnnealingParams& params,
                                AnnealingStats* stats = nullptr);

/// Mean AD / rn over served riders, in km; 0 when none are served.
double window_utility(const MatchResult& result, std::span<const WindowRider> riders);

/// Exact mean AD / rn: sum / (den * count), or 0 when count is 0.
struct ExactMean {
  WideInt sum = 0;  // sum of ad * den / rn
  WideInt den = 1;
  std::int64_t count = 0;

  WideInt scale() const { return den * (count > 0 ? count : 1); }
  double km() const { return static_cast<double>(sum) / static_cast<double>(scale()) / 1000.0; }
  friend bool operator<(const ExactMean& a, const ExactMean& b) { return a.sum * b.scale() < b.sum * a.scale(); }
  friend bool operator==(const ExactMean& a, const ExactMean& b) { return a.sum * b.scale() == b.sum * a.scale(); }
};
ExactMean exact_window_utility(const MatchResult& result, std::span<const WindowRider> riders);

enum class Algorithm { kDF, kDFP, kGR, kGRP, kDC, kSA };

Algorithm parse_algorithm(const std::string& name);  // df, df+p, gr, gr+p, dc, sa
std::string algorithm_name(Algorithm a);

struct MatcherConfig {
  Algorithm algorithm = Algorithm::kGRP;
  std::size_t gamma = 50;
  AnnealingParams annealing;
};

/// Dispatches to the selected matcher with pruning set by the algorithm.
MatchResult run_matcher(const MatcherConfig& config, MatchContext ctx, Fleet& fleet,
                        std::span<const WindowRider> riders);

}  // namespace rideshare
