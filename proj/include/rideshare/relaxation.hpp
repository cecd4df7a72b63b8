#pragma once

#include <span>
#include <string>
#include <vector>

#include "rideshare/matching.hpp"

namespace rideshare {

enum class RelaxMode { kOff, kBaseline, kIncremental };

RelaxMode parse_relax_mode(const std::string& name);  // off, baseline, incremental
std::string relax_mode_name(RelaxMode m);

/// Maximal relaxation as multiples of the rider's own w and theta, reached in
/// `steps` equal increments.
struct RelaxationPolicy {
  double wait_factor = 2.0;
  double theta_factor = 2.0;
  int steps = 4;

  /// Throws ValidationError unless both factors are >= 1 and steps >= 1.
  void validate() const;
};

struct RelaxLevel {
  double wait_s = 0.0;
  double theta = 0.0;
  int iteration = 0;  // 0 = the original constraints
};

struct RelaxOutcome {
  RiderId rider = 0;
  bool served = false;
  std::size_t driver = 0;  // fleet position
  std::size_t i = 0;
  std::size_t j = 0;
  Meters ad = 0;
  RelaxLevel level;
  Passenger passenger;  // the relaxed record that would be inserted
  LemmaCounters counters;
};

/// `r` with w and theta replaced; consumed distance is kept.
Passenger relaxed_passenger(const WindowRider& r, double wait_s, double theta, double speed_mps);

/// Smallest-AD insertion of `r` over all drivers at the maximal relaxation.
/// Ties go to the lower fleet position. Nothing is modified.
RelaxOutcome relax_baseline(const MatchContext& ctx, const Fleet& fleet, const WindowRider& r,
                            const RelaxationPolicy& policy, double speed_mps);

/// Tries the original constraints, then for k = 1..steps raises theta by one
/// increment and retries, then raises w and retries. Returns the first level
/// at which some driver accepts. Nothing is modified.
RelaxOutcome relax_incremental(const MatchContext& ctx, const Fleet& fleet, const WindowRider& r,
                               const RelaxationPolicy& policy, double speed_mps);

/// Relaxes the unserved riders one at a time in id order against the current
/// fleet, inserting each success before the next rider is tried. Returns one
/// outcome per unserved rider, in id order.
std::vector<RelaxOutcome> relax_unserved(RelaxMode mode, const MatchContext& ctx, Fleet& fleet,
                                         std::span<const WindowRider> riders,
                                         std::span<const RiderId> unserved, const RelaxationPolicy& policy,
                                         double speed_mps);

}  // namespace rideshare
