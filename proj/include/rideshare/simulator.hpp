#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rideshare/matching.hpp"
#include "rideshare/relaxation.hpp"

namespace rideshare {

struct SimConfig {
  double dt_s = 10.0;
  double speed_kmh = 48.0;
  MatcherConfig matcher;
  RelaxMode relax = RelaxMode::kOff;
  RelaxationPolicy relax_policy;
  std::uint64_t seed = 1;
  /// Wall-clock columns are written as 0 unless set, so that metrics files
  /// are reproducible byte for byte.
  bool record_timing = false;
  bool record_events = false;
  /// Windows allowed after the last request to finish the schedules.
  std::int64_t max_drain_windows = 100000;

  double speed_mps() const { return speed_kmh / 3.6; }
  /// Meters a driver covers in one window.
  Meters step_meters() const;
  /// Throws ValidationError on non-positive dt or speed or a bad policy.
  void validate() const;
};

struct WindowMetrics {
  std::int64_t window = 0;
  double end = 0.0;  // the window is (end - dt, end]
  std::int64_t requests = 0;
  std::int64_t served = 0;    // including riders won back by relaxation
  std::int64_t relaxed = 0;   // of which by relaxation
  Meters total_ad = 0;
  double match_ms = 0.0;
  double update_ms = 0.0;
  LemmaCounters counters;
  std::uint64_t candidate_pairs = 0;

  double served_rate() const { return requests == 0 ? 0.0 : static_cast<double>(served) / static_cast<double>(requests); }
  double mean_ad() const { return served == 0 ? 0.0 : static_cast<double>(total_ad) / static_cast<double>(served); }
};

enum class EventKind { kAssignment, kPickup, kDropoff, kRelaxation };

const char* event_name(EventKind k);

/// One entry of the event log. Field use depends on the kind:
///   assignment: driver, odometer, lag, consumed, wait_limit, ride_limit,
///               riders, ad, relaxed
///   pickup / dropoff: driver, odometer
///   relaxation: served, iteration, wait_s, theta (driver when served)
/// `odometer` is the distance the driver has physically covered.
struct Event {
  EventKind kind = EventKind::kAssignment;
  std::int64_t window = 0;
  double time = 0.0;
  RiderId rider = 0;
  DriverId driver = 0;
  Meters odometer = 0;
  Meters lag = 0;
  Meters consumed = 0;
  Meters wait_limit = 0;
  Meters ride_limit = 0;
  int riders = 1;
  Meters ad = 0;
  bool relaxed = false;
  bool served = false;
  int iteration = 0;
  double wait_s = 0.0;
  double theta = 0.0;

  friend bool operator==(const Event&, const Event&) = default;
};

struct DriverInfo {
  DriverId id = 0;
  int capacity = 0;

  friend bool operator==(const DriverInfo&, const DriverInfo&) = default;
};

struct EventLog {
  std::vector<DriverInfo> drivers;
  std::vector<Event> events;

  friend bool operator==(const EventLog&, const EventLog&) = default;
};

struct SimResult {
  std::vector<WindowMetrics> windows;
  std::int64_t total_requests = 0;
  std::int64_t served = 0;
  std::int64_t unserved = 0;
  /// Served riders still in a schedule when the drain limit was hit.
  std::int64_t undelivered = 0;
  LemmaCounters counters;
  EventLog events;  // empty unless record_events

  double served_rate() const {
    return total_requests == 0 ? 0.0 : static_cast<double>(served) / static_cast<double>(total_requests);
  }
};

/// Moves a driver `step` meters along its schedule. Outstanding lag is driven
/// off first, then whole legs complete their stops; a partial leg is walked
/// edge by edge and the driver snaps to the far end of the edge it stops on,
/// keeping the unfinished part of that edge as lag. Riders are charged for
/// the full distance to the snapped vertex. Completed stops are appended to
/// `done` with the odometer reading at arrival.
void advance_driver(Driver& d, Meters step, const RoadNetwork& net, const DistanceOracle& oracle,
                    std::vector<std::pair<Stop, Meters>>* done = nullptr);

/// Streaming window loop. Requests must be sorted by t. Drivers are matched
/// by fleet position; `fleet` must be sorted by id.
class Simulator {
 public:
  /// `bounds` supplies the lower bounds; any drivers it holds are discarded.
  Simulator(SimConfig config, const RoadNetwork& net, const DistanceOracle& oracle,
            const PartitionIndex& bounds, Fleet fleet, std::span<const RiderRequest> requests);

  /// Processes one window. Returns false once all requests are consumed and
  /// every schedule is empty (or the drain limit is reached).
  bool step();
  SimResult run();

  const Fleet& fleet() const { return fleet_; }
  const PartitionIndex& index() const { return index_; }
  std::int64_t pending() const { return static_cast<std::int64_t>(requests_.size() - next_); }
  const SimResult& result() const { return result_; }

 private:
  SimConfig config_;
  const RoadNetwork* net_;
  const DistanceOracle* oracle_;
  PartitionIndex index_;
  Fleet fleet_;
  std::span<const RiderRequest> requests_;
  std::size_t next_ = 0;
  double origin_ = 0.0;
  std::int64_t window_ = 0;
  std::int64_t drain_ = 0;
  bool done_ = false;
  SimResult result_;
};

SimResult simulate(const SimConfig& config, const RoadNetwork& net, const DistanceOracle& oracle,
                   const PartitionIndex& bounds, Fleet fleet, std::span<const RiderRequest> requests);

/// `window,requests,served,sr,total_ad_m,mean_ad_m,match_ms,update_ms`
void write_metrics_csv(std::ostream& out, const SimResult& result);

struct AuditReport {
  bool ok = true;
  std::int64_t riders_checked = 0;
  std::vector<std::string> violations;
};

/// Replays an event log: for every assigned rider the pickup must come
/// within the waiting budget (window debit + distance driven from the
/// assignment until pickup, which includes any lag), the ride must fit the ride limit, seats must never
/// be oversubscribed and every assigned rider must be picked up and dropped
/// off by the driver it was assigned to.
AuditReport audit(const EventLog& log);

void write_events_json(std::ostream& out, const EventLog& log);
EventLog read_events_json(std::istream& in);

}  // namespace rideshare
