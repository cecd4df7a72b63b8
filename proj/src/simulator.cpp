#include "rideshare/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

#include "json.hpp"

namespace rideshare {

Meters SimConfig::step_meters() const { return static_cast<Meters>(std::llround(speed_mps() * dt_s)); }

void SimConfig::validate() const {
  if (!(dt_s > 0.0)) throw ValidationError("window length must be positive");
  if (!(speed_kmh > 0.0)) throw ValidationError("speed must be positive");
  if (matcher.gamma < 1) throw ValidationError("group threshold must be >= 1");
  if (max_drain_windows < 0) throw ValidationError("drain limit must be >= 0");
  relax_policy.validate();
}

const char* event_name(EventKind k) {
  switch (k) {
    case EventKind::kAssignment: return "assignment";
    case EventKind::kPickup: return "pickup";
    case EventKind::kDropoff: return "dropoff";
    case EventKind::kRelaxation: return "relaxation";
  }
  return "assignment";
}

void advance_driver(Driver& d, Meters step, const RoadNetwork& net, const DistanceOracle& oracle,
                    std::vector<std::pair<Stop, Meters>>* done) {
  TripSchedule& tr = d.trip;
  Meters budget = step;
  if (tr.lag() > 0) {
    const Meters pay = std::min(tr.lag(), budget);
    tr.set_lag(tr.lag() - pay);
    budget -= pay;
    d.odometer += pay;
    if (tr.lag() > 0) return;
  }
  while (!tr.empty() && budget >= tr.leg(1)) {
    budget -= tr.leg(1);
    d.odometer += tr.leg(1);
    const Stop s = tr.complete_front_stop();
    if (done != nullptr) done->emplace_back(s, d.odometer);
  }
  if (tr.empty() || budget == 0) return;

  VertexId at = tr.origin();
  Meters driven = 0;
  Meters lag = 0;
  for (const Edge& e : shortest_path_edges(net, oracle, at, tr.vertex(1))) {
    const VertexId far = e.u == at ? e.v : e.u;
    driven += e.length;
    at = far;
    if (budget >= e.length) {
      budget -= e.length;
      if (budget == 0) break;
    } else {
      lag = e.length - budget;
      break;
    }
  }
  d.odometer += driven - lag;
  tr.advance_origin(at, driven, oracle);
  tr.set_lag(lag);
}

Simulator::Simulator(SimConfig config, const RoadNetwork& net, const DistanceOracle& oracle,
                     const PartitionIndex& bounds, Fleet fleet, std::span<const RiderRequest> requests)
    : config_(std::move(config)), net_(&net), oracle_(&oracle), index_(bounds), fleet_(std::move(fleet)),
      requests_(requests) {
  config_.validate();
  for (std::size_t k = 1; k < requests_.size(); ++k) {
    if (requests_[k].t < requests_[k - 1].t) throw ValidationError("requests are not sorted by time");
  }
  for (std::size_t k = 1; k < fleet_.size(); ++k) {
    if (fleet_[k].id <= fleet_[k - 1].id) throw ValidationError("drivers must have ascending unique ids");
  }
  for (const auto& r : requests_) validate_request(r);
  for (PartId p = 0; p < index_.parts(); ++p) {
    const auto inside = index_.drivers_in(p);
    for (DriverId d : inside) index_.remove_driver(d);
  }
  for (std::size_t k = 0; k < fleet_.size(); ++k) {
    if (!net.valid_vertex(fleet_[k].location())) throw ValidationError("driver at unknown vertex");
    index_.place_driver(static_cast<DriverId>(k), index_.part_of(fleet_[k].location()));
  }
  // The first window ends at the first multiple of dt at or after the first
  // request.
  const double first = requests_.empty() ? 0.0 : requests_.front().t;
  origin_ = std::ceil(first / config_.dt_s) * config_.dt_s - config_.dt_s;
  result_.total_requests = static_cast<std::int64_t>(requests_.size());
  if (config_.record_events) {
    for (const auto& d : fleet_) result_.events.drivers.push_back({d.id, d.trip.capacity()});
  }
}

bool Simulator::step() {
  using Clock = std::chrono::steady_clock;
  if (done_) return false;
  const bool busy = std::any_of(fleet_.begin(), fleet_.end(), [](const Driver& d) { return !d.trip.empty(); });
  if (next_ == requests_.size()) {
    if (!busy || drain_ >= config_.max_drain_windows) {
      done_ = true;
      for (const auto& d : fleet_) {
        for (const auto& s : d.trip.stops()) {
          if (s.kind == StopKind::kDropoff) ++result_.undelivered;
        }
      }
      return false;
    }
    ++drain_;
  }

  WindowMetrics m;
  m.window = window_;
  m.end = origin_ + config_.dt_s * static_cast<double>(window_ + 1);
  const double now = m.end;
  std::vector<WindowRider> riders;
  while (next_ < requests_.size() && requests_[next_].t <= now) {
    const RiderRequest& r = requests_[next_++];
    riders.push_back({r, make_passenger(r, *oracle_, config_.speed_mps(), now)});
  }
  m.requests = static_cast<std::int64_t>(riders.size());

  auto log = [&](Event e) {
    if (!config_.record_events) return;
    e.window = window_;
    e.time = now;
    result_.events.events.push_back(e);
  };
  auto log_assignment = [&](std::size_t pos, const Passenger& p, Meters ad, bool relaxed) {
    Event e;
    e.kind = EventKind::kAssignment;
    e.rider = p.id;
    e.driver = fleet_[pos].id;
    e.odometer = fleet_[pos].odometer;
    e.lag = fleet_[pos].trip.lag();
    e.consumed = p.consumed;
    e.wait_limit = p.wait_limit;
    e.ride_limit = p.ride_limit;
    e.riders = p.riders;
    e.ad = ad;
    e.relaxed = relaxed;
    log(e);
  };

  const auto t0 = Clock::now();
  if (!riders.empty()) {
    const MatchContext ctx{net_, oracle_, &index_, true};
    MatcherConfig mc = config_.matcher;
    mc.annealing.seed = config_.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(window_);
    // Lag is the same before and after matching, so assignments can be logged
    // from the result.
    const MatchResult res = run_matcher(mc, ctx, fleet_, riders);
    for (const auto& a : res.assigned) {
      const auto it = std::find_if(riders.begin(), riders.end(),
                                   [&](const WindowRider& r) { return r.passenger.id == a.rider; });
      log_assignment(a.driver, it->passenger, a.ad, false);
      m.total_ad += a.ad;
    }
    m.served = static_cast<std::int64_t>(res.assigned.size());
    m.counters = res.counters;
    m.candidate_pairs = res.candidate_pairs;
    if (config_.relax != RelaxMode::kOff && !res.unserved.empty()) {
      const MatchContext rctx{net_, oracle_, &index_, true};
      const auto outcomes = relax_unserved(config_.relax, rctx, fleet_, riders, res.unserved,
                                           config_.relax_policy, config_.speed_mps());
      for (const auto& o : outcomes) {
        m.counters += o.counters;
        Event e;
        e.kind = EventKind::kRelaxation;
        e.rider = o.rider;
        e.served = o.served;
        e.iteration = o.level.iteration;
        e.wait_s = o.level.wait_s;
        e.theta = o.level.theta;
        if (o.served) e.driver = fleet_[o.driver].id;
        log(e);
        if (!o.served) continue;
        log_assignment(o.driver, o.passenger, o.ad, true);
        ++m.served;
        ++m.relaxed;
        m.total_ad += o.ad;
      }
    }
  }
  const auto t1 = Clock::now();

  const Meters step = config_.step_meters();
  std::vector<std::pair<Stop, Meters>> done;
  for (std::size_t k = 0; k < fleet_.size(); ++k) {
    Driver& d = fleet_[k];
    if (d.trip.empty() && d.trip.lag() == 0) continue;
    const PartId before = index_.part_of(d.location());
    done.clear();
    advance_driver(d, step, *net_, *oracle_, &done);
    const PartId after = index_.part_of(d.location());
    if (before != after) index_.move_driver(static_cast<DriverId>(k), before, after);
    for (const auto& [s, odo] : done) {
      Event e;
      e.kind = s.kind == StopKind::kPickup ? EventKind::kPickup : EventKind::kDropoff;
      e.rider = s.rider;
      e.driver = d.id;
      e.odometer = odo;
      log(e);
    }
  }
  const auto t2 = Clock::now();
  if (config_.record_timing) {
    m.match_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    m.update_ms = std::chrono::duration<double, std::milli>(t2 - t1).count();
  }

  result_.served += m.served;
  result_.unserved += m.requests - m.served;
  result_.counters += m.counters;
  result_.windows.push_back(m);
  ++window_;
  return true;
}

SimResult Simulator::run() {
  while (step()) {
  }
  return result_;
}

SimResult simulate(const SimConfig& config, const RoadNetwork& net, const DistanceOracle& oracle,
                   const PartitionIndex& bounds, Fleet fleet, std::span<const RiderRequest> requests) {
  Simulator sim(config, net, oracle, bounds, std::move(fleet), requests);
  return sim.run();
}

void write_metrics_csv(std::ostream& out, const SimResult& result) {
  out << "window,requests,served,sr,total_ad_m,mean_ad_m,match_ms,update_ms\n";
  char buf[256];
  for (const auto& w : result.windows) {
    std::snprintf(buf, sizeof buf, "%lld,%lld,%lld,%.6f,%lld,%.3f,%.3f,%.3f\n", static_cast<long long>(w.window),
                  static_cast<long long>(w.requests), static_cast<long long>(w.served), w.served_rate(),
                  static_cast<long long>(w.total_ad), w.mean_ad(), w.match_ms, w.update_ms);
    out << buf;
  }
}

AuditReport audit(const EventLog& log) {
  struct Trace {
    const Event* assigned = nullptr;
    const Event* pickup = nullptr;
    const Event* dropoff = nullptr;
  };
  AuditReport rep;
  auto fail = [&](std::string msg) {
    rep.ok = false;
    rep.violations.push_back(std::move(msg));
  };
  std::map<DriverId, int> capacity;
  std::map<DriverId, int> onboard;
  for (const auto& d : log.drivers) capacity[d.id] = d.capacity;
  std::map<RiderId, Trace> riders;
  for (const Event& e : log.events) {
    const std::string who = "rider " + std::to_string(e.rider);
    if (e.kind == EventKind::kRelaxation) continue;
    if (!capacity.count(e.driver)) {
      fail(who + ": unknown driver " + std::to_string(e.driver));
      continue;
    }
    Trace& t = riders[e.rider];
    switch (e.kind) {
      case EventKind::kAssignment:
        if (t.assigned != nullptr) fail(who + ": assigned twice");
        t.assigned = &e;
        break;
      case EventKind::kPickup:
        if (t.assigned == nullptr || t.pickup != nullptr || t.assigned->driver != e.driver) {
          fail(who + ": pickup without a matching assignment");
          break;
        }
        t.pickup = &e;
        onboard[e.driver] += t.assigned->riders;
        if (onboard[e.driver] > capacity[e.driver]) {
          fail("driver " + std::to_string(e.driver) + ": " + std::to_string(onboard[e.driver]) + " riders onboard, capacity " +
               std::to_string(capacity[e.driver]));
        }
        break;
      case EventKind::kDropoff:
        if (t.pickup == nullptr || t.dropoff != nullptr || t.pickup->driver != e.driver) {
          fail(who + ": dropoff without a matching pickup");
          break;
        }
        t.dropoff = &e;
        onboard[e.driver] -= t.assigned->riders;
        break;
      case EventKind::kRelaxation:
        break;
    }
  }
  for (const auto& [id, t] : riders) {
    if (t.assigned == nullptr) continue;
    ++rep.riders_checked;
    const std::string who = "rider " + std::to_string(id);
    if (t.pickup == nullptr || t.dropoff == nullptr) {
      fail(who + ": not delivered");
      continue;
    }
    const Meters wait = t.assigned->consumed + (t.pickup->odometer - t.assigned->odometer);
    if (wait > t.assigned->wait_limit) {
      fail(who + ": pickup after " + std::to_string(wait) + " m, limit " + std::to_string(t.assigned->wait_limit));
    }
    const Meters ride = t.dropoff->odometer - t.pickup->odometer;
    if (ride > t.assigned->ride_limit) {
      fail(who + ": ride of " + std::to_string(ride) + " m, limit " + std::to_string(t.assigned->ride_limit));
    }
  }
  return rep;
}

void write_events_json(std::ostream& out, const EventLog& log) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["drivers"] = ordered_json::array();
  for (const auto& d : log.drivers) doc["drivers"].push_back({{"id", d.id}, {"capacity", d.capacity}});
  doc["events"] = ordered_json::array();
  for (const Event& e : log.events) {
    ordered_json j;
    j["type"] = event_name(e.kind);
    j["window"] = e.window;
    j["time"] = e.time;
    j["rider"] = e.rider;
    switch (e.kind) {
      case EventKind::kAssignment:
        j["driver"] = e.driver;
        j["odometer"] = e.odometer;
        j["lag"] = e.lag;
        j["consumed"] = e.consumed;
        j["wait_limit"] = e.wait_limit;
        j["ride_limit"] = e.ride_limit;
        j["riders"] = e.riders;
        j["ad"] = e.ad;
        j["relaxed"] = e.relaxed;
        break;
      case EventKind::kPickup:
      case EventKind::kDropoff:
        j["driver"] = e.driver;
        j["odometer"] = e.odometer;
        break;
      case EventKind::kRelaxation:
        j["served"] = e.served;
        j["driver"] = e.driver;
        j["iteration"] = e.iteration;
        j["wait_s"] = e.wait_s;
        j["theta"] = e.theta;
        break;
    }
    doc["events"].push_back(std::move(j));
  }
  out << doc.dump(1) << '\n';
}

EventLog read_events_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("event log is not valid JSON: ") + e.what(), 0);
  }
  EventLog log;
  try {
    for (const auto& d : doc.at("drivers")) log.drivers.push_back({d.at("id").get<DriverId>(), d.at("capacity").get<int>()});
    for (const auto& j : doc.at("events")) {
      Event e;
      const std::string type = j.at("type").get<std::string>();
      if (type == "assignment") {
        e.kind = EventKind::kAssignment;
      } else if (type == "pickup") {
        e.kind = EventKind::kPickup;
      } else if (type == "dropoff") {
        e.kind = EventKind::kDropoff;
      } else if (type == "relaxation") {
        e.kind = EventKind::kRelaxation;
      } else {
        throw ValidationError("unknown event type '" + type + "'");
      }
      e.window = j.at("window").get<std::int64_t>();
      e.time = j.at("time").get<double>();
      e.rider = j.at("rider").get<RiderId>();
      e.driver = j.value("driver", DriverId{0});
      e.odometer = j.value("odometer", Meters{0});
      e.lag = j.value("lag", Meters{0});
      e.consumed = j.value("consumed", Meters{0});
      e.wait_limit = j.value("wait_limit", Meters{0});
      e.ride_limit = j.value("ride_limit", Meters{0});
      e.riders = j.value("riders", 1);
      e.ad = j.value("ad", Meters{0});
      e.relaxed = j.value("relaxed", false);
      e.served = j.value("served", false);
      e.iteration = j.value("iteration", 0);
      e.wait_s = j.value("wait_s", 0.0);
      e.theta = j.value("theta", 0.0);
      log.events.push_back(e);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed event log: ") + e.what());
  }
  return log;
}

}  // namespace rideshare
