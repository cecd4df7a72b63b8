#include "rideshare/relaxation.hpp"

#include <algorithm>

namespace rideshare {

RelaxMode parse_relax_mode(const std::string& name) {
  if (name == "off") return RelaxMode::kOff;
  if (name == "baseline") return RelaxMode::kBaseline;
  if (name == "incremental") return RelaxMode::kIncremental;
  throw std::invalid_argument("unknown relaxation mode '" + name + "'");
}

std::string relax_mode_name(RelaxMode m) {
  switch (m) {
    case RelaxMode::kOff: return "off";
    case RelaxMode::kBaseline: return "baseline";
    case RelaxMode::kIncremental: return "incremental";
  }
  return "off";
}

void RelaxationPolicy::validate() const {
  if (!(wait_factor >= 1.0)) throw ValidationError("relaxed waiting factor must be >= 1");
  if (!(theta_factor >= 1.0)) throw ValidationError("relaxed detour factor must be >= 1");
  if (steps < 1) throw ValidationError("relaxation steps must be >= 1");
}

Passenger relaxed_passenger(const WindowRider& r, double wait_s, double theta, double speed_mps) {
  Passenger p = r.passenger;
  p.wait_limit = wait_distance(wait_s, speed_mps);
  p.ride_limit = ride_limit(p.direct, theta);
  return p;
}

namespace {

// Best driver for one constraint level.
RelaxOutcome best_driver(const MatchContext& ctx, const Fleet& fleet, const WindowRider& r,
                         const RelaxLevel& level, double speed_mps) {
  RelaxOutcome out;
  out.rider = r.passenger.id;
  out.level = level;
  out.passenger = relaxed_passenger(r, level.wait_s, level.theta, speed_mps);
  const WindowRider probe{r.request, out.passenger};
  const auto cands = filter_candidates(ctx, fleet, std::span<const WindowRider>(&probe, 1));
  for (std::size_t d : cands[0]) {
    const auto o = rider_insertion(fleet[d].trip, out.passenger, *ctx.oracle, ctx.index,
                                   UtilityKind::kDistanceFirst, ctx.pruning);
    out.counters += o.counters;
    if (o.feasible && (!out.served || o.ad < out.ad)) {
      out.served = true;
      out.driver = d;
      out.i = o.i;
      out.j = o.j;
      out.ad = o.ad;
    }
  }
  return out;
}

}  // namespace

RelaxOutcome relax_baseline(const MatchContext& ctx, const Fleet& fleet, const WindowRider& r,
                            const RelaxationPolicy& policy, double speed_mps) {
  policy.validate();
  const RelaxLevel top{r.request.wait_s * policy.wait_factor, r.request.theta * policy.theta_factor,
                       policy.steps};
  return best_driver(ctx, fleet, r, top, speed_mps);
}

RelaxOutcome relax_incremental(const MatchContext& ctx, const Fleet& fleet, const WindowRider& r,
                               const RelaxationPolicy& policy, double speed_mps) {
  policy.validate();
  const double w0 = r.request.wait_s;
  const double t0 = r.request.theta;
  const double w_max = w0 * policy.wait_factor;
  const double t_max = t0 * policy.theta_factor;
  const double dw = (w_max - w0) / policy.steps;
  const double dt = (t_max - t0) / policy.steps;

  RelaxLevel level{w0, t0, 0};
  LemmaCounters spent;
  auto attempt = [&]() {
    auto o = best_driver(ctx, fleet, r, level, speed_mps);
    spent += o.counters;
    o.counters = spent;
    return o;
  };
  RelaxOutcome o = attempt();
  for (int k = 1; k <= policy.steps && !o.served; ++k) {
    level.iteration = k;
    // The last step lands on the maxima exactly.
    if (dt > 0.0) {
      level.theta = k == policy.steps ? t_max : std::min(t0 + dt * k, t_max);
      o = attempt();
      if (o.served) break;
    }
    if (dw > 0.0) {
      level.wait_s = k == policy.steps ? w_max : std::min(w0 + dw * k, w_max);
      o = attempt();
    }
  }
  return o;
}

std::vector<RelaxOutcome> relax_unserved(RelaxMode mode, const MatchContext& ctx, Fleet& fleet,
                                         std::span<const WindowRider> riders,
                                         std::span<const RiderId> unserved, const RelaxationPolicy& policy,
                                         double speed_mps) {
  std::vector<RelaxOutcome> out;
  if (mode == RelaxMode::kOff) return out;
  std::vector<RiderId> ids(unserved.begin(), unserved.end());
  std::sort(ids.begin(), ids.end());
  for (RiderId id : ids) {
    const auto it = std::find_if(riders.begin(), riders.end(),
                                 [&](const WindowRider& r) { return r.passenger.id == id; });
    if (it == riders.end()) throw std::invalid_argument("unserved rider " + std::to_string(id) + " not in window");
    RelaxOutcome o = mode == RelaxMode::kBaseline ? relax_baseline(ctx, fleet, *it, policy, speed_mps)
                                                  : relax_incremental(ctx, fleet, *it, policy, speed_mps);
    if (o.served) fleet[o.driver].trip.insert(o.passenger, o.i, o.j, *ctx.oracle);
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace rideshare
