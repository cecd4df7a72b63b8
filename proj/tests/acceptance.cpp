// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "insertion_oracle.hpp"
#include "random_instances.hpp"
#include "rideshare/io.hpp"
#include "rideshare/relaxation.hpp"
#include "rideshare/simulator.hpp"
#include "window_instances.hpp"

namespace rideshare {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool ok = true;
  std::string detail;
};

int failures = 0;
std::vector<int> selected;  // empty: all

void report(int number, const char* name, const std::function<Verdict()>& body) {
  if (!selected.empty() && std::find(selected.begin(), selected.end(), number) == selected.end()) return;
  const auto start = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.ok) ++failures;
  std::printf("%s %2d %s: %s (%.1f s)\n", v.ok ? "PASS" : "FAIL", number, name, v.detail.c_str(), seconds_since(start));
  std::fflush(stdout);
}

template <typename... Args>
std::string format(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

/// All-pairs table filled by one Dijkstra per source.
class MatrixOracle final : public DistanceOracle {
 public:
  explicit MatrixOracle(const RoadNetwork& net) : n_(static_cast<std::size_t>(net.vertex_count())) {
    table_.reserve(n_ * n_);
    for (VertexId s = 0; s < net.vertex_count(); ++s) {
      const auto row = dijkstra(net, s);
      table_.insert(table_.end(), row.begin(), row.end());
    }
  }
  Meters distance(VertexId u, VertexId v) const override {
    return table_[static_cast<std::size_t>(u) * n_ + static_cast<std::size_t>(v)];
  }

 private:
  std::size_t n_;
  std::vector<Meters> table_;
};

// 1. Lower bounds never exceed the exact distance.
Verdict lower_bound_soundness() {
  const auto start = Clock::now();
  Verdict v;
  {
    const auto net = testing::four_part_network();
    const PartitionIndex idx(net, testing::four_part_partition());
    auto at = [](int k) { return static_cast<VertexId>(k - 1); };
    const bool example = idx.down(at(7)) == 1 && idx.part_distance(0, 1) == 2 && idx.part_distance(0, 3) == 1 &&
                         idx.lb_vertex_part(at(7), 2) == 4 && idx.lb_vertex_vertex(at(7), at(9)) == 4;
    if (!example) return {false, "four-part fixture bounds differ"};
  }
  const auto net = testing::random_grid(50, 100, 50, 200, 11);
  const PartitionIndex idx(net, partition_network(net, 50, 11));
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<VertexId> pick(0, net.vertex_count() - 1);
  long long pairs = 0;
  long long violations = 0;
  long long part_violations = 0;
  for (int s = 0; s < 200; ++s) {
    const VertexId u = pick(rng);
    const auto exact = dijkstra(net, u);
    std::vector<Meters> nearest(static_cast<std::size_t>(idx.parts()), kUnreachable);
    for (VertexId x = 0; x < net.vertex_count(); ++x) {
      auto& m = nearest[static_cast<std::size_t>(idx.part_of(x))];
      m = std::min(m, exact[static_cast<std::size_t>(x)]);
    }
    for (PartId p = 0; p < idx.parts(); ++p) {
      if (idx.lb_vertex_part(u, p) > nearest[static_cast<std::size_t>(p)]) ++part_violations;
    }
    for (int t = 0; t < 500; ++t) {
      const VertexId x = pick(rng);
      ++pairs;
      if (idx.lb_vertex_vertex(u, x) > exact[static_cast<std::size_t>(x)]) ++violations;
    }
  }
  const double secs = seconds_since(start);
  v.ok = violations == 0 && part_violations == 0 && secs < 60.0;
  v.detail = format("four-part fixture exact; %lld pairs on %d vertices, tau=50, %lld vertex and %lld part violations", pairs,
                    net.vertex_count(), violations, part_violations);
  return v;
}

// 2. Pruned insertion against the cubic brute force.
Verdict insertion_equivalence() {
  const auto start = Clock::now();
  const auto net = testing::random_grid(20, 20, 40, 160, 21);
  const HubLabelOracle oracle(net);
  const PartitionIndex idx(net, partition_network(net, 16, 21));
  std::mt19937_64 rng(22);
  RiderId next = 1;
  testing::InstanceShape tight;
  tight.wait_lo = 150;
  tight.wait_hi = 1200;
  tight.theta_lo = 0.05;
  tight.theta_hi = 0.8;
  testing::InstanceShape generous;
  generous.wait_lo = 1500;
  generous.wait_hi = 6000;
  generous.theta_lo = 0.3;
  generous.theta_hi = 1.5;
  int mismatches = 0;
  int feasible = 0;
  std::size_t longest = 0;
  const int instances = 10000;
  for (int trial = 0; trial < instances; ++trial) {
    const auto& shape = trial % 2 == 0 ? testing::InstanceShape{} : tight;
    auto tr = testing::random_schedule(net.vertex_count(), oracle, rng, shape, next);
    if (trial % 3 == 0) tr.set_lag(static_cast<Meters>(rng() % 150));
    longest = std::max(longest, tr.size());
    const auto p = testing::random_passenger(next++, net.vertex_count(), oracle, rng,
                                             trial % 4 < 2 ? generous : shape, 3);
    const auto kind = trial % 2 == 0 ? UtilityKind::kDistanceFirst : UtilityKind::kGreedy;
    const auto naive = testing::naive_insertion(tr, p, oracle, kind);
    const auto fast = rider_insertion(tr, p, oracle, &idx, kind, true);
    bool same = fast.feasible == naive.feasible;
    if (same && naive.feasible) {
      same = fast.ad == naive.ad && fast.i == naive.i && fast.j == naive.j && !(fast.utility < naive.utility) &&
             !(naive.utility < fast.utility);
      ++feasible;
    }
    if (!same) ++mismatches;
  }
  const double secs = seconds_since(start);
  Verdict v;
  v.ok = mismatches == 0 && longest <= 10 && secs < 120.0;
  v.detail = format("%d instances (n <= %zu), %d feasible, %d mismatches", instances, longest, feasible, mismatches);
  return v;
}

// 3. Pruning changes nothing in the matching.
Verdict matcher_equivalence() {
  const testing::World w(20, 20, 20, 31);
  std::mt19937_64 rng(32);
  int mismatches = 0;
  long long riders_total = 0;
  long long served_total = 0;
  for (int window = 0; window < 200; ++window) {
    PartitionIndex index = w.index;
    RiderId next = 1;
    const int drivers = 5 + static_cast<int>(rng() % 46);
    const int riders = 20 + static_cast<int>(rng() % 181);
    const Fleet fleet = testing::random_fleet(w, index, rng, drivers, 4, drivers / 2, next);
    const auto batch = testing::random_riders(w, rng, riders, next, 20.0);
    riders_total += riders;
    const MatchContext ctx{&w.net, &w.oracle, &index, true};
    for (auto [plain, pruned] : {std::pair{Algorithm::kDF, Algorithm::kDFP}, std::pair{Algorithm::kGR, Algorithm::kGRP}}) {
      MatcherConfig a;
      a.algorithm = plain;
      MatcherConfig b;
      b.algorithm = pruned;
      Fleet fa = fleet;
      Fleet fb = fleet;
      const auto ra = run_matcher(a, ctx, fa, batch);
      const auto rb = run_matcher(b, ctx, fb, batch);
      bool same = ra.same_matching(rb) && ra.candidate_pairs == rb.candidate_pairs;
      for (std::size_t d = 0; same && d < fa.size(); ++d) {
        same = std::equal(fa[d].trip.stops().begin(), fa[d].trip.stops().end(), fb[d].trip.stops().begin(),
                          fb[d].trip.stops().end());
      }
      if (!same) ++mismatches;
      served_total += static_cast<long long>(rb.assigned.size());
    }
  }
  return {mismatches == 0, format("200 windows, %lld riders, %lld pruned-run assignments (DF+P and GR+P), %d mismatches", riders_total,
                                  served_total, mismatches)};
}

// The desk trace shared by the pruning and throughput checks.
struct DeskTrace {
  RoadNetwork net;
  std::vector<RiderRequest> requests;
  Fleet fleet;
  PartitionIndex index;
  std::unique_ptr<HubLabelOracle> oracle;
  RunConfig config;

  DeskTrace() {
    GeneratorSpec spec;
    spec.side = 142;  // 20,164 vertices
    net = generate_network(spec);
    requests = generate_requests(spec, net);
    fleet = generate_drivers(spec, net);
    index = PartitionIndex(net, partition_network(net, config.partitions, config.seed));
    oracle = std::make_unique<HubLabelOracle>(net);
  }

  SimResult run(const std::string& algo) const {
    RunConfig c = config;
    c.algo = algo;
    SimConfig sim = c.sim_config();
    sim.record_timing = true;
    return simulate(sim, net, *oracle, index, fleet, requests);
  }
};

const DeskTrace& desk() {
  static const DeskTrace trace;
  return trace;
}

// 4. DF+P examines under half the positions DF does.
Verdict pruning_effectiveness() {
  const auto& d = desk();
  const auto plain = d.run("df");
  const auto pruned = d.run("df+p");
  const double ratio =
      static_cast<double>(pruned.counters.examined) / static_cast<double>(std::max<std::uint64_t>(1, plain.counters.examined));
  return {ratio < 0.5 && plain.served == pruned.served,
          format("%zu requests: DF examined %llu, DF+P examined %llu (ratio %.4f), served %lld vs %lld",
                 d.requests.size(), static_cast<unsigned long long>(plain.counters.examined),
                 static_cast<unsigned long long>(pruned.counters.examined), ratio,
                 static_cast<long long>(plain.served), static_cast<long long>(pruned.served))};
}

// 10. Every window fits in its own length.
Verdict throughput() {
  const auto& d = desk();
  const auto r = d.run(d.config.algo);
  double worst = 0.0;
  double total = 0.0;
  for (const auto& m : r.windows) {
    worst = std::max(worst, m.match_ms + m.update_ms);
    total += m.match_ms + m.update_ms;
  }
  const double budget_ms = d.config.dt_s * 1000.0;
  return {worst < budget_ms && !r.windows.empty(),
          format("%s, %d vertices, %zu drivers, %zu requests: worst window %.1f ms, mean %.1f ms, budget %.0f ms",
                 d.config.algo.c_str(), d.net.vertex_count(), d.fleet.size(), d.requests.size(), worst,
                 total / static_cast<double>(std::max<std::size_t>(1, r.windows.size())), budget_ms)};
}

// A mid-size instance with mixed rider constraints for the run-level checks.
struct RunInstance {
  RoadNetwork net;
  std::vector<RiderRequest> requests;
  Fleet fleet;
  PartitionIndex index;
  std::unique_ptr<HubLabelOracle> oracle;

  RunInstance() {
    GeneratorSpec spec;
    spec.side = 40;
    spec.requests = 1500;
    spec.rate = 10.0;
    spec.drivers = 150;
    spec.w_min_s = 90.0;
    spec.w_max_s = 420.0;
    spec.theta_min = 0.1;
    spec.theta_max = 1.0;
    spec.seed = 51;
    net = generate_network(spec);
    requests = generate_requests(spec, net);
    fleet = generate_drivers(spec, net);
    index = PartitionIndex(net, partition_network(net, 64, spec.seed));
    oracle = std::make_unique<HubLabelOracle>(net);
  }

  SimResult run(Algorithm a, RelaxMode relax) const {
    SimConfig c;
    c.matcher.algorithm = a;
    c.relax = relax;
    c.record_events = true;
    c.seed = 7;
    return simulate(c, net, *oracle, index, fleet, requests);
  }
};

const RunInstance& run_instance() {
  static const RunInstance inst;
  return inst;
}

const Algorithm kAllAlgorithms[] = {Algorithm::kDF, Algorithm::kDFP, Algorithm::kGR,
                                    Algorithm::kGRP, Algorithm::kDC, Algorithm::kSA};

// 5. Event logs of every matcher pass the audit.
Verdict constraint_audit() {
  const auto& inst = run_instance();
  int runs = 0;
  int failed = 0;
  long long riders = 0;
  std::string first_violation;
  for (const Algorithm a : kAllAlgorithms) {
    for (const RelaxMode relax : {RelaxMode::kOff, RelaxMode::kBaseline, RelaxMode::kIncremental}) {
      const auto r = inst.run(a, relax);
      // Round-trip through JSON, as the audit command reads it.
      std::stringstream json;
      write_events_json(json, r.events);
      const auto rep = audit(read_events_json(json));
      ++runs;
      riders += rep.riders_checked;
      if (!rep.ok || r.undelivered != 0 || rep.riders_checked != r.served) {
        ++failed;
        if (first_violation.empty()) {
          first_violation = algorithm_name(a) + "/" + relax_mode_name(relax) + ": " +
                            (rep.violations.empty() ? std::string("undelivered riders") : rep.violations.front());
        }
      }
    }
  }
  Verdict v{failed == 0, format("%d runs (6 matchers x 3 relaxation modes), %lld served riders audited, %d failed",
                                runs, riders, failed)};
  if (!first_violation.empty()) v.detail += "; first: " + first_violation;
  return v;
}

// 6. Additional distance and slack against an all-pairs table.
Verdict ad_and_slack() {
  const auto net = testing::random_grid(12, 12, 40, 160, 61);
  const MatrixOracle exact(net);
  std::mt19937_64 rng(62);
  RiderId next = 1;
  long long ad_checks = 0;
  long long ad_wrong = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto tr = testing::random_schedule(net.vertex_count(), exact, rng, {}, next);
    const Passenger r = testing::random_passenger(next++, net.vertex_count(), exact, rng, {});
    for (std::size_t i = 0; i <= tr.size(); ++i) {
      for (std::size_t j = i; j <= tr.size(); ++j) {
        const auto out = apply_insertion(tr, r, i, j, exact);
        Meters before = 0;
        for (std::size_t k = 1; k <= tr.size(); ++k) before += exact.distance(tr.vertex(k - 1), tr.vertex(k));
        Meters after = 0;
        for (std::size_t k = 1; k <= out.size(); ++k) after += exact.distance(out.vertex(k - 1), out.vertex(k));
        ++ad_checks;
        if (additional_distance(tr, r, i, j, exact) != after - before) ++ad_wrong;
      }
    }
  }
  long long slack_cases = 0;
  long long slack_wrong = 0;
  int schedules = 0;
  while (slack_cases < 1000) {
    const auto tr = testing::random_schedule(net.vertex_count(), exact, rng, {}, next);
    ++schedules;
    for (std::size_t k = 1; k <= tr.size(); ++k) {
      const Meters sd = tr.slack(k);
      if (!reachable(sd)) continue;
      ++slack_cases;
      const bool fits = check_feasible_bruteforce(tr, exact, k, sd).feasible;
      const bool tight = !check_feasible_bruteforce(tr, exact, k, sd + 1).feasible;
      if (!fits || !tight) ++slack_wrong;
    }
  }
  return {ad_wrong == 0 && slack_wrong == 0,
          format("AD: 1000 schedules, %lld positions, %lld wrong; slack: %lld cases over %d schedules, %lld wrong",
                 ad_checks, ad_wrong, slack_cases, schedules, slack_wrong)};
}

// 7. Annealing never ends worse than its greedy start.
Verdict annealing_dominance() {
  const testing::World w(80, 80, 100, 71);
  std::mt19937_64 rng(72);
  PartitionIndex index = w.index;
  RiderId next = 1;
  Fleet fleet = testing::random_fleet(w, index, rng, 1000, 4, 300, next);
  const Meters step = std::llround(testing::kSpeed * 10.0);
  bool ok = true;
  std::string gaps;
  for (int window = 0; window < 5; ++window) {
    const double t0 = 10.0 * (window + 1);
    const auto batch = testing::random_riders(w, rng, 1000, next, t0);
    next += 1000;
    const MatchContext ctx{&w.net, &w.oracle, &index, true};
    Fleet fg = fleet;
    const auto gr = greedy(ctx, fg, batch);
    Fleet fs = fleet;
    AnnealingParams params;  // P = 10000, T0 = 5, decay 0.001
    params.seed = 73 + static_cast<std::uint64_t>(window);
    AnnealingStats stats;
    const auto sa = simulated_annealing(ctx, fs, batch, params, &stats);
    const auto ug = exact_window_utility(gr, batch);
    const auto us = exact_window_utility(sa, batch);
    if (ug < us) ok = false;
    gaps += format("%sw%d: GR+P %.4f km (%zu served) SA %.4f km (%zu served) gap %.4f, %llu moves, %llu improving",
                   window ? "; " : "", window + 1, ug.km(), gr.assigned.size(), us.km(), sa.assigned.size(),
                   ug.km() - us.km(), static_cast<unsigned long long>(stats.moves),
                   static_cast<unsigned long long>(stats.improvements));
    // Carry the greedy outcome into the next window.
    fleet = std::move(fg);
    for (std::size_t d = 0; d < fleet.size(); ++d) {
      advance_driver(fleet[d], step, w.net, w.oracle);
      const PartId from = index.driver_part(static_cast<DriverId>(d));
      const PartId to = index.part_of(fleet[d].location());
      if (from != to) index.move_driver(static_cast<DriverId>(d), from, to);
    }
  }
  return {ok, gaps};
}

// 8. Incremental success implies baseline success; relaxation leaves
// scheduled riders alone.
Verdict relaxation_implication() {
  const testing::World w(16, 16, 16, 81);
  std::mt19937_64 rng(82);
  testing::RiderShape tight;
  tight.wait_lo = 20;
  tight.wait_hi = 120;
  tight.theta_lo = 0.0;
  tight.theta_hi = 0.4;
  const RelaxationPolicy policy{};
  long long unserved = 0;
  long long counterexamples = 0;
  long long base_wins = 0;
  long long inc_wins = 0;
  long long records_changed = 0;
  while (unserved < 500) {
    PartitionIndex index = w.index;
    RiderId next = 1;
    Fleet fleet = testing::random_fleet(w, index, rng, 6, 3, 4, next);
    const auto riders = testing::random_riders(w, rng, 12, next, 20.0, tight);
    const MatchContext ctx{&w.net, &w.oracle, &index, true};
    const auto res = greedy(ctx, fleet, riders);
    for (const RiderId id : res.unserved) {
      const auto& r = *std::find_if(riders.begin(), riders.end(), [&](const auto& x) { return x.passenger.id == id; });
      const auto base = relax_baseline(ctx, fleet, r, policy, testing::kSpeed);
      const auto inc = relax_incremental(ctx, fleet, r, policy, testing::kSpeed);
      ++unserved;
      // Covers both directions: baseline failing with incremental succeeding.
      if (inc.served && !base.served) ++counterexamples;
      base_wins += base.served ? 1 : 0;
      inc_wins += inc.served ? 1 : 0;
    }
    std::vector<std::vector<Passenger>> before;
    for (const auto& d : fleet) before.emplace_back(d.trip.passengers().begin(), d.trip.passengers().end());
    relax_unserved(RelaxMode::kIncremental, ctx, fleet, riders, res.unserved, policy, testing::kSpeed);
    for (std::size_t d = 0; d < fleet.size(); ++d) {
      for (const auto& p : before[d]) {
        const Passenger* now = fleet[d].trip.passenger(p.id);
        if (now == nullptr || !(*now == p)) ++records_changed;
      }
    }
  }
  return {counterexamples == 0 && records_changed == 0,
          format("%lld unserved riders: baseline serves %lld, incremental %lld, %lld counterexamples, %lld served "
                 "records changed",
                 unserved, base_wins, inc_wins, counterexamples, records_changed)};
}

// 9. Same seed, same bytes.
Verdict determinism() {
  const auto& inst = run_instance();
  int differing = 0;
  std::string names;
  for (const Algorithm a : kAllAlgorithms) {
    std::string csv[2];
    std::string events[2];
    for (int k = 0; k < 2; ++k) {
      const auto r = inst.run(a, RelaxMode::kIncremental);
      std::ostringstream out;
      write_metrics_csv(out, r);
      csv[k] = out.str();
      std::ostringstream ev;
      write_events_json(ev, r.events);
      events[k] = ev.str();
    }
    if (csv[0] != csv[1] || events[0] != events[1]) {
      ++differing;
      names += " " + algorithm_name(a);
    }
  }
  return {differing == 0, format("6 matchers run twice: %d differ%s", differing, names.c_str())};
}

}  // namespace
}  // namespace rideshare

// Optional arguments pick criteria by number.
int main(int argc, char** argv) {
  using namespace rideshare;
  for (int k = 1; k < argc; ++k) selected.push_back(std::atoi(argv[k]));
  report(1, "lower-bound soundness", lower_bound_soundness);
  report(2, "insertion oracle equivalence", insertion_equivalence);
  report(3, "pruned/unpruned matcher equivalence", matcher_equivalence);
  report(4, "pruning effectiveness", pruning_effectiveness);
  report(5, "constraint audit", constraint_audit);
  report(6, "AD/slack numerics", ad_and_slack);
  report(7, "SA dominance", annealing_dominance);
  report(8, "relaxation implication", relaxation_implication);
  report(9, "determinism", determinism);
  report(10, "throughput", throughput);
  std::printf("%d failed\n", failures);
  return failures == 0 ? 0 : 1;
}
