#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "insertion_oracle.hpp"
#include "rideshare/relaxation.hpp"
#include "window_instances.hpp"

namespace rideshare {
namespace {

using testing::World;

World& world() {
  static World w(12, 12, 8, 9);
  return w;
}

// Exhaustive search at one constraint level over every driver.
testing::NaiveBest brute_force(const Fleet& fleet, const Passenger& p, std::size_t* driver) {
  testing::NaiveBest best;
  for (std::size_t d = 0; d < fleet.size(); ++d) {
    const auto o = testing::naive_insertion(fleet[d].trip, p, world().oracle, UtilityKind::kDistanceFirst);
    if (o.feasible && (!best.feasible || o.ad < best.ad)) {
      best = o;
      *driver = d;
    }
  }
  return best;
}

TEST(RelaxationPolicy, Validates) {
  EXPECT_NO_THROW(RelaxationPolicy{}.validate());
  EXPECT_THROW((RelaxationPolicy{0.5, 2.0, 4}.validate()), ValidationError);
  EXPECT_THROW((RelaxationPolicy{2.0, 0.9, 4}.validate()), ValidationError);
  EXPECT_THROW((RelaxationPolicy{2.0, 2.0, 0}.validate()), ValidationError);
  EXPECT_EQ(parse_relax_mode(relax_mode_name(RelaxMode::kIncremental)), RelaxMode::kIncremental);
  EXPECT_THROW(parse_relax_mode("always"), std::invalid_argument);
}

// Line 0-1-2-3 (4, 3, 5 m); driver at 0 already committed to carry a
// rider 0 -> 3 with no slack at all.
struct LineCase {
  RoadNetwork net = testing::line_network();
  HubLabelOracle oracle{net};
  PartitionIndex index{net, partition_network(net, 1, 0)};
  Fleet fleet;

  LineCase() {
    index.place_driver(0, 0);
    Driver d{1, TripSchedule(0, 4), 0};
    RiderRequest first{1, 0.0, 0, 3, 1, 0.0, 0.0};
    d.trip.insert(make_passenger(first, oracle, 1.0, 0.0), 0, 0, oracle);
    fleet.push_back(std::move(d));
  }
  MatchContext ctx() const { return {&net, &oracle, &index, true}; }
};

TEST(RelaxBaseline, NoRelaxationStaysInfeasible) {
  LineCase c;
  // 2 -> 1 against the flow: before the dropoff at 3 it delays the first
  // rider, after it the pickup is 17 m away.
  RiderRequest req{2, 0.0, 2, 1, 1, 10.0, 0.5};
  const WindowRider r{req, make_passenger(req, c.oracle, 1.0, 0.0)};
  const auto o = relax_baseline(c.ctx(), c.fleet, r, {1.0, 1.0, 4}, 1.0);
  EXPECT_FALSE(o.served);
}

TEST(RelaxBaseline, ServedOnlyAtTheRelaxedDetour) {
  LineCase c;
  // 1 -> 0 can only ride along to 3 and back: 0 -> 1 -> 3 -> 0 is 24 m
  // against 12, a 20 m ride on a 4 m trip, so theta must reach 4.
  RiderRequest req{2, 0.0, 1, 0, 1, 10.0, 0.0};
  const WindowRider r{req, make_passenger(req, c.oracle, 1.0, 0.0)};
  EXPECT_FALSE(relax_baseline(c.ctx(), c.fleet, r, {1.0, 1.0, 4}, 1.0).served);
  req.theta = 1.0;
  const WindowRider r2{req, make_passenger(req, c.oracle, 1.0, 0.0)};
  EXPECT_FALSE(relax_baseline(c.ctx(), c.fleet, r2, {1.0, 3.9, 4}, 1.0).served);
  const auto o = relax_baseline(c.ctx(), c.fleet, r2, {1.0, 4.0, 4}, 1.0);
  ASSERT_TRUE(o.served);
  EXPECT_EQ(o.ad, 12);
  EXPECT_EQ(o.passenger.ride_limit, 20);
  EXPECT_EQ(o.level.iteration, 4);
}

TEST(RelaxIncremental, FeasibleRiderServedAtLevelZero) {
  LineCase c;
  RiderRequest req{2, 0.0, 1, 2, 1, 100.0, 0.0};  // 1 -> 2 lies on the way
  const WindowRider r{req, make_passenger(req, c.oracle, 1.0, 0.0)};
  const auto o = relax_incremental(c.ctx(), c.fleet, r, {}, 1.0);
  ASSERT_TRUE(o.served);
  EXPECT_EQ(o.level.iteration, 0);
  EXPECT_EQ(o.passenger, r.passenger);
}

TEST(RelaxIncremental, RaisesThetaBeforeWait) {
  LineCase c;
  // theta 1.0 -> the needed 4.0 is reached at step 3 of 4 toward 5.0.
  RiderRequest req{2, 0.0, 1, 0, 1, 10.0, 1.0};
  const WindowRider r{req, make_passenger(req, c.oracle, 1.0, 0.0)};
  const auto o = relax_incremental(c.ctx(), c.fleet, r, {2.0, 5.0, 4}, 1.0);
  ASSERT_TRUE(o.served);
  EXPECT_EQ(o.level.iteration, 3);
  EXPECT_DOUBLE_EQ(o.level.theta, 4.0);
  EXPECT_DOUBLE_EQ(o.level.wait_s, 15.0);
}

TEST(RelaxIncremental, ZeroThetaOnlyRelaxesWait) {
  LineCase c;
  // The driver reaches vertex 2 after 7 m; a 5 m wait is not enough.
  RiderRequest req{2, 0.0, 2, 3, 1, 5.0, 0.0};
  const WindowRider r{req, make_passenger(req, c.oracle, 1.0, 0.0)};
  const auto o = relax_incremental(c.ctx(), c.fleet, r, {2.0, 2.0, 4}, 1.0);
  ASSERT_TRUE(o.served);
  EXPECT_DOUBLE_EQ(o.level.theta, 0.0);
  EXPECT_DOUBLE_EQ(o.level.wait_s, 7.5);
  EXPECT_EQ(o.level.iteration, 2);
}

// Incremental success implies baseline success, the baseline's choice equals
// the exhaustive search at the maximal level, and relaxing never touches the
// records of riders already scheduled.
TEST(Relaxation, ImplicationAndBruteForce) {
  std::mt19937_64 rng(41);
  const World& w = world();
  testing::RiderShape tight;
  tight.wait_lo = 20;
  tight.wait_hi = 120;
  tight.theta_lo = 0.0;
  tight.theta_hi = 0.4;
  int unserved_total = 0;
  int baseline_wins = 0;
  int incremental_wins = 0;
  for (int trial = 0; trial < 40; ++trial) {
    PartitionIndex index = w.index;
    RiderId next = 1;
    Fleet fleet = testing::random_fleet(w, index, rng, 6, 3, 4, next);
    const auto riders = testing::random_riders(w, rng, 12, next, 20.0, tight);
    const MatchContext ctx{&w.net, &w.oracle, &index, true};
    const auto res = greedy(ctx, fleet, riders);
    for (RiderId id : res.unserved) {
      const auto& r = *std::find_if(riders.begin(), riders.end(), [&](auto& x) { return x.passenger.id == id; });
      const RelaxationPolicy policy{};
      const auto base = relax_baseline(ctx, fleet, r, policy, testing::kSpeed);
      const auto inc = relax_incremental(ctx, fleet, r, policy, testing::kSpeed);
      ++unserved_total;
      EXPECT_TRUE(!inc.served || base.served);
      EXPECT_LE(inc.level.iteration, policy.steps);
      EXPECT_LE(inc.level.wait_s, base.level.wait_s);
      EXPECT_LE(inc.level.theta, base.level.theta);
      std::size_t d = 0;
      const auto brute = brute_force(fleet, base.passenger, &d);
      ASSERT_EQ(base.served, brute.feasible);
      if (base.served) {
        ++baseline_wins;
        EXPECT_EQ(base.ad, brute.ad);
        EXPECT_EQ(base.driver, d);
      }
      if (inc.served) ++incremental_wins;
    }
    // Apply in id order and compare the other riders' records.
    std::vector<std::vector<Passenger>> before;
    for (const auto& d : fleet) before.emplace_back(d.trip.passengers().begin(), d.trip.passengers().end());
    relax_unserved(RelaxMode::kIncremental, ctx, fleet, riders, res.unserved, {}, testing::kSpeed);
    for (std::size_t d = 0; d < fleet.size(); ++d) {
      for (const auto& p : before[d]) {
        const Passenger* now = fleet[d].trip.passenger(p.id);
        ASSERT_NE(now, nullptr);
        EXPECT_EQ(*now, p);
      }
      EXPECT_TRUE(check_feasible_bruteforce(fleet[d].trip, w.oracle).feasible);
    }
  }
  EXPECT_GT(unserved_total, 50);
  EXPECT_GT(baseline_wins, 0);
  EXPECT_GT(incremental_wins, 0);
}

TEST(Relaxation, UnservedProcessedInIdOrder) {
  LineCase c;
  c.fleet[0].trip = TripSchedule(0, 1);
  // Both riders need the single seat over the same stretch; the lower id
  // gets it even when listed second.
  RiderRequest a{5, 0.0, 1, 3, 1, 4.0, 0.0};
  RiderRequest b{3, 0.0, 1, 3, 1, 4.0, 0.0};
  const std::vector<WindowRider> riders{{a, make_passenger(a, c.oracle, 1.0, 0.0)},
                                        {b, make_passenger(b, c.oracle, 1.0, 0.0)}};
  const std::vector<RiderId> unserved{5, 3};
  const auto out = relax_unserved(RelaxMode::kBaseline, c.ctx(), c.fleet, riders, unserved, {}, 1.0);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].rider, 3);
  EXPECT_TRUE(out[0].served);
  EXPECT_FALSE(out[1].served);
  EXPECT_TRUE(relax_unserved(RelaxMode::kOff, c.ctx(), c.fleet, riders, unserved, {}, 1.0).empty());
}

}  // namespace
}  // namespace rideshare
