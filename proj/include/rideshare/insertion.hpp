#pragma once

#include <cstdint>
#include <vector>

#include "rideshare/partition_index.hpp"
#include "rideshare/shortest_path.hpp"
#include "rideshare/trip.hpp"

namespace rideshare {

enum class UtilityKind {
  kDistanceFirst,  // U = AD
  kGreedy,         // U = AD / rn
};

__extension__ using WideInt = __int128;

/// Exact utility value AD / riders, compared by cross-multiplication.
struct Utility {
  Meters ad = kUnreachable;
  int riders = 1;

  static Utility of(UtilityKind kind, Meters ad, int rn) {
    return {ad, kind == UtilityKind::kGreedy ? rn : 1};
  }
  bool finite() const { return reachable(ad); }
  double km() const { return static_cast<double>(ad) / 1000.0 / riders; }

  friend bool operator<(const Utility& a, const Utility& b) {
    return static_cast<WideInt>(a.ad) * b.riders < static_cast<WideInt>(b.ad) * a.riders;
  }
  friend bool operator==(const Utility& a, const Utility& b) {
    return static_cast<WideInt>(a.ad) * b.riders == static_cast<WideInt>(b.ad) * a.riders;
  }
};

struct LemmaCounters {
  std::uint64_t examined = 0;
  std::uint64_t lemma3 = 0;
  std::uint64_t lemma4 = 0;
  std::uint64_t lemma5 = 0;
  std::uint64_t lemma6 = 0;
  std::uint64_t lemma7 = 0;
  std::uint64_t lemma8 = 0;

  std::uint64_t pruned() const { return lemma3 + lemma4 + lemma5 + lemma6 + lemma7 + lemma8; }
  LemmaCounters& operator+=(const LemmaCounters& o);
  friend bool operator==(const LemmaCounters&, const LemmaCounters&) = default;
};

struct InsertionOutcome {
  bool feasible = false;
  std::size_t i = 0;
  std::size_t j = 0;
  Meters ad = kUnreachable;
  Utility utility;
  LemmaCounters counters;
};

/// Lower-bound distances from a partition index, or 0 everywhere without one.
class LowerBound {
 public:
  LowerBound() = default;
  explicit LowerBound(const PartitionIndex* index) : index_(index) {}
  Meters operator()(VertexId u, VertexId v) const {
    return index_ == nullptr ? 0 : index_->lb_vertex_vertex(u, v);
  }

 private:
  const PartitionIndex* index_ = nullptr;
};

// Position-pruning predicates. Each returns true when the insertion is
// certainly infeasible; positions follow rider_insertion (pickup after o_i,
// dropoff after o_j).
namespace lemma {
/// Every pickup at or after o_i is too late: the vehicle reaches o_i only
/// after the rider's remaining budget.
bool pickup_unreachable(const TripSchedule& tr, const Passenger& p, std::size_t i);
/// Pickup detour between o_i and o_{i+1} exceeds sd[i+1]; i < n.
bool source_detour(const TripSchedule& tr, const Passenger& p, std::size_t i, const LowerBound& lb);
/// Both stops between o_i and o_{i+1} exceed sd[i+1]; i < n.
bool joint_detour(const TripSchedule& tr, const Passenger& p, std::size_t i, const LowerBound& lb);
/// Pickup and dropoff detours together exceed the slack of stops after o_j
/// that feel both; i < j < n.
bool split_detour(const TripSchedule& tr, const Passenger& p, std::size_t i, std::size_t j,
                  const LowerBound& lb, const DistanceOracle& oracle);
/// The new rider's own ride exceeds its detour limit; i < j.
bool ride_too_long(const TripSchedule& tr, const Passenger& p, std::size_t i, std::size_t j,
                   const LowerBound& lb);
/// Not enough seats after o_k.
bool no_seats(const TripSchedule& tr, const Passenger& p, std::size_t k);
}  // namespace lemma

/// Exact feasibility of inserting p at (i, j) in O(1) from the cached prefix,
/// slack and capacity arrays.
bool insertion_feasible(const TripSchedule& tr, const Passenger& p, std::size_t i, std::size_t j,
                        const DistanceOracle& oracle);

/// Best (i, j) for p on tr. Ties keep the first position found scanning i
/// then j ascending. Without pruning every pair is checked by walking the
/// candidate schedule stop by stop.
InsertionOutcome rider_insertion(const TripSchedule& tr, const Passenger& p,
                                 const DistanceOracle& oracle, const PartitionIndex* index,
                                 UtilityKind kind, bool use_pruning);

struct InsertionChoice {
  std::size_t i = 0;
  std::size_t j = 0;
  Meters ad = 0;
};

/// Every feasible (i, j) for p, in scan order.
std::vector<InsertionChoice> feasible_insertions(const TripSchedule& tr, const Passenger& p,
                                                 const DistanceOracle& oracle);

}  // namespace rideshare
