#include "rideshare/insertion.hpp"

#include <algorithm>

namespace rideshare {

LemmaCounters& LemmaCounters::operator+=(const LemmaCounters& o) {
  examined += o.examined;
  lemma3 += o.lemma3;
  lemma4 += o.lemma4;
  lemma5 += o.lemma5;
  lemma6 += o.lemma6;
  lemma7 += o.lemma7;
  lemma8 += o.lemma8;
  return *this;
}

namespace {

// a + b - leg, or kUnreachable.
Meters detour(Meters a, Meters b, Meters leg) {
  if (!reachable(a) || !reachable(b)) return kUnreachable;
  return a + b - leg;
}

// Pairs (i', j) with i <= i' <= j <= n.
std::uint64_t pairs_from(std::size_t i, std::size_t n) {
  const std::uint64_t m = n - i + 1;
  return m * (m + 1) / 2;
}

// Exact test of a pair once the true distances around it are known. The
// pickup budget and seat counts are checked by the caller.
//   dis_is = dis(o_i, ls), dis_s1 = dis(ls, o_{i+1})   (i < n)
//   dis_jd = dis(o_j, ld), dis_d1 = dis(ld, o_{j+1})   (j < n)
// Returns the additional distance, or kUnreachable when infeasible.
Meters exact_pair(const TripSchedule& tr, const Passenger& p, std::size_t i, std::size_t j,
                  Meters dis_is, Meters dis_s1, Meters dis_jd, Meters dis_d1) {
  const std::size_t n = tr.size();
  if (!reachable(p.direct)) return kUnreachable;
  if (i == j) {
    if (p.direct > p.ride_limit) return kUnreachable;
    if (i == n) return add_distance(dis_is, p.direct);
    const Meters e = detour(add_distance(dis_is, p.direct), dis_d1, tr.leg(i + 1));
    return reachable(e) && e <= tr.slack(i + 1) ? e : kUnreachable;
  }
  const Meters ds = detour(dis_is, dis_s1, tr.leg(i + 1));
  if (!reachable(ds) || ds > tr.slack(i + 1)) return kUnreachable;
  const Meters ride = add_distance(add_distance(dis_s1, tr.prefix(j) - tr.prefix(i + 1)), dis_jd);
  if (!reachable(ride) || ride > p.ride_limit) return kUnreachable;
  if (j == n) return add_distance(ds, dis_jd);
  const Meters dd = detour(dis_jd, dis_d1, tr.leg(j + 1));
  if (!reachable(dd) || dd > tr.slack(j + 1) || ds + dd > tr.pair_slack(i, j + 1)) return kUnreachable;
  return ds + dd;
}

void consider(InsertionOutcome& best, UtilityKind kind, const Passenger& p, std::size_t i,
              std::size_t j, Meters ad) {
  if (!reachable(ad)) return;
  const Utility u = Utility::of(kind, ad, p.riders);
  if (!best.feasible || u < best.utility) {
    best.feasible = true;
    best.i = i;
    best.j = j;
    best.ad = ad;
    best.utility = u;
  }
}

InsertionOutcome pruned_insertion(const TripSchedule& tr, const Passenger& p,
                                  const DistanceOracle& oracle, const LowerBound& lb,
                                  UtilityKind kind) {
  InsertionOutcome best;
  LemmaCounters& c = best.counters;
  const std::size_t n = tr.size();
  const Meters budget = tr.wait_budget(p);

  for (std::size_t i = 0; i <= n; ++i) {
    const std::uint64_t row = n - i + 1;
    if (lemma::pickup_unreachable(tr, p, i)) {
      c.lemma3 += pairs_from(i, n);
      break;
    }
    if (lemma::no_seats(tr, p, i)) {
      c.lemma8 += row;
      continue;
    }
    // The lower bound first, then the true pickup distance.
    if (add_distance(tr.prefix(i), lb(tr.vertex(i), p.source)) > budget) {
      c.lemma3 += row;
      continue;
    }
    const Meters dis_is = oracle.distance(tr.vertex(i), p.source);
    if (add_distance(tr.prefix(i), dis_is) > budget) {
      c.lemma3 += row;
      continue;
    }
    Meters dis_s1 = kUnreachable;
    if (i < n) {
      if (lemma::source_detour(tr, p, i, lb)) {
        c.lemma4 += row;
        continue;
      }
      dis_s1 = oracle.distance(p.source, tr.vertex(i + 1));
      const Meters ds = detour(dis_is, dis_s1, tr.leg(i + 1));
      if (!reachable(ds) || ds > tr.slack(i + 1)) {
        c.lemma4 += row;
        continue;
      }
    }

    for (std::size_t j = i; j <= n; ++j) {
      if (j > i && lemma::no_seats(tr, p, j)) {
        c.lemma8 += n - j + 1;
        break;
      }
      if (j == i && i < n && lemma::joint_detour(tr, p, i, lb)) {
        ++c.lemma5;
        continue;
      }
      if (j > i) {
        if (lemma::ride_too_long(tr, p, i, j, lb)) {
          ++c.lemma7;
          continue;
        }
        if (j < n && lemma::split_detour(tr, p, i, j, lb, oracle)) {
          ++c.lemma6;
          continue;
        }
      }
      ++c.examined;
      const Meters dis_jd = j == i ? kUnreachable : oracle.distance(tr.vertex(j), p.destination);
      const Meters dis_d1 = j < n ? oracle.distance(p.destination, tr.vertex(j + 1)) : kUnreachable;
      consider(best, kind, p, i, j, exact_pair(tr, p, i, j, dis_is, dis_s1, dis_jd, dis_d1));
    }
  }
  return best;
}

// Straight walk over the candidate schedule; reads only legs and passenger
// records.
class CandidateWalker {
 public:
  CandidateWalker(const TripSchedule& tr, const Passenger& p, const DistanceOracle& oracle)
      : tr_(tr), p_(p), n_(tr.size()) {
    to_src_.resize(n_ + 1);
    to_dst_.resize(n_ + 1);
    for (std::size_t k = 0; k <= n_; ++k) {
      to_src_[k] = oracle.distance(tr.vertex(k), p.source);
      to_dst_[k] = oracle.distance(tr.vertex(k), p.destination);
    }
    riders_.resize(n_ + 1, nullptr);
    partner_.assign(n_ + 1, 0);
    for (std::size_t k = 1; k <= n_; ++k) {
      const Stop& s = tr.stop(k);
      riders_[k] = tr.passenger(s.rider);
      if (s.kind == StopKind::kDropoff && !riders_[k]->onboard) {
        for (std::size_t x = 1; x < k; ++x) {
          if (tr.stop(x).rider == s.rider) partner_[k] = x;
        }
      }
    }
    for (const auto& q : tr.passengers()) {
      if (q.onboard) onboard_ += q.riders;
    }
    arrive_.resize(n_ + 1);
  }

  // New trip distance, or kUnreachable if any constraint breaks.
  Meters walk(std::size_t i, std::size_t j) {
    int load = onboard_;
    if (load > tr_.capacity()) return kUnreachable;
    Meters t = 0;
    Meters picked = 0;
    int last = 0;  // 0: o_k, 1: new pickup, 2: new dropoff
    for (std::size_t k = 0; k <= n_; ++k) {
      if (k > 0) {
        t = add_distance(t, last == 0 ? tr_.leg(k) : last == 1 ? to_src_[k] : to_dst_[k]);
        last = 0;
        if (!reachable(t)) return kUnreachable;
        arrive_[k] = t;
        const Stop& s = tr_.stop(k);
        const Passenger& q = *riders_[k];
        if (s.kind == StopKind::kPickup) {
          if (q.consumed + t > q.wait_limit) return kUnreachable;
          load += s.riders;
          if (load > tr_.capacity()) return kUnreachable;
        } else {
          const Meters ride = q.onboard ? q.consumed + t : t - arrive_[partner_[k]];
          if (ride > q.ride_limit) return kUnreachable;
          load -= s.riders;
        }
      }
      if (k == i) {
        t = add_distance(t, to_src_[k]);
        if (!reachable(t) || p_.consumed + tr_.lag() + t > p_.wait_limit) return kUnreachable;
        picked = t;
        load += p_.riders;
        if (load > tr_.capacity()) return kUnreachable;
        last = 1;
      }
      if (k == j) {
        t = add_distance(t, i == j ? p_.direct : to_dst_[k]);
        if (!reachable(t) || t - picked > p_.ride_limit) return kUnreachable;
        load -= p_.riders;
        last = 2;
      }
    }
    return t;
  }

 private:
  const TripSchedule& tr_;
  const Passenger& p_;
  std::size_t n_;
  std::vector<Meters> to_src_;
  std::vector<Meters> to_dst_;
  std::vector<const Passenger*> riders_;
  std::vector<std::size_t> partner_;
  std::vector<Meters> arrive_;
  int onboard_ = 0;
};

InsertionOutcome unpruned_insertion(const TripSchedule& tr, const Passenger& p,
                                    const DistanceOracle& oracle, UtilityKind kind) {
  InsertionOutcome best;
  const std::size_t n = tr.size();
  CandidateWalker walker(tr, p, oracle);
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = i; j <= n; ++j) {
      ++best.counters.examined;
      const Meters total = walker.walk(i, j);
      if (reachable(total)) consider(best, kind, p, i, j, total - tr.total_distance());
    }
  }
  return best;
}

}  // namespace

namespace lemma {

bool pickup_unreachable(const TripSchedule& tr, const Passenger& p, std::size_t i) {
  return tr.prefix(i) > tr.wait_budget(p);
}

bool source_detour(const TripSchedule& tr, const Passenger& p, std::size_t i, const LowerBound& lb) {
  if (i >= tr.size()) return false;
  const Meters d = detour(lb(tr.vertex(i), p.source), lb(p.source, tr.vertex(i + 1)), tr.leg(i + 1));
  return d > tr.slack(i + 1);
}

bool joint_detour(const TripSchedule& tr, const Passenger& p, std::size_t i, const LowerBound& lb) {
  if (i >= tr.size()) return false;
  const Meters d = detour(add_distance(lb(tr.vertex(i), p.source), p.direct),
                          lb(p.destination, tr.vertex(i + 1)), tr.leg(i + 1));
  return d > tr.slack(i + 1);
}

bool split_detour(const TripSchedule& tr, const Passenger& p, std::size_t i, std::size_t j,
                  const LowerBound& lb, const DistanceOracle& oracle) {
  if (i >= j || j >= tr.size()) return false;
  const Meters ds = delta_d(oracle, tr.vertex(i), p.source, tr.vertex(i + 1));
  if (!reachable(ds)) return true;
  const Meters dd = detour(lb(tr.vertex(j), p.destination), lb(p.destination, tr.vertex(j + 1)),
                           tr.leg(j + 1));
  return add_distance(ds, dd) > tr.pair_slack(i, j + 1);
}

bool ride_too_long(const TripSchedule& tr, const Passenger& p, std::size_t i, std::size_t j,
                   const LowerBound& lb) {
  if (i >= j) return false;
  const Meters ride = add_distance(add_distance(lb(p.source, tr.vertex(i + 1)), tr.partial_distance(i + 1, j)),
                                   lb(tr.vertex(j), p.destination));
  return ride > p.ride_limit;
}

bool no_seats(const TripSchedule& tr, const Passenger& p, std::size_t k) {
  return tr.cp(k) < p.riders;
}

}  // namespace lemma

bool insertion_feasible(const TripSchedule& tr, const Passenger& p, std::size_t i, std::size_t j,
                        const DistanceOracle& oracle) {
  const std::size_t n = tr.size();
  if (i > j || j > n) return false;
  for (std::size_t k = i; k <= j; ++k) {
    if (tr.cp(k) < p.riders) return false;
  }
  const Meters dis_is = oracle.distance(tr.vertex(i), p.source);
  if (add_distance(tr.prefix(i), dis_is) > tr.wait_budget(p)) return false;
  const Meters dis_s1 = i < n ? oracle.distance(p.source, tr.vertex(i + 1)) : kUnreachable;
  const Meters dis_jd = i < j ? oracle.distance(tr.vertex(j), p.destination) : kUnreachable;
  const Meters dis_d1 = j < n ? oracle.distance(p.destination, tr.vertex(j + 1)) : kUnreachable;
  return reachable(exact_pair(tr, p, i, j, dis_is, dis_s1, dis_jd, dis_d1));
}

InsertionOutcome rider_insertion(const TripSchedule& tr, const Passenger& p,
                                 const DistanceOracle& oracle, const PartitionIndex* index,
                                 UtilityKind kind, bool use_pruning) {
  if (use_pruning) return pruned_insertion(tr, p, oracle, LowerBound(index), kind);
  return unpruned_insertion(tr, p, oracle, kind);
}

std::vector<InsertionChoice> feasible_insertions(const TripSchedule& tr, const Passenger& p,
                                                 const DistanceOracle& oracle) {
  std::vector<InsertionChoice> out;
  for (std::size_t i = 0; i <= tr.size(); ++i) {
    for (std::size_t j = i; j <= tr.size(); ++j) {
      if (insertion_feasible(tr, p, i, j, oracle)) {
        out.push_back({i, j, additional_distance(tr, p, i, j, oracle)});
      }
    }
  }
  return out;
}

}  // namespace rideshare
