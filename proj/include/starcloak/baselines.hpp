#ifndef STARCLOAK_BASELINES_HPP
#define STARCLOAK_BASELINES_HPP

#include <optional>
#include <vector>

#include "starcloak/engine.hpp"
#include "starcloak/query.hpp"
#include "starcloak/rng.hpp"
#include "starcloak/road_network.hpp"

namespace starcloak {

// A live query snapshot the baselines count anonymity against.
struct ActiveQuery {
  UserId user = 0;
  SegmentId segment = kInvalidSegment;
};

// Segments reachable within sigma_s star-graph hops of either terminal
// star of `seed`; always contains `seed`. Shared by both baselines and by
// the attack replays so regions and their replays agree on the region of
// candidates.
std::vector<SegmentId> sigma_ball(SegmentId seed, int sigma_s, const SegmentSet& segs,
                                  const StarSet& stars, const StarGraph& sg);

struct BaselineRegion {
  std::vector<SegmentId> segments;  // sorted
  std::size_t users_covered = 0;
};

// Random sampling baseline: the region starts from the query's
// own segment, then grows by uniform sampling without replacement from the
// sigma ball until both delta_l segments and delta_k distinct active users
// are covered. nullopt = drop (ball exhausted first).
std::optional<BaselineRegion> random_sampling_cloak(
    const Query& q, const SegmentSet& segs, const StarSet& stars, const StarGraph& sg,
    const std::vector<ActiveQuery>& active, Rng& rng);

// Network expansion baseline: deterministic incremental
// expansion in increasing network distance from the query's focal
// position to segment midpoints, ties on segment id.
std::optional<BaselineRegion> network_expansion_cloak(
    const Query& q, const RoadNetwork& net, const SegmentSet& segs,
    const StarSet& stars, const StarGraph& sg, const std::vector<ActiveQuery>& active);

// Network distance from a (segment, offset) position to the midpoint of
// `target`. Used by expansion ordering and exposed for its test oracle.
double midpoint_distance(const RoadNetwork& net, const SegmentSet& segs,
                         SegmentId from, double offset, SegmentId target);

enum class BaselineKind { kRandomSampling, kNetworkExpansion };

// Per-query anonymizer wrapper so the harness can drive baselines through
// the same interface as the engine. Queries resolve at issue time; live
// queries stay countable until expiry (no cohort teardown).
class BaselineAnonymizer : public Anonymizer {
 public:
  BaselineAnonymizer(const RoadNetwork& net, const SegmentSet& segs,
                     const StarSet& stars, const StarGraph& sg, BaselineKind kind,
                     std::uint64_t seed);

  bool submit(const RawQuery& raw, SegmentId segment, double offset) override;
  void advance(double now) override;
  const std::vector<QueryEvent>& query_events() const override { return events_; }
  const std::vector<RegionEvent>& region_events() const override { return regions_; }

  std::size_t soundness_violations() const { return soundness_violations_; }

 private:
  struct LiveQuery {
    Query q;
  };
  std::vector<ActiveQuery> active_snapshot(double now, UserId self) const;

  const RoadNetwork& net_;
  const SegmentSet& segs_;
  const StarSet& stars_;
  const StarGraph& sg_;
  BaselineKind kind_;
  Rng rng_;
  std::vector<Query> window_;  // queries with t <= now < t_exp
  std::set<QueryId> seen_;
  std::vector<Query> pending_;
  std::uint64_t next_region_ = 1;
  std::vector<QueryEvent> events_;
  std::vector<RegionEvent> regions_;
  std::size_t soundness_violations_ = 0;
};

}  // namespace starcloak

#endif
