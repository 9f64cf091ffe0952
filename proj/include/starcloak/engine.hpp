#ifndef STARCLOAK_ENGINE_HPP
#define STARCLOAK_ENGINE_HPP

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "starcloak/cloaking_graph.hpp"
#include "starcloak/cost_model.hpp"
#include "starcloak/query.hpp"
#include "starcloak/rng.hpp"

namespace starcloak {

// Active segments and their star assignments. A star
// is active while it has at least one assigned segment; an assignment is
// cleared when the segment's last live query goes away.
class ActiveStarIndex {
 public:
  bool star_active(StarId s) const { return star_segments_.count(s) > 0; }
  std::optional<StarId> assignment(SegmentId seg) const;
  void assign(SegmentId seg, StarId star);
  void note_query(SegmentId seg);    // a live query appeared on seg
  void forget_query(SegmentId seg);  // a live query left seg
  std::size_t active_count() const { return star_segments_.size(); }
  const std::map<StarId, std::set<SegmentId>>& active_stars() const {
    return star_segments_;
  }

 private:
  std::map<SegmentId, StarId> seg_star_;
  std::map<SegmentId, int> seg_queries_;
  std::map<StarId, std::set<SegmentId>> star_segments_;
};

// Cost-aware star selection. Returns the star the query's segment is
// (now) assigned to, or
// nullopt when neither terminal is an intersection (unanonymizable).
std::optional<StarId> select_star(const Query& q, ActiveStarIndex& index,
                                  const SegmentSet& segs, const StarSet& stars,
                                  const StarCostCache& costs, const CostParams& params,
                                  Rng& rng);

// Candidate star-set search with the spatially bounded level rule
// layered on top.
// lambda <= 0 searches unbounded (basic mode).
class StarSetSearcher {
 public:
  StarSetSearcher(const CloakingGraph& gc, int qcomb_cap = 256)
      : gc_(gc), cap_(qcomb_cap) {}
  std::optional<CandidateStarSet> search(CNodeId start, int lambda) const;

 private:
  bool proximity_ok(const std::vector<CNodeId>& ns, int lambda) const;
  const CloakingGraph& gc_;
  int cap_;
};

struct PrunedStars {
  std::vector<StarId> stars;
  std::vector<SegmentId> segments;
};

// Randomized pruning: repeatedly removes a random non-fixed boundary star while the
// remaining stars still cover more than l_max segments; the removal that
// would violate the bound is restored and pruning stops. `choose` picks an
// index into the sorted candidate list.
PrunedStars prune_star_set(const CandidateStarSet& cand, const StarSet& stars,
                           const StarGraph& sg,
                           const std::function<std::size_t(std::size_t)>& choose);
PrunedStars prune_star_set(const CandidateStarSet& cand, const StarSet& stars,
                           const StarGraph& sg, Rng& rng);

enum class Outcome { kServed, kDropped };

struct QueryEvent {
  QueryId id = 0;
  UserId user = 0;
  double issue_t = 0.0;
  double resolve_t = 0.0;
  Outcome outcome = Outcome::kDropped;
  std::string reason;            // dropped: "expired" or "unanonymizable"
  std::uint64_t region = 0;      // serving region for kServed
  SegmentId true_segment = kInvalidSegment;
  double true_offset = 0.0;
  int knn_k = 1;
  int poi_class = -1;
  QueryProfile profile;
};

struct RegionEvent {
  std::uint64_t region_id = 0;
  double t = 0.0;
  std::vector<SegmentId> segments;
  std::vector<NodeIdx> border;
  std::vector<QueryId> cohort;
  std::vector<StarId> cohort_stars;  // assigned star per cohort entry
  int l_max = 1;
  std::size_t k_users = 0;  // cohort size (engine) / covered users (baselines)
};

struct EngineConfig {
  enum class Mode { kBasic, kBounded, kHybrid };
  Mode mode = Mode::kBasic;
  int lambda = 1;       // compactness factor, bounded/hybrid
  double alpha = 2.0;   // consideration factor, hybrid
  int qcomb_cap = 256;
  bool literal_star_count_neighbors = false;
  bool sigma_in_meters = false;  // sigma_s as network meters instead of hops
  bool integrity_checks = false;
  int prune_workers = 1;
  std::uint64_t seed = 1;
};

// Abstract anonymizer so the harness and the attack replays can drive the
// engine and the baselines through one interface.
class Anonymizer {
 public:
  virtual ~Anonymizer() = default;
  // Located query enters the system; false when rejected (duplicate).
  virtual bool submit(const RawQuery& raw, SegmentId segment, double offset) = 0;
  virtual void advance(double now) = 0;
  virtual const std::vector<QueryEvent>& query_events() const = 0;
  virtual const std::vector<RegionEvent>& region_events() const = 0;
};

class PrunePipeline;

// The anonymization engine. Single-writer: one logical thread owns the
// queue, heap, cloaking
// graph and activity index. Pruning jobs go through a FIFO pipeline that
// may run worker threads; each job owns an RNG stream derived from
// (seed, candidate seq) so worker count never changes results.
class Engine : public Anonymizer {
 public:
  Engine(const RoadNetwork& net, const SegmentSet& segs, const StarSet& stars,
         const StarGraph& sg, const StarCostCache& costs, CostParams cost_params,
         EngineConfig config);
  ~Engine() override;

  bool submit(const RawQuery& raw, SegmentId segment, double offset) override;
  void advance(double now) override;

  const std::vector<QueryEvent>& query_events() const override { return events_; }
  const std::vector<RegionEvent>& region_events() const override { return regions_; }

  std::size_t soundness_violations() const { return soundness_violations_; }
  const CloakingGraph& cloaking_graph() const { return gc_; }
  const ActiveStarIndex& activity() const { return activity_; }
  QuerySystem& intake() { return intake_; }
  bool integrity_ok() const;

 private:
  void drop(const Query& q, double resolve_t, const std::string& reason);
  void try_cloak(CNodeId node, double now, bool force_basic);
  void flush_regions(double now);
  int search_lambda(bool force_basic) const;

  const RoadNetwork& net_;
  const SegmentSet& segs_;
  const StarSet& stars_;
  const StarGraph& sg_;
  const StarCostCache& costs_;
  CostParams cost_params_;
  EngineConfig config_;

  QuerySystem intake_;
  CloakingGraph gc_;
  ActiveStarIndex activity_;
  StarSetSearcher searcher_;
  Rng rng_;

  std::unique_ptr<PrunePipeline> prunes_;
  std::uint64_t next_seq_ = 1;
  std::set<QueryId> rescued_;  // hybrid: queries whose alpha rescue fired

  std::vector<QueryEvent> events_;
  std::vector<RegionEvent> regions_;
  std::size_t soundness_violations_ = 0;
};

}  // namespace starcloak

#endif
