#ifndef STARCLOAK_ATTACK_HPP
#define STARCLOAK_ATTACK_HPP

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "starcloak/baselines.hpp"
#include "starcloak/engine.hpp"
#include "starcloak/simulation.hpp"

namespace starcloak {

// A replayable anonymization handle. The adversary re-runs the algorithm
// with the victim hypothesized on a segment; placement-aware algorithms
// also condition on a hypothesized placement of the k-1 co-users.
class ReplayCloaker {
 public:
  virtual ~ReplayCloaker() = default;
  // Region the algorithm would output for the victim, empty on failure.
  virtual std::vector<SegmentId> replay(SegmentId victim_seg,
                                        std::span<const SegmentId> placement,
                                        Rng& rng) = 0;
  // Placement-blind algorithms (the baselines) ignore co-user locations,
  // so query injection cannot move their likelihoods.
  virtual bool placement_aware() const = 0;
};

struct AttackKnowledge {
  std::vector<double> segment_prior;  // per segment of S; empty = uniform
  int cohort_k = 1;                   // k assumed by the adversary
  int replays = 32;                   // R per (victim, placement)
  std::uint64_t budget = 100000;      // B: exact-enumeration bound / MC samples
  bool force_monte_carlo = false;
  std::vector<SegmentId> injected;    // injected queries' true segments
  // Deterministic-adversary scoring: exact reproduction instead of the
  // overlap ratio. Off by default.
  bool exact_match_replay = false;
  std::uint64_t seed = 7;
};

struct Placement {
  std::vector<SegmentId> segs;  // sorted multiset
  double weight = 1.0;          // product of per-segment priors
};

// All multisets of size k_minus_1 over S with product-of-prior weights.
std::vector<Placement> enumerate_placements(std::span<const SegmentId> S,
                                            std::span<const double> prior,
                                            int k_minus_1);

// Query-injection filter: placements that do not contain every injected
// segment (with multiplicity) get zero weight.
std::vector<Placement> apply_injection(std::vector<Placement> placements,
                                       const std::vector<SegmentId>& injected);

// Replay likelihood: mean over R replays of |S' cap S| / |S|.
double replay_likelihood(std::span<const SegmentId> S, SegmentId s,
                         std::span<const SegmentId> placement, ReplayCloaker& cloaker,
                         const AttackKnowledge& kn, Rng& rng);

// like^c per segment of S: the placement-weighted replay likelihood, exact
// when the multiset count fits the budget, importance-sampled otherwise.
std::vector<double> correlation_likelihoods(std::span<const SegmentId> S,
                                            ReplayCloaker& cloaker,
                                            const AttackKnowledge& kn);

struct LinkabilityProfile {
  std::vector<double> link;  // aligned with S, sums to 1
  double entropy = 0.0;
  double normalized_entropy = 0.0;
};

// Linkability normalization; an all-zero likelihood vector degrades to the
// uniform profile (the adversary learned nothing).
LinkabilityProfile linkability(std::span<const SegmentId> S, ReplayCloaker& cloaker,
                               const AttackKnowledge& kn);

// H(S) and H(S)/log2(|S|); the normalized value is 0 for |S| = 1.
std::pair<double, double> entropy_of(std::span<const double> link);

// --- Replay handles -------------------------------------------------------

struct ReplayContext {
  const RoadNetwork& net;
  const SegmentSet& segs;
  const StarSet& stars;
  const StarGraph& sg;
  const StarCostCache& costs;
  CostParams cost_params;
  EngineConfig engine_cfg;
};

struct CohortMember {
  QueryId id = 0;
  UserId user = 0;
  double t = 0.0;
  SegmentId true_segment = kInvalidSegment;
  int knn_k = 1;
  QueryProfile profile;
};

// Re-runs a miniature engine over the serving cohort with the victim and
// co-users at hypothesized segments (each replay seeded independently).
class EngineReplayCloaker : public ReplayCloaker {
 public:
  EngineReplayCloaker(ReplayContext ctx, std::vector<CohortMember> cohort,
                      std::size_t victim_index);
  std::vector<SegmentId> replay(SegmentId victim_seg,
                                std::span<const SegmentId> placement,
                                Rng& rng) override;
  bool placement_aware() const override { return true; }

 private:
  ReplayContext ctx_;
  std::vector<CohortMember> cohort_;
  std::size_t victim_idx_;
};

// Re-runs a baseline with the public trace (live queries at cloak time)
// minus the victim, the victim re-injected at the hypothesis segment.
class BaselineReplayCloaker : public ReplayCloaker {
 public:
  BaselineReplayCloaker(const RoadNetwork& net, const SegmentSet& segs,
                        const StarSet& stars, const StarGraph& sg, BaselineKind kind,
                        CohortMember victim, std::vector<ActiveQuery> others);
  std::vector<SegmentId> replay(SegmentId victim_seg,
                                std::span<const SegmentId> placement,
                                Rng& rng) override;
  bool placement_aware() const override { return false; }

 private:
  const RoadNetwork& net_;
  const SegmentSet& segs_;
  const StarSet& stars_;
  const StarGraph& sg_;
  BaselineKind kind_;
  CohortMember victim_;
  std::vector<ActiveQuery> others_;
};

// Builds the replay handle for one logged region. `algorithm` is one of
// basic|bounded|hybrid|random|expansion; the victim is the cohort member
// at `victim_index`.
std::unique_ptr<ReplayCloaker> make_replay_cloaker(
    const std::string& algorithm, const ReplayContext& ctx, const RegionEvent& region,
    const std::vector<QueryEvent>& events, std::size_t victim_index = 0);

struct RegionAttackRow {
  std::uint64_t region_id = 0;
  std::string algorithm;
  std::size_t size = 0;
  int k = 1;
  int injections = 0;
  double entropy = 0.0;
  double normalized_entropy = 0.0;
  double max_linkability = 0.0;
};

std::string attack_report_csv(const std::vector<RegionAttackRow>& rows);

}  // namespace starcloak

#endif
