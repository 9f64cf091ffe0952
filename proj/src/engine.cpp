#include "starcloak/engine.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

namespace starcloak {

std::optional<StarId> ActiveStarIndex::assignment(SegmentId seg) const {
  auto it = seg_star_.find(seg);
  if (it == seg_star_.end()) return std::nullopt;
  return it->second;
}

void ActiveStarIndex::assign(SegmentId seg, StarId star) {
  seg_star_[seg] = star;
  star_segments_[star].insert(seg);
}

void ActiveStarIndex::note_query(SegmentId seg) { seg_queries_[seg] += 1; }

void ActiveStarIndex::forget_query(SegmentId seg) {
  auto it = seg_queries_.find(seg);
  if (it == seg_queries_.end()) return;
  if (--it->second > 0) return;
  seg_queries_.erase(it);
  auto ait = seg_star_.find(seg);
  if (ait == seg_star_.end()) return;
  StarId star = ait->second;
  seg_star_.erase(ait);
  auto sit = star_segments_.find(star);
  if (sit != star_segments_.end()) {
    sit->second.erase(seg);
    if (sit->second.empty()) star_segments_.erase(sit);
  }
}

std::optional<StarId> select_star(const Query& q, ActiveStarIndex& index,
                                  const SegmentSet& segs, const StarSet& stars,
                                  const StarCostCache& costs, const CostParams& params,
                                  Rng& rng) {
  SegmentId sid = q.segment;
  if (auto assigned = index.assignment(sid)) return *assigned;

  const Segment& seg = segs[sid];
  StarId phi_a = stars.star_at(seg.v0());
  StarId phi_b = stars.star_at(seg.vL());
  if (phi_a == kInvalidStar && phi_b == kInvalidStar) return std::nullopt;

  // Dead-end segment: the intersection end is the only choice.
  if (phi_a == kInvalidStar || phi_b == kInvalidStar || phi_a == phi_b) {
    StarId only = phi_a != kInvalidStar ? phi_a : phi_b;
    index.assign(sid, only);
    return only;
  }

  bool act_a = index.star_active(phi_a);
  bool act_b = index.star_active(phi_b);
  StarId chosen;
  if (act_a != act_b) {
    chosen = act_a ? phi_a : phi_b;
  } else {
    // Both-active and neither-active use the same probabilistic pick:
    // P(a) = cost(b) / (cost(a) + cost(b)).
    double ca = costs.star_cost(params, q.knn_k, phi_a);
    double cb = costs.star_cost(params, q.knn_k, phi_b);
    double p = (ca + cb) > 0 ? cb / (ca + cb) : 0.5;
    chosen = rng.uniform() < p ? phi_a : phi_b;
  }
  index.assign(sid, chosen);
  return chosen;
}

bool StarSetSearcher::proximity_ok(const std::vector<CNodeId>& ns, int lambda) const {
  if (lambda <= 0) return true;
  std::vector<StarId> fs;
  for (CNodeId id : ns) fs.push_back(gc_.node(id).star);
  std::sort(fs.begin(), fs.end());
  fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
  if (fs.size() <= 1) return true;
  const int bound = 2 * lambda - 1;
  const StarGraph& sg = gc_.star_graph();
  for (StarId a : fs) {
    bool close = false;
    for (StarId b : fs) {
      if (a == b) continue;
      if (sg.hop_distance(a, b, bound) >= 0) {
        close = true;
        break;
      }
    }
    if (!close) return false;
  }
  return true;
}

std::optional<CandidateStarSet> StarSetSearcher::search(CNodeId start,
                                                        int lambda) const {
  const CloakingNode& vu = gc_.node(start);

  if (auto cand = gc_.check_reqs({start})) return cand;

  // Neighbors ordered by star hop distance then node creation sequence.
  // Levels of the bounded variant are floor(d / lambda); that grouping is
  // monotone in d, so one distance sort serves both modes.
  std::vector<int> dist = gc_.star_graph().distances_from(vu.star, vu.sigma_s);
  std::vector<std::pair<int, CNodeId>> order;
  for (CNodeId nb : vu.neighbors) {
    int d = dist[gc_.node(nb).star];
    if (d < 0) continue;
    order.emplace_back(d, nb);
  }
  std::sort(order.begin(), order.end());

  // Cliques over visited neighbors, stamped with the level of the visit
  // that created them. Bounded search walks level by level: a level-l
  // node only combines with cliques generated at level l-1 or l, so
  // combinations grow outward without skipping a level.
  struct Clique {
    std::vector<CNodeId> members;
    int level;
  };
  std::deque<Clique> qcomb;
  auto remember = [&](std::vector<CNodeId> clique, int level) {
    qcomb.push_back({std::move(clique), level});
    if (qcomb.size() > static_cast<std::size_t>(cap_)) qcomb.pop_front();
  };

  for (const auto& [d, nbid] : order) {
    const CloakingNode& v = gc_.node(nbid);
    const int level = lambda > 0 ? d / lambda : 0;

    std::vector<CNodeId> ns{start, nbid};
    if (auto cand = gc_.check_reqs(ns); cand && proximity_ok(ns, lambda))
      return cand;

    std::vector<std::vector<CNodeId>> grown;
    grown.push_back({nbid});
    for (const auto& clique : qcomb) {
      if (lambda > 0 && clique.level < level - 1) continue;
      bool compatible =
          std::all_of(clique.members.begin(), clique.members.end(),
                      [&](CNodeId c) { return v.neighbors.count(c) > 0; });
      if (!compatible) continue;
      std::vector<CNodeId> trial{start, nbid};
      trial.insert(trial.end(), clique.members.begin(), clique.members.end());
      if (auto cand = gc_.check_reqs(trial); cand && proximity_ok(trial, lambda))
        return cand;
      std::vector<CNodeId> stored = clique.members;
      stored.push_back(nbid);
      grown.push_back(std::move(stored));
    }
    for (auto& g : grown) remember(std::move(g), level);
  }
  return std::nullopt;
}

PrunedStars prune_star_set(const CandidateStarSet& cand, const StarSet& stars,
                           const StarGraph& sg,
                           const std::function<std::size_t(std::size_t)>& choose) {
  std::set<StarId> theta(cand.stars.begin(), cand.stars.end());
  const std::set<StarId> fixed(cand.fixed.begin(), cand.fixed.end());
  const auto l_max = static_cast<std::size_t>(cand.l_max);

  // Boundary stars: members with a star-graph neighbor outside theta.
  // Fixed stars never enter the list (they host serving queries).
  auto boundary = [&]() {
    std::vector<StarId> bs;
    for (StarId s : theta) {
      if (fixed.count(s)) continue;
      for (StarId nb : sg.neighbors(s)) {
        if (!theta.count(nb)) {
          bs.push_back(s);
          break;
        }
      }
    }
    return bs;  // ascending, set order
  };

  for (;;) {
    std::vector<StarId> bs = boundary();
    if (bs.empty()) break;
    StarId pick = bs[choose(bs.size())];
    std::vector<StarId> rest;
    for (StarId s : theta)
      if (s != pick) rest.push_back(s);
    if (stars.count_segments(rest) > l_max) {
      theta.erase(pick);
    } else {
      // Removal would violate the segment requirement: restore and stop.
      break;
    }
  }

  PrunedStars out;
  out.stars.assign(theta.begin(), theta.end());
  out.segments = stars.segment_union(out.stars);
  return out;
}

PrunedStars prune_star_set(const CandidateStarSet& cand, const StarSet& stars,
                           const StarGraph& sg, Rng& rng) {
  return prune_star_set(cand, stars, sg,
                        [&rng](std::size_t n) { return rng.below(n); });
}

// ---------------------------------------------------------------------------
// Pruning pipeline

namespace {
constexpr std::uint64_t kEngineTag = 0x656e67696e65ULL;  // "engine"
constexpr std::uint64_t kPruneTag = 0x7072756e65ULL;     // "prune"
}  // namespace

struct PruneJob {
  CandidateStarSet cand;
  std::vector<Query> cohort;
  std::vector<StarId> cohort_stars;
};

struct PruneResult {
  PruneJob job;
  PrunedStars pruned;
};

// FIFO job queue with optional worker threads. Each job prunes under its
// own (seed, seq) RNG stream, so results are identical for any worker
// count; drain() hands them back in seq order.
class PrunePipeline {
 public:
  PrunePipeline(const StarSet& stars, const StarGraph& sg, std::uint64_t seed,
                int workers)
      : stars_(stars), sg_(sg), seed_(seed) {
    if (workers > 1) {
      for (int i = 0; i < workers; ++i)
        threads_.emplace_back([this] { worker_loop(); });
    }
  }

  ~PrunePipeline() {
    {
      std::lock_guard<std::mutex> lk(mu_);
      stop_ = true;
    }
    cv_work_.notify_all();
    for (auto& t : threads_) t.join();
  }

  void enqueue(PruneJob job) {
    if (threads_.empty()) {
      done_.emplace(job.cand.seq, run(std::move(job)));
      return;
    }
    {
      std::lock_guard<std::mutex> lk(mu_);
      pending_.push_back(std::move(job));
      ++in_flight_;
    }
    cv_work_.notify_one();
  }

  std::vector<PruneResult> drain() {
    if (!threads_.empty()) {
      std::unique_lock<std::mutex> lk(mu_);
      cv_done_.wait(lk, [this] { return in_flight_ == 0 && pending_.empty(); });
    }
    std::vector<PruneResult> out;
    for (auto& [seq, res] : done_) out.push_back(std::move(res));
    done_.clear();
    return out;
  }

 private:
  PruneResult run(PruneJob job) {
    Rng rng = Rng::seeded(seed_, kPruneTag ^ (job.cand.seq * 0x9e3779b97f4a7c15ULL));
    PruneResult res;
    res.pruned = prune_star_set(job.cand, stars_, sg_, rng);
    res.job = std::move(job);
    return res;
  }

  void worker_loop() {
    for (;;) {
      PruneJob job;
      {
        std::unique_lock<std::mutex> lk(mu_);
        cv_work_.wait(lk, [this] { return stop_ || !pending_.empty(); });
        if (pending_.empty()) {
          if (stop_) return;
          continue;
        }
        job = std::move(pending_.front());
        pending_.pop_front();
      }
      PruneResult res = run(std::move(job));
      {
        std::lock_guard<std::mutex> lk(mu_);
        done_.emplace(res.job.cand.seq, std::move(res));
        --in_flight_;
      }
      cv_done_.notify_all();
    }
  }

  const StarSet& stars_;
  const StarGraph& sg_;
  std::uint64_t seed_;

  std::map<std::uint64_t, PruneResult> done_;
  std::mutex mu_;
  std::condition_variable cv_work_, cv_done_;
  std::deque<PruneJob> pending_;
  std::size_t in_flight_ = 0;
  bool stop_ = false;
  std::vector<std::thread> threads_;
};

// ---------------------------------------------------------------------------
// Engine

Engine::Engine(const RoadNetwork& net, const SegmentSet& segs, const StarSet& stars,
               const StarGraph& sg, const StarCostCache& costs, CostParams cost_params,
               EngineConfig config)
    : net_(net),
      segs_(segs),
      stars_(stars),
      sg_(sg),
      costs_(costs),
      cost_params_(cost_params),
      config_(config),
      gc_(stars, sg, config.literal_star_count_neighbors, config.sigma_in_meters,
          &segs),
      searcher_(gc_, config.qcomb_cap),
      rng_(Rng::seeded(config.seed, kEngineTag)),
      prunes_(std::make_unique<PrunePipeline>(stars, sg, config.seed,
                                              config.prune_workers)) {}

Engine::~Engine() = default;

bool Engine::submit(const RawQuery& raw, SegmentId segment, double offset) {
  try {
    intake_.submit_located(raw, segment, offset);
    return true;
  } catch (const DataError&) {
    return false;  // duplicate (user, time)
  }
}

void Engine::drop(const Query& q, double resolve_t, const std::string& reason) {
  QueryEvent ev;
  ev.id = q.id;
  ev.user = q.user;
  ev.issue_t = q.t;
  ev.resolve_t = resolve_t;
  ev.outcome = Outcome::kDropped;
  ev.reason = reason;
  ev.true_segment = q.segment;
  ev.true_offset = q.offset;
  ev.knn_k = q.knn_k;
  ev.poi_class = q.poi_class;
  ev.profile = q.profile;
  events_.push_back(std::move(ev));
}

int Engine::search_lambda(bool force_basic) const {
  if (force_basic || config_.mode == EngineConfig::Mode::kBasic) return 0;
  return config_.lambda;
}

void Engine::try_cloak(CNodeId node, double /*now*/, bool force_basic) {
  auto cand = searcher_.search(node, search_lambda(force_basic));
  if (!cand) return;
  cand->seq = next_seq_++;

  PruneJob job;
  for (QueryId qid : cand->queries) {
    job.cohort.push_back(gc_.housed_query(qid));
    job.cohort_stars.push_back(gc_.node(gc_.node_of(qid)).star);
  }
  // Serving teardown: cohort queries leave the graph, queue, heap and
  // activity accounting before any further search can see them.
  for (const Query& q : job.cohort) {
    gc_.remove_query(q.id);
    activity_.forget_query(q.segment);
    intake_.erase(q.id);
    rescued_.erase(q.id);
  }
  job.cand = std::move(*cand);
  prunes_->enqueue(std::move(job));
}

void Engine::flush_regions(double now) {
  for (PruneResult& res : prunes_->drain()) {
    RegionEvent region;
    region.region_id = res.job.cand.seq;
    region.t = now;
    region.segments = res.pruned.segments;
    region.border = border_nodes(net_, segs_, region.segments);
    region.l_max = res.job.cand.l_max;
    region.cohort_stars = res.job.cohort_stars;
    region.k_users = res.job.cohort.size();

    // Privacy soundness: (a) cohort covers every delta_k, (b) segment
    // count covers every delta_l, (c) stars within sigma_s of each
    // query's assigned star, (d) emitted before expiry.
    const std::size_t cohort_n = res.job.cohort.size();
    for (std::size_t i = 0; i < cohort_n; ++i) {
      const Query& q = res.job.cohort[i];
      region.cohort.push_back(q.id);
      bool ok = cohort_n >= static_cast<std::size_t>(q.profile.delta_k) &&
                region.segments.size() >= static_cast<std::size_t>(q.profile.delta_l) &&
                now <= q.t_exp;
      if (ok) {
        std::vector<int> dist =
            sg_.distances_from(res.job.cohort_stars[i], q.profile.sigma_s);
        for (StarId s : res.pruned.stars) {
          if (dist[s] < 0) {
            ok = false;
            break;
          }
        }
      }
      if (!ok) ++soundness_violations_;

      QueryEvent ev;
      ev.id = q.id;
      ev.user = q.user;
      ev.issue_t = q.t;
      ev.resolve_t = now;
      ev.outcome = Outcome::kServed;
      ev.region = region.region_id;
      ev.true_segment = q.segment;
      ev.true_offset = q.offset;
      ev.knn_k = q.knn_k;
      ev.poi_class = q.poi_class;
      ev.profile = q.profile;
      events_.push_back(std::move(ev));
    }
    regions_.push_back(std::move(region));
  }
}

void Engine::advance(double now) {
  // Expired queries leave first; their nodes may free up survivors
  // and get re-searched first.
  std::vector<Query> expired = intake_.pop_expired(now);
  std::vector<CNodeId> updated;
  for (const Query& qe : expired) {
    if (gc_.has_query(qe.id)) {
      auto vu = gc_.remove_query(qe.id);
      activity_.forget_query(qe.segment);
      if (vu) updated.push_back(*vu);
    }
    rescued_.erase(qe.id);
    drop(qe, qe.t_exp, "expired");
  }
  std::vector<CNodeId> uniq;
  for (CNodeId v : updated)
    if (std::find(uniq.begin(), uniq.end(), v) == uniq.end()) uniq.push_back(v);
  for (CNodeId v : uniq)
    if (gc_.node_exists(v)) try_cloak(v, now, false);

  // Hybrid consideration sweep: once a query first comes within alpha of
  // expiry, its node retries with unbounded search.
  if (config_.mode == EngineConfig::Mode::kHybrid) {
    std::vector<CNodeId> urgent;
    for (QueryId qid : intake_.expiring_within(now, config_.alpha)) {
      if (!gc_.has_query(qid)) continue;
      if (!rescued_.insert(qid).second) continue;
      CNodeId v = gc_.node_of(qid);
      if (std::find(urgent.begin(), urgent.end(), v) == urgent.end())
        urgent.push_back(v);
    }
    std::sort(urgent.begin(), urgent.end());
    for (CNodeId v : urgent)
      if (gc_.node_exists(v)) try_cloak(v, now, true);
  }

  // New queries.
  while (const Query* qp = intake_.pop_next()) {
    Query q = *qp;
    auto star = select_star(q, activity_, segs_, stars_, costs_, cost_params_, rng_);
    if (!star) {
      intake_.erase(q.id);
      drop(q, now, "unanonymizable");
      continue;
    }
    activity_.note_query(q.segment);
    CNodeId vu = gc_.add_query(q, *star);
    try_cloak(vu, now, false);
  }

  flush_regions(now);

  if (config_.integrity_checks && !integrity_ok())
    throw Error("engine integrity violation");
}

bool Engine::integrity_ok() const {
  if (!gc_.consistent()) return false;
  if (!intake_.consistent()) return false;
  // Graph-held queries and live intake agree (intake may also hold queued
  // entries not yet star-assigned, but after advance() both sets match).
  if (gc_.query_count() != intake_.live_count()) return false;
  return true;
}

}  // namespace starcloak
