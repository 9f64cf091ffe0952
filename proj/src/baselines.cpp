#include "starcloak/baselines.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>

namespace starcloak {

std::vector<SegmentId> sigma_ball(SegmentId seed, int sigma_s, const SegmentSet& segs,
                                  const StarSet& stars, const StarGraph& sg) {
  std::vector<StarId> reach;
  const Segment& s = segs[seed];
  for (NodeIdx term : {s.v0(), s.vL()}) {
    StarId st = stars.star_at(term);
    if (st == kInvalidStar) continue;
    auto w = sg.stars_within(st, sigma_s);
    reach.insert(reach.end(), w.begin(), w.end());
  }
  std::sort(reach.begin(), reach.end());
  reach.erase(std::unique(reach.begin(), reach.end()), reach.end());
  std::vector<SegmentId> ball = stars.segment_union(reach);
  if (!std::binary_search(ball.begin(), ball.end(), seed)) {
    ball.push_back(seed);
    std::sort(ball.begin(), ball.end());
  }
  return ball;
}

namespace {

std::size_t users_in(const std::vector<ActiveQuery>& active,
                     const std::set<SegmentId>& region) {
  std::set<UserId> users;
  for (const ActiveQuery& a : active)
    if (region.count(a.segment)) users.insert(a.user);
  return users.size();
}

}  // namespace

std::optional<BaselineRegion> random_sampling_cloak(
    const Query& q, const SegmentSet& segs, const StarSet& stars, const StarGraph& sg,
    const std::vector<ActiveQuery>& active, Rng& rng) {
  std::vector<SegmentId> pool = sigma_ball(q.segment, q.profile.sigma_s, segs, stars, sg);
  pool.erase(std::remove(pool.begin(), pool.end(), q.segment), pool.end());

  std::set<SegmentId> region{q.segment};
  for (;;) {
    bool l_ok = region.size() >= static_cast<std::size_t>(q.profile.delta_l);
    std::size_t users = users_in(active, region);
    if (l_ok && users >= static_cast<std::size_t>(q.profile.delta_k)) {
      BaselineRegion out;
      out.segments.assign(region.begin(), region.end());
      out.users_covered = users;
      return out;
    }
    if (pool.empty()) return std::nullopt;
    std::size_t i = rng.below(pool.size());
    region.insert(pool[i]);
    pool[i] = pool.back();
    pool.pop_back();
  }
}

double midpoint_distance(const RoadNetwork& net, const SegmentSet& segs,
                         SegmentId from, double offset, SegmentId target) {
  std::vector<double> dist = node_distances_from_point(net, segs, from, offset);
  const Segment& t = segs[target];
  double half = t.length / 2.0;
  double best = std::min(dist[t.v0()] + half, dist[t.vL()] + half);
  if (target == from) best = std::min(best, std::abs(offset - half));
  return best;
}

std::optional<BaselineRegion> network_expansion_cloak(
    const Query& q, const RoadNetwork& net, const SegmentSet& segs,
    const StarSet& stars, const StarGraph& sg, const std::vector<ActiveQuery>& active) {
  std::vector<SegmentId> ball =
      sigma_ball(q.segment, q.profile.sigma_s, segs, stars, sg);

  std::vector<double> dist = node_distances_from_point(net, segs, q.segment, q.offset);
  auto mid_dist = [&](SegmentId sid) {
    const Segment& t = segs[sid];
    double half = t.length / 2.0;
    double best = std::min(dist[t.v0()] + half, dist[t.vL()] + half);
    if (sid == q.segment) best = std::min(best, std::abs(q.offset - half));
    return best;
  };
  // Incremental network expansion: segments join in increasing midpoint
  // distance, ties on segment id; the query's own segment always leads.
  std::vector<std::pair<double, SegmentId>> order;
  for (SegmentId sid : ball)
    if (sid != q.segment) order.emplace_back(mid_dist(sid), sid);
  std::sort(order.begin(), order.end());

  std::set<SegmentId> region{q.segment};
  std::size_t next = 0;
  for (;;) {
    bool l_ok = region.size() >= static_cast<std::size_t>(q.profile.delta_l);
    std::size_t users = users_in(active, region);
    if (l_ok && users >= static_cast<std::size_t>(q.profile.delta_k)) {
      BaselineRegion out;
      out.segments.assign(region.begin(), region.end());
      out.users_covered = users;
      return out;
    }
    if (next >= order.size()) return std::nullopt;
    region.insert(order[next++].second);
  }
}

BaselineAnonymizer::BaselineAnonymizer(const RoadNetwork& net, const SegmentSet& segs,
                                       const StarSet& stars, const StarGraph& sg,
                                       BaselineKind kind, std::uint64_t seed)
    : net_(net),
      segs_(segs),
      stars_(stars),
      sg_(sg),
      kind_(kind),
      rng_(Rng::seeded(seed, 0x626173656cULL /* "basel" */)) {}

bool BaselineAnonymizer::submit(const RawQuery& raw, SegmentId segment, double offset) {
  Query q;
  q.id = query_hash(raw.user, raw.t);
  if (!seen_.insert(q.id).second) return false;
  q.user = raw.user;
  q.t = raw.t;
  q.segment = segment;
  q.offset = offset;
  q.knn_k = raw.knn_k;
  q.poi_class = raw.poi_class;
  q.profile = raw.profile;
  q.t_exp = raw.t + raw.profile.sigma_t;
  pending_.push_back(std::move(q));
  return true;
}

void BaselineAnonymizer::advance(double now) {
  // Queries stay countable until expiry even after being answered; the
  // baselines are stateless comparators with no cohort teardown.
  window_.erase(std::remove_if(window_.begin(), window_.end(),
                               [now](const Query& q) { return q.t_exp <= now; }),
                window_.end());

  for (Query& q : pending_) {
    window_.push_back(q);
    std::vector<ActiveQuery> active;
    active.reserve(window_.size());
    for (const Query& w : window_) active.push_back({w.user, w.segment});

    std::optional<BaselineRegion> region;
    if (kind_ == BaselineKind::kRandomSampling)
      region = random_sampling_cloak(q, segs_, stars_, sg_, active, rng_);
    else
      region = network_expansion_cloak(q, net_, segs_, stars_, sg_, active);

    QueryEvent ev;
    ev.id = q.id;
    ev.user = q.user;
    ev.issue_t = q.t;
    ev.resolve_t = now;
    ev.true_segment = q.segment;
    ev.true_offset = q.offset;
    ev.knn_k = q.knn_k;
    ev.poi_class = q.poi_class;
    ev.profile = q.profile;

    if (!region) {
      ev.outcome = Outcome::kDropped;
      ev.reason = "exhausted";
      events_.push_back(std::move(ev));
      continue;
    }

    RegionEvent re;
    re.region_id = next_region_++;
    re.t = now;
    re.segments = region->segments;
    re.border = border_nodes(net_, segs_, re.segments);
    re.cohort = {q.id};
    re.l_max = q.profile.delta_l;
    re.k_users = region->users_covered;

    // Same soundness conditions as the engine, with the spatial bound
    // checked as region-within-ball.
    bool ok = region->users_covered >= static_cast<std::size_t>(q.profile.delta_k) &&
              region->segments.size() >= static_cast<std::size_t>(q.profile.delta_l) &&
              now <= q.t_exp;
    if (ok) {
      auto ball = sigma_ball(q.segment, q.profile.sigma_s, segs_, stars_, sg_);
      for (SegmentId sid : region->segments) {
        if (!std::binary_search(ball.begin(), ball.end(), sid)) {
          ok = false;
          break;
        }
      }
      if (!std::binary_search(region->segments.begin(), region->segments.end(),
                              q.segment))
        ok = false;
    }
    if (!ok) ++soundness_violations_;

    ev.outcome = Outcome::kServed;
    ev.region = re.region_id;
    events_.push_back(std::move(ev));
    regions_.push_back(std::move(re));
  }
  pending_.clear();
}

}  // namespace starcloak
