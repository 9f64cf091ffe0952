#include "starcloak/mobility.hpp"

#include <algorithm>
#include <cmath>

namespace starcloak {

int clip_round(double v, int lo) {
  return std::max(lo, static_cast<int>(std::lround(v)));
}

double clip_time(double v) { return std::max(0.1, v); }

World::World(const RoadNetwork& net, const SegmentSet& segs, ProfileParams params,
             std::uint64_t seed)
    : net_(net), segs_(segs), params_(params),
      rng_(Rng::seeded(seed, 0x776f726c64ULL /* "world" */)) {}

void World::populate(std::size_t count, double fast_speed, double slow_speed) {
  objects_.clear();
  objects_.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    MovingObject obj;
    obj.user = static_cast<UserId>(i + 1);
    obj.speed = (i % 2 == 0) ? fast_speed : slow_speed;
    obj.segment = static_cast<SegmentId>(rng_.below(segs_.size()));
    obj.offset = rng_.uniform() * segs_[obj.segment].length;
    obj.direction = rng_.bernoulli(0.5) ? 1 : -1;
    // Staggered first queries so traffic is not phase-locked.
    obj.next_query_t = rng_.uniform() * params_.gamma_mean;
    objects_.push_back(obj);
  }
}

void World::move(MovingObject& obj, double dist) {
  while (dist > 0) {
    const Segment& seg = segs_[obj.segment];
    double room = obj.direction > 0 ? seg.length - obj.offset : obj.offset;
    if (dist <= room) {
      obj.offset += obj.direction * dist;
      return;
    }
    dist -= room;
    obj.offset = obj.direction > 0 ? seg.length : 0.0;
    NodeIdx at = obj.direction > 0 ? seg.vL() : seg.v0();
    const auto& choices = segs_.terminal_segments(at);
    // Dead end (or isolated chain end): turn around.
    if (choices.size() <= 1) {
      obj.direction = -obj.direction;
      continue;
    }
    // Random waypoint: uniform over the other segments at this star.
    std::vector<SegmentId> options;
    for (SegmentId sid : choices)
      if (sid != obj.segment) options.push_back(sid);
    SegmentId next = options[rng_.below(options.size())];
    const Segment& ns = segs_[next];
    if (ns.v0() == at) {
      obj.segment = next;
      obj.offset = 0.0;
      obj.direction = 1;
    } else {
      obj.segment = next;
      obj.offset = ns.length;
      obj.direction = -1;
    }
  }
}

RawQuery World::emit(MovingObject& obj, double now) {
  RawQuery r;
  r.user = obj.user;
  r.t = now;
  r.knn_k = clip_round(rng_.gaussian(params_.knn_k_mean, params_.knn_k_dev), 1);
  r.poi_class = params_.poi_classes > 1
                    ? static_cast<int>(rng_.below(params_.poi_classes))
                    : -1;
  r.profile.delta_k = clip_round(rng_.gaussian(params_.delta_k_mean, params_.delta_k_dev), 1);
  r.profile.delta_l = clip_round(rng_.gaussian(params_.delta_l_mean, params_.delta_l_dev), 1);
  r.profile.sigma_s = clip_round(rng_.gaussian(params_.sigma_s_mean, params_.sigma_s_dev), 1);
  r.profile.sigma_t = clip_time(rng_.gaussian(params_.sigma_t_mean, params_.sigma_t_dev));
  return r;
}

std::vector<SimQuery> World::step(double now, double dt) {
  std::vector<SimQuery> out;
  for (MovingObject& obj : objects_) {
    move(obj, obj.speed * dt);
    if (now >= obj.next_query_t) {
      SimQuery sq;
      sq.raw = emit(obj, now);
      sq.segment = obj.segment;
      sq.offset = obj.offset;
      out.push_back(sq);
      // The object re-queries a waiting time after the previous query
      // resolves; the expiry bound stands in for the resolution time so
      // the schedule stays identical across compared algorithms.
      double gamma = clip_time(rng_.gaussian(params_.gamma_mean, params_.gamma_dev));
      obj.next_query_t = now + sq.raw.profile.sigma_t + gamma;
    }
  }
  return out;
}

}  // namespace starcloak
