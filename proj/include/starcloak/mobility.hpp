#ifndef STARCLOAK_MOBILITY_HPP
#define STARCLOAK_MOBILITY_HPP

#include <vector>

#include "starcloak/query.hpp"
#include "starcloak/rng.hpp"
#include "starcloak/road_network.hpp"

namespace starcloak {

// Per-query parameter draws: Gaussian per query, clipped to the valid
// domain (integers to >= 1, times to >= 0.1s).
struct ProfileParams {
  double knn_k_mean = 5, knn_k_dev = 1;
  double delta_k_mean = 5, delta_k_dev = 1.5;
  double delta_l_mean = 5, delta_l_dev = 1.5;
  double sigma_s_mean = 4, sigma_s_dev = 1;
  double sigma_t_mean = 10, sigma_t_dev = 2;
  double gamma_mean = 20, gamma_dev = 2;
  int poi_classes = 1;  // queries draw a target class uniformly
};

int clip_round(double v, int lo);
double clip_time(double v);

// Network-constrained random waypoint traveler: follows its segment,
// picks a uniformly random other segment at intersections (never
// immediately reversing except at dead ends).
struct MovingObject {
  UserId user = 0;
  double speed = 0.0;  // m per virtual second
  SegmentId segment = kInvalidSegment;
  double offset = 0.0;
  int direction = 1;  // +1 toward vL, -1 toward v0
  double next_query_t = 0.0;
};

// A query as issued by a simulated traveler: the true position is already
// resolved, no geo lookup needed.
struct SimQuery {
  RawQuery raw;
  SegmentId segment = kInvalidSegment;
  double offset = 0.0;
};

class World {
 public:
  World(const RoadNetwork& net, const SegmentSet& segs, ProfileParams params,
        std::uint64_t seed);

  // Places objects uniformly over segments with random offsets. Two speed
  // classes, fast/slow, half and half.
  void populate(std::size_t count, double fast_speed, double slow_speed);

  // Advances every object by dt and collects queries from objects whose
  // next-query time has arrived.
  std::vector<SimQuery> step(double now, double dt);

  const std::vector<MovingObject>& objects() const { return objects_; }
  MovingObject& object(std::size_t i) { return objects_[i]; }

 private:
  void move(MovingObject& obj, double dist);
  RawQuery emit(MovingObject& obj, double now);

  const RoadNetwork& net_;
  const SegmentSet& segs_;
  ProfileParams params_;
  Rng rng_;
  std::vector<MovingObject> objects_;
};

}  // namespace starcloak

#endif
