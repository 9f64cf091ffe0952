#ifndef STARCLOAK_COST_MODEL_HPP
#define STARCLOAK_COST_MODEL_HPP

#include <vector>

#include "starcloak/road_network.hpp"

namespace starcloak {
class PoiStore;
}

namespace starcloak {

struct CostParams {
  double c_s = 1.0;     // per-segment evaluation cost
  double c_v = 2.0;     // per-border-node evaluation cost
  double c_o = 0.1;     // per-object transfer cost
  double rho_o = 1.0;   // average objects per edge
  double beta = 0.5;    // comm/eval trade-off, in [0,1]
};

struct SubgraphStats {
  std::size_t segment_count = 0;
  std::size_t border_count = 0;
  std::size_t edge_count = 0;
  // When >= 0 this overrides rho_o * edge_count with a measured object
  // total (used when a POI set is loaded).
  double object_total = -1.0;
};

inline double eval_cost(const CostParams& p, const SubgraphStats& s) {
  return p.c_s * static_cast<double>(s.segment_count) +
         p.c_v * static_cast<double>(s.border_count);
}

inline double comm_cost(const CostParams& p, double res_size, const SubgraphStats& s) {
  double objects = s.object_total >= 0.0
                       ? s.object_total
                       : p.rho_o * static_cast<double>(s.edge_count);
  return p.c_o * (res_size * static_cast<double>(s.border_count) + objects);
}

inline double overall_cost(const CostParams& p, double res_size,
                           const SubgraphStats& s) {
  return p.beta * comm_cost(p, res_size, s) + (1.0 - p.beta) * eval_cost(p, s);
}

// Star subgraph stats are static per network; cache them once so Select
// Star stays cheap on the hot path.
class StarCostCache {
 public:
  StarCostCache(const RoadNetwork& net, const SegmentSet& segs, const StarSet& stars);
  // Measured per-edge object counts replace the rho_o estimate.
  StarCostCache(const RoadNetwork& net, const SegmentSet& segs, const StarSet& stars,
                const PoiStore& pois);
  const SubgraphStats& stats(StarId s) const { return stats_[s]; }
  double star_cost(const CostParams& p, double res_size, StarId s) const {
    return overall_cost(p, res_size, stats_[s]);
  }

 private:
  std::vector<SubgraphStats> stats_;
};

}  // namespace starcloak

#endif
