#include "starcloak/cost_model.hpp"

#include "starcloak/poi.hpp"

namespace starcloak {

StarCostCache::StarCostCache(const RoadNetwork& net, const SegmentSet& segs,
                             const StarSet& stars) {
  stats_.resize(stars.size());
  for (StarId s = 0; s < stars.size(); ++s) {
    const Star& st = stars[s];
    SubgraphStats& out = stats_[s];
    out.segment_count = st.segments.size();
    out.border_count = border_nodes(net, segs, st.segments).size();
    out.edge_count = subgraph_edge_count(segs, st.segments);
  }
}

StarCostCache::StarCostCache(const RoadNetwork& net, const SegmentSet& segs,
                             const StarSet& stars, const PoiStore& pois)
    : StarCostCache(net, segs, stars) {
  for (StarId s = 0; s < stars.size(); ++s) {
    double objects = 0;
    for (SegmentId sid : stars[s].segments)
      for (EdgeIdx e : segs[sid].edges)
        objects += static_cast<double>(pois.on_edge(e).size());
    stats_[s].object_total = objects;
  }
}

}  // namespace starcloak
