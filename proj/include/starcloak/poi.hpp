#ifndef STARCLOAK_POI_HPP
#define STARCLOAK_POI_HPP

#include <string>
#include <vector>

#include "starcloak/spatial_index.hpp"

namespace starcloak {

struct Poi {
  std::int64_t id = 0;
  int class_id = 0;
  EdgeIdx edge = 0;
  double edge_t = 0.0;  // position along the edge, from edge.a
  SegmentId segment = kInvalidSegment;
  double offset = 0.0;  // along the segment, from v0
};

// Points of interest snapped to the network, indexed per edge.
class PoiStore {
 public:
  PoiStore() = default;

  void add(std::int64_t id, int class_id, const Location& loc);

  std::size_t size() const { return pois_.size(); }
  const Poi& poi(std::size_t i) const { return pois_[i]; }
  const std::vector<Poi>& all() const { return pois_; }
  // Indices of POIs snapped onto edge e.
  const std::vector<std::size_t>& on_edge(EdgeIdx e) const;
  double objects_per_edge(std::size_t total_edges) const {
    return total_edges ? static_cast<double>(pois_.size()) / static_cast<double>(total_edges)
                       : 0.0;
  }

 private:
  std::vector<Poi> pois_;
  std::vector<std::vector<std::size_t>> by_edge_;
  std::vector<std::size_t> empty_;
};

// POI file: `object_id lon lat class_id`, `#` comments.
PoiStore load_pois(const std::string& path, const SpatialIndex& index,
                   std::size_t edge_count);

}  // namespace starcloak

#endif
