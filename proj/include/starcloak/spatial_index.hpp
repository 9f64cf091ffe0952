#ifndef STARCLOAK_SPATIAL_INDEX_HPP
#define STARCLOAK_SPATIAL_INDEX_HPP

#include <vector>

#include "starcloak/road_network.hpp"

namespace starcloak {

struct Location {
  SegmentId segment = kInvalidSegment;
  double offset = 0.0;  // meters from the segment's v0
  EdgeIdx edge = static_cast<EdgeIdx>(-1);
  double edge_t = 0.0;  // position along the edge in [0,1], from edge.a
};

// Uniform grid over the network bounding box mapping points to their
// nearest edge. Ties break on the lower edge id, which keeps locate
// deterministic and idempotent.
class SpatialIndex {
 public:
  // cell_size in meters; margin extends the accepted bounding box.
  SpatialIndex(const RoadNetwork& net, const SegmentSet& segs,
               double cell_size = 500.0, double margin = 1000.0);

  // Snaps a lon/lat point; throws DataError when outside box+margin.
  Location locate(double lon, double lat) const;
  // Same in planar meters.
  Location locate_xy(double x, double y) const;

  // Planar coordinates of a (segment, offset) position.
  void position_of(SegmentId seg, double offset, double& x, double& y) const;

  double cell_size() const { return cell_size_; }

 private:
  std::size_t cell_of(long cx, long cy) const;

  const RoadNetwork& net_;
  const SegmentSet& segs_;
  double cell_size_, margin_;
  double x0_, y0_;
  long nx_ = 1, ny_ = 1;
  std::vector<std::vector<EdgeIdx>> cells_;
};

}  // namespace starcloak

#endif
