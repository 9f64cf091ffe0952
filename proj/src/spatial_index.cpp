#include "starcloak/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace starcloak {

namespace {

// Squared distance from p to the closed segment ab, and the clamp
// parameter t of the projection.
double point_seg_dist2(double px, double py, double ax, double ay, double bx,
                       double by, double& t) {
  double dx = bx - ax, dy = by - ay;
  double len2 = dx * dx + dy * dy;
  t = len2 > 0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  double qx = ax + t * dx - px;
  double qy = ay + t * dy - py;
  return qx * qx + qy * qy;
}

}  // namespace

SpatialIndex::SpatialIndex(const RoadNetwork& net, const SegmentSet& segs,
                           double cell_size, double margin)
    : net_(net), segs_(segs), cell_size_(cell_size), margin_(margin) {
  x0_ = net.min_x();
  y0_ = net.min_y();
  nx_ = std::max<long>(1, static_cast<long>((net.max_x() - x0_) / cell_size_) + 1);
  ny_ = std::max<long>(1, static_cast<long>((net.max_y() - y0_) / cell_size_) + 1);
  cells_.assign(static_cast<std::size_t>(nx_ * ny_), {});
  // Each edge is registered in every cell its bounding box touches.
  for (EdgeIdx e = 0; e < net.edge_count(); ++e) {
    const Node& a = net.node(net.edge(e).a);
    const Node& b = net.node(net.edge(e).b);
    long cx0 = static_cast<long>((std::min(a.x, b.x) - x0_) / cell_size_);
    long cx1 = static_cast<long>((std::max(a.x, b.x) - x0_) / cell_size_);
    long cy0 = static_cast<long>((std::min(a.y, b.y) - y0_) / cell_size_);
    long cy1 = static_cast<long>((std::max(a.y, b.y) - y0_) / cell_size_);
    cx0 = std::clamp(cx0, 0L, nx_ - 1);
    cx1 = std::clamp(cx1, 0L, nx_ - 1);
    cy0 = std::clamp(cy0, 0L, ny_ - 1);
    cy1 = std::clamp(cy1, 0L, ny_ - 1);
    for (long cy = cy0; cy <= cy1; ++cy)
      for (long cx = cx0; cx <= cx1; ++cx)
        cells_[cell_of(cx, cy)].push_back(e);
  }
}

std::size_t SpatialIndex::cell_of(long cx, long cy) const {
  return static_cast<std::size_t>(cy * nx_ + cx);
}

Location SpatialIndex::locate(double lon, double lat) const {
  double x, y;
  net_.project(lon, lat, x, y);
  return locate_xy(x, y);
}

Location SpatialIndex::locate_xy(double x, double y) const {
  if (x < net_.min_x() - margin_ || x > net_.max_x() + margin_ ||
      y < net_.min_y() - margin_ || y > net_.max_y() + margin_)
    throw DataError("point outside network coverage");

  long cx = std::clamp(static_cast<long>((x - x0_) / cell_size_), 0L, nx_ - 1);
  long cy = std::clamp(static_cast<long>((y - y0_) / cell_size_), 0L, ny_ - 1);

  EdgeIdx best_edge = static_cast<EdgeIdx>(-1);
  double best_d2 = std::numeric_limits<double>::max();
  double best_t = 0.0;

  auto scan_ring = [&](long r) {
    for (long gy = cy - r; gy <= cy + r; ++gy) {
      if (gy < 0 || gy >= ny_) continue;
      for (long gx = cx - r; gx <= cx + r; ++gx) {
        if (gx < 0 || gx >= nx_) continue;
        if (std::max(std::abs(gx - cx), std::abs(gy - cy)) != r) continue;
        for (EdgeIdx e : cells_[cell_of(gx, gy)]) {
          const Node& a = net_.node(net_.edge(e).a);
          const Node& b = net_.node(net_.edge(e).b);
          double t;
          double d2 = point_seg_dist2(x, y, a.x, a.y, b.x, b.y, t);
          if (d2 < best_d2 || (d2 == best_d2 && e < best_edge)) {
            best_d2 = d2;
            best_edge = e;
            best_t = t;
          }
        }
      }
    }
  };

  long max_r = std::max(nx_, ny_);
  for (long r = 0; r <= max_r; ++r) {
    scan_ring(r);
    if (best_edge != static_cast<EdgeIdx>(-1)) {
      // Any edge in a farther ring is at least (r)*cell away; one extra
      // ring settles boundary cases.
      double safe = static_cast<double>(r) * cell_size_;
      if (best_d2 <= safe * safe) break;
    }
  }
  if (best_edge == static_cast<EdgeIdx>(-1))
    throw DataError("empty spatial index");

  Location loc;
  loc.edge = best_edge;
  loc.edge_t = best_t;
  loc.segment = segs_.segment_of_edge(best_edge);

  // Offset from the segment's v0: full lengths of preceding edges plus
  // the fraction along the matched edge (oriented by the node path).
  const Segment& seg = segs_[loc.segment];
  double off = 0.0;
  for (std::size_t i = 0; i < seg.edges.size(); ++i) {
    const Edge& ed = net_.edge(seg.edges[i]);
    if (seg.edges[i] == best_edge) {
      bool forward = seg.path[i] == ed.a;
      off += (forward ? best_t : 1.0 - best_t) * ed.length;
      break;
    }
    off += ed.length;
  }
  loc.offset = off;
  return loc;
}

void SpatialIndex::position_of(SegmentId sid, double offset, double& x,
                               double& y) const {
  const Segment& seg = segs_[sid];
  double remaining = std::clamp(offset, 0.0, seg.length);
  for (std::size_t i = 0; i < seg.edges.size(); ++i) {
    const Edge& ed = net_.edge(seg.edges[i]);
    if (remaining <= ed.length || i + 1 == seg.edges.size()) {
      double t = ed.length > 0 ? std::clamp(remaining / ed.length, 0.0, 1.0) : 0.0;
      bool forward = seg.path[i] == ed.a;
      if (!forward) t = 1.0 - t;
      const Node& a = net_.node(ed.a);
      const Node& b = net_.node(ed.b);
      x = a.x + t * (b.x - a.x);
      y = a.y + t * (b.y - a.y);
      return;
    }
    remaining -= ed.length;
  }
  const Node& n = net_.node(seg.v0());
  x = n.x;
  y = n.y;
}

}  // namespace starcloak
