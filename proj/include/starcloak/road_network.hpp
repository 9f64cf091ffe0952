#ifndef STARCLOAK_ROAD_NETWORK_HPP
#define STARCLOAK_ROAD_NETWORK_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "starcloak/common.hpp"

namespace starcloak {

struct Node {
  std::int64_t ext_id = 0;
  double lon = 0.0;
  double lat = 0.0;
  // Local planar coordinates in meters (equirectangular around the
  // dataset centroid), filled in by RoadNetwork::finalize().
  double x = 0.0;
  double y = 0.0;
};

struct Edge {
  std::int64_t ext_id = 0;
  NodeIdx a = kInvalidNode;
  NodeIdx b = kInvalidNode;
  double length = 0.0;  // meters
};

struct AdjEntry {
  EdgeIdx edge;
  NodeIdx neighbor;
};

// Undirected road graph. Immutable once finalized; all modules share it
// read-only.
class RoadNetwork {
 public:
  NodeIdx add_node(std::int64_t ext_id, double lon, double lat);
  EdgeIdx add_edge(std::int64_t ext_id, std::int64_t ext_a, std::int64_t ext_b,
                   double length);
  // Computes planar coordinates and checks graph invariants.
  void finalize();

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const Node& node(NodeIdx v) const { return nodes_[v]; }
  const Edge& edge(EdgeIdx e) const { return edges_[e]; }
  const std::vector<AdjEntry>& adjacent(NodeIdx v) const { return adj_[v]; }
  std::size_t degree(NodeIdx v) const { return adj_[v].size(); }
  NodeIdx other_end(EdgeIdx e, NodeIdx v) const {
    const Edge& ed = edges_[e];
    return ed.a == v ? ed.b : ed.a;
  }
  NodeIdx node_by_ext(std::int64_t ext_id) const;  // throws DataError if unknown

  double min_x() const { return min_x_; }
  double min_y() const { return min_y_; }
  double max_x() const { return max_x_; }
  double max_y() const { return max_y_; }

  // Equirectangular projection used for all planar geometry.
  void project(double lon, double lat, double& x, double& y) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<AdjEntry>> adj_;
  std::unordered_map<std::int64_t, NodeIdx> ext_index_;
  double min_x_ = 0, min_y_ = 0, max_x_ = 0, max_y_ = 0;
  double lon0_ = 0, lat0_ = 0, mx_ = 1.0;
  bool finalized_ = false;
};

// Maximal chain of edges whose interior nodes all have degree 2. The node
// path is ordered v0..vL; edges[i] connects path[i] and path[i+1].
struct Segment {
  SegmentId id = kInvalidSegment;
  std::vector<EdgeIdx> edges;
  std::vector<NodeIdx> path;
  double length = 0.0;
  NodeIdx v0() const { return path.front(); }
  NodeIdx vL() const { return path.back(); }
};

class SegmentSet {
 public:
  std::size_t size() const { return segments_.size(); }
  const Segment& operator[](SegmentId s) const { return segments_[s]; }
  SegmentId segment_of_edge(EdgeIdx e) const { return edge_segment_[e]; }
  // Segments having v as a terminal (v0 or vL).
  const std::vector<SegmentId>& terminal_segments(NodeIdx v) const {
    return terminal_segments_[v];
  }
  const std::vector<Segment>& all() const { return segments_; }
  // (segment, offset) coordinates of a node, interior nodes included.
  std::pair<SegmentId, double> position_of_node(NodeIdx v) const;

  friend SegmentSet build_segments(const RoadNetwork& net,
                                   std::vector<std::string>* warnings);

 private:
  std::vector<Segment> segments_;
  std::vector<SegmentId> edge_segment_;
  std::vector<std::vector<SegmentId>> terminal_segments_;
  std::vector<SegmentId> node_segment_;  // some segment covering the node
  const RoadNetwork* net_ = nullptr;
};

// Collapses degree-2 chains. Every edge lands in exactly one segment.
// Pure degree-2 cycles are split at their lowest-ext-id node; isolated
// nodes are skipped. Both produce a warning when `warnings` is non-null.
SegmentSet build_segments(const RoadNetwork& net,
                          std::vector<std::string>* warnings = nullptr);

// A star is an intersection node (degree >= 3) plus its incident segments.
struct Star {
  StarId id = kInvalidStar;
  NodeIdx anchor = kInvalidNode;
  std::vector<SegmentId> segments;  // sorted
};

class StarSet {
 public:
  std::size_t size() const { return stars_.size(); }
  const Star& operator[](StarId s) const { return stars_[s]; }
  // Star anchored at node v, or kInvalidStar when d(v) < 3.
  StarId star_at(NodeIdx v) const { return node_star_[v]; }
  const std::vector<Star>& all() const { return stars_; }

  // Number of distinct segments covered by a set of stars (stars may
  // share segments, so this is a union count).
  std::size_t count_segments(std::span<const StarId> stars) const;
  // The union itself, sorted.
  std::vector<SegmentId> segment_union(std::span<const StarId> stars) const;

  friend StarSet build_stars(const RoadNetwork& net, const SegmentSet& segs);

 private:
  std::vector<Star> stars_;
  std::vector<StarId> node_star_;
  std::size_t segment_count_ = 0;
};

StarSet build_stars(const RoadNetwork& net, const SegmentSet& segs);

// Star adjacency: two stars are adjacent iff they share a segment. All
// edges are unit hops.
class StarGraph {
 public:
  std::size_t size() const { return adj_.size(); }
  const std::vector<StarId>& neighbors(StarId s) const { return adj_[s]; }

  // BFS hop count, or -1 when b is farther than cap (or unreachable).
  int hop_distance(StarId a, StarId b, int cap) const;
  // All stars within `radius` hops of s, including s itself, sorted by id.
  std::vector<StarId> stars_within(StarId s, int radius) const;
  // Distance map from s out to `radius` hops: star -> hops, -1 elsewhere.
  std::vector<int> distances_from(StarId s, int radius) const;
  // Network-distance variant of stars_within: anchors reachable within
  // `radius` meters, adjacent stars separated by their shortest shared
  // segment. The hops reading is the tested default; this backs the
  // config switch.
  std::vector<StarId> stars_within_meters(StarId s, double radius,
                                          const StarSet& stars,
                                          const SegmentSet& segs) const;

  friend StarGraph build_star_graph(const StarSet& stars, const SegmentSet& segs);

 private:
  std::vector<std::vector<StarId>> adj_;
};

StarGraph build_star_graph(const StarSet& stars, const SegmentSet& segs);

// Border nodes of the subgraph formed by `segments`: nodes with at least
// one incident edge outside it (d_G(v) > d_S(v)).
std::vector<NodeIdx> border_nodes(const RoadNetwork& net, const SegmentSet& segs,
                                  std::span<const SegmentId> segments);

// Total edge count over a set of segments.
std::size_t subgraph_edge_count(const SegmentSet& segs,
                                std::span<const SegmentId> segments);

// Dijkstra over (nodes, segments) from a position `offset` meters along
// `from`. Interior degree-2 nodes are bypassed; entering a segment is only
// possible at its terminals, so segment-level relaxation is exact.
std::vector<double> node_distances_from_point(const RoadNetwork& net,
                                              const SegmentSet& segs, SegmentId from,
                                              double offset);

// Network distance between two on-segment positions.
double point_distance(const RoadNetwork& net, const SegmentSet& segs, SegmentId seg_a,
                      double off_a, SegmentId seg_b, double off_b);

struct LoadStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
};

// File format (see README): node lines `id lon lat`, edge lines
// `id node_a node_b length`, `#` starts a comment.
RoadNetwork load_network(const std::string& node_path, const std::string& edge_path,
                         LoadStats* stats = nullptr);
RoadNetwork load_network_streams(std::istream& nodes, std::istream& edges,
                                 const std::string& node_name,
                                 const std::string& edge_name,
                                 LoadStats* stats = nullptr);

}  // namespace starcloak

#endif
