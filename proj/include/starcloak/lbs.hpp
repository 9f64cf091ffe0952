#ifndef STARCLOAK_LBS_HPP
#define STARCLOAK_LBS_HPP

#include <span>
#include <vector>

#include "starcloak/poi.hpp"
#include "starcloak/query.hpp"
#include "starcloak/road_network.hpp"

namespace starcloak {

// Mock LBS: edge/segment/node result primitives and the candidate-result
// containment scheme, plus the anonymizer-side false-positive filter.
class MockLbs {
 public:
  MockLbs(const RoadNetwork& net, const SegmentSet& segs, const PoiStore& pois)
      : net_(net), segs_(segs), pois_(pois) {}

  // POIs on edge e matching the query's class filter (O_e).
  std::vector<std::size_t> edge_result(const Query& q, EdgeIdx e) const;
  // Union over the segment's edges (O_s).
  std::vector<std::size_t> segment_result(const Query& q, SegmentId s) const;
  // The q.knn_k nearest matching POIs to node v by network distance (O_v);
  // ties break on object index.
  std::vector<std::size_t> node_result(const Query& q, NodeIdx v) const;

  // Candidate result for the cloaked region: union of O_s over segments
  // and O_v over border nodes.
  std::vector<std::size_t> candidate_result(const Query& q,
                                            std::span<const SegmentId> region,
                                            std::span<const NodeIdx> border) const;

  // k nearest candidates to the query's true position; equals the exact
  // k-NN answer whenever the true segment is inside the region.
  std::vector<std::size_t> filter_result(const Query& q,
                                         std::span<const std::size_t> candidate) const;

  // Brute-force exact k-NN over every POI; the test oracle and the
  // reference answer for end-to-end correctness.
  std::vector<std::size_t> exact_knn(const Query& q) const;

 private:
  bool class_match(const Query& q, const Poi& p) const {
    return q.poi_class < 0 || p.class_id == q.poi_class;
  }

  const RoadNetwork& net_;
  const SegmentSet& segs_;
  const PoiStore& pois_;
};

}  // namespace starcloak

#endif
