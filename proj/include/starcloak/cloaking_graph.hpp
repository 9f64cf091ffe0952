#ifndef STARCLOAK_CLOAKING_GRAPH_HPP
#define STARCLOAK_CLOAKING_GRAPH_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "starcloak/query.hpp"
#include "starcloak/road_network.hpp"

namespace starcloak {

using CNodeId = std::uint32_t;

// A cloaking-graph vertex: queries grouped on one star with their combined
// requirements, the covered star-set, and neighbor links to other groups
// that could be cloaked together.
struct CloakingNode {
  CNodeId id = 0;
  StarId star = kInvalidStar;
  std::vector<QueryId> queries;  // insertion order
  int delta_k = 1;               // max over queries
  int delta_l = 1;               // max over queries
  int sigma_s = 0;               // min over queries
  std::vector<StarId> theta;     // stars within sigma_s of star, sorted
  std::size_t seg_count = 0;     // segments covered by theta
  std::set<CNodeId> neighbors;
};

// Candidate star-set: the shared covered stars of a clique of nodes that
// jointly meet every member's privacy requirements.
struct CandidateStarSet {
  std::uint64_t seq = 0;             // engine-assigned, also the prune RNG tag
  std::vector<StarId> stars;         // sorted intersection of member thetas
  std::vector<CNodeId> nodes;
  std::vector<QueryId> queries;
  std::vector<StarId> fixed;         // stars of contributing nodes, sorted
  int l_max = 1;
};

class CloakingGraph {
 public:
  // `segs` is only needed for the sigma-in-meters cover switch; the hops
  // reading is the tested default.
  CloakingGraph(const StarSet& stars, const StarGraph& star_graph,
                bool literal_star_count_neighbors = false,
                bool sigma_in_meters = false, const SegmentSet* segs = nullptr)
      : stars_(stars),
        sg_(star_graph),
        literal_count_(literal_star_count_neighbors),
        sigma_meters_(sigma_in_meters),
        segs_(segs) {}

  // Joins the first compatible node on `star` or creates a fresh one;
  // returns the updated node id.
  CNodeId add_query(const Query& q, StarId star);

  // Removes a housed query. Returns the surviving node id when the node
  // still holds other queries, nullopt when the node dissolved.
  std::optional<CNodeId> remove_query(QueryId qid);

  bool has_query(QueryId qid) const { return query_node_.count(qid) > 0; }
  CNodeId node_of(QueryId qid) const;
  const Query& housed_query(QueryId qid) const;
  bool node_exists(CNodeId id) const { return nodes_.count(id) > 0; }
  const CloakingNode& node(CNodeId id) const;
  const std::vector<CNodeId>* nodes_at(StarId star) const;  // M_S, may be null
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t query_count() const { return query_node_.size(); }
  const std::map<CNodeId, CloakingNode>& all_nodes() const { return nodes_; }

  // Intersection of the covered star-sets with the joint anonymity and
  // segment checks; empty optional when the clique does not qualify.
  std::optional<CandidateStarSet> check_reqs(const std::vector<CNodeId>& ns) const;

  // Full-scan structural check: maps, requirement recombination, theta,
  // neighbor condition and symmetry. Debug/test aid.
  bool consistent() const;

  const StarSet& stars() const { return stars_; }
  const StarGraph& star_graph() const { return sg_; }

 private:
  bool neighbor_condition(const CloakingNode& a, const CloakingNode& b) const;
  void recompute_theta(CloakingNode& v) const;
  void recompute_neighbors(CloakingNode& v);
  void recombine(CloakingNode& v) const;  // max/max/min over housed profiles
  void detach_node(CNodeId id);

  std::vector<StarId> cover_of(StarId star, int sigma_s) const;

  const StarSet& stars_;
  const StarGraph& sg_;
  bool literal_count_;
  bool sigma_meters_ = false;
  const SegmentSet* segs_ = nullptr;
  CNodeId next_id_ = 0;
  std::map<CNodeId, CloakingNode> nodes_;
  std::map<StarId, std::vector<CNodeId>> star_nodes_;     // M_S
  std::unordered_map<QueryId, CNodeId> query_node_;       // M_Q
  std::unordered_map<QueryId, Query> housed_;
};

}  // namespace starcloak

#endif
