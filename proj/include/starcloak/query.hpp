#ifndef STARCLOAK_QUERY_HPP
#define STARCLOAK_QUERY_HPP

#include <deque>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "starcloak/common.hpp"
#include "starcloak/spatial_index.hpp"

namespace starcloak {

// Personalized privacy/utility profile: k-user anonymity, l-segment
// indistinguishability, spatial tolerance (star-graph hops) and temporal
// tolerance (virtual seconds).
struct QueryProfile {
  int delta_k = 1;
  int delta_l = 1;
  int sigma_s = 0;
  double sigma_t = 1.0;
};

struct Query {
  QueryId id = 0;
  UserId user = 0;
  double t = 0.0;  // issue time, virtual seconds
  SegmentId segment = kInvalidSegment;
  double offset = 0.0;
  int knn_k = 1;
  int poi_class = -1;  // -1 matches any class
  QueryProfile profile;
  double t_exp = 0.0;  // always t + profile.sigma_t
};

struct RawQuery {
  UserId user = 0;
  double t = 0.0;
  double lon = 0.0;
  double lat = 0.0;
  int knn_k = 1;
  int poi_class = -1;
  QueryProfile profile;
};

// 64-bit FNV-1a over "user|time-bits"; deterministic across runs so the
// same (user, time) pair always maps to the same id.
QueryId query_hash(UserId user, double t);

// FIFO queue + expiration heap + live query storage. Owned by a single
// engine thread; producers hand RawQuery values in.
class QuerySystem {
 public:
  // Resolves the location, assigns the id, appends to the queue tail and
  // inserts into the heap keyed by t_exp. Throws DataError when the point
  // is out of coverage or (user, time) repeats.
  const Query& preprocess(const RawQuery& raw, const SpatialIndex& index);
  // Same entry point for already-located queries (simulation path).
  const Query& submit_located(const RawQuery& raw, SegmentId segment, double offset);

  // Removes and returns all queries with t_exp <= now, ascending t_exp.
  std::vector<Query> pop_expired(double now);

  // Next queued live query, or nullptr when the queue is drained.
  const Query* pop_next();

  bool contains(QueryId id) const { return live_.count(id) > 0; }
  const Query& get(QueryId id) const;
  // Forgets a query entirely (served or dropped).
  void erase(QueryId id);

  std::size_t live_count() const { return live_.size(); }
  bool heap_empty() const { return heap_.empty(); }
  double heap_min() const { return heap_.begin()->first; }
  QueryId heap_min_id() const { return heap_.begin()->second; }
  std::size_t queue_size() const { return fifo_.size(); }

  // Live queries whose t_exp - now <= alpha (hybrid consideration check).
  std::vector<QueryId> expiring_within(double now, double alpha) const;

  // Debug invariant: every live query has exactly one heap entry.
  bool consistent() const;

 private:
  const Query& insert(Query q);

  std::deque<QueryId> fifo_;
  std::set<std::pair<double, QueryId>> heap_;  // (t_exp, id)
  std::unordered_map<QueryId, Query> live_;
  std::set<QueryId> seen_;
};

// Replay-mode trace file: CSV `user_id,time,lon,lat,knn_k,delta_k,
// delta_l,sigma_s,sigma_t` with optional `#` comments.
std::vector<RawQuery> load_query_trace(const std::string& path);

}  // namespace starcloak

#endif
