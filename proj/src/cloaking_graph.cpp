#include "starcloak/cloaking_graph.hpp"

#include <algorithm>

namespace starcloak {

namespace {

bool contains(const std::vector<StarId>& sorted, StarId s) {
  return std::binary_search(sorted.begin(), sorted.end(), s);
}

std::vector<StarId> intersect(const std::vector<StarId>& a,
                              const std::vector<StarId>& b) {
  std::vector<StarId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

}  // namespace

CNodeId CloakingGraph::node_of(QueryId qid) const {
  auto it = query_node_.find(qid);
  if (it == query_node_.end()) throw DataError("query not in cloaking graph");
  return it->second;
}

const Query& CloakingGraph::housed_query(QueryId qid) const {
  auto it = housed_.find(qid);
  if (it == housed_.end()) throw DataError("query not in cloaking graph");
  return it->second;
}

const CloakingNode& CloakingGraph::node(CNodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw DataError("unknown cloaking node");
  return it->second;
}

const std::vector<CNodeId>* CloakingGraph::nodes_at(StarId star) const {
  auto it = star_nodes_.find(star);
  return it == star_nodes_.end() ? nullptr : &it->second;
}

std::vector<StarId> CloakingGraph::cover_of(StarId star, int sigma_s) const {
  if (sigma_meters_) {
    if (!segs_) throw ConfigError("sigma-in-meters cover needs the segment set");
    return sg_.stars_within_meters(star, static_cast<double>(sigma_s), stars_, *segs_);
  }
  return sg_.stars_within(star, sigma_s);
}

void CloakingGraph::recompute_theta(CloakingNode& v) const {
  v.theta = cover_of(v.star, v.sigma_s);
  v.seg_count = stars_.count_segments(v.theta);
}

void CloakingGraph::recombine(CloakingNode& v) const {
  v.delta_k = 1;
  v.delta_l = 1;
  v.sigma_s = 0;
  bool first = true;
  for (QueryId qid : v.queries) {
    const QueryProfile& p = housed_.at(qid).profile;
    v.delta_k = std::max(v.delta_k, p.delta_k);
    v.delta_l = std::max(v.delta_l, p.delta_l);
    v.sigma_s = first ? p.sigma_s : std::min(v.sigma_s, p.sigma_s);
    first = false;
  }
}

bool CloakingGraph::neighbor_condition(const CloakingNode& a,
                                       const CloakingNode& b) const {
  if (!contains(b.theta, a.star) || !contains(a.theta, b.star)) return false;
  std::vector<StarId> shared = intersect(a.theta, b.theta);
  std::size_t measure = literal_count_ ? shared.size() : stars_.count_segments(shared);
  return measure >= static_cast<std::size_t>(std::max(a.delta_l, b.delta_l));
}

void CloakingGraph::recompute_neighbors(CloakingNode& v) {
  std::set<CNodeId> fresh;
  // Candidates are nodes anchored on a star in v.theta; condition (i)
  // requires mutual theta membership so nothing outside qualifies.
  for (StarId s : v.theta) {
    auto it = star_nodes_.find(s);
    if (it == star_nodes_.end()) continue;
    for (CNodeId other : it->second) {
      if (other == v.id) continue;
      if (neighbor_condition(v, nodes_.at(other))) fresh.insert(other);
    }
  }
  for (CNodeId old : v.neighbors)
    if (!fresh.count(old)) nodes_.at(old).neighbors.erase(v.id);
  for (CNodeId nb : fresh) nodes_.at(nb).neighbors.insert(v.id);
  v.neighbors = std::move(fresh);
}

CNodeId CloakingGraph::add_query(const Query& q, StarId star) {
  housed_[q.id] = q;

  CloakingNode* joined = nullptr;
  auto it = star_nodes_.find(star);
  if (it != star_nodes_.end()) {
    for (CNodeId cid : it->second) {
      CloakingNode& v = nodes_.at(cid);
      if (q.profile.sigma_s < v.sigma_s) {
        // The incoming query would shrink the node's spatial tolerance;
        // only join when the shrunk covered set still supports the
        // largest segment requirement.
        auto shrunk = cover_of(star, q.profile.sigma_s);
        std::size_t sc = stars_.count_segments(shrunk);
        if (sc >= static_cast<std::size_t>(std::max(q.profile.delta_l, v.delta_l))) {
          v.queries.push_back(q.id);
          recombine(v);
          v.theta = std::move(shrunk);
          v.seg_count = sc;
          recompute_neighbors(v);
          joined = &v;
          break;
        }
      } else if (v.seg_count >= static_cast<std::size_t>(q.profile.delta_l)) {
        v.queries.push_back(q.id);
        int old_dl = v.delta_l;
        recombine(v);
        if (v.delta_l != old_dl) recompute_neighbors(v);
        joined = &v;
        break;
      }
    }
  }

  if (!joined) {
    CloakingNode v;
    v.id = next_id_++;
    v.star = star;
    v.queries.push_back(q.id);
    recombine(v);
    recompute_theta(v);
    auto [nit, ok] = nodes_.emplace(v.id, std::move(v));
    (void)ok;
    star_nodes_[star].push_back(nit->first);
    recompute_neighbors(nit->second);
    joined = &nit->second;
  }
  query_node_[q.id] = joined->id;
  return joined->id;
}

void CloakingGraph::detach_node(CNodeId id) {
  CloakingNode& v = nodes_.at(id);
  for (CNodeId nb : v.neighbors) nodes_.at(nb).neighbors.erase(id);
  auto& lst = star_nodes_.at(v.star);
  lst.erase(std::remove(lst.begin(), lst.end(), id), lst.end());
  if (lst.empty()) star_nodes_.erase(v.star);
  nodes_.erase(id);
}

std::optional<CNodeId> CloakingGraph::remove_query(QueryId qid) {
  auto qit = query_node_.find(qid);
  if (qit == query_node_.end()) throw DataError("query not in cloaking graph");
  CNodeId cid = qit->second;
  CloakingNode& v = nodes_.at(cid);

  query_node_.erase(qit);
  QueryProfile gone = housed_.at(qid).profile;
  housed_.erase(qid);

  if (v.queries.size() > 1) {
    v.queries.erase(std::remove(v.queries.begin(), v.queries.end(), qid),
                    v.queries.end());
    recombine(v);
    // Recompute the covered set only on relaxation.
    bool relaxed_l = v.delta_l < gone.delta_l;
    bool relaxed_s = v.sigma_s > gone.sigma_s;
    if (relaxed_s) recompute_theta(v);
    if (relaxed_s || relaxed_l) recompute_neighbors(v);
    return cid;
  }
  detach_node(cid);
  return std::nullopt;
}

std::optional<CandidateStarSet> CloakingGraph::check_reqs(
    const std::vector<CNodeId>& ns) const {
  if (ns.empty()) return std::nullopt;
  std::size_t total_queries = 0;
  int max_dk = 1, max_dl = 1;
  std::vector<StarId> inter;
  bool first = true;
  for (CNodeId cid : ns) {
    const CloakingNode& v = nodes_.at(cid);
    total_queries += v.queries.size();
    max_dk = std::max(max_dk, v.delta_k);
    max_dl = std::max(max_dl, v.delta_l);
    inter = first ? v.theta : intersect(inter, v.theta);
    first = false;
    if (inter.empty()) return std::nullopt;
  }
  if (static_cast<std::size_t>(max_dk) > total_queries) return std::nullopt;
  if (static_cast<std::size_t>(max_dl) > stars_.count_segments(inter))
    return std::nullopt;

  CandidateStarSet out;
  out.stars = std::move(inter);
  out.nodes = ns;
  out.l_max = max_dl;
  for (CNodeId cid : ns) {
    const CloakingNode& v = nodes_.at(cid);
    out.queries.insert(out.queries.end(), v.queries.begin(), v.queries.end());
    out.fixed.push_back(v.star);
  }
  std::sort(out.fixed.begin(), out.fixed.end());
  out.fixed.erase(std::unique(out.fixed.begin(), out.fixed.end()), out.fixed.end());
  return out;
}

bool CloakingGraph::consistent() const {
  std::size_t housed_total = 0;
  for (const auto& [cid, v] : nodes_) {
    housed_total += v.queries.size();
    if (v.queries.empty()) return false;
    // Stored requirements match the max/max/min recombination.
    CloakingNode probe = v;
    recombine(probe);
    if (probe.delta_k != v.delta_k || probe.delta_l != v.delta_l ||
        probe.sigma_s != v.sigma_s)
      return false;
    // Theta and segment count match a fresh computation.
    auto theta = cover_of(v.star, v.sigma_s);
    if (theta != v.theta) return false;
    if (stars_.count_segments(theta) != v.seg_count) return false;
    // M_Q points back here.
    for (QueryId q : v.queries) {
      auto it = query_node_.find(q);
      if (it == query_node_.end() || it->second != cid) return false;
      if (!housed_.count(q)) return false;
    }
    // M_S lists the node.
    auto sit = star_nodes_.find(v.star);
    if (sit == star_nodes_.end() ||
        std::find(sit->second.begin(), sit->second.end(), cid) == sit->second.end())
      return false;
    // Neighbor symmetry + condition.
    for (CNodeId nb : v.neighbors) {
      auto nit = nodes_.find(nb);
      if (nit == nodes_.end()) return false;
      if (!nit->second.neighbors.count(cid)) return false;
      if (!neighbor_condition(v, nit->second)) return false;
    }
  }
  if (housed_total != query_node_.size()) return false;
  if (housed_total != housed_.size()) return false;
  // Neighbor condition is exhaustive: any qualifying pair must be linked.
  for (auto ai = nodes_.begin(); ai != nodes_.end(); ++ai)
    for (auto bi = std::next(ai); bi != nodes_.end(); ++bi)
      if (neighbor_condition(ai->second, bi->second) !=
          (ai->second.neighbors.count(bi->first) > 0))
        return false;
  return true;
}

}  // namespace starcloak
