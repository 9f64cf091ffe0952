#include "starcloak/lbs.hpp"

#include <algorithm>
#include <cmath>

namespace starcloak {

namespace {

// Distance from a (segment, offset) source with precomputed node
// distances to a POI.
double poi_distance(const SegmentSet& segs, const std::vector<double>& nd,
                    SegmentId from, double off, const Poi& p) {
  const Segment& s = segs[p.segment];
  double d = std::min(nd[s.v0()] + p.offset, nd[s.vL()] + (s.length - p.offset));
  if (p.segment == from) d = std::min(d, std::abs(off - p.offset));
  return d;
}

std::vector<std::size_t> k_nearest(const std::vector<std::pair<double, std::size_t>>&
                                       scored,
                                   std::size_t k) {
  std::vector<std::pair<double, std::size_t>> sorted = scored;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.size() > k) sorted.resize(k);
  std::vector<std::size_t> out;
  out.reserve(sorted.size());
  for (auto& [d, i] : sorted) out.push_back(i);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::size_t> MockLbs::edge_result(const Query& q, EdgeIdx e) const {
  std::vector<std::size_t> out;
  for (std::size_t i : pois_.on_edge(e))
    if (class_match(q, pois_.poi(i))) out.push_back(i);
  return out;
}

std::vector<std::size_t> MockLbs::segment_result(const Query& q, SegmentId s) const {
  std::vector<std::size_t> out;
  for (EdgeIdx e : segs_[s].edges) {
    auto part = edge_result(q, e);
    out.insert(out.end(), part.begin(), part.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> MockLbs::node_result(const Query& q, NodeIdx v) const {
  auto [sid, off] = segs_.position_of_node(v);
  std::vector<double> nd = node_distances_from_point(net_, segs_, sid, off);
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < pois_.size(); ++i) {
    const Poi& p = pois_.poi(i);
    if (!class_match(q, p)) continue;
    scored.emplace_back(poi_distance(segs_, nd, sid, off, p), i);
  }
  return k_nearest(scored, static_cast<std::size_t>(q.knn_k));
}

std::vector<std::size_t> MockLbs::candidate_result(
    const Query& q, std::span<const SegmentId> region,
    std::span<const NodeIdx> border) const {
  std::vector<std::size_t> out;
  for (SegmentId s : region) {
    auto part = segment_result(q, s);
    out.insert(out.end(), part.begin(), part.end());
  }
  for (NodeIdx v : border) {
    auto part = node_result(q, v);
    out.insert(out.end(), part.begin(), part.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> MockLbs::filter_result(
    const Query& q, std::span<const std::size_t> candidate) const {
  std::vector<double> nd = node_distances_from_point(net_, segs_, q.segment, q.offset);
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i : candidate) {
    const Poi& p = pois_.poi(i);
    if (!class_match(q, p)) continue;
    scored.emplace_back(poi_distance(segs_, nd, q.segment, q.offset, p), i);
  }
  return k_nearest(scored, static_cast<std::size_t>(q.knn_k));
}

std::vector<std::size_t> MockLbs::exact_knn(const Query& q) const {
  std::vector<double> nd = node_distances_from_point(net_, segs_, q.segment, q.offset);
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < pois_.size(); ++i) {
    const Poi& p = pois_.poi(i);
    if (!class_match(q, p)) continue;
    scored.emplace_back(poi_distance(segs_, nd, q.segment, q.offset, p), i);
  }
  return k_nearest(scored, static_cast<std::size_t>(q.knn_k));
}

}  // namespace starcloak
