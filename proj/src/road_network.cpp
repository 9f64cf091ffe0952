#include "starcloak/road_network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace starcloak {

namespace {
constexpr double kMetersPerDegLat = 111320.0;
}

NodeIdx RoadNetwork::add_node(std::int64_t ext_id, double lon, double lat) {
  NodeIdx idx = static_cast<NodeIdx>(nodes_.size());
  if (!ext_index_.emplace(ext_id, idx).second)
    throw DataError("duplicate node id " + std::to_string(ext_id));
  nodes_.push_back(Node{ext_id, lon, lat, 0.0, 0.0});
  adj_.emplace_back();
  return idx;
}

EdgeIdx RoadNetwork::add_edge(std::int64_t ext_id, std::int64_t ext_a,
                              std::int64_t ext_b, double length) {
  NodeIdx a = node_by_ext(ext_a);
  NodeIdx b = node_by_ext(ext_b);
  if (a == b) throw DataError("self-loop edge " + std::to_string(ext_id));
  EdgeIdx idx = static_cast<EdgeIdx>(edges_.size());
  edges_.push_back(Edge{ext_id, a, b, length});
  adj_[a].push_back({idx, b});
  adj_[b].push_back({idx, a});
  return idx;
}

NodeIdx RoadNetwork::node_by_ext(std::int64_t ext_id) const {
  auto it = ext_index_.find(ext_id);
  if (it == ext_index_.end())
    throw DataError("unknown node id " + std::to_string(ext_id));
  return it->second;
}

void RoadNetwork::finalize() {
  finalized_ = true;
  if (nodes_.empty()) return;
  lat0_ = lon0_ = 0.0;
  for (const Node& n : nodes_) {
    lat0_ += n.lat;
    lon0_ += n.lon;
  }
  lat0_ /= static_cast<double>(nodes_.size());
  lon0_ /= static_cast<double>(nodes_.size());
  mx_ = kMetersPerDegLat * std::cos(lat0_ * M_PI / 180.0);
  min_x_ = min_y_ = 1e300;
  max_x_ = max_y_ = -1e300;
  for (Node& n : nodes_) {
    project(n.lon, n.lat, n.x, n.y);
    min_x_ = std::min(min_x_, n.x);
    max_x_ = std::max(max_x_, n.x);
    min_y_ = std::min(min_y_, n.y);
    max_y_ = std::max(max_y_, n.y);
  }
}

void RoadNetwork::project(double lon, double lat, double& x, double& y) const {
  x = (lon - lon0_) * mx_;
  y = (lat - lat0_) * kMetersPerDegLat;
}

SegmentSet build_segments(const RoadNetwork& net, std::vector<std::string>* warnings) {
  SegmentSet out;
  out.net_ = &net;
  out.edge_segment_.assign(net.edge_count(), kInvalidSegment);
  out.terminal_segments_.assign(net.node_count(), {});
  out.node_segment_.assign(net.node_count(), kInvalidSegment);

  auto is_terminal = [&](NodeIdx v) { return net.degree(v) != 2; };

  auto emit = [&](Segment&& seg) {
    seg.id = static_cast<SegmentId>(out.segments_.size());
    for (EdgeIdx e : seg.edges) out.edge_segment_[e] = seg.id;
    out.terminal_segments_[seg.v0()].push_back(seg.id);
    if (seg.vL() != seg.v0()) out.terminal_segments_[seg.vL()].push_back(seg.id);
    for (NodeIdx v : seg.path)
      if (out.node_segment_[v] == kInvalidSegment) out.node_segment_[v] = seg.id;
    out.segments_.push_back(std::move(seg));
  };

  // Walk a chain starting with edge e out of terminal (or cycle split
  // point) v until the next non-degree-2 node, or back to the start.
  auto walk = [&](NodeIdx v, EdgeIdx e) {
    Segment seg;
    seg.path.push_back(v);
    NodeIdx cur = v;
    EdgeIdx cur_edge = e;
    for (;;) {
      seg.edges.push_back(cur_edge);
      seg.length += net.edge(cur_edge).length;
      NodeIdx nxt = net.other_end(cur_edge, cur);
      seg.path.push_back(nxt);
      if (nxt == v || is_terminal(nxt)) break;
      const auto& adj = net.adjacent(nxt);
      cur_edge = (adj[0].edge == cur_edge) ? adj[1].edge : adj[0].edge;
      cur = nxt;
    }
    return seg;
  };

  for (NodeIdx v = 0; v < net.node_count(); ++v) {
    if (!is_terminal(v)) continue;
    if (net.degree(v) == 0) {
      if (warnings)
        warnings->push_back("isolated node " + std::to_string(net.node(v).ext_id) +
                            " ignored");
      continue;
    }
    for (const AdjEntry& a : net.adjacent(v)) {
      if (out.edge_segment_[a.edge] != kInvalidSegment) continue;
      emit(walk(v, a.edge));
    }
  }

  // Leftover edges belong to pure degree-2 cycles. Split each at its
  // lowest-ext-id node and keep the cycle as one segment.
  for (EdgeIdx e = 0; e < net.edge_count(); ++e) {
    if (out.edge_segment_[e] != kInvalidSegment) continue;
    NodeIdx best = net.edge(e).a;
    NodeIdx cur = best;
    EdgeIdx cur_edge = e;
    do {
      NodeIdx nxt = net.other_end(cur_edge, cur);
      if (net.node(nxt).ext_id < net.node(best).ext_id) best = nxt;
      const auto& adj = net.adjacent(nxt);
      cur_edge = (adj[0].edge == cur_edge) ? adj[1].edge : adj[0].edge;
      cur = nxt;
    } while (cur != net.edge(e).a);
    const auto& adj = net.adjacent(best);
    emit(walk(best, adj[0].edge));
    if (warnings)
      warnings->push_back("degree-2 cycle split at node " +
                          std::to_string(net.node(best).ext_id));
  }
  return out;
}

StarSet build_stars(const RoadNetwork& net, const SegmentSet& segs) {
  StarSet out;
  out.node_star_.assign(net.node_count(), kInvalidStar);
  out.segment_count_ = segs.size();
  for (NodeIdx v = 0; v < net.node_count(); ++v) {
    if (net.degree(v) < 3) continue;
    Star st;
    st.id = static_cast<StarId>(out.stars_.size());
    st.anchor = v;
    st.segments = segs.terminal_segments(v);
    std::sort(st.segments.begin(), st.segments.end());
    st.segments.erase(std::unique(st.segments.begin(), st.segments.end()),
                      st.segments.end());
    out.node_star_[v] = st.id;
    out.stars_.push_back(std::move(st));
  }
  return out;
}

std::pair<SegmentId, double> SegmentSet::position_of_node(NodeIdx v) const {
  if (!terminal_segments_[v].empty()) {
    SegmentId sid = terminal_segments_[v][0];
    const Segment& s = segments_[sid];
    return {sid, s.v0() == v ? 0.0 : s.length};
  }
  SegmentId sid = node_segment_[v];
  if (sid == kInvalidSegment) throw DataError("node not covered by any segment");
  const Segment& s = segments_[sid];
  double off = 0.0;
  for (std::size_t i = 0; i + 1 < s.path.size(); ++i) {
    if (s.path[i] == v) break;
    off += net_->edge(s.edges[i]).length;
  }
  return {sid, off};
}

std::size_t StarSet::count_segments(std::span<const StarId> stars) const {
  std::vector<SegmentId> uni = segment_union(stars);
  return uni.size();
}

std::vector<SegmentId> StarSet::segment_union(std::span<const StarId> stars) const {
  std::vector<SegmentId> uni;
  for (StarId s : stars)
    uni.insert(uni.end(), stars_[s].segments.begin(), stars_[s].segments.end());
  std::sort(uni.begin(), uni.end());
  uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
  return uni;
}

StarGraph build_star_graph(const StarSet& stars, const SegmentSet& segs) {
  StarGraph g;
  g.adj_.assign(stars.size(), {});
  // Two stars sharing any segment are adjacent; a segment has at most two
  // terminal stars.
  for (const Segment& seg : segs.all()) {
    NodeIdx a = seg.v0(), b = seg.vL();
    if (a == b) continue;
    StarId sa = stars.star_at(a), sb = stars.star_at(b);
    if (sa == kInvalidStar || sb == kInvalidStar || sa == sb) continue;
    g.adj_[sa].push_back(sb);
    g.adj_[sb].push_back(sa);
  }
  for (auto& lst : g.adj_) {
    std::sort(lst.begin(), lst.end());
    lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
  }
  return g;
}

int StarGraph::hop_distance(StarId a, StarId b, int cap) const {
  if (a >= size() || b >= size()) throw DataError("unknown star id");
  if (a == b) return 0;
  std::vector<int> dist(size(), -1);
  dist[a] = 0;
  std::deque<StarId> q{a};
  while (!q.empty()) {
    StarId cur = q.front();
    q.pop_front();
    if (dist[cur] >= cap) continue;
    for (StarId nb : adj_[cur]) {
      if (dist[nb] != -1) continue;
      dist[nb] = dist[cur] + 1;
      if (nb == b) return dist[nb];
      q.push_back(nb);
    }
  }
  return -1;
}

std::vector<int> StarGraph::distances_from(StarId s, int radius) const {
  std::vector<int> dist(size(), -1);
  if (s >= size()) throw DataError("unknown star id");
  dist[s] = 0;
  std::deque<StarId> q{s};
  while (!q.empty()) {
    StarId cur = q.front();
    q.pop_front();
    if (dist[cur] >= radius) continue;
    for (StarId nb : adj_[cur]) {
      if (dist[nb] != -1) continue;
      dist[nb] = dist[cur] + 1;
      q.push_back(nb);
    }
  }
  return dist;
}

std::vector<StarId> StarGraph::stars_within(StarId s, int radius) const {
  std::vector<int> dist = distances_from(s, radius);
  std::vector<StarId> out;
  for (StarId i = 0; i < dist.size(); ++i)
    if (dist[i] >= 0) out.push_back(i);
  return out;
}

std::vector<StarId> StarGraph::stars_within_meters(StarId s, double radius,
                                                   const StarSet& stars,
                                                   const SegmentSet& segs) const {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(size(), inf);
  using Item = std::pair<double, StarId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[s] = 0.0;
  pq.emplace(0.0, s);
  while (!pq.empty()) {
    auto [d, cur] = pq.top();
    pq.pop();
    if (d > dist[cur]) continue;
    for (StarId nb : adj_[cur]) {
      // Weight = shortest segment the two stars share.
      double w = inf;
      for (SegmentId sid : stars[cur].segments) {
        const Segment& seg = segs[sid];
        StarId a = stars.star_at(seg.v0());
        StarId b = stars.star_at(seg.vL());
        if ((a == cur && b == nb) || (a == nb && b == cur))
          w = std::min(w, seg.length);
      }
      double nd = d + w;
      if (nd <= radius && nd < dist[nb]) {
        dist[nb] = nd;
        pq.emplace(nd, nb);
      }
    }
  }
  std::vector<StarId> out;
  for (StarId i = 0; i < dist.size(); ++i)
    if (dist[i] < inf) out.push_back(i);
  return out;
}

std::vector<NodeIdx> border_nodes(const RoadNetwork& net, const SegmentSet& segs,
                                  std::span<const SegmentId> segments) {
  // d_S(v) per covered node, then compare with d_G(v).
  std::unordered_map<NodeIdx, std::size_t> deg_s;
  for (SegmentId sid : segments) {
    const Segment& seg = segs[sid];
    for (std::size_t i = 0; i + 1 < seg.path.size(); ++i) {
      deg_s[seg.path[i]] += 1;
      deg_s[seg.path[i + 1]] += 1;
    }
  }
  std::vector<NodeIdx> out;
  for (const auto& [v, ds] : deg_s)
    if (net.degree(v) > ds) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t subgraph_edge_count(const SegmentSet& segs,
                                std::span<const SegmentId> segments) {
  std::size_t n = 0;
  for (SegmentId s : segments) n += segs[s].edges.size();
  return n;
}

std::vector<double> node_distances_from_point(const RoadNetwork& net,
                                              const SegmentSet& segs, SegmentId from,
                                              double offset) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(net.node_count(), inf);
  using Item = std::pair<double, NodeIdx>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  const Segment& s = segs[from];
  auto seed = [&](NodeIdx v, double d) {
    if (d < dist[v]) {
      dist[v] = d;
      pq.emplace(d, v);
    }
  };
  seed(s.v0(), offset);
  seed(s.vL(), s.length - offset);
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    for (SegmentId sid : segs.terminal_segments(v)) {
      const Segment& t = segs[sid];
      NodeIdx other = t.v0() == v ? t.vL() : t.v0();
      seed(other, d + t.length);
    }
  }
  return dist;
}

double point_distance(const RoadNetwork& net, const SegmentSet& segs, SegmentId seg_a,
                      double off_a, SegmentId seg_b, double off_b) {
  std::vector<double> dist = node_distances_from_point(net, segs, seg_a, off_a);
  const Segment& b = segs[seg_b];
  double best = std::min(dist[b.v0()] + off_b, dist[b.vL()] + (b.length - off_b));
  if (seg_a == seg_b) best = std::min(best, std::abs(off_a - off_b));
  return best;
}

namespace {

// Strips comments, skips blanks, tracks line numbers.
class LineReader {
 public:
  LineReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}
  bool next(std::string& out) {
    std::string line;
    while (std::getline(in_, line)) {
      ++lineno_;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      bool blank = line.find_first_not_of(" \t\r\n") == std::string::npos;
      if (blank) continue;
      out = line;
      return true;
    }
    return false;
  }
  std::size_t lineno() const { return lineno_; }
  const std::string& name() const { return name_; }

 private:
  std::istream& in_;
  std::string name_;
  std::size_t lineno_ = 0;
};

}  // namespace

RoadNetwork load_network_streams(std::istream& nodes, std::istream& edges,
                                 const std::string& node_name,
                                 const std::string& edge_name, LoadStats* stats) {
  RoadNetwork net;
  {
    LineReader rd(nodes, node_name);
    std::string line;
    while (rd.next(line)) {
      std::istringstream ss(line);
      std::int64_t id;
      double lon, lat;
      if (!(ss >> id >> lon >> lat))
        throw ParseError(rd.name(), rd.lineno(), "expected `node_id lon lat`");
      net.add_node(id, lon, lat);
    }
  }
  {
    LineReader rd(edges, edge_name);
    std::string line;
    while (rd.next(line)) {
      std::istringstream ss(line);
      std::int64_t id, a, b;
      double len;
      if (!(ss >> id >> a >> b >> len))
        throw ParseError(rd.name(), rd.lineno(), "expected `edge_id node_a node_b length`");
      try {
        net.add_edge(id, a, b, len);
      } catch (const DataError& e) {
        throw ParseError(rd.name(), rd.lineno(), e.what());
      }
    }
  }
  net.finalize();
  if (stats) {
    stats->nodes = net.node_count();
    stats->edges = net.edge_count();
  }
  return net;
}

RoadNetwork load_network(const std::string& node_path, const std::string& edge_path,
                         LoadStats* stats) {
  std::ifstream nf(node_path);
  if (!nf) throw DataError("cannot open node file " + node_path);
  std::ifstream ef(edge_path);
  if (!ef) throw DataError("cannot open edge file " + edge_path);
  return load_network_streams(nf, ef, node_path, edge_path, stats);
}

}  // namespace starcloak
