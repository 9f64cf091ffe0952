#ifndef STARCLOAK_TESTS_FIXTURES_HPP
#define STARCLOAK_TESTS_FIXTURES_HPP

#include <cmath>
#include <string>
#include <vector>

#include "starcloak/poi.hpp"
#include "starcloak/road_network.hpp"
#include "starcloak/rng.hpp"
#include "starcloak/spatial_index.hpp"

namespace starcloak::testing {

struct NetFixture {
  RoadNetwork net;
  SegmentSet segs;
  StarSet stars;
  StarGraph sg;

  void derive() {
    segs = build_segments(net);
    stars = build_stars(net, segs);
    sg = build_star_graph(stars, segs);
  }

  NodeIdx n(std::int64_t ext) const { return net.node_by_ext(ext); }
  StarId star_at_node(std::int64_t ext) const { return stars.star_at(n(ext)); }
  // Segment whose terminals carry the given ext ids.
  SegmentId seg_between(std::int64_t a, std::int64_t b) const {
    NodeIdx na = n(a), nb = n(b);
    for (const Segment& s : segs.all())
      if ((s.v0() == na && s.vL() == nb) || (s.v0() == nb && s.vL() == na)) return s.id;
    throw DataError("no segment between given nodes");
  }
  // Offset measured from the node with ext id `from`.
  double off_from(SegmentId sid, std::int64_t from, double d) const {
    const Segment& s = segs[sid];
    return s.v0() == n(from) ? d : s.length - d;
  }
};

// The intersection cross of the running example: v5 joins v4, v6 and v10;
// v6 joins v5, v7 and v2; every outer node carries two short dead-end
// spurs so it anchors a star of its own.
// Lengths: v4-v5 = v5-v6 = v5-v10 = v6-v7 = v2-v6 = 10, spurs = 5.
inline NetFixture cross_fixture() {
  NetFixture f;
  auto& net = f.net;
  const double u = 1e-4;  // roughly 11 m per coordinate unit
  net.add_node(5, 0, 0);
  net.add_node(4, -u, 0);
  net.add_node(6, u, 0);
  net.add_node(10, 0, u);
  net.add_node(7, 2 * u, 0);
  net.add_node(2, u, -u);
  net.add_node(110, -0.5 * u, 1.5 * u);
  net.add_node(111, 0.5 * u, 1.5 * u);
  net.add_node(104, -1.5 * u, 0.5 * u);
  net.add_node(105, -1.5 * u, -0.5 * u);
  net.add_node(107, 2.5 * u, 0.5 * u);
  net.add_node(108, 2.5 * u, -0.5 * u);
  net.add_node(102, 0.5 * u, -1.5 * u);
  net.add_node(103, 1.5 * u, -1.5 * u);
  int eid = 1;
  net.add_edge(eid++, 4, 5, 10);
  net.add_edge(eid++, 5, 6, 10);
  net.add_edge(eid++, 5, 10, 10);
  net.add_edge(eid++, 6, 7, 10);
  net.add_edge(eid++, 2, 6, 10);
  net.add_edge(eid++, 10, 110, 5);
  net.add_edge(eid++, 10, 111, 5);
  net.add_edge(eid++, 4, 104, 5);
  net.add_edge(eid++, 4, 105, 5);
  net.add_edge(eid++, 7, 107, 5);
  net.add_edge(eid++, 7, 108, 5);
  net.add_edge(eid++, 2, 102, 5);
  net.add_edge(eid++, 2, 103, 5);
  net.finalize();
  f.derive();
  return f;
}

// Ten stars on a ring, one dead-end spur each. Ring hop distances give the
// variant walkthrough geometry: 11-12 and 12-13 adjacent, 11-13 and 6-8
// two hops apart, 6 far from both 4 and 12.
inline NetFixture ring10_fixture() {
  NetFixture f;
  auto& net = f.net;
  const std::vector<std::int64_t> ring = {4, 5, 6, 7, 8, 13, 12, 11, 10, 9};
  const double u = 1e-4;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    double ang = 2.0 * M_PI * static_cast<double>(i) / ring.size();
    net.add_node(ring[i], std::cos(ang) * 10 * u, std::sin(ang) * 10 * u);
    net.add_node(100 + ring[i], std::cos(ang) * 13 * u, std::sin(ang) * 13 * u);
  }
  int eid = 1;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    net.add_edge(eid++, ring[i], ring[(i + 1) % ring.size()], 100);
    net.add_edge(eid++, ring[i], 100 + ring[i], 50);
  }
  net.finalize();
  f.derive();
  return f;
}

// w x h grid of intersections, spacing `len` meters. Corners have degree
// 2 and collapse into their neighbors' segments.
inline NetFixture grid_fixture(int w, int h, double len = 100.0) {
  NetFixture f;
  auto& net = f.net;
  const double u = 1e-5;
  auto id = [w](int r, int c) { return static_cast<std::int64_t>(r) * w + c + 1; };
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) net.add_node(id(r, c), c * len * u, r * len * u);
  int eid = 1;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (c + 1 < w) net.add_edge(eid++, id(r, c), id(r, c + 1), len);
      if (r + 1 < h) net.add_edge(eid++, id(r, c), id(r + 1, c), len);
    }
  net.finalize();
  f.derive();
  return f;
}

// Random connected-ish simple graph for oracle sweeps.
inline NetFixture random_fixture(Rng& rng, int n, double extra_edge_prob = 0.15) {
  NetFixture f;
  auto& net = f.net;
  const double u = 1e-4;
  for (int i = 0; i < n; ++i)
    net.add_node(i + 1, rng.uniform() * 100 * u, rng.uniform() * 100 * u);
  std::vector<std::pair<int, int>> edges;
  auto has = [&](int a, int b) {
    for (auto& [x, y] : edges)
      if ((x == a && y == b) || (x == b && y == a)) return true;
    return false;
  };
  int eid = 1;
  for (int i = 2; i <= n; ++i) {
    int parent = static_cast<int>(rng.below(i - 1)) + 1;
    edges.emplace_back(parent, i);
    net.add_edge(eid++, parent, i, 10.0 + rng.uniform() * 90.0);
  }
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b)
      if (!has(a, b) && rng.uniform() < extra_edge_prob) {
        edges.emplace_back(a, b);
        net.add_edge(eid++, a, b, 10.0 + rng.uniform() * 90.0);
      }
  net.finalize();
  f.derive();
  return f;
}

// Star layout for the variant scenarios. Star-graph links:
// 5-4, 4-9, 4-10, 9-10, 10-11, 11-12, 12-13, 6-7, 7-8, 7-13.
// Every intersection carries two dead-end spurs (ext 100+n and 200+n), so
// queries planted on spur 100+n are deterministically assigned to star n.
inline NetFixture walkthrough_fixture() {
  NetFixture f;
  auto& net = f.net;
  const double u = 1e-4;
  const std::vector<std::int64_t> stars = {4, 5, 6, 7, 8, 9, 10, 11, 12, 13};
  for (std::size_t i = 0; i < stars.size(); ++i) {
    double ang = 2.0 * M_PI * static_cast<double>(i) / stars.size();
    net.add_node(stars[i], std::cos(ang) * 20 * u, std::sin(ang) * 20 * u);
    net.add_node(100 + stars[i], std::cos(ang) * 24 * u, std::sin(ang) * 24 * u);
    net.add_node(200 + stars[i], std::cos(ang) * 28 * u, std::sin(ang) * 28 * u);
  }
  int eid = 1;
  for (auto [a, b] : std::vector<std::pair<int, int>>{{5, 4},
                                                      {4, 9},
                                                      {4, 10},
                                                      {9, 10},
                                                      {10, 11},
                                                      {11, 12},
                                                      {12, 13},
                                                      {6, 7},
                                                      {7, 8},
                                                      {7, 13}})
    net.add_edge(eid++, a, b, 100);
  for (std::int64_t s : stars) {
    net.add_edge(eid++, s, 100 + s, 50);
    net.add_edge(eid++, s, 200 + s, 50);
  }
  net.finalize();
  f.derive();
  return f;
}

// Star layout for the pruning scenario. Links:
// a(5-1), b(5-10), c(10-12), e(12-7), f(7-2), g(12-15), h(15-9), i(9-3),
// j(12-13), k(13-4), L(13-15); spurs on 5, 7, 9, 10; two spurs on each
// outside star 1..4.
inline NetFixture pruning_fixture() {
  NetFixture f;
  auto& net = f.net;
  const double u = 1e-4;
  const std::vector<std::int64_t> all = {1, 2, 3, 4, 5, 7, 9, 10, 12, 13, 15};
  for (std::size_t i = 0; i < all.size(); ++i)
    net.add_node(all[i], static_cast<double>(i) * u, 0.0);
  auto leaf = [&](std::int64_t owner, int which) {
    std::int64_t id = 1000 + owner * 10 + which;
    net.add_node(id, static_cast<double>(owner) * u, (1.0 + which) * u);
    return id;
  };
  int eid = 1;
  for (auto [a, b] : std::vector<std::pair<int, int>>{{5, 1},
                                                      {5, 10},
                                                      {10, 12},
                                                      {12, 7},
                                                      {7, 2},
                                                      {12, 15},
                                                      {15, 9},
                                                      {9, 3},
                                                      {12, 13},
                                                      {13, 4},
                                                      {13, 15}})
    net.add_edge(eid++, a, b, 100);
  for (std::int64_t owner : {5, 7, 9, 10})
    net.add_edge(eid++, owner, leaf(owner, 1), 50);
  for (std::int64_t owner : {1, 2, 3, 4}) {
    net.add_edge(eid++, owner, leaf(owner, 1), 50);
    net.add_edge(eid++, owner, leaf(owner, 2), 50);
  }
  net.finalize();
  f.derive();
  return f;
}

// Location of a point `offset` meters along a segment (by construction,
// without going through the spatial index).
inline Location loc_at(const RoadNetwork& net, const SegmentSet& segs, SegmentId sid,
                       double offset) {
  Location loc;
  loc.segment = sid;
  loc.offset = offset;
  const Segment& s = segs[sid];
  double rem = offset;
  for (std::size_t i = 0; i < s.edges.size(); ++i) {
    const Edge& e = net.edge(s.edges[i]);
    if (rem <= e.length || i + 1 == s.edges.size()) {
      double t = e.length > 0 ? std::min(1.0, std::max(0.0, rem / e.length)) : 0.0;
      bool forward = s.path[i] == e.a;
      loc.edge = s.edges[i];
      loc.edge_t = forward ? t : 1.0 - t;
      return loc;
    }
    rem -= e.length;
  }
  loc.edge = s.edges.back();
  loc.edge_t = 1.0;
  return loc;
}

// POI layout for the worked 3-NN example on the cross fixture; object
// ids 1..7, all one class.
inline PoiStore cross_pois(const NetFixture& f) {
  PoiStore store;
  auto put = [&](std::int64_t id, SegmentId sid, double off) {
    store.add(id, 0, loc_at(f.net, f.segs, sid, off));
  };
  SegmentId s45 = f.seg_between(4, 5);
  SegmentId s56 = f.seg_between(5, 6);
  SegmentId s510 = f.seg_between(5, 10);
  SegmentId s67 = f.seg_between(6, 7);
  SegmentId s26 = f.seg_between(2, 6);
  SegmentId s10w = f.seg_between(10, 110);
  put(1, s45, f.off_from(s45, 5, 3.0));
  put(2, s10w, f.off_from(s10w, 10, 4.0));
  put(3, s67, f.off_from(s67, 6, 1.0));
  put(4, s26, f.off_from(s26, 6, 2.0));
  put(5, s56, f.off_from(s56, 5, 6.5));
  put(6, s56, f.off_from(s56, 5, 1.0));
  put(7, s510, f.off_from(s510, 5, 2.0));
  return store;
}

}  // namespace starcloak::testing

#endif
