#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "starcloak/road_network.hpp"

using namespace starcloak;
using namespace starcloak::testing;

TEST_CASE("three-node path loads with expected degrees") {
  std::istringstream nodes("1 0.0 0.0\n2 0.001 0.0\n3 0.002 0.0\n");
  std::istringstream edges("1 1 2 100\n2 2 3 100\n");
  RoadNetwork net = load_network_streams(nodes, edges, "n", "e");
  CHECK(net.node_count() == 3);
  CHECK(net.edge_count() == 2);
  CHECK(net.degree(net.node_by_ext(1)) == 1);
  CHECK(net.degree(net.node_by_ext(2)) == 2);
  CHECK(net.degree(net.node_by_ext(3)) == 1);
}

TEST_CASE("edge referencing a missing node is an integrity error") {
  std::istringstream nodes("1 0 0\n2 0.001 0\n");
  std::istringstream edges("1 1 7 100\n");
  CHECK_THROWS_AS(load_network_streams(nodes, edges, "n", "e"), ParseError);
}

TEST_CASE("malformed line reports the line number") {
  std::istringstream nodes("1 0 0\nbogus line here\n");
  std::istringstream edges("");
  try {
    load_network_streams(nodes, edges, "nodes.txt", "edges.txt");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("nodes.txt:2") != std::string::npos);
  }
}

TEST_CASE("comments and blank lines are skipped") {
  std::istringstream nodes("# header\n1 0 0\n\n2 0.001 0\n");
  std::istringstream edges("1 1 2 50 # trailing\n");
  RoadNetwork net = load_network_streams(nodes, edges, "n", "e");
  CHECK(net.node_count() == 2);
  CHECK(net.edge_count() == 1);
}

TEST_CASE("path a-b-c collapses to one two-edge segment") {
  std::istringstream nodes("1 0 0\n2 0.001 0\n3 0.002 0\n");
  std::istringstream edges("1 1 2 100\n2 2 3 100\n");
  RoadNetwork net = load_network_streams(nodes, edges, "n", "e");
  SegmentSet segs = build_segments(net);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].edges.size() == 2);
  CHECK(segs[0].length == doctest::Approx(200.0));
}

TEST_CASE("cross fixture matches the worked examples") {
  NetFixture f = cross_fixture();

  SUBCASE("segment v4-v5 exists with intersection terminals") {
    SegmentId s = f.seg_between(4, 5);
    CHECK(f.net.degree(f.segs[s].v0()) >= 3);
    CHECK(f.net.degree(f.segs[s].vL()) >= 3);
  }

  SUBCASE("star at v5 covers exactly its three incident segments") {
    StarId phi5 = f.star_at_node(5);
    REQUIRE(phi5 != kInvalidStar);
    std::vector<SegmentId> expect = {f.seg_between(4, 5), f.seg_between(5, 6),
                                     f.seg_between(5, 10)};
    std::sort(expect.begin(), expect.end());
    CHECK(f.stars[phi5].segments == expect);
  }

  SUBCASE("phi5 and phi6 are star-graph neighbors via the shared segment") {
    StarId phi5 = f.star_at_node(5), phi6 = f.star_at_node(6);
    const auto& nb = f.sg.neighbors(phi5);
    CHECK(std::find(nb.begin(), nb.end(), phi6) != nb.end());
  }

  SUBCASE("hop distance phi6 to phi10 is 2") {
    CHECK(f.sg.hop_distance(f.star_at_node(6), f.star_at_node(10), 10) == 2);
    CHECK(f.sg.hop_distance(f.star_at_node(6), f.star_at_node(6), 10) == 0);
  }

  SUBCASE("stars_within radius 1 of phi5 = phi5 plus segment-sharing stars") {
    StarId phi5 = f.star_at_node(5);
    auto within = f.sg.stars_within(phi5, 1);
    std::vector<StarId> expect = {phi5, f.star_at_node(4), f.star_at_node(6),
                                  f.star_at_node(10)};
    std::sort(expect.begin(), expect.end());
    CHECK(within == expect);
    CHECK(f.sg.stars_within(phi5, 0) == std::vector<StarId>{phi5});
  }

  SUBCASE("border nodes of the five-segment example are v2 v4 v7 v10") {
    std::vector<SegmentId> region = {f.seg_between(4, 5), f.seg_between(5, 10),
                                     f.seg_between(5, 6), f.seg_between(6, 7),
                                     f.seg_between(2, 6)};
    auto bv = border_nodes(f.net, f.segs, region);
    std::vector<NodeIdx> expect = {f.n(2), f.n(4), f.n(7), f.n(10)};
    std::sort(expect.begin(), expect.end());
    CHECK(bv == expect);
  }

  SUBCASE("whole network has no border nodes") {
    std::vector<SegmentId> all;
    for (const Segment& s : f.segs.all()) all.push_back(s.id);
    CHECK(border_nodes(f.net, f.segs, all).empty());
  }
}

TEST_CASE("path graph yields zero stars") {
  std::istringstream nodes("1 0 0\n2 0.001 0\n3 0.002 0\n");
  std::istringstream edges("1 1 2 100\n2 2 3 100\n");
  RoadNetwork net = load_network_streams(nodes, edges, "n", "e");
  SegmentSet segs = build_segments(net);
  StarSet stars = build_stars(net, segs);
  CHECK(stars.size() == 0);
}

TEST_CASE("pure degree-2 cycle splits at its lowest node with a warning") {
  std::istringstream nodes("7 0 0\n3 0.001 0\n5 0.001 0.001\n");
  std::istringstream edges("1 7 3 100\n2 3 5 100\n3 5 7 100\n");
  RoadNetwork net = load_network_streams(nodes, edges, "n", "e");
  std::vector<std::string> warnings;
  SegmentSet segs = build_segments(net, &warnings);
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].edges.size() == 3);
  CHECK(segs[0].v0() == segs[0].vL());
  CHECK(segs[0].v0() == net.node_by_ext(3));
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("cycle") != std::string::npos);
}

TEST_CASE("isolated node warns and is skipped") {
  std::istringstream nodes("1 0 0\n2 0.001 0\n3 0.005 0.005\n");
  std::istringstream edges("1 1 2 100\n");
  RoadNetwork net = load_network_streams(nodes, edges, "n", "e");
  std::vector<std::string> warnings;
  SegmentSet segs = build_segments(net, &warnings);
  CHECK(segs.size() == 1);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("isolated") != std::string::npos);
}

TEST_CASE("random networks: decomposition equals the chain oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    NetFixture f = random_fixture(rng, 5 + static_cast<int>(rng.below(36)));
    // Partition property first.
    std::size_t total = 0;
    for (const Segment& s : f.segs.all()) total += s.edges.size();
    REQUIRE(total == f.net.edge_count());

    std::set<std::set<EdgeIdx>> got;
    for (const Segment& s : f.segs.all())
      got.insert(std::set<EdgeIdx>(s.edges.begin(), s.edges.end()));
    CHECK(got == chain_partition_oracle(f.net));

    // Star census and adjacency against their oracles.
    CHECK(f.stars.size() == intersection_census(f.net));
    auto adj_oracle = star_adjacency_oracle(f.stars);
    for (StarId s = 0; s < f.stars.size(); ++s) {
      std::set<StarId> got_adj(f.sg.neighbors(s).begin(), f.sg.neighbors(s).end());
      CHECK(got_adj == adj_oracle[s]);
    }
  }
}

TEST_CASE("hop distances match all-pairs BFS and form a metric") {
  Rng rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    NetFixture f = random_fixture(rng, 20, 0.2);
    if (f.stars.size() < 3) continue;
    auto adj = star_adjacency_oracle(f.stars);
    for (StarId a = 0; a < f.stars.size(); ++a) {
      auto ref = bfs_oracle(adj, a);
      for (StarId b = 0; b < f.stars.size(); ++b)
        CHECK(f.sg.hop_distance(a, b, 1000) == ref[b]);
    }
    // Triangle inequality on random triples.
    for (int i = 0; i < 30; ++i) {
      StarId a = static_cast<StarId>(rng.below(f.stars.size()));
      StarId b = static_cast<StarId>(rng.below(f.stars.size()));
      StarId c = static_cast<StarId>(rng.below(f.stars.size()));
      int ab = f.sg.hop_distance(a, b, 1000);
      int bc = f.sg.hop_distance(b, c, 1000);
      int ac = f.sg.hop_distance(a, c, 1000);
      CHECK(f.sg.hop_distance(a, b, 1000) == f.sg.hop_distance(b, a, 1000));
      if (ab >= 0 && bc >= 0) {
        REQUIRE(ac >= 0);
        CHECK(ac <= ab + bc);
      }
    }
  }
}

TEST_CASE("hop distance respects the cap and rejects unknown stars") {
  NetFixture f = cross_fixture();
  StarId phi6 = f.star_at_node(6), phi10 = f.star_at_node(10);
  CHECK(f.sg.hop_distance(phi6, phi10, 1) == -1);
  CHECK_THROWS_AS(f.sg.hop_distance(900, 0, 3), DataError);
}

TEST_CASE("border nodes match the definition on random subgraphs") {
  Rng rng(31);
  int checked = 0;
  while (checked < 1000) {
    NetFixture f = random_fixture(rng, 8 + static_cast<int>(rng.below(43)));
    if (f.segs.size() < 2) continue;
    for (int rep = 0; rep < 5 && checked < 1000; ++rep, ++checked) {
      std::vector<SegmentId> region;
      for (SegmentId s = 0; s < f.segs.size(); ++s)
        if (rng.bernoulli(0.4)) region.push_back(s);
      if (region.empty()) region.push_back(static_cast<SegmentId>(rng.below(f.segs.size())));
      auto got = border_nodes(f.net, f.segs, region);
      auto want = border_oracle(f.net, f.segs, region);
      CHECK(std::set<NodeIdx>(got.begin(), got.end()) == want);
    }
  }
}

TEST_CASE("point distance is symmetric and respects same-segment shortcuts") {
  NetFixture f = cross_fixture();
  SegmentId s56 = f.seg_between(5, 6);
  double a = f.off_from(s56, 5, 2.0);
  double b = f.off_from(s56, 5, 7.0);
  CHECK(point_distance(f.net, f.segs, s56, a, s56, b) == doctest::Approx(5.0));
  SegmentId s45 = f.seg_between(4, 5);
  double c = f.off_from(s45, 5, 3.0);
  CHECK(point_distance(f.net, f.segs, s56, a, s45, c) == doctest::Approx(5.0));
  CHECK(point_distance(f.net, f.segs, s45, c, s56, a) == doctest::Approx(5.0));
}

TEST_CASE("meter-based cover expands with radius and matches hand distances") {
  NetFixture f = ring10_fixture();  // ring segments 100 m, spurs 50 m
  StarId s4 = f.star_at_node(4);
  // 100 m reaches the two ring neighbors, 199 m still only those, 200 m
  // brings the second ring shell in.
  auto near = f.sg.stars_within_meters(s4, 100.0, f.stars, f.segs);
  CHECK(near.size() == 3);
  auto still = f.sg.stars_within_meters(s4, 199.0, f.stars, f.segs);
  CHECK(still.size() == 3);
  auto wider = f.sg.stars_within_meters(s4, 200.0, f.stars, f.segs);
  CHECK(wider.size() == 5);
  auto self_only = f.sg.stars_within_meters(s4, 50.0, f.stars, f.segs);
  CHECK(self_only == std::vector<StarId>{s4});
}
