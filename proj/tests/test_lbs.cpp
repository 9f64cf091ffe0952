#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "starcloak/lbs.hpp"

using namespace starcloak;
using namespace starcloak::testing;

namespace {

std::vector<std::int64_t> ids_of(const PoiStore& pois,
                                 const std::vector<std::size_t>& idx) {
  std::vector<std::int64_t> out;
  for (std::size_t i : idx) out.push_back(pois.poi(i).id);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("worked 3-NN example: segment, node and candidate results") {
  NetFixture f = cross_fixture();
  PoiStore pois = cross_pois(f);
  MockLbs lbs(f.net, f.segs, pois);

  Query q;
  q.knn_k = 3;
  q.poi_class = -1;
  SegmentId s56 = f.seg_between(5, 6);
  q.segment = s56;
  q.offset = f.off_from(s56, 5, 4.0);

  SUBCASE("segment result picks up o5 and o6") {
    CHECK(ids_of(pois, lbs.segment_result(q, s56)) == std::vector<std::int64_t>{5, 6});
  }

  SUBCASE("node results at the segment ends") {
    CHECK(ids_of(pois, lbs.node_result(q, f.n(5))) ==
          std::vector<std::int64_t>{1, 6, 7});
    CHECK(ids_of(pois, lbs.node_result(q, f.n(6))) ==
          std::vector<std::int64_t>{3, 4, 5});
  }

  SUBCASE("exact answer is {o5, o6, o7} and is contained in the candidate") {
    CHECK(ids_of(pois, lbs.exact_knn(q)) == std::vector<std::int64_t>{5, 6, 7});

    std::vector<SegmentId> region{s56};
    auto border = border_nodes(f.net, f.segs, region);
    auto candidate = lbs.candidate_result(q, region, border);
    CHECK(ids_of(pois, candidate) == std::vector<std::int64_t>{1, 3, 4, 5, 6, 7});

    auto filtered = lbs.filter_result(q, candidate);
    CHECK(ids_of(pois, filtered) == std::vector<std::int64_t>{5, 6, 7});
  }

  SUBCASE("empty edge yields an empty result") {
    SegmentId spur = f.seg_between(2, 102);
    CHECK(lbs.segment_result(q, spur).empty());
  }
}

TEST_CASE("node result equals brute-force k nearest by network distance") {
  Rng rng(111);
  for (int trial = 0; trial < 10; ++trial) {
    NetFixture f = random_fixture(rng, 25, 0.2);
    if (f.segs.size() < 4) continue;
    PoiStore pois;
    for (int i = 0; i < 30; ++i) {
      SegmentId sid = static_cast<SegmentId>(rng.below(f.segs.size()));
      double off = rng.uniform() * f.segs[sid].length;
      pois.add(i + 1, 0, loc_at(f.net, f.segs, sid, off));
    }
    MockLbs lbs(f.net, f.segs, pois);
    Query q;
    q.knn_k = 4;
    q.poi_class = -1;
    for (NodeIdx v = 0; v < f.net.node_count(); ++v) {
      if (f.net.degree(v) == 0) continue;
      auto [sid, off] = f.segs.position_of_node(v);
      auto got = lbs.node_result(q, v);
      auto want = knn_edge_oracle(f.net, f.segs, pois, sid, off, 4, -1);
      CHECK(got == want);
    }
  }
}

TEST_CASE("random cloaked queries: exact answer within candidate, filter exact") {
  Rng rng(121);
  int checked = 0;
  while (checked < 1000) {
    NetFixture f = random_fixture(rng, 20, 0.25);
    if (f.segs.size() < 5 || f.stars.size() < 2) continue;
    PoiStore pois;
    for (int i = 0; i < 25; ++i) {
      SegmentId sid = static_cast<SegmentId>(rng.below(f.segs.size()));
      pois.add(i + 1, static_cast<int>(rng.below(3)),
               loc_at(f.net, f.segs, sid, rng.uniform() * f.segs[sid].length));
    }
    MockLbs lbs(f.net, f.segs, pois);
    for (int rep = 0; rep < 25 && checked < 1000; ++rep, ++checked) {
      Query q;
      q.knn_k = 1 + static_cast<int>(rng.below(5));
      q.poi_class = rng.bernoulli(0.5) ? -1 : static_cast<int>(rng.below(3));
      q.segment = static_cast<SegmentId>(rng.below(f.segs.size()));
      q.offset = rng.uniform() * f.segs[q.segment].length;

      // Region: the true segment plus a few random extras.
      std::vector<SegmentId> region{q.segment};
      for (int i = 0; i < 3; ++i)
        region.push_back(static_cast<SegmentId>(rng.below(f.segs.size())));
      std::sort(region.begin(), region.end());
      region.erase(std::unique(region.begin(), region.end()), region.end());

      auto border = border_nodes(f.net, f.segs, region);
      auto candidate = lbs.candidate_result(q, region, border);
      auto filtered = lbs.filter_result(q, candidate);
      auto exact = lbs.exact_knn(q);
      auto oracle = knn_edge_oracle(f.net, f.segs, pois, q.segment, q.offset,
                                    q.knn_k, q.poi_class);

      // Containment: the exact answer always sits inside the candidate.
      for (std::size_t i : exact)
        CHECK(std::binary_search(candidate.begin(), candidate.end(), i));
      // The filtered candidate equals the exact answer, which matches the
      // independent edge-level oracle.
      CHECK(filtered == exact);
      CHECK(exact == oracle);
    }
  }
}

TEST_CASE("class filter restricts every result") {
  NetFixture f = cross_fixture();
  PoiStore pois;
  SegmentId s56 = f.seg_between(5, 6);
  pois.add(1, 0, loc_at(f.net, f.segs, s56, 2.0));
  pois.add(2, 1, loc_at(f.net, f.segs, s56, 3.0));
  pois.add(3, 1, loc_at(f.net, f.segs, s56, 7.0));
  MockLbs lbs(f.net, f.segs, pois);
  Query q;
  q.knn_k = 3;
  q.poi_class = 1;
  q.segment = s56;
  q.offset = 5.0;
  CHECK(ids_of(pois, lbs.exact_knn(q)) == std::vector<std::int64_t>{2, 3});
  CHECK(ids_of(pois, lbs.segment_result(q, s56)) == std::vector<std::int64_t>{2, 3});
}
