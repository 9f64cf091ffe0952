#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "fixtures.hpp"
#include "starcloak/baselines.hpp"
#include "starcloak/bundle.hpp"
#include "starcloak/cost_model.hpp"
#include "starcloak/simulation.hpp"

using namespace starcloak;
using namespace starcloak::testing;

TEST_CASE("mid-segment motion advances the offset exactly") {
  NetFixture f = ring10_fixture();
  World world(f.net, f.segs, ProfileParams{}, 1);
  world.populate(1, 10.0, 10.0);
  MovingObject& obj = world.object(0);
  obj.segment = f.seg_between(4, 5);  // length 100
  obj.offset = 20.0;
  obj.direction = 1;
  obj.next_query_t = 1e9;
  world.step(0.0, 3.0);  // 30 m at 10 m/s
  CHECK(obj.segment == f.seg_between(4, 5));
  CHECK(obj.offset == doctest::Approx(50.0));
}

TEST_CASE("dead ends reverse direction") {
  NetFixture f = ring10_fixture();
  World world(f.net, f.segs, ProfileParams{}, 1);
  world.populate(1, 10.0, 10.0);
  MovingObject& obj = world.object(0);
  SegmentId spur = f.seg_between(4, 104);  // length 50, leaf at one end
  obj.segment = spur;
  // Aim at the leaf terminal.
  bool leaf_is_vL = f.net.degree(f.segs[spur].vL()) == 1;
  obj.direction = leaf_is_vL ? 1 : -1;
  obj.offset = leaf_is_vL ? 30.0 : 20.0;
  obj.next_query_t = 1e9;
  world.step(0.0, 3.0);  // 30 m: 20 to the leaf, bounce, 10 back
  CHECK(obj.segment == spur);
  double dist_from_leaf = leaf_is_vL ? f.segs[spur].length - obj.offset : obj.offset;
  CHECK(dist_from_leaf == doctest::Approx(10.0));
}

TEST_CASE("symmetric 4-cycle occupancy is uniform in the long run") {
  // Four intersections on a cycle, one spur each, all cycle segments
  // equal. By symmetry each cycle segment should carry 1/4 of the cycle
  // dwell time.
  NetFixture f;
  const double u = 1e-4;
  for (int i = 0; i < 4; ++i) {
    double ang = 2.0 * M_PI * i / 4;
    f.net.add_node(i + 1, std::cos(ang) * 10 * u, std::sin(ang) * 10 * u);
    f.net.add_node(100 + i + 1, std::cos(ang) * 13 * u, std::sin(ang) * 13 * u);
  }
  int eid = 1;
  for (int i = 0; i < 4; ++i) {
    f.net.add_edge(eid++, i + 1, (i + 1) % 4 + 1, 100);
    f.net.add_edge(eid++, i + 1, 100 + i + 1, 40);
  }
  f.net.finalize();
  f.derive();

  World world(f.net, f.segs, ProfileParams{}, 99);
  world.populate(1, 12.0, 12.0);
  MovingObject& obj = world.object(0);
  obj.next_query_t = 1e18;

  std::map<SegmentId, long> dwell;
  const int steps = 1000000;
  for (int i = 0; i < steps; ++i) {
    world.step(0.0, 0.1);
    dwell[obj.segment]++;
  }
  std::vector<SegmentId> ring;
  for (const Segment& s : f.segs.all())
    if (s.length == doctest::Approx(100.0)) ring.push_back(s.id);
  REQUIRE(ring.size() == 4);
  long ring_total = 0;
  for (SegmentId s : ring) ring_total += dwell[s];
  for (SegmentId s : ring) {
    double share = static_cast<double>(dwell[s]) / static_cast<double>(ring_total);
    CHECK(share > 0.25 * 0.95);
    CHECK(share < 0.25 * 1.05);
  }
}

TEST_CASE("profile clipping keeps draws in the valid domain") {
  CHECK(clip_round(-3.7, 1) == 1);
  CHECK(clip_round(4.4, 1) == 4);
  CHECK(clip_round(4.6, 1) == 5);
  CHECK(clip_time(-2.0) == doctest::Approx(0.1));
  CHECK(clip_time(3.5) == doctest::Approx(3.5));

  // Sampled profiles always observe the bounds.
  NetFixture f = ring10_fixture();
  ProfileParams params;
  params.delta_k_mean = 1.0;  // forces frequent clipping
  params.delta_k_dev = 3.0;
  params.sigma_t_mean = 0.2;
  params.sigma_t_dev = 1.0;
  World world(f.net, f.segs, params, 3);
  world.populate(50, 15.0, 8.0);
  int emitted = 0;
  for (int step = 0; step < 400; ++step) {
    for (const SimQuery& sq : world.step(step * 0.5, 0.5)) {
      ++emitted;
      CHECK(sq.raw.profile.delta_k >= 1);
      CHECK(sq.raw.profile.delta_l >= 1);
      CHECK(sq.raw.profile.sigma_s >= 1);
      CHECK(sq.raw.profile.sigma_t >= 0.1);
      CHECK(sq.raw.knn_k >= 1);
    }
  }
  CHECK(emitted > 100);
}

TEST_CASE("metrics aggregate a synthetic log the way a spreadsheet would") {
  std::vector<QueryEvent> events;
  for (int i = 0; i < 10; ++i) {
    QueryEvent ev;
    ev.id = i + 1;
    ev.issue_t = 10.0 * i;
    if (i < 7) {
      ev.outcome = Outcome::kServed;
      ev.resolve_t = ev.issue_t + 2.0 + i;  // latencies 2..8
    } else {
      ev.outcome = Outcome::kDropped;
      ev.resolve_t = ev.issue_t + 10.0;
    }
    events.push_back(ev);
  }
  MetricsRecord m = collect_metrics(events, {4.0, 6.0}, {10, 20, 30}, 2.0);
  CHECK(m.issued == 10);
  CHECK(m.served == 7);
  CHECK(m.success_rate == doctest::Approx(0.7));
  CHECK(m.mean_anon_time == doctest::Approx((2 + 3 + 4 + 5 + 6 + 7 + 8) / 7.0));
  CHECK(m.mean_processing_ms == doctest::Approx(5.0));
  CHECK(m.mean_candidate_size == doctest::Approx(20.0));
  CHECK(m.throughput == doctest::Approx((10 / 2.0) * 0.7));

  MetricsRecord empty = collect_metrics({}, {}, {}, 1.0);
  CHECK(empty.empty_run);
  CHECK(empty.success_rate == doctest::Approx(0.0));
}

TEST_CASE("instant service means zero anonymization time") {
  std::vector<QueryEvent> events(3);
  for (int i = 0; i < 3; ++i) {
    events[i].issue_t = i;
    events[i].resolve_t = i;
    events[i].outcome = Outcome::kServed;
  }
  CHECK(collect_metrics(events, {}, {}, 1.0).mean_anon_time == doctest::Approx(0.0));
}

TEST_CASE("event and region logs round-trip through CSV") {
  namespace fs = std::filesystem;
  NetFixture f = ring10_fixture();
  StarCostCache costs(f.net, f.segs, f.stars);
  Engine engine(f.net, f.segs, f.stars, f.sg, costs, CostParams{}, EngineConfig{});
  PoiStore pois;
  SegmentId s = f.seg_between(4, 5);
  pois.add(1, 0, loc_at(f.net, f.segs, s, 10.0));
  pois.add(2, 0, loc_at(f.net, f.segs, s, 60.0));

  SimulationConfig cfg;
  cfg.objects = 30;
  cfg.duration = 40.0;
  cfg.seed = 5;
  cfg.profile.delta_k_mean = 2;
  cfg.profile.sigma_t_mean = 8;
  SimulationResult res =
      run_simulation(f.net, f.segs, f.stars, f.sg, &pois, engine, cfg);
  REQUIRE(res.events.size() > 10);
  REQUIRE(!res.regions.empty());

  fs::path dir = fs::temp_directory_path() / "starcloak_csv_test";
  fs::create_directories(dir);
  write_events_csv((dir / "events.csv").string(), "basic", res.events);
  write_regions_csv((dir / "regions.csv").string(), res.regions);
  auto events2 = read_events_csv((dir / "events.csv").string());
  auto regions2 = read_regions_csv((dir / "regions.csv").string());

  REQUIRE(events2.size() == res.events.size());
  for (std::size_t i = 0; i < events2.size(); ++i) {
    CHECK(events2[i].id == res.events[i].id);
    CHECK(events2[i].outcome == res.events[i].outcome);
    CHECK(events2[i].true_segment == res.events[i].true_segment);
    CHECK(events2[i].profile.delta_k == res.events[i].profile.delta_k);
  }
  REQUIRE(regions2.size() == res.regions.size());
  for (std::size_t i = 0; i < regions2.size(); ++i) {
    CHECK(regions2[i].segments == res.regions[i].segments);
    CHECK(regions2[i].cohort == res.regions[i].cohort);
    CHECK(regions2[i].cohort_stars == res.regions[i].cohort_stars);
  }
  fs::remove_all(dir);
}

TEST_CASE("identical config and seed reproduce the event log byte for byte") {
  NetFixture f = ring10_fixture();
  StarCostCache costs(f.net, f.segs, f.stars);
  SimulationConfig cfg;
  cfg.objects = 25;
  cfg.duration = 30.0;
  cfg.seed = 424242;
  cfg.profile.delta_k_mean = 2;
  cfg.evaluate_knn = false;

  auto run_once = [&](EngineConfig::Mode mode) {
    EngineConfig ec;
    ec.mode = mode;
    ec.seed = cfg.seed;
    Engine engine(f.net, f.segs, f.stars, f.sg, costs, CostParams{}, ec);
    SimulationResult res =
        run_simulation(f.net, f.segs, f.stars, f.sg, nullptr, engine, cfg);
    return events_csv_string("m", res.events) + regions_csv_string(res.regions);
  };
  for (EngineConfig::Mode mode :
       {EngineConfig::Mode::kBasic, EngineConfig::Mode::kBounded,
        EngineConfig::Mode::kHybrid})
    CHECK(run_once(mode) == run_once(mode));

  auto run_baseline = [&](BaselineKind kind) {
    BaselineAnonymizer anon(f.net, f.segs, f.stars, f.sg, kind, cfg.seed);
    SimulationResult res =
        run_simulation(f.net, f.segs, f.stars, f.sg, nullptr, anon, cfg);
    return events_csv_string("b", res.events) + regions_csv_string(res.regions);
  };
  for (BaselineKind kind :
       {BaselineKind::kRandomSampling, BaselineKind::kNetworkExpansion})
    CHECK(run_baseline(kind) == run_baseline(kind));
}

TEST_CASE("simulated engine run serves queries and answers them exactly") {
  NetFixture f = grid_fixture(6, 6, 100.0);
  StarCostCache costs(f.net, f.segs, f.stars);
  PoiStore pois;
  Rng rng(8);
  for (int i = 0; i < 40; ++i) {
    SegmentId sid = static_cast<SegmentId>(rng.below(f.segs.size()));
    pois.add(i + 1, 0, loc_at(f.net, f.segs, sid, rng.uniform() * f.segs[sid].length));
  }
  EngineConfig ec;
  ec.seed = 77;
  Engine engine(f.net, f.segs, f.stars, f.sg, costs, CostParams{}, ec);
  SimulationConfig cfg;
  cfg.objects = 60;
  cfg.duration = 60.0;
  cfg.seed = 77;
  cfg.profile.delta_k_mean = 3;
  cfg.profile.delta_k_dev = 1;
  SimulationResult res =
      run_simulation(f.net, f.segs, f.stars, f.sg, &pois, engine, cfg);
  CHECK(res.metrics.served > 10);
  CHECK(res.answer_mismatches == 0);
  CHECK(res.containment_violations == 0);
  CHECK(engine.soundness_violations() == 0);
}
