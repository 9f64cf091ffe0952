#include "starcloak/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace starcloak {

SimulationResult run_simulation(const RoadNetwork& net, const SegmentSet& segs,
                                const StarSet& stars, const StarGraph& sg,
                                const PoiStore* pois, Anonymizer& anonymizer,
                                const SimulationConfig& config) {
  (void)stars;
  (void)sg;
  World world(net, segs, config.profile, config.seed);
  world.populate(config.objects, config.fast_speed, config.slow_speed);

  auto wall_start = std::chrono::steady_clock::now();
  const auto steps = static_cast<std::size_t>(std::ceil(config.duration / config.dt));
  double max_sigma_t = 0.0;
  for (std::size_t step = 0; step <= steps; ++step) {
    double now = static_cast<double>(step) * config.dt;
    for (const SimQuery& sq : world.step(now, config.dt)) {
      anonymizer.submit(sq.raw, sq.segment, sq.offset);
      max_sigma_t = std::max(max_sigma_t, sq.raw.profile.sigma_t);
    }
    anonymizer.advance(now);
  }
  // Let every leftover query expire so the log is complete.
  anonymizer.advance(config.duration + max_sigma_t + 1.0);
  double wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start)
          .count();

  SimulationResult res;
  res.events = anonymizer.query_events();
  res.regions = anonymizer.region_events();

  std::vector<double> proc_ms;
  std::vector<std::size_t> cand_sizes;
  if (pois && config.evaluate_knn) {
    std::map<std::uint64_t, const RegionEvent*> by_id;
    for (const RegionEvent& r : res.regions) by_id[r.region_id] = &r;
    MockLbs lbs(net, segs, *pois);
    std::size_t evaluated = 0;
    for (const QueryEvent& ev : res.events) {
      if (ev.outcome != Outcome::kServed) continue;
      if (evaluated >= config.knn_sample) break;
      auto it = by_id.find(ev.region);
      if (it == by_id.end()) continue;
      const RegionEvent& region = *it->second;
      Query q;
      q.id = ev.id;
      q.segment = ev.true_segment;
      q.offset = ev.true_offset;
      q.knn_k = ev.knn_k;
      q.poi_class = ev.poi_class;

      auto t0 = std::chrono::steady_clock::now();
      auto candidate = lbs.candidate_result(q, region.segments, region.border);
      auto filtered = lbs.filter_result(q, candidate);
      double ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
      proc_ms.push_back(ms);
      cand_sizes.push_back(candidate.size());

      auto exact = lbs.exact_knn(q);
      if (filtered != exact) ++res.answer_mismatches;
      for (std::size_t i : exact) {
        if (!std::binary_search(candidate.begin(), candidate.end(), i)) {
          ++res.containment_violations;
          break;
        }
      }
      ++evaluated;
    }
  }

  res.metrics = collect_metrics(res.events, proc_ms, cand_sizes, wall_seconds);
  return res;
}

// ---------------------------------------------------------------------------
// CSV logs. Times print with fixed precision so identical runs produce
// byte-identical files.

namespace {

std::string fmt_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", t);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(xs[i]);
  }
  return out;
}

template <typename T>
std::vector<T> split_ids(const std::string& s) {
  std::vector<T> out;
  std::istringstream ss(s);
  unsigned long long v;
  while (ss >> v) out.push_back(static_cast<T>(v));
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string events_csv_string(const std::string& algorithm,
                              const std::vector<QueryEvent>& events) {
  std::string out =
      "query_id,user,algorithm,issue_t,resolve_t,outcome,reason,region,"
      "true_segment,true_offset,knn_k,poi_class,delta_k,delta_l,sigma_s,sigma_t\n";
  for (const QueryEvent& ev : events) {
    out += std::to_string(ev.id) + ',' + std::to_string(ev.user) + ',' + algorithm +
           ',' + fmt_time(ev.issue_t) + ',' + fmt_time(ev.resolve_t) + ',' +
           (ev.outcome == Outcome::kServed ? "served" : "dropped") + ',' + ev.reason +
           ',' + std::to_string(ev.region) + ',' + std::to_string(ev.true_segment) +
           ',' + fmt_time(ev.true_offset) + ',' + std::to_string(ev.knn_k) + ',' +
           std::to_string(ev.poi_class) + ',' + std::to_string(ev.profile.delta_k) +
           ',' + std::to_string(ev.profile.delta_l) + ',' +
           std::to_string(ev.profile.sigma_s) + ',' + fmt_time(ev.profile.sigma_t) +
           '\n';
  }
  return out;
}

std::string regions_csv_string(const std::vector<RegionEvent>& regions) {
  std::string out = "region_id,t,l_max,k_users,segments,border,cohort,cohort_stars\n";
  for (const RegionEvent& r : regions) {
    out += std::to_string(r.region_id) + ',' + fmt_time(r.t) + ',' +
           std::to_string(r.l_max) + ',' + std::to_string(r.k_users) + ',' +
           join(r.segments) + ',' + join(r.border) + ',' + join(r.cohort) + ',' +
           join(r.cohort_stars) + '\n';
  }
  return out;
}

void write_events_csv(const std::string& path, const std::string& algorithm,
                      const std::vector<QueryEvent>& events) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << events_csv_string(algorithm, events);
}

void write_regions_csv(const std::string& path,
                       const std::vector<RegionEvent>& regions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << regions_csv_string(regions);
}

std::vector<QueryEvent> read_events_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<QueryEvent> out;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 16) throw DataError("bad event row in " + path);
    QueryEvent ev;
    ev.id = std::stoull(f[0]);
    ev.user = std::stoull(f[1]);
    ev.issue_t = std::stod(f[3]);
    ev.resolve_t = std::stod(f[4]);
    ev.outcome = f[5] == "served" ? Outcome::kServed : Outcome::kDropped;
    ev.reason = f[6];
    ev.region = std::stoull(f[7]);
    ev.true_segment = static_cast<SegmentId>(std::stoul(f[8]));
    ev.true_offset = std::stod(f[9]);
    ev.knn_k = std::stoi(f[10]);
    ev.poi_class = std::stoi(f[11]);
    ev.profile.delta_k = std::stoi(f[12]);
    ev.profile.delta_l = std::stoi(f[13]);
    ev.profile.sigma_s = std::stoi(f[14]);
    ev.profile.sigma_t = std::stod(f[15]);
    out.push_back(std::move(ev));
  }
  return out;
}

std::vector<RegionEvent> read_regions_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<RegionEvent> out;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 8) throw DataError("bad region row in " + path);
    RegionEvent r;
    r.region_id = std::stoull(f[0]);
    r.t = std::stod(f[1]);
    r.l_max = std::stoi(f[2]);
    r.k_users = std::stoull(f[3]);
    r.segments = split_ids<SegmentId>(f[4]);
    r.border = split_ids<NodeIdx>(f[5]);
    r.cohort = split_ids<QueryId>(f[6]);
    r.cohort_stars = split_ids<StarId>(f[7]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace starcloak
