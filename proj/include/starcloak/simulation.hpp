#ifndef STARCLOAK_SIMULATION_HPP
#define STARCLOAK_SIMULATION_HPP

#include <string>
#include <vector>

#include "starcloak/lbs.hpp"
#include "starcloak/metrics.hpp"
#include "starcloak/mobility.hpp"

namespace starcloak {

struct SimulationConfig {
  std::size_t objects = 100;
  double duration = 300.0;  // virtual seconds
  double dt = 0.1;
  double fast_speed = 20.0;
  double slow_speed = 8.0;
  ProfileParams profile;
  std::uint64_t seed = 1;
  bool evaluate_knn = true;
  std::size_t knn_sample = 200;  // served queries evaluated against the LBS
};

struct SimulationResult {
  std::vector<QueryEvent> events;
  std::vector<RegionEvent> regions;
  MetricsRecord metrics;
  std::size_t answer_mismatches = 0;        // filtered != exact k-NN
  std::size_t containment_violations = 0;   // exact not within candidate
};

// Drives moving objects over virtual time, feeds their queries to the
// anonymizer, then evaluates a sample of served queries against the mock
// LBS. `pois` may be null (skips the k-NN evaluation).
SimulationResult run_simulation(const RoadNetwork& net, const SegmentSet& segs,
                                const StarSet& stars, const StarGraph& sg,
                                const PoiStore* pois, Anonymizer& anonymizer,
                                const SimulationConfig& config);

// Deterministic CSV logs (see README for the columns).
void write_events_csv(const std::string& path, const std::string& algorithm,
                      const std::vector<QueryEvent>& events);
void write_regions_csv(const std::string& path,
                       const std::vector<RegionEvent>& regions);
std::vector<QueryEvent> read_events_csv(const std::string& path);
std::vector<RegionEvent> read_regions_csv(const std::string& path);

std::string events_csv_string(const std::string& algorithm,
                              const std::vector<QueryEvent>& events);
std::string regions_csv_string(const std::vector<RegionEvent>& regions);

}  // namespace starcloak

#endif
