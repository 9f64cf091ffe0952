#ifndef STARCLOAK_CONFIG_HPP
#define STARCLOAK_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "starcloak/cost_model.hpp"
#include "starcloak/engine.hpp"
#include "starcloak/mobility.hpp"
#include "starcloak/simulation.hpp"

namespace starcloak {

// Run configuration: key = value lines, `#` comments, optional [sections]
// flattened as section.key. CLI flags override file values.
struct RunConfig {
  std::string node_path;
  std::string edge_path;
  std::string poi_path;
  std::string bundle_path;

  std::string algorithm = "basic";  // basic|bounded|hybrid|random|expansion
  std::size_t objects = 100;
  double duration = 300.0;
  double dt = 0.1;
  double fast_speed = 20.0;
  double slow_speed = 8.0;

  ProfileParams profile;  // per-query draw means/deviations
  int lambda = 1;
  double alpha = 2.0;
  int qcomb_cap = 256;
  bool literal_star_count_neighbors = false;
  bool sigma_in_meters = false;
  int prune_workers = 1;

  CostParams cost;

  std::uint64_t seed = 1;
  std::string sweep_param;            // empty = single point
  std::vector<double> sweep_values;

  // attack command knobs
  int attack_replays = 8;
  std::uint64_t attack_budget = 128;
  int attack_injections = 0;
  std::size_t attack_max_regions = 0;  // 0 = all

  std::size_t knn_sample = 200;
  double grid_cell = 500.0;
  double grid_margin = 1000.0;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

// Applies one `key=value` override (the CLI flag path).
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

bool valid_sweep_param(const std::string& name);
// Returns a copy with the sweep parameter set to `value`.
RunConfig with_sweep_value(const RunConfig& cfg, const std::string& param, double value);

EngineConfig engine_config_of(const RunConfig& cfg);
SimulationConfig simulation_config_of(const RunConfig& cfg);

// Stable content hash for the run manifest.
std::uint64_t config_hash(const RunConfig& cfg);

}  // namespace starcloak

#endif
