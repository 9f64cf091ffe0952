#include "starcloak/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "starcloak/query.hpp"

namespace starcloak {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    throw ConfigError("bad numeric value for " + key + ": " + v);
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
  const std::string& k = key;
  const std::string v = trim(value);
  auto num = [&] { return to_double(k, v); };
  auto integer = [&] { return static_cast<int>(num()); };

  if (k == "nodes") cfg.node_path = v;
  else if (k == "edges") cfg.edge_path = v;
  else if (k == "pois") cfg.poi_path = v;
  else if (k == "bundle") cfg.bundle_path = v;
  else if (k == "algorithm") cfg.algorithm = v;
  else if (k == "objects") cfg.objects = static_cast<std::size_t>(num());
  else if (k == "duration") cfg.duration = num();
  else if (k == "dt") cfg.dt = num();
  else if (k == "fast_speed") cfg.fast_speed = num();
  else if (k == "slow_speed") cfg.slow_speed = num();
  else if (k == "knn_k.mean") cfg.profile.knn_k_mean = num();
  else if (k == "knn_k.dev") cfg.profile.knn_k_dev = num();
  else if (k == "delta_k.mean") cfg.profile.delta_k_mean = num();
  else if (k == "delta_k.dev") cfg.profile.delta_k_dev = num();
  else if (k == "delta_l.mean") cfg.profile.delta_l_mean = num();
  else if (k == "delta_l.dev") cfg.profile.delta_l_dev = num();
  else if (k == "sigma_s.mean") cfg.profile.sigma_s_mean = num();
  else if (k == "sigma_s.dev") cfg.profile.sigma_s_dev = num();
  else if (k == "sigma_t.mean") cfg.profile.sigma_t_mean = num();
  else if (k == "sigma_t.dev") cfg.profile.sigma_t_dev = num();
  else if (k == "gamma.mean") cfg.profile.gamma_mean = num();
  else if (k == "gamma.dev") cfg.profile.gamma_dev = num();
  else if (k == "poi_classes") cfg.profile.poi_classes = integer();
  else if (k == "lambda") cfg.lambda = integer();
  else if (k == "alpha") cfg.alpha = num();
  else if (k == "qcomb_cap") cfg.qcomb_cap = integer();
  else if (k == "literal_star_count_neighbors")
    cfg.literal_star_count_neighbors = v == "true" || v == "1";
  else if (k == "sigma_in_meters") cfg.sigma_in_meters = v == "true" || v == "1";
  else if (k == "prune_workers") cfg.prune_workers = integer();
  else if (k == "cost.c_s") cfg.cost.c_s = num();
  else if (k == "cost.c_v") cfg.cost.c_v = num();
  else if (k == "cost.c_o") cfg.cost.c_o = num();
  else if (k == "cost.rho_o") cfg.cost.rho_o = num();
  else if (k == "cost.beta") cfg.cost.beta = num();
  else if (k == "seed") cfg.seed = static_cast<std::uint64_t>(num());
  else if (k == "sweep_param") cfg.sweep_param = v;
  else if (k == "sweep_values") {
    cfg.sweep_values.clear();
    std::istringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ' '))
      if (!trim(tok).empty()) cfg.sweep_values.push_back(to_double(k, trim(tok)));
  } else if (k == "attack.replays") cfg.attack_replays = integer();
  else if (k == "attack.budget") cfg.attack_budget = static_cast<std::uint64_t>(num());
  else if (k == "attack.injections") cfg.attack_injections = integer();
  else if (k == "attack.max_regions")
    cfg.attack_max_regions = static_cast<std::size_t>(num());
  else if (k == "knn_sample") cfg.knn_sample = static_cast<std::size_t>(num());
  else if (k == "grid_cell") cfg.grid_cell = num();
  else if (k == "grid_margin") cfg.grid_margin = num();
  else throw ConfigError("unknown config key: " + k);
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    apply_override(cfg, key, line.substr(eq + 1));
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::string o;
  auto put = [&o](const std::string& k, const std::string& v) {
    o += k + " = " + v + "\n";
  };
  put("nodes", c.node_path);
  put("edges", c.edge_path);
  put("pois", c.poi_path);
  put("bundle", c.bundle_path);
  put("algorithm", c.algorithm);
  put("objects", std::to_string(c.objects));
  put("duration", fmt(c.duration));
  put("dt", fmt(c.dt));
  put("fast_speed", fmt(c.fast_speed));
  put("slow_speed", fmt(c.slow_speed));
  put("knn_k.mean", fmt(c.profile.knn_k_mean));
  put("knn_k.dev", fmt(c.profile.knn_k_dev));
  put("delta_k.mean", fmt(c.profile.delta_k_mean));
  put("delta_k.dev", fmt(c.profile.delta_k_dev));
  put("delta_l.mean", fmt(c.profile.delta_l_mean));
  put("delta_l.dev", fmt(c.profile.delta_l_dev));
  put("sigma_s.mean", fmt(c.profile.sigma_s_mean));
  put("sigma_s.dev", fmt(c.profile.sigma_s_dev));
  put("sigma_t.mean", fmt(c.profile.sigma_t_mean));
  put("sigma_t.dev", fmt(c.profile.sigma_t_dev));
  put("gamma.mean", fmt(c.profile.gamma_mean));
  put("gamma.dev", fmt(c.profile.gamma_dev));
  put("poi_classes", std::to_string(c.profile.poi_classes));
  put("lambda", std::to_string(c.lambda));
  put("alpha", fmt(c.alpha));
  put("qcomb_cap", std::to_string(c.qcomb_cap));
  put("literal_star_count_neighbors", c.literal_star_count_neighbors ? "true" : "false");
  put("sigma_in_meters", c.sigma_in_meters ? "true" : "false");
  put("prune_workers", std::to_string(c.prune_workers));
  put("cost.c_s", fmt(c.cost.c_s));
  put("cost.c_v", fmt(c.cost.c_v));
  put("cost.c_o", fmt(c.cost.c_o));
  put("cost.rho_o", fmt(c.cost.rho_o));
  put("cost.beta", fmt(c.cost.beta));
  put("seed", std::to_string(c.seed));
  put("sweep_param", c.sweep_param);
  {
    std::string vs;
    for (std::size_t i = 0; i < c.sweep_values.size(); ++i) {
      if (i) vs += ' ';
      vs += fmt(c.sweep_values[i]);
    }
    put("sweep_values", vs);
  }
  put("attack.replays", std::to_string(c.attack_replays));
  put("attack.budget", std::to_string(c.attack_budget));
  put("attack.injections", std::to_string(c.attack_injections));
  put("attack.max_regions", std::to_string(c.attack_max_regions));
  put("knn_sample", std::to_string(c.knn_sample));
  put("grid_cell", fmt(c.grid_cell));
  put("grid_margin", fmt(c.grid_margin));
  return o;
}

bool valid_sweep_param(const std::string& name) {
  return name == "delta_k" || name == "delta_l" || name == "sigma_s" ||
         name == "sigma_t" || name == "knn_k" || name == "objects" ||
         name == "lambda" || name == "alpha";
}

RunConfig with_sweep_value(const RunConfig& cfg, const std::string& param,
                           double value) {
  RunConfig out = cfg;
  if (param == "delta_k") out.profile.delta_k_mean = value;
  else if (param == "delta_l") out.profile.delta_l_mean = value;
  else if (param == "sigma_s") out.profile.sigma_s_mean = value;
  else if (param == "sigma_t") out.profile.sigma_t_mean = value;
  else if (param == "knn_k") out.profile.knn_k_mean = value;
  else if (param == "objects") out.objects = static_cast<std::size_t>(value);
  else if (param == "lambda") out.lambda = static_cast<int>(value);
  else if (param == "alpha") out.alpha = value;
  else throw ConfigError("unknown sweep parameter: " + param);
  return out;
}

EngineConfig engine_config_of(const RunConfig& cfg) {
  EngineConfig e;
  if (cfg.algorithm == "basic") e.mode = EngineConfig::Mode::kBasic;
  else if (cfg.algorithm == "bounded") e.mode = EngineConfig::Mode::kBounded;
  else if (cfg.algorithm == "hybrid") e.mode = EngineConfig::Mode::kHybrid;
  e.lambda = cfg.lambda;
  e.alpha = cfg.alpha;
  e.qcomb_cap = cfg.qcomb_cap;
  e.literal_star_count_neighbors = cfg.literal_star_count_neighbors;
  e.sigma_in_meters = cfg.sigma_in_meters;
  e.prune_workers = cfg.prune_workers;
  e.seed = cfg.seed;
  return e;
}

SimulationConfig simulation_config_of(const RunConfig& cfg) {
  SimulationConfig s;
  s.objects = cfg.objects;
  s.duration = cfg.duration;
  s.dt = cfg.dt;
  s.fast_speed = cfg.fast_speed;
  s.slow_speed = cfg.slow_speed;
  s.profile = cfg.profile;
  s.seed = cfg.seed;
  s.knn_sample = cfg.knn_sample;
  return s;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::string s = serialize_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace starcloak
