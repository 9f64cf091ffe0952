// Command-line front door: build network bundles, run simulations and
// parameter sweeps, evaluate inference attacks, and pivot metrics into
// comparison tables.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "starcloak/attack.hpp"
#include "starcloak/bundle.hpp"
#include "starcloak/config.hpp"
#include "starcloak/simulation.hpp"

namespace fs = std::filesystem;
using namespace starcloak;

namespace {

constexpr const char* kVersion = "starcloak 0.1.0";

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

void write_manifest(const fs::path& dir, const RunConfig& cfg,
                    const std::string& command) {
  std::string m;
  m += "version = " + std::string(kVersion) + "\n";
  m += "command = " + command + "\n";
  m += "config_hash = " + std::to_string(config_hash(cfg)) + "\n";
  m += "seed = " + std::to_string(cfg.seed) + "\n";
  write_file(dir / "manifest.txt", m);
}

std::unique_ptr<Anonymizer> make_anonymizer(const std::string& algorithm,
                                            const BuildArtifacts& art,
                                            const StarCostCache& costs,
                                            const RunConfig& cfg) {
  if (algorithm == "random")
    return std::make_unique<BaselineAnonymizer>(*art.net, *art.segs, *art.stars,
                                                *art.sg, BaselineKind::kRandomSampling,
                                                cfg.seed);
  if (algorithm == "expansion")
    return std::make_unique<BaselineAnonymizer>(*art.net, *art.segs, *art.stars,
                                                *art.sg,
                                                BaselineKind::kNetworkExpansion,
                                                cfg.seed);
  RunConfig rc = cfg;
  rc.algorithm = algorithm;
  return std::make_unique<Engine>(*art.net, *art.segs, *art.stars, *art.sg, costs,
                                  cfg.cost, engine_config_of(rc));
}

BuildArtifacts load_inputs(const RunConfig& cfg) {
  if (!cfg.bundle_path.empty()) return load_bundle(cfg.bundle_path);
  if (cfg.node_path.empty() || cfg.edge_path.empty())
    throw ConfigError("config needs either bundle or nodes+edges paths");
  RoadNetwork net = load_network(cfg.node_path, cfg.edge_path);
  return build_artifacts(std::move(net), cfg.grid_cell, cfg.grid_margin);
}

std::string run_tag(const std::string& algo, const std::string& param, double value,
                    std::uint64_t seed) {
  std::string v = fmt_g(value);
  for (char& c : v)
    if (c == '.') c = 'p';
  return algo + "_" + (param.empty() ? "none" : param) + "_" + v + "_s" +
         std::to_string(seed);
}

int cmd_build(const RunConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  LoadStats stats;
  RoadNetwork net = load_network(cfg.node_path, cfg.edge_path, &stats);
  BuildArtifacts art = build_artifacts(std::move(net), cfg.grid_cell, cfg.grid_margin);
  fs::path bundle = fs::path(out_dir) / "network.scbn";
  write_bundle(bundle.string(), art);
  std::printf("loaded %zu nodes, %zu edges\n", stats.nodes, stats.edges);
  std::printf("segments: %zu  stars: %zu\n", art.segs->size(), art.stars->size());
  std::printf("bundle: %s\n", bundle.string().c_str());
  write_manifest(out_dir, cfg, "build");
  return 0;
}

int cmd_simulate(const RunConfig& cfg, const std::vector<std::string>& algorithms,
                 const std::string& out_dir) {
  fs::create_directories(out_dir);
  BuildArtifacts art = load_inputs(cfg);
  std::unique_ptr<PoiStore> pois;
  if (!cfg.poi_path.empty()) {
    pois = std::make_unique<PoiStore>(
        load_pois(cfg.poi_path, *art.index, art.net->edge_count()));
  }
  // Measured object counts back the communication cost when POIs exist.
  StarCostCache costs = pois ? StarCostCache(*art.net, *art.segs, *art.stars, *pois)
                             : StarCostCache(*art.net, *art.segs, *art.stars);

  std::string param = cfg.sweep_param;
  std::vector<double> values = cfg.sweep_values;
  if (!param.empty() && !valid_sweep_param(param))
    throw ConfigError("unknown sweep parameter: " + param);
  if (values.empty()) values.push_back(0.0);  // single point marker

  std::string metrics_csv =
      "algorithm,sweep_param,sweep_value,seed,issued,served,dropped,success_rate,"
      "mean_anon_time,mean_processing_ms,mean_candidate_size,throughput\n";

  for (double value : values) {
    RunConfig point = param.empty() ? cfg : with_sweep_value(cfg, param, value);
    for (const std::string& algo : algorithms) {
      RunConfig pc = point;
      pc.algorithm = algo;
      if (pois) pc.cost.rho_o = pois->objects_per_edge(art.net->edge_count());
      auto anon = make_anonymizer(algo, art, costs, pc);
      SimulationConfig sim = simulation_config_of(pc);
      SimulationResult res = run_simulation(*art.net, *art.segs, *art.stars, *art.sg,
                                            pois.get(), *anon, sim);
      std::string tag = run_tag(algo, param, value, pc.seed);
      write_events_csv((fs::path(out_dir) / ("events_" + tag + ".csv")).string(),
                       algo, res.events);
      write_regions_csv((fs::path(out_dir) / ("regions_" + tag + ".csv")).string(),
                        res.regions);
      const MetricsRecord& m = res.metrics;
      char row[512];
      std::snprintf(row, sizeof(row),
                    "%s,%s,%s,%llu,%zu,%zu,%zu,%.6f,%.4f,%.4f,%.4f,%.4f\n",
                    algo.c_str(), (param.empty() ? "none" : param.c_str()),
                    fmt_g(value).c_str(), static_cast<unsigned long long>(pc.seed),
                    m.issued, m.served, m.dropped, m.success_rate, m.mean_anon_time,
                    m.mean_processing_ms, m.mean_candidate_size, m.throughput);
      metrics_csv += row;
      std::printf("%s: issued=%zu served=%zu success=%.3f\n", tag.c_str(), m.issued,
                  m.served, m.success_rate);
    }
  }
  write_file(fs::path(out_dir) / "metrics.csv", metrics_csv);
  write_manifest(out_dir, cfg, "simulate");
  return 0;
}

int cmd_attack(const RunConfig& cfg, const std::string& algorithm,
               const std::string& events_path, const std::string& regions_path,
               const std::string& out_dir) {
  fs::create_directories(out_dir);
  BuildArtifacts art = load_inputs(cfg);
  StarCostCache costs(*art.net, *art.segs, *art.stars);
  auto events = read_events_csv(events_path);
  auto regions = read_regions_csv(regions_path);

  RunConfig rc = cfg;
  rc.algorithm = (algorithm == "random" || algorithm == "expansion") ? "basic"
                                                                     : algorithm;
  ReplayContext ctx{*art.net, *art.segs, *art.stars, *art.sg, costs, cfg.cost,
                    engine_config_of(rc)};

  std::map<QueryId, const QueryEvent*> by_id;
  for (const QueryEvent& ev : events) by_id[ev.id] = &ev;

  std::vector<RegionAttackRow> rows;
  std::size_t evaluated = 0;
  for (const RegionEvent& region : regions) {
    if (region.segments.empty() || region.cohort.empty()) {
      std::fprintf(stderr, "warning: region %llu has no geometry, skipped\n",
                   static_cast<unsigned long long>(region.region_id));
      continue;
    }
    if (cfg.attack_max_regions && evaluated >= cfg.attack_max_regions) break;
    ++evaluated;

    for (int inj = 0; inj <= cfg.attack_injections; ++inj) {
      // The sweep plants cohort co-users as adversary queries (victim is
      // cohort[0]); stop once every co-user is already planted.
      if (inj > 0 && inj >= static_cast<int>(region.cohort.size())) break;
      AttackKnowledge kn;
      kn.cohort_k = static_cast<int>(region.cohort.size());
      kn.replays = cfg.attack_replays;
      kn.budget = cfg.attack_budget;
      kn.seed = cfg.seed ^ region.region_id;
      for (int j = 0; j < inj; ++j) {
        auto it = by_id.find(region.cohort[j + 1]);
        if (it != by_id.end()) kn.injected.push_back(it->second->true_segment);
      }
      auto cloaker = make_replay_cloaker(algorithm, ctx, region, events, 0);
      LinkabilityProfile prof = linkability(region.segments, *cloaker, kn);
      RegionAttackRow row;
      row.region_id = region.region_id;
      row.algorithm = algorithm;
      row.size = region.segments.size();
      row.k = kn.cohort_k;
      row.injections = static_cast<int>(kn.injected.size());
      row.entropy = prof.entropy;
      row.normalized_entropy = prof.normalized_entropy;
      row.max_linkability = *std::max_element(prof.link.begin(), prof.link.end());
      rows.push_back(std::move(row));
    }
  }
  write_file(fs::path(out_dir) / ("attack_" + algorithm + ".csv"),
             attack_report_csv(rows));
  write_manifest(out_dir, cfg, "attack");
  std::printf("evaluated %zu regions\n", evaluated);
  return 0;
}

int cmd_report(const std::vector<std::string>& metrics_files,
               const std::string& out_dir) {
  fs::create_directories(out_dir);
  struct Row {
    std::string algo, param;
    double value;
    std::map<std::string, double> metric;
  };
  std::vector<Row> rows;
  std::vector<std::string> header;
  for (const std::string& file : metrics_files) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open metrics file " + file);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty metrics file " + file);
    std::vector<std::string> cols;
    {
      std::istringstream ss(line);
      std::string tok;
      while (std::getline(ss, tok, ',')) cols.push_back(tok);
    }
    if (header.empty()) header = cols;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ss(line);
      std::string tok;
      std::vector<std::string> f;
      while (std::getline(ss, tok, ',')) f.push_back(tok);
      if (f.size() != cols.size()) throw DataError("ragged metrics row in " + file);
      Row r;
      r.algo = f[0];
      r.param = f[1];
      r.value = std::stod(f[2]);
      for (std::size_t i = 4; i < cols.size(); ++i) r.metric[cols[i]] = std::stod(f[i]);
      rows.push_back(std::move(r));
    }
  }
  if (rows.empty()) throw DataError("no metrics rows");
  std::set<std::string> params;
  for (const Row& r : rows) params.insert(r.param);
  if (params.size() != 1) throw DataError("mismatched sweep axes across metrics files");

  std::set<std::string> algos;
  std::set<double> values;
  for (const Row& r : rows) {
    algos.insert(r.algo);
    values.insert(r.value);
  }
  std::vector<std::string> metric_names;
  for (std::size_t i = 4; i < header.size(); ++i) metric_names.push_back(header[i]);

  for (const std::string& metric : metric_names) {
    std::string csv = *params.begin();
    for (const std::string& a : algos) csv += "," + a;
    csv += "\n";
    for (double v : values) {
      csv += fmt_g(v);
      for (const std::string& a : algos) {
        double acc = 0.0;
        int n = 0;
        for (const Row& r : rows)
          if (r.algo == a && r.value == v && r.metric.count(metric)) {
            acc += r.metric.at(metric);
            ++n;
          }
        csv += ",";
        csv += n ? fmt_g(acc / n) : "";
      }
      csv += "\n";
    }
    write_file(fs::path(out_dir) / ("report_" + metric + ".csv"), csv);
  }
  std::printf("wrote %zu report tables to %s\n", metric_names.size(), out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"StarCloak road-network location cloaking toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", algorithm, sweep_arg;
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option_function<std::uint64_t>(
        "--seed",
        [&](const std::uint64_t& s) {
          seed = s;
          seed_set = true;
        },
        "master seed");
  };

  auto* build = app.add_subcommand("build", "build network artifacts bundle");
  std::string nodes_path, edges_path;
  build->add_option("--nodes", nodes_path, "node file");
  build->add_option("--edges", edges_path, "edge file");
  add_common(build);

  auto* simulate = app.add_subcommand("simulate", "run the mobility simulation");
  simulate->add_option("--algorithm", algorithm,
                       "basic|bounded|hybrid|random|expansion|all");
  simulate->add_option("--sweep", sweep_arg, "PARAM=v1,v2,...");
  add_common(simulate);

  auto* attack = app.add_subcommand("attack", "evaluate inference attacks on logs");
  std::string events_path, regions_path;
  attack->add_option("--events", events_path, "events csv")->required();
  attack->add_option("--regions", regions_path, "regions csv")->required();
  attack->add_option("--algorithm", algorithm, "algorithm that produced the logs");
  add_common(attack);

  auto* report = app.add_subcommand("report", "pivot metrics into comparison tables");
  std::vector<std::string> metrics_files;
  report->add_option("files", metrics_files, "metrics.csv files")->required();
  add_common(report);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (seed_set) cfg.seed = seed;
    if (!nodes_path.empty()) cfg.node_path = nodes_path;
    if (!edges_path.empty()) cfg.edge_path = edges_path;
    if (!sweep_arg.empty()) {
      auto eq = sweep_arg.find('=');
      if (eq == std::string::npos) throw ConfigError("--sweep expects PARAM=v1,v2,...");
      cfg.sweep_param = sweep_arg.substr(0, eq);
      cfg.sweep_values.clear();
      std::istringstream ss(sweep_arg.substr(eq + 1));
      std::string tok;
      while (std::getline(ss, tok, ','))
        if (!tok.empty()) cfg.sweep_values.push_back(std::stod(tok));
      if (cfg.sweep_values.empty()) throw ConfigError("--sweep needs values");
    }

    if (build->parsed()) return cmd_build(cfg, out_dir);
    if (simulate->parsed()) {
      std::vector<std::string> algos;
      std::string a = algorithm.empty() ? cfg.algorithm : algorithm;
      if (a == "all") {
        algos = {"basic", "bounded", "hybrid", "random", "expansion"};
      } else {
        std::istringstream ss(a);
        std::string tok;
        while (std::getline(ss, tok, ',')) algos.push_back(tok);
      }
      for (const std::string& al : algos)
        if (al != "basic" && al != "bounded" && al != "hybrid" && al != "random" &&
            al != "expansion")
          throw ConfigError("unknown algorithm: " + al);
      return cmd_simulate(cfg, algos, out_dir);
    }
    if (attack->parsed()) {
      std::string a = algorithm.empty() ? cfg.algorithm : algorithm;
      return cmd_attack(cfg, a, events_path, regions_path, out_dir);
    }
    if (report->parsed()) return cmd_report(metrics_files, out_dir);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
