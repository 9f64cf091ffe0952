#include "starcloak/bundle.hpp"

#include <cstring>
#include <fstream>

namespace starcloak {

namespace {

constexpr char kMagic[4] = {'S', 'C', 'B', 'N'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw DataError("truncated bundle");
  return v;
}

void hash_mix(std::uint64_t& h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
}

}  // namespace

std::uint64_t artifacts_digest(const BuildArtifacts& art) {
  std::uint64_t h = 0;
  hash_mix(h, art.segs->size());
  for (const Segment& s : art.segs->all()) {
    hash_mix(h, s.edges.size());
    for (EdgeIdx e : s.edges) hash_mix(h, e);
    hash_mix(h, s.v0());
    hash_mix(h, s.vL());
  }
  hash_mix(h, art.stars->size());
  for (const Star& st : art.stars->all()) {
    hash_mix(h, st.anchor);
    for (SegmentId sg : st.segments) hash_mix(h, sg);
  }
  for (StarId s = 0; s < art.sg->size(); ++s)
    for (StarId nb : art.sg->neighbors(s)) hash_mix(h, nb);
  return h;
}

BuildArtifacts build_artifacts(RoadNetwork net, double grid_cell, double grid_margin) {
  BuildArtifacts art;
  art.grid_cell = grid_cell;
  art.grid_margin = grid_margin;
  art.net = std::make_unique<RoadNetwork>(std::move(net));
  art.segs = std::make_unique<SegmentSet>(build_segments(*art.net));
  art.stars = std::make_unique<StarSet>(build_stars(*art.net, *art.segs));
  art.sg = std::make_unique<StarGraph>(build_star_graph(*art.stars, *art.segs));
  art.index =
      std::make_unique<SpatialIndex>(*art.net, *art.segs, grid_cell, grid_margin);
  return art;
}

void write_bundle(const std::string& path, const BuildArtifacts& art) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write bundle " + path);
  out.write(kMagic, 4);
  put(out, kVersion);
  put(out, art.grid_cell);
  put(out, art.grid_margin);
  put(out, artifacts_digest(art));

  const RoadNetwork& net = *art.net;
  put(out, static_cast<std::uint64_t>(net.node_count()));
  for (NodeIdx v = 0; v < net.node_count(); ++v) {
    const Node& n = net.node(v);
    put(out, n.ext_id);
    put(out, n.lon);
    put(out, n.lat);
  }
  put(out, static_cast<std::uint64_t>(net.edge_count()));
  for (EdgeIdx e = 0; e < net.edge_count(); ++e) {
    const Edge& ed = net.edge(e);
    put(out, ed.ext_id);
    put(out, net.node(ed.a).ext_id);
    put(out, net.node(ed.b).ext_id);
    put(out, ed.length);
  }
}

BuildArtifacts load_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open bundle " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("bad bundle magic in " + path);
  auto version = get<std::uint32_t>(in);
  if (version != kVersion)
    throw DataError("unsupported bundle version " + std::to_string(version));
  double cell = get<double>(in);
  double margin = get<double>(in);
  auto digest = get<std::uint64_t>(in);

  RoadNetwork net;
  auto nodes = get<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < nodes; ++i) {
    auto id = get<std::int64_t>(in);
    auto lon = get<double>(in);
    auto lat = get<double>(in);
    net.add_node(id, lon, lat);
  }
  auto edges = get<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < edges; ++i) {
    auto id = get<std::int64_t>(in);
    auto a = get<std::int64_t>(in);
    auto b = get<std::int64_t>(in);
    auto len = get<double>(in);
    net.add_edge(id, a, b, len);
  }
  net.finalize();

  BuildArtifacts art = build_artifacts(std::move(net), cell, margin);
  if (artifacts_digest(art) != digest)
    throw DataError("bundle digest mismatch (stale or corrupted bundle)");
  return art;
}

}  // namespace starcloak
