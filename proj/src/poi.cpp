#include "starcloak/poi.hpp"

#include <fstream>
#include <sstream>

namespace starcloak {

void PoiStore::add(std::int64_t id, int class_id, const Location& loc) {
  if (loc.edge >= by_edge_.size()) by_edge_.resize(loc.edge + 1);
  by_edge_[loc.edge].push_back(pois_.size());
  pois_.push_back(Poi{id, class_id, loc.edge, loc.edge_t, loc.segment, loc.offset});
}

const std::vector<std::size_t>& PoiStore::on_edge(EdgeIdx e) const {
  if (e >= by_edge_.size()) return empty_;
  return by_edge_[e];
}

PoiStore load_pois(const std::string& path, const SpatialIndex& index,
                   std::size_t edge_count) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open POI file " + path);
  PoiStore store;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream ss(line);
    std::int64_t id;
    double lon, lat;
    int cls;
    if (!(ss >> id >> lon >> lat >> cls))
      throw ParseError(path, lineno, "expected `object_id lon lat class_id`");
    store.add(id, cls, index.locate(lon, lat));
  }
  (void)edge_count;
  return store;
}

}  // namespace starcloak
