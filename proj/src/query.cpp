#include "starcloak/query.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace starcloak {

QueryId query_hash(UserId user, double t) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const unsigned char* p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  mix(reinterpret_cast<const unsigned char*>(&user), sizeof(user));
  unsigned char sep = '|';
  mix(&sep, 1);
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(t));
  std::memcpy(&bits, &t, sizeof(bits));
  mix(reinterpret_cast<const unsigned char*>(&bits), sizeof(bits));
  return h;
}

const Query& QuerySystem::insert(Query q) {
  q.id = query_hash(q.user, q.t);
  q.t_exp = q.t + q.profile.sigma_t;
  if (!seen_.insert(q.id).second)
    throw DataError("duplicate query for user " + std::to_string(q.user) +
                    " at t=" + std::to_string(q.t));
  fifo_.push_back(q.id);
  heap_.emplace(q.t_exp, q.id);
  auto [it, ok] = live_.emplace(q.id, std::move(q));
  (void)ok;
  return it->second;
}

const Query& QuerySystem::preprocess(const RawQuery& raw, const SpatialIndex& index) {
  Location loc = index.locate(raw.lon, raw.lat);  // throws when out of coverage
  Query q;
  q.user = raw.user;
  q.t = raw.t;
  q.segment = loc.segment;
  q.offset = loc.offset;
  q.knn_k = raw.knn_k;
  q.poi_class = raw.poi_class;
  q.profile = raw.profile;
  return insert(std::move(q));
}

const Query& QuerySystem::submit_located(const RawQuery& raw, SegmentId segment,
                                         double offset) {
  Query q;
  q.user = raw.user;
  q.t = raw.t;
  q.segment = segment;
  q.offset = offset;
  q.knn_k = raw.knn_k;
  q.poi_class = raw.poi_class;
  q.profile = raw.profile;
  return insert(std::move(q));
}

std::vector<Query> QuerySystem::pop_expired(double now) {
  std::vector<Query> out;
  while (!heap_.empty() && heap_.begin()->first <= now) {
    QueryId id = heap_.begin()->second;
    heap_.erase(heap_.begin());
    auto it = live_.find(id);
    if (it == live_.end()) continue;
    out.push_back(it->second);
    live_.erase(it);
  }
  return out;
}

const Query* QuerySystem::pop_next() {
  while (!fifo_.empty()) {
    QueryId id = fifo_.front();
    fifo_.pop_front();
    auto it = live_.find(id);
    if (it != live_.end()) return &it->second;
  }
  return nullptr;
}

const Query& QuerySystem::get(QueryId id) const {
  auto it = live_.find(id);
  if (it == live_.end()) throw DataError("unknown query id");
  return it->second;
}

void QuerySystem::erase(QueryId id) {
  auto it = live_.find(id);
  if (it == live_.end()) return;
  heap_.erase({it->second.t_exp, id});
  live_.erase(it);
}

std::vector<QueryId> QuerySystem::expiring_within(double now, double alpha) const {
  std::vector<QueryId> out;
  for (const auto& [texp, id] : heap_) {
    if (texp - now > alpha) break;
    if (live_.count(id)) out.push_back(id);
  }
  return out;
}

bool QuerySystem::consistent() const {
  if (heap_.size() < live_.size()) return false;
  std::size_t live_in_heap = 0;
  for (const auto& [texp, id] : heap_) {
    auto it = live_.find(id);
    if (it != live_.end()) {
      if (it->second.t_exp != texp) return false;
      ++live_in_heap;
    }
  }
  return live_in_heap == live_.size();
}

std::vector<RawQuery> load_query_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open trace file " + path);
  std::vector<RawQuery> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    RawQuery r;
    char c;
    if (!(ss >> r.user >> c >> r.t >> c >> r.lon >> c >> r.lat >> c >> r.knn_k >>
          c >> r.profile.delta_k >> c >> r.profile.delta_l >> c >>
          r.profile.sigma_s >> c >> r.profile.sigma_t))
      throw ParseError(path, lineno, "expected 9 comma-separated fields");
    out.push_back(r);
  }
  return out;
}

}  // namespace starcloak
