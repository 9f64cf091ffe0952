#include "starcloak/metrics.hpp"

namespace starcloak {

MetricsRecord collect_metrics(const std::vector<QueryEvent>& events,
                              const std::vector<double>& processing_ms,
                              const std::vector<std::size_t>& candidate_sizes,
                              double wall_seconds) {
  MetricsRecord m;
  m.wall_seconds = wall_seconds;
  if (events.empty()) {
    m.empty_run = true;
    return m;
  }
  double anon_sum = 0.0;
  for (const QueryEvent& ev : events) {
    ++m.issued;
    if (ev.outcome == Outcome::kServed) {
      ++m.served;
      anon_sum += ev.resolve_t - ev.issue_t;
    } else {
      ++m.dropped;
    }
  }
  m.success_rate = static_cast<double>(m.served) / static_cast<double>(m.issued);
  if (m.served > 0) m.mean_anon_time = anon_sum / static_cast<double>(m.served);
  if (!processing_ms.empty()) {
    double s = 0.0;
    for (double v : processing_ms) s += v;
    m.mean_processing_ms = s / static_cast<double>(processing_ms.size());
  }
  if (!candidate_sizes.empty()) {
    double s = 0.0;
    for (std::size_t v : candidate_sizes) s += static_cast<double>(v);
    m.mean_candidate_size = s / static_cast<double>(candidate_sizes.size());
  }
  if (wall_seconds > 0)
    m.throughput = (static_cast<double>(m.issued) / wall_seconds) * m.success_rate;
  return m;
}

}  // namespace starcloak
