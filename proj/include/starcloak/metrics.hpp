#ifndef STARCLOAK_METRICS_HPP
#define STARCLOAK_METRICS_HPP

#include <string>
#include <vector>

#include "starcloak/engine.hpp"

namespace starcloak {

struct MetricsRecord {
  std::size_t issued = 0;
  std::size_t served = 0;
  std::size_t dropped = 0;
  double success_rate = 0.0;
  double mean_anon_time = 0.0;      // virtual seconds, served queries only
  double mean_processing_ms = 0.0;  // wall ms over the evaluation sample
  double mean_candidate_size = 0.0; // objects, over the evaluation sample
  double throughput = 0.0;          // processed/s * success rate
  double wall_seconds = 0.0;
  bool empty_run = false;
};

// Aggregates a finished run. Processing time and candidate size come from
// a fixed-size evaluation sample so compared algorithms average over the
// same number of anonymized locations.
MetricsRecord collect_metrics(const std::vector<QueryEvent>& events,
                              const std::vector<double>& processing_ms,
                              const std::vector<std::size_t>& candidate_sizes,
                              double wall_seconds);

}  // namespace starcloak

#endif
