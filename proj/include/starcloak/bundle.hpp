#ifndef STARCLOAK_BUNDLE_HPP
#define STARCLOAK_BUNDLE_HPP

#include <memory>
#include <string>

#include "starcloak/poi.hpp"
#include "starcloak/spatial_index.hpp"

namespace starcloak {

// Heap-allocated so cross-references between the structures stay valid
// when the bundle moves around.
struct BuildArtifacts {
  std::unique_ptr<RoadNetwork> net;
  std::unique_ptr<SegmentSet> segs;
  std::unique_ptr<StarSet> stars;
  std::unique_ptr<StarGraph> sg;
  std::unique_ptr<SpatialIndex> index;
  double grid_cell = 500.0;
  double grid_margin = 1000.0;
};

BuildArtifacts build_artifacts(RoadNetwork net, double grid_cell = 500.0,
                               double grid_margin = 1000.0);

// Binary bundle: magic + format version + the raw network + a digest of
// the derived structures. Loading rebuilds the derived tables (the
// builders are deterministic) and verifies the digest.
void write_bundle(const std::string& path, const BuildArtifacts& art);
BuildArtifacts load_bundle(const std::string& path);

std::uint64_t artifacts_digest(const BuildArtifacts& art);

}  // namespace starcloak

#endif
