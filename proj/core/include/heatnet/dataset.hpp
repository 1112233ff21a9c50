#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "heatnet/map_channel.hpp"
#include "heatnet/scene.hpp"

namespace heatnet {

// On-disk layout: <dir>/scenes.csv plus <dir>/maps/<scene_id>.pgm (+ .meta).
struct Dataset {
  std::vector<SceneSample> samples;
  std::map<std::string, MapRaster> rasters;

  const MapRaster* raster_for(const SceneSample& sample) const;
  bool empty() const { return samples.empty(); }
  size_t size() const { return samples.size(); }
};

Dataset load_dataset(const std::string& dir, const SceneSchema& schema);

void write_dataset(const std::string& dir, const std::vector<SyntheticScene>& scenes,
                   double road_halfwidth = 2.5);

// Builds an in-memory dataset from generated scenes (rasters rendered).
Dataset dataset_from_scenes(const std::vector<SyntheticScene>& scenes,
                            double road_halfwidth = 2.5);

// Deterministic split by scene-id hash (FNV-1a): scenes whose hash bucket
// falls below val_fraction go to the second (validation) part.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double val_fraction);

}  // namespace heatnet
