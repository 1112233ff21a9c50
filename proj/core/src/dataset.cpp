#include "heatnet/dataset.hpp"

#include <filesystem>

namespace heatnet {

namespace fs = std::filesystem;

const MapRaster* Dataset::raster_for(const SceneSample& sample) const {
  auto it = rasters.find(sample.scene_id);
  return it == rasters.end() ? nullptr : &it->second;
}

Dataset load_dataset(const std::string& dir, const SceneSchema& schema) {
  Dataset out;
  const fs::path base(dir);
  const fs::path csv = base / "scenes.csv";
  if (!fs::exists(csv)) throw IoError("no scenes.csv under '" + dir + "'");

  const fs::path maps = base / "maps";
  SceneSchema effective = schema;
  effective.map_frame_lookup = [&out, maps](const std::string& scene_id) {
    auto it = out.rasters.find(scene_id);
    if (it != out.rasters.end()) return it->second.frame();
    const fs::path pgm = maps / (scene_id + ".pgm");
    if (!fs::exists(pgm)) return MapFrame{};
    auto inserted = out.rasters.emplace(scene_id, load_raster(pgm.string()));
    return inserted.first->second.frame();
  };
  out.samples = load_scenes(csv.string(), effective);
  return out;
}

void write_dataset(const std::string& dir, const std::vector<SyntheticScene>& scenes,
                   double road_halfwidth) {
  const fs::path base(dir);
  std::error_code ec;
  fs::create_directories(base / "maps", ec);
  if (ec) throw IoError("cannot create '" + (base / "maps").string() + "': " + ec.message());
  write_scene_csv((base / "scenes.csv").string(), scenes);
  for (const auto& scene : scenes) {
    const MapRaster raster = render_road_mask(scene.paths(), scene.frame, road_halfwidth);
    write_raster((base / "maps" / (scene.id + ".pgm")).string(), raster);
  }
}

Dataset dataset_from_scenes(const std::vector<SyntheticScene>& scenes, double road_halfwidth) {
  Dataset out;
  for (const auto& scene : scenes) {
    out.samples.push_back(scene.sample);
    out.rasters.emplace(scene.id, render_road_mask(scene.paths(), scene.frame, road_halfwidth));
  }
  return out;
}

namespace {

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double val_fraction) {
  Dataset train, val;
  const auto threshold = static_cast<uint64_t>(val_fraction * 1000.0);
  for (const auto& sample : data.samples) {
    const bool to_val = fnv1a(sample.scene_id) % 1000 < threshold;
    (to_val ? val : train).samples.push_back(sample);
    auto it = data.rasters.find(sample.scene_id);
    if (it != data.rasters.end()) {
      (to_val ? val : train).rasters.emplace(it->first, it->second);
    }
  }
  return {std::move(train), std::move(val)};
}

}  // namespace heatnet
