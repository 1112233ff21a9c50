#pragma once

#include <array>
#include <string>
#include <vector>

#include "heatnet/scene.hpp"
#include "heatnet/tensor.hpp"

namespace heatnet {

// Grayscale top-view raster with world placement; intensities in [0,1].
struct MapRaster {
  int width = 0, height = 0;
  std::vector<double> intensity;  // row-major [h][w]
  double meters_per_pixel = 1.0;
  double cx = 0.0, cy = 0.0;

  MapFrame frame() const { return MapFrame{meters_per_pixel, cx, cy, width}; }
  Tensor image() const;  // [H, W, 1]
};

// Binary PGM (P5, maxval 255) plus a ".meta" sidecar:
//   line 1: meters per pixel, line 2: center x, line 3: center y.
MapRaster load_raster(const std::string& pgm_path);
void write_raster(const std::string& pgm_path, const MapRaster& raster);

// Fills a square raster with a road mask: 1.0 within `road_halfwidth` meters
// of any path polyline, 0 elsewhere.
MapRaster render_road_mask(const std::vector<std::vector<std::array<double, 2>>>& paths,
                           const MapFrame& frame, double road_halfwidth = 2.5);

// One padded 3x3 convolution over an HWC image, followed by nothing: output
// is [H', W', C_out] with H' = (H-1)/stride + 1 for pad 1.
Tensor conv2d_hwc(const Tensor& image, const Tensor& weight /*[9*C_in, C_out]*/,
                  const Tensor& bias /*[1, C_out]*/, int stride);
int conv_out_size(int size, int stride);

// Fixed extractor stack: 3 x (conv 3x3 stride 2 + leaky ReLU), flatten, linear.
struct CnnParams {
  struct ConvLayer {
    Tensor weight;  // [9 * C_in, C_out]
    Tensor bias;    // [1, C_out]
  };
  std::array<ConvLayer, 3> conv;
  Tensor fc_weight;  // [flattened, F_map]
  Tensor fc_bias;    // [1, F_map]
  int input_size = 64;
  double leaky_slope = 0.2;

  int feature_width() const { return fc_weight.dim(1); }
  int flattened_width() const { return fc_weight.dim(0); }
};

Tensor encode_map(const MapRaster& raster, const CnnParams& params);  // [1, F_map]
Tensor encode_map_image(const Tensor& image, const CnnParams& params);

// Selection gate z = sigmoid([M || s] W_z + b_z); m = z . M.
struct GateParams {
  Tensor weight;  // [F_map + kMapAttrWidth, F_map]
  Tensor bias;    // [1, F_map]
  int feature_width() const { return weight.dim(1); }
};

Tensor gate_select(const Tensor& map_feature, const std::array<double, kMapAttrWidth>& attr,
                   const GateParams& params);

}  // namespace heatnet
