#include "heatnet/map_channel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace heatnet {

Tensor MapRaster::image() const {
  return Tensor({height, width, 1}, intensity);
}

// ---------------------------------------------------------------------------
// PGM + sidecar I/O
// ---------------------------------------------------------------------------

namespace {

std::string sidecar_path(const std::string& pgm_path) {
  const auto dot = pgm_path.rfind('.');
  const std::string stem = dot == std::string::npos ? pgm_path : pgm_path.substr(0, dot);
  return stem + ".meta";
}

// Reads one whitespace-delimited PGM header token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  char ch;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string comment;
      std::getline(in, comment);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(ch);
  }
  return tok;
}

}  // namespace

MapRaster load_raster(const std::string& pgm_path) {
  std::ifstream in(pgm_path, std::ios::binary);
  if (!in) throw IoError("cannot open raster '" + pgm_path + "'");
  if (next_token(in) != "P5") throw FormatError("'" + pgm_path + "': not a binary PGM (P5)");
  MapRaster r;
  try {
    r.width = std::stoi(next_token(in));
    r.height = std::stoi(next_token(in));
    const int maxval = std::stoi(next_token(in));
    if (maxval != 255) {
      throw FormatError("'" + pgm_path + "': expected maxval 255, got " + std::to_string(maxval));
    }
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception&) {
    throw FormatError("'" + pgm_path + "': malformed PGM header");
  }
  if (r.width <= 0 || r.height <= 0) {
    throw FormatError("'" + pgm_path + "': bad raster size " + std::to_string(r.width) + "x" +
                      std::to_string(r.height));
  }
  const size_t n = static_cast<size_t>(r.width) * static_cast<size_t>(r.height);
  std::vector<unsigned char> bytes(n);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(n));
  if (static_cast<size_t>(in.gcount()) != n) {
    throw FormatError("'" + pgm_path + "': truncated pixel data");
  }
  r.intensity.resize(n);
  for (size_t i = 0; i < n; ++i) r.intensity[i] = bytes[i] / 255.0;

  const std::string meta = sidecar_path(pgm_path);
  std::ifstream min(meta);
  if (!min) throw MetadataError("missing raster sidecar '" + meta + "'");
  std::string l1, l2, l3;
  if (!std::getline(min, l1) || !std::getline(min, l2) || !std::getline(min, l3)) {
    throw MetadataError("sidecar '" + meta + "' needs 3 lines: scale, center-x, center-y");
  }
  try {
    r.meters_per_pixel = std::stod(l1);
    r.cx = std::stod(l2);
    r.cy = std::stod(l3);
  } catch (const std::exception&) {
    throw MetadataError("sidecar '" + meta + "' has non-numeric fields");
  }
  if (r.meters_per_pixel <= 0) {
    throw MetadataError("sidecar '" + meta + "': scale must be positive");
  }
  return r;
}

void write_raster(const std::string& pgm_path, const MapRaster& raster) {
  std::ofstream out(pgm_path, std::ios::binary);
  if (!out) throw IoError("cannot write raster '" + pgm_path + "'");
  out << "P5\n" << raster.width << " " << raster.height << "\n255\n";
  std::vector<unsigned char> bytes(raster.intensity.size());
  for (size_t i = 0; i < bytes.size(); ++i) {
    const double v = std::min(1.0, std::max(0.0, raster.intensity[i]));
    bytes[i] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + pgm_path + "'");

  std::ofstream meta(sidecar_path(pgm_path));
  if (!meta) throw IoError("cannot write sidecar for '" + pgm_path + "'");
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.17g\n%.17g\n%.17g\n", raster.meters_per_pixel, raster.cx,
                raster.cy);
  meta << buf;
}

MapRaster render_road_mask(const std::vector<std::vector<std::array<double, 2>>>& paths,
                           const MapFrame& frame, double road_halfwidth) {
  MapRaster r;
  r.width = r.height = frame.size_px;
  r.meters_per_pixel = frame.meters_per_pixel;
  r.cx = frame.cx;
  r.cy = frame.cy;
  r.intensity.assign(static_cast<size_t>(r.width) * r.height, 0.0);
  const double he = frame.half_extent();
  auto segment_dist = [](double px, double py, const std::array<double, 2>& a,
                         const std::array<double, 2>& b) {
    const double abx = b[0] - a[0], aby = b[1] - a[1];
    const double apx = px - a[0], apy = py - a[1];
    const double len2 = abx * abx + aby * aby;
    const double t = len2 > 0 ? std::min(1.0, std::max(0.0, (apx * abx + apy * aby) / len2)) : 0.0;
    return std::hypot(px - (a[0] + t * abx), py - (a[1] + t * aby));
  };
  for (int row = 0; row < r.height; ++row) {
    for (int col = 0; col < r.width; ++col) {
      // Pixel center in world coordinates; row 0 is the +y edge.
      const double wx = frame.cx - he + (col + 0.5) * frame.meters_per_pixel;
      const double wy = frame.cy + he - (row + 0.5) * frame.meters_per_pixel;
      bool on_road = false;
      for (const auto& path : paths) {
        for (size_t k = 0; k + 1 < path.size() && !on_road; ++k) {
          on_road = segment_dist(wx, wy, path[k], path[k + 1]) <= road_halfwidth;
        }
        if (path.size() == 1 && !on_road) {
          on_road = std::hypot(wx - path[0][0], wy - path[0][1]) <= road_halfwidth;
        }
        if (on_road) break;
      }
      if (on_road) r.intensity[static_cast<size_t>(row) * r.width + col] = 1.0;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// CNN feature extractor
// ---------------------------------------------------------------------------

int conv_out_size(int size, int stride) { return (size - 1) / stride + 1; }

Tensor conv2d_hwc(const Tensor& image, const Tensor& weight, const Tensor& bias, int stride) {
  if (image.rank() != 3) {
    throw DimensionError("conv2d: expected [H,W,C] image, got " + shape_str(image.shape()));
  }
  const int h = image.dim(0), w = image.dim(1), c_in = image.dim(2);
  if (weight.rank() != 2 || weight.dim(0) != 9 * c_in) {
    throw DimensionError("conv2d: weight " + shape_str(weight.shape()) + " vs 9*C_in = " +
                         std::to_string(9 * c_in));
  }
  const int c_out = weight.dim(1);
  const int oh = conv_out_size(h, stride), ow = conv_out_size(w, stride);

  // im2col with pad 1: out-of-image taps map to index -1 (zero, no gradient).
  std::vector<int64_t> idx;
  idx.reserve(static_cast<size_t>(oh) * ow * 9 * c_in);
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      for (int ky = -1; ky <= 1; ++ky) {
        for (int kx = -1; kx <= 1; ++kx) {
          const int iy = oy * stride + ky;
          const int ix = ox * stride + kx;
          for (int ch = 0; ch < c_in; ++ch) {
            if (iy < 0 || iy >= h || ix < 0 || ix >= w) {
              idx.push_back(-1);
            } else {
              idx.push_back((static_cast<int64_t>(iy) * w + ix) * c_in + ch);
            }
          }
        }
      }
    }
  }
  const Tensor patches = take_flat(image, idx, {oh * ow, 9 * c_in});
  Tensor out = matmul(patches, weight);  // [oh*ow, c_out]
  out = out + matmul(Tensor::full({oh * ow, 1}, 1.0), bias);
  return reshape(out, {oh, ow, c_out});
}

Tensor encode_map_image(const Tensor& image, const CnnParams& params) {
  if (image.rank() != 3 || image.dim(0) != params.input_size ||
      image.dim(1) != params.input_size) {
    throw ConfigError("encode_map: raster " + shape_str(image.shape()) +
                      " vs configured size " + std::to_string(params.input_size));
  }
  Tensor x = image;
  for (const auto& layer : params.conv) {
    x = leaky_relu(conv2d_hwc(x, layer.weight, layer.bias, 2), params.leaky_slope);
  }
  const int flat = static_cast<int>(x.size());
  if (flat != params.flattened_width()) {
    throw ConfigError("encode_map: flattened width " + std::to_string(flat) +
                      " vs fc weight " + shape_str(params.fc_weight.shape()));
  }
  return matmul(reshape(x, {1, flat}), params.fc_weight) + params.fc_bias;
}

Tensor encode_map(const MapRaster& raster, const CnnParams& params) {
  return encode_map_image(raster.image(), params);
}

Tensor gate_select(const Tensor& map_feature, const std::array<double, kMapAttrWidth>& attr,
                   const GateParams& params) {
  if (map_feature.rank() != 2 || map_feature.dim(0) != 1) {
    throw DimensionError("gate_select: map feature must be [1, F_map], got " +
                         shape_str(map_feature.shape()));
  }
  const int f_map = map_feature.dim(1);
  if (params.weight.dim(0) != f_map + kMapAttrWidth || params.weight.dim(1) != f_map ||
      params.bias.dim(1) != f_map) {
    throw DimensionError("gate_select: gate widths " + shape_str(params.weight.shape()) +
                         " vs map feature " + shape_str(map_feature.shape()));
  }
  const Tensor state({1, kMapAttrWidth}, std::vector<double>(attr.begin(), attr.end()));
  const Tensor z = sigmoid(matmul(concat({map_feature, state}, 1), params.weight) + params.bias);
  return mul(z, map_feature);
}

}  // namespace heatnet
