#include "heatnet/params_io.hpp"

#include <cstring>
#include <fstream>

namespace heatnet {

namespace {

constexpr char kMagic[8] = {'H', 'E', 'A', 'T', 'P', 'R', 'M', '1'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& out, uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_i32(std::ostream& out, int32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

uint32_t read_u32(std::istream& in) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw CompatibilityError("parameter file truncated");
  return v;
}
int32_t read_i32(std::istream& in) {
  int32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw CompatibilityError("parameter file truncated");
  return v;
}
double read_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw CompatibilityError("parameter file truncated");
  return v;
}

void write_dims(std::ostream& out, const ModelDims& d) {
  write_i32(out, d.dyn_hidden);
  write_i32(out, d.node_proj);
  write_i32(out, d.edge_attr_proj);
  write_i32(out, d.edge_type_proj);
  write_i32(out, d.heads);
  write_i32(out, d.interaction_out);
  write_i32(out, d.heat_layers);
  write_i32(out, d.map_size);
  write_i32(out, d.map_feature);
  for (int c : d.cnn_channels) write_i32(out, c);
  write_i32(out, d.dec_hidden);
  write_f64(out, d.leaky_slope);
}

ModelDims read_dims(std::istream& in) {
  ModelDims d;
  d.dyn_hidden = read_i32(in);
  d.node_proj = read_i32(in);
  d.edge_attr_proj = read_i32(in);
  d.edge_type_proj = read_i32(in);
  d.heads = read_i32(in);
  d.interaction_out = read_i32(in);
  d.heat_layers = read_i32(in);
  d.map_size = read_i32(in);
  d.map_feature = read_i32(in);
  for (auto& c : d.cnn_channels) c = read_i32(in);
  d.dec_hidden = read_i32(in);
  d.leaky_slope = read_f64(in);
  return d;
}

}  // namespace

void save_params(const ModelParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write parameter file '" + path + "'");
  out.write(kMagic, sizeof kMagic);
  write_u32(out, kVersion);
  write_u32(out, static_cast<uint32_t>(params.variant));
  write_u32(out, static_cast<uint32_t>(params.history_steps));
  write_u32(out, static_cast<uint32_t>(params.future_steps));
  write_dims(out, params.dims);

  uint32_t count = 0;
  params.visit([&](const std::string&, const Tensor&) { ++count; });
  write_u32(out, count);
  params.visit([&](const std::string& name, const Tensor& t) {
    write_u32(out, static_cast<uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(out, static_cast<uint32_t>(t.rank()));
    for (int d = 0; d < t.rank(); ++d) write_i32(out, t.dim(d));
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * static_cast<int64_t>(sizeof(double))));
  });
  if (!out) throw IoError("write failed for '" + path + "'");
}

ModelParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open parameter file '" + path + "'");
  char magic[8] = {};
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw CompatibilityError("'" + path + "' is not a parameter file (bad magic)");
  }
  const uint32_t version = read_u32(in);
  if (version != kVersion) {
    throw CompatibilityError("parameter file version " + std::to_string(version) +
                             " unsupported");
  }
  const auto variant = static_cast<Variant>(read_u32(in));
  const int history = static_cast<int>(read_u32(in));
  const int future = static_cast<int>(read_u32(in));
  const ModelDims dims = read_dims(in);

  // Rebuild the structure, then overwrite every tensor from the file.
  ModelParams params = init_model(variant, dims, history, future, 0);
  uint32_t count = read_u32(in);
  params.visit([&](const std::string& name, Tensor& t) {
    if (count == 0) throw CompatibilityError("parameter file ends before '" + name + "'");
    --count;
    const uint32_t name_len = read_u32(in);
    std::string stored(name_len, '\0');
    in.read(stored.data(), name_len);
    if (!in || stored != name) {
      throw CompatibilityError("parameter file: expected tensor '" + name + "', found '" +
                               stored + "'");
    }
    const uint32_t rank = read_u32(in);
    std::vector<int> shape(rank);
    for (auto& d : shape) d = read_i32(in);
    if (shape != t.shape()) {
      throw CompatibilityError("parameter file: tensor '" + name + "' has shape " +
                               shape_str(shape) + ", expected " + shape_str(t.shape()));
    }
    std::vector<double> values(static_cast<size_t>(shape_size(shape)));
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!in) throw CompatibilityError("parameter file truncated in tensor '" + name + "'");
    t = Tensor(shape, std::move(values));
  });
  if (count != 0) throw CompatibilityError("parameter file has extra tensors");
  return params;
}

ModelParams load_params(const std::string& path, Variant expected) {
  ModelParams params = load_params(path);
  if (params.variant != expected) {
    throw CompatibilityError("parameter file '" + path + "' holds variant " +
                             variant_token(params.variant) + ", expected " +
                             variant_token(expected));
  }
  return params;
}

}  // namespace heatnet
