#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>

#include "heatnet/map_channel.hpp"
#include "oracles.hpp"

using namespace heatnet;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("heatnet_map_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int counter;
};
int TempDir::counter = 0;

CnnParams random_cnn(std::mt19937_64& rng, int input_size, std::array<int, 3> channels,
                     int f_map) {
  CnnParams p;
  p.input_size = input_size;
  p.leaky_slope = 0.2;
  int c_in = 1, size = input_size;
  for (int l = 0; l < 3; ++l) {
    p.conv[static_cast<size_t>(l)].weight =
        oracle::random_tensor({9 * c_in, channels[static_cast<size_t>(l)]}, rng, -0.5, 0.5);
    p.conv[static_cast<size_t>(l)].bias =
        oracle::random_tensor({1, channels[static_cast<size_t>(l)]}, rng, -0.2, 0.2);
    c_in = channels[static_cast<size_t>(l)];
    size = conv_out_size(size, 2);
  }
  p.fc_weight = oracle::random_tensor({size * size * c_in, f_map}, rng, -0.5, 0.5);
  p.fc_bias = oracle::random_tensor({1, f_map}, rng, -0.2, 0.2);
  return p;
}

MapRaster random_raster(std::mt19937_64& rng, int size) {
  MapRaster r;
  r.width = r.height = size;
  r.meters_per_pixel = 2.0;
  std::uniform_real_distribution<double> u(0, 1);
  r.intensity.resize(static_cast<size_t>(size) * size);
  // quantized so PGM round trips are exact
  for (auto& v : r.intensity) v = std::floor(u(rng) * 256.0) / 255.0 * (255.0 / 256.0);
  for (auto& v : r.intensity) v = std::min(1.0, v);
  return r;
}

}  // namespace

TEST_CASE("conv output sizes") {
  CHECK(conv_out_size(64, 2) == 32);
  CHECK(conv_out_size(32, 2) == 16);
  CHECK(conv_out_size(16, 2) == 8);
  CHECK(conv_out_size(5, 2) == 3);
}

TEST_CASE("conv2d matches the sliding-window oracle") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 6; ++trial) {
    const int h = 6, w = 6, c_in = trial % 2 + 1, c_out = 3;
    const Tensor image = oracle::random_tensor({h, w, c_in}, rng);
    const Tensor weight = oracle::random_tensor({9 * c_in, c_out}, rng);
    const Tensor bias = oracle::random_tensor({1, c_out}, rng);
    for (int stride : {1, 2}) {
      const Tensor out = conv2d_hwc(image, weight, bias, stride);
      const auto expect = oracle::conv_reference(image.values(), h, w, c_in,
                                                 oracle::to_mat(weight), bias.values(), stride);
      REQUIRE(out.size() == static_cast<int64_t>(expect.size()));
      for (int64_t i = 0; i < out.size(); ++i) {
        CHECK(out.values()[static_cast<size_t>(i)] ==
              doctest::Approx(expect[static_cast<size_t>(i)]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("encode_map: zero raster and zero biases give a zero feature") {
  std::mt19937_64 rng(5);
  CnnParams p = random_cnn(rng, 16, {2, 2, 2}, 4);
  p.conv[0].bias = Tensor::zeros({1, 2});
  p.conv[1].bias = Tensor::zeros({1, 2});
  p.conv[2].bias = Tensor::zeros({1, 2});
  p.fc_bias = Tensor::zeros({1, 4});
  MapRaster black;
  black.width = black.height = 16;
  black.intensity.assign(256, 0.0);
  const Tensor feature = encode_map(black, p);
  for (int j = 0; j < 4; ++j) CHECK(feature.at(0, j) == 0.0);
}

TEST_CASE("encode_map rejects a size mismatch") {
  std::mt19937_64 rng(6);
  const CnnParams p = random_cnn(rng, 16, {2, 2, 2}, 4);
  MapRaster wrong;
  wrong.width = wrong.height = 8;
  wrong.intensity.assign(64, 0.0);
  CHECK_THROWS_AS(encode_map(wrong, p), ConfigError);
}

TEST_CASE("CNN gradients pass finite differences") {
  std::mt19937_64 rng(7);
  CnnParams p = random_cnn(rng, 8, {2, 2, 2}, 3);
  const MapRaster raster = random_raster(rng, 8);
  const Tensor probe = oracle::random_tensor({1, 3}, rng);
  auto eval = [&] { return sum(mul(encode_map(raster, p), probe)).value(); };

  Tape tape;
  CnnParams tracked = p;
  std::vector<std::pair<Tensor*, Tensor*>> pairs;
  for (size_t l = 0; l < 3; ++l) {
    tracked.conv[l].weight = tape.watch(p.conv[l].weight);
    pairs.emplace_back(&p.conv[l].weight, &tracked.conv[l].weight);
    tracked.conv[l].bias = tape.watch(p.conv[l].bias);
    pairs.emplace_back(&p.conv[l].bias, &tracked.conv[l].bias);
  }
  tracked.fc_weight = tape.watch(p.fc_weight);
  pairs.emplace_back(&p.fc_weight, &tracked.fc_weight);
  tracked.fc_bias = tape.watch(p.fc_bias);
  pairs.emplace_back(&p.fc_bias, &tracked.fc_bias);
  const GradMap grads = tape.backward(sum(mul(encode_map(raster, tracked), probe)));
  for (auto [plain, watched] : pairs) {
    for (int64_t i = 0; i < plain->size(); ++i) {
      CHECK(oracle::rel_err(grads.at(*watched).values()[static_cast<size_t>(i)],
                            oracle::fd_gradient(plain, i, eval)) < 1e-6);
    }
  }
}

TEST_CASE("gate_select: zero gate params halve the map feature") {
  std::mt19937_64 rng(9);
  const Tensor m = oracle::random_tensor({1, 5}, rng);
  GateParams p;
  p.weight = Tensor::zeros({5 + kMapAttrWidth, 5});
  p.bias = Tensor::zeros({1, 5});
  const Tensor out = gate_select(m, {0.1, -0.2, 1.0, 0.0, 1.0, 0.0}, p);
  for (int j = 0; j < 5; ++j)
    CHECK(out.at(0, j) == doctest::Approx(0.5 * m.at(0, j)).epsilon(1e-15));
}

TEST_CASE("gate_select: saturated gate passes the map feature through") {
  std::mt19937_64 rng(10);
  const Tensor m = oracle::random_tensor({1, 4}, rng);
  GateParams p;
  p.weight = Tensor::zeros({4 + kMapAttrWidth, 4});
  p.bias = Tensor::full({1, 4}, 50.0);
  const Tensor out = gate_select(m, {0, 0, 0, 0, 1, 0}, p);
  for (int j = 0; j < 4; ++j) CHECK(std::fabs(out.at(0, j) - m.at(0, j)) < 1e-9);
}

TEST_CASE("gate_select matches a scalar per-element oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const int f = 4;
    const Tensor m = oracle::random_tensor({1, f}, rng);
    GateParams p;
    p.weight = oracle::random_tensor({f + kMapAttrWidth, f}, rng);
    p.bias = oracle::random_tensor({1, f}, rng);
    std::array<double, 6> attr;
    std::uniform_real_distribution<double> u(-1, 1);
    for (auto& a : attr) a = u(rng);
    const Tensor out = gate_select(m, attr, p);
    // scalar: z_k = sigmoid(sum_i cat_i * W[i][k] + b_k); out_k = z_k * m_k
    for (int k = 0; k < f; ++k) {
      double z = p.bias.at(0, k);
      for (int i = 0; i < f; ++i) z += m.at(0, i) * p.weight.at(i, k);
      for (int i = 0; i < kMapAttrWidth; ++i) z += attr[static_cast<size_t>(i)] * p.weight.at(f + i, k);
      const double expect = 1.0 / (1.0 + std::exp(-z)) * m.at(0, k);
      CHECK(out.at(0, k) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("gate boundedness: |m_k| <= |M_k| with matching sign") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int f = 6;
    const Tensor m = oracle::random_tensor({1, f}, rng);
    GateParams p;
    p.weight = oracle::random_tensor({f + kMapAttrWidth, f}, rng);
    p.bias = oracle::random_tensor({1, f}, rng);
    std::array<double, 6> attr = {0.3, -0.4, 1.0, 2.0, 0.8, 0.6};
    const Tensor out = gate_select(m, attr, p);
    for (int k = 0; k < f; ++k) {
      CHECK(std::fabs(out.at(0, k)) <= std::fabs(m.at(0, k)));
      if (m.at(0, k) != 0.0) CHECK(out.at(0, k) * m.at(0, k) >= 0.0);
    }
  }
}

TEST_CASE("identical map attrs give identical gated features") {
  std::mt19937_64 rng(15);
  const Tensor m = oracle::random_tensor({1, 4}, rng);
  GateParams p;
  p.weight = oracle::random_tensor({4 + kMapAttrWidth, 4}, rng);
  p.bias = oracle::random_tensor({1, 4}, rng);
  const std::array<double, 6> attr = {0.5, 0.1, 3.0, -1.0, 1.0, 0.0};
  const Tensor a = gate_select(m, attr, p);
  const Tensor b = gate_select(m, attr, p);
  for (int j = 0; j < 4; ++j) CHECK(a.at(0, j) == b.at(0, j));
  // different attrs generally change the output
  const Tensor c = gate_select(m, {-0.9, 0.7, -2.0, 4.0, 0.0, 1.0}, p);
  bool different = false;
  for (int j = 0; j < 4; ++j) different = different || c.at(0, j) != a.at(0, j);
  CHECK(different);
}

TEST_CASE("PGM round trip: all-black and checkerboard") {
  TempDir dir;
  MapRaster black;
  black.width = black.height = 64;
  black.intensity.assign(64 * 64, 0.0);
  black.meters_per_pixel = 2.0;
  black.cx = 1.5;
  black.cy = -2.5;
  const auto p1 = (dir.path / "black.pgm").string();
  write_raster(p1, black);
  const MapRaster back = load_raster(p1);
  CHECK(back.width == 64);
  CHECK(back.height == 64);
  CHECK(back.meters_per_pixel == 2.0);
  CHECK(back.cx == 1.5);
  CHECK(back.cy == -2.5);
  for (double v : back.intensity) CHECK(v == 0.0);

  MapRaster checker;
  checker.width = checker.height = 8;
  checker.meters_per_pixel = 1.0;
  for (int i = 0; i < 64; ++i) checker.intensity.push_back((i / 8 + i % 8) % 2 ? 1.0 : 0.0);
  const auto p2 = (dir.path / "checker.pgm").string();
  write_raster(p2, checker);
  const MapRaster checker2 = load_raster(p2);
  for (size_t i = 0; i < 64; ++i) CHECK(checker2.intensity[i] == checker.intensity[i]);

  // second write/read round trip is bit-exact
  const auto p3 = (dir.path / "checker_again.pgm").string();
  write_raster(p3, checker2);
  std::ifstream f2(p2, std::ios::binary), f3(p3, std::ios::binary);
  const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  const std::string b3((std::istreambuf_iterator<char>(f3)), std::istreambuf_iterator<char>());
  CHECK(b2 == b3);
}

TEST_CASE("load_raster error paths") {
  TempDir dir;
  const auto bad_magic = (dir.path / "x.pgm").string();
  std::ofstream(bad_magic) << "P2\n4 4\n255\n";
  CHECK_THROWS_AS(load_raster(bad_magic), FormatError);

  const auto truncated = (dir.path / "t.pgm").string();
  std::ofstream(truncated, std::ios::binary) << "P5\n8 8\n255\nab";
  CHECK_THROWS_AS(load_raster(truncated), FormatError);

  // valid raster but missing sidecar
  const auto lonely = (dir.path / "lonely.pgm").string();
  {
    std::ofstream out(lonely, std::ios::binary);
    out << "P5\n2 2\n255\n";
    out.write("\0\0\0\0", 4);
  }
  CHECK_THROWS_AS(load_raster(lonely), MetadataError);

  // synthetic road mask with a hand-written sidecar loads with the right scale
  const auto road = (dir.path / "road.pgm").string();
  {
    std::ofstream out(road, std::ios::binary);
    out << "P5\n2 2\n255\n";
    out.write("\xff\0\0\xff", 4);
    std::ofstream meta((dir.path / "road.meta").string());
    meta << "0.75\n12.5\n-3.25\n";
  }
  const MapRaster r = load_raster(road);
  CHECK(r.meters_per_pixel == 0.75);
  CHECK(r.cx == 12.5);
  CHECK(r.cy == -3.25);
  CHECK(r.intensity[0] == 1.0);
  CHECK(r.intensity[1] == 0.0);
}

TEST_CASE("render_road_mask paints pixels near the path") {
  MapFrame frame{1.0, 0.0, 0.0, 32};
  const std::vector<std::vector<std::array<double, 2>>> paths = {{{-10, 0}, {10, 0}}};
  const MapRaster r = render_road_mask(paths, frame, 2.0);
  // the pixel at the world origin lies on the road
  const int row = 16, col = 16;
  CHECK(r.intensity[static_cast<size_t>(row) * 32 + col] == 1.0);
  // a pixel far off the corridor stays dark
  CHECK(r.intensity[2 * 32 + 2] == 0.0);
}
