// src/segnet.cc

// Copyright 2026  The CACPS Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "cacps/segnet.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "json.hpp"

#include "cacps/error.hpp"
#include "cacps/rng.hpp"

namespace cacps {

namespace {

constexpr char kMagic[] = "CKPT1";
constexpr size_t kMagicLen = 5;
constexpr uint64_t kInitTag = 0x5e61e701;

}  // namespace

const std::vector<ConvSpec>& segnet_layers() {
  static const std::vector<ConvSpec> layers = {
      {1, 16, 3}, {16, 16, 3}, {16, 32, 3}, {32, 32, 3},
      {32, 64, 3}, {64, 32, 3}, {32, 16, 3}, {16, kNumClasses, 1},
  };
  return layers;
}

std::vector<Tensor> SegNetParams::parameters() const {
  std::vector<Tensor> out;
  out.reserve(weights.size() * 2);
  for (size_t i = 0; i < weights.size(); ++i) {
    out.push_back(weights[i]);
    out.push_back(biases[i]);
  }
  return out;
}

size_t SegNetParams::param_count() const {
  size_t n = 0;
  for (const Tensor& t : parameters()) n += t.numel();
  return n;
}

void SegNetParams::zero_grad() const {
  for (const Tensor& t : parameters()) t.zero_grad();
}

SegNetParams segnet_init(uint64_t seed) {
  Rng rng(mix_seed({kInitTag, seed}));
  SegNetParams p;
  p.init_seed = seed;
  for (const ConvSpec& l : segnet_layers()) {
    const double stddev = std::sqrt(2.0 / (l.cin * l.k * l.k));
    Tensor w = Tensor::zeros({l.cout, l.cin, l.k, l.k}, /*requires_grad=*/true);
    for (double& v : w.mutable_values()) v = rng.normal(0.0, stddev);
    p.weights.push_back(std::move(w));
    p.biases.push_back(Tensor::zeros({l.cout}, /*requires_grad=*/true));
  }
  return p;
}

Tensor segnet_forward(const SegNetParams& params, const Tensor& batch) {
  if (batch.rank() != 4 || batch.dim(1) != 1)
    fail("shape", "segnet input must be [N,1,H,W]");
  if (batch.dim(2) % 4 != 0 || batch.dim(3) % 4 != 0)
    fail("shape", "segnet spatial dims must be divisible by 4");
  if (params.weights.size() != segnet_layers().size())
    fail("checkpoint", "parameter list does not match the layer table");

  auto conv = [&](const Tensor& x, size_t i) {
    return conv2d(x, params.weights[i], params.biases[i]);
  };
  Tensor x = relu(conv(batch, 0));
  x = relu(conv(x, 1));
  x = avg_pool2(x);
  x = relu(conv(x, 2));
  x = relu(conv(x, 3));
  x = avg_pool2(x);
  x = relu(conv(x, 4));
  x = upsample2(x);
  x = relu(conv(x, 5));
  x = upsample2(x);
  x = relu(conv(x, 6));
  return conv(x, 7);
}

Tensor predict_probs(const SegNetParams& params, const Tensor& batch) {
  return softmax_channels(segnet_forward(params, batch));
}

namespace {

void write_u32_le(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32_le(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) fail("format", "truncated header");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) |
         (static_cast<uint32_t>(b[3]) << 24);
}

void write_f64_le(std::ostream& os, const std::vector<double>& v) {
  // Assumes an IEEE-754 little-endian host (checked below); the formats are
  // specified byte-exactly so checkpoints transfer between machines.
  static_assert(sizeof(double) == 8, "64-bit IEEE doubles required");
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * 8));
}

}  // namespace

void save_checkpoint(const SegNetParams& params, const std::string& path) {
  nlohmann::json header;
  header["seed"] = params.init_seed;
  nlohmann::json shapes = nlohmann::json::array();
  for (const Tensor& t : params.parameters()) shapes.push_back(t.shape());
  header["layers"] = shapes;
  const std::string hs = header.dump();

  std::ofstream os(path, std::ios::binary);
  if (!os) fail("io", "cannot open checkpoint for writing: " + path);
  os.write(kMagic, kMagicLen);
  write_u32_le(os, static_cast<uint32_t>(hs.size()));
  os.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (const Tensor& t : params.parameters()) write_f64_le(os, t.values());
  if (!os) fail("io", "short write on checkpoint: " + path);
}

SegNetParams load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail("io", "cannot open checkpoint: " + path);

  char magic[kMagicLen];
  is.read(magic, kMagicLen);
  if (!is || std::memcmp(magic, kMagic, kMagicLen) != 0)
    fail("format", "bad checkpoint magic: " + path);

  const uint32_t hlen = read_u32_le(is);
  std::string hs(hlen, '\0');
  is.read(hs.data(), hlen);
  if (!is) fail("format", "truncated checkpoint header: " + path);

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hs);
  } catch (const nlohmann::json::exception&) {
    fail("format", "checkpoint header is not valid JSON: " + path);
  }
  if (!header.contains("seed") || !header.contains("layers"))
    fail("format", "checkpoint header missing fields: " + path);

  SegNetParams p;
  p.init_seed = header["seed"].get<uint64_t>();

  const auto& layers = segnet_layers();
  const auto& shapes = header["layers"];
  if (!shapes.is_array() || shapes.size() != layers.size() * 2)
    fail("checkpoint", "layer count does not match this build: " + path);

  for (size_t i = 0; i < layers.size(); ++i) {
    const Shape expect_w = {layers[i].cout, layers[i].cin, layers[i].k,
                            layers[i].k};
    const Shape expect_b = {layers[i].cout};
    if (shapes[2 * i].get<Shape>() != expect_w ||
        shapes[2 * i + 1].get<Shape>() != expect_b)
      fail("checkpoint", "layer shape mismatch at conv " + std::to_string(i));

    auto read_tensor = [&](const Shape& shape) {
      Tensor t = Tensor::zeros(shape, /*requires_grad=*/true);
      auto& v = t.mutable_values();
      is.read(reinterpret_cast<char*>(v.data()),
              static_cast<std::streamsize>(v.size() * 8));
      if (!is) fail("format", "truncated checkpoint payload: " + path);
      return t;
    };
    p.weights.push_back(read_tensor(expect_w));
    p.biases.push_back(read_tensor(expect_b));
  }
  return p;
}

}  // namespace cacps
