// src/phantom.cc

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

#include "cacps/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>

#include "json.hpp"

#include "cacps/error.hpp"
#include "cacps/rng.hpp"

namespace cacps {

namespace {

namespace fs = std::filesystem;

constexpr uint64_t kGeometryTag = 0x9e0217a1;
constexpr uint64_t kCorruptTag = 0x9e0217a2;
constexpr uint64_t kSampleTag = 0x9e0217a3;

// Tissue base intensities before the per-sample perturbation.
constexpr double kBgLevel = 0.15;
constexpr double kLvLevel = 0.85;
constexpr double kMyoLevel = 0.55;
constexpr double kRvLevel = 0.75;

struct DomainCorruption {
  double blur_sigma;
  double ghost_gain;
  int ghost_shift;
  double noise_sigma;
  bool gamma;
};

DomainCorruption domain_corruption(int domain_id) {
  switch (domain_id) {
    case 1:
      return {0.0, 0.0, 0, 0.0, false};
    case 2:
      return {0.8, 0.0, 0, 0.01, false};
    case 3:
      return {1.5, 0.15, 3, 0.03, false};
    case 4:
      return {2.5, 0.30, 6, 0.06, true};
    default:
      fail("config", "domain_id must lie in 1..4");
  }
}

// Separable Gaussian blur, kernel truncated at 3*sigma, edges replicated.
Grid gaussian_blur(const Grid& img, double sigma) {
  if (sigma <= 0.0) return img;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kern(static_cast<size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    kern[static_cast<size_t>(i + radius)] = v;
    sum += v;
  }
  for (double& v : kern) v /= sum;

  Grid tmp(img.h, img.w);
  for (int y = 0; y < img.h; ++y)
    for (int x = 0; x < img.w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int xs = std::clamp(x + i, 0, img.w - 1);
        acc += kern[static_cast<size_t>(i + radius)] * img.at(y, xs);
      }
      tmp.at(y, x) = acc;
    }
  Grid out(img.h, img.w);
  for (int y = 0; y < img.h; ++y)
    for (int x = 0; x < img.w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int ys = std::clamp(y + i, 0, img.h - 1);
        acc += kern[static_cast<size_t>(i + radius)] * tmp.at(ys, x);
      }
      out.at(y, x) = acc;
    }
  return out;
}

// Additive copy shifted down by `shift` rows with circular wrap.
void add_ghost(Grid& img, double gain, int shift) {
  if (gain == 0.0 || shift == 0) return;
  const Grid src = img;
  for (int y = 0; y < img.h; ++y) {
    const int ys = (y - shift % img.h + img.h) % img.h;
    for (int x = 0; x < img.w; ++x) img.at(y, x) += gain * src.at(ys, x);
  }
}

}  // namespace

PhantomRender render_phantom(uint64_t seed, int domain_id, int h, int w) {
  if (h < 32 || w < 32 || h % 4 != 0 || w % 4 != 0)
    fail("shape", "phantom dims must be >= 32 and divisible by 4");
  const DomainCorruption corr = domain_corruption(domain_id);

  // Geometry: seed-only, shared across domains.
  Rng geo(mix_seed({kGeometryTag, seed}));
  const double m = static_cast<double>(std::min(h, w));
  const double cy = 0.5 * h + geo.uniform(-0.03, 0.03) * m;
  const double cx = 0.5 * w + geo.uniform(-0.03, 0.03) * m;
  const double r_lv = geo.uniform(0.08, 0.14) * m;
  const double r_myo = r_lv + geo.uniform(0.04, 0.08) * m;
  const double r_rv = geo.uniform(0.11, 0.15) * m;
  const double theta = geo.uniform(0.0, 2.0 * std::numbers::pi);
  const double rv_cy = cy + (r_myo + 0.5 * r_rv) * std::sin(theta);
  const double rv_cx = cx + (r_myo + 0.5 * r_rv) * std::cos(theta);
  const double lv_level = kLvLevel + geo.uniform(-0.05, 0.05);
  const double myo_level = kMyoLevel + geo.uniform(-0.05, 0.05);
  const double rv_level = kRvLevel + geo.uniform(-0.05, 0.05);
  const double bg_level = kBgLevel + geo.uniform(-0.05, 0.05);

  PhantomRender r;
  r.clean = Grid(h, w);
  r.mask = MaskGrid(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double d = std::hypot(y - cy, x - cx);
      const double d_rv = std::hypot(y - rv_cy, x - rv_cx);
      uint8_t label = 0;
      if (d <= r_lv)
        label = 1;
      else if (d <= r_myo)
        label = 2;
      else if (d_rv <= r_rv)
        label = 3;
      r.mask.at(y, x) = label;
      const double level = label == 1   ? lv_level
                           : label == 2 ? myo_level
                           : label == 3 ? rv_level
                                        : bg_level;
      r.clean.at(y, x) = std::clamp(level, 0.0, 1.0);
    }

  // Corruption: its own stream, keyed by (seed, domain).
  Rng noise(mix_seed({kCorruptTag, seed, static_cast<uint64_t>(domain_id)}));
  Grid img = gaussian_blur(r.clean, corr.blur_sigma);
  add_ghost(img, corr.ghost_gain, corr.ghost_shift);
  if (corr.noise_sigma > 0.0)
    for (double& v : img.v) v += noise.normal(0.0, corr.noise_sigma);
  for (double& v : img.v) v = std::clamp(v, 0.0, 1.0);
  if (corr.gamma) {
    const double g = noise.uniform(0.7, 1.4);
    for (double& v : img.v) v = std::pow(v, g);
  }
  r.corrupted = std::move(img);
  return r;
}

PhantomSample generate_phantom(uint64_t seed, int domain_id, int h, int w) {
  PhantomRender r = render_phantom(seed, domain_id, h, w);
  PhantomSample s;
  s.image = std::move(r.corrupted);
  s.mask = std::move(r.mask);
  s.domain_id = domain_id;
  s.labeled = false;
  return s;
}

double psnr(const Grid& reference, const Grid& corrupted) {
  if (!reference.same_shape(corrupted)) fail("shape", "psnr shapes differ");
  double mse = 0.0;
  for (size_t i = 0; i < reference.size(); ++i) {
    const double d = reference.v[i] - corrupted.v[i];
    mse += d * d;
  }
  mse /= static_cast<double>(reference.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(mse);
}

void DatasetConfig::validate() const {
  if (h < 32 || w < 32 || h % 4 != 0 || w % 4 != 0)
    fail("config", "dataset dims must be >= 32 and divisible by 4");
  for (int n : train_per_domain)
    if (n < 0) fail("config", "train_per_domain must be >= 0");
  for (int n : val_per_domain)
    if (n < 0) fail("config", "val_per_domain must be >= 0");
  for (int n : test_per_domain)
    if (n < 0) fail("config", "test_per_domain must be >= 0");
  for (double f : labeled_fraction)
    if (!(f >= 0.0 && f <= 1.0))
      fail("config", "labeled_fraction must lie in [0,1]");
}

namespace {

std::string sample_name(int domain, const char* split, int index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "d%d_%s_%03d", domain, split, index);
  return buf;
}

}  // namespace

DatasetManifest build_dataset(const DatasetConfig& cfg,
                              const std::string& out_dir) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "images", ec);
  fs::create_directories(fs::path(out_dir) / "masks", ec);
  if (ec) fail("io", "cannot create dataset directories under " + out_dir);

  DatasetManifest man;
  man.h = cfg.h;
  man.w = cfg.w;

  // Sample seeds are keyed by (dataset seed, domain, split, index) so any
  // subset regenerates identically.
  uint64_t next_index[4] = {0, 0, 0, 0};
  auto emit = [&](int domain, const char* split, int count, int labeled_count) {
    for (int i = 0; i < count; ++i) {
      const uint64_t idx = next_index[domain - 1]++;
      const uint64_t sample_seed =
          mix_seed({kSampleTag, cfg.seed, static_cast<uint64_t>(domain), idx});
      PhantomSample s = generate_phantom(sample_seed, domain, cfg.h, cfg.w);
      s.sample_id = sample_name(domain, split, i);
      s.labeled = i < labeled_count;

      ManifestEntry e;
      e.sample_id = s.sample_id;
      e.image_file = "images/" + s.sample_id + ".phi";
      e.domain_id = domain;
      e.labeled = s.labeled;
      e.split = split;
      save_image(s.image, (fs::path(out_dir) / e.image_file).string());
      if (s.labeled) {
        e.mask_file = "masks/" + s.sample_id + ".phm";
        save_mask(s.mask, (fs::path(out_dir) / e.mask_file).string());
      }
      man.samples.push_back(std::move(e));
    }
  };

  for (int d = 1; d <= 4; ++d) {
    const int n = cfg.train_per_domain[static_cast<size_t>(d - 1)];
    const int k = static_cast<int>(
        std::lround(cfg.labeled_fraction[static_cast<size_t>(d - 1)] * n));
    emit(d, "train", n, k);
    const int nv = cfg.val_per_domain[static_cast<size_t>(d - 1)];
    emit(d, "val", nv, nv);
    const int nt = cfg.test_per_domain[static_cast<size_t>(d - 1)];
    emit(d, "test", nt, nt);
  }

  save_manifest(man, out_dir);
  return man;
}

void save_manifest(const DatasetManifest& m, const std::string& dir) {
  nlohmann::json j;
  j["version"] = m.version;
  j["h"] = m.h;
  j["w"] = m.w;
  nlohmann::json samples = nlohmann::json::array();
  nlohmann::json counts = nlohmann::json::object();
  std::array<int, 4> per_domain = {0, 0, 0, 0};
  for (const ManifestEntry& e : m.samples) {
    nlohmann::json s;
    s["sample_id"] = e.sample_id;
    s["image"] = e.image_file;
    if (e.labeled)
      s["mask"] = e.mask_file;
    else
      s["mask"] = nullptr;
    s["domain_id"] = e.domain_id;
    s["labeled"] = e.labeled;
    s["split"] = e.split;
    samples.push_back(std::move(s));
    per_domain[static_cast<size_t>(e.domain_id - 1)]++;
  }
  j["samples"] = std::move(samples);
  for (int d = 1; d <= 4; ++d)
    counts["d" + std::to_string(d)] = per_domain[static_cast<size_t>(d - 1)];
  j["counts_per_domain"] = std::move(counts);

  std::ofstream os(fs::path(dir) / "manifest.json");
  if (!os) fail("io", "cannot write manifest under " + dir);
  os << j.dump(2) << "\n";
  if (!os) fail("io", "short write on manifest under " + dir);
}

DatasetManifest load_manifest(const std::string& dir) {
  std::ifstream is(fs::path(dir) / "manifest.json");
  if (!is) fail("io", "cannot open manifest under " + dir);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception&) {
    fail("format", "manifest is not valid JSON under " + dir);
  }

  DatasetManifest m;
  try {
    m.version = j.at("version").get<int>();
    m.h = j.at("h").get<int>();
    m.w = j.at("w").get<int>();
    for (const auto& s : j.at("samples")) {
      ManifestEntry e;
      e.sample_id = s.at("sample_id").get<std::string>();
      e.image_file = s.at("image").get<std::string>();
      if (!s.at("mask").is_null()) e.mask_file = s.at("mask").get<std::string>();
      e.domain_id = s.at("domain_id").get<int>();
      e.labeled = s.at("labeled").get<bool>();
      e.split = s.at("split").get<std::string>();
      m.samples.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception&) {
    fail("format", "manifest is missing required fields under " + dir);
  }

  for (const ManifestEntry& e : m.samples) {
    if (e.domain_id < 1 || e.domain_id > 4)
      fail("data", "manifest domain_id out of range: " + e.sample_id);
    if (e.split != "train" && e.split != "val" && e.split != "test")
      fail("data", "manifest split unknown: " + e.sample_id);
    if (e.labeled != !e.mask_file.empty())
      fail("data", "manifest labeled flag disagrees with mask file: " +
                       e.sample_id);
    if (!fs::exists(fs::path(dir) / e.image_file))
      fail("data", "missing image file: " + e.image_file);
    if (e.labeled && !fs::exists(fs::path(dir) / e.mask_file))
      fail("data", "missing mask file: " + e.mask_file);
  }
  return m;
}

namespace {

constexpr char kImageMagic[4] = {'P', 'H', 'I', '1'};
constexpr char kMaskMagic[4] = {'P', 'H', 'M', '1'};

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

void check_dims(uint32_t h, uint32_t w, const std::string& path) {
  // 16k on a side is far beyond anything this project writes; treat bigger
  // claims as corruption rather than trying to allocate.
  if (h == 0 || w == 0 || h > 16384 || w > 16384)
    fail("format", "implausible grid dims in " + path);
}

}  // namespace

void save_image(const Grid& image, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail("io", "cannot open image for writing: " + path);
  os.write(kImageMagic, 4);
  write_u32_le(os, static_cast<uint32_t>(image.h));
  write_u32_le(os, static_cast<uint32_t>(image.w));
  static_assert(sizeof(float) == 4, "32-bit IEEE floats required");
  std::vector<float> buf(image.size());
  for (size_t i = 0; i < buf.size(); ++i)
    buf[i] = static_cast<float>(image.v[i]);
  os.write(reinterpret_cast<const char*>(buf.data()),
           static_cast<std::streamsize>(buf.size() * 4));
  if (!os) fail("io", "short write on image: " + path);
}

Grid load_image(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail("io", "cannot open image: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kImageMagic, 4) != 0)
    fail("format", "bad image magic: " + path);
  const uint32_t h = read_u32_le(is);
  const uint32_t w = read_u32_le(is);
  check_dims(h, w, path);
  std::vector<float> buf(static_cast<size_t>(h) * w);
  is.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * 4));
  if (!is) fail("format", "truncated image payload: " + path);
  Grid g(static_cast<int>(h), static_cast<int>(w));
  for (size_t i = 0; i < buf.size(); ++i) g.v[i] = buf[i];
  return g;
}

void save_mask(const MaskGrid& mask, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail("io", "cannot open mask for writing: " + path);
  os.write(kMaskMagic, 4);
  write_u32_le(os, static_cast<uint32_t>(mask.h));
  write_u32_le(os, static_cast<uint32_t>(mask.w));
  os.write(reinterpret_cast<const char*>(mask.v.data()),
           static_cast<std::streamsize>(mask.v.size()));
  if (!os) fail("io", "short write on mask: " + path);
}

MaskGrid load_mask(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail("io", "cannot open mask: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMaskMagic, 4) != 0)
    fail("format", "bad mask magic: " + path);
  const uint32_t h = read_u32_le(is);
  const uint32_t w = read_u32_le(is);
  check_dims(h, w, path);
  MaskGrid m(static_cast<int>(h), static_cast<int>(w));
  is.read(reinterpret_cast<char*>(m.v.data()),
          static_cast<std::streamsize>(m.v.size()));
  if (!is) fail("format", "truncated mask payload: " + path);
  for (uint8_t v : m.v)
    if (v > 3) fail("format", "mask label out of range 0..3: " + path);
  return m;
}

}  // namespace cacps
