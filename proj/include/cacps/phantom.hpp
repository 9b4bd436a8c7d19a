// include/cacps/phantom.hpp

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

// Synthetic cardiac phantoms over four motion-severity domains. Geometry is
// a jittered LV disk (label 1) wrapped by a myocardium annulus (label 2)
// with an RV crescent (label 3) abutting the annulus on a random side.
// Labels come from the clean geometry; domain corruption (blur, ghosting,
// noise, gamma) touches the image only and grows with domain id:
//   d1 none
//   d2 blur 0.8px, noise 0.01
//   d3 blur 1.5px, ghost 0.15x shifted 3px, noise 0.03
//   d4 blur 2.5px, ghost 0.30x shifted 6px, noise 0.06, gamma U[0.7,1.4]
// Geometry depends on the seed only, so a seed's four domain renderings
// share one anatomy and differ in corruption alone.

#ifndef CACPS_PHANTOM_HPP_
#define CACPS_PHANTOM_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cacps/grid2d.hpp"

namespace cacps {

struct PhantomSample {
  Grid image;     // values in [0,1]
  MaskGrid mask;  // labels 0=background 1=LV 2=MYO 3=RV
  int domain_id = 1;
  bool labeled = false;
  std::string sample_id;
};

// Clean geometry plus its corrupted rendering; the mask matches the clean
// image. Exposed so severity can be measured against the uncorrupted truth.
struct PhantomRender {
  Grid clean;
  Grid corrupted;
  MaskGrid mask;
};

// H, W must be >= 32 and divisible by 4 -> error "shape"; domain_id in 1..4
// -> error "config". Pure function of its arguments.
PhantomRender render_phantom(uint64_t seed, int domain_id, int h, int w);

// render_phantom wrapped into a sample record (labeled defaults to false;
// callers flip it when they write a mask file).
PhantomSample generate_phantom(uint64_t seed, int domain_id, int h, int w);

// Peak-signal-to-noise ratio with peak 1.0; +infinity for identical grids.
double psnr(const Grid& reference, const Grid& corrupted);

struct DatasetConfig {
  int h = 64;
  int w = 64;
  std::array<int, 4> train_per_domain = {25, 25, 25, 25};
  std::array<double, 4> labeled_fraction = {0.2, 0.2, 0.0, 0.0};
  std::array<int, 4> val_per_domain = {0, 0, 5, 5};      // always labeled
  std::array<int, 4> test_per_domain = {0, 0, 0, 0};     // always labeled
  uint64_t seed = 0;

  void validate() const;  // error "config" on bad fields
};

struct ManifestEntry {
  std::string sample_id;
  std::string image_file;  // relative to the manifest directory
  std::string mask_file;   // empty when unlabeled
  int domain_id = 1;
  bool labeled = false;
  std::string split;  // train | val | test
};

struct DatasetManifest {
  int version = 1;
  int h = 0;
  int w = 0;
  std::vector<ManifestEntry> samples;
};

// Writes images, masks for labeled samples, and manifest.json under out_dir.
// Deterministic in cfg: same inputs give byte-identical files.
// Unwritable path -> error "io".
DatasetManifest build_dataset(const DatasetConfig& cfg,
                              const std::string& out_dir);

// manifest.json round trip; load validates that every referenced file
// exists and that labeled == (mask file present) -> error "data".
void save_manifest(const DatasetManifest& m, const std::string& dir);
DatasetManifest load_manifest(const std::string& dir);

// PHI1 image file: magic "PHI1", u32 H, u32 W little-endian, then H*W
// little-endian 32-bit floats row-major. Doubles are rounded to float on
// save, so one save->load round trip is within float precision and further
// round trips are exact.
void save_image(const Grid& image, const std::string& path);
Grid load_image(const std::string& path);

// PHM1 mask file: magic "PHM1", u32 H, u32 W, then H*W bytes with values
// 0..3. Bad magic, truncation, or out-of-range labels -> error "format".
void save_mask(const MaskGrid& mask, const std::string& path);
MaskGrid load_mask(const std::string& path);

}  // namespace cacps

#endif  // CACPS_PHANTOM_HPP_
