// include/cacps/grid2d.hpp

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

#ifndef CACPS_GRID2D_HPP_
#define CACPS_GRID2D_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cacps/error.hpp"

namespace cacps {

// Dense row-major H-by-W plane of reals. The plain (non-differentiable)
// image carrier used by the augmentation and data pipelines.
struct Grid {
  int h = 0;
  int w = 0;
  std::vector<double> v;

  Grid() = default;
  Grid(int height, int width, double fill = 0.0)
      : h(height), w(width),
        v(static_cast<size_t>(height) * static_cast<size_t>(width), fill) {
    if (height <= 0 || width <= 0) fail("shape", "grid dims must be positive");
  }

  double& at(int y, int x) { return v[static_cast<size_t>(y) * w + x]; }
  double at(int y, int x) const { return v[static_cast<size_t>(y) * w + x]; }
  size_t size() const { return v.size(); }
  bool same_shape(const Grid& o) const { return h == o.h && w == o.w; }
};

// Row-major H-by-W plane of {0,1} flags.
struct MaskGrid {
  int h = 0;
  int w = 0;
  std::vector<uint8_t> v;

  MaskGrid() = default;
  MaskGrid(int height, int width)
      : h(height), w(width),
        v(static_cast<size_t>(height) * static_cast<size_t>(width), 0) {
    if (height <= 0 || width <= 0) fail("shape", "mask dims must be positive");
  }

  uint8_t& at(int y, int x) { return v[static_cast<size_t>(y) * w + x]; }
  uint8_t at(int y, int x) const { return v[static_cast<size_t>(y) * w + x]; }
};

}  // namespace cacps

#endif  // CACPS_GRID2D_HPP_
