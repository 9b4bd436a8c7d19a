// include/cacps/segnet.hpp

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

// Miniature encoder-decoder segmentation network:
//   conv(1->16) conv(16->16) down2 conv(16->32) conv(32->32) down2
//   conv(32->64) up2 conv(64->32) up2 conv(32->16) conv(16->4, 1x1)
// ReLU after every conv except the last. No normalization layers, so a
// forward pass is a pure function of (params, input).

#ifndef CACPS_SEGNET_HPP_
#define CACPS_SEGNET_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "cacps/tensor.hpp"

namespace cacps {

inline constexpr int kNumClasses = 4;

struct ConvSpec {
  int cin;
  int cout;
  int k;
};

// The fixed layer table; index i names conv layer i.
const std::vector<ConvSpec>& segnet_layers();

struct SegNetParams {
  std::vector<Tensor> weights;  // one [Cout,Cin,k,k] tensor per conv
  std::vector<Tensor> biases;   // one [Cout] tensor per conv
  uint64_t init_seed = 0;

  // Flat view [w0, b0, w1, b1, ...] sharing storage with the fields above.
  std::vector<Tensor> parameters() const;
  size_t param_count() const;
  void zero_grad() const;
};

// He-normal weights (stddev sqrt(2/fan_in)), zero biases; a pure function
// of the seed.
SegNetParams segnet_init(uint64_t seed);

// Raw logits [N,4,H,W]. H and W must be divisible by 4 (two downsamples);
// violations raise error "shape".
Tensor segnet_forward(const SegNetParams& params, const Tensor& batch);

// softmax_channels(segnet_forward(...)).
Tensor predict_probs(const SegNetParams& params, const Tensor& batch);

// Checkpoint layout: magic "CKPT1", u32 little-endian JSON header length,
// JSON {seed, layer shapes}, then every parameter tensor's values as raw
// little-endian 64-bit floats in parameters() order.
void save_checkpoint(const SegNetParams& params, const std::string& path);
SegNetParams load_checkpoint(const std::string& path);

}  // namespace cacps

#endif  // CACPS_SEGNET_HPP_
