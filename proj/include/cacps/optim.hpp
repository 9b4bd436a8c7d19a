// include/cacps/optim.hpp

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

#ifndef CACPS_OPTIM_HPP_
#define CACPS_OPTIM_HPP_

#include <cstdint>
#include <vector>

#include "cacps/tensor.hpp"

namespace cacps {

// AdamW moment buffers for one fixed parameter list.
struct AdamWState {
  std::vector<std::vector<double>> m;  // first moments, one per parameter
  std::vector<std::vector<double>> v;  // second moments
  int64_t step = 0;

  static AdamWState create(const std::vector<Tensor>& params);
};

// Decoupled-weight-decay Adam: beta1 0.9, beta2 0.999, eps 1e-8, bias
// correction; weights are first scaled by (1 - lr*weight_decay), then moved
// against the bias-corrected moment ratio. Reads each parameter's grad and
// leaves it untouched. Parameter/state mismatch -> error "shape".
void adamw_step(const std::vector<Tensor>& params, AdamWState& state,
                double lr, double weight_decay);

// lr_min + 0.5*(lr_max - lr_min)*(1 + cos(pi*epoch/epochs)).
double cosine_lr(int epoch, int epochs, double lr_max, double lr_min);

}  // namespace cacps

#endif  // CACPS_OPTIM_HPP_
