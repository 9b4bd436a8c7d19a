// include/cacps/loss.hpp

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

// Confidence-aware cross pseudo supervision. Each network predicts on the
// original batch (P_O) and its Fourier-augmented twin (P_F); the average
// P_E yields hard pseudo labels Y, and the per-pixel KL divergence
// V = sum_c P_F[c] * log(P_F[c]/P_O[c]) measures how unstable the
// prediction is under augmentation. Network B is supervised by network A's
// pseudo labels weighted by exp(-V_A), and vice versa.

#ifndef CACPS_LOSS_HPP_
#define CACPS_LOSS_HPP_

#include <array>
#include <vector>

#include "cacps/segnet.hpp"
#include "cacps/tensor.hpp"

namespace cacps {

// One network's prediction set on a batch.
struct PseudoBundle {
  Tensor p_o;  // probs on the original images   [N,4,H,W]
  Tensor p_f;  // probs on the augmented images  [N,4,H,W]
  Tensor p_e;  // (p_o + p_f) / 2                [N,4,H,W]
  Tensor v;    // per-pixel variance, >= 0       [N,H,W]; gradient-tracked
  Tensor y;    // one-hot pseudo label from p_e  [N,4,H,W]; detached
};

// Scalar summary of one optimization step.
struct LossReport {
  double l_s = 0.0;
  double l_cacps = 0.0;
  double l_total = 0.0;
  double mean_v = 0.0;
  std::array<double, 3> dice_per_class{};  // LV, MYO, RV loss terms
};

// Per-pixel KL divergence of p_f from p_o, summed over channels; logs are
// clamped at 1e-8. Differentiable through both arguments.
Tensor variance_map(const Tensor& p_f, const Tensor& p_o);

// Per-pixel categorical cross-entropy -sum_c y[c]*log(p[c]) -> [N,H,W].
Tensor cross_entropy_map(const Tensor& probs, const Tensor& y_onehot);

// Hard one-hot at the per-pixel argmax; ties break toward the lowest class
// index. The result never carries gradient.
Tensor one_hot_argmax(const Tensor& probs);

// Predict on original and augmented batches with one network and assemble
// the full bundle. Shape mismatch between the batches -> error "shape".
PseudoBundle build_bundle(const SegNetParams& net, const Tensor& i_batch,
                          const Tensor& x_batch);

// L_a + L_b with L_a = mean[ exp(-V_A) * CE(P_E^B, Y_A) + V_A ] and L_b
// symmetric. Y is always detached; V is detached unless
// grad_through_variance is set.
Tensor cacps_pair_loss(const PseudoBundle& a, const PseudoBundle& b,
                       bool grad_through_variance = false);

// Soft dice loss over foreground classes {1,2,3} with smoothing 1:
// mean_c [1 - (2*sum(P_c*G_c)+1) / (sum(P_c)+sum(G_c)+1)], sums over batch
// and pixels. g must be one-hot -> error "label" otherwise. When per_class
// is given it receives the three per-class loss terms.
Tensor dice_loss(const Tensor& probs, const Tensor& g_onehot,
                 std::array<double, 3>* per_class = nullptr);

// l_s + beta * l_cacps.
Tensor total_loss(const Tensor& l_s, const Tensor& l_cacps, double beta);

}  // namespace cacps

#endif  // CACPS_LOSS_HPP_
