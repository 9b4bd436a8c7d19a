// src/loss.cc

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

#include "cacps/loss.hpp"

#include <cstdint>

#include "cacps/error.hpp"

namespace cacps {

namespace {

void check_probs_shape(const Tensor& t, const char* what) {
  if (t.rank() != 4 || t.dim(1) != kNumClasses)
    fail("shape", std::string(what) + " must be [N,4,H,W]");
}

}  // namespace

Tensor variance_map(const Tensor& p_f, const Tensor& p_o) {
  check_probs_shape(p_f, "variance p_f");
  if (p_f.shape() != p_o.shape()) fail("shape", "variance operand shapes differ");
  Tensor ratio_log = sub(log(p_f), log(p_o));
  return reduce_sum(mul(p_f, ratio_log), {1});
}

Tensor cross_entropy_map(const Tensor& probs, const Tensor& y_onehot) {
  check_probs_shape(probs, "cross-entropy probs");
  if (probs.shape() != y_onehot.shape())
    fail("shape", "cross-entropy operand shapes differ");
  return mul(reduce_sum(mul(y_onehot, log(probs)), {1}), -1.0);
}

Tensor one_hot_argmax(const Tensor& probs) {
  check_probs_shape(probs, "one_hot_argmax input");
  const int n = probs.dim(0), c = probs.dim(1), h = probs.dim(2),
            w = probs.dim(3);
  const int64_t plane = static_cast<int64_t>(h) * w;
  const int64_t pixels = static_cast<int64_t>(n) * plane;

  Tensor out = Tensor::zeros(probs.shape());
  const double* pv = probs.values().data();
  double* ov = out.mutable_values().data();
#pragma omp parallel for schedule(static) if (pixels > (1 << 12))
  for (int64_t px = 0; px < pixels; ++px) {
    const int64_t b = px / plane;
    const int64_t sp = px % plane;
    const int64_t base = b * c * plane + sp;
    int best = 0;
    double bv = pv[base];
    for (int ch = 1; ch < c; ++ch) {
      const double v = pv[base + ch * plane];
      if (v > bv) {  // strict: ties keep the lowest class index
        bv = v;
        best = ch;
      }
    }
    ov[base + static_cast<int64_t>(best) * plane] = 1.0;
  }
  return out;
}

PseudoBundle build_bundle(const SegNetParams& net, const Tensor& i_batch,
                          const Tensor& x_batch) {
  if (i_batch.shape() != x_batch.shape())
    fail("shape", "original/augmented batch shapes differ");
  PseudoBundle b;
  b.p_o = predict_probs(net, i_batch);
  b.p_f = predict_probs(net, x_batch);
  b.p_e = mul(add(b.p_o, b.p_f), 0.5);
  b.v = variance_map(b.p_f, b.p_o);
  b.y = one_hot_argmax(stop_gradient(b.p_e));
  return b;
}

namespace {

Tensor one_sided_loss(const PseudoBundle& from, const PseudoBundle& to,
                      bool grad_through_variance) {
  Tensor v = grad_through_variance ? from.v : stop_gradient(from.v);
  Tensor ce = cross_entropy_map(to.p_e, from.y);
  Tensor weighted = add(mul(exp(mul(v, -1.0)), ce), v);
  return reduce_mean(weighted);
}

}  // namespace

Tensor cacps_pair_loss(const PseudoBundle& a, const PseudoBundle& b,
                       bool grad_through_variance) {
  if (a.p_e.shape() != b.p_e.shape())
    fail("shape", "bundle shapes differ between the two networks");
  Tensor l_a = one_sided_loss(a, b, grad_through_variance);
  Tensor l_b = one_sided_loss(b, a, grad_through_variance);
  return add(l_a, l_b);
}

Tensor dice_loss(const Tensor& probs, const Tensor& g_onehot,
                 std::array<double, 3>* per_class) {
  check_probs_shape(probs, "dice probs");
  if (probs.shape() != g_onehot.shape())
    fail("shape", "dice operand shapes differ");

  // One-hot validation: entries in {0,1}, channel sums exactly 1.
  const int n = g_onehot.dim(0), c = g_onehot.dim(1), h = g_onehot.dim(2),
            w = g_onehot.dim(3);
  const int64_t plane = static_cast<int64_t>(h) * w;
  const double* gv = g_onehot.values().data();
  for (int64_t b = 0; b < n; ++b)
    for (int64_t sp = 0; sp < plane; ++sp) {
      double s = 0.0;
      for (int ch = 0; ch < c; ++ch) {
        const double v = gv[(b * c + ch) * plane + sp];
        if (v != 0.0 && v != 1.0) fail("label", "ground truth is not one-hot");
        s += v;
      }
      if (s != 1.0) fail("label", "ground truth channel sum is not 1");
    }

  constexpr double kSmooth = 1.0;
  const std::vector<int> all_but_channel = {0, 2, 3};
  Tensor inter = reduce_sum(mul(probs, g_onehot), all_but_channel);  // [4]
  Tensor psum = reduce_sum(probs, all_but_channel);
  Tensor gsum = reduce_sum(g_onehot, all_but_channel);

  Tensor acc = Tensor::scalar(0.0);
  for (int ch = 1; ch < kNumClasses; ++ch) {
    Tensor num = add(mul(take_scalar(inter, ch), 2.0), kSmooth);
    Tensor den = add(add(take_scalar(psum, ch), take_scalar(gsum, ch)), kSmooth);
    Tensor term = sub(Tensor::scalar(1.0), div(num, den));
    if (per_class) (*per_class)[static_cast<size_t>(ch - 1)] = term.item();
    acc = add(acc, term);
  }
  return div(acc, 3.0);
}

Tensor total_loss(const Tensor& l_s, const Tensor& l_cacps, double beta) {
  return add(l_s, mul(l_cacps, beta));
}

}  // namespace cacps
