// src/optim.cc

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

#include "cacps/optim.hpp"

#include <cmath>
#include <numbers>

#include "cacps/error.hpp"

namespace cacps {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;

}  // namespace

AdamWState AdamWState::create(const std::vector<Tensor>& params) {
  AdamWState s;
  s.m.reserve(params.size());
  s.v.reserve(params.size());
  for (const Tensor& p : params) {
    s.m.emplace_back(p.numel(), 0.0);
    s.v.emplace_back(p.numel(), 0.0);
  }
  return s;
}

void adamw_step(const std::vector<Tensor>& params, AdamWState& state,
                double lr, double weight_decay) {
  if (params.size() != state.m.size() || params.size() != state.v.size())
    fail("shape", "optimizer state does not match the parameter list");

  state.step += 1;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(state.step));

  for (size_t pi = 0; pi < params.size(); ++pi) {
    const Tensor& p = params[pi];
    if (p.numel() != state.m[pi].size())
      fail("shape", "optimizer moment shape does not match its parameter");
    const std::vector<double>& g = p.grad();
    std::vector<double>& pv = p.mutable_values();
    std::vector<double>& m = state.m[pi];
    std::vector<double>& v = state.v[pi];

    for (size_t i = 0; i < pv.size(); ++i) {
      pv[i] *= 1.0 - lr * weight_decay;
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
      v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      pv[i] -= lr * m_hat / (std::sqrt(v_hat) + kEps);
    }
  }
}

double cosine_lr(int epoch, int epochs, double lr_max, double lr_min) {
  if (epochs <= 0) fail("config", "epochs must be positive");
  const double t = static_cast<double>(epoch) / static_cast<double>(epochs);
  return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(std::numbers::pi * t));
}

}  // namespace cacps
