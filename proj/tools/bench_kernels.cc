// tools/bench_kernels.cc

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

// Production OpenMP kernels against the serial reference implementations,
// at the shapes the training loop actually uses (batch 8, 16 channels,
// 64x64). Run with OMP_NUM_THREADS to see scaling.

#include <benchmark/benchmark.h>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "cacps/conv_kernels.hpp"
#include "cacps/rng.hpp"
#include "cacps/spectral.hpp"
#include "reference.hpp"

namespace {

constexpr int kN = 8, kCin = 16, kCout = 16, kH = 64, kW = 64, kK = 3;

std::vector<double> filled(size_t n, uint64_t seed) {
  cacps::Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

using ConvForwardFn = void (*)(const double*, const double*, const double*,
                               double*, int, int, int, int, int, int);
using ConvGradInputFn = void (*)(const double*, const double*, double*, int,
                                 int, int, int, int, int);
using ConvGradWeightsFn = void (*)(const double*, const double*, double*, int,
                                   int, int, int, int, int);
using PlaneFn = void (*)(const double*, double*, int, int, int);

void conv_forward(benchmark::State& state, ConvForwardFn fn) {
  const auto in = filled(size_t(kN) * kCin * kH * kW, 1);
  const auto wts = filled(size_t(kCout) * kCin * kK * kK, 2);
  const auto bias = filled(kCout, 3);
  std::vector<double> out(size_t(kN) * kCout * kH * kW);
  for (auto _ : state) {
    fn(in.data(), wts.data(), bias.data(), out.data(), kN, kCin, kH, kW,
       kCout, kK);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * int64_t(out.size()) * kCin *
                          kK * kK);
}

void conv_grad_input(benchmark::State& state, ConvGradInputFn fn) {
  const auto gout = filled(size_t(kN) * kCout * kH * kW, 4);
  const auto wts = filled(size_t(kCout) * kCin * kK * kK, 5);
  std::vector<double> gin(size_t(kN) * kCin * kH * kW);
  for (auto _ : state) {
    std::fill(gin.begin(), gin.end(), 0.0);
    fn(gout.data(), wts.data(), gin.data(), kN, kCin, kH, kW, kCout, kK);
    benchmark::DoNotOptimize(gin.data());
  }
}

void conv_grad_weights(benchmark::State& state, ConvGradWeightsFn fn) {
  const auto gout = filled(size_t(kN) * kCout * kH * kW, 6);
  const auto in = filled(size_t(kN) * kCin * kH * kW, 7);
  std::vector<double> gw(size_t(kCout) * kCin * kK * kK);
  for (auto _ : state) {
    std::fill(gw.begin(), gw.end(), 0.0);
    fn(gout.data(), in.data(), gw.data(), kN, kCin, kH, kW, kCout, kK);
    benchmark::DoNotOptimize(gw.data());
  }
}

void pool_forward(benchmark::State& state, PlaneFn fn) {
  const int planes = kN * kCin;
  const auto in = filled(size_t(planes) * kH * kW, 8);
  std::vector<double> out(size_t(planes) * (kH / 2) * (kW / 2));
  for (auto _ : state) {
    fn(in.data(), out.data(), planes, kH, kW);
    benchmark::DoNotOptimize(out.data());
  }
}

void upsample_forward(benchmark::State& state, PlaneFn fn) {
  const int planes = kN * kCin;
  const auto in = filled(size_t(planes) * kH * kW, 9);
  std::vector<double> out(size_t(planes) * (2 * kH) * (2 * kW));
  for (auto _ : state) {
    fn(in.data(), out.data(), planes, kH, kW);
    benchmark::DoNotOptimize(out.data());
  }
}

void dft_fast(benchmark::State& state) {
  cacps::Rng rng(10);
  cacps::Grid img(kH, kW);
  for (double& v : img.v) v = rng.uniform();
  for (auto _ : state) {
    cacps::Spectrum s = cacps::dft2(img);
    benchmark::DoNotOptimize(s.amplitude.v.data());
  }
}

void dft_reference(benchmark::State& state) {
  cacps::Rng rng(10);
  cacps::Grid img(kH, kW);
  for (double& v : img.v) v = rng.uniform();
  for (auto _ : state) {
    cacps::Spectrum s = cacps::ref::dft2(img);
    benchmark::DoNotOptimize(s.amplitude.v.data());
  }
}

BENCHMARK_CAPTURE(conv_forward, omp, cacps::kernels::conv2d_forward);
BENCHMARK_CAPTURE(conv_forward, serial_ref, cacps::ref::conv2d_forward);
BENCHMARK_CAPTURE(conv_grad_input, omp, cacps::kernels::conv2d_grad_input);
BENCHMARK_CAPTURE(conv_grad_input, serial_ref, cacps::ref::conv2d_grad_input);
BENCHMARK_CAPTURE(conv_grad_weights, omp, cacps::kernels::conv2d_grad_weights);
BENCHMARK_CAPTURE(conv_grad_weights, serial_ref,
                  cacps::ref::conv2d_grad_weights);
BENCHMARK_CAPTURE(pool_forward, omp, cacps::kernels::avg_pool2_forward);
BENCHMARK_CAPTURE(pool_forward, serial_ref, cacps::ref::avg_pool2_forward);
BENCHMARK_CAPTURE(upsample_forward, omp, cacps::kernels::upsample2_forward);
BENCHMARK_CAPTURE(upsample_forward, serial_ref,
                  cacps::ref::upsample2_forward);
BENCHMARK(dft_fast);
BENCHMARK(dft_reference);

}  // namespace

BENCHMARK_MAIN();
