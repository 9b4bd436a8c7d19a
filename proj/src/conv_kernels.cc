// src/conv_kernels.cc

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

#include "cacps/conv_kernels.hpp"

#include <algorithm>
#include <cstdint>

namespace cacps {
namespace kernels {

namespace {
constexpr int64_t kParallelCutoff = 1 << 12;
}

// Direct convolution, one (n, cout) plane per task. The innermost loop is a
// contiguous axpy over x, which the compiler vectorizes.
void conv2d_forward(const double* in, const double* weights, const double* bias,
                    double* out, int n, int cin, int h, int w, int cout,
                    int k) {
  const int p = k / 2;
  const int64_t plane = static_cast<int64_t>(h) * w;
  const int64_t work = static_cast<int64_t>(n) * cout * cin * plane * k * k;

#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelCutoff)
  for (int b = 0; b < n; ++b) {
    for (int co = 0; co < cout; ++co) {
      double* o = out + (static_cast<int64_t>(b) * cout + co) * plane;
      std::fill(o, o + plane, bias[co]);
      for (int ci = 0; ci < cin; ++ci) {
        const double* ip = in + (static_cast<int64_t>(b) * cin + ci) * plane;
        const double* wp =
            weights + ((static_cast<int64_t>(co) * cin + ci) * k) * k;
        for (int ky = 0; ky < k; ++ky) {
          const int dy = ky - p;
          const int y0 = std::max(0, -dy);
          const int y1 = std::min(h, h - dy);
          for (int kx = 0; kx < k; ++kx) {
            const int dx = kx - p;
            const int x0 = std::max(0, -dx);
            const int x1 = std::min(w, w - dx);
            const double wv = wp[ky * k + kx];
            for (int y = y0; y < y1; ++y) {
              double* orow = o + static_cast<int64_t>(y) * w;
              const double* irow =
                  ip + static_cast<int64_t>(y + dy) * w + dx;
              for (int x = x0; x < x1; ++x) orow[x] += wv * irow[x];
            }
          }
        }
      }
    }
  }
}

// Transposed pass: each (n, cin) input plane gathers from all output planes
// with the kernel offsets mirrored.
void conv2d_grad_input(const double* gout, const double* weights, double* gin,
                       int n, int cin, int h, int w, int cout, int k) {
  const int p = k / 2;
  const int64_t plane = static_cast<int64_t>(h) * w;
  const int64_t work = static_cast<int64_t>(n) * cout * cin * plane * k * k;

#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelCutoff)
  for (int b = 0; b < n; ++b) {
    for (int ci = 0; ci < cin; ++ci) {
      double* gi = gin + (static_cast<int64_t>(b) * cin + ci) * plane;
      for (int co = 0; co < cout; ++co) {
        const double* go = gout + (static_cast<int64_t>(b) * cout + co) * plane;
        const double* wp =
            weights + ((static_cast<int64_t>(co) * cin + ci) * k) * k;
        for (int ky = 0; ky < k; ++ky) {
          // d(out[y]) / d(in[y + ky - p]) reads back as gin[y] += go[y - dy].
          const int dy = ky - p;
          const int y0 = std::max(0, dy);
          const int y1 = std::min(h, h + dy);
          for (int kx = 0; kx < k; ++kx) {
            const int dx = kx - p;
            const int x0 = std::max(0, dx);
            const int x1 = std::min(w, w + dx);
            const double wv = wp[ky * k + kx];
            for (int y = y0; y < y1; ++y) {
              double* grow = gi + static_cast<int64_t>(y) * w;
              const double* orow =
                  go + static_cast<int64_t>(y - dy) * w - dx;
              for (int x = x0; x < x1; ++x) grow[x] += wv * orow[x];
            }
          }
        }
      }
    }
  }
}

// One kernel element per task; the batch/pixel sum runs in a fixed order per
// task, independent of the thread count.
void conv2d_grad_weights(const double* gout, const double* in, double* gw,
                         int n, int cin, int h, int w, int cout, int k) {
  const int p = k / 2;
  const int64_t plane = static_cast<int64_t>(h) * w;
  const int64_t work = static_cast<int64_t>(n) * cout * cin * plane * k * k;

#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelCutoff)
  for (int co = 0; co < cout; ++co) {
    for (int ci = 0; ci < cin; ++ci) {
      double* wp = gw + ((static_cast<int64_t>(co) * cin + ci) * k) * k;
      for (int ky = 0; ky < k; ++ky) {
        const int dy = ky - p;
        const int y0 = std::max(0, -dy);
        const int y1 = std::min(h, h - dy);
        for (int kx = 0; kx < k; ++kx) {
          const int dx = kx - p;
          const int x0 = std::max(0, -dx);
          const int x1 = std::min(w, w - dx);
          double acc = 0.0;
          for (int b = 0; b < n; ++b) {
            const double* go =
                gout + (static_cast<int64_t>(b) * cout + co) * plane;
            const double* ip =
                in + (static_cast<int64_t>(b) * cin + ci) * plane;
            for (int y = y0; y < y1; ++y) {
              const double* orow = go + static_cast<int64_t>(y) * w;
              const double* irow =
                  ip + static_cast<int64_t>(y + dy) * w + dx;
              // simd licenses the reassociation this dot product needs to
              // vectorize; the lane order is fixed at compile time, so runs
              // stay bit-identical for any thread count.
#pragma omp simd reduction(+ : acc)
              for (int x = x0; x < x1; ++x) acc += orow[x] * irow[x];
            }
          }
          wp[ky * k + kx] += acc;
        }
      }
    }
  }
}

void conv2d_grad_bias(const double* gout, double* gb, int n, int cout, int h,
                      int w) {
  const int64_t plane = static_cast<int64_t>(h) * w;
#pragma omp parallel for schedule(static) if (static_cast<int64_t>(n) * cout * plane > kParallelCutoff)
  for (int co = 0; co < cout; ++co) {
    double acc = 0.0;
    for (int b = 0; b < n; ++b) {
      const double* go = gout + (static_cast<int64_t>(b) * cout + co) * plane;
#pragma omp simd reduction(+ : acc)
      for (int64_t i = 0; i < plane; ++i) acc += go[i];
    }
    gb[co] += acc;
  }
}

void avg_pool2_forward(const double* in, double* out, int planes, int h,
                       int w) {
  const int oh = h / 2, ow = w / 2;
#pragma omp parallel for schedule(static) if (static_cast<int64_t>(planes) * h * w > kParallelCutoff)
  for (int pl = 0; pl < planes; ++pl) {
    const double* ip = in + static_cast<int64_t>(pl) * h * w;
    double* op = out + static_cast<int64_t>(pl) * oh * ow;
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        const double* c = ip + static_cast<int64_t>(2 * y) * w + 2 * x;
        op[static_cast<int64_t>(y) * ow + x] =
            (c[0] + c[1] + c[w] + c[w + 1]) * 0.25;
      }
    }
  }
}

void avg_pool2_backward(const double* gout, double* gin, int planes, int h,
                        int w) {
  const int oh = h / 2, ow = w / 2;
#pragma omp parallel for schedule(static) if (static_cast<int64_t>(planes) * h * w > kParallelCutoff)
  for (int pl = 0; pl < planes; ++pl) {
    const double* gp = gout + static_cast<int64_t>(pl) * oh * ow;
    double* gi = gin + static_cast<int64_t>(pl) * h * w;
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        const double g = gp[static_cast<int64_t>(y) * ow + x] * 0.25;
        double* c = gi + static_cast<int64_t>(2 * y) * w + 2 * x;
        c[0] += g;
        c[1] += g;
        c[w] += g;
        c[w + 1] += g;
      }
    }
  }
}

void upsample2_forward(const double* in, double* out, int planes, int h,
                       int w) {
  const int oh = h * 2, ow = w * 2;
#pragma omp parallel for schedule(static) if (static_cast<int64_t>(planes) * oh * ow > kParallelCutoff)
  for (int pl = 0; pl < planes; ++pl) {
    const double* ip = in + static_cast<int64_t>(pl) * h * w;
    double* op = out + static_cast<int64_t>(pl) * oh * ow;
    for (int y = 0; y < oh; ++y) {
      const double* irow = ip + static_cast<int64_t>(y / 2) * w;
      double* orow = op + static_cast<int64_t>(y) * ow;
      for (int x = 0; x < ow; ++x) orow[x] = irow[x / 2];
    }
  }
}

void upsample2_backward(const double* gout, double* gin, int planes, int h,
                        int w) {
  const int ow = w * 2;
#pragma omp parallel for schedule(static) if (static_cast<int64_t>(planes) * h * w > kParallelCutoff)
  for (int pl = 0; pl < planes; ++pl) {
    const double* gp = gout + static_cast<int64_t>(pl) * (h * 2) * ow;
    double* gi = gin + static_cast<int64_t>(pl) * h * w;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double* c = gp + static_cast<int64_t>(2 * y) * ow + 2 * x;
        gi[static_cast<int64_t>(y) * w + x] += c[0] + c[1] + c[ow] + c[ow + 1];
      }
    }
  }
}

}  // namespace kernels
}  // namespace cacps
