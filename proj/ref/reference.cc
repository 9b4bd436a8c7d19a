// ref/reference.cc

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

#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cacps::ref {

namespace {

constexpr double kPi = std::numbers::pi;

inline size_t at4(int a, int b, int c, int d, int db, int dc, int dd) {
  return ((static_cast<size_t>(a) * db + b) * dc + c) * dd + d;
}

}  // namespace

void conv2d_forward(const double* in, const double* weights,
                    const double* bias, double* out, int n, int cin, int h,
                    int w, int cout, int k) {
  const int r = k / 2;
  for (int b = 0; b < n; ++b)
    for (int co = 0; co < cout; ++co)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          double acc = bias[co];
          for (int ci = 0; ci < cin; ++ci)
            for (int ky = 0; ky < k; ++ky)
              for (int kx = 0; kx < k; ++kx) {
                const int sy = y + ky - r;
                const int sx = x + kx - r;
                if (sy < 0 || sy >= h || sx < 0 || sx >= w) continue;
                acc += in[at4(b, ci, sy, sx, cin, h, w)] *
                       weights[at4(co, ci, ky, kx, cin, k, k)];
              }
          out[at4(b, co, y, x, cout, h, w)] = acc;
        }
}

void conv2d_grad_input(const double* gout, const double* weights, double* gin,
                       int n, int cin, int h, int w, int cout, int k) {
  const int r = k / 2;
  for (int b = 0; b < n; ++b)
    for (int ci = 0; ci < cin; ++ci)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          double acc = 0.0;
          for (int co = 0; co < cout; ++co)
            for (int ky = 0; ky < k; ++ky)
              for (int kx = 0; kx < k; ++kx) {
                const int oy = y - ky + r;
                const int ox = x - kx + r;
                if (oy < 0 || oy >= h || ox < 0 || ox >= w) continue;
                acc += gout[at4(b, co, oy, ox, cout, h, w)] *
                       weights[at4(co, ci, ky, kx, cin, k, k)];
              }
          gin[at4(b, ci, y, x, cin, h, w)] += acc;
        }
}

void conv2d_grad_weights(const double* gout, const double* in, double* gw,
                         int n, int cin, int h, int w, int cout, int k) {
  const int r = k / 2;
  for (int co = 0; co < cout; ++co)
    for (int ci = 0; ci < cin; ++ci)
      for (int ky = 0; ky < k; ++ky)
        for (int kx = 0; kx < k; ++kx) {
          double acc = 0.0;
          for (int b = 0; b < n; ++b)
            for (int oy = 0; oy < h; ++oy)
              for (int ox = 0; ox < w; ++ox) {
                const int sy = oy + ky - r;
                const int sx = ox + kx - r;
                if (sy < 0 || sy >= h || sx < 0 || sx >= w) continue;
                acc += gout[at4(b, co, oy, ox, cout, h, w)] *
                       in[at4(b, ci, sy, sx, cin, h, w)];
              }
          gw[at4(co, ci, ky, kx, cin, k, k)] += acc;
        }
}

void conv2d_grad_bias(const double* gout, double* gb, int n, int cout, int h,
                      int w) {
  for (int co = 0; co < cout; ++co) {
    double acc = 0.0;
    for (int b = 0; b < n; ++b)
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          acc += gout[at4(b, co, y, x, cout, h, w)];
    gb[co] += acc;
  }
}

void avg_pool2_forward(const double* in, double* out, int planes, int h,
                       int w) {
  const int oh = h / 2, ow = w / 2;
  for (int p = 0; p < planes; ++p)
    for (int y = 0; y < oh; ++y)
      for (int x = 0; x < ow; ++x) {
        const double* base = in + (static_cast<size_t>(p) * h + 2 * y) * w;
        out[(static_cast<size_t>(p) * oh + y) * ow + x] =
            0.25 * (base[2 * x] + base[2 * x + 1] + base[w + 2 * x] +
                    base[w + 2 * x + 1]);
      }
}

void avg_pool2_backward(const double* gout, double* gin, int planes, int h,
                        int w) {
  const int oh = h / 2, ow = w / 2;
  for (int p = 0; p < planes; ++p)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        gin[(static_cast<size_t>(p) * h + y) * w + x] +=
            0.25 *
            gout[(static_cast<size_t>(p) * oh + y / 2) * ow + x / 2];
}

void upsample2_forward(const double* in, double* out, int planes, int h,
                       int w) {
  const int oh = h * 2, ow = w * 2;
  for (int p = 0; p < planes; ++p)
    for (int y = 0; y < oh; ++y)
      for (int x = 0; x < ow; ++x)
        out[(static_cast<size_t>(p) * oh + y) * ow + x] =
            in[(static_cast<size_t>(p) * h + y / 2) * w + x / 2];
}

void upsample2_backward(const double* gout, double* gin, int planes, int h,
                        int w) {
  const int oh = h * 2, ow = w * 2;
  for (int p = 0; p < planes; ++p)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double* base =
            gout + (static_cast<size_t>(p) * oh + 2 * y) * ow;
        gin[(static_cast<size_t>(p) * h + y) * w + x] +=
            base[2 * x] + base[2 * x + 1] + base[ow + 2 * x] +
            base[ow + 2 * x + 1];
      }
}

Spectrum dft2(const Grid& image) {
  const int h = image.h, w = image.w;
  Spectrum s;
  s.amplitude = Grid(h, w);
  s.phase = Grid(h, w);
  for (int u = 0; u < h; ++u)
    for (int v = 0; v < w; ++v) {
      double re = 0.0, im = 0.0;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          const double ang =
              -2.0 * kPi * (static_cast<double>(u) * y / h +
                            static_cast<double>(v) * x / w);
          re += image.at(y, x) * std::cos(ang);
          im += image.at(y, x) * std::sin(ang);
        }
      const int us = (u + h / 2) % h;
      const int vs = (v + w / 2) % w;
      s.amplitude.at(us, vs) = std::sqrt(re * re + im * im);
      double p = std::atan2(im, re);
      if (p <= -kPi) p = kPi;
      s.phase.at(us, vs) = p;
    }
  return s;
}

Grid idft2(const Spectrum& spectrum, bool clamp01) {
  const int h = spectrum.amplitude.h, w = spectrum.amplitude.w;
  Grid out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int us = 0; us < h; ++us)
        for (int vs = 0; vs < w; ++vs) {
          const int u = (us - h / 2 + h) % h;
          const int v = (vs - w / 2 + w) % w;
          const double a = spectrum.amplitude.at(us, vs);
          const double p = spectrum.phase.at(us, vs);
          const double ang = p + 2.0 * kPi * (static_cast<double>(u) * y / h +
                                              static_cast<double>(v) * x / w);
          acc += a * std::cos(ang);
        }
      acc /= static_cast<double>(h) * static_cast<double>(w);
      out.at(y, x) = clamp01 ? std::clamp(acc, 0.0, 1.0) : acc;
    }
  return out;
}

Grid mix_amplitude(const Grid& s, const Grid& s_prime, const MixConfig& cfg) {
  const int h = s.h, w = s.w;
  const int mh = std::max(1, static_cast<int>(std::lround(cfg.mask_ratio * h)));
  const int mw = std::max(1, static_cast<int>(std::lround(cfg.mask_ratio * w)));
  const int y0 = h / 2 - mh / 2;
  const int x0 = w / 2 - mw / 2;

  Grid out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const bool inside = y >= y0 && y < y0 + mh && x >= x0 && x < x0 + mw;
      const double a = s.at(y, x);
      const double b = s_prime.at(y, x);
      if (cfg.mode == MixMode::convex_low_freq)
        out.at(y, x) =
            inside ? (1.0 - cfg.lambda) * a + cfg.lambda * b : a;
      else
        out.at(y, x) = inside ? cfg.lambda * b : (1.0 - cfg.lambda) * a;
    }
  return out;
}

Grid fourier_augment(const Grid& image, const Grid& partner,
                     const MixConfig& cfg) {
  // Explicitly qualified: these must be the reference transforms, not the
  // production ones pulled in by argument-dependent lookup.
  const Spectrum si = ref::dft2(image);
  const Spectrum sp = ref::dft2(partner);
  Spectrum mixed;
  mixed.amplitude = ref::mix_amplitude(si.amplitude, sp.amplitude, cfg);
  mixed.phase = si.phase;
  return ref::idft2(mixed, /*clamp01=*/true);
}

}  // namespace cacps::ref
