// src/spectral.cc

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

#include "cacps/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "cacps/error.hpp"

namespace cacps {

namespace {

using cd = std::complex<double>;

constexpr double kPi = std::numbers::pi;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place radix-2 iterative FFT. sign = -1 forward, +1 inverse.
// No normalization in either direction.
void fft_pow2(std::vector<cd>& a, int sign) {
  const int n = static_cast<int>(a.size());
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * kPi / len;
    const cd wl(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      cd w(1.0, 0.0);
      for (int k = 0; k < len / 2; ++k) {
        const cd u = a[i + k];
        const cd v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Direct O(n^2) transform for lengths that are not powers of two.
void dft_naive(std::vector<cd>& a, int sign) {
  const int n = static_cast<int>(a.size());
  std::vector<cd> out(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    cd acc(0.0, 0.0);
    for (int t = 0; t < n; ++t) {
      const double ang = sign * 2.0 * kPi * k * t / n;
      acc += a[static_cast<size_t>(t)] * cd(std::cos(ang), std::sin(ang));
    }
    out[static_cast<size_t>(k)] = acc;
  }
  a = std::move(out);
}

void transform_line(std::vector<cd>& a, int sign) {
  if (is_pow2(static_cast<int>(a.size())))
    fft_pow2(a, sign);
  else
    dft_naive(a, sign);
}

// Separable 2-D transform of a row-major h*w complex buffer, in place.
void transform2d(std::vector<cd>& buf, int h, int w, int sign) {
#pragma omp parallel for schedule(static) if (h > 1)
  for (int y = 0; y < h; ++y) {
    std::vector<cd> line(static_cast<size_t>(w));
    for (int x = 0; x < w; ++x) line[static_cast<size_t>(x)] = buf[static_cast<size_t>(y) * w + x];
    transform_line(line, sign);
    for (int x = 0; x < w; ++x) buf[static_cast<size_t>(y) * w + x] = line[static_cast<size_t>(x)];
  }
#pragma omp parallel for schedule(static) if (w > 1)
  for (int x = 0; x < w; ++x) {
    std::vector<cd> line(static_cast<size_t>(h));
    for (int y = 0; y < h; ++y) line[static_cast<size_t>(y)] = buf[static_cast<size_t>(y) * w + x];
    transform_line(line, sign);
    for (int y = 0; y < h; ++y) buf[static_cast<size_t>(y) * w + x] = line[static_cast<size_t>(y)];
  }
}

}  // namespace

void MixConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    fail("config", "mix lambda must lie in [0,1]");
  if (!(mask_ratio > 0.0 && mask_ratio <= 0.5))
    fail("config", "mask_ratio must lie in (0,0.5]");
  if (mode != MixMode::convex_low_freq && mode != MixMode::paper_literal)
    fail("config", "unknown mix mode");
}

Spectrum dft2(const Grid& image) {
  const int h = image.h, w = image.w;
  std::vector<cd> buf(image.size());
  for (size_t i = 0; i < buf.size(); ++i) buf[i] = cd(image.v[i], 0.0);
  transform2d(buf, h, w, -1);

  // fftshift: move DC from (0,0) to (h/2, w/2).
  const int ch = h / 2, cw = w / 2;
  Spectrum s;
  s.amplitude = Grid(h, w);
  s.phase = Grid(h, w);
  for (int us = 0; us < h; ++us) {
    const int u = (us - ch + h) % h;
    for (int vs = 0; vs < w; ++vs) {
      const int v = (vs - cw + w) % w;
      const cd c = buf[static_cast<size_t>(u) * w + v];
      s.amplitude.at(us, vs) = std::abs(c);
      double p = std::atan2(c.imag(), c.real());
      if (p <= -kPi) p = kPi;  // keep phase in (-pi, pi]
      s.phase.at(us, vs) = p;
    }
  }
  return s;
}

Grid idft2(const Spectrum& spectrum, bool clamp01) {
  const int h = spectrum.amplitude.h, w = spectrum.amplitude.w;
  if (!spectrum.amplitude.same_shape(spectrum.phase))
    fail("shape", "spectrum amplitude/phase shapes differ");

  const int ch = h / 2, cw = w / 2;
  std::vector<cd> buf(spectrum.amplitude.size());
  for (int us = 0; us < h; ++us) {
    const int u = (us - ch + h) % h;
    for (int vs = 0; vs < w; ++vs) {
      const int v = (vs - cw + w) % w;
      const double a = spectrum.amplitude.at(us, vs);
      const double p = spectrum.phase.at(us, vs);
      buf[static_cast<size_t>(u) * w + v] = cd(a * std::cos(p), a * std::sin(p));
    }
  }
  transform2d(buf, h, w, +1);

  Grid out(h, w);
  const double scale = 1.0 / (static_cast<double>(h) * static_cast<double>(w));
  for (size_t i = 0; i < buf.size(); ++i) {
    double x = buf[i].real() * scale;
    if (clamp01) x = std::clamp(x, 0.0, 1.0);
    out.v[i] = x;
  }
  return out;
}

MaskGrid low_freq_mask(int h, int w, double mask_ratio) {
  if (h < 2 || w < 2) fail("shape", "mask needs h, w >= 2");
  if (!(mask_ratio > 0.0 && mask_ratio <= 0.5))
    fail("config", "mask_ratio must lie in (0,0.5]");

  const int mh = std::max(1, static_cast<int>(std::lround(mask_ratio * h)));
  const int mw = std::max(1, static_cast<int>(std::lround(mask_ratio * w)));
  const int y0 = h / 2 - mh / 2;
  const int x0 = w / 2 - mw / 2;

  MaskGrid m(h, w);
  for (int y = y0; y < y0 + mh; ++y)
    for (int x = x0; x < x0 + mw; ++x) m.at(y, x) = 1;
  return m;
}

Grid mix_amplitude(const Grid& s, const Grid& s_prime, const MixConfig& cfg) {
  cfg.validate();
  if (!s.same_shape(s_prime)) fail("shape", "amplitude shapes differ");

  const MaskGrid m = low_freq_mask(s.h, s.w, cfg.mask_ratio);
  const double l = cfg.lambda;
  Grid out(s.h, s.w);
  for (size_t i = 0; i < s.size(); ++i) {
    if (cfg.mode == MixMode::convex_low_freq)
      out.v[i] = m.v[i] ? (1.0 - l) * s.v[i] + l * s_prime.v[i] : s.v[i];
    else
      out.v[i] = m.v[i] ? l * s_prime.v[i] : (1.0 - l) * s.v[i];
  }
  return out;
}

Grid fourier_augment(const Grid& image, const Grid& partner,
                     const MixConfig& cfg) {
  cfg.validate();
  if (!image.same_shape(partner)) fail("shape", "image shapes differ");

  const Spectrum si = dft2(image);
  const Spectrum sp = dft2(partner);
  Spectrum mixed;
  mixed.amplitude = mix_amplitude(si.amplitude, sp.amplitude, cfg);
  mixed.phase = si.phase;
  return idft2(mixed, /*clamp01=*/true);
}

}  // namespace cacps
