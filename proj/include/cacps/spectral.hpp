// include/cacps/spectral.hpp

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

// Fourier-domain amplitude mixing. An image is decomposed into a
// center-shifted amplitude/phase pair, the low-frequency amplitude block is
// blended with another sample's, and the image is rebuilt from the mixed
// amplitude plus the ORIGINAL phase.
//
// Two mix modes exist:
//  - convex_low_freq (default): out = S outside the mask and
//    (1-lambda)*S + lambda*S' inside, so lambda=0 is an exact identity.
//  - paper_literal: out = (1-lambda)*S outside and lambda*S' inside. This
//    scales and zeroes amplitudes at the lambda extremes; kept behind a
//    switch for comparison.

#ifndef CACPS_SPECTRAL_HPP_
#define CACPS_SPECTRAL_HPP_

#include <cstdint>

#include "cacps/grid2d.hpp"

namespace cacps {

// Center-shifted spectrum: DC sits at (h/2, w/2). amplitude >= 0,
// phase in (-pi, pi].
struct Spectrum {
  Grid amplitude;
  Grid phase;
};

enum class MixMode { convex_low_freq, paper_literal };

struct MixConfig {
  double lambda = 0.0;      // blend proportion in [0,1]
  double mask_ratio = 0.1;  // low-frequency block size, in (0, 0.5]
  MixMode mode = MixMode::convex_low_freq;

  // Throws error "config" on out-of-range fields.
  void validate() const;
};

// Forward 2-D DFT, center-shifted. Uses a radix-2 FFT per line when the
// length is a power of two and a direct transform otherwise.
Spectrum dft2(const Grid& image);

// Inverse transform of amplitude*exp(i*phase): real part, scaled by 1/(H*W).
// When clamp01 is set (the default, matching the dataset intensity range)
// the result is clipped to [0,1].
Grid idft2(const Spectrum& spectrum, bool clamp01 = true);

// Centered rectangle of ones: height max(1, round(ratio*H)), width
// max(1, round(ratio*W)). Always contains the DC bin. ratio outside
// (0, 0.5] -> error "config".
MaskGrid low_freq_mask(int h, int w, double mask_ratio);

// Blend amplitude spectra under the low-frequency mask; see mode notes above.
// Shape mismatch -> error "shape".
Grid mix_amplitude(const Grid& s, const Grid& s_prime, const MixConfig& cfg);

// Full pipeline: X = idft2({mix_amplitude(|F(I)|, |F(I')|), phase(F(I))}).
// Labels never pass through here; the mask of an augmented sample is the
// mask of I unchanged.
Grid fourier_augment(const Grid& image, const Grid& partner,
                     const MixConfig& cfg);

}  // namespace cacps

#endif  // CACPS_SPECTRAL_HPP_
