// ref/reference.hpp

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

// Slow, obviously-correct serial counterparts of the optimized kernels and
// transforms, written straight from the definitions. Tests and benchmarks
// compare the production paths against these; nothing here calls into the
// optimized implementations.

#ifndef CACPS_REF_REFERENCE_HPP_
#define CACPS_REF_REFERENCE_HPP_

#include "cacps/grid2d.hpp"
#include "cacps/spectral.hpp"

namespace cacps::ref {

// Direct quadruple-loop convolution (same-padding, stride 1) and its
// gradients, each a literal transcription of the derivative sums.
void conv2d_forward(const double* in, const double* weights,
                    const double* bias, double* out, int n, int cin, int h,
                    int w, int cout, int k);
void conv2d_grad_input(const double* gout, const double* weights,
                       double* gin, int n, int cin, int h, int w, int cout,
                       int k);
void conv2d_grad_weights(const double* gout, const double* in, double* gw,
                         int n, int cin, int h, int w, int cout, int k);
void conv2d_grad_bias(const double* gout, double* gb, int n, int cout, int h,
                      int w);

// planes = N*C collapsed; shapes as in the production kernels.
void avg_pool2_forward(const double* in, double* out, int planes, int h,
                       int w);
void avg_pool2_backward(const double* gout, double* gin, int planes, int h,
                        int w);
void upsample2_forward(const double* in, double* out, int planes, int h,
                       int w);
void upsample2_backward(const double* gout, double* gin, int planes, int h,
                        int w);

// O((H*W)^2) transforms evaluated from the DFT definition, center-shifted
// with the same conventions as the fast path.
Spectrum dft2(const Grid& image);
Grid idft2(const Spectrum& spectrum, bool clamp01);

// Amplitude mixing with the mask rectangle recomputed inline.
Grid mix_amplitude(const Grid& s, const Grid& s_prime, const MixConfig& cfg);

// dft2 -> mix -> idft2 pipeline composed from the functions above.
Grid fourier_augment(const Grid& image, const Grid& partner,
                     const MixConfig& cfg);

}  // namespace cacps::ref

#endif  // CACPS_REF_REFERENCE_HPP_
