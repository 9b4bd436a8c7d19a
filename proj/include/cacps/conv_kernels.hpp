// include/cacps/conv_kernels.hpp

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

#ifndef CACPS_CONV_KERNELS_HPP_
#define CACPS_CONV_KERNELS_HPP_

namespace cacps {
namespace kernels {

// OpenMP inner kernels behind the tensor ops. All of them parallelize over
// disjoint output elements and keep each element's accumulation order fixed,
// so results are bit-identical for any thread count. Gradient kernels
// accumulate (+=) into their destination buffer.

void conv2d_forward(const double* in, const double* weights, const double* bias,
                    double* out, int n, int cin, int h, int w, int cout, int k);

void conv2d_grad_input(const double* gout, const double* weights, double* gin,
                       int n, int cin, int h, int w, int cout, int k);

void conv2d_grad_weights(const double* gout, const double* in, double* gw,
                         int n, int cin, int h, int w, int cout, int k);

void conv2d_grad_bias(const double* gout, double* gb, int n, int cout, int h,
                      int w);

void avg_pool2_forward(const double* in, double* out, int planes, int h, int w);
void avg_pool2_backward(const double* gout, double* gin, int planes, int h,
                        int w);

void upsample2_forward(const double* in, double* out, int planes, int h, int w);
void upsample2_backward(const double* gout, double* gin, int planes, int h,
                        int w);

}  // namespace kernels
}  // namespace cacps

#endif  // CACPS_CONV_KERNELS_HPP_
