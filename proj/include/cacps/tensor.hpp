// include/cacps/tensor.hpp

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

#ifndef CACPS_TENSOR_HPP_
#define CACPS_TENSOR_HPP_

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace cacps {

using Shape = std::vector<int>;

size_t shape_numel(const Shape& shape);

// Lower clamp applied to log arguments and divisors.
constexpr double kEpsClamp = 1e-8;
// Upper clamp on exp() arguments so finite inputs stay finite.
constexpr double kExpArgMax = 700.0;

struct TensorNode {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until first accumulation
  bool requires_grad = false;

  size_t numel() const { return data.size(); }
  // Allocates a zero gradient buffer if none exists yet.
  void ensure_grad() {
    if (grad.empty()) grad.assign(data.size(), 0.0);
  }
};

// Dense row-major tensor of 64-bit reals. Shared-ownership handle: copies
// alias the same storage. Values are treated as immutable once produced by an
// operation; only leaves (parameters) are updated in place, via
// mutable_values(), between training steps.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int rank() const { return static_cast<int>(node_->shape.size()); }
  int dim(int i) const { return node_->shape[static_cast<size_t>(i)]; }
  size_t numel() const { return node_->data.size(); }
  bool requires_grad() const { return node_ && node_->requires_grad; }

  const std::vector<double>& values() const { return node_->data; }
  std::vector<double>& mutable_values() const { return node_->data; }

  bool has_grad() const { return node_ && !node_->grad.empty(); }
  // Gradient buffer; allocates zeros on first access of a grad-tracked leaf.
  const std::vector<double>& grad() const;
  void zero_grad() const;

  // Value of a one-element tensor.
  double item() const;

  const std::shared_ptr<TensorNode>& node() const { return node_; }

 private:
  std::shared_ptr<TensorNode> node_;
};

// Record of executed differentiable operations. One tape is active per thread
// at a time (they nest, innermost wins); operations record themselves onto the
// active tape whenever an input tracks gradients. Rebuilt every forward pass.
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  void record(std::function<void()> step) { steps_.push_back(std::move(step)); }
  size_t size() const { return steps_.size(); }

  // Seeds d(loss)/d(loss) = 1, replays the recorded steps in reverse execution
  // order exactly once, then clears the record. loss must be a scalar.
  void backward(const Tensor& loss);
  void clear() { steps_.clear(); }

  static Tape* active();

 private:
  std::vector<std::function<void()>> steps_;
  Tape* previous_ = nullptr;
};

enum class EwKind { add, sub, mul, div, exp, log };
enum class Resample { down, up };
enum class ReduceKind { mean, sum };

// Elementwise arithmetic. Shapes must match exactly, or one operand may be a
// plain scalar; log arguments and divisors are clamped below at kEpsClamp.
Tensor elementwise(EwKind kind, const Tensor& a, const Tensor& b);
Tensor elementwise(EwKind kind, const Tensor& a, double b);
Tensor elementwise(EwKind kind, double a, const Tensor& b);

inline Tensor add(const Tensor& a, const Tensor& b) { return elementwise(EwKind::add, a, b); }
inline Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(EwKind::sub, a, b); }
inline Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(EwKind::mul, a, b); }
inline Tensor div(const Tensor& a, const Tensor& b) { return elementwise(EwKind::div, a, b); }
inline Tensor add(const Tensor& a, double b) { return elementwise(EwKind::add, a, b); }
inline Tensor sub(const Tensor& a, double b) { return elementwise(EwKind::sub, a, b); }
inline Tensor sub(double a, const Tensor& b) { return elementwise(EwKind::sub, a, b); }
inline Tensor mul(const Tensor& a, double b) { return elementwise(EwKind::mul, a, b); }
inline Tensor div(const Tensor& a, double b) { return elementwise(EwKind::div, a, b); }
inline Tensor exp(const Tensor& a) { return elementwise(EwKind::exp, a, 0.0); }
inline Tensor log(const Tensor& a) { return elementwise(EwKind::log, a, 0.0); }

Tensor relu(const Tensor& a);

// Same-padded stride-1 cross-correlation. input [N,Cin,H,W], kernel
// [Cout,Cin,k,k] with k odd, bias [Cout] -> [N,Cout,H,W].
Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias);

// down: 2x2 average pooling (spatial dims must be even); up: 2x2
// nearest-neighbor repetition. Rank-4 input, factor fixed at 2.
Tensor pool_and_upsample(const Tensor& input, Resample direction, int factor = 2);
inline Tensor avg_pool2(const Tensor& x) { return pool_and_upsample(x, Resample::down); }
inline Tensor upsample2(const Tensor& x) { return pool_and_upsample(x, Resample::up); }

// Per-pixel channel softmax over axis 1 of [N,C,H,W], stabilized by
// max-subtraction.
Tensor softmax_channels(const Tensor& logits);

// Arithmetic reduction over the given axes (empty = all axes; result scalar).
Tensor reduce(const Tensor& input, ReduceKind kind, std::vector<int> axes = {});
inline Tensor reduce_mean(const Tensor& x, std::vector<int> axes = {}) {
  return reduce(x, ReduceKind::mean, std::move(axes));
}
inline Tensor reduce_sum(const Tensor& x, std::vector<int> axes = {}) {
  return reduce(x, ReduceKind::sum, std::move(axes));
}

// Same values, severed from gradient propagation.
Tensor stop_gradient(const Tensor& x);

// Rows of axis 0 at the given indices, in order.
Tensor gather_batch(const Tensor& x, const std::vector<int>& indices);

// One element by flat index, as a scalar tensor.
Tensor take_scalar(const Tensor& x, int flat_index);

bool all_finite(const Tensor& x);

}  // namespace cacps

#endif  // CACPS_TENSOR_HPP_
