// src/tensor.cc

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

#include "cacps/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "cacps/conv_kernels.hpp"
#include "cacps/error.hpp"

namespace cacps {

namespace {

constexpr int64_t kParallelCutoff = 1 << 12;

thread_local Tape* g_active_tape = nullptr;

void check_shape(bool ok, const std::string& what) {
  if (!ok) fail("shape", what);
}

bool same_shape(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape();
}

}  // namespace

size_t shape_numel(const Shape& shape) {
  size_t n = 1;
  for (int d : shape) {
    if (d <= 0) fail("shape", "dimensions must be positive");
    n *= static_cast<size_t>(d);
  }
  return n;
}

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad) {
  if (shape_numel(shape) != data.size())
    fail("shape", "data length does not match shape");
  node_ = std::make_shared<TensorNode>();
  node_->shape = std::move(shape);
  node_->data = std::move(data);
  node_->requires_grad = requires_grad;
  if (requires_grad) node_->ensure_grad();
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  size_t n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  size_t n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value) { return Tensor({1}, {value}); }

const std::vector<double>& Tensor::grad() const {
  node_->ensure_grad();
  return node_->grad;
}

void Tensor::zero_grad() const {
  node_->ensure_grad();
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

double Tensor::item() const {
  if (numel() != 1) fail("shape", "item() on a non-scalar tensor");
  return node_->data[0];
}

Tape::Tape() {
  previous_ = g_active_tape;
  g_active_tape = this;
}

Tape::~Tape() { g_active_tape = previous_; }

Tape* Tape::active() { return g_active_tape; }

void Tape::backward(const Tensor& loss) {
  if (!loss.defined() || loss.numel() != 1)
    fail("non-scalar", "backward requires a scalar loss");
  loss.node()->ensure_grad();
  loss.node()->grad[0] += 1.0;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
  steps_.clear();
}

namespace {

// Wires an op's backward closure onto the active tape when gradients are
// tracked. The closure runs only if the output accumulated a gradient.
template <typename Fn>
Tensor finish_op(Tensor out, bool any_grad_input, Fn&& backward_step) {
  Tape* tape = Tape::active();
  if (tape != nullptr && any_grad_input) {
    out.node()->requires_grad = true;
    auto on = out.node();
    tape->record([on, backward = std::forward<Fn>(backward_step)]() {
      if (on->grad.empty()) return;
      backward(on->grad);
    });
  }
  return out;
}

double ew_apply(EwKind kind, double a, double b) {
  switch (kind) {
    case EwKind::add:
      return a + b;
    case EwKind::sub:
      return a - b;
    case EwKind::mul:
      return a * b;
    case EwKind::div:
      return a / std::max(b, kEpsClamp);
    case EwKind::exp:
      return std::exp(std::min(a, kExpArgMax));
    case EwKind::log:
      return std::log(std::max(a, kEpsClamp));
  }
  fail("unsupported", "unknown elementwise op-kind");
}

// d(out)/d(a) and d(out)/d(b) at one element.
void ew_partials(EwKind kind, double a, double b, double* da, double* db) {
  switch (kind) {
    case EwKind::add:
      *da = 1.0;
      *db = 1.0;
      return;
    case EwKind::sub:
      *da = 1.0;
      *db = -1.0;
      return;
    case EwKind::mul:
      *da = b;
      *db = a;
      return;
    case EwKind::div: {
      double bc = std::max(b, kEpsClamp);
      *da = 1.0 / bc;
      *db = b > kEpsClamp ? -a / (b * b) : 0.0;
      return;
    }
    case EwKind::exp:
      *da = a < kExpArgMax ? std::exp(a) : 0.0;
      *db = 0.0;
      return;
    case EwKind::log:
      *da = a > kEpsClamp ? 1.0 / a : 0.0;
      *db = 0.0;
      return;
  }
  fail("unsupported", "unknown elementwise op-kind");
}

bool ew_unary(EwKind kind) { return kind == EwKind::exp || kind == EwKind::log; }

void validate_kind(EwKind kind) {
  switch (kind) {
    case EwKind::add:
    case EwKind::sub:
    case EwKind::mul:
    case EwKind::div:
    case EwKind::exp:
    case EwKind::log:
      return;
  }
  fail("unsupported", "unknown elementwise op-kind");
}

enum class ScalarSide { none, left, right };

Tensor elementwise_impl(EwKind kind, const Tensor& a, const Tensor& b,
                        double scalar, ScalarSide side) {
  validate_kind(kind);
  const Tensor& ref = side == ScalarSide::left ? b : a;
  if (side == ScalarSide::none)
    check_shape(same_shape(a, b), "elementwise operand shapes differ");

  const size_t n = ref.numel();
  std::vector<double> out(n);
  const double* av = side == ScalarSide::left ? nullptr : a.values().data();
  const double* bv = side != ScalarSide::none
                         ? nullptr
                         : b.values().data();

#pragma omp parallel for schedule(static) if (static_cast<int64_t>(n) > kParallelCutoff)
  for (int64_t i = 0; i < static_cast<int64_t>(n); ++i) {
    const double x = side == ScalarSide::left ? scalar : av[i];
    const double y = side == ScalarSide::none
                         ? bv[i]
                         : (side == ScalarSide::right ? scalar : ref.values()[i]);
    out[static_cast<size_t>(i)] = ew_apply(kind, x, y);
  }

  Tensor result(ref.shape(), std::move(out));
  const bool a_grad = side != ScalarSide::left && a.requires_grad();
  const bool b_grad = side == ScalarSide::none && b.requires_grad();
  const bool bl_grad = side == ScalarSide::left && b.requires_grad();
  if (!(a_grad || b_grad || bl_grad)) return result;

  auto an = side == ScalarSide::left ? nullptr : a.node();
  auto bn = side == ScalarSide::right ? nullptr : b.node();
  return finish_op(std::move(result), true,
                   [kind, an, bn, scalar, side](const std::vector<double>& g) {
                     const size_t n = g.size();
                     const bool use_a = an && an->requires_grad;
                     const bool use_b = bn && bn->requires_grad;
                     if (use_a) an->ensure_grad();
                     if (use_b) bn->ensure_grad();
                     for (size_t i = 0; i < n; ++i) {
                       const double x = side == ScalarSide::left
                                            ? scalar
                                            : an->data[i];
                       const double y = side == ScalarSide::right
                                            ? scalar
                                            : bn->data[i];
                       double da, db;
                       ew_partials(kind, x, y, &da, &db);
                       if (use_a) an->grad[i] += g[i] * da;
                       if (use_b) bn->grad[i] += g[i] * db;
                     }
                   });
}

}  // namespace

Tensor elementwise(EwKind kind, const Tensor& a, const Tensor& b) {
  if (ew_unary(kind)) return elementwise_impl(kind, a, a, 0.0, ScalarSide::right);
  return elementwise_impl(kind, a, b, 0.0, ScalarSide::none);
}

Tensor elementwise(EwKind kind, const Tensor& a, double b) {
  return elementwise_impl(kind, a, a, b, ScalarSide::right);
}

Tensor elementwise(EwKind kind, double a, const Tensor& b) {
  validate_kind(kind);
  if (ew_unary(kind)) fail("unsupported", "unary op takes one tensor operand");
  return elementwise_impl(kind, b, b, a, ScalarSide::left);
}

Tensor relu(const Tensor& a) {
  const size_t n = a.numel();
  std::vector<double> out(n);
  const double* av = a.values().data();
#pragma omp parallel for schedule(static) if (static_cast<int64_t>(n) > kParallelCutoff)
  for (int64_t i = 0; i < static_cast<int64_t>(n); ++i)
    out[static_cast<size_t>(i)] = av[i] > 0.0 ? av[i] : 0.0;

  Tensor result(a.shape(), std::move(out));
  auto an = a.node();
  return finish_op(std::move(result), a.requires_grad(),
                   [an](const std::vector<double>& g) {
                     an->ensure_grad();
                     for (size_t i = 0; i < g.size(); ++i)
                       if (an->data[i] > 0.0) an->grad[i] += g[i];
                   });
}

Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias) {
  check_shape(input.rank() == 4, "conv2d input must be [N,Cin,H,W]");
  check_shape(kernel.rank() == 4, "conv2d kernel must be [Cout,Cin,k,k]");
  check_shape(bias.rank() == 1, "conv2d bias must be [Cout]");
  const int n = input.dim(0), cin = input.dim(1), h = input.dim(2),
            w = input.dim(3);
  const int cout = kernel.dim(0), k = kernel.dim(2);
  if (kernel.dim(2) != kernel.dim(3) || k % 2 == 0)
    fail("kernel-size", "conv2d kernel must be square with odd size");
  check_shape(kernel.dim(1) == cin, "conv2d kernel channel mismatch");
  check_shape(bias.dim(0) == cout, "conv2d bias channel mismatch");

  Tensor out = Tensor::zeros({n, cout, h, w});
  kernels::conv2d_forward(input.values().data(), kernel.values().data(),
                          bias.values().data(), out.mutable_values().data(), n,
                          cin, h, w, cout, k);

  const bool any = input.requires_grad() || kernel.requires_grad() ||
                   bias.requires_grad();
  auto in_n = input.node();
  auto k_n = kernel.node();
  auto b_n = bias.node();
  return finish_op(
      std::move(out), any,
      [in_n, k_n, b_n, n, cin, h, w, cout, k](const std::vector<double>& g) {
        if (in_n->requires_grad) {
          in_n->ensure_grad();
          kernels::conv2d_grad_input(g.data(), k_n->data.data(),
                                     in_n->grad.data(), n, cin, h, w, cout, k);
        }
        if (k_n->requires_grad) {
          k_n->ensure_grad();
          kernels::conv2d_grad_weights(g.data(), in_n->data.data(),
                                       k_n->grad.data(), n, cin, h, w, cout, k);
        }
        if (b_n->requires_grad) {
          b_n->ensure_grad();
          kernels::conv2d_grad_bias(g.data(), b_n->grad.data(), n, cout, h, w);
        }
      });
}

Tensor pool_and_upsample(const Tensor& input, Resample direction, int factor) {
  if (factor != 2) fail("unsupported", "resample factor must be 2");
  check_shape(input.rank() == 4, "resample input must be [N,C,H,W]");
  const int n = input.dim(0), c = input.dim(1), h = input.dim(2),
            w = input.dim(3);
  const int planes = n * c;

  if (direction == Resample::down) {
    if (h % 2 != 0 || w % 2 != 0)
      fail("shape", "downsample requires even spatial dims");
    Tensor out = Tensor::zeros({n, c, h / 2, w / 2});
    kernels::avg_pool2_forward(input.values().data(),
                               out.mutable_values().data(), planes, h, w);
    auto in_n = input.node();
    return finish_op(std::move(out), input.requires_grad(),
                     [in_n, planes, h, w](const std::vector<double>& g) {
                       in_n->ensure_grad();
                       kernels::avg_pool2_backward(g.data(), in_n->grad.data(),
                                                   planes, h, w);
                     });
  }

  Tensor out = Tensor::zeros({n, c, h * 2, w * 2});
  kernels::upsample2_forward(input.values().data(),
                             out.mutable_values().data(), planes, h, w);
  auto in_n = input.node();
  return finish_op(std::move(out), input.requires_grad(),
                   [in_n, planes, h, w](const std::vector<double>& g) {
                     in_n->ensure_grad();
                     kernels::upsample2_backward(g.data(), in_n->grad.data(),
                                                 planes, h, w);
                   });
}

Tensor softmax_channels(const Tensor& logits) {
  check_shape(logits.rank() == 4, "softmax input must be [N,C,H,W]");
  const int n = logits.dim(0), c = logits.dim(1), h = logits.dim(2),
            w = logits.dim(3);
  const int64_t plane = static_cast<int64_t>(h) * w;
  const int64_t pixels = static_cast<int64_t>(n) * plane;

  std::vector<double> out(logits.numel());
  const double* lv = logits.values().data();
#pragma omp parallel for schedule(static) if (pixels * c > kParallelCutoff)
  for (int64_t px = 0; px < pixels; ++px) {
    const int64_t b = px / plane;
    const int64_t sp = px % plane;
    const int64_t base = b * c * plane + sp;
    double mx = lv[base];
    for (int ch = 1; ch < c; ++ch)
      mx = std::max(mx, lv[base + ch * plane]);
    double sum = 0.0;
    for (int ch = 0; ch < c; ++ch) {
      const double e = std::exp(lv[base + ch * plane] - mx);
      out[static_cast<size_t>(base + ch * plane)] = e;
      sum += e;
    }
    const double inv = 1.0 / sum;
    for (int ch = 0; ch < c; ++ch)
      out[static_cast<size_t>(base + ch * plane)] *= inv;
  }

  Tensor result(logits.shape(), std::move(out));
  auto ln = logits.node();
  auto on = result.node();
  return finish_op(
      std::move(result), logits.requires_grad(),
      [ln, on, n, c, plane](const std::vector<double>& g) {
        ln->ensure_grad();
        const double* pv = on->data.data();
        const int64_t pixels = static_cast<int64_t>(n) * plane;
#pragma omp parallel for schedule(static) if (pixels * c > kParallelCutoff)
        for (int64_t px = 0; px < pixels; ++px) {
          const int64_t b = px / plane;
          const int64_t sp = px % plane;
          const int64_t base = b * c * plane + sp;
          double dot = 0.0;
          for (int ch = 0; ch < c; ++ch) {
            const int64_t i = base + ch * plane;
            dot += g[static_cast<size_t>(i)] * pv[i];
          }
          for (int ch = 0; ch < c; ++ch) {
            const int64_t i = base + ch * plane;
            ln->grad[static_cast<size_t>(i)] +=
                pv[i] * (g[static_cast<size_t>(i)] - dot);
          }
        }
      });
}

namespace {

// Maps a flat input index to the flat index of its reduction cell.
struct ReducePlan {
  Shape out_shape;
  std::vector<size_t> out_index;  // per input element
  size_t count = 1;               // elements folded into each cell
};

ReducePlan make_reduce_plan(const Shape& shape, const std::vector<int>& axes) {
  const int rank = static_cast<int>(shape.size());
  std::vector<bool> reduced(static_cast<size_t>(rank), false);
  for (int ax : axes) {
    if (ax < 0 || ax >= rank) fail("axis", "reduce axis out of range");
    if (reduced[static_cast<size_t>(ax)]) fail("axis", "duplicate reduce axis");
    reduced[static_cast<size_t>(ax)] = true;
  }

  ReducePlan plan;
  for (int d = 0; d < rank; ++d) {
    if (reduced[static_cast<size_t>(d)])
      plan.count *= static_cast<size_t>(shape[static_cast<size_t>(d)]);
    else
      plan.out_shape.push_back(shape[static_cast<size_t>(d)]);
  }
  if (plan.out_shape.empty()) plan.out_shape = {1};

  const size_t n = shape_numel(shape);
  plan.out_index.resize(n);
  std::vector<size_t> stride_out(static_cast<size_t>(rank), 0);
  size_t s = 1;
  for (int d = rank - 1; d >= 0; --d) {
    if (!reduced[static_cast<size_t>(d)]) {
      stride_out[static_cast<size_t>(d)] = s;
      s *= static_cast<size_t>(shape[static_cast<size_t>(d)]);
    }
  }
  for (size_t i = 0; i < n; ++i) {
    size_t rem = i, oi = 0;
    for (int d = rank - 1; d >= 0; --d) {
      const size_t dim = static_cast<size_t>(shape[static_cast<size_t>(d)]);
      const size_t coord = rem % dim;
      rem /= dim;
      oi += coord * stride_out[static_cast<size_t>(d)];
    }
    plan.out_index[i] = oi;
  }
  return plan;
}

}  // namespace

Tensor reduce(const Tensor& input, ReduceKind kind, std::vector<int> axes) {
  if (axes.empty()) {
    axes.resize(static_cast<size_t>(input.rank()));
    for (int d = 0; d < input.rank(); ++d) axes[static_cast<size_t>(d)] = d;
  }
  ReducePlan plan = make_reduce_plan(input.shape(), axes);

  std::vector<double> out(shape_numel(plan.out_shape), 0.0);
  const std::vector<double>& iv = input.values();
  for (size_t i = 0; i < iv.size(); ++i) out[plan.out_index[i]] += iv[i];
  const double scale =
      kind == ReduceKind::mean ? 1.0 / static_cast<double>(plan.count) : 1.0;
  if (kind == ReduceKind::mean)
    for (double& v : out) v *= scale;

  Tensor result(plan.out_shape, std::move(out));
  auto in_n = input.node();
  auto shared_plan = std::make_shared<ReducePlan>(std::move(plan));
  return finish_op(std::move(result), input.requires_grad(),
                   [in_n, shared_plan, scale](const std::vector<double>& g) {
                     in_n->ensure_grad();
                     const auto& idx = shared_plan->out_index;
#pragma omp parallel for schedule(static) if (static_cast<int64_t>(idx.size()) > kParallelCutoff)
                     for (int64_t i = 0; i < static_cast<int64_t>(idx.size());
                          ++i)
                       in_n->grad[static_cast<size_t>(i)] +=
                           g[idx[static_cast<size_t>(i)]] * scale;
                   });
}

Tensor stop_gradient(const Tensor& x) {
  return Tensor(x.shape(), x.values(), false);
}

Tensor gather_batch(const Tensor& x, const std::vector<int>& indices) {
  check_shape(x.rank() >= 1, "gather_batch needs a batch axis");
  const int n = x.dim(0);
  const size_t row = x.numel() / static_cast<size_t>(n);
  for (int i : indices)
    if (i < 0 || i >= n) fail("axis", "gather_batch index out of range");

  Shape out_shape = x.shape();
  out_shape[0] = static_cast<int>(indices.size());
  std::vector<double> out(row * indices.size());
  const double* xv = x.values().data();
  for (size_t r = 0; r < indices.size(); ++r)
    std::copy(xv + static_cast<size_t>(indices[r]) * row,
              xv + (static_cast<size_t>(indices[r]) + 1) * row,
              out.begin() + static_cast<int64_t>(r * row));

  Tensor result(std::move(out_shape), std::move(out));
  auto xn = x.node();
  auto idx = std::make_shared<std::vector<int>>(indices);
  return finish_op(std::move(result), x.requires_grad(),
                   [xn, idx, row](const std::vector<double>& g) {
                     xn->ensure_grad();
                     for (size_t r = 0; r < idx->size(); ++r) {
                       double* dst =
                           xn->grad.data() + static_cast<size_t>((*idx)[r]) * row;
                       const double* src = g.data() + r * row;
                       for (size_t i = 0; i < row; ++i) dst[i] += src[i];
                     }
                   });
}

Tensor take_scalar(const Tensor& x, int flat_index) {
  if (flat_index < 0 || static_cast<size_t>(flat_index) >= x.numel())
    fail("axis", "take_scalar index out of range");
  Tensor result({1}, {x.values()[static_cast<size_t>(flat_index)]});
  auto xn = x.node();
  return finish_op(std::move(result), x.requires_grad(),
                   [xn, flat_index](const std::vector<double>& g) {
                     xn->ensure_grad();
                     xn->grad[static_cast<size_t>(flat_index)] += g[0];
                   });
}

bool all_finite(const Tensor& x) {
  for (double v : x.values())
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace cacps
