// tests/test_tensor.cc

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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cacps/tensor.hpp"
#include "doctest.h"
#include "test_util.hpp"

namespace cacps {
namespace {

using test::central_fd;
using test::error_code_of;
using test::random_tensor;
using test::rel_err;

// Scalarizes t against a fixed weight tensor so FD probes have a scalar
// objective with nontrivial dependence on every element.
double weighted_sum_value(const Tensor& t, const Tensor& w) {
  double s = 0.0;
  for (size_t i = 0; i < t.numel(); ++i) s += t.values()[i] * w.values()[i];
  return s;
}

TEST_SUITE_BEGIN("tensor");

TEST_CASE("elementwise ops match scalar arithmetic") {
  Rng rng(101);
  Tensor a = random_tensor({2, 3, 4}, rng, -2.0, 2.0);
  Tensor b = random_tensor({2, 3, 4}, rng, 0.5, 2.5);
  Tensor sum = add(a, b), dif = sub(a, b), prd = mul(a, b), quo = div(a, b);
  for (size_t i = 0; i < a.numel(); ++i) {
    const double x = a.values()[i], y = b.values()[i];
    CHECK(sum.values()[i] == doctest::Approx(x + y).epsilon(1e-15));
    CHECK(dif.values()[i] == doctest::Approx(x - y).epsilon(1e-15));
    CHECK(prd.values()[i] == doctest::Approx(x * y).epsilon(1e-15));
    CHECK(quo.values()[i] == doctest::Approx(x / y).epsilon(1e-15));
  }
  Tensor as = add(a, 0.75);
  Tensor sr = sub(2.0, a);
  for (size_t i = 0; i < a.numel(); ++i) {
    CHECK(as.values()[i] == doctest::Approx(a.values()[i] + 0.75));
    CHECK(sr.values()[i] == doctest::Approx(2.0 - a.values()[i]));
  }
}

TEST_CASE("elementwise shape mismatch is rejected") {
  Tensor a = Tensor::zeros({2, 3});
  Tensor b = Tensor::zeros({3, 2});
  CHECK(error_code_of([&] { add(a, b); }) == "shape");
}

TEST_CASE("log and div clamp small arguments, exp clamps large ones") {
  Tensor z = Tensor::zeros({3});
  z.mutable_values() = {0.0, -5.0, 2.0};
  Tensor lg = log(z);
  CHECK(lg.values()[0] == doctest::Approx(std::log(kEpsClamp)));
  CHECK(lg.values()[1] == doctest::Approx(std::log(kEpsClamp)));
  CHECK(lg.values()[2] == doctest::Approx(std::log(2.0)));

  Tensor num = Tensor::full({2}, 1.0);
  Tensor den = Tensor::zeros({2});
  den.mutable_values() = {0.0, -3.0};
  Tensor q = div(num, den);
  CHECK(q.values()[0] == doctest::Approx(1.0 / kEpsClamp));
  CHECK(q.values()[1] == doctest::Approx(1.0 / kEpsClamp));

  Tensor big = Tensor::full({1}, 800.0);
  Tensor e = exp(big);
  CHECK(std::isfinite(e.values()[0]));
  CHECK(e.values()[0] == doctest::Approx(std::exp(kExpArgMax)));
}

TEST_CASE("elementwise gradients agree with finite differences") {
  Rng rng(102);
  const Shape shape{2, 5};
  Tensor w = random_tensor(shape, rng, -1.0, 1.0);

  struct Case {
    EwKind kind;
    double lo_a, hi_a, lo_b, hi_b;
  };
  const std::vector<Case> cases = {
      {EwKind::add, -2, 2, -2, 2}, {EwKind::sub, -2, 2, -2, 2},
      {EwKind::mul, -2, 2, -2, 2}, {EwKind::div, -2, 2, 0.4, 2},
      {EwKind::exp, -1, 1, 0, 0},  {EwKind::log, 0.2, 2, 0, 0},
  };
  for (const Case& c : cases) {
    const bool unary = (c.kind == EwKind::exp || c.kind == EwKind::log);
    Tensor a = random_tensor(shape, rng, c.lo_a, c.hi_a, true);
    Tensor b = random_tensor(shape, rng, c.lo_b, c.hi_b, true);
    auto forward = [&] {
      return unary ? elementwise(c.kind, a, 0.0) : elementwise(c.kind, a, b);
    };
    {
      Tape tape;
      Tensor loss = reduce_sum(mul(forward(), w));
      tape.backward(loss);
    }
    for (size_t i = 0; i < a.numel(); i += 3) {
      const double fd = central_fd(
          [&] { return weighted_sum_value(forward(), w); }, a, i);
      CHECK(rel_err(a.grad()[i], fd) < 1e-6);
      if (!unary) {
        const double fdb = central_fd(
            [&] { return weighted_sum_value(forward(), w); }, b, i);
        CHECK(rel_err(b.grad()[i], fdb) < 1e-6);
      }
    }
  }
}

TEST_CASE("clamped branches carry zero gradient") {
  Tensor a = Tensor::zeros({2}, true);
  a.mutable_values() = {-0.5, 1.0};
  {
    Tape tape;
    tape.backward(reduce_sum(log(a)));
  }
  CHECK(a.grad()[0] == 0.0);
  CHECK(a.grad()[1] == doctest::Approx(1.0));

  Tensor e = Tensor::zeros({2}, true);
  e.mutable_values() = {750.0, 0.5};
  {
    Tape tape;
    tape.backward(reduce_sum(exp(e)));
  }
  CHECK(e.grad()[0] == 0.0);
  CHECK(e.grad()[1] == doctest::Approx(std::exp(0.5)));
}

TEST_CASE("relu forward and subgradient") {
  Tensor x = Tensor::zeros({5}, true);
  x.mutable_values() = {-2.0, -0.5, 0.0, 0.5, 2.0};
  Tensor y;
  {
    Tape tape;
    y = relu(x);
    tape.backward(reduce_sum(y));
  }
  const std::vector<double> want = {0.0, 0.0, 0.0, 0.5, 2.0};
  for (size_t i = 0; i < 5; ++i) CHECK(y.values()[i] == want[i]);
  const std::vector<double> wantg = {0.0, 0.0, 0.0, 1.0, 1.0};
  for (size_t i = 0; i < 5; ++i) CHECK(x.grad()[i] == wantg[i]);
}

TEST_CASE("softmax_channels normalizes, stays stable, matches formula") {
  Rng rng(103);
  Tensor logits = random_tensor({2, 4, 3, 3}, rng, -3.0, 3.0);
  Tensor p = softmax_channels(logits);
  const size_t plane = 9;
  for (int n = 0; n < 2; ++n)
    for (size_t px = 0; px < plane; ++px) {
      double s = 0.0;
      for (int c = 0; c < 4; ++c)
        s += p.values()[(static_cast<size_t>(n) * 4 + c) * plane + px];
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  // Direct formula on one pixel.
  double mx = -1e300;
  for (int c = 0; c < 4; ++c) mx = std::max(mx, logits.values()[c * plane]);
  double z = 0.0;
  for (int c = 0; c < 4; ++c) z += std::exp(logits.values()[c * plane] - mx);
  for (int c = 0; c < 4; ++c)
    CHECK(p.values()[c * plane] ==
          doctest::Approx(std::exp(logits.values()[c * plane] - mx) / z));

  // Huge logits must not overflow.
  Tensor hot = Tensor::zeros({1, 3, 1, 1});
  hot.mutable_values() = {1000.0, 999.0, -1000.0};
  Tensor ph = softmax_channels(hot);
  CHECK(all_finite(ph));
  CHECK(ph.values()[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
}

TEST_CASE("softmax_channels gradient agrees with finite differences") {
  Rng rng(104);
  Tensor logits = random_tensor({1, 4, 2, 2}, rng, -2.0, 2.0, true);
  Tensor w = random_tensor({1, 4, 2, 2}, rng, -1.0, 1.0);
  {
    Tape tape;
    tape.backward(reduce_sum(mul(softmax_channels(logits), w)));
  }
  for (size_t i = 0; i < logits.numel(); ++i) {
    const double fd = central_fd(
        [&] { return weighted_sum_value(softmax_channels(logits), w); },
        logits, i);
    CHECK(rel_err(logits.grad()[i], fd) < 1e-6);
  }
}

TEST_CASE("reduce values over axis subsets") {
  Tensor x = Tensor::zeros({2, 3});
  x.mutable_values() = {1, 2, 3, 4, 5, 6};
  Tensor all_sum = reduce_sum(x);
  CHECK(all_sum.item() == doctest::Approx(21.0));
  CHECK(reduce_mean(x).item() == doctest::Approx(3.5));

  Tensor rows = reduce_sum(x, {1});  // -> [2]
  CHECK(rows.shape() == Shape{2});
  CHECK(rows.values()[0] == doctest::Approx(6.0));
  CHECK(rows.values()[1] == doctest::Approx(15.0));

  Tensor cols = reduce_mean(x, {0});  // -> [3]
  CHECK(cols.shape() == Shape{3});
  CHECK(cols.values()[0] == doctest::Approx(2.5));
  CHECK(cols.values()[2] == doctest::Approx(4.5));

  CHECK(error_code_of([&] { reduce_sum(x, {0, 0}); }) == "axis");
  CHECK(error_code_of([&] { reduce_sum(x, {2}); }) == "axis");
}

TEST_CASE("reduce gradients agree with finite differences") {
  Rng rng(105);
  Tensor x = random_tensor({2, 3, 4}, rng, -1.0, 1.0, true);
  Tensor w = random_tensor({2, 4}, rng, -1.0, 1.0);
  auto forward = [&] { return reduce_mean(x, {1}); };
  {
    Tape tape;
    tape.backward(reduce_sum(mul(forward(), w)));
  }
  for (size_t i = 0; i < x.numel(); i += 5) {
    const double fd =
        central_fd([&] { return weighted_sum_value(forward(), w); }, x, i);
    CHECK(rel_err(x.grad()[i], fd) < 1e-6);
  }
}

TEST_CASE("stop_gradient blocks propagation but keeps values") {
  Rng rng(106);
  Tensor x = random_tensor({4}, rng, 0.5, 1.5, true);
  Tensor frozen = stop_gradient(x);
  for (size_t i = 0; i < 4; ++i)
    CHECK(frozen.values()[i] == x.values()[i]);
  {
    Tape tape;
    // d/dx sum(stop(x) * x) should see only the live factor.
    tape.backward(reduce_sum(mul(frozen, x)));
  }
  for (size_t i = 0; i < 4; ++i)
    CHECK(x.grad()[i] == doctest::Approx(x.values()[i]));
}

TEST_CASE("gather_batch selects rows and accumulates repeated indices") {
  Tensor x = Tensor::zeros({3, 2}, true);
  x.mutable_values() = {1, 2, 3, 4, 5, 6};
  Tensor g = gather_batch(x, {2, 0, 2});
  CHECK(g.shape() == Shape{3, 2});
  const std::vector<double> want = {5, 6, 1, 2, 5, 6};
  for (size_t i = 0; i < want.size(); ++i) CHECK(g.values()[i] == want[i]);
  {
    Tape tape;
    tape.backward(reduce_sum(gather_batch(x, {2, 0, 2})));
  }
  CHECK(x.grad()[0] == 1.0);
  CHECK(x.grad()[4] == 2.0);  // row 2 gathered twice
  CHECK(error_code_of([&] { gather_batch(x, {3}); }) == "axis");
}

TEST_CASE("take_scalar routes the gradient to one slot") {
  Tensor x = Tensor::zeros({2, 2}, true);
  x.mutable_values() = {10, 20, 30, 40};
  {
    Tape tape;
    Tensor s = take_scalar(x, 2);
    CHECK(s.item() == 30.0);
    tape.backward(mul(s, 3.0));
  }
  CHECK(x.grad()[2] == 3.0);
  CHECK(x.grad()[0] == 0.0);
  CHECK(error_code_of([&] { take_scalar(x, 4); }) == "axis");
}

TEST_CASE("backward requires scalar loss and clears the tape") {
  Tensor x = Tensor::full({3}, 1.0, true);
  Tape tape;
  Tensor y = mul(x, 2.0);
  CHECK(error_code_of([&] { tape.backward(y); }) == "non-scalar");
  Tensor loss = reduce_sum(y);
  tape.backward(loss);
  CHECK(tape.size() == 0);
  for (size_t i = 0; i < 3; ++i) CHECK(x.grad()[i] == 2.0);
}

TEST_CASE("gradient accumulates across reuse of the same tensor") {
  Tensor x = Tensor::full({2}, 3.0, true);
  {
    Tape tape;
    tape.backward(reduce_sum(add(x, x)));
  }
  CHECK(x.grad()[0] == 2.0);
  x.zero_grad();
  CHECK(x.grad()[0] == 0.0);
  {
    Tape tape;
    tape.backward(reduce_sum(mul(x, x)));
  }
  CHECK(x.grad()[0] == doctest::Approx(6.0));
}

TEST_CASE("operations outside a tape do not build graph state") {
  Tensor x = Tensor::full({2}, 1.0, true);
  Tensor y = mul(x, 5.0);
  CHECK_FALSE(y.requires_grad());
}

TEST_CASE("avg_pool2 and upsample2 forward semantics") {
  Tensor x = Tensor::zeros({1, 1, 2, 4});
  x.mutable_values() = {1, 2, 3, 4, 5, 6, 7, 8};
  Tensor p = avg_pool2(x);
  CHECK(p.shape() == Shape{1, 1, 1, 2});
  CHECK(p.values()[0] == doctest::Approx((1 + 2 + 5 + 6) / 4.0));
  CHECK(p.values()[1] == doctest::Approx((3 + 4 + 7 + 8) / 4.0));

  Tensor u = upsample2(p);
  CHECK(u.shape() == Shape{1, 1, 2, 4});
  CHECK(u.values()[0] == p.values()[0]);
  CHECK(u.values()[1] == p.values()[0]);
  CHECK(u.values()[4] == p.values()[0]);
  CHECK(u.values()[7] == p.values()[1]);

  Tensor odd = Tensor::zeros({1, 1, 3, 4});
  CHECK(error_code_of([&] { avg_pool2(odd); }) == "shape");
  CHECK(error_code_of([&] { pool_and_upsample(x, Resample::down, 3); }) ==
        "unsupported");
}

TEST_CASE("pool and upsample gradients agree with finite differences") {
  Rng rng(107);
  Tensor x = random_tensor({2, 3, 4, 4}, rng, -1.0, 1.0, true);
  Tensor w = random_tensor({2, 3, 4, 4}, rng, -1.0, 1.0);
  auto forward = [&] { return upsample2(avg_pool2(x)); };
  {
    Tape tape;
    tape.backward(reduce_sum(mul(forward(), w)));
  }
  for (size_t i = 0; i < x.numel(); i += 7) {
    const double fd =
        central_fd([&] { return weighted_sum_value(forward(), w); }, x, i);
    CHECK(rel_err(x.grad()[i], fd) < 1e-6);
  }
}

TEST_CASE("all_finite flags NaN and infinity") {
  Tensor x = Tensor::full({3}, 1.0);
  CHECK(all_finite(x));
  x.mutable_values()[1] = std::nan("");
  CHECK_FALSE(all_finite(x));
  x.mutable_values()[1] = 1.0;
  x.mutable_values()[2] = std::numeric_limits<double>::infinity();
  CHECK_FALSE(all_finite(x));
}

TEST_CASE("item rejects non-scalars") {
  Tensor x = Tensor::zeros({2});
  CHECK(error_code_of([&] { x.item(); }) == "shape");
  CHECK(Tensor::scalar(4.25).item() == 4.25);
}

}  // namespace
}  // namespace cacps

TEST_SUITE_END();
