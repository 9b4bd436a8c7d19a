// tests/test_optim.cc

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

#include <cmath>
#include <numbers>
#include <vector>

#include "cacps/optim.hpp"
#include "doctest.h"
#include "test_util.hpp"

namespace cacps {
namespace {

using test::error_code_of;

TEST_SUITE_BEGIN("optim");

TEST_CASE("adamw follows a hand-rolled scalar trace") {
  // Loss 0.5*x^2 -> grad = x. Five steps recomputed from the update
  // equations with plain doubles.
  Tensor x = Tensor::full({1}, 2.0, true);
  std::vector<Tensor> params = {x};
  AdamWState st = AdamWState::create(params);

  const double lr = 0.1, wd = 0.01;
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double xe = 2.0, m = 0.0, v = 0.0;
  for (int t = 1; t <= 5; ++t) {
    const double g = xe;  // evaluated before the step, as in training
    x.zero_grad();
    x.node()->ensure_grad();
    x.node()->grad[0] = x.values()[0];
    adamw_step(params, st, lr, wd);

    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    xe = xe * (1 - lr * wd) - lr * mh / (std::sqrt(vh) + eps);

    CHECK(x.values()[0] == doctest::Approx(xe).epsilon(1e-14));
    CHECK(st.step == t);
  }
}

TEST_CASE("zero gradient with zero decay leaves parameters untouched") {
  Tensor x = Tensor::full({3}, 1.5, true);
  std::vector<Tensor> params = {x};
  AdamWState st = AdamWState::create(params);
  x.zero_grad();
  adamw_step(params, st, 0.1, 0.0);
  for (double v : x.values()) CHECK(v == 1.5);
  CHECK(st.step == 1);
}

TEST_CASE("decay-only update scales by (1 - lr*wd)") {
  Tensor x = Tensor::full({2}, 4.0, true);
  std::vector<Tensor> params = {x};
  AdamWState st = AdamWState::create(params);
  x.zero_grad();
  adamw_step(params, st, 0.5, 0.1);
  for (double v : x.values())
    CHECK(v == doctest::Approx(4.0 * (1.0 - 0.05)).epsilon(1e-15));
}

TEST_CASE("state and parameter lists must stay aligned") {
  Tensor a = Tensor::full({2}, 1.0, true);
  Tensor b = Tensor::full({3}, 1.0, true);
  std::vector<Tensor> one = {a}, two = {a, b};
  AdamWState st = AdamWState::create(one);
  CHECK(error_code_of([&] { adamw_step(two, st, 0.1, 0.0); }) == "shape");
}

TEST_CASE("cosine schedule hits its endpoints and midpoint") {
  const double hi = 1e-3, lo = 1e-5;
  CHECK(cosine_lr(0, 10, hi, lo) == doctest::Approx(hi).epsilon(1e-15));
  CHECK(cosine_lr(10, 10, hi, lo) == doctest::Approx(lo).epsilon(1e-12));
  CHECK(cosine_lr(5, 10, hi, lo) ==
        doctest::Approx(lo + 0.5 * (hi - lo)).epsilon(1e-12));
  // Strictly decreasing across the run.
  double prev = 2 * hi;
  for (int e = 0; e <= 10; ++e) {
    const double lr = cosine_lr(e, 10, hi, lo);
    CHECK(lr < prev);
    CHECK(lr >= lo);
    CHECK(lr <= hi);
    prev = lr;
  }
  CHECK(error_code_of([&] { cosine_lr(0, 0, hi, lo); }) == "config");
}

}  // namespace
}  // namespace cacps

TEST_SUITE_END();
