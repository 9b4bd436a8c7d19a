// tests/test_util.hpp

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

// Shared test helpers: scratch directories, file digests, random tensor
// builders, and a central finite-difference probe used as the gradient
// oracle. Everything here stays independent of the gradient code it checks:
// the probe only re-evaluates forward values.

#ifndef CACPS_TESTS_TEST_UTIL_HPP_
#define CACPS_TESTS_TEST_UTIL_HPP_

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cacps/error.hpp"
#include "cacps/grid2d.hpp"
#include "cacps/rng.hpp"
#include "cacps/tensor.hpp"

namespace cacps::test {

// Self-deleting scratch directory under the system temp dir.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<uint64_t> counter{0};
    const uint64_t id = counter.fetch_add(1);
    path_ = std::filesystem::temp_directory_path() /
            ("cacps_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(id));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }
  std::string sub(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(is),
                                    std::istreambuf_iterator<char>());
}

inline std::string read_file_text(const std::string& path) {
  std::ifstream is(path);
  return std::string(std::istreambuf_iterator<char>(is),
                     std::istreambuf_iterator<char>());
}

inline Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0,
                            double hi = 1.0, bool requires_grad = false) {
  Tensor t = Tensor::zeros(std::move(shape), requires_grad);
  for (double& v : t.mutable_values()) v = rng.uniform(lo, hi);
  return t;
}

// Random per-pixel probability maps: positive entries normalized over the
// channel axis of [N,C,H,W].
inline Tensor random_probs(int n, int c, int h, int w, Rng& rng,
                           bool requires_grad = false) {
  Tensor t = Tensor::zeros({n, c, h, w}, requires_grad);
  auto& v = t.mutable_values();
  const size_t plane = static_cast<size_t>(h) * w;
  for (int b = 0; b < n; ++b)
    for (size_t p = 0; p < plane; ++p) {
      double sum = 0.0;
      for (int ch = 0; ch < c; ++ch) {
        const double e = 0.05 + rng.uniform();
        v[(static_cast<size_t>(b) * c + ch) * plane + p] = e;
        sum += e;
      }
      for (int ch = 0; ch < c; ++ch)
        v[(static_cast<size_t>(b) * c + ch) * plane + p] /= sum;
    }
  return t;
}

inline Grid random_grid(int h, int w, Rng& rng) {
  Grid g(h, w);
  for (double& v : g.v) v = rng.uniform();
  return g;
}

// Central finite difference d loss / d param[index] with step h, evaluating
// the provided forward-only loss functional twice.
inline double central_fd(const std::function<double()>& loss_value,
                         const Tensor& param, size_t index, double h = 1e-5) {
  auto& v = param.mutable_values();
  const double orig = v[index];
  v[index] = orig + h;
  const double fp = loss_value();
  v[index] = orig - h;
  const double fm = loss_value();
  v[index] = orig;
  return (fp - fm) / (2.0 * h);
}

// Relative error with a floor of 1 in the denominator so near-zero pairs
// compare absolutely.
inline double rel_err(double a, double b) {
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) / scale;
}

// Runs f and reports the Error code it threw, "<none>" if it returned, or
// "<other>" for a foreign exception type.
template <typename F>
std::string error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  } catch (...) {
    return "<other>";
  }
  return "<none>";
}

}  // namespace cacps::test

#endif  // CACPS_TESTS_TEST_UTIL_HPP_
