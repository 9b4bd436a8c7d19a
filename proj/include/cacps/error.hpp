// include/cacps/error.hpp

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

#ifndef CACPS_ERROR_HPP_
#define CACPS_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace cacps {

// Domain error carrying a short machine-readable code ("shape", "config",
// "data", "format", "io", "diverged", ...) next to the human message.
// The CLI maps codes onto process exit codes.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

[[noreturn]] inline void fail(const std::string& code,
                              const std::string& message) {
  throw Error(code, message);
}

}  // namespace cacps

#endif  // CACPS_ERROR_HPP_
