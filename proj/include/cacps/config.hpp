// include/cacps/config.hpp

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

// One flat JSON object of dotted keys ("train.lr_max": 0.001) drives every
// subcommand. Command-line key=value overrides win over the file; values
// that parse as JSON keep that type, anything else is a string. Unknown
// keys and type mismatches are rejected before any work starts.

#ifndef CACPS_CONFIG_HPP_
#define CACPS_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "cacps/phantom.hpp"
#include "cacps/train.hpp"

namespace cacps {

class Config {
 public:
  // Empty config with defaults only.
  Config() = default;

  // Parse/validate; file and override errors -> "config" (or "io" when the
  // file cannot be read).
  static Config from_file(const std::string& path,
                          const std::vector<std::string>& overrides);
  static Config from_overrides(const std::vector<std::string>& overrides);

  bool has(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  std::vector<int> get_int_list(const std::string& key,
                                std::vector<int> fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      std::vector<double> fallback) const;
  std::vector<std::string> get_string_list(
      const std::string& key, std::vector<std::string> fallback) const;

  // Typed views over the relevant key groups.
  DatasetConfig dataset_config() const;
  TrainConfig train_config() const;
  MixMode mix_mode() const;

 private:
  void set_checked(const std::string& key, nlohmann::json value);

  nlohmann::json values_ = nlohmann::json::object();
};

}  // namespace cacps

#endif  // CACPS_CONFIG_HPP_
