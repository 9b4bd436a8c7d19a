// src/config.cc

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

#include "cacps/config.hpp"

#include <array>
#include <fstream>
#include <map>

#include "cacps/error.hpp"

namespace cacps {

namespace {

enum class KeyType { number, integer, boolean, string, int_list, number_list,
                     string_list };

// Every key any subcommand reads. Validation is global so a config file can
// drive a whole pipeline; each subcommand reads its own groups.
const std::map<std::string, KeyType>& schema() {
  static const std::map<std::string, KeyType> s = {
      {"data.dir", KeyType::string},
      {"data.h", KeyType::integer},
      {"data.w", KeyType::integer},
      {"data.seed", KeyType::integer},
      {"data.train_per_domain", KeyType::int_list},
      {"data.labeled_fraction", KeyType::number_list},
      {"data.val_per_domain", KeyType::int_list},
      {"data.test_per_domain", KeyType::int_list},
      {"train.out_dir", KeyType::string},
      {"train.lr_max", KeyType::number},
      {"train.lr_min", KeyType::number},
      {"train.epochs", KeyType::integer},
      {"train.batch_size", KeyType::integer},
      {"train.beta", KeyType::number},
      {"train.weight_decay", KeyType::number},
      {"train.lambda_max", KeyType::number},
      {"train.mask_ratio", KeyType::number},
      {"train.mix_mode", KeyType::string},
      {"train.augment_labeled", KeyType::boolean},
      {"train.grad_through_variance", KeyType::boolean},
      {"train.labeled_only", KeyType::boolean},
      {"train.seed_data", KeyType::integer},
      {"train.seed_net1", KeyType::integer},
      {"train.seed_net2", KeyType::integer},
      {"train.seed_net3", KeyType::integer},
      {"train.seed_net4", KeyType::integer},
      {"train.seed_shuffle", KeyType::integer},
      {"augment.out_dir", KeyType::string},
      {"augment.sample_ids", KeyType::string_list},
      {"augment.lambdas", KeyType::number_list},
      {"augment.partner_id", KeyType::string},
      {"augment.mask_ratio", KeyType::number},
      {"augment.mix_mode", KeyType::string},
      {"infer.checkpoints", KeyType::string_list},
      {"infer.split", KeyType::string},
      {"infer.out_dir", KeyType::string},
      {"eval.pred_dir", KeyType::string},
      {"eval.split", KeyType::string},
      {"eval.method", KeyType::string},
      {"eval.out", KeyType::string},
      {"report.inputs", KeyType::string_list},
      {"report.out", KeyType::string},
  };
  return s;
}

bool type_matches(KeyType t, const nlohmann::json& v) {
  switch (t) {
    case KeyType::number:
      return v.is_number();
    case KeyType::integer:
      return v.is_number_integer();
    case KeyType::boolean:
      return v.is_boolean();
    case KeyType::string:
      return v.is_string();
    case KeyType::int_list:
      if (!v.is_array()) return false;
      for (const auto& e : v)
        if (!e.is_number_integer()) return false;
      return true;
    case KeyType::number_list:
      if (!v.is_array()) return false;
      for (const auto& e : v)
        if (!e.is_number()) return false;
      return true;
    case KeyType::string_list:
      if (!v.is_array()) return false;
      for (const auto& e : v)
        if (!e.is_string()) return false;
      return true;
  }
  return false;
}

const char* type_name(KeyType t) {
  switch (t) {
    case KeyType::number:
      return "number";
    case KeyType::integer:
      return "integer";
    case KeyType::boolean:
      return "boolean";
    case KeyType::string:
      return "string";
    case KeyType::int_list:
      return "list of integers";
    case KeyType::number_list:
      return "list of numbers";
    case KeyType::string_list:
      return "list of strings";
  }
  return "?";
}

}  // namespace

void Config::set_checked(const std::string& key, nlohmann::json value) {
  const auto it = schema().find(key);
  if (it == schema().end()) fail("config", "unknown config key '" + key + "'");
  if (!type_matches(it->second, value))
    fail("config", "config key '" + key + "' must be a " +
                       type_name(it->second));
  values_[key] = std::move(value);
}

Config Config::from_file(const std::string& path,
                         const std::vector<std::string>& overrides) {
  std::ifstream is(path);
  if (!is) fail("io", "cannot open config file: " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    fail("config", "config file is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) fail("config", "config root must be a JSON object");

  Config cfg;
  for (const auto& [key, value] : j.items()) cfg.set_checked(key, value);
  for (const std::string& ov : overrides) {
    const size_t eq = ov.find('=');
    if (eq == std::string::npos || eq == 0)
      fail("config", "override must look like key=value: '" + ov + "'");
    const std::string key = ov.substr(0, eq);
    const std::string raw = ov.substr(eq + 1);
    nlohmann::json value = nlohmann::json::parse(raw, nullptr,
                                                 /*allow_exceptions=*/false);
    if (value.is_discarded()) value = raw;  // unparseable -> plain string
    cfg.set_checked(key, std::move(value));
  }
  return cfg;
}

Config Config::from_overrides(const std::vector<std::string>& overrides) {
  Config cfg;
  for (const std::string& ov : overrides) {
    const size_t eq = ov.find('=');
    if (eq == std::string::npos || eq == 0)
      fail("config", "override must look like key=value: '" + ov + "'");
    const std::string key = ov.substr(0, eq);
    const std::string raw = ov.substr(eq + 1);
    nlohmann::json value = nlohmann::json::parse(raw, nullptr,
                                                 /*allow_exceptions=*/false);
    if (value.is_discarded()) value = raw;
    cfg.set_checked(key, std::move(value));
  }
  return cfg;
}

bool Config::has(const std::string& key) const {
  return values_.contains(key);
}

double Config::get_double(const std::string& key, double fallback) const {
  return values_.contains(key) ? values_[key].get<double>() : fallback;
}

int64_t Config::get_int(const std::string& key, int64_t fallback) const {
  return values_.contains(key) ? values_[key].get<int64_t>() : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  return values_.contains(key) ? values_[key].get<bool>() : fallback;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  return values_.contains(key) ? values_[key].get<std::string>() : fallback;
}

std::vector<int> Config::get_int_list(const std::string& key,
                                      std::vector<int> fallback) const {
  return values_.contains(key) ? values_[key].get<std::vector<int>>()
                               : std::move(fallback);
}

std::vector<double> Config::get_double_list(
    const std::string& key, std::vector<double> fallback) const {
  return values_.contains(key) ? values_[key].get<std::vector<double>>()
                               : std::move(fallback);
}

std::vector<std::string> Config::get_string_list(
    const std::string& key, std::vector<std::string> fallback) const {
  return values_.contains(key) ? values_[key].get<std::vector<std::string>>()
                               : std::move(fallback);
}

namespace {

template <typename T, typename U>
std::array<T, 4> to_array4(const std::vector<U>& v, const std::string& key) {
  if (v.size() != 4)
    fail("config", "config key '" + key + "' must list the 4 domains");
  return {static_cast<T>(v[0]), static_cast<T>(v[1]), static_cast<T>(v[2]),
          static_cast<T>(v[3])};
}

MixMode parse_mix_mode(const std::string& s) {
  if (s == "convex-low-freq") return MixMode::convex_low_freq;
  if (s == "paper-literal") return MixMode::paper_literal;
  fail("config",
       "mix_mode must be 'convex-low-freq' or 'paper-literal', got '" + s +
           "'");
}

}  // namespace

DatasetConfig Config::dataset_config() const {
  DatasetConfig d;
  d.h = static_cast<int>(get_int("data.h", d.h));
  d.w = static_cast<int>(get_int("data.w", d.w));
  d.seed = static_cast<uint64_t>(get_int("data.seed", 0));
  d.train_per_domain = to_array4<int>(
      get_int_list("data.train_per_domain",
                   {d.train_per_domain.begin(), d.train_per_domain.end()}),
      "data.train_per_domain");
  d.labeled_fraction = to_array4<double>(
      get_double_list("data.labeled_fraction",
                      {d.labeled_fraction.begin(), d.labeled_fraction.end()}),
      "data.labeled_fraction");
  d.val_per_domain = to_array4<int>(
      get_int_list("data.val_per_domain",
                   {d.val_per_domain.begin(), d.val_per_domain.end()}),
      "data.val_per_domain");
  d.test_per_domain = to_array4<int>(
      get_int_list("data.test_per_domain",
                   {d.test_per_domain.begin(), d.test_per_domain.end()}),
      "data.test_per_domain");
  return d;
}

MixMode Config::mix_mode() const {
  return parse_mix_mode(get_string("train.mix_mode", "convex-low-freq"));
}

TrainConfig Config::train_config() const {
  TrainConfig t;
  t.lr_max = get_double("train.lr_max", t.lr_max);
  t.lr_min = get_double("train.lr_min", t.lr_min);
  t.epochs = static_cast<int>(get_int("train.epochs", t.epochs));
  t.batch_size = static_cast<int>(get_int("train.batch_size", t.batch_size));
  t.beta = get_double("train.beta", t.beta);
  t.weight_decay = get_double("train.weight_decay", t.weight_decay);
  t.lambda_max = get_double("train.lambda_max", t.lambda_max);
  t.mask_ratio = get_double("train.mask_ratio", t.mask_ratio);
  t.mix_mode = mix_mode();
  t.augment_labeled = get_bool("train.augment_labeled", t.augment_labeled);
  t.grad_through_variance =
      get_bool("train.grad_through_variance", t.grad_through_variance);
  t.labeled_only = get_bool("train.labeled_only", t.labeled_only);
  t.seed_data = static_cast<uint64_t>(get_int("train.seed_data", 1));
  t.seed_net1 = static_cast<uint64_t>(get_int("train.seed_net1", 11));
  t.seed_net2 = static_cast<uint64_t>(get_int("train.seed_net2", 12));
  t.seed_net3 = static_cast<uint64_t>(get_int("train.seed_net3", 13));
  t.seed_net4 = static_cast<uint64_t>(get_int("train.seed_net4", 14));
  t.seed_shuffle = static_cast<uint64_t>(get_int("train.seed_shuffle", 5));
  t.data_dir = get_string("data.dir", "");
  t.out_dir = get_string("train.out_dir", "");
  return t;
}

}  // namespace cacps
