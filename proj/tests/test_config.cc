// tests/test_config.cc

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

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cacps/config.hpp"
#include "cacps/report.hpp"
#include "doctest.h"
#include "test_util.hpp"

namespace cacps {
namespace {

using test::TempDir;
using test::error_code_of;

TEST_SUITE_BEGIN("config");

TEST_CASE("config file values and typed getters") {
  TempDir tmp("cfg");
  {
    std::ofstream os(tmp.sub("c.json"));
    os << R"({
      "data.dir": "/tmp/x",
      "data.h": 32,
      "train.lr_max": 0.002,
      "train.epochs": 7,
      "train.augment_labeled": false,
      "data.train_per_domain": [4, 4, 2, 2],
      "data.labeled_fraction": [0.5, 0.5, 0, 0]
    })";
  }
  Config c = Config::from_file(tmp.sub("c.json"), {});
  CHECK(c.get_string("data.dir", "") == "/tmp/x");
  CHECK(c.get_int("data.h", 0) == 32);
  CHECK(c.get_double("train.lr_max", 0.0) == 0.002);
  CHECK(c.get_int("train.epochs", 0) == 7);
  CHECK(c.get_bool("train.augment_labeled", true) == false);
  CHECK(c.get_int_list("data.train_per_domain", {}) ==
        std::vector<int>{4, 4, 2, 2});
  CHECK(c.get_double("missing.not_a_key", 1.5) == 1.5);

  DatasetConfig d = c.dataset_config();
  CHECK(d.h == 32);
  CHECK(d.train_per_domain[0] == 4);
  CHECK(d.labeled_fraction[0] == 0.5);

  TrainConfig t = c.train_config();
  CHECK(t.lr_max == 0.002);
  CHECK(t.epochs == 7);
  CHECK(t.augment_labeled == false);
}

TEST_CASE("overrides beat file values and parse JSON types") {
  TempDir tmp("cfgov");
  {
    std::ofstream os(tmp.sub("c.json"));
    os << R"({"train.epochs": 3, "train.lr_max": 0.001})";
  }
  Config c = Config::from_file(
      tmp.sub("c.json"),
      {"train.epochs=9", "train.lr_max=0.5", "data.dir=plain/path",
       "train.labeled_only=true"});
  CHECK(c.get_int("train.epochs", 0) == 9);
  CHECK(c.get_double("train.lr_max", 0.0) == 0.5);
  CHECK(c.get_string("data.dir", "") == "plain/path");
  CHECK(c.get_bool("train.labeled_only", false) == true);
}

TEST_CASE("unknown keys and type mismatches are rejected") {
  CHECK(error_code_of([&] { Config::from_overrides({"train.lr_mxa=1"}); }) ==
        "config");
  CHECK(error_code_of([&] { Config::from_overrides({"no_dot"}); }) ==
        "config");
  CHECK(error_code_of(
            [&] { Config::from_overrides({"train.epochs=fast"}); }) ==
        "config");
  CHECK(error_code_of(
            [&] { Config::from_overrides({"data.dir=[1,2]"}); }) == "config");
  CHECK(error_code_of([&] {
          Config::from_overrides({"data.train_per_domain=7"});
        }) == "config");
  // Integer-valued keys reject fractional numbers.
  CHECK(error_code_of(
            [&] { Config::from_overrides({"train.epochs=2.5"}); }) ==
        "config");
  // Numbers accept integer literals.
  Config ok = Config::from_overrides({"train.lr_max=1"});
  CHECK(ok.get_double("train.lr_max", 0.0) == 1.0);
}

TEST_CASE("config file errors") {
  CHECK(error_code_of([&] {
          Config::from_file("/definitely/not/here.json", {});
        }) == "io");
  TempDir tmp("cfgbad");
  {
    std::ofstream os(tmp.sub("bad.json"));
    os << "{ nope";
  }
  CHECK(error_code_of([&] { Config::from_file(tmp.sub("bad.json"), {}); }) ==
        "config");
  {
    std::ofstream os(tmp.sub("arr.json"));
    os << "[1,2,3]";
  }
  CHECK(error_code_of([&] { Config::from_file(tmp.sub("arr.json"), {}); }) ==
        "config");
}

TEST_CASE("mix mode strings map to the two modes") {
  Config a = Config::from_overrides({"train.mix_mode=convex-low-freq"});
  CHECK(a.mix_mode() == MixMode::convex_low_freq);
  Config b = Config::from_overrides({"train.mix_mode=paper-literal"});
  CHECK(b.mix_mode() == MixMode::paper_literal);
  CHECK(error_code_of([&] {
          Config c = Config::from_overrides({"train.mix_mode=other"});
          c.mix_mode();
        }) == "config");
}

TEST_CASE("eval csv writing and report summarization round trip") {
  TempDir tmp("rep");
  std::vector<DiceRow> rows;
  DiceRow r1{"d3_val_000", {0.8, 0.7, 0.6}, 0.7};
  DiceRow all{"ALL", {0.82, 0.72, 0.62}, 0.72};
  rows.push_back(r1);
  rows.push_back(all);
  write_eval_csv(tmp.sub("a.csv"), "double-cacps", rows);

  DiceRow all2{"ALL", {0.86, 0.76, 0.66}, 0.76};
  write_eval_csv(tmp.sub("b.csv"), "double-cacps", {all2});
  DiceRow allb{"ALL", {0.5, 0.5, 0.5}, 0.5};
  write_eval_csv(tmp.sub("c.csv"), "baseline", {allb});

  auto sums = summarize_evals(
      {tmp.sub("a.csv"), tmp.sub("b.csv"), tmp.sub("c.csv")});
  REQUIRE(sums.size() == 2);
  CHECK(sums[0].method == "double-cacps");  // first-seen order
  CHECK(sums[0].runs == 2);
  CHECK(sums[0].mean[0] == doctest::Approx(0.84));
  CHECK(sums[0].mean[3] == doctest::Approx(0.74));
  CHECK(sums[0].half_range[3] == doctest::Approx(0.02));
  CHECK(sums[1].method == "baseline");
  CHECK(sums[1].runs == 1);
  CHECK(sums[1].half_range[0] == 0.0);

  std::ostringstream table;
  print_report(sums, table);
  CHECK(table.str().find("double-cacps") != std::string::npos);
  CHECK(table.str().find("baseline") != std::string::npos);
  CHECK(table.str().find("+-") != std::string::npos);

  write_report_csv(sums, tmp.sub("report.csv"));
  const std::string rep = test::read_file_text(tmp.sub("report.csv"));
  CHECK(rep.find("method,runs") == 0);
  CHECK(rep.find("double-cacps,2") != std::string::npos);
}

TEST_CASE("summarize_evals rejects malformed inputs") {
  TempDir tmp("repbad");
  CHECK(error_code_of([&] {
          summarize_evals({tmp.sub("missing.csv")});
        }) == "io");

  {
    std::ofstream os(tmp.sub("cols.csv"));
    os << "method,sample_id,dice_LV,dice_MYO,dice_avg\n"
       << "m,ALL,0.5,0.5,0.5\n";
  }
  CHECK(error_code_of([&] { summarize_evals({tmp.sub("cols.csv")}); }) ==
        "format");

  {
    std::ofstream os(tmp.sub("noall.csv"));
    os << kEvalHeader << "\n";
    os << "m,sample_1,0.5,0.5,0.5,0.5\n";
  }
  CHECK(error_code_of([&] { summarize_evals({tmp.sub("noall.csv")}); }) ==
        "format");
}

}  // namespace
}  // namespace cacps

TEST_SUITE_END();
