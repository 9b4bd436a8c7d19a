// tests/test_cli.cc

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

// Drives the installed binary as a subprocess: exit codes, emitted files,
// and the full gen-data -> train -> infer -> eval -> report pipeline on a
// small 32x32 dataset. CACPS_BIN is injected by the build.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cacps/phantom.hpp"
#include "cacps/train.hpp"
#include "doctest.h"
#include "test_util.hpp"

namespace cacps {
namespace {

using test::TempDir;

int run_cli(const TempDir& scratch, const std::string& args,
            std::string* output = nullptr) {
  static int call = 0;
  const std::string log = scratch.sub("cli_" + std::to_string(call++) + ".log");
  const std::string cmd =
      std::string(CACPS_BIN) + " " + args + " >" + log + " 2>&1";
  const int status = std::system(cmd.c_str());
  if (output) *output = test::read_file_text(log);
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

int count_files(const std::filesystem::path& dir, const std::string& ext) {
  int n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ext) ++n;
  return n;
}

TEST_SUITE_BEGIN("cli");

TEST_CASE("cli pipeline: gen-data, train, infer, eval, report") {
  TempDir scratch("cli");
  const std::string data = scratch.sub("data");
  const std::string run = scratch.sub("run");
  const std::string preds = scratch.sub("preds");

  std::string out;
  // Dataset small enough to train in seconds.
  int rc = run_cli(scratch,
                   "gen-data data.dir=" + data +
                       " data.h=32 data.w=32"
                       " 'data.train_per_domain=[3,3,3,3]'"
                       " 'data.labeled_fraction=[0.4,0.4,0,0]'"
                       " 'data.val_per_domain=[0,0,2,2]' data.seed=7",
                   &out);
  CHECK(rc == 0);
  CHECK(out.find("wrote 16 samples") != std::string::npos);
  CHECK(std::filesystem::exists(data + "/manifest.json"));
  CHECK(count_files(std::filesystem::path(data) / "images", ".phi") == 16);
  // round(0.4*3)=1 labeled per labeled domain, plus 4 labeled val masks.
  CHECK(count_files(std::filesystem::path(data) / "masks", ".phm") == 6);

  rc = run_cli(scratch,
               "train data.dir=" + data + " train.out_dir=" + run +
                   " train.epochs=1 train.batch_size=4 train.lr_max=0.002"
                   " train.lr_min=0.0001",
               &out);
  CHECK(rc == 0);
  CHECK(std::filesystem::exists(run + "/metrics.csv"));
  for (const char* f : {"model1_net1.ckpt", "model1_net2.ckpt",
                        "model2_net1.ckpt", "model2_net2.ckpt"})
    CHECK(std::filesystem::exists(run + "/" + std::string(f)));

  const std::string ckpts = "'infer.checkpoints=[\"" + run +
                            "/model1_net1.ckpt\",\"" + run +
                            "/model1_net2.ckpt\",\"" + run +
                            "/model2_net1.ckpt\",\"" + run +
                            "/model2_net2.ckpt\"]'";
  rc = run_cli(scratch,
               "infer data.dir=" + data + " infer.out_dir=" + preds +
                   " infer.split=val " + ckpts,
               &out);
  CHECK(rc == 0);
  CHECK(std::filesystem::exists(preds + "/predictions.json"));
  CHECK(count_files(preds, ".phm") == 4);

  rc = run_cli(scratch,
               "eval data.dir=" + data + " eval.pred_dir=" + preds +
                   " eval.split=val eval.method=double-cacps",
               &out);
  CHECK(rc == 0);
  CHECK(out.find("avg dice") != std::string::npos);
  CHECK(std::filesystem::exists(preds + "/eval.csv"));

  const std::string report = scratch.sub("report.csv");
  rc = run_cli(scratch,
               "report 'report.inputs=[\"" + preds + "/eval.csv\"]'" +
                   " report.out=" + report,
               &out);
  CHECK(rc == 0);
  CHECK(out.find("double-cacps") != std::string::npos);
  CHECK(std::filesystem::exists(report));
}

TEST_CASE("cli eval scores perfect predictions at dice 1") {
  TempDir scratch("clieval");
  const std::string data = scratch.sub("data");
  DatasetConfig cfg;
  cfg.h = 32;
  cfg.w = 32;
  cfg.train_per_domain = {2, 2, 0, 0};
  cfg.labeled_fraction = {0.5, 0.5, 0.0, 0.0};
  cfg.val_per_domain = {0, 0, 2, 2};
  cfg.seed = 21;
  build_dataset(cfg, data);

  // Copy ground-truth val masks as predictions.
  Dataset ds = load_dataset(data);
  const std::string preds = scratch.sub("preds");
  std::filesystem::create_directories(preds);
  for (const auto& s : ds.samples)
    if (s.split == "val")
      save_mask(s.mask, preds + "/" + s.sample_id + ".phm");

  std::string out;
  const int rc = run_cli(scratch,
                         "eval data.dir=" + data + " eval.pred_dir=" + preds +
                             " eval.split=val eval.method=oracle",
                         &out);
  CHECK(rc == 0);
  CHECK(out.find("avg dice 1 (LV 1, MYO 1, RV 1)") != std::string::npos);
}

TEST_CASE("cli config errors exit with code 2 and write nothing") {
  TempDir scratch("clicfg");
  std::string out;
  CHECK(run_cli(scratch, "gen-data data.h=32", &out) == 2);
  CHECK(out.find("error[config]") != std::string::npos);

  const std::string run = scratch.sub("never");
  CHECK(run_cli(scratch,
                "train data.dir=x train.out_dir=" + run + " train.lr_max=0",
                &out) == 2);
  CHECK_FALSE(std::filesystem::exists(run));

  CHECK(run_cli(scratch, "train data.dir=x train.out_dirr=y", &out) == 2);
  CHECK(out.find("error[config]") != std::string::npos);

  CHECK(run_cli(scratch, "infer data.dir=x infer.out_dir=y "
                         "'infer.checkpoints=[\"a\",\"b\",\"c\"]'",
                &out) == 2);
}

TEST_CASE("cli data errors exit with code 3") {
  TempDir scratch("clidata");
  std::string out;
  CHECK(run_cli(scratch,
                "train data.dir=" + scratch.sub("void") +
                    " train.out_dir=" + scratch.sub("out"),
                &out) == 3);
  CHECK(out.find("error[io]") != std::string::npos);

  CHECK(run_cli(scratch,
                "infer data.dir=x infer.out_dir=y "
                "'infer.checkpoints=[\"missing1.ckpt\",\"missing2.ckpt\"]'",
                &out) == 3);

  // Report on a CSV with a missing column names the column.
  const std::string bad = scratch.sub("bad.csv");
  {
    std::ofstream os(bad);
    os << "method,sample_id,dice_LV,dice_MYO,dice_avg\n";
    os << "m,ALL,0.5,0.5,0.5\n";
  }
  CHECK(run_cli(scratch, "report 'report.inputs=[\"" + bad + "\"]'", &out) ==
        3);
  CHECK(out.find("dice_RV") != std::string::npos);
}

TEST_CASE("cli train diverges with exit code 4") {
  TempDir scratch("clidiv");
  const std::string data = scratch.sub("data");
  int rc = run_cli(scratch,
                   "gen-data data.dir=" + data +
                       " data.h=32 data.w=32"
                       " 'data.train_per_domain=[2,2,0,0]'"
                       " 'data.labeled_fraction=[1,1,0,0]'"
                       " 'data.val_per_domain=[0,0,1,1]' data.seed=3");
  REQUIRE(rc == 0);
  std::string out;
  rc = run_cli(scratch,
               "train data.dir=" + data + " train.out_dir=" +
                   scratch.sub("out") +
                   " train.epochs=2 train.batch_size=2"
                   " train.lr_max=1e40 train.lr_min=1e39",
               &out);
  CHECK(rc == 4);
  CHECK(out.find("error[diverged]") != std::string::npos);
}

TEST_CASE("cli augment writes previews with faithful lambda behavior") {
  TempDir scratch("cliaug");
  const std::string data = scratch.sub("data");
  int rc = run_cli(scratch,
                   "gen-data data.dir=" + data +
                       " data.h=32 data.w=32"
                       " 'data.train_per_domain=[2,2,0,0]'"
                       " 'data.labeled_fraction=[1,1,0,0]'"
                       " 'data.val_per_domain=[0,0,0,0]' data.seed=5");
  REQUIRE(rc == 0);
  Dataset ds = load_dataset(data);
  const std::string id = ds.samples.front().sample_id;
  const std::string partner = ds.samples.back().sample_id;
  const std::string aug = scratch.sub("aug");

  std::string out;
  rc = run_cli(scratch,
               "augment data.dir=" + data + " augment.out_dir=" + aug +
                   " 'augment.sample_ids=[\"" + id + "\"]'" +
                   " augment.partner_id=" + partner +
                   " 'augment.lambdas=[0,0.5,1.0]'",
               &out);
  CHECK(rc == 0);
  CHECK(std::filesystem::exists(aug + "/" + id + "_original.phi"));
  CHECK(std::filesystem::exists(aug + "/" + id + "_partner.phi"));
  CHECK(std::filesystem::exists(aug + "/" + id + "_lambda0.phi"));
  CHECK(std::filesystem::exists(aug + "/" + id + "_lambda0p5.phi"));
  CHECK(std::filesystem::exists(aug + "/" + id + "_lambda1.phi"));

  nlohmann::json summary;
  {
    std::ifstream is(aug + "/summary.json");
    is >> summary;
  }
  REQUIRE(summary.is_array());
  const auto& rows = summary.at(0).at("augmented");
  REQUIRE(rows.size() == 3);
  // Convex mode: identity at lambda 0, drift grows with lambda.
  CHECK(rows.at(0).at("max_abs_diff").get<double>() <= 1e-6);
  CHECK(rows.at(0).at("max_abs_diff").get<double>() <=
        rows.at(1).at("max_abs_diff").get<double>() + 1e-12);
  CHECK(rows.at(1).at("max_abs_diff").get<double>() <=
        rows.at(2).at("max_abs_diff").get<double>() + 1e-12);
  CHECK(rows.at(2).at("max_abs_diff").get<double>() > 1e-4);

  // Literal mode is not an identity at lambda 0.
  const std::string aug2 = scratch.sub("aug2");
  rc = run_cli(scratch,
               "augment data.dir=" + data + " augment.out_dir=" + aug2 +
                   " 'augment.sample_ids=[\"" + id + "\"]'" +
                   " augment.partner_id=" + partner +
                   " 'augment.lambdas=[0]' augment.mix_mode=paper-literal",
               &out);
  CHECK(rc == 0);
  nlohmann::json s2;
  {
    std::ifstream is(aug2 + "/summary.json");
    is >> s2;
  }
  CHECK(s2.at(0).at("augmented").at(0).at("max_abs_diff").get<double>() >
        1e-4);
}

TEST_CASE("cli rejects an unknown subcommand") {
  TempDir scratch("cliusage");
  std::string out;
  const int rc = run_cli(scratch, "frobnicate", &out);
  CHECK(rc != 0);
}

}  // namespace
}  // namespace cacps

TEST_SUITE_END();
