// tools/cacps_main.cc

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

// Command-line front end. Every subcommand reads one flat JSON config plus
// key=value overrides; see README for the key list. Exit codes: 0 success,
// 2 config/validation error, 3 data/file error, 4 diverged training,
// 1 anything else. Errors print one line: error[<code>]: <message>.

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cacps/config.hpp"
#include "cacps/error.hpp"
#include "cacps/grid2d.hpp"
#include "cacps/phantom.hpp"
#include "cacps/report.hpp"
#include "cacps/segnet.hpp"
#include "cacps/spectral.hpp"
#include "cacps/train.hpp"

namespace fs = std::filesystem;

namespace {

cacps::Config load_config(const std::string& config_path,
                          const std::vector<std::string>& overrides) {
  if (config_path.empty()) return cacps::Config::from_overrides(overrides);
  return cacps::Config::from_file(config_path, overrides);
}

int run_gen_data(const cacps::Config& cfg) {
  const std::string dir = cfg.get_string("data.dir", "");
  if (dir.empty()) cacps::fail("config", "gen-data requires data.dir");
  const cacps::DatasetManifest man =
      cacps::build_dataset(cfg.dataset_config(), dir);
  int labeled = 0;
  for (const auto& e : man.samples) labeled += e.labeled ? 1 : 0;
  std::cout << "wrote " << man.samples.size() << " samples (" << labeled
            << " labeled) under " << dir << "\n";
  return 0;
}

int run_train(const cacps::Config& cfg) {
  cacps::TrainConfig tc = cfg.train_config();
  tc.validate();
  cacps::run_training(tc);
  std::cout << "training done; metrics and checkpoints under " << tc.out_dir
            << "\n";
  return 0;
}

std::string lambda_tag(double lambda) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", lambda);
  std::string s = buf;
  for (char& c : s)
    if (c == '.') c = 'p';
  return s;
}

int run_augment(const cacps::Config& cfg) {
  const std::string data_dir = cfg.get_string("data.dir", "");
  const std::string out_dir = cfg.get_string("augment.out_dir", "");
  if (data_dir.empty() || out_dir.empty())
    cacps::fail("config", "augment requires data.dir and augment.out_dir");
  const std::vector<std::string> ids =
      cfg.get_string_list("augment.sample_ids", {});
  if (ids.empty())
    cacps::fail("config", "augment requires augment.sample_ids");
  const std::vector<double> lambdas =
      cfg.get_double_list("augment.lambdas", {0.0, 0.25, 0.5, 1.0});

  cacps::MixConfig mix;
  mix.mask_ratio = cfg.get_double("augment.mask_ratio", 0.1);
  mix.mode = cfg.get_string("augment.mix_mode", "convex-low-freq") ==
                     "paper-literal"
                 ? cacps::MixMode::paper_literal
                 : cacps::MixMode::convex_low_freq;

  const cacps::Dataset ds = cacps::load_dataset(data_dir);
  auto find_sample = [&](const std::string& id) -> const cacps::LoadedSample& {
    for (const auto& s : ds.samples)
      if (s.sample_id == id) return s;
    cacps::fail("data", "sample not found in manifest: " + id);
  };

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) cacps::fail("io", "cannot create " + out_dir);

  nlohmann::json summary = nlohmann::json::array();
  for (const std::string& id : ids) {
    const cacps::LoadedSample& s = find_sample(id);
    std::string partner_id = cfg.get_string("augment.partner_id", "");
    if (partner_id.empty()) {
      for (const auto& other : ds.samples)
        if (other.sample_id != id) {
          partner_id = other.sample_id;
          break;
        }
    }
    if (partner_id.empty())
      cacps::fail("data", "no partner sample available for " + id);
    const cacps::LoadedSample& partner = find_sample(partner_id);

    cacps::save_image(s.image,
                      (fs::path(out_dir) / (id + "_original.phi")).string());
    cacps::save_image(partner.image,
                      (fs::path(out_dir) / (id + "_partner.phi")).string());

    nlohmann::json entry;
    entry["sample_id"] = id;
    entry["partner_id"] = partner_id;
    nlohmann::json per_lambda = nlohmann::json::array();
    for (double lambda : lambdas) {
      cacps::MixConfig m = mix;
      m.lambda = lambda;
      const cacps::Grid x = cacps::fourier_augment(s.image, partner.image, m);
      double max_diff = 0.0;
      for (size_t i = 0; i < x.size(); ++i)
        max_diff = std::max(max_diff, std::fabs(x.v[i] - s.image.v[i]));
      const std::string file = id + "_lambda" + lambda_tag(lambda) + ".phi";
      cacps::save_image(x, (fs::path(out_dir) / file).string());
      nlohmann::json row;
      row["lambda"] = lambda;
      row["file"] = file;
      row["max_abs_diff"] = max_diff;
      per_lambda.push_back(std::move(row));
    }
    entry["augmented"] = std::move(per_lambda);
    summary.push_back(std::move(entry));
  }

  std::ofstream os(fs::path(out_dir) / "summary.json");
  if (!os) cacps::fail("io", "cannot write augment summary");
  os << summary.dump(2) << "\n";
  std::cout << "augment preview written under " << out_dir << "\n";
  return 0;
}

int run_infer(const cacps::Config& cfg) {
  const std::string data_dir = cfg.get_string("data.dir", "");
  const std::string out_dir = cfg.get_string("infer.out_dir", "");
  const std::string split = cfg.get_string("infer.split", "val");
  const std::vector<std::string> ckpts =
      cfg.get_string_list("infer.checkpoints", {});
  if (data_dir.empty() || out_dir.empty())
    cacps::fail("config", "infer requires data.dir and infer.out_dir");
  if (ckpts.size() != 2 && ckpts.size() != 4)
    cacps::fail("config",
                "infer.checkpoints must list 2 (one model) or 4 (two models) "
                "files");

  cacps::CacpsModel m1{cacps::load_checkpoint(ckpts[0]),
                       cacps::load_checkpoint(ckpts[1])};
  cacps::CacpsModel m2 =
      ckpts.size() == 4
          ? cacps::CacpsModel{cacps::load_checkpoint(ckpts[2]),
                              cacps::load_checkpoint(ckpts[3])}
          : m1;

  const cacps::Dataset ds = cacps::load_dataset(data_dir);
  const std::vector<int> idx = ds.split_indices(split);
  if (idx.empty()) cacps::fail("data", "no samples in split '" + split + "'");

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) cacps::fail("io", "cannot create " + out_dir);

  nlohmann::json listing = nlohmann::json::array();
  for (int i : idx) {
    const cacps::LoadedSample& s = ds.samples[static_cast<size_t>(i)];
    const cacps::EnsembleResult r = cacps::ensemble_predict(m1, m2, s.image);
    const std::string file = s.sample_id + ".phm";
    cacps::save_mask(r.mask, (fs::path(out_dir) / file).string());
    listing.push_back(file);
  }
  nlohmann::json meta;
  meta["checkpoints"] = ckpts;
  meta["split"] = split;
  meta["predictions"] = std::move(listing);
  std::ofstream os(fs::path(out_dir) / "predictions.json");
  if (!os) cacps::fail("io", "cannot write predictions.json");
  os << meta.dump(2) << "\n";
  std::cout << "wrote " << idx.size() << " prediction masks under " << out_dir
            << "\n";
  return 0;
}

int run_eval(const cacps::Config& cfg) {
  const std::string data_dir = cfg.get_string("data.dir", "");
  const std::string pred_dir = cfg.get_string("eval.pred_dir", "");
  const std::string split = cfg.get_string("eval.split", "val");
  const std::string method = cfg.get_string("eval.method", "double-cacps");
  if (data_dir.empty() || pred_dir.empty())
    cacps::fail("config", "eval requires data.dir and eval.pred_dir");
  const std::string out = cfg.get_string(
      "eval.out", (fs::path(pred_dir) / "eval.csv").string());

  const std::vector<cacps::DiceRow> rows =
      cacps::evaluate_dice(data_dir, split, pred_dir);
  cacps::write_eval_csv(out, method, rows);
  const cacps::DiceRow& agg = rows.back();
  std::cout << "method " << method << " split " << split << " avg dice "
            << agg.avg << " (LV " << agg.dice[0] << ", MYO " << agg.dice[1]
            << ", RV " << agg.dice[2] << ") over " << rows.size() - 1
            << " samples -> " << out << "\n";
  return 0;
}

int run_report(const cacps::Config& cfg) {
  const std::vector<std::string> inputs =
      cfg.get_string_list("report.inputs", {});
  if (inputs.empty()) cacps::fail("config", "report requires report.inputs");
  const std::string out = cfg.get_string("report.out", "report.csv");
  const std::vector<cacps::MethodSummary> rows =
      cacps::summarize_evals(inputs);
  cacps::print_report(rows, std::cout);
  cacps::write_report_csv(rows, out);
  return 0;
}

int exit_code_for(const cacps::Error& e) {
  const std::string& code = e.code();
  if (code == "config") return 2;
  if (code == "diverged") return 4;
  if (code == "data" || code == "io" || code == "format" || code == "label" ||
      code == "checkpoint")
    return 3;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier-augmented cross-pseudo-supervision segmentation"};
  app.require_subcommand(1);

  struct SubArgs {
    std::string config;
    std::vector<std::string> overrides;
  };
  std::vector<std::pair<CLI::App*, SubArgs>> subs;
  const std::vector<std::pair<std::string, std::string>> names = {
      {"gen-data", "generate the synthetic phantom dataset"},
      {"train", "train the two CACPS models"},
      {"augment", "write augmentation previews"},
      {"infer", "write ensemble prediction masks"},
      {"eval", "score predictions against ground truth"},
      {"report", "aggregate eval CSVs into a comparison table"},
  };
  subs.reserve(names.size());
  for (const auto& [name, desc] : names) {
    CLI::App* sub = app.add_subcommand(name, desc);
    subs.emplace_back(sub, SubArgs{});
  }
  for (auto& [sub, args] : subs) {
    sub->add_option("--config", args.config, "JSON config file");
    sub->add_option("overrides", args.overrides,
                    "key=value config overrides");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i].first->parsed()) continue;
      const cacps::Config cfg =
          load_config(subs[i].second.config, subs[i].second.overrides);
      switch (i) {
        case 0:
          return run_gen_data(cfg);
        case 1:
          return run_train(cfg);
        case 2:
          return run_augment(cfg);
        case 3:
          return run_infer(cfg);
        case 4:
          return run_eval(cfg);
        case 5:
          return run_report(cfg);
        default:
          break;
      }
    }
    std::cerr << "error[usage]: no subcommand selected\n";
    return 1;
  } catch (const cacps::Error& e) {
    std::cerr << "error[" << e.code() << "]: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
}
