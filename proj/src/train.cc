// src/train.cc

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

#include "cacps/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>

#include "cacps/error.hpp"
#include "cacps/optim.hpp"
#include "cacps/rng.hpp"

namespace cacps {

namespace {

namespace fs = std::filesystem;

constexpr uint64_t kShuffleTag = 0x7fa11e01;
constexpr uint64_t kAugTag = 0x7fa11e02;

std::string format_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

}  // namespace

const char kMetricsHeader[] =
    "epoch,step,model_id,L_s,L_cacps,L_total,lr,mean_V,"
    "val_dice_LV,val_dice_MYO,val_dice_RV,val_dice_avg";

void TrainConfig::validate() const {
  if (!(lr_min > 0.0) || !(lr_max >= lr_min))
    fail("config", "require lr_max >= lr_min > 0");
  if (epochs < 1) fail("config", "epochs must be >= 1");
  if (batch_size < 2) fail("config", "batch_size must be >= 2");
  if (beta < 0.0) fail("config", "beta must be >= 0");
  if (weight_decay < 0.0) fail("config", "weight_decay must be >= 0");
  if (!(lambda_max >= 0.0 && lambda_max <= 1.0))
    fail("config", "lambda_max must lie in [0,1]");
  if (!(mask_ratio > 0.0 && mask_ratio <= 0.5))
    fail("config", "mask_ratio must lie in (0,0.5]");
  if (data_dir.empty()) fail("config", "data_dir is required");
  if (out_dir.empty()) fail("config", "out_dir is required");
}

std::vector<int> Dataset::split_indices(const std::string& split) const {
  std::vector<int> out;
  for (size_t i = 0; i < samples.size(); ++i)
    if (samples[i].split == split) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> Dataset::labeled_indices(const std::string& split) const {
  std::vector<int> out;
  for (size_t i = 0; i < samples.size(); ++i)
    if (samples[i].split == split && samples[i].labeled)
      out.push_back(static_cast<int>(i));
  return out;
}

Dataset load_dataset(const std::string& dir) {
  const DatasetManifest man = load_manifest(dir);
  Dataset ds;
  ds.h = man.h;
  ds.w = man.w;
  ds.samples.reserve(man.samples.size());
  for (const ManifestEntry& e : man.samples) {
    LoadedSample s;
    s.image = load_image((fs::path(dir) / e.image_file).string());
    if (s.image.h != man.h || s.image.w != man.w)
      fail("data", "image dims disagree with manifest: " + e.sample_id);
    if (e.labeled) {
      s.mask = load_mask((fs::path(dir) / e.mask_file).string());
      if (s.mask.h != man.h || s.mask.w != man.w)
        fail("data", "mask dims disagree with manifest: " + e.sample_id);
    }
    s.domain_id = e.domain_id;
    s.labeled = e.labeled;
    s.sample_id = e.sample_id;
    s.split = e.split;
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

namespace {

Tensor image_batch(const Dataset& ds, const std::vector<const Grid*>& images) {
  const int n = static_cast<int>(images.size());
  Tensor t = Tensor::zeros({n, 1, ds.h, ds.w});
  auto& v = t.mutable_values();
  const size_t plane = static_cast<size_t>(ds.h) * ds.w;
  for (int i = 0; i < n; ++i)
    std::copy(images[static_cast<size_t>(i)]->v.begin(),
              images[static_cast<size_t>(i)]->v.end(),
              v.begin() + static_cast<int64_t>(i * plane));
  return t;
}

Tensor one_hot_masks(const Dataset& ds, const std::vector<const MaskGrid*>& masks) {
  const int n = static_cast<int>(masks.size());
  Tensor t = Tensor::zeros({n, kNumClasses, ds.h, ds.w});
  auto& v = t.mutable_values();
  const size_t plane = static_cast<size_t>(ds.h) * ds.w;
  for (int i = 0; i < n; ++i) {
    const MaskGrid& m = *masks[static_cast<size_t>(i)];
    for (size_t p = 0; p < plane; ++p)
      v[(static_cast<size_t>(i) * kNumClasses + m.v[p]) * plane + p] = 1.0;
  }
  return t;
}

MaskGrid argmax_mask(const Tensor& probs) {
  const int c = probs.dim(1), h = probs.dim(2), w = probs.dim(3);
  const size_t plane = static_cast<size_t>(h) * w;
  MaskGrid m(h, w);
  const double* pv = probs.values().data();
  for (size_t p = 0; p < plane; ++p) {
    int best = 0;
    double bv = pv[p];
    for (int ch = 1; ch < c; ++ch)
      if (pv[static_cast<size_t>(ch) * plane + p] > bv) {
        bv = pv[static_cast<size_t>(ch) * plane + p];
        best = ch;
      }
    m.v[p] = static_cast<uint8_t>(best);
  }
  return m;
}

// Validation dice of one model (average of its two networks) over the
// labeled validation samples; mean over samples per class.
std::array<double, 4> validation_dice(const CacpsModel& model,
                                      const Dataset& ds,
                                      const std::vector<int>& val_idx) {
  std::vector<double> lv, myo, rv;
  for (int idx : val_idx) {
    const LoadedSample& s = ds.samples[static_cast<size_t>(idx)];
    Tensor batch = image_batch(ds, {&s.image});
    Tensor probs = model_probs(model, batch);
    const MaskGrid pred = argmax_mask(probs);
    const std::array<double, 3> d = hard_dice_per_class(pred, s.mask);
    lv.push_back(d[0]);
    myo.push_back(d[1]);
    rv.push_back(d[2]);
  }
  const double a = mean_of(lv), b = mean_of(myo), c = mean_of(rv);
  return {a, b, c, (a + b + c) / 3.0};
}

}  // namespace

Tensor model_probs(const CacpsModel& model, const Tensor& batch) {
  Tensor pa = predict_probs(model.net_a, batch);
  Tensor pb = predict_probs(model.net_b, batch);
  return mul(add(pa, pb), 0.5);
}

EnsembleResult ensemble_predict(const CacpsModel& model1,
                                const CacpsModel& model2, const Grid& image) {
  const auto& layers = segnet_layers();
  for (const SegNetParams* net :
       {&model1.net_a, &model1.net_b, &model2.net_a, &model2.net_b})
    if (net->weights.size() != layers.size())
      fail("checkpoint", "ensemble networks disagree with the layer table");

  Tensor batch = Tensor::zeros({1, 1, image.h, image.w});
  std::copy(image.v.begin(), image.v.end(), batch.mutable_values().begin());
  Tensor p1 = model_probs(model1, batch);
  Tensor p2 = model_probs(model2, batch);
  EnsembleResult r;
  r.probs = mul(add(p1, p2), 0.5);
  r.mask = argmax_mask(r.probs);
  return r;
}

std::array<double, 3> hard_dice_per_class(const MaskGrid& pred,
                                          const MaskGrid& truth) {
  if (pred.h != truth.h || pred.w != truth.w)
    fail("shape", "dice mask shapes differ");
  std::array<double, 3> out{};
  for (int cls = 1; cls <= 3; ++cls) {
    int64_t inter = 0, a = 0, b = 0;
    for (size_t i = 0; i < pred.v.size(); ++i) {
      const bool pa = pred.v[i] == cls;
      const bool pb = truth.v[i] == cls;
      inter += pa && pb;
      a += pa;
      b += pb;
    }
    out[static_cast<size_t>(cls - 1)] =
        (a + b == 0) ? 1.0
                     : 2.0 * static_cast<double>(inter) /
                           static_cast<double>(a + b);
  }
  return out;
}

void train_cacps_model(int model_id, const Dataset& ds, const TrainConfig& cfg,
                       std::ostream& metrics) {
  cfg.validate();
  if (model_id != 1 && model_id != 2)
    fail("config", "model_id must be 1 or 2");

  std::vector<int> labeled_pool;
  std::vector<int> unlabeled_pool;
  for (int idx : ds.split_indices("train")) {
    const LoadedSample& s = ds.samples[static_cast<size_t>(idx)];
    if (s.labeled)
      labeled_pool.push_back(idx);
    else if (!cfg.labeled_only)
      unlabeled_pool.push_back(idx);
  }
  if (labeled_pool.empty())
    fail("data", "training pool has no labeled samples");

  // Augmentation partners are drawn from the whole pool by position.
  std::vector<int> partner_pool = labeled_pool;
  partner_pool.insert(partner_pool.end(), unlabeled_pool.begin(),
                      unlabeled_pool.end());
  std::vector<int> pool_pos(ds.samples.size(), -1);
  for (size_t i = 0; i < partner_pool.size(); ++i)
    pool_pos[static_cast<size_t>(partner_pool[i])] = static_cast<int>(i);

  const std::vector<int> val_idx = ds.labeled_indices("val");

  const uint64_t seed_a = model_id == 1 ? cfg.seed_net1 : cfg.seed_net3;
  const uint64_t seed_b = model_id == 1 ? cfg.seed_net2 : cfg.seed_net4;
  CacpsModel model{segnet_init(seed_a), segnet_init(seed_b)};
  const std::vector<Tensor> params_a = model.net_a.parameters();
  const std::vector<Tensor> params_b = model.net_b.parameters();
  AdamWState opt_a = AdamWState::create(params_a);
  AdamWState opt_b = AdamWState::create(params_b);

  MixConfig mix;
  mix.mask_ratio = cfg.mask_ratio;
  mix.mode = cfg.mix_mode;

  const std::string ckpt_a =
      (fs::path(cfg.out_dir) /
       ("model" + std::to_string(model_id) + "_net1.ckpt")).string();
  const std::string ckpt_b =
      (fs::path(cfg.out_dir) /
       ("model" + std::to_string(model_id) + "_net2.ckpt")).string();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cosine_lr(epoch, cfg.epochs, cfg.lr_max, cfg.lr_min);

    std::vector<int> lab = labeled_pool;
    std::vector<int> unlab = unlabeled_pool;
    Rng shuffle_rng(mix_seed({kShuffleTag, cfg.seed_shuffle,
                              static_cast<uint64_t>(model_id),
                              static_cast<uint64_t>(epoch)}));
    shuffle_rng.shuffle(lab);
    shuffle_rng.shuffle(unlab);

    // Mixed batches: half the rows (at least one) come from the labeled
    // pool so every step keeps a supervised anchor next to the CACPS term;
    // pure-consistency steps let the pseudo-label loop feed on itself. The
    // shorter pool cycles within the epoch. Without unlabeled data the
    // batches are plain sequential chunks.
    const int bs = cfg.batch_size;
    int l_n = bs, u_n = 0, steps;
    auto div_up = [](size_t a, int b) {
      return static_cast<int>((a + static_cast<size_t>(b) - 1) /
                              static_cast<size_t>(b));
    };
    if (unlab.empty()) {
      steps = div_up(lab.size(), bs);
    } else {
      l_n = std::max(1, bs / 2);
      u_n = bs - l_n;
      steps = std::max(div_up(lab.size(), l_n), div_up(unlab.size(), u_n));
    }
    for (int step = 0; step < steps; ++step) {
      std::vector<int> batch_idx;
      if (unlab.empty()) {
        const size_t begin = static_cast<size_t>(step) * bs;
        const size_t end = std::min(lab.size(), begin + bs);
        batch_idx.assign(lab.begin() + static_cast<long>(begin),
                         lab.begin() + static_cast<long>(end));
      } else {
        for (int i = 0; i < l_n; ++i)
          batch_idx.push_back(
              lab[(static_cast<size_t>(step) * l_n + i) % lab.size()]);
        for (int i = 0; i < u_n; ++i)
          batch_idx.push_back(
              unlab[(static_cast<size_t>(step) * u_n + i) % unlab.size()]);
      }

      std::vector<const Grid*> originals;
      std::vector<Grid> augmented;
      std::vector<int> labeled_rows;
      std::vector<const MaskGrid*> labeled_masks;
      for (size_t row = 0; row < batch_idx.size(); ++row) {
        const int idx = batch_idx[row];
        const LoadedSample& s = ds.samples[static_cast<size_t>(idx)];
        originals.push_back(&s.image);
        if (s.labeled) {
          labeled_rows.push_back(static_cast<int>(row));
          labeled_masks.push_back(&s.mask);
        }

        // Independent per-sample stream: parallel or serial augmentation
        // yields the same bytes.
        Rng aug_rng(mix_seed({kAugTag, cfg.seed_data,
                              static_cast<uint64_t>(model_id),
                              static_cast<uint64_t>(epoch),
                              static_cast<uint64_t>(step) * bs + row}));
        if (!cfg.augment_labeled && s.labeled) {
          augmented.push_back(s.image);
          continue;
        }
        uint64_t partner = static_cast<uint64_t>(idx);
        if (partner_pool.size() > 1) {
          const uint64_t draw = aug_rng.uniform_int(
              0, static_cast<int64_t>(partner_pool.size()) - 2);
          const int self = pool_pos[static_cast<size_t>(idx)];
          const size_t partner_pos =
              static_cast<size_t>(draw) +
              (draw >= static_cast<uint64_t>(self) ? 1 : 0);
          partner = static_cast<uint64_t>(partner_pool[partner_pos]);
        }
        MixConfig sample_mix = mix;
        sample_mix.lambda = aug_rng.uniform(0.0, cfg.lambda_max);
        augmented.push_back(
            fourier_augment(s.image,
                            ds.samples[static_cast<size_t>(partner)].image,
                            sample_mix));
      }

      std::vector<const Grid*> augmented_ptrs;
      for (const Grid& g : augmented) augmented_ptrs.push_back(&g);

      LossReport report;
      {
        Tape tape;
        Tensor i_batch = image_batch(ds, originals);
        Tensor x_batch = image_batch(ds, augmented_ptrs);
        PseudoBundle ba = build_bundle(model.net_a, i_batch, x_batch);
        PseudoBundle bb = build_bundle(model.net_b, i_batch, x_batch);
        Tensor l_cacps = cacps_pair_loss(ba, bb, cfg.grad_through_variance);

        Tensor l_s = Tensor::scalar(0.0);
        if (!labeled_rows.empty()) {
          Tensor g = one_hot_masks(ds, labeled_masks);
          std::array<double, 3> pc_a{}, pc_b{};
          Tensor d_a = dice_loss(gather_batch(ba.p_o, labeled_rows), g, &pc_a);
          Tensor d_b = dice_loss(gather_batch(bb.p_o, labeled_rows), g, &pc_b);
          l_s = add(d_a, d_b);
          for (size_t c = 0; c < 3; ++c)
            report.dice_per_class[c] = 0.5 * (pc_a[c] + pc_b[c]);
        }
        Tensor l = total_loss(l_s, l_cacps, cfg.beta);

        report.l_s = l_s.item();
        report.l_cacps = l_cacps.item();
        report.l_total = l.item();
        report.mean_v =
            0.5 * (mean_of(ba.v.values()) + mean_of(bb.v.values()));
        if (!std::isfinite(report.l_total))
          fail("diverged", "non-finite loss at model " +
                               std::to_string(model_id) + " epoch " +
                               std::to_string(epoch) + " step " +
                               std::to_string(step));

        tape.backward(l);
        adamw_step(params_a, opt_a, lr, cfg.weight_decay);
        adamw_step(params_b, opt_b, lr, cfg.weight_decay);
        model.net_a.zero_grad();
        model.net_b.zero_grad();
      }

      metrics << epoch << ',' << step << ',' << model_id << ','
              << format_metric(report.l_s) << ','
              << format_metric(report.l_cacps) << ','
              << format_metric(report.l_total) << ',' << format_metric(lr)
              << ',' << format_metric(report.mean_v);
      if (step == steps - 1 && !val_idx.empty()) {
        const std::array<double, 4> vd = validation_dice(model, ds, val_idx);
        metrics << ',' << format_metric(vd[0]) << ',' << format_metric(vd[1])
                << ',' << format_metric(vd[2]) << ',' << format_metric(vd[3]);
      } else {
        metrics << ",,,,";
      }
      metrics << '\n';
    }

    save_checkpoint(model.net_a, ckpt_a);
    save_checkpoint(model.net_b, ckpt_b);
  }
}

void run_training(const TrainConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) fail("io", "cannot create output directory " + cfg.out_dir);

  const Dataset ds = load_dataset(cfg.data_dir);
  std::ofstream metrics(fs::path(cfg.out_dir) / "metrics.csv");
  if (!metrics) fail("io", "cannot write metrics.csv under " + cfg.out_dir);
  metrics << kMetricsHeader << '\n';
  train_cacps_model(1, ds, cfg, metrics);
  train_cacps_model(2, ds, cfg, metrics);
  if (!metrics) fail("io", "short write on metrics.csv");
}

std::vector<DiceRow> evaluate_dice(const std::string& data_dir,
                                   const std::string& split,
                                   const std::string& pred_dir) {
  const Dataset ds = load_dataset(data_dir);
  const std::vector<int> idx = ds.labeled_indices(split);
  if (idx.empty())
    fail("data", "no labeled samples in split '" + split + "'");

  std::vector<DiceRow> rows;
  std::array<double, 3> sums{};
  for (int i : idx) {
    const LoadedSample& s = ds.samples[static_cast<size_t>(i)];
    const fs::path pred_path = fs::path(pred_dir) / (s.sample_id + ".phm");
    if (!fs::exists(pred_path))
      fail("data", "missing prediction mask: " + pred_path.string());
    const MaskGrid pred = load_mask(pred_path.string());

    DiceRow row;
    row.sample_id = s.sample_id;
    row.dice = hard_dice_per_class(pred, s.mask);
    row.avg = (row.dice[0] + row.dice[1] + row.dice[2]) / 3.0;
    for (size_t c = 0; c < 3; ++c) sums[c] += row.dice[c];
    rows.push_back(std::move(row));
  }

  DiceRow agg;
  agg.sample_id = "ALL";
  for (size_t c = 0; c < 3; ++c)
    agg.dice[c] = sums[c] / static_cast<double>(idx.size());
  agg.avg = (agg.dice[0] + agg.dice[1] + agg.dice[2]) / 3.0;
  rows.push_back(std::move(agg));
  return rows;
}

}  // namespace cacps
