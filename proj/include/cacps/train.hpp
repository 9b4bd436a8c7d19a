// include/cacps/train.hpp

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

// Semi-supervised training of two independent CACPS models (four networks).
// Model 1 trains networks seeded by (seed_net1, seed_net2), model 2 by
// (seed_net3, seed_net4); every random stream is keyed by (seed, model_id,
// epoch, ...) so model 1's outcome never depends on model 2's seeds and
// reruns are bit-identical.

#ifndef CACPS_TRAIN_HPP_
#define CACPS_TRAIN_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cacps/grid2d.hpp"
#include "cacps/loss.hpp"
#include "cacps/phantom.hpp"
#include "cacps/segnet.hpp"
#include "cacps/spectral.hpp"
#include "cacps/tensor.hpp"

namespace cacps {

// The defaults (lr 1e-5, batch 16, 100 epochs, beta 1.5) suit long schedules
// on real data. The bundled synthetic experiments override them with a much
// shorter recipe; see README.
struct TrainConfig {
  double lr_max = 1e-5;
  double lr_min = 1e-6;
  int epochs = 100;
  int batch_size = 16;
  double beta = 1.5;          // CACPS weight
  double weight_decay = 1e-4;
  double lambda_max = 1.0;    // augmentation blend drawn from U[0, lambda_max]
  double mask_ratio = 0.1;
  MixMode mix_mode = MixMode::convex_low_freq;
  bool augment_labeled = true;
  bool grad_through_variance = false;
  bool labeled_only = false;  // supervised baseline: drop unlabeled samples
  uint64_t seed_data = 1;     // augmentation partner/lambda stream
  uint64_t seed_net1 = 11;
  uint64_t seed_net2 = 12;
  uint64_t seed_net3 = 13;
  uint64_t seed_net4 = 14;
  uint64_t seed_shuffle = 5;  // epoch shuffling stream
  std::string data_dir;
  std::string out_dir;

  void validate() const;  // error "config" on bad fields
};

struct LoadedSample {
  Grid image;
  MaskGrid mask;  // empty when unlabeled
  int domain_id = 1;
  bool labeled = false;
  std::string sample_id;
  std::string split;
};

struct Dataset {
  int h = 0;
  int w = 0;
  std::vector<LoadedSample> samples;

  std::vector<int> split_indices(const std::string& split) const;
  std::vector<int> labeled_indices(const std::string& split) const;
};

Dataset load_dataset(const std::string& dir);

// One CACPS model: two parallel networks cross-supervising each other.
struct CacpsModel {
  SegNetParams net_a;
  SegNetParams net_b;
};

// (probs_a + probs_b) / 2 on a batch; no gradient is recorded by callers
// that run outside a Tape scope.
Tensor model_probs(const CacpsModel& model, const Tensor& batch);

struct EnsembleResult {
  Tensor probs;   // [1,4,H,W]
  MaskGrid mask;  // argmax labels, lowest index wins ties
};

// Average the two per-model probability maps, then argmax. The four
// networks must share the layer table -> error "checkpoint".
EnsembleResult ensemble_predict(const CacpsModel& model1,
                                const CacpsModel& model2, const Grid& image);

// Hard per-class dice 2|A^B|/(|A|+|B|) for foreground labels 1..3; a class
// absent from both masks scores 1.0.
std::array<double, 3> hard_dice_per_class(const MaskGrid& pred,
                                          const MaskGrid& truth);

// Metrics CSV column order (fixed):
// epoch,step,model_id,L_s,L_cacps,L_total,lr,mean_V,
// val_dice_LV,val_dice_MYO,val_dice_RV,val_dice_avg
extern const char kMetricsHeader[];

// Train one model (model_id 1 or 2) on the dataset's train split, appending
// metrics rows and writing model{id}_net{1,2}.ckpt into cfg.out_dir each
// epoch. Empty labeled train pool -> error "data"; non-finite loss ->
// error "diverged" with the previous epoch's checkpoints left in place.
void train_cacps_model(int model_id, const Dataset& ds, const TrainConfig& cfg,
                       std::ostream& metrics);

// Full run: header + model 1 + model 2 into cfg.out_dir/metrics.csv.
void run_training(const TrainConfig& cfg);

// Per-sample evaluation row.
struct DiceRow {
  std::string sample_id;
  std::array<double, 3> dice{};
  double avg = 0.0;
};

// Compare predicted masks (pred_dir/<sample_id>.phm) against the labeled
// samples of a split; returns per-sample rows plus a final aggregate row
// with sample_id "ALL". Missing prediction or no labeled samples ->
// error "data".
std::vector<DiceRow> evaluate_dice(const std::string& data_dir,
                                   const std::string& split,
                                   const std::string& pred_dir);

}  // namespace cacps

#endif  // CACPS_TRAIN_HPP_
