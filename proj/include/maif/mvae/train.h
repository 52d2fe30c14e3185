// Copyright 2026 The MVAE-AIF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MAIF_MVAE_TRAIN_H_
#define MAIF_MVAE_TRAIN_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "maif/diffnet/adam.h"
#include "maif/mvae/dataset.h"
#include "maif/mvae/model.h"

namespace maif::mvae {

struct LossOptions {
  // Weight of 0.5 * |z|^2 per sample, the KL divergence of N(z, I) from
  // N(0, I). Zero keeps the model a plain deterministic autoencoder.
  double kl_weight = 0.0;
};

// L = MSE(s_v + mask * s_v, I) + MSE(s_q, q) [+ kl_weight * mean 0.5 |z|^2],
// with s_v, s_q the reconstructions of z = enc_q(q) + enc_v(I).
struct LossTerms {
  double total = 0.0;
  double visual = 0.0;
  double proprio = 0.0;
  double kl = 0.0;
};

struct ModelGradients {
  diffnet::ParamSet encoder_q;
  diffnet::ParamSet encoder_v;
  diffnet::ParamSet decoder_q;
  diffnet::ParamSet decoder_v;
};

struct LossResult {
  LossTerms terms;
  ModelGradients grads;
};

// Batch inputs are (B, joints) and (B, 1, H, W). Throws NumericError naming
// `batch_index` if the loss is not finite.
LossResult MaskedLoss(const GenerativeModel& model, const diffnet::Tensor& q,
                      const diffnet::Tensor& images, const diffnet::Tensor& mask,
                      const LossOptions& options = {}, std::size_t batch_index = 0);

// Loss only, no tapes.
LossTerms EvaluateLoss(const GenerativeModel& model, const diffnet::Tensor& q,
                       const diffnet::Tensor& images, const diffnet::Tensor& mask,
                       const LossOptions& options = {});

struct TrainConfig {
  int epochs = 30;
  std::size_t batch_size = 64;
  double learning_rate = 2e-3;
  double heldout_fraction = 0.05;
  bool normalize_mask = true;
  LossOptions loss{.kl_weight = 1e-3};
  std::uint64_t seed = 0;
  // Abort when a batch loss exceeds this or turns non-finite.
  double divergence_threshold = 1e6;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;    // mean over the epoch's batches
  double heldout_loss = 0.0;  // after the epoch
};

struct TrainResult {
  GenerativeModel model;
  double initial_heldout_loss = 0.0;
  std::vector<EpochStats> curve;
  std::vector<std::size_t> heldout_indices;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Adam on the masked loss. The dataset is shuffled once under `seed`; the
// last `heldout_fraction` of that order is held out and evaluated after every
// epoch. The mask and the sensory variances are computed from the full
// dataset and stored in the returned model.
TrainResult Train(const GenerativeModel& initial, const Dataset& data, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// Mean loss over the given samples, evaluated in batches.
LossTerms DatasetLoss(const GenerativeModel& model, const Dataset& data,
                      std::span<const std::size_t> indices, const LossOptions& options = {},
                      std::size_t batch_size = 256);

}  // namespace maif::mvae

#endif  // MAIF_MVAE_TRAIN_H_
