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

#include "maif/mvae/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "maif/error.h"

namespace maif::mvae {
namespace {

using diffnet::Tensor;

struct Reconstruction {
  Tensor z;
  Tensor s_q;
  Tensor s_v;
};

void CheckBatch(const GenerativeModel& model, const Tensor& q, const Tensor& images,
                const Tensor& mask) {
  if (q.shape().size() != 2 || q.shape()[1] != static_cast<std::size_t>(model.config.joints)) {
    throw ShapeError("joint batch must be (B, joints), got " + diffnet::ToString(q.shape()));
  }
  if (images.shape().size() != 4 || images.shape()[0] != q.shape()[0]) {
    throw ShapeError("image batch must be (B, 1, H, W) matching the joints, got " +
                     diffnet::ToString(images.shape()));
  }
  if (mask.shape() != model.image_shape()) throw ShapeError("mask shape mismatch");
}

LossTerms Terms(const Reconstruction& r, const Tensor& q,
                const Tensor& images, const Tensor& mask, const LossOptions& options) {
  const std::size_t batch = q.shape()[0];
  const std::size_t pixels = mask.size();
  double visual = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t p = 0; p < pixels; ++p) {
      const std::size_t i = b * pixels + p;
      const double e = r.s_v[i] + mask[p] * r.s_v[i] - images[i];
      visual += e * e;
    }
  }
  double proprio = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double e = r.s_q[i] - q[i];
    proprio += e * e;
  }
  LossTerms t;
  t.visual = visual / static_cast<double>(images.size());
  t.proprio = proprio / static_cast<double>(q.size());
  t.kl = options.kl_weight > 0.0 ? 0.5 * diffnet::SquaredNorm(r.z) / static_cast<double>(batch) : 0.0;
  t.total = t.visual + t.proprio + options.kl_weight * t.kl;
  return t;
}

std::string Describe(const LossTerms& t) {
  std::ostringstream s;
  s << "total " << t.total << " (visual " << t.visual << ", proprio " << t.proprio << ", kl "
    << t.kl << ")";
  return s.str();
}

}  // namespace

LossResult MaskedLoss(const GenerativeModel& model, const Tensor& q, const Tensor& images,
                      const Tensor& mask, const LossOptions& options, std::size_t batch_index) {
  CheckBatch(model, q, images, mask);
  auto fq = model.encoder_q.Forward(q);
  auto fv = model.encoder_v.Forward(images);
  Reconstruction r;
  r.z = fq.output + fv.output;
  auto dq = model.decoder_q.Forward(r.z);
  auto dv = model.decoder_v.Forward(r.z);
  r.s_q = dq.output;
  r.s_v = dv.output;

  LossResult result;
  result.terms = Terms(r, q, images, mask, options);
  if (!std::isfinite(result.terms.total)) {
    throw NumericError("non-finite loss in batch " + std::to_string(batch_index) + ": " +
                       Describe(result.terms));
  }

  const std::size_t batch = q.shape()[0];
  const std::size_t pixels = mask.size();
  Tensor grad_v(r.s_v.shape());
  const double cv = 2.0 / static_cast<double>(images.size());
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t p = 0; p < pixels; ++p) {
      const std::size_t i = b * pixels + p;
      const double gain = 1.0 + mask[p];
      grad_v[i] = cv * gain * (gain * r.s_v[i] - images[i]);
    }
  }
  Tensor grad_q = (2.0 / static_cast<double>(q.size())) * (r.s_q - q);

  diffnet::Gradients gq = model.decoder_q.Backward(dq.tape, grad_q, true, true);
  diffnet::Gradients gv = model.decoder_v.Backward(dv.tape, grad_v, true, true);
  Tensor grad_z = gq.input + gv.input;
  if (options.kl_weight > 0.0) {
    grad_z += (options.kl_weight / static_cast<double>(batch)) * r.z;
  }
  result.grads.decoder_q = std::move(gq.params);
  result.grads.decoder_v = std::move(gv.params);
  result.grads.encoder_q = model.encoder_q.BackwardParams(fq.tape, grad_z);
  result.grads.encoder_v = model.encoder_v.BackwardParams(fv.tape, grad_z);
  return result;
}

LossTerms EvaluateLoss(const GenerativeModel& model, const Tensor& q, const Tensor& images,
                       const Tensor& mask, const LossOptions& options) {
  CheckBatch(model, q, images, mask);
  Reconstruction r;
  r.z = model.encoder_q.Predict(q) + model.encoder_v.Predict(images);
  r.s_q = model.decoder_q.Predict(r.z);
  r.s_v = model.decoder_v.Predict(r.z);
  return Terms(r, q, images, mask, options);
}

LossTerms DatasetLoss(const GenerativeModel& model, const Dataset& data,
                      std::span<const std::size_t> indices, const LossOptions& options,
                      std::size_t batch_size) {
  if (indices.empty()) throw ConfigError("loss over an empty sample set");
  LossTerms sum;
  for (std::size_t start = 0; start < indices.size(); start += batch_size) {
    const auto chunk = indices.subspan(start, std::min(batch_size, indices.size() - start));
    const LossTerms t = EvaluateLoss(model, GatherJoints(data, chunk), GatherImages(data, chunk),
                                     model.mask, options);
    const double w = static_cast<double>(chunk.size());
    sum.total += w * t.total;
    sum.visual += w * t.visual;
    sum.proprio += w * t.proprio;
    sum.kl += w * t.kl;
  }
  const double n = static_cast<double>(indices.size());
  sum.total /= n;
  sum.visual /= n;
  sum.proprio /= n;
  sum.kl /= n;
  return sum;
}

TrainResult Train(const GenerativeModel& initial, const Dataset& data, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  if (data.count == 0) throw ConfigError("cannot train on an empty dataset");
  if (data.joints != initial.config.joints || data.height != initial.config.height ||
      data.width != initial.config.width) {
    throw ShapeError("dataset does not match the model configuration");
  }
  if (config.epochs < 0 || config.batch_size == 0 || !(config.learning_rate > 0.0) ||
      !(config.heldout_fraction >= 0.0 && config.heldout_fraction < 1.0)) {
    throw ConfigError("invalid training configuration");
  }
  TrainResult result;
  result.model = initial;
  GenerativeModel& model = result.model;
  if (config.epochs == 0) return result;

  model.mask = ComputeMask(data, config.normalize_mask);
  model.joint_variance = JointVariance(data);
  model.image_variance = ImageVariance(data);

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(data.count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  auto heldout_count = static_cast<std::size_t>(
      std::llround(config.heldout_fraction * static_cast<double>(data.count)));
  if (config.heldout_fraction > 0.0) heldout_count = std::max<std::size_t>(heldout_count, 1);
  heldout_count = std::min(heldout_count, data.count - 1);
  std::vector<std::size_t> train(order.begin(), order.end() - static_cast<std::ptrdiff_t>(heldout_count));
  result.heldout_indices.assign(order.end() - static_cast<std::ptrdiff_t>(heldout_count), order.end());
  const std::span<const std::size_t> eval =
      result.heldout_indices.empty() ? std::span<const std::size_t>(train)
                                     : std::span<const std::size_t>(result.heldout_indices);

  result.initial_heldout_loss = DatasetLoss(model, data, eval, config.loss).total;

  diffnet::AdamConfig adam;
  adam.learning_rate = config.learning_rate;
  diffnet::AdamState sq(model.encoder_q.params()), sv(model.encoder_v.params()),
      dq(model.decoder_q.params()), dv(model.decoder_v.params());

  std::size_t batch_counter = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(train.begin(), train.end(), rng);
    double sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < train.size(); start += config.batch_size) {
      const std::span<const std::size_t> idx(train.data() + start,
                                             std::min(config.batch_size, train.size() - start));
      const LossResult loss = MaskedLoss(model, GatherJoints(data, idx), GatherImages(data, idx),
                                         model.mask, config.loss, batch_counter);
      if (loss.terms.total > config.divergence_threshold) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_counter) + ": " + Describe(loss.terms));
      }
      diffnet::AdamStep(model.encoder_q.params(), loss.grads.encoder_q, sq, adam);
      diffnet::AdamStep(model.encoder_v.params(), loss.grads.encoder_v, sv, adam);
      diffnet::AdamStep(model.decoder_q.params(), loss.grads.decoder_q, dq, adam);
      diffnet::AdamStep(model.decoder_v.params(), loss.grads.decoder_v, dv, adam);
      sum += loss.terms.total;
      ++batches;
      ++batch_counter;
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = sum / static_cast<double>(batches);
    stats.heldout_loss = DatasetLoss(model, data, eval, config.loss).total;
    result.curve.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }

  model.metadata.dataset_size = data.count;
  model.metadata.seed = config.seed;
  model.metadata.epochs = static_cast<std::uint32_t>(config.epochs);
  model.metadata.initial_heldout_loss = result.initial_heldout_loss;
  model.metadata.final_train_loss = result.curve.back().train_loss;
  model.metadata.final_heldout_loss = result.curve.back().heldout_loss;
  return result;
}

}  // namespace maif::mvae
