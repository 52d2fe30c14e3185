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

#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "maif/error.h"
#include "maif/mvae/dataset.h"
#include "maif/mvae/model.h"
#include "maif/mvae/train.h"

namespace maif::mvae {
namespace {

using diffnet::Activation;
using diffnet::Dense;
using diffnet::Tensor;

std::filesystem::path TempPath(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("maif_mvae_test_" + name);
}

void ZeroParams(diffnet::Network& net) { net.params() = net.ZeroParams(); }

// Small model on 4x4 images for fast gradient and training checks.
ModelConfig TinyConfig() { return {2, 4, 4, 3}; }

Architecture TinyArchitecture() {
  Architecture a;
  a.encoder_q = {Dense(2, 6, Activation::kRelu), Dense(6, 3, Activation::kIdentity)};
  a.encoder_v = {diffnet::Conv(1, 2, 3, 1, 1, Activation::kRelu), diffnet::MaxPool(2, 2),
                 Dense(8, 3, Activation::kIdentity)};
  a.decoder_q = {Dense(3, 5, Activation::kRelu), Dense(5, 2, Activation::kIdentity)};
  a.decoder_v = {Dense(3, 4, Activation::kRelu, {1, 2, 2}),
                 diffnet::TransposedConv(1, 1, 2, 2, 0, Activation::kTanhRelu)};
  return a;
}

Dataset TinyDataset(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Dataset d;
  d.count = n;
  d.joints = 2;
  d.height = d.width = 4;
  d.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = u(rng) * 2 - 1, b = u(rng) * 2 - 1;
    d.q.push_back(a);
    d.q.push_back(b);
    for (int p = 0; p < 16; ++p) d.images.push_back(0.5 + 0.4 * std::sin(a * (p % 4) + b * (p / 4)));
  }
  return d;
}

TEST(BabbleTest, EmptyDataset) {
  const Dataset d = BabbleDataset(0, DefaultBabblingRange(3), armsim::ArmModel::Desk3(), {}, 1);
  EXPECT_EQ(d.count, 0u);
  EXPECT_TRUE(d.q.empty());
  EXPECT_THROW(ComputeMask(d), ConfigError);
}

TEST(BabbleTest, WithinLimitsAndReproducible) {
  const auto arm = armsim::ArmModel::Desk3();
  std::vector<JointRange> limits = {{-1.0, 0.5}, {0.0, 1.0}, {-2.0, 2.0}};
  const Dataset a = BabbleDataset(10, limits, arm, {}, 9);
  const Dataset b = BabbleDataset(10, limits, arm, {}, 9);
  ASSERT_EQ(a.count, 10u);
  EXPECT_EQ(a.q, b.q);
  EXPECT_EQ(a.images, b.images);
  for (std::size_t i = 0; i < a.count; ++i) {
    const BabbleSample s = a.sample(i);
    for (int j = 0; j < 3; ++j) {
      EXPECT_GE(s.q[j], limits[j].lower);
      EXPECT_LE(s.q[j], limits[j].upper);
    }
    EXPECT_EQ(s.image, armsim::Render(arm, s.q, {}));
  }
  EXPECT_NE(BabbleDataset(10, limits, arm, {}, 10).q, a.q);
}

TEST(BabbleTest, RejectsRangeOutsideJointLimits) {
  const auto arm = armsim::ArmModel::Desk3();
  EXPECT_THROW(BabbleDataset(1, {{-3.5, 0}, {0, 1}, {0, 1}}, arm, {}, 1), ConfigError);
  EXPECT_THROW(BabbleDataset(1, {{0, 1}, {0, 1}}, arm, {}, 1), ConfigError);
}

TEST(BabbleTest, PaperScaleConfigAccepted) {
  armsim::CameraOptions camera;
  camera.height = camera.width = 128;
  const Dataset d = BabbleDataset(2, DefaultBabblingRange(3), armsim::ArmModel::Desk3(), camera, 1);
  EXPECT_EQ(d.images.size(), 2u * 128 * 128);
  ModelConfig config;
  config.height = config.width = 128;
  config.latent_dim = 256;
  const GenerativeModel model = MakeModel(config, 1);
  EXPECT_EQ(model.decoder_v.output_shape(), (diffnet::Shape{1, 128, 128}));
  EXPECT_EQ(model.encoder_v.output_shape(), (diffnet::Shape{256}));
  config.height = 48;
  EXPECT_THROW(DefaultArchitecture(config), ConfigError);
}

TEST(MaskTest, IdenticalImagesGiveZeroMask) {
  Dataset d = TinyDataset(5, 1);
  for (std::size_t i = 0; i < d.count; ++i) {
    std::copy_n(d.images.begin(), 16, d.images.begin() + static_cast<std::ptrdiff_t>(i * 16));
  }
  const Tensor mask = ComputeMask(d);
  for (double v : mask.data()) EXPECT_EQ(v, 0.0);
}

TEST(MaskTest, SinglePixelDifference) {
  Dataset d;
  d.count = 2;
  d.joints = 1;
  d.height = 8;
  d.width = 10;
  d.q = {0.0, 0.0};
  d.images.assign(2 * 80, 0.25);
  d.images[80 + 3 * 10 + 7] = 0.75;
  const Tensor mask = ComputeMask(d);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (i == 37) {
      EXPECT_EQ(mask[i], 1.0);
    } else {
      EXPECT_EQ(mask[i], 0.0);
    }
  }
  EXPECT_DOUBLE_EQ(ComputeMask(d, false)[37], 0.0625);
}

TEST(MaskTest, MatchesTwoPassVariance) {
  const Dataset d = BabbleDataset(100, DefaultBabblingRange(3), armsim::ArmModel::Desk3(), {}, 4);
  const Tensor raw = ComputeMask(d, false);
  const Tensor normalized = ComputeMask(d, true);
  std::vector<double> oracle(d.pixels());
  double peak = 0.0;
  for (std::size_t p = 0; p < d.pixels(); ++p) {
    double mean = 0.0;
    for (std::size_t i = 0; i < d.count; ++i) mean += d.images[i * d.pixels() + p];
    mean /= static_cast<double>(d.count);
    double var = 0.0;
    for (std::size_t i = 0; i < d.count; ++i) {
      const double e = d.images[i * d.pixels() + p] - mean;
      var += e * e;
    }
    oracle[p] = var / static_cast<double>(d.count);
    peak = std::max(peak, oracle[p]);
  }
  for (std::size_t p = 0; p < d.pixels(); ++p) {
    EXPECT_NEAR(raw[p], oracle[p], 1e-12);
    EXPECT_NEAR(normalized[p], oracle[p] / peak, 1e-12);
    EXPECT_GE(raw[p], 0.0);
  }
}

TEST(MaskTest, VariancesMatchHandValues) {
  Dataset d = TinyDataset(2, 4);
  d.q = {0.0, 1.0, 2.0, -1.0};
  std::fill(d.images.begin(), d.images.begin() + 16, 0.0);
  std::fill(d.images.begin() + 16, d.images.end(), 0.0);
  d.images[3] = 1.0;
  d.images[16 + 5] = 0.5;
  // Per-pixel variances (1/2)^2 and (1/4)^2, summed.
  EXPECT_DOUBLE_EQ(ImageVariance(d), 0.25 + 0.0625);
  const VectorXd jv = JointVariance(d);
  EXPECT_DOUBLE_EQ(jv[0], 1.0);
  EXPECT_DOUBLE_EQ(jv[1], 1.0);
}

TEST(EncodeTest, ZeroEncodersGiveZeroLatent) {
  GenerativeModel m = MakeModel({}, 1);
  ZeroParams(m.encoder_q);
  ZeroParams(m.encoder_v);
  const VectorXd z = Encode(m, Eigen::Vector3d(0.3, -0.2, 1.0), Tensor::Filled(m.image_shape(), 0.5));
  EXPECT_EQ(z, VectorXd::Zero(8));
}

TEST(EncodeTest, ZeroVisualEncoderIsPureProprioceptive) {
  GenerativeModel m = MakeModel({}, 2);
  ZeroParams(m.encoder_v);
  const Eigen::Vector3d q(0.3, -0.2, 1.0);
  const Tensor image = armsim::Render(armsim::ArmModel::Desk3(), q, {});
  EXPECT_EQ(Encode(m, q, image), ToVector(m.encoder_q.Predict(ToTensor(q))));
}

TEST(EncodeTest, SumOfIndependentEncoders) {
  const GenerativeModel m = MakeModel({}, 3);
  const Eigen::Vector3d q(-0.4, 0.9, 0.1);
  const Tensor image = armsim::Render(armsim::ArmModel::Desk3(), q, {});
  const VectorXd zq = ToVector(m.encoder_q.Predict(ToTensor(q)));
  const VectorXd zv = ToVector(m.encoder_v.Predict(image));
  EXPECT_EQ(Encode(m, q, image), zq + zv);
}

TEST(EncodeTest, ImageContributionIndependentOfJoints) {
  const GenerativeModel m = MakeModel({}, 4);
  const Tensor image = armsim::Render(armsim::ArmModel::Desk3(), Eigen::Vector3d(0.2, 0.2, 0.2), {});
  const Tensor blank(m.image_shape());
  const VectorXd d1 = Encode(m, Eigen::Vector3d(0.0, 0.0, 0.0), image) -
                      Encode(m, Eigen::Vector3d(0.0, 0.0, 0.0), blank);
  const VectorXd d2 = Encode(m, Eigen::Vector3d(1.0, -1.0, 0.5), image) -
                      Encode(m, Eigen::Vector3d(1.0, -1.0, 0.5), blank);
  EXPECT_LT((d1 - d2).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LossTest, PerfectReconstructionWithZeroMask) {
  GenerativeModel m = MakeModel(TinyConfig(), TinyArchitecture(), 1);
  for (auto* net : {&m.encoder_q, &m.encoder_v, &m.decoder_q, &m.decoder_v}) ZeroParams(*net);
  const Tensor q({3, 2});
  const Tensor images({3, 1, 4, 4});
  const LossResult r = MaskedLoss(m, q, images, Tensor({1, 4, 4}));
  EXPECT_EQ(r.terms.total, 0.0);
}

TEST(LossTest, ZeroMaskIsPlainMse) {
  const GenerativeModel m = MakeModel(TinyConfig(), TinyArchitecture(), 2);
  const Dataset d = TinyDataset(5, 3);
  const std::vector<std::size_t> idx = {0, 1, 2, 3, 4};
  const Tensor q = GatherJoints(d, idx), images = GatherImages(d, idx);
  const LossTerms t = EvaluateLoss(m, q, images, Tensor({1, 4, 4}));
  double visual = 0.0, proprio = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    const BabbleSample s = d.sample(i);
    const VectorXd z = Encode(m, s.q, s.image);
    const Tensor sv = DecodeImage(m, z);
    const VectorXd sq = DecodeJoints(m, z);
    for (std::size_t p = 0; p < 16; ++p) visual += std::pow(sv[p] - s.image[p], 2);
    proprio += (sq - s.q).squaredNorm();
  }
  EXPECT_NEAR(t.visual, visual / 80, 1e-14);
  EXPECT_NEAR(t.proprio, proprio / 10, 1e-14);
  EXPECT_NEAR(t.total, visual / 80 + proprio / 10, 1e-14);
}

TEST(LossTest, AugmentedSinglePixel) {
  // 1x1 image, prediction 0.5, mask 1, target 1: (0.5 + 0.5 - 1)^2 = 0
  Architecture a;
  a.encoder_q = {Dense(1, 1, Activation::kIdentity)};
  a.encoder_v = {Dense(1, 1, Activation::kIdentity)};
  a.decoder_q = {Dense(1, 1, Activation::kIdentity)};
  a.decoder_v = {Dense(1, 1, Activation::kTanhRelu, {1, 1, 1})};
  GenerativeModel m = MakeModel({1, 1, 1, 1}, a, 1);
  for (auto* net : {&m.encoder_q, &m.encoder_v, &m.decoder_q, &m.decoder_v}) ZeroParams(*net);
  m.decoder_v.params()[0].bias[0] = std::atanh(0.5);
  m.decoder_q.params()[0].bias[0] = 0.7;
  const LossTerms t = EvaluateLoss(m, Tensor({1, 1}, {0.7}), Tensor({1, 1, 1, 1}, {1.0}),
                                   Tensor({1, 1, 1}, {1.0}));
  EXPECT_NEAR(t.visual, 0.0, 1e-30);
  EXPECT_EQ(t.proprio, 0.0);
}

double LossAt(const GenerativeModel& m, const Tensor& q, const Tensor& images, const Tensor& mask,
              const LossOptions& o) {
  return EvaluateLoss(m, q, images, mask, o).total;
}

TEST(LossTest, GradientsMatchFiniteDifferences) {
  GenerativeModel m = MakeModel(TinyConfig(), TinyArchitecture(), 5);
  const Dataset d = TinyDataset(4, 6);
  const std::vector<std::size_t> idx = {0, 1, 2, 3};
  const Tensor q = GatherJoints(d, idx), images = GatherImages(d, idx);
  const Tensor mask = ComputeMask(d);
  LossOptions options;
  options.kl_weight = 0.3;
  const LossResult r = MaskedLoss(m, q, images, mask, options);
  const std::vector<std::pair<diffnet::Network*, const diffnet::ParamSet*>> nets = {
      {&m.encoder_q, &r.grads.encoder_q}, {&m.encoder_v, &r.grads.encoder_v},
      {&m.decoder_q, &r.grads.decoder_q}, {&m.decoder_v, &r.grads.decoder_v}};
  const double eps = 1e-6;
  int checked = 0;
  for (const auto& [net, grads] : nets) {
    for (std::size_t l = 0; l < net->params().size(); ++l) {
      Tensor& w = net->params()[l].weight;
      for (std::size_t i = 0; i < w.size(); i += 3) {
        const double saved = w[i];
        w[i] = saved + eps;
        const double up = LossAt(m, q, images, mask, options);
        w[i] = saved - eps;
        const double down = LossAt(m, q, images, mask, options);
        w[i] = saved;
        const double numeric = (up - down) / (2 * eps);
        EXPECT_NEAR((*grads)[l].weight[i], numeric, 1e-6 + 1e-4 * std::abs(numeric));
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 30);
}

TEST(LossTest, KlTermOnlyWhenEnabled) {
  const GenerativeModel m = MakeModel(TinyConfig(), TinyArchitecture(), 7);
  const Dataset d = TinyDataset(3, 8);
  const std::vector<std::size_t> idx = {0, 1, 2};
  const Tensor q = GatherJoints(d, idx), images = GatherImages(d, idx);
  const LossTerms off = EvaluateLoss(m, q, images, m.mask);
  EXPECT_EQ(off.kl, 0.0);
  LossOptions on;
  on.kl_weight = 0.5;
  const LossTerms t = EvaluateLoss(m, q, images, m.mask, on);
  EXPECT_GT(t.kl, 0.0);
  EXPECT_NEAR(t.total, off.total + 0.5 * t.kl, 1e-15);
}

TEST(LossTest, NonFiniteInputRejected) {
  const GenerativeModel m = MakeModel(TinyConfig(), TinyArchitecture(), 7);
  Tensor images({1, 1, 4, 4});
  images[5] = std::nan("");
  EXPECT_THROW(MaskedLoss(m, Tensor({1, 2}), images, m.mask), NumericError);
  EXPECT_THROW(MaskedLoss(m, Tensor({2, 2}), Tensor({1, 1, 4, 4}), m.mask), ShapeError);
}

TEST(TrainTest, ZeroEpochsReturnsModelUnchanged) {
  const GenerativeModel m = MakeModel(TinyConfig(), TinyArchitecture(), 1);
  TrainConfig config;
  config.epochs = 0;
  const TrainResult r = Train(m, TinyDataset(20, 1), config);
  EXPECT_TRUE(r.curve.empty());
  EXPECT_EQ(r.model.encoder_v.params(), m.encoder_v.params());
  EXPECT_EQ(r.model.decoder_v.params(), m.decoder_v.params());
}

TEST(TrainTest, ReducesHeldOutLossDeterministically) {
  const GenerativeModel m = MakeModel(TinyConfig(), TinyArchitecture(), 1);
  const Dataset d = TinyDataset(400, 2);
  const Dataset copy = d;
  TrainConfig config;
  config.epochs = 15;
  config.batch_size = 16;
  config.learning_rate = 3e-3;
  config.seed = 4;
  const TrainResult a = Train(m, d, config);
  ASSERT_EQ(a.curve.size(), 15u);
  EXPECT_LT(a.curve.back().heldout_loss, 0.5 * a.initial_heldout_loss);
  EXPECT_EQ(a.heldout_indices.size(), 20u);
  const TrainResult b = Train(m, d, config);
  EXPECT_EQ(a.model.encoder_q.params(), b.model.encoder_q.params());
  EXPECT_EQ(a.model.decoder_v.params(), b.model.decoder_v.params());
  EXPECT_EQ(a.curve.back().heldout_loss, b.curve.back().heldout_loss);
  EXPECT_EQ(d.images, copy.images);
  EXPECT_EQ(a.model.metadata.epochs, 15u);
  EXPECT_EQ(a.model.metadata.final_heldout_loss, a.curve.back().heldout_loss);
  EXPECT_EQ(a.model.mask, ComputeMask(d));
}

TEST(TrainTest, DivergenceAborts) {
  const GenerativeModel m = MakeModel(TinyConfig(), TinyArchitecture(), 1);
  TrainConfig config;
  config.epochs = 1;
  config.divergence_threshold = 1e-12;
  EXPECT_THROW(Train(m, TinyDataset(50, 1), config), NumericError);
}

TEST(PersistenceTest, DatasetRoundTrip) {
  const Dataset d = BabbleDataset(5, DefaultBabblingRange(3), armsim::ArmModel::Desk3(), {}, 3);
  const auto path = TempPath("data.bin");
  SaveDataset(path, d);
  const Dataset back = LoadDataset(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.count, d.count);
  EXPECT_EQ(back.seed, 3u);
  EXPECT_EQ(back.q, d.q);
  EXPECT_EQ(back.images, d.images);
}

TEST(PersistenceTest, ModelRoundTripIsBitExact) {
  GenerativeModel m = MakeModel({}, 11);
  m.mask = Tensor::Filled(m.image_shape(), 0.25);
  m.joint_variance = Eigen::Vector3d(0.1, 0.2, 0.3);
  m.image_variance = 0.05;
  m.metadata.epochs = 30;
  m.metadata.final_heldout_loss = 0.125;
  const auto path = TempPath("model.bin");
  SaveModel(path, m);
  const GenerativeModel back = LoadModel(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.mask, m.mask);
  EXPECT_EQ(back.joint_variance, m.joint_variance);
  EXPECT_EQ(back.metadata.final_heldout_loss, 0.125);
  const Eigen::Vector3d q(0.1, -0.5, 0.9);
  const Tensor image = armsim::Render(armsim::ArmModel::Desk3(), q, {});
  const VectorXd z = Encode(m, q, image);
  EXPECT_EQ(Encode(back, q, image), z);
  EXPECT_EQ(DecodeImage(back, z), DecodeImage(m, z));
  EXPECT_EQ(DecodeJoints(back, z), DecodeJoints(m, z));
}

TEST(PersistenceTest, RejectsWrongFile) {
  const auto path = TempPath("bad.bin");
  SaveDataset(path, TinyDataset(2, 1));
  EXPECT_THROW(LoadModel(path), FormatError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace maif::mvae
