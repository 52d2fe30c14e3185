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

#include "maif/mvae/model.h"

#include <fstream>
#include <string>

#include "maif/binary_io.h"
#include "maif/diffnet/checkpoint.h"
#include "maif/error.h"

namespace maif::mvae {
namespace {

using diffnet::Activation;
using diffnet::AvgPool;
using diffnet::Conv;
using diffnet::Dense;
using diffnet::MaxPool;
using diffnet::TransposedConv;

constexpr char kMagic[] = "MAIFMVAE";
constexpr std::uint32_t kVersion = 1;
constexpr Activation kRelu = Activation::kRelu;
constexpr Activation kLinear = Activation::kIdentity;

}  // namespace

Architecture DefaultArchitecture(const ModelConfig& config) {
  if (config.joints <= 0 || config.latent_dim <= 0) {
    throw ConfigError("joints and latent_dim must be positive");
  }
  const int side = config.height;
  int factor = 1;
  while (32 * factor < side) factor *= 2;
  if (config.width != side || side != 32 * factor) {
    throw ConfigError("default architecture needs square images of side 32 * 2^k, got " +
                      std::to_string(config.height) + "x" + std::to_string(config.width));
  }
  const int j = config.joints;
  const int z = config.latent_dim;
  Architecture a;
  a.encoder_q = {Dense(j, 64, kRelu), Dense(64, 512, kRelu), Dense(512, 256, kRelu, {16, 4, 4}),
                 Conv(16, 1, 2, 1, 0, kRelu), Dense(9, z, kLinear)};
  a.encoder_v = {AvgPool(2 * factor, 2 * factor),
                 Conv(1, 128, 3, 2, 1, kRelu),
                 MaxPool(2, 2),
                 Conv(128, 64, 3, 2, 1, kRelu),
                 Conv(64, 32, 3, 1, 1, kRelu),
                 TransposedConv(32, 32, 3, 1, 1, kRelu),
                 Conv(32, 16, 2, 1, 0, kRelu),
                 TransposedConv(16, 16, 4, 1, 0, kRelu),
                 Conv(16, 1, 2, 1, 0, kRelu),
                 Dense(9, z, kLinear)};
  a.decoder_q = {Dense(z, 128, kRelu), Dense(128, 64, kRelu), Dense(64, j, kLinear)};
  a.decoder_v = {Dense(z, 9, kRelu, {1, 3, 3}),
                 TransposedConv(1, 16, 4, 1, 2, kRelu),
                 TransposedConv(16, 32, 4, 2, 1, kRelu),
                 TransposedConv(32, 16, 4, 2, 1, kRelu),
                 TransposedConv(16, 1, 4 * factor, 4 * factor, 0, Activation::kTanhRelu)};
  return a;
}

diffnet::Shape GenerativeModel::image_shape() const {
  return {1, static_cast<std::size_t>(config.height), static_cast<std::size_t>(config.width)};
}

void GenerativeModel::Validate() const {
  const diffnet::Shape joints{static_cast<std::size_t>(config.joints)};
  const diffnet::Shape latent{static_cast<std::size_t>(config.latent_dim)};
  if (encoder_q.input_shape() != joints || encoder_q.output_shape() != latent) {
    throw ShapeError("encoder_q must map joints to the latent space");
  }
  if (encoder_v.input_shape() != image_shape() || encoder_v.output_shape() != latent) {
    throw ShapeError("encoder_v must map images to the latent space");
  }
  if (decoder_q.input_shape() != latent || decoder_q.output_shape() != joints) {
    throw ShapeError("decoder_q must map the latent space to joints");
  }
  if (decoder_v.input_shape() != latent || decoder_v.output_shape() != image_shape()) {
    throw ShapeError("decoder_v must map the latent space to images");
  }
  if (mask.shape() != image_shape()) throw ShapeError("mask must match the image shape");
  if (joint_variance.size() != config.joints) throw ShapeError("joint variance size mismatch");
}

GenerativeModel MakeModel(const ModelConfig& config, std::uint64_t seed) {
  return MakeModel(config, DefaultArchitecture(config), seed);
}

GenerativeModel MakeModel(const ModelConfig& config, const Architecture& arch,
                          std::uint64_t seed) {
  GenerativeModel m;
  m.config = config;
  const diffnet::Shape joints{static_cast<std::size_t>(config.joints)};
  const diffnet::Shape latent{static_cast<std::size_t>(config.latent_dim)};
  m.encoder_q = diffnet::Network(joints, arch.encoder_q);
  m.encoder_v = diffnet::Network(m.image_shape(), arch.encoder_v);
  m.decoder_q = diffnet::Network(latent, arch.decoder_q);
  m.decoder_v = diffnet::Network(latent, arch.decoder_v);
  m.encoder_q.Initialize(seed);
  m.encoder_v.Initialize(seed + 1);
  m.decoder_q.Initialize(seed + 2);
  m.decoder_v.Initialize(seed + 3);
  m.mask = diffnet::Tensor(m.image_shape());
  m.joint_variance = VectorXd::Ones(config.joints);
  m.Validate();
  return m;
}

diffnet::Tensor ToTensor(const VectorXd& v) {
  return diffnet::Tensor::FromVector(std::vector<double>(v.data(), v.data() + v.size()));
}

VectorXd ToVector(const diffnet::Tensor& t) {
  return Eigen::Map<const VectorXd>(t.data().data(), static_cast<Eigen::Index>(t.size()));
}

VectorXd Encode(const GenerativeModel& model, const VectorXd& q, const diffnet::Tensor& image) {
  return ToVector(model.encoder_q.Predict(ToTensor(q))) +
         ToVector(model.encoder_v.Predict(image));
}

VectorXd DecodeJoints(const GenerativeModel& model, const VectorXd& z) {
  return ToVector(model.decoder_q.Predict(ToTensor(z)));
}

diffnet::Tensor DecodeImage(const GenerativeModel& model, const VectorXd& z) {
  return model.decoder_v.Predict(ToTensor(z));
}

void SaveModel(const std::filesystem::path& path, const GenerativeModel& model) {
  model.Validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write model " + path.string());
  io::WriteMagic(out, std::string_view(kMagic, 8));
  io::Write<std::uint32_t>(out, kVersion);
  io::Write<std::uint32_t>(out, static_cast<std::uint32_t>(model.config.joints));
  io::Write<std::uint32_t>(out, static_cast<std::uint32_t>(model.config.height));
  io::Write<std::uint32_t>(out, static_cast<std::uint32_t>(model.config.width));
  io::Write<std::uint32_t>(out, static_cast<std::uint32_t>(model.config.latent_dim));
  diffnet::WriteNetwork(out, model.encoder_q);
  diffnet::WriteNetwork(out, model.encoder_v);
  diffnet::WriteNetwork(out, model.decoder_q);
  diffnet::WriteNetwork(out, model.decoder_v);
  for (double v : model.mask.data()) io::Write<double>(out, v);
  for (int i = 0; i < model.joint_variance.size(); ++i) io::Write<double>(out, model.joint_variance[i]);
  io::Write<double>(out, model.image_variance);
  const TrainingMetadata& m = model.metadata;
  io::Write<std::uint64_t>(out, m.dataset_size);
  io::Write<std::uint64_t>(out, m.seed);
  io::Write<std::uint32_t>(out, m.epochs);
  io::Write<double>(out, m.initial_heldout_loss);
  io::Write<double>(out, m.final_train_loss);
  io::Write<double>(out, m.final_heldout_loss);
}

GenerativeModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open model " + path.string());
  io::ExpectMagic(in, std::string_view(kMagic, 8));
  const auto version = io::Read<std::uint32_t>(in);
  if (version != kVersion) throw FormatError("unsupported model version " + std::to_string(version));
  GenerativeModel model;
  model.config.joints = static_cast<int>(io::Read<std::uint32_t>(in));
  model.config.height = static_cast<int>(io::Read<std::uint32_t>(in));
  model.config.width = static_cast<int>(io::Read<std::uint32_t>(in));
  model.config.latent_dim = static_cast<int>(io::Read<std::uint32_t>(in));
  model.encoder_q = diffnet::ReadNetwork(in);
  model.encoder_v = diffnet::ReadNetwork(in);
  model.decoder_q = diffnet::ReadNetwork(in);
  model.decoder_v = diffnet::ReadNetwork(in);
  model.mask = diffnet::Tensor(model.image_shape());
  for (double& v : model.mask.data()) v = io::Read<double>(in);
  model.joint_variance.resize(model.config.joints);
  for (int i = 0; i < model.config.joints; ++i) model.joint_variance[i] = io::Read<double>(in);
  model.image_variance = io::Read<double>(in);
  TrainingMetadata& m = model.metadata;
  m.dataset_size = io::Read<std::uint64_t>(in);
  m.seed = io::Read<std::uint64_t>(in);
  m.epochs = io::Read<std::uint32_t>(in);
  m.initial_heldout_loss = io::Read<double>(in);
  m.final_train_loss = io::Read<double>(in);
  m.final_heldout_loss = io::Read<double>(in);
  try {
    model.Validate();
  } catch (const ShapeError& e) {
    throw FormatError(std::string("model file is inconsistent: ") + e.what());
  }
  return model;
}

}  // namespace maif::mvae
