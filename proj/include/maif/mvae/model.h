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

#ifndef MAIF_MVAE_MODEL_H_
#define MAIF_MVAE_MODEL_H_

// The coupled multimodal autoencoder: two encoders whose outputs are summed
// into one latent vector, and two decoders that map it back to joint angles
// and to the camera image.
//
// Model file layout (little-endian), after the four network checkpoints the
// mask and the dataset statistics follow:
//   "MAIFMVAE"  magic
//   u32 version (1)
//   u32 joints, u32 height, u32 width, u32 latent_dim
//   network encoder_q, encoder_v, decoder_q, decoder_v (diffnet checkpoint)
//   f64 mask[height * width]
//   f64 joint_variance[joints], f64 image_variance
//   u64 dataset_size, u64 seed, u32 epochs,
//   f64 initial_heldout_loss, f64 final_train_loss, f64 final_heldout_loss

#include <cstdint>
#include <filesystem>
#include <vector>

#include "maif/diffnet/layer.h"
#include "maif/diffnet/network.h"
#include "maif/mvae/dataset.h"

namespace maif::mvae {

struct ModelConfig {
  int joints = 3;
  int height = 32;
  int width = 32;
  int latent_dim = 8;
};

struct Architecture {
  std::vector<diffnet::LayerSpec> encoder_q;
  std::vector<diffnet::LayerSpec> encoder_v;
  std::vector<diffnet::LayerSpec> decoder_q;
  std::vector<diffnet::LayerSpec> decoder_v;
};

// Layer stacks for square images of side 32 * 2^k. Larger images are
// average-pooled down to 16x16 on the way in and upsampled by the last
// transposed convolution on the way out.
Architecture DefaultArchitecture(const ModelConfig& config);

struct TrainingMetadata {
  std::uint64_t dataset_size = 0;
  std::uint64_t seed = 0;
  std::uint32_t epochs = 0;
  double initial_heldout_loss = 0.0;
  double final_train_loss = 0.0;
  double final_heldout_loss = 0.0;
};

struct GenerativeModel {
  ModelConfig config;
  diffnet::Network encoder_q;
  diffnet::Network encoder_v;
  diffnet::Network decoder_q;  // g_q
  diffnet::Network decoder_v;  // g_v
  diffnet::Tensor mask;        // (1, H, W), zero until trained
  VectorXd joint_variance;     // dataset statistics, default sensory variances
  double image_variance = 1.0;
  TrainingMetadata metadata;

  diffnet::Shape image_shape() const;
  // Throws ShapeError when the networks do not fit the config.
  void Validate() const;
};

GenerativeModel MakeModel(const ModelConfig& config, std::uint64_t seed);
GenerativeModel MakeModel(const ModelConfig& config, const Architecture& arch,
                          std::uint64_t seed);

// z = encoder_q(q) + encoder_v(image).
VectorXd Encode(const GenerativeModel& model, const VectorXd& q, const diffnet::Tensor& image);
VectorXd DecodeJoints(const GenerativeModel& model, const VectorXd& z);
diffnet::Tensor DecodeImage(const GenerativeModel& model, const VectorXd& z);

diffnet::Tensor ToTensor(const VectorXd& v);
VectorXd ToVector(const diffnet::Tensor& t);

void SaveModel(const std::filesystem::path& path, const GenerativeModel& model);
GenerativeModel LoadModel(const std::filesystem::path& path);

}  // namespace maif::mvae

#endif  // MAIF_MVAE_MODEL_H_
