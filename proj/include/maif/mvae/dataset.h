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

#ifndef MAIF_MVAE_DATASET_H_
#define MAIF_MVAE_DATASET_H_

// Motor-babbling data: joint configurations paired with the camera image the
// renderer produces for them.
//
// Dataset file layout (little-endian):
//   "MAIFDATA"  magic
//   u32 version (1)
//   u64 count, u32 joints, u32 height, u32 width, u64 seed
//   count records of f64 q[joints] followed by f64 image[height * width]

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "maif/armsim/arm.h"
#include "maif/armsim/render.h"
#include "maif/diffnet/tensor.h"

namespace maif::mvae {

using armsim::VectorXd;

struct JointRange {
  double lower = -1.5;
  double upper = 1.5;
};

struct BabbleSample {
  VectorXd q;
  diffnet::Tensor image;  // (1, H, W)
};

// Samples stored contiguously so that batches are cheap to gather.
struct Dataset {
  std::size_t count = 0;
  int joints = 0;
  int height = 0;
  int width = 0;
  std::uint64_t seed = 0;
  std::vector<double> q;       // count * joints
  std::vector<double> images;  // count * height * width

  std::size_t pixels() const { return static_cast<std::size_t>(height) * width; }
  BabbleSample sample(std::size_t i) const;
  void Validate() const;
};

std::vector<JointRange> DefaultBabblingRange(int joints);

// n samples with q uniform inside `limits` and image = Render(q). Throws
// ConfigError when a range leaves the arm's joint limits.
Dataset BabbleDataset(std::size_t n, const std::vector<JointRange>& limits,
                      const armsim::ArmModel& arm, const armsim::CameraOptions& camera,
                      std::uint64_t seed);

// Per-pixel population variance over the dataset, (1, H, W). With
// `normalize` the maximum becomes 1 (an all-constant dataset stays zero).
diffnet::Tensor ComputeMask(const Dataset& data, bool normalize = true);

// Population variance of each joint coordinate.
VectorXd JointVariance(const Dataset& data);
// Total population variance of the images as vectors, E|I - mean(I)|^2,
// i.e. the sum of the per-pixel variances.
double ImageVariance(const Dataset& data);

// Batch tensors (B, joints) and (B, 1, H, W) for the given sample indices.
diffnet::Tensor GatherJoints(const Dataset& data, std::span<const std::size_t> indices);
diffnet::Tensor GatherImages(const Dataset& data, std::span<const std::size_t> indices);

void SaveDataset(const std::filesystem::path& path, const Dataset& data);
Dataset LoadDataset(const std::filesystem::path& path);

}  // namespace maif::mvae

#endif  // MAIF_MVAE_DATASET_H_
