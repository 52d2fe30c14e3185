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

#include "maif/mvae/dataset.h"

#include <algorithm>
#include <fstream>
#include <random>
#include <string>

#include "maif/binary_io.h"
#include "maif/error.h"

namespace maif::mvae {
namespace {

constexpr char kMagic[] = "MAIFDATA";
constexpr std::uint32_t kVersion = 1;

}  // namespace

BabbleSample Dataset::sample(std::size_t i) const {
  if (i >= count) throw ShapeError("dataset index out of range");
  BabbleSample s;
  s.q = Eigen::Map<const VectorXd>(q.data() + i * joints, joints);
  const std::size_t p = pixels();
  s.image = diffnet::Tensor({1, static_cast<std::size_t>(height), static_cast<std::size_t>(width)},
                            std::vector<double>(images.begin() + static_cast<std::ptrdiff_t>(i * p),
                                                images.begin() + static_cast<std::ptrdiff_t>((i + 1) * p)));
  return s;
}

void Dataset::Validate() const {
  if (joints <= 0 || height <= 0 || width <= 0) throw FormatError("dataset has empty dimensions");
  if (q.size() != count * static_cast<std::size_t>(joints) || images.size() != count * pixels()) {
    throw FormatError("dataset arrays do not match its header");
  }
}

std::vector<JointRange> DefaultBabblingRange(int joints) {
  return std::vector<JointRange>(static_cast<std::size_t>(joints), JointRange{});
}

Dataset BabbleDataset(std::size_t n, const std::vector<JointRange>& limits,
                      const armsim::ArmModel& arm, const armsim::CameraOptions& camera,
                      std::uint64_t seed) {
  arm.Validate();
  if (static_cast<int>(limits.size()) != arm.dof()) {
    throw ConfigError("babbling range needs one entry per joint");
  }
  for (std::size_t j = 0; j < limits.size(); ++j) {
    const armsim::Joint& joint = arm.joints[j];
    if (!(limits[j].lower < limits[j].upper) || limits[j].lower < joint.lower ||
        limits[j].upper > joint.upper) {
      throw ConfigError("babbling range of joint " + std::to_string(j) +
                        " is empty or outside the joint limits");
    }
  }
  Dataset data;
  data.count = n;
  data.joints = arm.dof();
  data.height = camera.height;
  data.width = camera.width;
  data.seed = seed;
  data.q.resize(n * static_cast<std::size_t>(data.joints));
  data.images.resize(n * data.pixels());
  std::mt19937_64 rng(seed);
  VectorXd q(data.joints);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < data.joints; ++j) {
      const JointRange& r = limits[static_cast<std::size_t>(j)];
      q[j] = std::uniform_real_distribution<double>(r.lower, r.upper)(rng);
      data.q[i * data.joints + j] = q[j];
    }
    const diffnet::Tensor image = armsim::Render(arm, q, camera);
    std::copy(image.data().begin(), image.data().end(),
              data.images.begin() + static_cast<std::ptrdiff_t>(i * data.pixels()));
  }
  return data;
}

diffnet::Tensor ComputeMask(const Dataset& data, bool normalize) {
  if (data.count == 0) throw ConfigError("cannot compute a mask from an empty dataset");
  const std::size_t p = data.pixels();
  // Welford's running update per pixel.
  std::vector<double> mean(p, 0.0), m2(p, 0.0);
  for (std::size_t i = 0; i < data.count; ++i) {
    const double* img = data.images.data() + i * p;
    const double k = static_cast<double>(i + 1);
    for (std::size_t j = 0; j < p; ++j) {
      const double delta = img[j] - mean[j];
      mean[j] += delta / k;
      m2[j] += delta * (img[j] - mean[j]);
    }
  }
  diffnet::Tensor mask({1, static_cast<std::size_t>(data.height), static_cast<std::size_t>(data.width)});
  double peak = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    mask[j] = std::max(0.0, m2[j] / static_cast<double>(data.count));
    peak = std::max(peak, mask[j]);
  }
  if (normalize && peak > 0.0) {
    for (double& v : mask.data()) v /= peak;
  }
  return mask;
}

VectorXd JointVariance(const Dataset& data) {
  if (data.count == 0) throw ConfigError("empty dataset");
  const Eigen::Map<const Eigen::MatrixXd> q(data.q.data(), data.joints,
                                            static_cast<Eigen::Index>(data.count));
  const VectorXd mean = q.rowwise().mean();
  return (q.colwise() - mean).rowwise().squaredNorm() / static_cast<double>(data.count);
}

double ImageVariance(const Dataset& data) {
  if (data.count == 0) throw ConfigError("empty dataset");
  const Eigen::Map<const Eigen::MatrixXd> v(data.images.data(),
                                            static_cast<Eigen::Index>(data.pixels()),
                                            static_cast<Eigen::Index>(data.count));
  const VectorXd mean = v.rowwise().mean();
  return (v.colwise() - mean).squaredNorm() / static_cast<double>(data.count);
}

diffnet::Tensor GatherJoints(const Dataset& data, std::span<const std::size_t> indices) {
  diffnet::Tensor out({indices.size(), static_cast<std::size_t>(data.joints)});
  const std::size_t j = static_cast<std::size_t>(data.joints);
  for (std::size_t b = 0; b < indices.size(); ++b) {
    if (indices[b] >= data.count) throw ShapeError("dataset index out of range");
    std::copy_n(data.q.begin() + static_cast<std::ptrdiff_t>(indices[b] * j), j,
                out.data().begin() + static_cast<std::ptrdiff_t>(b * j));
  }
  return out;
}

diffnet::Tensor GatherImages(const Dataset& data, std::span<const std::size_t> indices) {
  const std::size_t p = data.pixels();
  diffnet::Tensor out({indices.size(), 1, static_cast<std::size_t>(data.height),
                       static_cast<std::size_t>(data.width)});
  for (std::size_t b = 0; b < indices.size(); ++b) {
    if (indices[b] >= data.count) throw ShapeError("dataset index out of range");
    std::copy_n(data.images.begin() + static_cast<std::ptrdiff_t>(indices[b] * p), p,
                out.data().begin() + static_cast<std::ptrdiff_t>(b * p));
  }
  return out;
}

void SaveDataset(const std::filesystem::path& path, const Dataset& data) {
  data.Validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write dataset " + path.string());
  io::WriteMagic(out, std::string_view(kMagic, 8));
  io::Write<std::uint32_t>(out, kVersion);
  io::Write<std::uint64_t>(out, data.count);
  io::Write<std::uint32_t>(out, static_cast<std::uint32_t>(data.joints));
  io::Write<std::uint32_t>(out, static_cast<std::uint32_t>(data.height));
  io::Write<std::uint32_t>(out, static_cast<std::uint32_t>(data.width));
  io::Write<std::uint64_t>(out, data.seed);
  const std::size_t p = data.pixels();
  for (std::size_t i = 0; i < data.count; ++i) {
    for (int j = 0; j < data.joints; ++j) io::Write<double>(out, data.q[i * data.joints + j]);
    for (std::size_t k = 0; k < p; ++k) io::Write<double>(out, data.images[i * p + k]);
  }
}

Dataset LoadDataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open dataset " + path.string());
  io::ExpectMagic(in, std::string_view(kMagic, 8));
  const auto version = io::Read<std::uint32_t>(in);
  if (version != kVersion) throw FormatError("unsupported dataset version " + std::to_string(version));
  Dataset data;
  data.count = io::Read<std::uint64_t>(in);
  data.joints = static_cast<int>(io::Read<std::uint32_t>(in));
  data.height = static_cast<int>(io::Read<std::uint32_t>(in));
  data.width = static_cast<int>(io::Read<std::uint32_t>(in));
  data.seed = io::Read<std::uint64_t>(in);
  if (data.joints <= 0 || data.height <= 0 || data.width <= 0) {
    throw FormatError("dataset header has empty dimensions");
  }
  const std::size_t p = data.pixels();
  data.q.resize(data.count * static_cast<std::size_t>(data.joints));
  data.images.resize(data.count * p);
  for (std::size_t i = 0; i < data.count; ++i) {
    for (int j = 0; j < data.joints; ++j) data.q[i * data.joints + j] = io::Read<double>(in);
    for (std::size_t k = 0; k < p; ++k) data.images[i * p + k] = io::Read<double>(in);
  }
  return data;
}

}  // namespace maif::mvae
