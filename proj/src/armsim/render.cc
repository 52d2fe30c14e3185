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

#include "maif/armsim/render.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "maif/error.h"

namespace maif::armsim {

PixelMap CameraMapping(const ArmModel& model, const CameraOptions& camera) {
  const double scale = camera.span * camera.width / (2.0 * model.reach());
  return {scale, 0.5 * camera.height, 0.5 * camera.width};
}

double LinkHalfWidthPixels(const CameraOptions& camera, int link) {
  const auto& hw = camera.half_widths;
  const double frac = hw.empty() ? 0.03 : hw[std::min<std::size_t>(link, hw.size() - 1)];
  return frac * camera.width;
}

namespace {

// Distance from p to the segment [a, b] by clamped projection.
double SegmentDistance(const Vector2d& p, const Vector2d& a, const Vector2d& b) {
  const Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

}  // namespace

diffnet::Tensor Render(const ArmModel& model, const VectorXd& q, const CameraOptions& camera) {
  if (camera.height < 1 || camera.width < 1) throw ConfigError("camera size must be positive");
  const PixelMap map = CameraMapping(model, camera);
  const std::vector<Vector2d> joints = JointPositions(model, q);
  // Segment endpoints in (row, col) pixel coordinates; pixel centres sit at
  // integer + 0.5.
  std::vector<Vector2d> px;
  px.reserve(joints.size());
  for (const Vector2d& p : joints) {
    px.emplace_back(map.center_row - map.scale * p.x(), map.center_col - map.scale * p.y());
  }
  diffnet::Tensor image({1, static_cast<std::size_t>(camera.height),
                         static_cast<std::size_t>(camera.width)});
  for (int link = 0; link < model.dof(); ++link) {
    const double hw = LinkHalfWidthPixels(camera, link);
    const Vector2d& a = px[static_cast<std::size_t>(link)];
    const Vector2d& b = px[static_cast<std::size_t>(link) + 1];
    const int r0 = std::max(0, static_cast<int>(std::floor(std::min(a.x(), b.x()) - hw - 1.0)));
    const int r1 = std::min(camera.height - 1, static_cast<int>(std::ceil(std::max(a.x(), b.x()) + hw + 1.0)));
    const int c0 = std::max(0, static_cast<int>(std::floor(std::min(a.y(), b.y()) - hw - 1.0)));
    const int c1 = std::min(camera.width - 1, static_cast<int>(std::ceil(std::max(a.y(), b.y()) + hw + 1.0)));
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        const double d = SegmentDistance(Vector2d(r + 0.5, c + 0.5), a, b);
        const double v = std::clamp(hw + 0.5 - d, 0.0, 1.0);
        double& pixel = image[static_cast<std::size_t>(r * camera.width + c)];
        pixel = std::max(pixel, v);
      }
    }
  }
  return image;
}

void WritePgm(const std::filesystem::path& path, const diffnet::Tensor& image) {
  const auto& s = image.shape();
  if (s.size() != 3 || s[0] != 1) throw ShapeError("PGM export needs a (1, H, W) image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << "P5\n" << s[2] << " " << s[1] << "\n255\n";
  for (double v : image.data()) {
    const auto byte = static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    out.put(static_cast<char>(byte));
  }
  if (!out) throw FormatError("failed writing " + path.string());
}

diffnet::Tensor ReadPgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string magic;
  std::size_t width = 0, height = 0, maxval = 0;
  in >> magic >> width >> height >> maxval;
  if (magic != "P5" || width == 0 || height == 0 || maxval == 0 || maxval > 255) {
    throw FormatError("not an 8-bit binary PGM: " + path.string());
  }
  in.get();
  diffnet::Tensor image({1, height, width});
  for (double& v : image.data()) {
    const int byte = in.get();
    if (byte == EOF) throw FormatError("truncated PGM: " + path.string());
    v = static_cast<double>(byte) / static_cast<double>(maxval);
  }
  return image;
}

}  // namespace maif::armsim
