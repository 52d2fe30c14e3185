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

#ifndef MAIF_ARMSIM_RENDER_H_
#define MAIF_ARMSIM_RENDER_H_

#include <filesystem>
#include <vector>

#include "maif/armsim/arm.h"
#include "maif/diffnet/tensor.h"

namespace maif::armsim {

// Fixed orthographic camera looking at the arm's plane. The base sits at the
// image centre with +x (up) toward row 0 and +y toward column 0; the fully
// extended arm spans `span` of the image width.
struct CameraOptions {
  int height = 32;
  int width = 32;
  double span = 0.9;
  // Half thickness of each drawn link as a fraction of the image width;
  // the last value repeats for longer chains.
  std::vector<double> half_widths = {0.040, 0.032, 0.025};
};

struct PixelMap {
  double scale;  // pixels per metre
  double center_row;
  double center_col;
};

PixelMap CameraMapping(const ArmModel& model, const CameraOptions& camera);
double LinkHalfWidthPixels(const CameraOptions& camera, int link);

// Grayscale image (1, H, W) in [0, 1]. Each link is a thick segment whose
// intensity ramps linearly from 1 to 0 over one pixel around its edge; links
// combine by maximum. Deterministic and total.
diffnet::Tensor Render(const ArmModel& model, const VectorXd& q,
                       const CameraOptions& camera);

// Binary PGM (P5), 8-bit, values scaled from [0, 1].
void WritePgm(const std::filesystem::path& path, const diffnet::Tensor& image);
diffnet::Tensor ReadPgm(const std::filesystem::path& path);

}  // namespace maif::armsim

#endif  // MAIF_ARMSIM_RENDER_H_
