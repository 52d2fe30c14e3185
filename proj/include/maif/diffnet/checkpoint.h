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

#ifndef MAIF_DIFFNET_CHECKPOINT_H_
#define MAIF_DIFFNET_CHECKPOINT_H_

// Network checkpoint layout (all integers and floats little-endian):
//
//   "MAIFNET\0"                 magic, 8 bytes
//   u32 version                 currently 1
//   u32 rank, u64 dims[rank]    input shape
//   u32 layer_count
//   per layer: i32 kind, in, out, kernel, stride, padding, activation,
//              u32 view_rank, u64 view[view_rank],
//              u64 weight_count, u64 bias_count
//   per layer: f64 weights[weight_count], f64 biases[bias_count]
//
// Loading rebuilds the network from the spec table and rejects parameter
// counts that disagree with it.

#include <filesystem>
#include <istream>
#include <ostream>

#include "maif/diffnet/network.h"

namespace maif::diffnet {

inline constexpr std::uint32_t kCheckpointVersion = 1;

void WriteNetwork(std::ostream& out, const Network& net);
Network ReadNetwork(std::istream& in);

void SaveNetwork(const std::filesystem::path& path, const Network& net);
Network LoadNetwork(const std::filesystem::path& path);

}  // namespace maif::diffnet

#endif  // MAIF_DIFFNET_CHECKPOINT_H_
