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

#include "maif/diffnet/checkpoint.h"

#include <fstream>
#include <string>
#include <string_view>

#include "maif/binary_io.h"
#include "maif/error.h"

namespace maif::diffnet {
namespace {

constexpr std::string_view kMagic("MAIFNET\0", 8);

void WriteShape(std::ostream& out, const Shape& shape) {
  io::Write<std::uint32_t>(out, static_cast<std::uint32_t>(shape.size()));
  for (std::size_t d : shape) io::Write<std::uint64_t>(out, d);
}

Shape ReadShape(std::istream& in) {
  const auto rank = io::Read<std::uint32_t>(in);
  if (rank > 8) throw FormatError("checkpoint shape rank too large");
  Shape shape(rank);
  for (auto& d : shape) d = static_cast<std::size_t>(io::Read<std::uint64_t>(in));
  return shape;
}

void WriteValues(std::ostream& out, const Tensor& t) {
  for (double v : t.data()) io::Write<double>(out, v);
}

void ReadValues(std::istream& in, Tensor& t) {
  for (double& v : t.data()) v = io::Read<double>(in);
}

}  // namespace

void WriteNetwork(std::ostream& out, const Network& net) {
  io::WriteMagic(out, kMagic);
  io::Write<std::uint32_t>(out, kCheckpointVersion);
  WriteShape(out, net.input_shape());
  io::Write<std::uint32_t>(out, static_cast<std::uint32_t>(net.layers().size()));
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    const LayerSpec& s = net.layers()[i];
    for (int v : {static_cast<int>(s.kind), s.in_channels, s.out_channels, s.kernel,
                  s.stride, s.padding, static_cast<int>(s.activation)}) {
      io::Write<std::int32_t>(out, v);
    }
    WriteShape(out, s.output_view);
    io::Write<std::uint64_t>(out, net.params()[i].weight.size());
    io::Write<std::uint64_t>(out, net.params()[i].bias.size());
  }
  for (const auto& p : net.params()) {
    WriteValues(out, p.weight);
    WriteValues(out, p.bias);
  }
}

Network ReadNetwork(std::istream& in) {
  io::ExpectMagic(in, kMagic);
  const auto version = io::Read<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  Shape input = ReadShape(in);
  const auto count = io::Read<std::uint32_t>(in);
  if (count == 0 || count > 4096) throw FormatError("bad layer count");
  std::vector<LayerSpec> layers(count);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> sizes(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    LayerSpec& s = layers[i];
    const auto kind = io::Read<std::int32_t>(in);
    if (kind < 0 || kind > static_cast<int>(LayerKind::kAvgPool)) {
      throw FormatError("unknown layer kind in checkpoint");
    }
    s.kind = static_cast<LayerKind>(kind);
    s.in_channels = io::Read<std::int32_t>(in);
    s.out_channels = io::Read<std::int32_t>(in);
    s.kernel = io::Read<std::int32_t>(in);
    s.stride = io::Read<std::int32_t>(in);
    s.padding = io::Read<std::int32_t>(in);
    const auto act = io::Read<std::int32_t>(in);
    if (act < 0 || act > static_cast<int>(Activation::kTanhRelu)) {
      throw FormatError("unknown activation in checkpoint");
    }
    s.activation = static_cast<Activation>(act);
    s.output_view = ReadShape(in);
    sizes[i].first = io::Read<std::uint64_t>(in);
    sizes[i].second = io::Read<std::uint64_t>(in);
  }
  Network net;
  try {
    net = Network(std::move(input), std::move(layers));
  } catch (const ShapeError& e) {
    throw FormatError(std::string("checkpoint layer table is inconsistent: ") + e.what());
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    LayerParams& p = net.params()[i];
    if (sizes[i].first != p.weight.size() || sizes[i].second != p.bias.size()) {
      throw FormatError("checkpoint parameter count mismatch in layer " + std::to_string(i));
    }
  }
  for (auto& p : net.params()) {
    ReadValues(in, p.weight);
    ReadValues(in, p.bias);
  }
  return net;
}

void SaveNetwork(const std::filesystem::path& path, const Network& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  WriteNetwork(out, net);
}

Network LoadNetwork(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return ReadNetwork(in);
}

}  // namespace maif::diffnet
