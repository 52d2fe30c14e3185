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

#ifndef MAIF_DIFFNET_TENSOR_H_
#define MAIF_DIFFNET_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace maif::diffnet {

using Shape = std::vector<std::size_t>;

std::size_t NumElements(const Shape& shape);
std::string ToString(const Shape& shape);

// Dense row-major array of doubles with a fixed shape. Images are stored as
// (channels, height, width); batches prepend a leading batch extent.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor FromVector(std::vector<double> values);
  static Tensor Filled(Shape shape, double value);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  bool AllFinite() const;

  // Same data, new shape with the same element count.
  Tensor Reshaped(Shape shape) const;

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double scale);

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);
Tensor operator*(double scale, Tensor a);

double Dot(const Tensor& a, const Tensor& b);
double SquaredNorm(const Tensor& a);

}  // namespace maif::diffnet

#endif  // MAIF_DIFFNET_TENSOR_H_
