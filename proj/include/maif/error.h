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

#ifndef MAIF_ERROR_H_
#define MAIF_ERROR_H_

#include <stdexcept>
#include <string>

namespace maif {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor or layer shapes that do not compose.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf encountered, divergence, or a simulation that blew up.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A gradient tape was reused or paired with the wrong network.
class TapeError : public Error {
 public:
  using Error::Error;
};

// Malformed checkpoint, dataset, or image file.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace maif

#endif  // MAIF_ERROR_H_
