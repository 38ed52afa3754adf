// Copyright 2026 The Fuseplan Authors
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

#ifndef FUSEPLAN_ERRORS_H_
#define FUSEPLAN_ERRORS_H_

#include <optional>
#include <stdexcept>
#include <string>

namespace fuseplan {

// Base class for every error raised by the library. Solver outcomes such as
// "no feasible setting" are values (std::nullopt), never exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing, unknown or mistyped field in a model document.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Semantically invalid value. Carries the offending layer when there is one.
class ValueError : public Error {
 public:
  explicit ValueError(const std::string& what,
                      std::optional<int> layer_index = std::nullopt)
      : Error(what), layer_index_(layer_index) {}

  std::optional<int> layer_index() const { return layer_index_; }

 private:
  std::optional<int> layer_index_;
};

class UnsupportedKind : public Error {
 public:
  using Error::Error;
};

// A tensor dimension would drop below one, or a tile does not fit its input.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class NotFusible : public Error {
 public:
  using Error::Error;
};

// Operation applied to a layer kind it does not support.
class KindError : public Error {
 public:
  using Error::Error;
};

// Exhaustive enumeration requested beyond the size guard.
class TooLarge : public Error {
 public:
  using Error::Error;
};

// A fusion setting that does not tile the layer chain of its model.
class InvalidSetting : public Error {
 public:
  using Error::Error;
};

class NoPath : public Error {
 public:
  using Error::Error;
};

}  // namespace fuseplan

#endif  // FUSEPLAN_ERRORS_H_
