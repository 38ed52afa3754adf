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

// Network description: a chain of layers over an input tensor, plus the JSON
// document format used to ship models to the planner.
//
// Document schema (unknown keys are rejected at every level):
//
//   { "name": str,
//     "input": {"h": int, "w": int, "c": int},
//     "element_bytes": int,            // optional, default 1
//     "layers": [ {"kind": "conv2d" | "dwconv2d" | "maxpool2d" |
//                          "avgpool2d" | "global_pool" | "dense",
//                  "k": int, "s": int, "p": int,   // optional: 1, 1, 0
//                  "c_in": int, "c_out": int} ] }

#ifndef FUSEPLAN_MODEL_IR_H_
#define FUSEPLAN_MODEL_IR_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fuseplan {

enum class LayerKind {
  kConv2d,
  kDwConv2d,
  kMaxPool2d,
  kAvgPool2d,
  kGlobalPool,
  kDense,
};

std::string_view KindName(LayerKind kind);
std::optional<LayerKind> KindFromName(std::string_view name);

// Height x width x channels, HWC. Dense vectors are 1 x 1 x length.
struct TensorShape {
  int height = 1;
  int width = 1;
  int channels = 1;

  std::int64_t elements() const {
    return std::int64_t{height} * width * channels;
  }
  friend bool operator==(const TensorShape&, const TensorShape&) = default;
};

std::string ToString(const TensorShape& shape);

struct LayerSpec {
  LayerKind kind = LayerKind::kConv2d;
  // Square kernel edge. For global pooling 0 means "whole input", which is
  // the only value a document may leave implicit.
  int kernel = 1;
  int stride = 1;
  int padding = 0;
  int in_channels = 1;
  int out_channels = 1;

  // Only sliding-window operators can join a fusion block. Global pooling and
  // dense layers always run as iterative sinks.
  bool fusible() const {
    return kind != LayerKind::kGlobalPool && kind != LayerKind::kDense;
  }
  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct NetworkModel {
  std::string name;
  TensorShape input_shape;
  std::vector<LayerSpec> layers;
  int element_bytes = 1;

  friend bool operator==(const NetworkModel&, const NetworkModel&) = default;
};

// floor((in + 2p - k) / s) + 1. Throws ShapeError when the result is < 1.
int SlidingOutputSize(int in, int kernel, int stride, int padding);

// Shape produced by one layer. Throws ShapeError on underflow and for dense
// layers fed a tensor with spatial extent other than 1 x 1.
TensorShape LayerOutputShape(const LayerSpec& layer, const TensorShape& in);

// Element 0 is the model input, element i + 1 the output of layer i.
std::vector<TensorShape> InferShapes(const NetworkModel& model);

std::int64_t TensorBytes(const TensorShape& shape, int element_bytes);

// Checks every structural invariant: positive dimensions, per-kind parameter
// rules, channel chaining and shape feasibility. Errors name the layer index
// (0-based, as it appears in the "layers" array).
void Validate(const NetworkModel& model);

NetworkModel ParseModel(std::string_view text);
NetworkModel LoadModel(const std::filesystem::path& path);
// Canonical document with k/s/p written out (except an implicit global
// pooling kernel). ParseModel(SerializeModel(m))
// == m for every valid model.
std::string SerializeModel(const NetworkModel& model);

}  // namespace fuseplan

#endif  // FUSEPLAN_MODEL_IR_H_
