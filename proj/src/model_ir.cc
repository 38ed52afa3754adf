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

#include "fuseplan/model_ir.h"

#include <array>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "fuseplan/errors.h"
#include "json.hpp"

namespace fuseplan {
namespace {

using json = nlohmann::ordered_json;

constexpr std::array<std::pair<LayerKind, std::string_view>, 6> kKindNames = {{
    {LayerKind::kConv2d, "conv2d"},
    {LayerKind::kDwConv2d, "dwconv2d"},
    {LayerKind::kMaxPool2d, "maxpool2d"},
    {LayerKind::kAvgPool2d, "avgpool2d"},
    {LayerKind::kGlobalPool, "global_pool"},
    {LayerKind::kDense, "dense"},
}};

std::string LayerTag(int index) { return "layer " + std::to_string(index); }

void RejectUnknownKeys(const json& object, const std::set<std::string>& known,
                       const std::string& where) {
  for (const auto& item : object.items()) {
    if (!known.contains(item.key())) {
      throw SchemaError(where + ": unknown field '" + item.key() + "'");
    }
  }
}

const json& Require(const json& object, const std::string& key,
                    const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw SchemaError(where + ": missing field '" + key + "'");
  }
  return *it;
}

int AsInt(const json& value, const std::string& key, const std::string& where) {
  if (!value.is_number_integer()) {
    throw SchemaError(where + ": field '" + key + "' must be an integer");
  }
  const auto v = value.get<std::int64_t>();
  if (v < -(1LL << 30) || v > (1LL << 30)) {
    throw ValueError(where + ": field '" + key + "' out of range");
  }
  return static_cast<int>(v);
}

int RequireInt(const json& object, const std::string& key,
               const std::string& where) {
  return AsInt(Require(object, key, where), key, where);
}

std::optional<int> OptionalInt(const json& object, const std::string& key,
                               const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) return std::nullopt;
  return AsInt(*it, key, where);
}

LayerSpec ParseLayer(const json& node, int index) {
  const std::string where = LayerTag(index);
  if (!node.is_object()) throw SchemaError(where + ": expected an object");
  RejectUnknownKeys(node, {"kind", "k", "s", "p", "c_in", "c_out"}, where);
  const json& kind_node = Require(node, "kind", where);
  if (!kind_node.is_string()) {
    throw SchemaError(where + ": field 'kind' must be a string");
  }
  const auto kind = KindFromName(kind_node.get<std::string>());
  if (!kind) {
    throw UnsupportedKind(where + ": unsupported layer kind '" +
                          kind_node.get<std::string>() + "'");
  }
  LayerSpec layer;
  layer.kind = *kind;
  layer.kernel = OptionalInt(node, "k", where)
                     .value_or(*kind == LayerKind::kGlobalPool ? 0 : 1);
  layer.stride = OptionalInt(node, "s", where).value_or(1);
  layer.padding = OptionalInt(node, "p", where).value_or(0);
  layer.in_channels = RequireInt(node, "c_in", where);
  layer.out_channels = RequireInt(node, "c_out", where);
  return layer;
}

void ValidateLayer(const LayerSpec& layer, int index) {
  const std::string where = LayerTag(index);
  if (layer.in_channels < 1 || layer.out_channels < 1) {
    throw ValueError(where + ": channel counts must be positive", index);
  }
  if (layer.stride < 1) {
    throw ValueError(where + ": stride must be positive", index);
  }
  if (layer.padding < 0) {
    throw ValueError(where + ": padding must be non-negative", index);
  }
  switch (layer.kind) {
    case LayerKind::kDense:
      if (layer.kernel != 1 || layer.stride != 1 || layer.padding != 0) {
        throw ValueError(where + ": dense layers take no k/s/p", index);
      }
      return;
    case LayerKind::kGlobalPool:
      if (layer.kernel < 0 || layer.stride != 1 || layer.padding != 0) {
        throw ValueError(where + ": global pooling takes no s/p", index);
      }
      if (layer.in_channels != layer.out_channels) {
        throw ValueError(where + ": global pooling keeps its channel count",
                         index);
      }
      return;
    case LayerKind::kDwConv2d:
    case LayerKind::kMaxPool2d:
    case LayerKind::kAvgPool2d:
      if (layer.in_channels != layer.out_channels) {
        throw ValueError(where + ": " + std::string(KindName(layer.kind)) +
                             " requires c_in == c_out",
                         index);
      }
      [[fallthrough]];
    case LayerKind::kConv2d:
      if (layer.kernel < 1) {
        throw ValueError(where + ": kernel must be positive", index);
      }
      if (layer.padding >= layer.kernel) {
        throw ValueError(where + ": padding must be smaller than the kernel",
                         index);
      }
      return;
  }
}

}  // namespace

std::string_view KindName(LayerKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<LayerKind> KindFromName(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string ToString(const TensorShape& shape) {
  return std::to_string(shape.height) + "x" + std::to_string(shape.width) +
         "x" + std::to_string(shape.channels);
}

int SlidingOutputSize(int in, int kernel, int stride, int padding) {
  const int span = in + 2 * padding - kernel;
  if (span < 0) {
    throw ShapeError("window of " + std::to_string(kernel) +
                     " does not fit input extent " + std::to_string(in) +
                     " with padding " + std::to_string(padding));
  }
  return span / stride + 1;
}

TensorShape LayerOutputShape(const LayerSpec& layer, const TensorShape& in) {
  switch (layer.kind) {
    case LayerKind::kGlobalPool:
      return {1, 1, layer.out_channels};
    case LayerKind::kDense:
      if (in.height != 1 || in.width != 1) {
        throw ShapeError("dense layer needs a 1x1 spatial input, got " +
                         ToString(in));
      }
      return {1, 1, layer.out_channels};
    default:
      return {SlidingOutputSize(in.height, layer.kernel, layer.stride,
                                layer.padding),
              SlidingOutputSize(in.width, layer.kernel, layer.stride,
                                layer.padding),
              layer.out_channels};
  }
}

std::vector<TensorShape> InferShapes(const NetworkModel& model) {
  std::vector<TensorShape> shapes;
  shapes.reserve(model.layers.size() + 1);
  shapes.push_back(model.input_shape);
  for (size_t i = 0; i < model.layers.size(); ++i) {
    try {
      shapes.push_back(LayerOutputShape(model.layers[i], shapes.back()));
    } catch (const ShapeError& e) {
      throw ShapeError(LayerTag(static_cast<int>(i)) + ": " + e.what());
    }
  }
  return shapes;
}

std::int64_t TensorBytes(const TensorShape& shape, int element_bytes) {
  return shape.elements() * element_bytes;
}

void Validate(const NetworkModel& model) {
  const TensorShape& in = model.input_shape;
  if (in.height < 1 || in.width < 1 || in.channels < 1) {
    throw ValueError("input dimensions must be positive");
  }
  if (model.element_bytes < 1) {
    throw ValueError("element_bytes must be positive");
  }
  if (model.layers.empty()) throw ValueError("model has no layers");
  int channels = in.channels;
  for (size_t i = 0; i < model.layers.size(); ++i) {
    const int index = static_cast<int>(i);
    const LayerSpec& layer = model.layers[i];
    ValidateLayer(layer, index);
    if (layer.in_channels != channels) {
      throw ValueError(LayerTag(index) + ": c_in " +
                           std::to_string(layer.in_channels) +
                           " does not match the incoming " +
                           std::to_string(channels) + " channels",
                       index);
    }
    channels = layer.out_channels;
  }
  const auto shapes = InferShapes(model);
  for (size_t i = 0; i < model.layers.size(); ++i) {
    const LayerSpec& layer = model.layers[i];
    const TensorShape& s = shapes[i];
    if (layer.kind == LayerKind::kGlobalPool && layer.kernel != 0 &&
        (s.height != layer.kernel || s.width != layer.kernel)) {
      throw ValueError(LayerTag(static_cast<int>(i)) +
                           ": global pooling kernel must cover the " +
                           ToString(s) + " input",
                       static_cast<int>(i));
    }
  }
}

NetworkModel ParseModel(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("model: expected an object");
  RejectUnknownKeys(doc, {"name", "input", "element_bytes", "layers"},
                    "model");
  NetworkModel model;
  const json& name = Require(doc, "name", "model");
  if (!name.is_string()) throw SchemaError("model: 'name' must be a string");
  model.name = name.get<std::string>();

  const json& input = Require(doc, "input", "model");
  if (!input.is_object()) throw SchemaError("input: expected an object");
  RejectUnknownKeys(input, {"h", "w", "c"}, "input");
  model.input_shape = {RequireInt(input, "h", "input"),
                       RequireInt(input, "w", "input"),
                       RequireInt(input, "c", "input")};
  model.element_bytes = OptionalInt(doc, "element_bytes", "model").value_or(1);

  const json& layers = Require(doc, "layers", "model");
  if (!layers.is_array()) throw SchemaError("model: 'layers' must be a list");
  int index = 0;
  for (const json& node : layers) {
    model.layers.push_back(ParseLayer(node, index++));
  }
  Validate(model);
  return model;
}

NetworkModel LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read model file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseModel(buffer.str());
}

std::string SerializeModel(const NetworkModel& model) {
  json doc;
  doc["name"] = model.name;
  doc["input"] = {{"h", model.input_shape.height},
                  {"w", model.input_shape.width},
                  {"c", model.input_shape.channels}};
  doc["element_bytes"] = model.element_bytes;
  json layers = json::array();
  for (const LayerSpec& layer : model.layers) {
    json node;
    node["kind"] = std::string(KindName(layer.kind));
    if (!(layer.kind == LayerKind::kGlobalPool && layer.kernel == 0)) {
      node["k"] = layer.kernel;
    }
    node["s"] = layer.stride;
    node["p"] = layer.padding;
    node["c_in"] = layer.in_channels;
    node["c_out"] = layer.out_channels;
    layers.push_back(std::move(node));
  }
  doc["layers"] = std::move(layers);
  return doc.dump(2) + "\n";
}

}  // namespace fuseplan
