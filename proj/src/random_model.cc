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

#include <algorithm>
#include <random>
#include <string>

#include "fuseplan/errors.h"
#include "fuseplan/oracle.h"

namespace fuseplan {

NetworkModel RandomModel(std::uint64_t seed, int depth, int max_spatial,
                         int max_channels) {
  if (depth < 1 || max_spatial < 1 || max_channels < 1) {
    throw ValueError("random model needs depth, spatial and channels >= 1");
  }
  std::mt19937_64 rng(seed);
  const auto uniform = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };

  NetworkModel model;
  model.name = "random-" + std::to_string(seed);
  model.input_shape = {uniform(1, max_spatial), uniform(1, max_spatial),
                       uniform(1, max_channels)};

  int tail = 0;
  if (depth >= 2 && uniform(0, 3) == 0) tail = uniform(1, 2);
  tail = std::min(tail, depth - 1);

  TensorShape shape = model.input_shape;
  for (int i = 0; i < depth - tail; ++i) {
    LayerSpec layer;
    const int pick = uniform(0, 9);
    layer.kind = pick < 5   ? LayerKind::kConv2d
                 : pick < 7 ? LayerKind::kDwConv2d
                 : pick < 8 ? LayerKind::kMaxPool2d
                            : LayerKind::kAvgPool2d;
    const int extent = std::min(shape.height, shape.width);
    layer.kernel = uniform(1, 3);
    layer.padding = uniform(0, std::min(layer.kernel - 1, 1));
    // Keep the window inside the padded input.
    while (layer.kernel > extent + 2 * layer.padding) {
      --layer.kernel;
      layer.padding = std::min(layer.padding, layer.kernel - 1);
    }
    layer.stride = uniform(0, 3) == 0 ? 2 : 1;
    layer.in_channels = shape.channels;
    layer.out_channels = layer.kind == LayerKind::kConv2d
                             ? uniform(1, max_channels)
                             : shape.channels;
    shape = LayerOutputShape(layer, shape);
    model.layers.push_back(layer);
  }
  if (tail >= 1) {
    LayerSpec pool;
    pool.kind = LayerKind::kGlobalPool;
    pool.kernel = 0;
    pool.in_channels = pool.out_channels = shape.channels;
    model.layers.push_back(pool);
    shape = {1, 1, shape.channels};
  }
  if (tail == 2) {
    LayerSpec dense;
    dense.kind = LayerKind::kDense;
    dense.in_channels = shape.channels;
    dense.out_channels = uniform(1, max_channels);
    model.layers.push_back(dense);
  }
  Validate(model);
  return model;
}

}  // namespace fuseplan
