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

#include "fuseplan/cost_model.h"

#include <algorithm>
#include <string>

#include "fuseplan/errors.h"

namespace fuseplan {
namespace {

// Multiplier per output element and kernel tap.
std::int64_t TapFactor(const LayerSpec& layer) {
  switch (layer.kind) {
    case LayerKind::kConv2d:
      return layer.in_channels;
    case LayerKind::kDwConv2d:
      return 1;
    default:
      return 0;
  }
}

void CheckShapes(std::span<const LayerSpec> block,
                 std::span<const TensorShape> shapes) {
  if (block.empty()) throw NotFusible("empty fusion block");
  if (shapes.size() != block.size() + 1) {
    throw ShapeError("fusion block needs " + std::to_string(block.size() + 1) +
                     " boundary shapes, got " + std::to_string(shapes.size()));
  }
}

void CheckTilesFit(std::span<const LayerSpec> block, const TilePlan& plan,
                   std::span<const TensorShape> shapes) {
  for (size_t i = 0; i < block.size(); ++i) {
    const int padded = shapes[i].height + 2 * block[i].padding;
    if (plan.steps[i].tile > padded) {
      throw ShapeError("tile of " + std::to_string(plan.steps[i].tile) +
                       " rows exceeds padded input height " +
                       std::to_string(padded) + " at block layer " +
                       std::to_string(i));
    }
  }
}

bool InnerLayersUnpadded(std::span<const LayerSpec> block) {
  return std::all_of(block.begin() + 1, block.end(),
                     [](const LayerSpec& l) { return l.padding == 0; });
}

}  // namespace

TilePlan PropagateTiles(std::span<const LayerSpec> block) {
  if (block.empty()) throw NotFusible("empty fusion block");
  TilePlan plan;
  plan.steps.resize(block.size());
  int tile = 0;
  int tile_stride = 1;
  for (size_t n = block.size(); n-- > 0;) {
    const LayerSpec& layer = block[n];
    if (!layer.fusible()) {
      throw NotFusible(std::string(KindName(layer.kind)) +
                       " cannot be part of a fusion block");
    }
    tile = n + 1 == block.size() ? layer.kernel
                                 : (tile - 1) * layer.stride + layer.kernel;
    tile_stride *= layer.stride;
    plan.steps[n] = {tile, tile_stride, layer.kernel, layer.stride,
                     layer.in_channels};
  }
  return plan;
}

std::int64_t CacheBufferBytes(const TilePlan& plan, int element_bytes) {
  std::int64_t elements = 0;
  for (size_t i = 1; i < plan.steps.size(); ++i) {
    const TileStep& step = plan.steps[i];
    elements += std::int64_t{step.tile} * step.kernel * step.in_channels;
  }
  return elements * element_bytes;
}

std::int64_t NumTiles(const TensorShape& in, int padding, int tile,
                      int tile_stride, int kernel, int layer_stride) {
  const int rows = in.height + 2 * padding - tile;
  const int cols = in.width + 2 * padding - kernel;
  if (rows < 0 || cols < 0) {
    throw ShapeError("tile " + std::to_string(tile) + "x" +
                     std::to_string(kernel) + " does not fit padded input " +
                     ToString(in));
  }
  return std::int64_t{rows / tile_stride + 1} * (cols / layer_stride + 1);
}

std::int64_t TileOutputSize(int tile, int kernel, int layer_stride,
                            int out_channels) {
  return std::int64_t{(tile - kernel) / layer_stride + 1} * out_channels;
}

std::int64_t VanillaMacs(const LayerSpec& layer, const TensorShape& in) {
  if (layer.kind == LayerKind::kDense) {
    return std::int64_t{layer.in_channels} * layer.out_channels;
  }
  const std::int64_t taps = TapFactor(layer);
  if (taps == 0) return 0;
  const TensorShape out = LayerOutputShape(layer, in);
  return out.elements() * layer.kernel * layer.kernel * taps;
}

bool BlockFits(std::span<const LayerSpec> block,
               std::span<const TensorShape> shapes) {
  if (block.empty() || shapes.size() != block.size() + 1) return false;
  if (!std::all_of(block.begin(), block.end(),
                   [](const LayerSpec& l) { return l.fusible(); })) {
    return false;
  }
  const TilePlan plan = PropagateTiles(block);
  for (size_t i = 0; i < block.size(); ++i) {
    if (plan.steps[i].tile > shapes[i].height + 2 * block[i].padding) {
      return false;
    }
  }
  return true;
}

std::int64_t FusedBlockMacs(std::span<const LayerSpec> block,
                            std::span<const TensorShape> shapes) {
  CheckShapes(block, shapes);
  const TilePlan plan = PropagateTiles(block);
  CheckTilesFit(block, plan, shapes);
  if (!InnerLayersUnpadded(block)) return StreamedBlockMacs(block, shapes);

  std::int64_t total = 0;
  for (size_t i = 0; i < block.size(); ++i) {
    const LayerSpec& layer = block[i];
    const TileStep& step = plan.steps[i];
    const std::int64_t tiles =
        NumTiles(shapes[i], layer.padding, step.tile, step.tile_stride,
                 layer.kernel, layer.stride);
    total += tiles *
             TileOutputSize(step.tile, layer.kernel, layer.stride,
                            layer.out_channels) *
             layer.kernel * layer.kernel * TapFactor(layer);
  }
  return total;
}

std::int64_t StreamedBlockMacs(std::span<const LayerSpec> block,
                               std::span<const TensorShape> shapes) {
  CheckShapes(block, shapes);
  CheckTilesFit(block, PropagateTiles(block), shapes);
  const size_t n = block.size();
  std::vector<std::int64_t> per_row(n);
  for (size_t i = 0; i < n; ++i) {
    const LayerSpec& layer = block[i];
    per_row[i] = std::int64_t{shapes[i + 1].width} * layer.out_channels *
                 layer.kernel * layer.kernel * TapFactor(layer);
  }
  std::int64_t total = 0;
  for (int r = 0; r < shapes[n].height; ++r) {
    int lo = r;
    int hi = r;
    for (size_t i = n; i-- > 0;) {
      total += (hi - lo + 1) * per_row[i];
      if (i == 0) break;
      const LayerSpec& layer = block[i];
      lo = std::max(lo * layer.stride - layer.padding, 0);
      hi = std::min(hi * layer.stride - layer.padding + layer.kernel - 1,
                    shapes[i].height - 1);
    }
  }
  return total;
}

BlockCost BlockRamBytes(std::span<const LayerSpec> block,
                        const TensorShape& in_shape,
                        const TensorShape& out_shape, int element_bytes) {
  BlockCost cost;
  cost.input_bytes = TensorBytes(in_shape, element_bytes);
  cost.output_bytes = TensorBytes(out_shape, element_bytes);
  cost.buffer_bytes = CacheBufferBytes(PropagateTiles(block), element_bytes);
  cost.ram_bytes = cost.input_bytes + cost.output_bytes + cost.buffer_bytes;
  return cost;
}

BlockCost CostBlock(std::span<const LayerSpec> block,
                    std::span<const TensorShape> shapes, int element_bytes) {
  CheckShapes(block, shapes);
  BlockCost cost =
      BlockRamBytes(block, shapes.front(), shapes.back(), element_bytes);
  cost.macs = FusedBlockMacs(block, shapes);
  return cost;
}

std::int64_t IterativeSinkRamBytes(const LayerSpec& layer,
                                   const TensorShape& in_shape,
                                   int element_bytes) {
  if (layer.kind != LayerKind::kGlobalPool && layer.kind != LayerKind::kDense) {
    throw KindError(std::string(KindName(layer.kind)) +
                    " is not an iterative sink");
  }
  if (in_shape.channels != layer.in_channels) {
    throw ShapeError("sink input " + ToString(in_shape) +
                     " does not match c_in " +
                     std::to_string(layer.in_channels));
  }
  return std::int64_t{layer.out_channels + 1} * element_bytes;
}

}  // namespace fuseplan
