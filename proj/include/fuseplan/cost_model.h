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

// Analytical RAM and MAC costs of single layers and of fusion blocks run
// under the H-cache scheme.
//
// A fusion block slides a band of input rows down the feature map and emits
// one output row of its last layer per band. Inside a band every layer walks
// the full width column by column; each non-first layer keeps the last k_i
// input columns of its band in a line cache (the horizontal overlap), while
// the vertical overlap between consecutive bands is recomputed.

#ifndef FUSEPLAN_COST_MODEL_H_
#define FUSEPLAN_COST_MODEL_H_

#include <cstdint>
#include <span>
#include <vector>

#include "fuseplan/model_ir.h"

namespace fuseplan {

struct TileStep {
  int tile = 1;         // rows of this layer's input read per band
  int tile_stride = 1;  // rows the band advances per output row of the block
  int kernel = 1;
  int stride = 1;
  int in_channels = 1;

  friend bool operator==(const TileStep&, const TileStep&) = default;
};

// One entry per layer of the block, first layer first. The last layer reads
// exactly one kernel window per band: tile == kernel.
struct TilePlan {
  std::vector<TileStep> steps;
};

struct BlockCost {
  std::int64_t input_bytes = 0;
  std::int64_t output_bytes = 0;
  std::int64_t buffer_bytes = 0;
  std::int64_t ram_bytes = 0;  // input + output + buffer
  std::int64_t macs = 0;
};

// Receptive-field back-propagation from the last layer:
//   t_n = k_n,  t_i = (t_{i+1} - 1) * s_i + k_i,
//   s^tile_n = s_n,  s^tile_i = s^tile_{i+1} * s_i.
// Throws NotFusible for global pooling / dense layers or an empty block.
TilePlan PropagateTiles(std::span<const LayerSpec> block);

// element_bytes * sum over layers i >= 2 of t_i * k_i * c_in_i. The first
// layer reads the materialized block input and needs no cache.
std::int64_t CacheBufferBytes(const TilePlan& plan, int element_bytes);

// Number of tiles a layer processes:
//   floor((h + 2p - t) / s_tile + 1) * floor((w + 2p - k) / s_layer + 1).
// Throws ShapeError when the tile or kernel does not fit the padded input.
std::int64_t NumTiles(const TensorShape& in, int padding, int tile,
                      int tile_stride, int kernel, int layer_stride);

// Output elements one tile yields: floor((t - k) / s_layer + 1) * c_out.
std::int64_t TileOutputSize(int tile, int kernel, int layer_stride,
                            int out_channels);

// MACs of an unfused layer. Pooling layers count zero (no multiplies).
std::int64_t VanillaMacs(const LayerSpec& layer, const TensorShape& in);

// True when every layer is fusible and every tile fits its padded input.
bool BlockFits(std::span<const LayerSpec> block,
               std::span<const TensorShape> shapes);

// MACs of a fusion block. `shapes` holds the n + 1 boundary shapes of the
// block (input of each layer, then the block output).
//
// When no layer after the first is padded this is the closed form
//   sum_i NumTiles_i * TileOutputSize_i * k_i^2 * X_i,
// with X = c_in for convolutions, 1 for depthwise, 0 for pools. Padding on
// an inner layer means edge bands need fewer rows from the layer below than
// a full tile, which the closed form does not see; those blocks are counted
// band by band with StreamedBlockMacs.
std::int64_t FusedBlockMacs(std::span<const LayerSpec> block,
                            std::span<const TensorShape> shapes);

// Exact band-by-band count: for every output row of the block, propagate the
// needed row interval down the block (clipped to each feature map) and charge
// interval_rows * out_width * c_out * k^2 * X per layer.
std::int64_t StreamedBlockMacs(std::span<const LayerSpec> block,
                               std::span<const TensorShape> shapes);

// RAM of a block (single layers included): I + O + Buf, with Buf == 0 for a
// one-layer block. macs is left at zero; see CostBlock.
BlockCost BlockRamBytes(std::span<const LayerSpec> block,
                        const TensorShape& in_shape,
                        const TensorShape& out_shape, int element_bytes);

// RAM and MACs together. Throws ShapeError if the block does not fit.
BlockCost CostBlock(std::span<const LayerSpec> block,
                    std::span<const TensorShape> shapes, int element_bytes);

// Working set of a global pooling or dense layer that consumes its input one
// element at a time: element_bytes * (c_out + 1). Throws KindError for other
// layer kinds.
std::int64_t IterativeSinkRamBytes(const LayerSpec& layer,
                                   const TensorShape& in_shape,
                                   int element_bytes);

}  // namespace fuseplan

#endif  // FUSEPLAN_COST_MODEL_H_
