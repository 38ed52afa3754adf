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

// Ground truth for the planner: exhaustive enumeration of fusion settings on
// small graphs, and an integer reference executor that runs a model either
// layer by layer or under a fusion setting while counting MACs and live bytes.

#ifndef FUSEPLAN_ORACLE_H_
#define FUSEPLAN_ORACLE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fuseplan/fusion_graph.h"
#include "fuseplan/model_ir.h"
#include "fuseplan/optimizer.h"

namespace fuseplan {

// Enumeration refuses graphs with more nodes than this (2^20 paths on a
// complete DAG).
inline constexpr int kMaxEnumerationNodes = 22;

// Calls `visit` once per complete v_0 -> v_n path, in lexicographic order of
// segment ends. Throws TooLarge beyond kMaxEnumerationNodes.
void ForEachSetting(const FusionGraph& graph,
                    const std::function<void(const FusionSetting&)>& visit);
std::vector<FusionSetting> EnumerateSettings(const FusionGraph& graph);

// Exact optimum of P1 or P2 by enumeration, with the optimizer's tie-breaks.
std::optional<PlanResult> BruteForce(const FusionGraph& graph,
                                     const Constraint& constraint);

// Every forward edge (i, j) present, with costs drawn from `seed`.
FusionGraph CompleteDag(int node_count, std::uint64_t seed);

// HWC integer tensor.
struct Tensor {
  TensorShape shape;
  std::vector<std::int32_t> values;

  Tensor() = default;
  explicit Tensor(const TensorShape& s)
      : shape(s), values(static_cast<size_t>(s.elements()), 0) {}

  std::int32_t& at(int y, int x, int c) {
    return values[(static_cast<size_t>(y) * shape.width + x) * shape.channels +
                  c];
  }
  std::int32_t at(int y, int x, int c) const {
    return values[(static_cast<size_t>(y) * shape.width + x) * shape.channels +
                  c];
  }
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

// Weights of one layer. Convolutions index [ky][kx][c_in][c_out], depthwise
// [ky][kx][c], dense [c_in][c_out]. Accumulators are shifted right by `shift`
// and saturated to int8 before being stored.
struct LayerWeights {
  std::vector<std::int32_t> values;
  int shift = 0;
};

struct WeightBank {
  std::vector<LayerWeights> layers;
};

// Weights in [-3, 3] with a shift that keeps activations from saturating.
WeightBank RandomWeights(const NetworkModel& model, std::uint64_t seed);
Tensor RandomInput(const TensorShape& shape, std::uint64_t seed);

struct ExecTrace {
  Tensor output;
  std::int64_t mac_count = 0;
  // Max over time of resident input bytes + output bytes written so far +
  // line-cache bytes (activations only, weights excluded).
  std::int64_t peak_live_bytes = 0;
  std::vector<std::int64_t> per_layer_macs;
  // Per executed segment (one per layer for RunVanilla).
  std::vector<std::int64_t> segment_peak_bytes;
  std::vector<std::int64_t> segment_cache_peak_bytes;
};

// Full-tensor execution, one layer at a time. Global pooling and dense layers
// consume their input one element at a time in both executors.
ExecTrace RunVanilla(const NetworkModel& model, const Tensor& input,
                     const WeightBank& weights);

// Executes every segment of `setting` in order; fused segments stream bands of
// rows through per-layer column caches. Throws InvalidSetting if the setting
// does not tile the model's layers or fuses a non-fusible layer, ShapeError
// if a fused segment's tiles do not fit.
ExecTrace RunFused(const NetworkModel& model, const FusionSetting& setting,
                   const Tensor& input, const WeightBank& weights);

// Valid model with exactly `depth` layers, deterministic per seed. Spatial
// extent <= max_spatial, channel counts <= max_channels. Sometimes ends in a
// global pooling (and dense) tail.
NetworkModel RandomModel(std::uint64_t seed, int depth, int max_spatial,
                         int max_channels);

}  // namespace fuseplan

#endif  // FUSEPLAN_ORACLE_H_
