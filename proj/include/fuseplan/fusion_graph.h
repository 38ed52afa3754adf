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

// The fusion DAG: nodes are the tensors v_0 ... v_n of a layer chain, and an
// edge (i, j) runs layers i .. j-1, either as a single layer (j == i + 1) or
// as one fusion block. Every complete path v_0 -> v_n is a fusion setting.

#ifndef FUSEPLAN_FUSION_GRAPH_H_
#define FUSEPLAN_FUSION_GRAPH_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fuseplan/model_ir.h"
#include "fuseplan/rational.h"

namespace fuseplan {

struct Edge {
  int src = 0;
  int dst = 0;
  std::int64_t ram_bytes = 0;
  std::int64_t macs = 0;
  std::int64_t buffer_bytes = 0;

  // Layers src .. dst-1 run as one fusion block.
  bool fused() const { return dst - src > 1; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

// A complete compute path, edges in order from v_0.
struct FusionSetting {
  std::vector<Edge> edges;

  friend bool operator==(const FusionSetting&, const FusionSetting&) = default;
};

class FusionGraph {
 public:
  // Any DAG with forward edges only (0 <= src < dst < node_count), no
  // parallel edges, ram_bytes > 0 and macs >= 0. Edges are stored sorted by
  // (src, dst); edge indices below refer to that order.
  FusionGraph(int node_count, std::vector<Edge> edges,
              std::int64_t vanilla_macs, std::int64_t vanilla_ram);

  int node_count() const { return node_count_; }
  int source() const { return 0; }
  int target() const { return node_count_ - 1; }

  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(int index) const { return edges_[index]; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  // Edge index range [out_begin, out_end) of edges leaving `node`, by dst.
  int out_begin(int node) const { return out_offsets_[node]; }
  int out_end(int node) const { return out_offsets_[node + 1]; }

  // Index of edge (src, dst), or -1.
  int FindEdge(int src, int dst) const;

  std::int64_t vanilla_macs() const { return vanilla_macs_; }
  std::int64_t vanilla_ram() const { return vanilla_ram_; }

 private:
  int node_count_;
  std::vector<Edge> edges_;
  std::vector<int> out_offsets_;
  std::int64_t vanilla_macs_;
  std::int64_t vanilla_ram_;
};

// One edge per layer plus one edge per contiguous run of >= 2 fusible layers
// whose tiles fit the feature maps. Global pooling and dense layers end a
// run and are costed as iterative sinks.
FusionGraph BuildGraph(const NetworkModel& model);

// Throws InvalidSetting unless the setting is a chain of graph edges from
// v_0 to v_n with costs equal to the graph's annotations.
void CheckSetting(const FusionSetting& setting, const FusionGraph& graph);

// Settings from edge (src, dst) pairs, e.g. read back from an export.
FusionSetting SettingFromSpans(const FusionGraph& graph,
                               std::span<const std::pair<int, int>> spans);

// Every layer on its own.
FusionSetting SingleLayerSetting(const FusionGraph& graph);

std::int64_t PathPeakRam(const FusionSetting& setting);
std::int64_t PathTotalMacs(const FusionSetting& setting);
// C_S / C_vanilla, exact. A model without any MACs has factor 1.
Rational OverheadFactor(const FusionSetting& setting, const FusionGraph& graph);

// {"schema": 1, "nodes", "vanilla_macs", "vanilla_ram",
//  "edges": [{"src", "dst", "ram", "macs"}]}
std::string DumpGraphJson(const FusionGraph& graph);

}  // namespace fuseplan

#endif  // FUSEPLAN_FUSION_GRAPH_H_
