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

#include "fuseplan/fusion_graph.h"

#include <algorithm>
#include <string>
#include <utility>

#include "fuseplan/cost_model.h"
#include "fuseplan/errors.h"
#include "json.hpp"

namespace fuseplan {

FusionGraph::FusionGraph(int node_count, std::vector<Edge> edges,
                         std::int64_t vanilla_macs, std::int64_t vanilla_ram)
    : node_count_(node_count),
      edges_(std::move(edges)),
      vanilla_macs_(vanilla_macs),
      vanilla_ram_(vanilla_ram) {
  if (node_count_ < 2) throw ValueError("fusion graph needs two nodes");
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
  });
  for (size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.src < 0 || e.src >= e.dst || e.dst >= node_count_) {
      throw ValueError("edge (" + std::to_string(e.src) + ", " +
                       std::to_string(e.dst) + ") is not a forward edge");
    }
    if (e.ram_bytes <= 0 || e.macs < 0) {
      throw ValueError("edge (" + std::to_string(e.src) + ", " +
                       std::to_string(e.dst) + ") has invalid costs");
    }
    if (i > 0 && edges_[i - 1].src == e.src && edges_[i - 1].dst == e.dst) {
      throw ValueError("parallel edges are not supported");
    }
  }
  out_offsets_.assign(node_count_ + 1, 0);
  for (const Edge& e : edges_) ++out_offsets_[e.src + 1];
  for (int v = 0; v < node_count_; ++v) out_offsets_[v + 1] += out_offsets_[v];
}

int FusionGraph::FindEdge(int src, int dst) const {
  if (src < 0 || src >= node_count_) return -1;
  for (int i = out_begin(src); i < out_end(src); ++i) {
    if (edges_[i].dst == dst) return i;
  }
  return -1;
}

FusionGraph BuildGraph(const NetworkModel& model) {
  const std::vector<TensorShape> shapes = InferShapes(model);
  const std::span<const LayerSpec> layers(model.layers);
  const std::span<const TensorShape> all_shapes(shapes);
  const int n = static_cast<int>(layers.size());
  const int eb = model.element_bytes;

  std::vector<Edge> edges;
  std::int64_t vanilla_macs = 0;
  std::int64_t vanilla_ram = 0;
  for (int i = 0; i < n; ++i) {
    const LayerSpec& layer = layers[i];
    const std::int64_t macs = VanillaMacs(layer, shapes[i]);
    vanilla_macs += macs;
    if (!layer.fusible()) {
      const std::int64_t ram = IterativeSinkRamBytes(layer, shapes[i], eb);
      edges.push_back({i, i + 1, ram, macs, 0});
      vanilla_ram = std::max(vanilla_ram, ram);
      continue;
    }
    const BlockCost single =
        CostBlock(layers.subspan(i, 1), all_shapes.subspan(i, 2), eb);
    edges.push_back({i, i + 1, single.ram_bytes, single.macs, 0});
    vanilla_ram = std::max(vanilla_ram, single.ram_bytes);

    // Tiles only grow as a block is extended at its end, so the first block
    // that does not fit ends the scan from this start layer.
    for (int j = i + 2; j <= n && layers[j - 1].fusible(); ++j) {
      const auto block = layers.subspan(i, j - i);
      const auto block_shapes = all_shapes.subspan(i, j - i + 1);
      if (!BlockFits(block, block_shapes)) break;
      const BlockCost cost = CostBlock(block, block_shapes, eb);
      edges.push_back({i, j, cost.ram_bytes, cost.macs, cost.buffer_bytes});
    }
  }
  return FusionGraph(n + 1, std::move(edges), vanilla_macs, vanilla_ram);
}

void CheckSetting(const FusionSetting& setting, const FusionGraph& graph) {
  int at = graph.source();
  for (const Edge& e : setting.edges) {
    if (e.src != at) {
      throw InvalidSetting("setting has a gap or overlap at node " +
                           std::to_string(at));
    }
    const int index = graph.FindEdge(e.src, e.dst);
    if (index < 0 || graph.edge(index) != e) {
      throw InvalidSetting("segment [" + std::to_string(e.src) + ", " +
                           std::to_string(e.dst) + ") is not a graph edge");
    }
    at = e.dst;
  }
  if (at != graph.target()) {
    throw InvalidSetting("setting stops at node " + std::to_string(at) +
                         " instead of " + std::to_string(graph.target()));
  }
}

FusionSetting SettingFromSpans(const FusionGraph& graph,
                               std::span<const std::pair<int, int>> spans) {
  FusionSetting setting;
  for (const auto& [src, dst] : spans) {
    const int index = graph.FindEdge(src, dst);
    if (index < 0) {
      throw InvalidSetting("segment [" + std::to_string(src) + ", " +
                           std::to_string(dst) + ") is not a graph edge");
    }
    setting.edges.push_back(graph.edge(index));
  }
  CheckSetting(setting, graph);
  return setting;
}

FusionSetting SingleLayerSetting(const FusionGraph& graph) {
  std::vector<std::pair<int, int>> spans;
  for (int v = graph.source(); v < graph.target(); ++v) {
    spans.emplace_back(v, v + 1);
  }
  return SettingFromSpans(graph, spans);
}

std::int64_t PathPeakRam(const FusionSetting& setting) {
  std::int64_t peak = 0;
  for (const Edge& e : setting.edges) peak = std::max(peak, e.ram_bytes);
  return peak;
}

std::int64_t PathTotalMacs(const FusionSetting& setting) {
  std::int64_t total = 0;
  for (const Edge& e : setting.edges) total += e.macs;
  return total;
}

Rational OverheadFactor(const FusionSetting& setting,
                        const FusionGraph& graph) {
  if (graph.vanilla_macs() == 0) return Rational::Integer(1);
  return Rational(PathTotalMacs(setting), graph.vanilla_macs());
}

std::string DumpGraphJson(const FusionGraph& graph) {
  nlohmann::ordered_json doc;
  doc["schema"] = 1;
  doc["nodes"] = graph.node_count();
  doc["vanilla_macs"] = graph.vanilla_macs();
  doc["vanilla_ram"] = graph.vanilla_ram();
  auto edges = nlohmann::ordered_json::array();
  for (const Edge& e : graph.edges()) {
    edges.push_back(
        {{"src", e.src}, {"dst", e.dst}, {"ram", e.ram_bytes}, {"macs", e.macs}});
  }
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

}  // namespace fuseplan
