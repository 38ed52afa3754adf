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
#include <utility>

#include "fuseplan/errors.h"
#include "fuseplan/oracle.h"

namespace fuseplan {
namespace {

void Walk(const FusionGraph& graph, int node, FusionSetting& prefix,
          const std::function<void(const FusionSetting&)>& visit) {
  if (node == graph.target()) {
    visit(prefix);
    return;
  }
  for (int i = graph.out_begin(node); i < graph.out_end(node); ++i) {
    prefix.edges.push_back(graph.edge(i));
    Walk(graph, graph.edge(i).dst, prefix, visit);
    prefix.edges.pop_back();
  }
}

}  // namespace

void ForEachSetting(const FusionGraph& graph,
                    const std::function<void(const FusionSetting&)>& visit) {
  if (graph.node_count() > kMaxEnumerationNodes) {
    throw TooLarge("refusing to enumerate a graph with " +
                   std::to_string(graph.node_count()) + " nodes (limit " +
                   std::to_string(kMaxEnumerationNodes) + ")");
  }
  FusionSetting prefix;
  Walk(graph, graph.source(), prefix, visit);
}

std::vector<FusionSetting> EnumerateSettings(const FusionGraph& graph) {
  std::vector<FusionSetting> settings;
  ForEachSetting(graph, [&](const FusionSetting& s) { settings.push_back(s); });
  return settings;
}

std::optional<PlanResult> BruteForce(const FusionGraph& graph,
                                     const Constraint& constraint) {
  ValidateConstraint(constraint);
  const bool minimize_ram = std::holds_alternative<MaxOverheadFactor>(constraint);
  std::optional<FusionSetting> best;
  ForEachSetting(graph, [&](const FusionSetting& s) {
    if (!Satisfies(MakePlanResult(graph, s), constraint)) return;
    const bool better = !best || (minimize_ram ? PreferForRam(s, *best)
                                               : PreferForMacs(s, *best));
    if (better) best = s;
  });
  if (!best) return std::nullopt;
  return MakePlanResult(graph, *std::move(best));
}

FusionGraph CompleteDag(int node_count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> ram(1, 1000);
  std::uniform_int_distribution<std::int64_t> macs(0, 1000);
  std::vector<Edge> edges;
  for (int i = 0; i < node_count; ++i) {
    for (int j = i + 1; j < node_count; ++j) {
      edges.push_back({i, j, ram(rng), macs(rng), 0});
    }
  }
  std::int64_t vanilla_macs = 0;
  std::int64_t vanilla_ram = 0;
  for (const Edge& e : edges) {
    if (e.dst == e.src + 1) {
      vanilla_macs += e.macs;
      vanilla_ram = std::max(vanilla_ram, e.ram_bytes);
    }
  }
  return FusionGraph(node_count, std::move(edges), vanilla_macs, vanilla_ram);
}

}  // namespace fuseplan
