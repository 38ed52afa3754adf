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

// Randomized invariants over generated models. The acceptance binary runs
// the same checks on a larger corpus.

#include <cstdint>
#include <utility>
#include <vector>

#include "fuseplan/cost_model.h"
#include "fuseplan/fusion_graph.h"
#include "fuseplan/model_ir.h"
#include "fuseplan/optimizer.h"
#include "fuseplan/oracle.h"
#include "gtest/gtest.h"

namespace fuseplan {
namespace {

TEST(PropertyTest, FusedExecutionMatchesVanilla) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const NetworkModel model = RandomModel(seed, 4, 10, 4);
    const FusionGraph graph = BuildGraph(model);
    const Tensor input = RandomInput(model.input_shape, seed);
    const WeightBank weights = RandomWeights(model, seed);
    const ExecTrace vanilla = RunVanilla(model, input, weights);
    EXPECT_EQ(vanilla.mac_count, graph.vanilla_macs()) << seed;
    ForEachSetting(graph, [&](const FusionSetting& s) {
      const ExecTrace fused = RunFused(model, s, input, weights);
      EXPECT_EQ(fused.output, vanilla.output) << seed;
      EXPECT_EQ(fused.mac_count, PathTotalMacs(s)) << seed;
      EXPECT_LE(fused.peak_live_bytes, PathPeakRam(s)) << seed;
      for (size_t i = 0; i < s.edges.size(); ++i) {
        EXPECT_LE(fused.segment_cache_peak_bytes[i], s.edges[i].buffer_bytes);
      }
    });
  }
}

TEST(PropertyTest, SingleLayerSettingIsVanilla) {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const NetworkModel model = RandomModel(seed, 5, 12, 5);
    const FusionGraph graph = BuildGraph(model);
    const Tensor input = RandomInput(model.input_shape, seed);
    const WeightBank weights = RandomWeights(model, seed);
    const ExecTrace vanilla = RunVanilla(model, input, weights);
    const ExecTrace fused =
        RunFused(model, SingleLayerSetting(graph), input, weights);
    EXPECT_EQ(fused.output, vanilla.output);
    EXPECT_EQ(fused.per_layer_macs, vanilla.per_layer_macs);
    EXPECT_EQ(fused.peak_live_bytes, vanilla.peak_live_bytes);
    EXPECT_EQ(PathPeakRam(SingleLayerSetting(graph)), graph.vanilla_ram());
  }
}

// Prepending a layer to a block never lowers the work of the layers the two
// blocks share. (The new head itself may cost less than its unfused run when
// the next layer leaves trailing rows unread.)
TEST(PropertyTest, PrependingKeepsSuffixWork) {
  for (std::uint64_t seed = 200; seed < 300; ++seed) {
    const NetworkModel model = RandomModel(seed, 6, 16, 4);
    const FusionGraph graph = BuildGraph(model);
    const Tensor input = RandomInput(model.input_shape, seed);
    const WeightBank weights = RandomWeights(model, seed);
    const auto run = [&](int src, int dst) {
      std::vector<std::pair<int, int>> spans;
      for (int i = 0; i < src; ++i) spans.emplace_back(i, i + 1);
      spans.emplace_back(src, dst);
      for (int i = dst; i < graph.target(); ++i) spans.emplace_back(i, i + 1);
      return RunFused(model, SettingFromSpans(graph, spans), input, weights)
          .per_layer_macs;
    };
    for (const Edge& e : graph.edges()) {
      if (e.src == 0 || graph.FindEdge(e.src - 1, e.dst) < 0) continue;
      const std::vector<std::int64_t> shorter = run(e.src, e.dst);
      const std::vector<std::int64_t> longer = run(e.src - 1, e.dst);
      for (int i = e.src; i < e.dst; ++i) {
        EXPECT_GE(longer[i], shorter[i]) << seed << " layer " << i;
      }
      EXPECT_GE(graph.edge(graph.FindEdge(e.src - 1, e.dst)).macs, e.macs);
    }
  }
}

TEST(PropertyTest, SerializeRoundTrip) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const NetworkModel model = RandomModel(seed, 1 + seed % 8, 16, 8);
    EXPECT_EQ(ParseModel(SerializeModel(model)), model) << seed;
  }
}

TEST(PropertyTest, SolversMatchBruteForce) {
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const NetworkModel model = RandomModel(seed, 6, 16, 8);
    const FusionGraph graph = BuildGraph(model);
    EXPECT_EQ(MinMacsPath(graph), BruteForce(graph, MaxPeakRam{})->setting);
    EXPECT_EQ(PathPeakRam(MinimaxRamPath(graph)),
              BruteForce(graph, MaxOverheadFactor{})->peak_ram_bytes);
    for (const Edge& e : graph.edges()) {
      const auto got = SolveP2(graph, e.ram_bytes);
      const auto want = BruteForce(graph, MaxPeakRam{e.ram_bytes});
      ASSERT_EQ(got.has_value(), want.has_value());
      if (got) EXPECT_EQ(got->setting, want->setting) << seed;
    }
  }
}

}  // namespace
}  // namespace fuseplan
