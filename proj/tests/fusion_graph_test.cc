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

#include <utility>
#include <vector>

#include "fuseplan/errors.h"
#include "gtest/gtest.h"

namespace fuseplan {
namespace {

NetworkModel Toy3() { return LoadModel(FUSEPLAN_MODELS_DIR "/toy3.json"); }

NetworkModel ConvChain(int m, int size) {
  NetworkModel model;
  model.name = "chain";
  model.input_shape = {size, size, 2};
  for (int i = 0; i < m; ++i) {
    model.layers.push_back({LayerKind::kConv2d, 3, 1, 1, 2, 2});
  }
  return model;
}

Edge MakeEdge(int src, int dst, std::int64_t ram, std::int64_t macs) {
  return {src, dst, ram, macs, 0};
}

TEST(FusionGraphTest, OneLayerModel) {
  NetworkModel model = ConvChain(1, 8);
  const FusionGraph graph = BuildGraph(model);
  EXPECT_EQ(graph.node_count(), 2);
  EXPECT_EQ(graph.edge_count(), 1);
}

TEST(FusionGraphTest, EdgeCountOnFusibleChain) {
  for (int m = 1; m <= 8; ++m) {
    const FusionGraph graph = BuildGraph(ConvChain(m, 32));
    EXPECT_EQ(graph.edge_count(), m * (m + 1) / 2) << "m = " << m;
  }
}

TEST(FusionGraphTest, Toy3Annotations) {
  const FusionGraph graph = BuildGraph(Toy3());
  ASSERT_EQ(graph.edge_count(), 6);
  struct Expected {
    int src, dst;
    std::int64_t ram, macs, buffer;
  };
  // 10x10 -> 8x8 -> 6x6 -> 4x4, one channel, 3x3 kernels.
  const Expected expected[] = {
      {0, 1, 164, 576, 0},  {0, 2, 145, 1620, 9},  {0, 3, 140, 2232, 24},
      {1, 2, 100, 324, 0},  {1, 3, 89, 792, 9},    {2, 3, 52, 144, 0},
  };
  for (const Expected& e : expected) {
    const int index = graph.FindEdge(e.src, e.dst);
    ASSERT_GE(index, 0) << e.src << "->" << e.dst;
    EXPECT_EQ(graph.edge(index).ram_bytes, e.ram) << e.src << "->" << e.dst;
    EXPECT_EQ(graph.edge(index).macs, e.macs) << e.src << "->" << e.dst;
    EXPECT_EQ(graph.edge(index).buffer_bytes, e.buffer)
        << e.src << "->" << e.dst;
  }
  EXPECT_EQ(graph.vanilla_macs(), 1044);
  EXPECT_EQ(graph.vanilla_ram(), 164);
}

TEST(FusionGraphTest, SinksEndFusionRuns) {
  NetworkModel model = ConvChain(2, 8);
  model.layers.push_back({LayerKind::kGlobalPool, 0, 1, 0, 2, 2});
  model.layers.push_back({LayerKind::kDense, 1, 1, 0, 2, 5});
  const FusionGraph graph = BuildGraph(model);
  EXPECT_EQ(graph.edge_count(), 3 + 2);
  EXPECT_LT(graph.FindEdge(1, 3), 0);
  EXPECT_EQ(graph.edge(graph.FindEdge(2, 3)).ram_bytes, 3);
  EXPECT_EQ(graph.edge(graph.FindEdge(3, 4)).ram_bytes, 6);
}

TEST(FusionGraphTest, PathCosts) {
  const FusionGraph graph(4,
                          {MakeEdge(0, 1, 20, 10), MakeEdge(1, 2, 72, 20),
                           MakeEdge(2, 3, 15, 0), MakeEdge(0, 3, 50, 100)},
                          30, 72);
  const std::vector<std::pair<int, int>> spans = {{0, 1}, {1, 2}, {2, 3}};
  const FusionSetting singles = SettingFromSpans(graph, spans);
  EXPECT_EQ(PathPeakRam(singles), 72);
  EXPECT_EQ(PathTotalMacs(singles), 30);
  EXPECT_EQ(OverheadFactor(singles, graph), Rational::Integer(1));

  const std::vector<std::pair<int, int>> whole = {{0, 3}};
  const FusionSetting fused = SettingFromSpans(graph, whole);
  EXPECT_EQ(PathPeakRam(fused), 50);
  EXPECT_EQ(OverheadFactor(fused, graph), Rational(10, 3));
}

TEST(FusionGraphTest, SinglesMatchVanillaOnToy) {
  const FusionGraph graph = BuildGraph(Toy3());
  const FusionSetting singles = SingleLayerSetting(graph);
  EXPECT_EQ(PathPeakRam(singles), graph.vanilla_ram());
  EXPECT_EQ(OverheadFactor(singles, graph), Rational::Integer(1));
  for (int i = 0; i < graph.edge_count(); ++i) {
    const Edge& e = graph.edge(i);
    if (!e.fused()) continue;
    std::vector<std::pair<int, int>> spans;
    for (int s = 0; s < e.src; ++s) spans.emplace_back(s, s + 1);
    spans.emplace_back(e.src, e.dst);
    for (int s = e.dst; s < 3; ++s) spans.emplace_back(s, s + 1);
    EXPECT_GT(OverheadFactor(SettingFromSpans(graph, spans), graph),
              Rational::Integer(1));
  }
}

TEST(FusionGraphTest, ZeroVanillaMacsGivesFactorOne) {
  const FusionGraph graph(2, {MakeEdge(0, 1, 5, 0)}, 0, 5);
  EXPECT_EQ(OverheadFactor(SingleLayerSetting(graph), graph),
            Rational::Integer(1));
}

TEST(FusionGraphTest, RejectsBadGraphsAndSettings) {
  EXPECT_THROW(FusionGraph(3, {MakeEdge(1, 0, 5, 0)}, 0, 5), ValueError);
  EXPECT_THROW(FusionGraph(2, {MakeEdge(0, 1, 0, 0)}, 0, 5), ValueError);
  const FusionGraph graph = BuildGraph(Toy3());
  const std::vector<std::pair<int, int>> gap = {{0, 1}, {2, 3}};
  EXPECT_THROW(SettingFromSpans(graph, gap), InvalidSetting);
  FusionSetting tampered = SingleLayerSetting(graph);
  tampered.edges[0].macs += 1;
  EXPECT_THROW(CheckSetting(tampered, graph), InvalidSetting);
}

}  // namespace
}  // namespace fuseplan
