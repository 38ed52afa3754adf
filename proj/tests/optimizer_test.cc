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

#include "fuseplan/optimizer.h"

#include <cstdint>
#include <utility>
#include <vector>

#include "fuseplan/errors.h"
#include "fuseplan/oracle.h"
#include "gtest/gtest.h"

namespace fuseplan {
namespace {

Edge MakeEdge(int src, int dst, std::int64_t ram, std::int64_t macs) {
  return {src, dst, ram, macs, 0};
}

std::vector<std::pair<int, int>> Spans(const FusionSetting& setting) {
  std::vector<std::pair<int, int>> out;
  for (const Edge& e : setting.edges) out.emplace_back(e.src, e.dst);
  return out;
}

using SpanList = std::vector<std::pair<int, int>>;

TEST(OptimizerTest, SinglesOnlyGraph) {
  const FusionGraph graph(
      4, {MakeEdge(0, 1, 5, 1), MakeEdge(1, 2, 7, 2), MakeEdge(2, 3, 3, 3)}, 6,
      7);
  EXPECT_EQ(Spans(MinMacsPath(graph)), (SpanList{{0, 1}, {1, 2}, {2, 3}}));
  EXPECT_EQ(PathTotalMacs(MinMacsPath(graph)), graph.vanilla_macs());
}

TEST(OptimizerTest, MinMacsTakesCheaperRoute) {
  const FusionGraph graph(
      3, {MakeEdge(0, 1, 10, 10), MakeEdge(1, 2, 10, 20), MakeEdge(0, 2, 10, 25)},
      30, 10);
  EXPECT_EQ(Spans(MinMacsPath(graph)), (SpanList{{0, 2}}));
}

TEST(OptimizerTest, MinimaxTakesLowerBottleneck) {
  const FusionGraph graph(
      3, {MakeEdge(0, 1, 72, 1), MakeEdge(1, 2, 10, 1), MakeEdge(0, 2, 50, 9)},
      2, 72);
  EXPECT_EQ(Spans(MinimaxRamPath(graph)), (SpanList{{0, 2}}));
  const FusionGraph single(2, {MakeEdge(0, 1, 9, 3)}, 3, 9);
  EXPECT_EQ(Spans(MinimaxRamPath(single)), (SpanList{{0, 1}}));
}

TEST(OptimizerTest, TieBreaks) {
  // Both routes cost 10 MACs; P2 prefers the lower peak, then earlier cuts.
  const FusionGraph graph(
      4,
      {MakeEdge(0, 1, 8, 5), MakeEdge(1, 3, 6, 5), MakeEdge(0, 2, 6, 5),
       MakeEdge(2, 3, 6, 5), MakeEdge(1, 2, 1, 0)},
      10, 8);
  EXPECT_EQ(Spans(MinMacsPath(graph)), (SpanList{{0, 2}, {2, 3}}));

  const FusionGraph even(
      4,
      {MakeEdge(0, 1, 6, 5), MakeEdge(1, 3, 6, 5), MakeEdge(0, 2, 6, 5),
       MakeEdge(2, 3, 6, 5)},
      10, 6);
  EXPECT_EQ(Spans(MinMacsPath(even)), (SpanList{{0, 1}, {1, 3}}));
  EXPECT_EQ(Spans(MinimaxRamPath(even)), (SpanList{{0, 1}, {1, 3}}));
}

TEST(OptimizerTest, SolveP2) {
  const NetworkModel toy = LoadModel(FUSEPLAN_MODELS_DIR "/toy3.json");
  const FusionGraph graph = BuildGraph(toy);
  const auto unbounded = SolveP2(graph, std::nullopt);
  ASSERT_TRUE(unbounded.has_value());
  EXPECT_EQ(unbounded->setting, MinMacsPath(graph));

  EXPECT_FALSE(SolveP2(graph, 139).has_value());
  const auto at_floor = SolveP2(graph, 140);
  ASSERT_TRUE(at_floor.has_value());
  EXPECT_EQ(at_floor->peak_ram_bytes, 140);
  EXPECT_EQ(at_floor->total_macs, 2232);

  const auto mid = SolveP2(graph, 150);
  ASSERT_TRUE(mid.has_value());
  EXPECT_EQ(Spans(mid->setting), (SpanList{{0, 2}, {2, 3}}));
  EXPECT_EQ(mid->total_macs, 1764);
}

TEST(OptimizerTest, SolveP1) {
  const NetworkModel toy = LoadModel(FUSEPLAN_MODELS_DIR "/toy3.json");
  const FusionGraph graph = BuildGraph(toy);

  const auto strict = SolveP1(graph, Rational::Integer(1));
  ASSERT_TRUE(strict.has_value());
  EXPECT_LE(strict->peak_ram_bytes, graph.vanilla_ram());
  EXPECT_EQ(strict->overhead_factor, Rational::Integer(1));

  const auto unbounded = SolveP1(graph, std::nullopt);
  ASSERT_TRUE(unbounded.has_value());
  EXPECT_EQ(unbounded->peak_ram_bytes, PathPeakRam(MinimaxRamPath(graph)));
  EXPECT_EQ(unbounded->peak_ram_bytes, 140);

  // 1764 / 1044 = 1.689...: the [0,2) block is admitted at 1.7, not at 1.6.
  const auto tight = SolveP1(graph, Rational::Parse("1.6"));
  ASSERT_TRUE(tight.has_value());
  EXPECT_EQ(tight->peak_ram_bytes, 164);
  const auto loose = SolveP1(graph, Rational::Parse("1.7"));
  ASSERT_TRUE(loose.has_value());
  EXPECT_EQ(loose->peak_ram_bytes, 145);
  ASSERT_TRUE(loose->candidate_trace.has_value());
  EXPECT_EQ(loose->candidate_trace->size(), 3);
}

TEST(OptimizerTest, FactorCapIsInclusive) {
  const FusionGraph graph(
      3, {MakeEdge(0, 1, 10, 2), MakeEdge(1, 2, 10, 2), MakeEdge(0, 2, 5, 5)},
      4, 10);
  const auto exact = SolveP1(graph, Rational(5, 4));
  ASSERT_TRUE(exact.has_value());
  EXPECT_EQ(exact->peak_ram_bytes, 5);
  const auto below = SolveP1(graph, Rational(124, 100));
  ASSERT_TRUE(below.has_value());
  EXPECT_EQ(below->peak_ram_bytes, 10);
}

TEST(OptimizerTest, ValidateConstraint) {
  EXPECT_THROW(ValidateConstraint(MaxOverheadFactor{Rational(9, 10)}),
               ValueError);
  EXPECT_THROW(ValidateConstraint(MaxPeakRam{0}), ValueError);
  EXPECT_NO_THROW(ValidateConstraint(MaxOverheadFactor{Rational::Integer(1)}));
  EXPECT_NO_THROW(ValidateConstraint(MaxPeakRam{std::nullopt}));
}

TEST(OptimizerTest, HeuristicKeepsSinglesWhenFusionDoesNotHelp) {
  const FusionGraph graph(
      3, {MakeEdge(0, 1, 10, 2), MakeEdge(1, 2, 10, 2), MakeEdge(0, 2, 30, 9)},
      4, 10);
  const PlanResult h = HeuristicHeadFusion(graph);
  EXPECT_EQ(Spans(h.setting), (SpanList{{0, 1}, {1, 2}}));
  EXPECT_EQ(h.overhead_factor, Rational::Integer(1));
}

TEST(OptimizerTest, HeuristicFusesDominantHead) {
  NetworkModel model;
  model.name = "head";
  model.input_shape = {32, 32, 2};
  model.layers = {{LayerKind::kConv2d, 3, 1, 1, 2, 16},
                  {LayerKind::kDwConv2d, 3, 2, 1, 16, 16},
                  {LayerKind::kConv2d, 1, 1, 0, 16, 4},
                  {LayerKind::kConv2d, 3, 1, 1, 4, 4}};
  const FusionGraph graph = BuildGraph(model);
  const PlanResult h = HeuristicHeadFusion(graph);
  EXPECT_GT(h.setting.edges.front().dst, 1);
  EXPECT_LT(h.peak_ram_bytes, graph.vanilla_ram());

  const auto planned = SolveP1(graph, h.overhead_factor);
  ASSERT_TRUE(planned.has_value());
  EXPECT_LE(planned->peak_ram_bytes, h.peak_ram_bytes);
}

TEST(OptimizerTest, SweepMonotone) {
  const NetworkModel toy = LoadModel(FUSEPLAN_MODELS_DIR "/toy3.json");
  const FusionGraph graph = BuildGraph(toy);
  EXPECT_TRUE(Sweep(graph, {}).empty());

  const std::vector<Constraint> p2 = {MaxPeakRam{16}, MaxPeakRam{100},
                                      MaxPeakRam{145}, MaxPeakRam{150},
                                      MaxPeakRam{1000}};
  const auto rows = Sweep(graph, p2);
  ASSERT_EQ(rows.size(), p2.size());
  EXPECT_FALSE(rows[0].result.has_value());
  EXPECT_FALSE(rows[1].result.has_value());
  std::int64_t last_macs = INT64_MAX;
  for (size_t i = 2; i < rows.size(); ++i) {
    ASSERT_TRUE(rows[i].result.has_value());
    EXPECT_LE(rows[i].result->total_macs, last_macs);
    last_macs = rows[i].result->total_macs;
  }
  EXPECT_TRUE(rows[3].same_as_above);

  const std::vector<Constraint> p1 = {
      MaxOverheadFactor{Rational::Parse("1.1")},
      MaxOverheadFactor{Rational::Parse("1.5")},
      MaxOverheadFactor{Rational::Parse("2")}, MaxOverheadFactor{}};
  std::int64_t last_ram = INT64_MAX;
  for (const SweepEntry& e : Sweep(graph, p1)) {
    ASSERT_TRUE(e.result.has_value());
    EXPECT_LE(e.result->peak_ram_bytes, last_ram);
    last_ram = e.result->peak_ram_bytes;
  }
}

TEST(OptimizerTest, MatchesBruteForceOnCompleteDags) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const FusionGraph graph = CompleteDag(8, seed);
    EXPECT_EQ(MakePlanResult(graph, MinMacsPath(graph)).setting,
              BruteForce(graph, MaxPeakRam{})->setting);
    EXPECT_EQ(MakePlanResult(graph, MinimaxRamPath(graph)).setting,
              BruteForce(graph, MaxOverheadFactor{})->setting);
    for (std::int64_t cap : {50, 200, 400, 700, 1000}) {
      const auto got = SolveP2(graph, cap);
      const auto want = BruteForce(graph, MaxPeakRam{cap});
      ASSERT_EQ(got.has_value(), want.has_value()) << seed << " " << cap;
      if (got) EXPECT_EQ(got->setting, want->setting) << seed << " " << cap;
    }
    for (const char* f : {"1", "1.2", "1.5", "3"}) {
      const auto got = SolveP1(graph, Rational::Parse(f));
      const auto want = BruteForce(graph, MaxOverheadFactor{Rational::Parse(f)});
      ASSERT_EQ(got.has_value(), want.has_value()) << seed << " " << f;
      if (got) EXPECT_EQ(got->setting, want->setting) << seed << " " << f;
    }
  }
}

}  // namespace
}  // namespace fuseplan
