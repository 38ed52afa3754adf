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

#include <vector>

#include "fuseplan/errors.h"
#include "gtest/gtest.h"

namespace fuseplan {
namespace {

LayerSpec Conv(int k, int s, int p, int c_in, int c_out) {
  return {LayerKind::kConv2d, k, s, p, c_in, c_out};
}

LayerSpec Dw(int k, int s, int p, int c) {
  return {LayerKind::kDwConv2d, k, s, p, c, c};
}

std::vector<int> Tiles(const TilePlan& plan) {
  std::vector<int> out;
  for (const TileStep& s : plan.steps) out.push_back(s.tile);
  return out;
}

std::vector<int> TileStrides(const TilePlan& plan) {
  std::vector<int> out;
  for (const TileStep& s : plan.steps) out.push_back(s.tile_stride);
  return out;
}

TEST(CostModelTest, VanillaMacs) {
  EXPECT_EQ(VanillaMacs(Conv(3, 1, 0, 1, 1), {4, 4, 1}), 36);
  EXPECT_EQ(VanillaMacs(Dw(3, 1, 1, 4), {8, 8, 4}), 2304);
  const LayerSpec dense{LayerKind::kDense, 1, 1, 0, 1024, 256};
  EXPECT_EQ(VanillaMacs(dense, {1, 1, 1024}), 262144);
  const LayerSpec pool{LayerKind::kMaxPool2d, 2, 2, 0, 8, 8};
  EXPECT_EQ(VanillaMacs(pool, {8, 8, 8}), 0);
}

TEST(CostModelTest, PropagateTiles) {
  const std::vector<LayerSpec> one = {Conv(3, 1, 0, 1, 1)};
  EXPECT_EQ(Tiles(PropagateTiles(one)), (std::vector<int>{3}));
  EXPECT_EQ(TileStrides(PropagateTiles(one)), (std::vector<int>{1}));

  const std::vector<LayerSpec> two = {Conv(3, 1, 0, 1, 1), Conv(3, 1, 0, 1, 1)};
  EXPECT_EQ(Tiles(PropagateTiles(two)), (std::vector<int>{5, 3}));
  EXPECT_EQ(TileStrides(PropagateTiles(two)), (std::vector<int>{1, 1}));

  const std::vector<LayerSpec> strided = {Conv(3, 2, 0, 1, 1),
                                          Conv(3, 1, 0, 1, 1)};
  EXPECT_EQ(Tiles(PropagateTiles(strided)), (std::vector<int>{7, 3}));
  EXPECT_EQ(TileStrides(PropagateTiles(strided)), (std::vector<int>{2, 1}));
}

TEST(CostModelTest, PropagateTilesRejectsSinks) {
  const std::vector<LayerSpec> block = {
      Conv(3, 1, 0, 1, 1), {LayerKind::kGlobalPool, 0, 1, 0, 1, 1}};
  EXPECT_THROW(PropagateTiles(block), NotFusible);
  EXPECT_THROW(PropagateTiles({}), NotFusible);
}

TEST(CostModelTest, CacheBufferBytes) {
  const std::vector<LayerSpec> one = {Conv(3, 1, 0, 1, 1)};
  EXPECT_EQ(CacheBufferBytes(PropagateTiles(one), 1), 0);

  const std::vector<LayerSpec> two = {Conv(3, 1, 0, 4, 8), Conv(3, 1, 0, 8, 8)};
  EXPECT_EQ(CacheBufferBytes(PropagateTiles(two), 1), 72);

  const std::vector<LayerSpec> three = {
      Conv(3, 1, 0, 3, 8), Conv(3, 1, 0, 8, 16), Conv(3, 1, 0, 16, 16)};
  const TilePlan plan = PropagateTiles(three);
  EXPECT_EQ(Tiles(plan), (std::vector<int>{7, 5, 3}));
  EXPECT_EQ(CacheBufferBytes(plan, 1), 264);
  EXPECT_EQ(CacheBufferBytes(plan, 2), 528);
}

TEST(CostModelTest, NumTiles) {
  EXPECT_EQ(NumTiles({5, 5, 1}, 0, 3, 1, 3, 1), 9);
  EXPECT_EQ(NumTiles({4, 4, 1}, 0, 4, 2, 3, 1), 2);
  EXPECT_EQ(NumTiles({6, 6, 1}, 1, 5, 2, 3, 2), 6);
  EXPECT_THROW(NumTiles({4, 4, 1}, 0, 5, 1, 3, 1), ShapeError);
}

TEST(CostModelTest, SingleLayerBlockCostsVanilla) {
  const std::vector<LayerSpec> block = {Conv(3, 1, 0, 1, 1)};
  const std::vector<TensorShape> shapes = {{4, 4, 1}, {2, 2, 1}};
  EXPECT_EQ(FusedBlockMacs(block, shapes), 36);
  const BlockCost cost = CostBlock(block, shapes, 1);
  EXPECT_EQ(cost.input_bytes, 16);
  EXPECT_EQ(cost.output_bytes, 4);
  EXPECT_EQ(cost.buffer_bytes, 0);
  EXPECT_EQ(cost.ram_bytes, 20);
  EXPECT_EQ(cost.macs, 36);
}

TEST(CostModelTest, TwoConvBlockRecomputes) {
  const std::vector<LayerSpec> block = {Conv(3, 1, 0, 1, 1),
                                        Conv(3, 1, 0, 1, 1)};
  const std::vector<TensorShape> shapes = {{6, 6, 1}, {4, 4, 1}, {2, 2, 1}};
  // Layer 1: 2 x 4 tiles of 3 rows; layer 2: 2 x 2 tiles of 1 row.
  EXPECT_EQ(FusedBlockMacs(block, shapes), 216 + 36);
  EXPECT_GT(FusedBlockMacs(block, shapes), 16 * 9 + 4 * 9);
  const BlockCost cost = CostBlock(block, shapes, 1);
  EXPECT_EQ(cost.buffer_bytes, 9);
  EXPECT_EQ(cost.ram_bytes, 36 + 4 + 9);
}

TEST(CostModelTest, RamComposesWithBuffer) {
  const std::vector<LayerSpec> block = {Conv(3, 1, 0, 4, 8),
                                        Conv(3, 1, 0, 8, 8)};
  const BlockCost cost = BlockRamBytes(block, {10, 10, 4}, {6, 6, 8}, 1);
  EXPECT_EQ(cost.ram_bytes, 400 + 288 + 72);
}

TEST(CostModelTest, InnerPaddingCountsRealRows) {
  // Edge bands need only two rows of the first layer's output, so the band
  // walk charges 2 + 3 * 4 + 2 = 16 rows where full tiles would give 12.
  const std::vector<LayerSpec> block = {Conv(3, 1, 1, 1, 1),
                                        Conv(3, 1, 1, 1, 1)};
  const std::vector<TensorShape> shapes = {{6, 6, 1}, {6, 6, 1}, {6, 6, 1}};
  EXPECT_EQ(StreamedBlockMacs(block, shapes), 16 * 6 * 9 + 36 * 9);
  EXPECT_EQ(FusedBlockMacs(block, shapes), 16 * 6 * 9 + 36 * 9);
}

TEST(CostModelTest, StreamedAgreesWithClosedFormWithoutInnerPadding) {
  const std::vector<LayerSpec> block = {Conv(3, 2, 1, 2, 4), Dw(3, 1, 0, 4),
                                        Conv(1, 1, 0, 4, 2)};
  const std::vector<TensorShape> shapes = {
      {15, 13, 2}, {8, 7, 4}, {6, 5, 4}, {6, 5, 2}};
  EXPECT_EQ(StreamedBlockMacs(block, shapes), FusedBlockMacs(block, shapes));
}

TEST(CostModelTest, OversizedTileDoesNotFit) {
  // Each layer fits a 1x1 map through its padding, but the fused tile of
  // 5 rows exceeds the padded height of 3.
  const std::vector<LayerSpec> block = {Conv(3, 1, 1, 1, 1),
                                        Conv(3, 1, 1, 1, 1)};
  const std::vector<TensorShape> shapes = {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
  EXPECT_FALSE(BlockFits(block, shapes));
  EXPECT_THROW(CostBlock(block, shapes, 1), ShapeError);
}

TEST(CostModelTest, IterativeSinks) {
  const LayerSpec dense{LayerKind::kDense, 1, 1, 0, 1024, 256};
  EXPECT_EQ(IterativeSinkRamBytes(dense, {1, 1, 1024}, 1), 257);
  const LayerSpec tiny{LayerKind::kDense, 1, 1, 0, 1, 1};
  EXPECT_EQ(IterativeSinkRamBytes(tiny, {1, 1, 1}, 1), 2);
  const LayerSpec pool{LayerKind::kGlobalPool, 0, 1, 0, 64, 64};
  EXPECT_EQ(IterativeSinkRamBytes(pool, {7, 7, 64}, 1), 65);
  EXPECT_THROW(IterativeSinkRamBytes(Conv(1, 1, 0, 1, 1), {1, 1, 1}, 1),
               KindError);
}

}  // namespace
}  // namespace fuseplan
