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
#include <bit>
#include <random>
#include <string>
#include <utility>

#include "fuseplan/cost_model.h"
#include "fuseplan/errors.h"
#include "fuseplan/oracle.h"

namespace fuseplan {
namespace {

std::int64_t FloorDiv(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int32_t Requantize(std::int64_t acc, int shift) {
  return static_cast<std::int32_t>(std::clamp<std::int64_t>(acc >> shift, -128, 127));
}

// One output element of a sliding-window layer. `fetch(y, x, c)` reads the
// layer input and must return 0 for padding positions; every kernel tap of a
// convolution is one MAC, padding included.
template <typename Fetch>
std::int32_t SlidingElement(const LayerSpec& layer, const LayerWeights& w,
                            int oy, int ox, int co, const Fetch& fetch,
                            std::int64_t& macs) {
  const int k = layer.kernel;
  const int y0 = oy * layer.stride - layer.padding;
  const int x0 = ox * layer.stride - layer.padding;
  switch (layer.kind) {
    case LayerKind::kConv2d: {
      std::int64_t acc = 0;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          for (int ci = 0; ci < layer.in_channels; ++ci) {
            const size_t wi =
                ((static_cast<size_t>(ky) * k + kx) * layer.in_channels + ci) *
                    layer.out_channels + co;
            acc += std::int64_t{fetch(y0 + ky, x0 + kx, ci)} * w.values[wi];
            ++macs;
          }
        }
      }
      return Requantize(acc, w.shift);
    }
    case LayerKind::kDwConv2d: {
      std::int64_t acc = 0;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const size_t wi =
              (static_cast<size_t>(ky) * k + kx) * layer.out_channels + co;
          acc += std::int64_t{fetch(y0 + ky, x0 + kx, co)} * w.values[wi];
          ++macs;
        }
      }
      return Requantize(acc, w.shift);
    }
    case LayerKind::kMaxPool2d: {
      std::int32_t best = fetch(y0, x0, co);
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          best = std::max(best, fetch(y0 + ky, x0 + kx, co));
        }
      }
      return best;
    }
    case LayerKind::kAvgPool2d: {
      std::int64_t sum = 0;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) sum += fetch(y0 + ky, x0 + kx, co);
      }
      return static_cast<std::int32_t>(FloorDiv(sum, std::int64_t{k} * k));
    }
    default:
      throw KindError("not a sliding-window layer");
  }
}

struct SinkRun {
  Tensor output;
  std::int64_t macs = 0;
  std::int64_t peak_bytes = 0;
};

// Consumes the input one element at a time: the working set is the output
// accumulators plus the element in flight.
SinkRun RunSink(const LayerSpec& layer, const LayerWeights& w,
                const Tensor& input, int element_bytes) {
  SinkRun run;
  std::vector<std::int64_t> acc(layer.out_channels, 0);
  const auto live = static_cast<std::int64_t>(acc.size()) + 1;
  run.peak_bytes = 0;
  for (int y = 0; y < input.shape.height; ++y) {
    for (int x = 0; x < input.shape.width; ++x) {
      for (int c = 0; c < input.shape.channels; ++c) {
        const std::int64_t element = input.at(y, x, c);
        run.peak_bytes = std::max(run.peak_bytes, live * element_bytes);
        if (layer.kind == LayerKind::kGlobalPool) {
          acc[c] += element;
          continue;
        }
        for (int co = 0; co < layer.out_channels; ++co) {
          acc[co] += element *
                     w.values[static_cast<size_t>(c) * layer.out_channels + co];
          ++run.macs;
        }
      }
    }
  }
  run.output = Tensor({1, 1, layer.out_channels});
  const std::int64_t area =
      std::int64_t{input.shape.height} * input.shape.width;
  for (int co = 0; co < layer.out_channels; ++co) {
    run.output.at(0, 0, co) =
        layer.kind == LayerKind::kGlobalPool
            ? static_cast<std::int32_t>(FloorDiv(acc[co], area))
            : Requantize(acc[co], w.shift);
  }
  return run;
}

Tensor RunSlidingLayer(const LayerSpec& layer, const LayerWeights& w,
                       const Tensor& in, std::int64_t& macs) {
  Tensor out(LayerOutputShape(layer, in.shape));
  const auto fetch = [&](int y, int x, int c) -> std::int32_t {
    if (y < 0 || x < 0 || y >= in.shape.height || x >= in.shape.width) return 0;
    return in.at(y, x, c);
  };
  for (int oy = 0; oy < out.shape.height; ++oy) {
    for (int ox = 0; ox < out.shape.width; ++ox) {
      for (int co = 0; co < out.shape.channels; ++co) {
        out.at(oy, ox, co) = SlidingElement(layer, w, oy, ox, co, fetch, macs);
      }
    }
  }
  return out;
}

// Runs one fusion block under the H-cache scheme. For every output row r of
// the block a band is processed: each layer computes, over the full width and
// one column at a time, only the rows the layer above needs for row r. A
// layer after the first reads its input from a ring of its last k columns;
// the ring is emptied between bands, so vertical overlap is recomputed.
class BlockRunner {
 public:
  BlockRunner(std::span<const LayerSpec> layers,
              std::span<const LayerWeights> weights,
              std::span<const TensorShape> shapes, const Tensor& input,
              int element_bytes)
      : input_(input),
        element_bytes_(element_bytes),
        input_bytes_(TensorBytes(input.shape, element_bytes)) {
    for (size_t i = 0; i < layers.size(); ++i) {
      Stage stage;
      stage.layer = &layers[i];
      stage.weights = &weights[i];
      stage.in = shapes[i];
      stage.out = shapes[i + 1];
      stage.ring.resize(layers[i].kernel);
      stage.ring_col.assign(layers[i].kernel, -1);
      stages_.push_back(std::move(stage));
    }
    macs_.assign(layers.size(), 0);
  }

  Tensor Run() {
    const int last = static_cast<int>(stages_.size()) - 1;
    output_ = Tensor(stages_[last].out);
    for (int r = 0; r < stages_[last].out.height; ++r) {
      StartBand(r);
      for (int x = 0; x < stages_[last].out.width; ++x) Advance(last);
      // Finish the band's full width on every lower layer.
      for (int i = last - 1; i >= 0; --i) {
        while (stages_[i].next_col < stages_[i].out.width) Advance(i);
      }
    }
    return std::move(output_);
  }

  const std::vector<std::int64_t>& macs() const { return macs_; }
  std::int64_t peak_bytes() const { return peak_bytes_; }
  std::int64_t peak_cache_bytes() const { return peak_cache_ * element_bytes_; }

 private:
  struct Stage {
    const LayerSpec* layer = nullptr;
    const LayerWeights* weights = nullptr;
    TensorShape in;
    TensorShape out;
    int row_lo = 0;  // output rows computed in the current band
    int row_hi = 0;
    int next_col = 0;
    std::vector<std::vector<std::int32_t>> ring;  // input columns, slot x % k
    std::vector<int> ring_col;
  };

  void StartBand(int r) {
    const int last = static_cast<int>(stages_.size()) - 1;
    stages_[last].row_lo = stages_[last].row_hi = r;
    for (int i = last; i > 0; --i) {
      const LayerSpec& l = *stages_[i].layer;
      stages_[i - 1].row_lo =
          std::max(stages_[i].row_lo * l.stride - l.padding, 0);
      stages_[i - 1].row_hi =
          std::min(stages_[i].row_hi * l.stride - l.padding + l.kernel - 1,
                   stages_[i].in.height - 1);
    }
    for (Stage& s : stages_) {
      s.next_col = 0;
      for (auto& column : s.ring) column.clear();
      std::fill(s.ring_col.begin(), s.ring_col.end(), -1);
    }
    cache_ = 0;
  }

  std::vector<std::int32_t> ProduceColumn(int i) {
    Stage& s = stages_[i];
    const LayerSpec& l = *s.layer;
    const int x = s.next_col;
    if (i > 0) {
      const int needed =
          std::min(x * l.stride - l.padding + l.kernel - 1, s.in.width - 1);
      while (stages_[i - 1].next_col <= needed) Advance(i - 1);
    }
    const Stage* below = i > 0 ? &stages_[i - 1] : nullptr;
    const auto fetch = [&](int y, int col, int c) -> std::int32_t {
      if (y < 0 || col < 0 || y >= s.in.height || col >= s.in.width) return 0;
      if (below == nullptr) return input_.at(y, col, c);
      const int slot = col % l.kernel;
      if (s.ring_col[slot] != col || y < below->row_lo || y > below->row_hi) {
        throw std::logic_error("line cache miss at row " + std::to_string(y) +
                               ", column " + std::to_string(col));
      }
      return s.ring[slot][static_cast<size_t>(y - below->row_lo) *
                              l.in_channels + c];
    };
    std::vector<std::int32_t> column;
    column.reserve(static_cast<size_t>(s.row_hi - s.row_lo + 1) *
                   l.out_channels);
    for (int y = s.row_lo; y <= s.row_hi; ++y) {
      for (int co = 0; co < l.out_channels; ++co) {
        column.push_back(
            SlidingElement(l, *s.weights, y, x, co, fetch, macs_[i]));
      }
    }
    ++s.next_col;
    return column;
  }

  void Advance(int i) {
    const int x = stages_[i].next_col;
    std::vector<std::int32_t> column = ProduceColumn(i);
    if (i + 1 == static_cast<int>(stages_.size())) {
      for (int co = 0; co < stages_[i].out.channels; ++co) {
        output_.at(stages_[i].row_lo, x, co) = column[co];
      }
      written_ += stages_[i].out.channels;
    } else {
      Stage& up = stages_[i + 1];
      const int slot = x % up.layer->kernel;
      cache_ -= static_cast<std::int64_t>(up.ring[slot].size());
      cache_ += static_cast<std::int64_t>(column.size());
      up.ring[slot] = std::move(column);
      up.ring_col[slot] = x;
      peak_cache_ = std::max(peak_cache_, cache_);
    }
    peak_bytes_ = std::max(peak_bytes_,
                           input_bytes_ + (written_ + cache_) * element_bytes_);
  }

  const Tensor& input_;
  int element_bytes_;
  std::int64_t input_bytes_;
  std::vector<Stage> stages_;
  Tensor output_;
  std::vector<std::int64_t> macs_;
  std::int64_t written_ = 0;  // output elements
  std::int64_t cache_ = 0;    // cached elements across all rings
  std::int64_t peak_cache_ = 0;
  std::int64_t peak_bytes_ = 0;
};

void CheckWeights(const NetworkModel& model, const WeightBank& weights) {
  if (weights.layers.size() != model.layers.size()) {
    throw ValueError("weight bank has " +
                     std::to_string(weights.layers.size()) +
                     " layers, model has " +
                     std::to_string(model.layers.size()));
  }
}

void CheckInput(const NetworkModel& model, const Tensor& input) {
  if (input.shape != model.input_shape ||
      input.values.size() != static_cast<size_t>(input.shape.elements())) {
    throw ShapeError("input tensor " + ToString(input.shape) +
                     " does not match model input " +
                     ToString(model.input_shape));
  }
}

size_t WeightCount(const LayerSpec& l) {
  const auto k2 = static_cast<size_t>(l.kernel) * l.kernel;
  switch (l.kind) {
    case LayerKind::kConv2d:
      return k2 * l.in_channels * l.out_channels;
    case LayerKind::kDwConv2d:
      return k2 * l.out_channels;
    case LayerKind::kDense:
      return static_cast<size_t>(l.in_channels) * l.out_channels;
    default:
      return 0;
  }
}

}  // namespace

WeightBank RandomWeights(const NetworkModel& model, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<int> value(-3, 3);
  WeightBank bank;
  for (const LayerSpec& l : model.layers) {
    LayerWeights w;
    w.values.resize(WeightCount(l));
    for (auto& v : w.values) v = value(rng);
    const size_t fan_in = l.kind == LayerKind::kDwConv2d
                              ? w.values.size() / l.out_channels
                              : (w.values.empty() ? 0
                                                  : w.values.size() / l.out_channels);
    w.shift = fan_in == 0 ? 0 : 1 + static_cast<int>(std::bit_width(fan_in)) / 2;
    bank.layers.push_back(std::move(w));
  }
  return bank;
}

Tensor RandomInput(const TensorShape& shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> value(-3, 3);
  Tensor t(shape);
  for (auto& v : t.values) v = value(rng);
  return t;
}

ExecTrace RunVanilla(const NetworkModel& model, const Tensor& input,
                     const WeightBank& weights) {
  CheckInput(model, input);
  CheckWeights(model, weights);
  ExecTrace trace;
  Tensor current = input;
  for (size_t i = 0; i < model.layers.size(); ++i) {
    const LayerSpec& layer = model.layers[i];
    std::int64_t macs = 0;
    std::int64_t peak = 0;
    if (layer.fusible()) {
      Tensor next = RunSlidingLayer(layer, weights.layers[i], current, macs);
      peak = TensorBytes(current.shape, model.element_bytes) +
             TensorBytes(next.shape, model.element_bytes);
      current = std::move(next);
    } else {
      if (layer.kind == LayerKind::kDense) {
        LayerOutputShape(layer, current.shape);
      }
      SinkRun run =
          RunSink(layer, weights.layers[i], current, model.element_bytes);
      macs = run.macs;
      peak = run.peak_bytes;
      current = std::move(run.output);
    }
    trace.per_layer_macs.push_back(macs);
    trace.mac_count += macs;
    trace.segment_peak_bytes.push_back(peak);
    trace.segment_cache_peak_bytes.push_back(0);
    trace.peak_live_bytes = std::max(trace.peak_live_bytes, peak);
  }
  trace.output = std::move(current);
  return trace;
}

ExecTrace RunFused(const NetworkModel& model, const FusionSetting& setting,
                   const Tensor& input, const WeightBank& weights) {
  CheckInput(model, input);
  CheckWeights(model, weights);
  const std::vector<TensorShape> shapes = InferShapes(model);
  const std::span<const LayerSpec> layers(model.layers);
  const std::span<const LayerWeights> bank(weights.layers);
  const int n = static_cast<int>(layers.size());

  int at = 0;
  for (const Edge& e : setting.edges) {
    if (e.src != at || e.dst <= e.src || e.dst > n) {
      throw InvalidSetting("segment [" + std::to_string(e.src) + ", " +
                           std::to_string(e.dst) +
                           ") does not continue the chain at layer " +
                           std::to_string(at));
    }
    at = e.dst;
  }
  if (at != n) throw InvalidSetting("setting does not cover every layer");

  ExecTrace trace;
  trace.per_layer_macs.assign(n, 0);
  Tensor current = input;
  for (const Edge& e : setting.edges) {
    const int count = e.dst - e.src;
    const auto block = layers.subspan(e.src, count);
    std::int64_t peak = 0;
    std::int64_t cache_peak = 0;
    if (count == 1 && !block[0].fusible()) {
      if (block[0].kind == LayerKind::kDense) {
        LayerOutputShape(block[0], current.shape);
      }
      SinkRun run = RunSink(block[0], bank[e.src], current, model.element_bytes);
      trace.per_layer_macs[e.src] = run.macs;
      peak = run.peak_bytes;
      current = std::move(run.output);
    } else {
      for (const LayerSpec& l : block) {
        if (!l.fusible()) {
          throw InvalidSetting("segment [" + std::to_string(e.src) + ", " +
                               std::to_string(e.dst) + ") fuses a " +
                               std::string(KindName(l.kind)) + " layer");
        }
      }
      const auto block_shapes =
          std::span<const TensorShape>(shapes).subspan(e.src, count + 1);
      if (!BlockFits(block, block_shapes)) {
        throw ShapeError("segment [" + std::to_string(e.src) + ", " +
                         std::to_string(e.dst) + ") tiles do not fit");
      }
      BlockRunner runner(block, bank.subspan(e.src, count), block_shapes,
                         current, model.element_bytes);
      Tensor next = runner.Run();
      for (int i = 0; i < count; ++i) {
        trace.per_layer_macs[e.src + i] = runner.macs()[i];
      }
      peak = runner.peak_bytes();
      cache_peak = runner.peak_cache_bytes();
      current = std::move(next);
    }
    trace.segment_peak_bytes.push_back(peak);
    trace.segment_cache_peak_bytes.push_back(cache_peak);
    trace.peak_live_bytes = std::max(trace.peak_live_bytes, peak);
  }
  for (std::int64_t m : trace.per_layer_macs) trace.mac_count += m;
  trace.output = std::move(current);
  return trace;
}

}  // namespace fuseplan
