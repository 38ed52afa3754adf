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

#include <algorithm>
#include <limits>
#include <numeric>
#include <tuple>
#include <utility>

#include "fuseplan/errors.h"

namespace fuseplan {
namespace {

constexpr std::int64_t kUnreachable = std::numeric_limits<std::int64_t>::max();

using EdgeMask = std::vector<char>;

std::vector<int> SegmentEnds(const FusionSetting& setting) {
  std::vector<int> ends;
  ends.reserve(setting.edges.size());
  for (const Edge& e : setting.edges) ends.push_back(e.dst);
  return ends;
}

// Nodes from which the target can be reached over masked edges.
std::vector<char> CanReachTarget(const FusionGraph& g, const EdgeMask& mask) {
  std::vector<char> reach(g.node_count(), 0);
  reach[g.target()] = 1;
  for (int v = g.target() - 1; v >= 0; --v) {
    for (int i = g.out_begin(v); i < g.out_end(v) && !reach[v]; ++i) {
      if (mask[i] && reach[g.edge(i).dst]) reach[v] = 1;
    }
  }
  return reach;
}

// Restricts the mask to edges lying on some MAC-shortest source -> target
// path. Every source -> target path of the result has the same MAC total.
std::optional<EdgeMask> TightMacEdges(const FusionGraph& g,
                                      const EdgeMask& mask) {
  const int n = g.node_count();
  std::vector<std::int64_t> from(n, kUnreachable);
  std::vector<std::int64_t> to(n, kUnreachable);
  from[g.source()] = 0;
  for (int v = 0; v < n; ++v) {
    if (from[v] == kUnreachable) continue;
    for (int i = g.out_begin(v); i < g.out_end(v); ++i) {
      if (!mask[i]) continue;
      const Edge& e = g.edge(i);
      from[e.dst] = std::min(from[e.dst], from[v] + e.macs);
    }
  }
  const std::int64_t best = from[g.target()];
  if (best == kUnreachable) return std::nullopt;
  to[g.target()] = 0;
  for (int v = n - 1; v >= 0; --v) {
    for (int i = g.out_begin(v); i < g.out_end(v); ++i) {
      const Edge& e = g.edge(i);
      if (mask[i] && to[e.dst] != kUnreachable) {
        to[v] = std::min(to[v], e.macs + to[e.dst]);
      }
    }
  }
  EdgeMask tight(mask.size(), 0);
  for (int i = 0; i < g.edge_count(); ++i) {
    const Edge& e = g.edge(i);
    tight[i] = mask[i] && from[e.src] != kUnreachable &&
               to[e.dst] != kUnreachable &&
               from[e.src] + e.macs + to[e.dst] == best;
  }
  return tight;
}

// Smallest achievable maximum edge RAM from source to target.
std::optional<std::int64_t> Bottleneck(const FusionGraph& g,
                                       const EdgeMask& mask) {
  std::vector<std::int64_t> level(g.node_count(), kUnreachable);
  level[g.source()] = 0;
  for (int v = 0; v < g.node_count(); ++v) {
    if (level[v] == kUnreachable) continue;
    for (int i = g.out_begin(v); i < g.out_end(v); ++i) {
      if (!mask[i]) continue;
      const Edge& e = g.edge(i);
      level[e.dst] = std::min(level[e.dst], std::max(level[v], e.ram_bytes));
    }
  }
  if (level[g.target()] == kUnreachable) return std::nullopt;
  return level[g.target()];
}

EdgeMask CapRam(const FusionGraph& g, EdgeMask mask, std::int64_t cap) {
  for (int i = 0; i < g.edge_count(); ++i) {
    if (g.edge(i).ram_bytes > cap) mask[i] = 0;
  }
  return mask;
}

// Lexicographically smallest sequence of segment ends among masked paths.
std::optional<FusionSetting> EarliestCuts(const FusionGraph& g,
                                          const EdgeMask& mask) {
  const std::vector<char> reach = CanReachTarget(g, mask);
  if (!reach[g.source()]) return std::nullopt;
  FusionSetting setting;
  for (int v = g.source(); v != g.target();) {
    int next = -1;
    for (int i = g.out_begin(v); i < g.out_end(v); ++i) {
      if (mask[i] && reach[g.edge(i).dst]) {
        next = i;
        break;
      }
    }
    setting.edges.push_back(g.edge(next));
    v = g.edge(next).dst;
  }
  return setting;
}

// (MACs, peak RAM, segment ends) optimum over masked edges.
std::optional<FusionSetting> BestByMacs(const FusionGraph& g,
                                        const EdgeMask& mask) {
  auto tight = TightMacEdges(g, mask);
  if (!tight) return std::nullopt;
  const std::int64_t level = *Bottleneck(g, *tight);
  return EarliestCuts(g, CapRam(g, *std::move(tight), level));
}

// (peak RAM, MACs, segment ends) optimum over masked edges.
std::optional<FusionSetting> BestByRam(const FusionGraph& g,
                                       const EdgeMask& mask) {
  const auto level = Bottleneck(g, mask);
  if (!level) return std::nullopt;
  auto tight = TightMacEdges(g, CapRam(g, mask, *level));
  return EarliestCuts(g, *tight);
}

EdgeMask AllEdges(const FusionGraph& g) {
  return EdgeMask(g.edge_count(), 1);
}

bool WithinOverhead(const PlanResult& r, const std::optional<Rational>& cap) {
  return !cap || r.overhead_factor <= *cap;
}

bool WithinRam(const PlanResult& r, const std::optional<std::int64_t>& cap) {
  return !cap || r.peak_ram_bytes <= *cap;
}

}  // namespace

void ValidateConstraint(const Constraint& constraint) {
  if (const auto* f = std::get_if<MaxOverheadFactor>(&constraint)) {
    if (f->limit && *f->limit < Rational::Integer(1)) {
      throw ValueError("F_max must be at least 1, got " +
                       f->limit->ToString());
    }
  } else if (const auto* p = std::get_if<MaxPeakRam>(&constraint)) {
    if (p->bytes && *p->bytes <= 0) {
      throw ValueError("P_max must be positive");
    }
  }
}

PlanResult MakePlanResult(const FusionGraph& graph, FusionSetting setting) {
  PlanResult result;
  result.peak_ram_bytes = PathPeakRam(setting);
  result.total_macs = PathTotalMacs(setting);
  result.overhead_factor = OverheadFactor(setting, graph);
  result.setting = std::move(setting);
  return result;
}

bool Satisfies(const PlanResult& result, const Constraint& constraint) {
  if (const auto* f = std::get_if<MaxOverheadFactor>(&constraint)) {
    return WithinOverhead(result, f->limit);
  }
  return WithinRam(result, std::get<MaxPeakRam>(constraint).bytes);
}

bool PreferForRam(const FusionSetting& a, const FusionSetting& b) {
  return std::tuple(PathPeakRam(a), PathTotalMacs(a), SegmentEnds(a)) <
         std::tuple(PathPeakRam(b), PathTotalMacs(b), SegmentEnds(b));
}

bool PreferForMacs(const FusionSetting& a, const FusionSetting& b) {
  return std::tuple(PathTotalMacs(a), PathPeakRam(a), SegmentEnds(a)) <
         std::tuple(PathTotalMacs(b), PathPeakRam(b), SegmentEnds(b));
}

FusionSetting MinMacsPath(const FusionGraph& graph) {
  auto setting = BestByMacs(graph, AllEdges(graph));
  if (!setting) throw NoPath("output tensor is unreachable");
  return *std::move(setting);
}

FusionSetting MinimaxRamPath(const FusionGraph& graph) {
  auto setting = BestByRam(graph, AllEdges(graph));
  if (!setting) throw NoPath("output tensor is unreachable");
  return *std::move(setting);
}

std::optional<PlanResult> SolveP2(const FusionGraph& graph,
                                  std::optional<std::int64_t> max_peak_ram) {
  ValidateConstraint(MaxPeakRam{max_peak_ram});
  EdgeMask mask = AllEdges(graph);
  if (max_peak_ram) mask = CapRam(graph, std::move(mask), *max_peak_ram);
  auto setting = BestByMacs(graph, mask);
  if (!setting) return std::nullopt;
  return MakePlanResult(graph, *std::move(setting));
}

std::vector<P1Candidate> P1Candidates(const FusionGraph& graph) {
  std::vector<int> by_ram(graph.edge_count());
  std::iota(by_ram.begin(), by_ram.end(), 0);
  std::stable_sort(by_ram.begin(), by_ram.end(), [&](int a, int b) {
    return graph.edge(a).ram_bytes > graph.edge(b).ram_bytes;
  });

  std::vector<P1Candidate> candidates;
  EdgeMask mask = AllEdges(graph);
  std::optional<FusionSetting> current;
  bool stale = true;
  size_t next = 0;
  for (int iteration = 0; next < by_ram.size(); ++iteration) {
    if (stale) {
      current = BestByMacs(graph, mask);
      if (!current) break;
    }
    const std::int64_t level = graph.edge(by_ram[next]).ram_bytes;
    candidates.push_back(
        {{iteration, level, PathTotalMacs(*current), PathPeakRam(*current)},
         *current});
    while (next < by_ram.size() && graph.edge(by_ram[next]).ram_bytes == level) {
      mask[by_ram[next++]] = 0;
    }
    // A path that survives the deletion stays optimal in the smaller graph:
    // the deletion only removes competitors.
    stale = PathPeakRam(*current) == level;
  }
  return candidates;
}

std::optional<PlanResult> SelectP1(const FusionGraph& graph,
                                   std::span<const P1Candidate> candidates,
                                   std::optional<Rational> max_overhead) {
  const FusionSetting* best = nullptr;
  for (const P1Candidate& c : candidates) {
    if (max_overhead && OverheadFactor(c.setting, graph) > *max_overhead) {
      continue;
    }
    if (best == nullptr || PreferForRam(c.setting, *best)) best = &c.setting;
  }
  if (best == nullptr) return std::nullopt;
  PlanResult result = MakePlanResult(graph, *best);
  std::vector<CandidateRecord> trace;
  for (const P1Candidate& c : candidates) trace.push_back(c.record);
  result.candidate_trace = std::move(trace);
  return result;
}

std::optional<PlanResult> SolveP1(const FusionGraph& graph,
                                  std::optional<Rational> max_overhead) {
  ValidateConstraint(MaxOverheadFactor{max_overhead});
  if (!max_overhead) return MakePlanResult(graph, MinimaxRamPath(graph));
  return SelectP1(graph, P1Candidates(graph), max_overhead);
}

std::optional<PlanResult> Solve(const FusionGraph& graph,
                                const Constraint& constraint) {
  if (const auto* f = std::get_if<MaxOverheadFactor>(&constraint)) {
    return SolveP1(graph, f->limit);
  }
  return SolveP2(graph, std::get<MaxPeakRam>(constraint).bytes);
}

PlanResult HeuristicHeadFusion(const FusionGraph& graph) {
  std::optional<FusionSetting> best;
  for (int i = graph.out_begin(graph.source());
       i < graph.out_end(graph.source()); ++i) {
    FusionSetting setting{{graph.edge(i)}};
    bool complete = true;
    for (int v = graph.edge(i).dst; v < graph.target() && complete; ++v) {
      const int single = graph.FindEdge(v, v + 1);
      if (single < 0) {
        complete = false;
      } else {
        setting.edges.push_back(graph.edge(single));
      }
    }
    if (complete && (!best || PreferForRam(setting, *best))) {
      best = std::move(setting);
    }
  }
  if (!best) throw NoPath("graph has no single-layer chain");
  return MakePlanResult(graph, *std::move(best));
}

std::vector<SweepEntry> Sweep(const FusionGraph& graph,
                              std::span<const Constraint> constraints) {
  std::optional<std::vector<P1Candidate>> candidates;
  std::vector<SweepEntry> entries;
  for (const Constraint& constraint : constraints) {
    SweepEntry entry{constraint, std::nullopt, false};
    const auto* f = std::get_if<MaxOverheadFactor>(&constraint);
    if (f != nullptr && f->limit) {
      ValidateConstraint(constraint);
      if (!candidates) candidates = P1Candidates(graph);
      entry.result = SelectP1(graph, *candidates, f->limit);
    } else {
      entry.result = Solve(graph, constraint);
    }
    if (!entries.empty() && entry.result && entries.back().result) {
      entry.same_as_above =
          entry.result->setting == entries.back().result->setting;
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace fuseplan
