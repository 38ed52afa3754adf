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

// Solvers for the two dual fusion problems on a FusionGraph:
//   P1: minimize peak RAM subject to F <= F_max,
//   P2: minimize MACs subject to peak RAM <= P_max.
//
// Ties are broken so that every solver returns one well-defined setting:
// P1 orders settings by (peak RAM, MACs, segment ends), P2 and the plain MAC
// shortest path by (MACs, peak RAM, segment ends). Segment ends compare
// lexicographically, i.e. an earlier first cut wins.

#ifndef FUSEPLAN_OPTIMIZER_H_
#define FUSEPLAN_OPTIMIZER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fuseplan/fusion_graph.h"
#include "fuseplan/rational.h"

namespace fuseplan {

// F <= limit; no limit means unbounded.
struct MaxOverheadFactor {
  std::optional<Rational> limit;

  friend bool operator==(const MaxOverheadFactor&,
                         const MaxOverheadFactor&) = default;
};

// peak RAM <= bytes; no limit means unbounded.
struct MaxPeakRam {
  std::optional<std::int64_t> bytes;

  friend bool operator==(const MaxPeakRam&, const MaxPeakRam&) = default;
};

using Constraint = std::variant<MaxOverheadFactor, MaxPeakRam>;

// Throws ValueError for F_max < 1 or P_max <= 0.
void ValidateConstraint(const Constraint& constraint);

// One step of the P1 candidate construction: the MAC-shortest path of the
// graph that remains after `iteration` rounds of deleting the heaviest-RAM
// edges. `pruned_ram_level` is the RAM level deleted after this step.
struct CandidateRecord {
  int iteration = 0;
  std::int64_t pruned_ram_level = 0;
  std::int64_t macs = 0;
  std::int64_t peak_ram_bytes = 0;
};

struct PlanResult {
  FusionSetting setting;
  std::int64_t peak_ram_bytes = 0;
  std::int64_t total_macs = 0;
  Rational overhead_factor;
  bool constraint_satisfied = true;
  std::optional<std::vector<CandidateRecord>> candidate_trace;
};

PlanResult MakePlanResult(const FusionGraph& graph, FusionSetting setting);
bool Satisfies(const PlanResult& result, const Constraint& constraint);

// Strict "a is preferred over b" under the P1 / P2 orders described above.
bool PreferForRam(const FusionSetting& a, const FusionSetting& b);
bool PreferForMacs(const FusionSetting& a, const FusionSetting& b);

// Unconstrained P2: shortest path by total MACs. Throws NoPath if the target
// is unreachable.
FusionSetting MinMacsPath(const FusionGraph& graph);

// Unconstrained P1: bottleneck path minimizing the largest edge RAM.
FusionSetting MinimaxRamPath(const FusionGraph& graph);

// P2: drop every edge above the RAM cap, then take the MAC-shortest path.
// std::nullopt when the cap disconnects input from output.
std::optional<PlanResult> SolveP2(const FusionGraph& graph,
                                  std::optional<std::int64_t> max_peak_ram);

struct P1Candidate {
  CandidateRecord record;
  FusionSetting setting;
};

// Candidate set S_0, S_1, ... where S_i is the MAC-shortest path of G_i and
// G_{i+1} is G_i without all edges at G_i's maximal RAM. Stops once input and
// output disconnect.
std::vector<P1Candidate> P1Candidates(const FusionGraph& graph);

// Among candidates with F <= limit, the one with the smallest peak RAM.
std::optional<PlanResult> SelectP1(const FusionGraph& graph,
                                   std::span<const P1Candidate> candidates,
                                   std::optional<Rational> max_overhead);

// P1. Unbounded F_max returns the bottleneck path directly; otherwise the
// candidate set is built and filtered. The result carries the candidate
// trace in the bounded case.
std::optional<PlanResult> SolveP1(const FusionGraph& graph,
                                  std::optional<Rational> max_overhead);

std::optional<PlanResult> Solve(const FusionGraph& graph,
                                const Constraint& constraint);

// Baseline that only ever fuses a prefix: [layers 0..j) as one block, every
// later layer on its own. Minimal peak RAM over j, then minimal MACs.
PlanResult HeuristicHeadFusion(const FusionGraph& graph);

struct SweepEntry {
  Constraint constraint;
  std::optional<PlanResult> result;
  // Same setting as the previous entry (both solved).
  bool same_as_above = false;
};

std::vector<SweepEntry> Sweep(const FusionGraph& graph,
                              std::span<const Constraint> constraints);

}  // namespace fuseplan

#endif  // FUSEPLAN_OPTIMIZER_H_
