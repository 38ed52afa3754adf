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

// Formatting and driver logic behind the fuseplan command line: size and
// factor parsing, sweep tables, plan and export documents, and the oracle
// verification suite.
//
// Units: 1 kB is 1000 bytes. Overhead factors are exact rationals; tables
// round them for display only.

#ifndef FUSEPLAN_REPORT_H_
#define FUSEPLAN_REPORT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fuseplan/fusion_graph.h"
#include "fuseplan/model_ir.h"
#include "fuseplan/optimizer.h"
#include "fuseplan/rational.h"

namespace fuseplan {

// "4096", "16kB", "1.5MB", "2GB" (decimal units, whole bytes only) or "inf".
// std::nullopt means unbounded. Throws ValueError.
std::optional<std::int64_t> ParseSize(std::string_view text);
// "1.3", "13/10" or "inf".
std::optional<Rational> ParseFactor(std::string_view text);

// "16kB" when divisible by 1000, else "<n>B"; "inf" when unbounded.
std::string FormatSize(std::optional<std::int64_t> bytes);
// Shortest exact decimal if one exists, else "num/den"; "inf" when unbounded.
std::string FormatFactor(const std::optional<Rational>& factor);
// bytes / 1000 with `places` decimals, rounded half up.
std::string FormatKb(std::int64_t bytes, int places);

// "P1:F_max=1.3", "P2:P_max=64kB".
std::string ConstraintLabel(const Constraint& constraint);

// "[0,3)[3,4)": the layer range of every segment.
std::string FormatSetting(const FusionSetting& setting);

enum class RowStatus { kOk, kNoSolution, kSameAsAbove };
std::string_view StatusName(RowStatus status);

struct ReportRow {
  std::string label;
  RowStatus status = RowStatus::kOk;
  // Empty for kNoSolution.
  std::optional<PlanResult> result;
};

// Vanilla and Heuristic rows followed by one row per constraint.
std::vector<ReportRow> SweepRows(const FusionGraph& graph,
                                 std::span<const Constraint> constraints);

enum class TableFormat { kMarkdown, kCsv, kJson };
// "md", "csv" or "json". Throws ValueError.
TableFormat ParseTableFormat(std::string_view text);

std::string RenderTable(std::string_view model_name,
                        std::span<const ReportRow> rows, TableFormat format);

// Segment list shared by plan and export documents.
std::string PlanJson(std::string_view model_name, const Constraint& constraint,
                     const PlanResult& result);
std::string PlanMarkdown(std::string_view model_name,
                         const Constraint& constraint,
                         const PlanResult& result);

// {"schema": 1, "model", "segments": [{"start", "end", "fused"}],
//  "peak_ram_bytes", "total_macs", "overhead_factor": "num/den"}
std::string ExportJson(std::string_view model_name, const PlanResult& result);

struct ExportedSetting {
  std::string model;
  std::vector<std::pair<int, int>> spans;
  std::vector<bool> fused;
  std::int64_t peak_ram_bytes = 0;
  std::int64_t total_macs = 0;
  Rational overhead_factor;
};

// Throws SchemaError.
ExportedSetting ParseExport(std::string_view text);

// Recomputes an exported setting against `graph`. Throws InvalidSetting if
// the spans are not a path of the graph or a fused flag is wrong.
PlanResult RecostExport(const FusionGraph& graph,
                        const ExportedSetting& exported);
bool ExportMatches(const ExportedSetting& exported, const PlanResult& recosted);

// One executed fusion setting in a verification run.
struct SettingCheck {
  std::string setting;
  std::int64_t analytic_macs = 0;
  std::int64_t executed_macs = 0;
  std::int64_t analytic_ram = 0;
  std::int64_t executed_ram = 0;
  bool output_equal = false;

  bool ok() const {
    return output_equal && analytic_macs == executed_macs &&
           executed_ram <= analytic_ram;
  }
};

struct VerifyFailure {
  std::string model;
  std::uint64_t seed = 0;
  std::string setting;
  std::string detail;
};

struct VerifyReport {
  int models = 0;
  int settings = 0;
  int checks = 0;
  std::vector<SettingCheck> rows;
  std::vector<VerifyFailure> failures;

  bool ok() const { return failures.empty(); }
};

// Runs the invariant suite on one model: optimizer against brute force for
// every RAM level and a fixed F_max grid, then every setting through the
// reference executor. Throws TooLarge beyond the enumeration guard.
VerifyReport VerifyModel(const NetworkModel& model, std::uint64_t seed,
                         bool keep_rows);

// VerifyModel on RandomModel(first_seed + i, depth, 12, 6), i < count.
// Throws TooLarge when depth + 1 exceeds the enumeration guard.
VerifyReport VerifyRandom(int count, int depth, std::uint64_t first_seed);

std::string RenderVerify(const VerifyReport& report);

}  // namespace fuseplan

#endif  // FUSEPLAN_REPORT_H_
