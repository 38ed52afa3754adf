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

#include "fuseplan/report.h"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <string>

#include "fuseplan/errors.h"
#include "fuseplan/oracle.h"
#include "json.hpp"

namespace fuseplan {
namespace {

using Json = nlohmann::ordered_json;

std::string Lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(c));
  return out;
}

Json SegmentsJson(const FusionSetting& setting) {
  Json segments = Json::array();
  for (const Edge& e : setting.edges) {
    segments.push_back({{"start", e.src}, {"end", e.dst}, {"fused", e.fused()}});
  }
  return segments;
}

std::string RenderFactor(const Rational& f, int places) {
  if (f == Rational::Integer(1)) return "1";
  return f.ToDecimal(places);
}

}  // namespace

std::optional<std::int64_t> ParseSize(std::string_view text) {
  const std::string lower = Lower(text);
  if (lower == "inf") return std::nullopt;
  size_t split = 0;
  while (split < lower.size() &&
         (std::isdigit(static_cast<unsigned char>(lower[split])) ||
          lower[split] == '.')) {
    ++split;
  }
  const std::string unit = lower.substr(split);
  std::int64_t scale = 0;
  if (unit.empty() || unit == "b") {
    scale = 1;
  } else if (unit == "kb") {
    scale = 1000;
  } else if (unit == "mb") {
    scale = 1000 * 1000;
  } else if (unit == "gb") {
    scale = 1000 * 1000 * 1000;
  } else {
    throw ValueError("unknown size unit in '" + std::string(text) + "'");
  }
  const Rational value = Rational::Parse(lower.substr(0, split));
  const __int128 scaled = static_cast<__int128>(value.num()) * scale;
  if (scaled % value.den() != 0) {
    throw ValueError("size '" + std::string(text) + "' is not whole bytes");
  }
  return static_cast<std::int64_t>(scaled / value.den());
}

std::optional<Rational> ParseFactor(std::string_view text) {
  if (Lower(text) == "inf") return std::nullopt;
  return Rational::Parse(text);
}

std::string FormatSize(std::optional<std::int64_t> bytes) {
  if (!bytes) return "inf";
  if (*bytes != 0 && *bytes % 1000 == 0) {
    return std::to_string(*bytes / 1000) + "kB";
  }
  return std::to_string(*bytes) + "B";
}

std::string FormatFactor(const std::optional<Rational>& factor) {
  if (!factor) return "inf";
  __int128 scale = 1;
  for (int places = 0; places <= 18; ++places, scale *= 10) {
    if ((static_cast<__int128>(factor->num()) * scale) % factor->den() == 0) {
      return factor->ToDecimal(places);
    }
  }
  return factor->ToString();
}

std::string FormatKb(std::int64_t bytes, int places) {
  return Rational(bytes, 1000).ToDecimal(places);
}

std::string ConstraintLabel(const Constraint& constraint) {
  if (const auto* p1 = std::get_if<MaxOverheadFactor>(&constraint)) {
    return "P1:F_max=" + FormatFactor(p1->limit);
  }
  return "P2:P_max=" + FormatSize(std::get<MaxPeakRam>(constraint).bytes);
}

std::string FormatSetting(const FusionSetting& setting) {
  std::string out;
  for (const Edge& e : setting.edges) {
    out += "[" + std::to_string(e.src) + "," + std::to_string(e.dst) + ")";
  }
  return out;
}

std::string_view StatusName(RowStatus status) {
  switch (status) {
    case RowStatus::kOk:
      return "ok";
    case RowStatus::kNoSolution:
      return "no-solution";
    case RowStatus::kSameAsAbove:
      return "same-as-above";
  }
  return "?";
}

std::vector<ReportRow> SweepRows(const FusionGraph& graph,
                                 std::span<const Constraint> constraints) {
  std::vector<ReportRow> rows;
  rows.push_back({"Vanilla", RowStatus::kOk,
                  MakePlanResult(graph, SingleLayerSetting(graph))});
  rows.push_back({"Heuristic", RowStatus::kOk, HeuristicHeadFusion(graph)});
  const std::vector<SweepEntry> entries = Sweep(graph, constraints);
  for (const SweepEntry& entry : entries) {
    ReportRow row;
    row.label = ConstraintLabel(entry.constraint);
    row.result = entry.result;
    row.status = !entry.result        ? RowStatus::kNoSolution
                 : entry.same_as_above ? RowStatus::kSameAsAbove
                                       : RowStatus::kOk;
    rows.push_back(std::move(row));
  }
  return rows;
}

TableFormat ParseTableFormat(std::string_view text) {
  if (text == "md") return TableFormat::kMarkdown;
  if (text == "csv") return TableFormat::kCsv;
  if (text == "json") return TableFormat::kJson;
  throw ValueError("unknown table format '" + std::string(text) + "'");
}

std::string RenderTable(std::string_view model_name,
                        std::span<const ReportRow> rows, TableFormat format) {
  std::ostringstream out;
  switch (format) {
    case TableFormat::kMarkdown: {
      out << "## " << model_name << "\n\n"
          << "| Setting | RAM (kB) | MACs | F |\n"
          << "|---|---:|---:|---:|\n";
      for (const ReportRow& row : rows) {
        out << "| " << row.label << " | ";
        if (row.status == RowStatus::kNoSolution) {
          out << "(No Solution) | | |\n";
        } else if (row.status == RowStatus::kSameAsAbove) {
          out << "(SAA) | | |\n";
        } else {
          out << FormatKb(row.result->peak_ram_bytes, 3) << " | "
              << row.result->total_macs << " | "
              << RenderFactor(row.result->overhead_factor, 2) << " |\n";
        }
      }
      break;
    }
    case TableFormat::kCsv: {
      out << "label,status,ram_kb,macs,F\n";
      for (const ReportRow& row : rows) {
        out << row.label << "," << StatusName(row.status) << ",";
        if (row.result) {
          out << FormatKb(row.result->peak_ram_bytes, 3) << ","
              << row.result->total_macs << ","
              << RenderFactor(row.result->overhead_factor, 3);
        } else {
          out << ",,";
        }
        out << "\n";
      }
      break;
    }
    case TableFormat::kJson: {
      Json doc = {{"schema", 1}, {"model", model_name}, {"rows", Json::array()}};
      for (const ReportRow& row : rows) {
        Json entry = {{"label", row.label}, {"status", StatusName(row.status)}};
        if (row.result) {
          entry["peak_ram_bytes"] = row.result->peak_ram_bytes;
          entry["ram_kb"] = FormatKb(row.result->peak_ram_bytes, 3);
          entry["total_macs"] = row.result->total_macs;
          entry["overhead_factor"] = row.result->overhead_factor.ToString();
          entry["segments"] = SegmentsJson(row.result->setting);
        } else {
          entry["peak_ram_bytes"] = nullptr;
          entry["ram_kb"] = nullptr;
          entry["total_macs"] = nullptr;
          entry["overhead_factor"] = nullptr;
          entry["segments"] = nullptr;
        }
        doc["rows"].push_back(std::move(entry));
      }
      out << doc.dump(2) << "\n";
      break;
    }
  }
  return out.str();
}

std::string PlanJson(std::string_view model_name, const Constraint& constraint,
                     const PlanResult& result) {
  Json doc = {{"schema", 1},
              {"model", model_name},
              {"constraint", ConstraintLabel(constraint)},
              {"status", "ok"},
              {"segments", SegmentsJson(result.setting)},
              {"peak_ram_bytes", result.peak_ram_bytes},
              {"total_macs", result.total_macs},
              {"overhead_factor", result.overhead_factor.ToString()}};
  if (result.candidate_trace) {
    Json trace = Json::array();
    for (const CandidateRecord& c : *result.candidate_trace) {
      trace.push_back({{"iteration", c.iteration},
                       {"pruned_ram_level", c.pruned_ram_level},
                       {"macs", c.macs},
                       {"peak_ram_bytes", c.peak_ram_bytes}});
    }
    doc["candidates"] = std::move(trace);
  }
  return doc.dump(2) + "\n";
}

std::string PlanMarkdown(std::string_view model_name,
                         const Constraint& constraint,
                         const PlanResult& result) {
  std::ostringstream out;
  out << "## " << model_name << " " << ConstraintLabel(constraint) << "\n\n"
      << "peak RAM: " << FormatKb(result.peak_ram_bytes, 3) << " kB ("
      << result.peak_ram_bytes << " B)\n"
      << "MACs: " << result.total_macs << "\n"
      << "F: " << result.overhead_factor.ToString() << " ("
      << RenderFactor(result.overhead_factor, 3) << ")\n\n"
      << "| Layers | Fused | RAM (B) | MACs |\n"
      << "|---|---|---:|---:|\n";
  for (const Edge& e : result.setting.edges) {
    out << "| " << e.src << ".." << e.dst - 1 << " | "
        << (e.fused() ? "yes" : "no") << " | " << e.ram_bytes << " | "
        << e.macs << " |\n";
  }
  return out.str();
}

std::string ExportJson(std::string_view model_name, const PlanResult& result) {
  Json doc = {{"schema", 1},
              {"model", model_name},
              {"segments", SegmentsJson(result.setting)},
              {"peak_ram_bytes", result.peak_ram_bytes},
              {"total_macs", result.total_macs},
              {"overhead_factor", result.overhead_factor.ToString()}};
  return doc.dump(2) + "\n";
}

ExportedSetting ParseExport(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("export is not JSON: ") + e.what());
  }
  try {
    if (doc.at("schema").get<int>() != 1) {
      throw SchemaError("unsupported export schema");
    }
    ExportedSetting out;
    out.model = doc.at("model").get<std::string>();
    for (const Json& s : doc.at("segments")) {
      out.spans.emplace_back(s.at("start").get<int>(), s.at("end").get<int>());
      out.fused.push_back(s.at("fused").get<bool>());
    }
    out.peak_ram_bytes = doc.at("peak_ram_bytes").get<std::int64_t>();
    out.total_macs = doc.at("total_macs").get<std::int64_t>();
    out.overhead_factor =
        Rational::Parse(doc.at("overhead_factor").get<std::string>());
    return out;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed export: ") + e.what());
  } catch (const ValueError& e) {
    throw SchemaError(std::string("malformed export: ") + e.what());
  }
}

PlanResult RecostExport(const FusionGraph& graph,
                        const ExportedSetting& exported) {
  FusionSetting setting = SettingFromSpans(graph, exported.spans);
  for (size_t i = 0; i < setting.edges.size(); ++i) {
    if (setting.edges[i].fused() != exported.fused[i]) {
      throw InvalidSetting("segment " + std::to_string(i) +
                           " has a wrong fused flag");
    }
  }
  return MakePlanResult(graph, std::move(setting));
}

bool ExportMatches(const ExportedSetting& exported,
                   const PlanResult& recosted) {
  return exported.peak_ram_bytes == recosted.peak_ram_bytes &&
         exported.total_macs == recosted.total_macs &&
         exported.overhead_factor == recosted.overhead_factor;
}

namespace {

class Verifier {
 public:
  Verifier(const NetworkModel& model, std::uint64_t seed, VerifyReport& report)
      : model_(model), seed_(seed), report_(report) {}

  void Expect(bool ok, const std::string& setting, const std::string& detail) {
    ++report_.checks;
    if (!ok) report_.failures.push_back({model_.name, seed_, setting, detail});
  }

  void ExpectSame(const std::optional<PlanResult>& got,
                  const std::optional<PlanResult>& want,
                  const std::string& what) {
    if (got.has_value() != want.has_value()) {
      Expect(false, got ? FormatSetting(got->setting) : "",
             what + ": solver and brute force disagree on feasibility");
      return;
    }
    if (!got) {
      Expect(true, "", what);
      return;
    }
    Expect(got->setting == want->setting, FormatSetting(got->setting),
           what + ": brute force picks " + FormatSetting(want->setting) +
               " (ram " + std::to_string(want->peak_ram_bytes) + ", macs " +
               std::to_string(want->total_macs) + "), solver ram " +
               std::to_string(got->peak_ram_bytes) + ", macs " +
               std::to_string(got->total_macs));
  }

 private:
  const NetworkModel& model_;
  std::uint64_t seed_;
  VerifyReport& report_;
};

}  // namespace

VerifyReport VerifyModel(const NetworkModel& model, std::uint64_t seed,
                         bool keep_rows) {
  Validate(model);
  const FusionGraph graph = BuildGraph(model);
  if (graph.node_count() > kMaxEnumerationNodes) {
    throw TooLarge("model has " + std::to_string(model.layers.size()) +
                   " layers; verification enumerates at most " +
                   std::to_string(kMaxEnumerationNodes - 1));
  }
  VerifyReport report;
  report.models = 1;
  Verifier v(model, seed, report);

  // Optimizer against exhaustive search.
  {
    const PlanResult macs = MakePlanResult(graph, MinMacsPath(graph));
    v.ExpectSame(macs, BruteForce(graph, MaxPeakRam{}), "min-MAC path");
    const PlanResult ram = MakePlanResult(graph, MinimaxRamPath(graph));
    v.ExpectSame(ram, BruteForce(graph, MaxOverheadFactor{}), "minimax path");

    std::set<std::int64_t> levels;
    for (const Edge& e : graph.edges()) levels.insert(e.ram_bytes);
    levels.insert(*levels.begin() - 1);
    for (std::int64_t level : levels) {
      if (level <= 0) continue;
      const Constraint c = MaxPeakRam{level};
      v.ExpectSame(Solve(graph, c), BruteForce(graph, c), ConstraintLabel(c));
    }
    for (std::string_view f : {"1", "1.1", "1.3", "1.5", "2"}) {
      const Constraint c = MaxOverheadFactor{Rational::Parse(f)};
      auto got = Solve(graph, c);
      if (got) got->candidate_trace.reset();
      v.ExpectSame(got, BruteForce(graph, c), ConstraintLabel(c));
    }
  }

  // Every setting through the reference executor.
  const WeightBank weights = RandomWeights(model, seed);
  const Tensor input = RandomInput(model.input_shape, seed + 1);
  const ExecTrace vanilla = RunVanilla(model, input, weights);
  v.Expect(vanilla.mac_count == graph.vanilla_macs(), "vanilla",
           "executed vanilla MACs " + std::to_string(vanilla.mac_count) +
               " != " + std::to_string(graph.vanilla_macs()));
  v.Expect(vanilla.peak_live_bytes == graph.vanilla_ram(), "vanilla",
           "executed vanilla peak " + std::to_string(vanilla.peak_live_bytes) +
               " != " + std::to_string(graph.vanilla_ram()));
  ForEachSetting(graph, [&](const FusionSetting& setting) {
    ++report.settings;
    const ExecTrace fused = RunFused(model, setting, input, weights);
    SettingCheck row;
    row.setting = FormatSetting(setting);
    row.analytic_macs = PathTotalMacs(setting);
    row.executed_macs = fused.mac_count;
    row.analytic_ram = PathPeakRam(setting);
    row.executed_ram = fused.peak_live_bytes;
    row.output_equal = fused.output == vanilla.output;
    v.Expect(row.output_equal, row.setting, "fused output differs");
    v.Expect(row.analytic_macs == row.executed_macs, row.setting,
             "executed MACs " + std::to_string(row.executed_macs) +
                 " != analytic " + std::to_string(row.analytic_macs));
    v.Expect(row.executed_ram <= row.analytic_ram, row.setting,
             "executed peak " + std::to_string(row.executed_ram) +
                 " > analytic " + std::to_string(row.analytic_ram));
    for (size_t i = 0; i < setting.edges.size(); ++i) {
      v.Expect(fused.segment_cache_peak_bytes[i] <= setting.edges[i].buffer_bytes,
               row.setting, "line cache of segment " + std::to_string(i) +
                                " exceeds its buffer size");
    }
    if (keep_rows) report.rows.push_back(std::move(row));
  });
  return report;
}

VerifyReport VerifyRandom(int count, int depth, std::uint64_t first_seed) {
  if (depth + 1 > kMaxEnumerationNodes) {
    throw TooLarge("depth " + std::to_string(depth) +
                   " exceeds the enumeration guard of " +
                   std::to_string(kMaxEnumerationNodes - 1) + " layers");
  }
  VerifyReport total;
  for (int i = 0; i < count; ++i) {
    const std::uint64_t seed = first_seed + static_cast<std::uint64_t>(i);
    const VerifyReport one =
        VerifyModel(RandomModel(seed, depth, 12, 6), seed, false);
    total.models += one.models;
    total.settings += one.settings;
    total.checks += one.checks;
    total.failures.insert(total.failures.end(), one.failures.begin(),
                          one.failures.end());
  }
  return total;
}

std::string RenderVerify(const VerifyReport& report) {
  std::ostringstream out;
  if (!report.rows.empty()) {
    out << "| Setting | Analytic MACs | Executed MACs | Analytic RAM | "
           "Executed RAM | Equal |\n"
        << "|---|---:|---:|---:|---:|---|\n";
    for (const SettingCheck& row : report.rows) {
      out << "| " << row.setting << " | " << row.analytic_macs << " | "
          << row.executed_macs << " | " << row.analytic_ram << " | "
          << row.executed_ram << " | " << (row.ok() ? "yes" : "NO") << " |\n";
    }
    out << "\n";
  }
  for (const VerifyFailure& f : report.failures) {
    out << "FAIL " << f.model << " seed=" << f.seed;
    if (!f.setting.empty()) out << " setting=" << f.setting;
    out << ": " << f.detail << "\n";
  }
  out << (report.ok() ? "PASS" : "FAIL") << ": " << report.models
      << " models, " << report.settings << " settings, " << report.checks
      << " checks, " << report.failures.size() << " failures\n";
  return out.str();
}

}  // namespace fuseplan
