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

// fuseplan: plans fusion settings for CNN models under RAM or compute limits.
//
//   fuseplan plan   MODEL (--p1 F_MAX | --p2 P_MAX) [--format json|md]
//   fuseplan sweep  MODEL (--p1-grid LIST | --p2-grid LIST) [--format md|csv|json]
//   fuseplan verify (MODEL | --random N [--depth D] [--seed S])
//   fuseplan export MODEL (--p1 F_MAX | --p2 P_MAX) --out PATH
//
// Exit codes: 0 success, 1 input or I/O error, 2 no solution, 3 verification
// guard exceeded. verify exits 1 when any check fails.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fuseplan/errors.h"
#include "fuseplan/fusion_graph.h"
#include "fuseplan/model_ir.h"
#include "fuseplan/optimizer.h"
#include "fuseplan/report.h"

namespace {

using namespace fuseplan;  // NOLINT

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kNoSolution = 2;
constexpr int kGuard = 3;

struct CommonFlags {
  std::string model_path;
  std::optional<int> element_bytes;
  std::string graph_dump;
};

NetworkModel LoadWithOverrides(const CommonFlags& flags) {
  NetworkModel model = LoadModel(flags.model_path);
  if (flags.element_bytes) {
    model.element_bytes = *flags.element_bytes;
    Validate(model);
  }
  return model;
}

FusionGraph GraphFor(const NetworkModel& model, const CommonFlags& flags) {
  FusionGraph graph = BuildGraph(model);
  if (!flags.graph_dump.empty()) {
    std::ofstream out(flags.graph_dump);
    out << DumpGraphJson(graph);
    if (!out) throw Error("cannot write " + flags.graph_dump);
  }
  return graph;
}

Constraint ConstraintFrom(const std::string& p1, const std::string& p2) {
  Constraint c = p1.empty() ? Constraint(MaxPeakRam{ParseSize(p2)})
                            : Constraint(MaxOverheadFactor{ParseFactor(p1)});
  ValidateConstraint(c);
  return c;
}

std::vector<Constraint> GridFrom(const std::vector<std::string>& p1,
                                 const std::vector<std::string>& p2) {
  std::vector<Constraint> grid;
  for (const std::string& f : p1) grid.push_back(MaxOverheadFactor{ParseFactor(f)});
  for (const std::string& p : p2) grid.push_back(MaxPeakRam{ParseSize(p)});
  for (const Constraint& c : grid) ValidateConstraint(c);
  return grid;
}

void AddCommon(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--element-bytes", flags.element_bytes,
                  "Bytes per tensor element (overrides the model file)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--graph-dump", flags.graph_dump,
                  "Write the fusion graph as JSON to this path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fusion-setting planner for CNN inference on small devices"};
  app.require_subcommand(1);

  CommonFlags common;
  std::string p1, p2, plan_format, sweep_format, out_path;
  std::vector<std::string> p1_grid, p2_grid;
  int random_count = 0;
  int depth = 5;
  std::uint64_t seed = 1;

  CLI::App* plan = app.add_subcommand("plan", "Solve one constraint");
  plan->add_option("model", common.model_path, "Model JSON")->required();
  auto* plan_p1 = plan->add_option("--p1", p1, "P1: minimize RAM, F <= F_MAX");
  auto* plan_p2 = plan->add_option("--p2", p2, "P2: minimize MACs, RAM <= P_MAX");
  plan_p1->excludes(plan_p2);
  plan->add_option("--format", plan_format, "json or md")
      ->check(CLI::IsMember({"json", "md"}))
      ->default_val("json");
  AddCommon(plan, common);

  CLI::App* sweep = app.add_subcommand("sweep", "Solve a grid of constraints");
  sweep->add_option("model", common.model_path, "Model JSON")->required();
  auto* grid_p1 = sweep->add_option("--p1-grid", p1_grid, "F_max values")
                      ->delimiter(',');
  auto* grid_p2 = sweep->add_option("--p2-grid", p2_grid, "P_max values")
                      ->delimiter(',');
  grid_p1->excludes(grid_p2);
  sweep->add_option("--format", sweep_format, "md, csv or json")
      ->check(CLI::IsMember({"md", "csv", "json"}))
      ->default_val("md");
  AddCommon(sweep, common);

  CLI::App* verify = app.add_subcommand("verify", "Run the oracle suite");
  auto* verify_model =
      verify->add_option("model", common.model_path, "Model JSON");
  auto* verify_random = verify->add_option("--random", random_count,
                                           "Number of random models");
  verify_model->excludes(verify_random);
  verify->add_option("--depth", depth, "Layers per random model");
  verify->add_option("--seed", seed, "First random seed");
  verify->add_option("--element-bytes", common.element_bytes,
                     "Bytes per tensor element (overrides the model file)")
      ->check(CLI::PositiveNumber);

  CLI::App* exp = app.add_subcommand("export", "Write a fusion setting file");
  exp->add_option("model", common.model_path, "Model JSON")->required();
  auto* exp_p1 = exp->add_option("--p1", p1, "P1: minimize RAM, F <= F_MAX");
  auto* exp_p2 = exp->add_option("--p2", p2, "P2: minimize MACs, RAM <= P_MAX");
  exp_p1->excludes(exp_p2);
  exp->add_option("--out", out_path, "Output path")->required();
  AddCommon(exp, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (plan->parsed() || exp->parsed()) {
      if (p1.empty() == p2.empty()) {
        std::cerr << "error: give exactly one of --p1 or --p2\n";
        return kInputError;
      }
      const Constraint constraint = ConstraintFrom(p1, p2);
      const NetworkModel model = LoadWithOverrides(common);
      const FusionGraph graph = GraphFor(model, common);
      const std::optional<PlanResult> result = Solve(graph, constraint);
      if (!result) {
        std::cerr << "no solution: " << ConstraintLabel(constraint)
                  << " cannot be met by " << model.name << "\n";
        if (plan->parsed() && plan_format == "json") {
          std::cout << "{\n  \"schema\": 1,\n  \"model\": \"" << model.name
                    << "\",\n  \"constraint\": \""
                    << ConstraintLabel(constraint)
                    << "\",\n  \"status\": \"no-solution\"\n}\n";
        }
        return kNoSolution;
      }
      if (plan->parsed()) {
        std::cout << (plan_format == "md"
                          ? PlanMarkdown(model.name, constraint, *result)
                          : PlanJson(model.name, constraint, *result));
        return kOk;
      }
      std::ofstream out(out_path);
      out << ExportJson(model.name, *result);
      out.close();
      if (!out) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return kInputError;
      }
      return kOk;
    }

    if (sweep->parsed()) {
      if (p1_grid.empty() && p2_grid.empty()) {
        std::cerr << "error: give --p1-grid or --p2-grid\n";
        return kInputError;
      }
      const std::vector<Constraint> grid = GridFrom(p1_grid, p2_grid);
      const NetworkModel model = LoadWithOverrides(common);
      const FusionGraph graph = GraphFor(model, common);
      const std::vector<ReportRow> rows = SweepRows(graph, grid);
      std::cout << RenderTable(model.name, rows, ParseTableFormat(sweep_format));
      return kOk;
    }

    if (verify->parsed()) {
      VerifyReport report;
      if (!common.model_path.empty()) {
        report = VerifyModel(LoadWithOverrides(common), seed, true);
      } else if (random_count > 0) {
        report = VerifyRandom(random_count, depth, seed);
      } else {
        std::cerr << "error: give a model path or --random N\n";
        return kInputError;
      }
      std::cout << RenderVerify(report);
      return report.ok() ? kOk : kInputError;
    }
  } catch (const TooLarge& e) {
    std::cerr << "guard: " << e.what() << "\n";
    return kGuard;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
