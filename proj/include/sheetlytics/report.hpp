#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sheetlytics/analysis.hpp"
#include "sheetlytics/backsolve.hpp"
#include "sheetlytics/optimize.hpp"
#include "sheetlytics/simulate.hpp"

namespace sheetlytics {

using Json = nlohmann::ordered_json;

// Full-precision text for a double — exactly the digits the JSON emitter
// produces, so CSV and JSON always carry identical numbers.
std::string full_number_text(double v);

// CSV/JSON cell for an evaluated value: numbers stay numbers, errors
// become their "#..." code, text stays text, empty becomes null.
Json cell_value_json(const CellValue& v);

// A tabular report: the CSV is exactly `columns` + `rows`, and the JSON
// envelope carries the same columns/rows plus kind-specific metadata.
struct ReportTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Json>> rows;
};

std::string to_csv(const ReportTable& table);
std::string csv_escape(const std::string& field);

struct BlockReport {
    std::string kind;
    std::string name;
    Json meta = Json::object();
    ReportTable table;
    std::optional<std::string> svg;
    // additional artifacts, written as <name><suffix> next to the report
    std::vector<std::pair<std::string, std::string>> extra_files;
    // surfaced on the CLI summary line and under meta.warnings
    std::vector<std::string> warnings;
};

// {"schema": "sheetlytics.report.v1", "kind", "name", "meta", "columns", "rows"}
Json block_report_json(const BlockReport& report);

// Presentation helper: 2 decimals, half away from zero (used on summary
// lines, never in CSV/JSON payloads).
std::string format_2dp(double v);

BlockReport build_whatif_report(const std::string& name, const WhatIfReport& data);
BlockReport build_sweep1_report(const std::string& name, const SA1Table& data);
BlockReport build_sweep2_report(const std::string& name, const SA2Grid& data);
BlockReport build_tornado_report(const std::string& name, const TornadoData& data);
BlockReport build_scenario_summary_report(const std::string& name, const ScenarioTable& table,
                                          const SA1Table& data);
BlockReport build_goalseek_report(const std::string& name, const GoalSeekSpec& spec,
                                  const std::vector<GoalSeekResult>& results);
BlockReport build_optimize_report(const std::string& name, const OptimizeSpec& spec,
                                  const OptimizeResult& result);
BlockReport build_simulate_report(const std::string& name, const SimulationSpec& spec,
                                  const SimulationReport& data);

// One row per trial: trial index, sampled inputs, outputs.
ReportTable trial_matrix_table(const SimulationSpec& spec, const SimulationReport& data);

} // namespace sheetlytics
