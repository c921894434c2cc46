#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sheetlytics/engine.hpp"

namespace sheetlytics {

// One observed output: its value plus, for performance measures, the
// benchmark and the change from base.
struct ObservedOutput {
    CellAddress address;
    std::string label;
    CellValue value;
    std::optional<double> benchmark;
    std::optional<double> change_from_base;
};

struct WhatIfReport {
    std::vector<std::pair<CellAddress, double>> assignments;
    std::vector<ObservedOutput> outputs;
};

// Changes the given inputs and records the outputs. By default the model is
// left in the assigned state, like a live sheet; pass restore=true to put
// the inputs back afterwards.
WhatIfReport what_if(Model& model,
                     const std::vector<std::pair<CellAddress, double>>& assignments,
                     const std::vector<CellAddress>& outputs,
                     bool restore = false);

struct SweepSpec {
    CellAddress parameter;
    std::vector<double> values;
    std::vector<CellAddress> outputs;
};

struct SA1Row {
    double parameter_value = 0;
    std::optional<int> scenario_number;  // set by scenario_summary only
    std::optional<std::string> row_name; //
    std::vector<CellValue> outputs;
};

struct SA1Table {
    CellAddress parameter;
    std::string parameter_label;
    std::vector<CellAddress> outputs;
    std::vector<std::string> output_labels;
    std::vector<SA1Row> rows;
};

// One-parameter sensitivity analysis: runs the parameter through each value
// in order, recording every output, then restores the pre-call state.
// Error-valued outputs are recorded as such and the sweep continues.
SA1Table sweep_one(Model& model, const SweepSpec& spec);

struct AxisSpec {
    CellAddress parameter;
    std::vector<double> values;
};

struct SA2Grid {
    AxisSpec row_axis;
    AxisSpec col_axis;
    std::vector<CellAddress> outputs;
    // one matrix per output, indexed [row][col]
    std::vector<std::vector<std::vector<CellValue>>> tables;
};

// Two-parameter sensitivity analysis over the cross product of the two
// axes; all other inputs stay at their current values. Restores afterwards.
SA2Grid sweep_two(Model& model, const AxisSpec& rows, const AxisSpec& cols,
                  const std::vector<CellAddress>& outputs);

struct TornadoSpecRow {
    CellAddress input;
    std::string label; // defaults to the input's role label
    double low = 0;
    double high = 0;
};

struct TornadoSpec {
    std::vector<TornadoSpecRow> rows;
};

struct TornadoDataRow {
    CellAddress input;
    std::string label;
    double low = 0;
    double high = 0;
    CellValue out_at_low;
    CellValue out_at_high;
    double swing = 0; // |out_at_high - out_at_low|, 0 when either end errored
};

struct TornadoData {
    CellAddress output;
    double base_output = 0;
    bool at_base_case = true; // false => bars pivot off a non-base state
    std::vector<TornadoDataRow> rows; // sorted by swing desc, label asc
};

// One-parameter analyses on every listed input, summarized as swing per
// input. Rows with low > high are rejected up front (no silent swap).
TornadoData tornado(Model& model, const TornadoSpec& spec, const CellAddress& output);

struct ScenarioTable {
    struct Row {
        int number = 0;
        std::string name;
        std::vector<double> values;
    };
    std::vector<CellAddress> columns; // input cells the scenarios cover
    std::vector<Row> rows;
};

// Validates column count per row and (for freshly loaded tables) that
// numbers run 1..S in order.
void validate_scenario_table(const ScenarioTable& table, const Workbook& wb,
                             bool require_contiguous_numbers);

struct ScenarioRun {
    int number = 0;
    std::string name;
};

// Sets every column's input to row k's value (k is the 1-based row
// position) and recalculates. Inputs not covered by the table keep their
// current values. The model is left in the scenario state.
ScenarioRun apply_scenario(Model& model, const ScenarioTable& table, int k);

// Applies every scenario in table order and records the outputs, then
// restores the pre-call state. Recomputed live from the current model.
SA1Table scenario_summary(Model& model, const ScenarioTable& table,
                          const std::vector<CellAddress>& outputs);

} // namespace sheetlytics
