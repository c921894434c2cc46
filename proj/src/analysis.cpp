#include "sheetlytics/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace sheetlytics {

namespace {

void require_input(const Model& model, const CellAddress& addr, const char* what) {
    if (!model.workbook().has_input_role(addr))
        throw SheetError(std::string(what) + " " + addr.to_string() +
                         " is not an input (data/decision) cell");
}

ObservedOutput observe(Model& model, const CellAddress& addr) {
    ObservedOutput out;
    out.address = addr;
    out.label = model.workbook().label_for(addr);
    out.value = model.value(addr);
    out.benchmark = model.benchmark(addr);
    if (out.benchmark && out.value.is_number())
        out.change_from_base = out.value.as_number() - *out.benchmark;
    return out;
}

double current_input_value(const Model& model, const CellAddress& addr) {
    return model.workbook().content(addr).number_value();
}

} // namespace

WhatIfReport what_if(Model& model,
                     const std::vector<std::pair<CellAddress, double>>& assignments,
                     const std::vector<CellAddress>& outputs,
                     bool restore) {
    for (const auto& [addr, value] : assignments) {
        require_input(model, addr, "what-if target");
        (void)value;
    }

    std::vector<std::pair<CellAddress, double>> previous;
    previous.reserve(assignments.size());
    for (const auto& [addr, value] : assignments) {
        previous.emplace_back(addr, current_input_value(model, addr));
        model.set_input(addr, value);
    }

    WhatIfReport report;
    report.assignments = assignments;
    for (const CellAddress& addr : outputs)
        report.outputs.push_back(observe(model, addr));

    if (restore) {
        for (const auto& [addr, value] : previous) model.set_input(addr, value);
        model.recalculate();
    }
    return report;
}

SA1Table sweep_one(Model& model, const SweepSpec& spec) {
    if (spec.values.empty()) throw SheetError("sweep has no parameter values");
    require_input(model, spec.parameter, "sweep parameter");

    SA1Table table;
    table.parameter = spec.parameter;
    table.parameter_label = model.workbook().label_for(spec.parameter);
    table.outputs = spec.outputs;
    for (const CellAddress& out : spec.outputs)
        table.output_labels.push_back(model.workbook().label_for(out));

    double original = current_input_value(model, spec.parameter);
    for (double v : spec.values) {
        model.set_input(spec.parameter, v);
        SA1Row row;
        row.parameter_value = v;
        for (const CellAddress& out : spec.outputs)
            row.outputs.push_back(model.value(out));
        table.rows.push_back(std::move(row));
    }
    model.set_input(spec.parameter, original);
    model.recalculate();
    return table;
}

SA2Grid sweep_two(Model& model, const AxisSpec& rows, const AxisSpec& cols,
                  const std::vector<CellAddress>& outputs) {
    if (rows.parameter == cols.parameter)
        throw SheetError("two-parameter sweep needs two distinct cells; got " +
                         rows.parameter.to_string() + " twice");
    if (rows.values.empty() || cols.values.empty())
        throw SheetError("sweep axis has no values");
    require_input(model, rows.parameter, "row parameter");
    require_input(model, cols.parameter, "column parameter");

    SA2Grid grid;
    grid.row_axis = rows;
    grid.col_axis = cols;
    grid.outputs = outputs;
    grid.tables.assign(outputs.size(),
                       std::vector<std::vector<CellValue>>(
                           rows.values.size(), std::vector<CellValue>(cols.values.size())));

    double row_original = current_input_value(model, rows.parameter);
    double col_original = current_input_value(model, cols.parameter);
    for (size_t i = 0; i < rows.values.size(); ++i) {
        model.set_input(rows.parameter, rows.values[i]);
        for (size_t j = 0; j < cols.values.size(); ++j) {
            model.set_input(cols.parameter, cols.values[j]);
            for (size_t o = 0; o < outputs.size(); ++o)
                grid.tables[o][i][j] = model.value(outputs[o]);
        }
    }
    model.set_input(rows.parameter, row_original);
    model.set_input(cols.parameter, col_original);
    model.recalculate();
    return grid;
}

TornadoData tornado(Model& model, const TornadoSpec& spec, const CellAddress& output) {
    std::set<CellAddress> seen;
    for (const TornadoSpecRow& row : spec.rows) {
        require_input(model, row.input, "tornado input");
        if (!seen.insert(row.input).second)
            throw SheetError("tornado input " + row.input.to_string() + " listed twice");
        if (row.low > row.high)
            throw SheetError("tornado row " + row.input.to_string() + ": low " +
                             std::to_string(row.low) + " exceeds high " +
                             std::to_string(row.high));
    }

    TornadoData data;
    data.output = output;
    data.at_base_case = model.at_base_case();
    CellValue base = model.value(output);
    if (!base.is_number())
        throw SheetError("tornado output " + output.to_string() +
                         " is not numeric at the current inputs (" + base.to_string() + ")");
    data.base_output = base.as_number();

    for (const TornadoSpecRow& row : spec.rows) {
        TornadoDataRow out;
        out.input = row.input;
        out.label = row.label.empty() ? model.workbook().label_for(row.input) : row.label;
        out.low = row.low;
        out.high = row.high;

        double original = current_input_value(model, row.input);
        model.set_input(row.input, row.low);
        out.out_at_low = model.value(output);
        model.set_input(row.input, row.high);
        out.out_at_high = model.value(output);
        model.set_input(row.input, original);

        if (out.out_at_low.is_number() && out.out_at_high.is_number())
            out.swing = std::fabs(out.out_at_high.as_number() - out.out_at_low.as_number());
        data.rows.push_back(std::move(out));
    }
    model.recalculate();

    std::sort(data.rows.begin(), data.rows.end(),
              [](const TornadoDataRow& a, const TornadoDataRow& b) {
                  if (a.swing != b.swing) return a.swing > b.swing;
                  if (a.label != b.label) return a.label < b.label;
                  return a.input < b.input;
              });
    return data;
}

void validate_scenario_table(const ScenarioTable& table, const Workbook& wb,
                             bool require_contiguous_numbers) {
    if (table.columns.empty()) throw SheetError("scenario table has no columns");
    for (const CellAddress& col : table.columns)
        if (!wb.has_input_role(col))
            throw SheetError("scenario column " + col.to_string() +
                             " is not an input (data/decision) cell");
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (row.values.size() != table.columns.size())
            throw SheetError("scenario " + std::to_string(row.number) + " (\"" + row.name +
                             "\") has " + std::to_string(row.values.size()) +
                             " values for " + std::to_string(table.columns.size()) +
                             " columns");
        if (require_contiguous_numbers && row.number != static_cast<int>(i) + 1)
            throw SheetError("scenario numbers must run 1.." +
                             std::to_string(table.rows.size()) + " in order; row " +
                             std::to_string(i + 1) + " is numbered " +
                             std::to_string(row.number));
    }
}

ScenarioRun apply_scenario(Model& model, const ScenarioTable& table, int k) {
    if (k < 1 || k > static_cast<int>(table.rows.size()))
        throw SheetError("scenario number " + std::to_string(k) + " out of range 1.." +
                         std::to_string(table.rows.size()));
    validate_scenario_table(table, model.workbook(), false);

    const ScenarioTable::Row& row = table.rows[static_cast<size_t>(k) - 1];
    for (size_t c = 0; c < table.columns.size(); ++c)
        model.set_input(table.columns[c], row.values[c]);
    model.recalculate();
    return ScenarioRun{row.number, row.name};
}

SA1Table scenario_summary(Model& model, const ScenarioTable& table,
                          const std::vector<CellAddress>& outputs) {
    validate_scenario_table(table, model.workbook(), false);

    SA1Table summary;
    summary.parameter_label = "scenario";
    summary.outputs = outputs;
    for (const CellAddress& out : outputs)
        summary.output_labels.push_back(model.workbook().label_for(out));

    std::vector<std::pair<CellAddress, double>> previous;
    for (const CellAddress& col : table.columns)
        previous.emplace_back(col, current_input_value(model, col));

    for (size_t i = 0; i < table.rows.size(); ++i) {
        ScenarioRun run = apply_scenario(model, table, static_cast<int>(i) + 1);
        SA1Row row;
        row.parameter_value = static_cast<double>(run.number);
        row.scenario_number = run.number;
        row.row_name = run.name;
        for (const CellAddress& out : outputs)
            row.outputs.push_back(model.value(out));
        summary.rows.push_back(std::move(row));
    }

    for (const auto& [addr, value] : previous) model.set_input(addr, value);
    model.recalculate();
    return summary;
}

} // namespace sheetlytics
