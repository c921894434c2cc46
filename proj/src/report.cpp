#include "sheetlytics/report.hpp"

#include <cmath>
#include <cstdio>

namespace sheetlytics {

std::string full_number_text(double v) {
    return Json(v).dump();
}

Json cell_value_json(const CellValue& v) {
    if (v.is_number()) return Json(v.as_number());
    if (v.is_text()) return Json(v.as_text());
    if (v.is_boolean()) return Json(v.as_boolean());
    if (v.is_error()) return Json(error_code_text(v.error_code()));
    return Json(nullptr);
}

std::string csv_escape(const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

namespace {

std::string csv_cell(const Json& cell) {
    if (cell.is_null()) return "";
    if (cell.is_string()) return csv_escape(cell.get<std::string>());
    return cell.dump(); // numbers and booleans serialize identically to JSON
}

Json address_json(const CellAddress& addr) { return Json(addr.to_string()); }

} // namespace

std::string to_csv(const ReportTable& table) {
    std::string out;
    for (size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out.push_back(',');
        out += csv_escape(table.columns[i]);
    }
    out.push_back('\n');
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out.push_back(',');
            out += csv_cell(row[i]);
        }
        out.push_back('\n');
    }
    return out;
}

Json block_report_json(const BlockReport& report) {
    Json doc = Json::object();
    doc["schema"] = "sheetlytics.report.v1";
    doc["kind"] = report.kind;
    doc["name"] = report.name;
    doc["meta"] = report.meta;
    if (!report.warnings.empty()) doc["meta"]["warnings"] = report.warnings;
    doc["columns"] = report.table.columns;
    Json rows = Json::array();
    for (const auto& row : report.table.rows) {
        Json r = Json::array();
        for (const Json& cell : row) r.push_back(cell);
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    return doc;
}

std::string format_2dp(double v) {
    double rounded = std::round(v * 100.0) / 100.0; // half away from zero
    char buf[64];
    int n = std::snprintf(buf, sizeof buf, "%.2f", rounded);
    return std::string(buf, buf + n);
}

BlockReport build_whatif_report(const std::string& name, const WhatIfReport& data) {
    BlockReport report;
    report.kind = "whatif";
    report.name = name;
    Json assignments = Json::array();
    for (const auto& [addr, value] : data.assignments)
        assignments.push_back({{"cell", addr.to_string()}, {"value", value}});
    report.meta["assignments"] = std::move(assignments);

    // assigned inputs ride along in every row for verifiability
    for (const auto& [addr, value] : data.assignments) {
        report.table.columns.push_back(addr.to_string());
        (void)value;
    }
    report.table.columns.insert(report.table.columns.end(),
                                {"cell", "label", "value", "benchmark", "change_from_base"});
    for (const ObservedOutput& out : data.outputs) {
        std::vector<Json> row;
        for (const auto& [addr, value] : data.assignments) {
            row.push_back(Json(value));
            (void)addr;
        }
        row.push_back(address_json(out.address));
        row.push_back(Json(out.label));
        row.push_back(cell_value_json(out.value));
        row.push_back(out.benchmark ? Json(*out.benchmark) : Json(nullptr));
        row.push_back(out.change_from_base ? Json(*out.change_from_base) : Json(nullptr));
        report.table.rows.push_back(std::move(row));
    }
    return report;
}

BlockReport build_sweep1_report(const std::string& name, const SA1Table& data) {
    BlockReport report;
    report.kind = "sweep1";
    report.name = name;
    report.meta["parameter"] = data.parameter.to_string();
    report.meta["parameter_label"] = data.parameter_label;
    Json outs = Json::array();
    for (size_t i = 0; i < data.outputs.size(); ++i)
        outs.push_back({{"cell", data.outputs[i].to_string()},
                        {"label", data.output_labels[i]}});
    report.meta["outputs"] = std::move(outs);

    report.table.columns = {"parameter"};
    for (const CellAddress& out : data.outputs)
        report.table.columns.push_back(out.to_string());
    for (const SA1Row& row : data.rows) {
        std::vector<Json> cells{Json(row.parameter_value)};
        for (const CellValue& v : row.outputs) cells.push_back(cell_value_json(v));
        report.table.rows.push_back(std::move(cells));
    }
    return report;
}

BlockReport build_sweep2_report(const std::string& name, const SA2Grid& data) {
    BlockReport report;
    report.kind = "sweep2";
    report.name = name;
    report.meta["row_parameter"] = data.row_axis.parameter.to_string();
    report.meta["row_values"] = data.row_axis.values;
    report.meta["col_parameter"] = data.col_axis.parameter.to_string();
    report.meta["col_values"] = data.col_axis.values;

    // one table per output in the JSON; the CSV is the same numbers in
    // long form
    Json tables = Json::array();
    for (size_t o = 0; o < data.outputs.size(); ++o) {
        Json matrix = Json::array();
        for (const auto& row : data.tables[o]) {
            Json r = Json::array();
            for (const CellValue& v : row) r.push_back(cell_value_json(v));
            matrix.push_back(std::move(r));
        }
        tables.push_back({{"output", data.outputs[o].to_string()},
                          {"matrix", std::move(matrix)}});
    }
    report.meta["tables"] = std::move(tables);

    report.table.columns = {"output", "row_value", "col_value", "value"};
    for (size_t o = 0; o < data.outputs.size(); ++o)
        for (size_t i = 0; i < data.row_axis.values.size(); ++i)
            for (size_t j = 0; j < data.col_axis.values.size(); ++j)
                report.table.rows.push_back({
                    address_json(data.outputs[o]),
                    Json(data.row_axis.values[i]),
                    Json(data.col_axis.values[j]),
                    cell_value_json(data.tables[o][i][j]),
                });
    return report;
}

BlockReport build_tornado_report(const std::string& name, const TornadoData& data) {
    BlockReport report;
    report.kind = "tornado";
    report.name = name;
    report.meta["output"] = data.output.to_string();
    report.meta["base_output"] = data.base_output;
    report.meta["at_base_case"] = data.at_base_case;
    if (!data.at_base_case)
        report.warnings.push_back("inputs are not at the base case; bars pivot "
                                  "around the current values");

    report.table.columns = {"label", "input", "low", "high",
                            "output_at_low", "output_at_high", "swing"};
    for (const TornadoDataRow& row : data.rows) {
        report.table.rows.push_back({
            Json(row.label),
            address_json(row.input),
            Json(row.low),
            Json(row.high),
            cell_value_json(row.out_at_low),
            cell_value_json(row.out_at_high),
            Json(row.swing),
        });
    }
    return report;
}

BlockReport build_scenario_summary_report(const std::string& name, const ScenarioTable& table,
                                          const SA1Table& data) {
    BlockReport report;
    report.kind = "scenario";
    report.name = name;
    Json cols = Json::array();
    for (const CellAddress& c : table.columns) cols.push_back(c.to_string());
    report.meta["scenario_columns"] = std::move(cols);
    Json outs = Json::array();
    for (size_t i = 0; i < data.outputs.size(); ++i)
        outs.push_back({{"cell", data.outputs[i].to_string()},
                        {"label", data.output_labels[i]}});
    report.meta["outputs"] = std::move(outs);

    // transparency: the input values used ride along in the summary rows
    report.table.columns = {"number", "name"};
    for (const CellAddress& c : table.columns)
        report.table.columns.push_back(c.to_string());
    for (const CellAddress& out : data.outputs)
        report.table.columns.push_back(out.to_string());

    for (size_t i = 0; i < data.rows.size(); ++i) {
        const SA1Row& row = data.rows[i];
        std::vector<Json> cells;
        cells.push_back(Json(row.scenario_number ? *row.scenario_number
                                                 : static_cast<int>(i) + 1));
        cells.push_back(Json(row.row_name.value_or("")));
        const ScenarioTable::Row& src = table.rows[i];
        for (double v : src.values) cells.push_back(Json(v));
        for (const CellValue& v : row.outputs) cells.push_back(cell_value_json(v));
        report.table.rows.push_back(std::move(cells));
    }
    return report;
}

BlockReport build_goalseek_report(const std::string& name, const GoalSeekSpec& spec,
                                  const std::vector<GoalSeekResult>& results) {
    BlockReport report;
    report.kind = "goalseek";
    report.name = name;
    report.meta["set_cell"] = spec.set_cell.to_string();
    report.meta["target"] = spec.target;
    report.meta["by_changing"] = spec.by_changing.to_string();
    report.meta["tolerance"] = spec.tolerance;
    report.meta["max_iterations"] = spec.max_iterations;

    report.table.columns = {"start", "status", "solution", "achieved", "iterations",
                            "residual", "note"};
    for (const GoalSeekResult& r : results) {
        bool solved = r.solution.has_value();
        report.table.rows.push_back({
            Json(r.start),
            Json(goal_seek_status_text(r.status)),
            solved ? Json(*r.solution) : Json(nullptr),
            solved ? Json(r.achieved) : Json(nullptr),
            Json(r.iterations),
            solved ? Json(r.residual) : Json(nullptr),
            Json(r.note),
        });
    }
    return report;
}

BlockReport build_optimize_report(const std::string& name, const OptimizeSpec& spec,
                                  const OptimizeResult& result) {
    BlockReport report;
    report.kind = "optimize";
    report.name = name;
    report.meta["objective"] = spec.objective.to_string();
    report.meta["direction"] =
        spec.direction == OptimizeDirection::Maximize ? "maximize" : "minimize";
    Json vars = Json::array();
    for (const OptimizeVariable& v : spec.variables)
        vars.push_back({{"cell", v.cell.to_string()},
                        {"lower", v.lower},
                        {"upper", v.upper}});
    report.meta["variables"] = std::move(vars);
    report.meta["grid_points"] = spec.grid_points;
    if (result.multimodal_warning)
        report.warnings.push_back("refinement left the best grid cell; the objective "
                                  "may be multimodal");
    if (result.dependency_warning)
        report.warnings.push_back("objective does not depend on every variable");

    report.table.columns.clear();
    for (const OptimizeVariable& v : spec.variables)
        report.table.columns.push_back(v.cell.to_string());
    report.table.columns.insert(report.table.columns.end(),
                                {"best_value", "evaluations", "multimodal_warning",
                                 "dependency_warning"});
    std::vector<Json> row;
    for (double x : result.best_point) row.push_back(Json(x));
    row.push_back(Json(result.best_value));
    row.push_back(Json(result.evaluations));
    row.push_back(Json(result.multimodal_warning));
    row.push_back(Json(result.dependency_warning));
    report.table.rows.push_back(std::move(row));
    return report;
}

BlockReport build_simulate_report(const std::string& name, const SimulationSpec& spec,
                                  const SimulationReport& data) {
    BlockReport report;
    report.kind = "simulate";
    report.name = name;
    report.meta["trials"] = data.trials;
    report.meta["seed"] = spec.seed;
    report.meta["failures"] = data.failures;
    report.meta["error_status"] = data.error_status;
    if (data.failures > 0)
        report.warnings.push_back(std::to_string(data.failures) + " of " +
                                  std::to_string(data.trials) + " trials failed");
    Json bindings = Json::array();
    for (const auto& [addr, dist] : spec.bindings)
        bindings.push_back({{"cell", addr.to_string()},
                            {"distribution", dist.to_string()}});
    report.meta["bindings"] = std::move(bindings);

    Json thresholds = Json::array();
    for (const ThresholdResult& t : data.thresholds)
        thresholds.push_back({{"output", t.spec.output.to_string()},
                              {"op", t.spec.greater_or_equal ? ">=" : "<="},
                              {"level", t.spec.level},
                              {"probability", t.probability}});
    report.meta["thresholds"] = std::move(thresholds);

    Json histograms = Json::array();
    for (const OutputStats& s : data.outputs)
        histograms.push_back({{"output", s.address.to_string()},
                              {"lo", s.histogram.lo},
                              {"hi", s.histogram.hi},
                              {"counts", s.histogram.counts}});
    report.meta["histograms"] = std::move(histograms);

    report.table.columns = {"output", "label", "n",   "mean", "median", "stddev", "min",
                            "p1",     "p5",    "p10", "p25",  "p50",    "p75",    "p90",
                            "p95",    "p99",   "max"};
    for (const OutputStats& s : data.outputs) {
        std::vector<Json> row{address_json(s.address), Json(s.label), Json(s.n)};
        if (s.n == 0) {
            while (row.size() < report.table.columns.size()) row.push_back(Json(nullptr));
        } else {
            row.push_back(Json(s.mean));
            row.push_back(Json(s.median));
            row.push_back(Json(s.stddev));
            row.push_back(Json(s.min));
            for (int p : {1, 5, 10, 25, 50, 75, 90, 95, 99})
                row.push_back(Json(s.percentiles.at(p)));
            row.push_back(Json(s.max));
        }
        report.table.rows.push_back(std::move(row));
    }
    return report;
}

ReportTable trial_matrix_table(const SimulationSpec& spec, const SimulationReport& data) {
    ReportTable table;
    table.columns = {"trial"};
    for (const auto& [addr, dist] : spec.bindings) {
        table.columns.push_back(addr.to_string());
        (void)dist;
    }
    for (const CellAddress& out : spec.outputs) table.columns.push_back(out.to_string());
    for (const TrialRecord& rec : data.trial_matrix) {
        std::vector<Json> row{Json(rec.trial)};
        for (double x : rec.inputs) row.push_back(Json(x));
        for (const CellValue& v : rec.outputs) row.push_back(cell_value_json(v));
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace sheetlytics
