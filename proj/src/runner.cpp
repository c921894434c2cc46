#include "sheetlytics/runner.hpp"

#include <filesystem>

#include "sheetlytics/svg.hpp"

namespace sheetlytics {

namespace {

CellAddress block_address(const Model& model, const std::string& field, int lineno) {
    CellAddress addr;
    try {
        addr = parse_address(field);
    } catch (const ParseError& e) {
        throw ParseError(e.what(), lineno);
    }
    if (!model.workbook().has_cell(addr))
        throw ParseError("cell " + addr.to_string() + " does not exist in the model", lineno);
    return addr;
}

std::vector<CellAddress> output_list(const Model& model, const SpecBlock& block) {
    std::vector<CellAddress> outputs;
    for (const SpecLine& line : block.lines) {
        if (line.key != "output") continue;
        for (const std::string& f : line.fields)
            outputs.push_back(block_address(model, f, line.lineno));
    }
    if (outputs.empty())
        throw ParseError("block [" + block.kind + " " + block.name +
                             "] needs at least one 'output'",
                         block.lineno);
    return outputs;
}

std::vector<double> number_list(const SpecLine& line) {
    std::vector<double> out;
    for (const std::string& f : line.fields) out.push_back(spec_number(f, line.lineno));
    if (out.empty()) throw ParseError("'" + line.key + "' needs values", line.lineno);
    return out;
}

BlockReport run_whatif(WorkbookDocument& doc, const SpecBlock& block) {
    std::vector<std::pair<CellAddress, double>> assignments;
    for (const SpecLine& line : block.lines) {
        if (line.key != "set") continue;
        if (line.fields.size() != 2)
            throw ParseError("'set' needs: set ADDR VALUE", line.lineno);
        assignments.emplace_back(block_address(doc.model, line.fields[0], line.lineno),
                                 spec_number(line.fields[1], line.lineno));
    }
    if (assignments.empty())
        throw ParseError("whatif block needs at least one 'set'", block.lineno);
    bool restore = false;
    if (const SpecLine* line = block.optional("restore"))
        restore = spec_boolean(line->fields.at(0), line->lineno);

    WhatIfReport data = what_if(doc.model, assignments, output_list(doc.model, block), restore);
    return build_whatif_report(block.name, data);
}

BlockReport run_sweep1(WorkbookDocument& doc, const SpecBlock& block, bool with_svg) {
    SweepSpec spec;
    const SpecLine& param = block.required("parameter");
    spec.parameter = block_address(doc.model, param.fields.at(0), param.lineno);
    std::vector<std::string> values = block.all_fields("values");
    if (values.empty()) throw ParseError("sweep1 block needs 'values'", block.lineno);
    for (const std::string& v : values) spec.values.push_back(spec_number(v, block.lineno));
    spec.outputs = output_list(doc.model, block);

    SA1Table data = sweep_one(doc.model, spec);
    BlockReport report = build_sweep1_report(block.name, data);
    if (with_svg) report.svg = render_sweep_svg(data);
    return report;
}

BlockReport run_sweep2(WorkbookDocument& doc, const SpecBlock& block) {
    AxisSpec rows, cols;
    const SpecLine& row = block.required("row");
    rows.parameter = block_address(doc.model, row.fields.at(0), row.lineno);
    rows.values = number_list(block.required("row_values"));
    const SpecLine& col = block.required("col");
    cols.parameter = block_address(doc.model, col.fields.at(0), col.lineno);
    cols.values = number_list(block.required("col_values"));

    SA2Grid data = sweep_two(doc.model, rows, cols, output_list(doc.model, block));
    return build_sweep2_report(block.name, data);
}

BlockReport run_tornado(WorkbookDocument& doc, const SpecBlock& block, bool with_svg) {
    TornadoSpec spec;
    for (const SpecLine& line : block.lines) {
        if (line.key != "input") continue;
        if (line.fields.size() != 3 && line.fields.size() != 4)
            throw ParseError("'input' needs: input ADDR LOW HIGH [\"label\"]", line.lineno);
        TornadoSpecRow row;
        row.input = block_address(doc.model, line.fields[0], line.lineno);
        row.low = spec_number(line.fields[1], line.lineno);
        row.high = spec_number(line.fields[2], line.lineno);
        if (line.fields.size() == 4) row.label = line.fields[3];
        spec.rows.push_back(std::move(row));
    }
    if (spec.rows.empty())
        throw ParseError("tornado block needs at least one 'input'", block.lineno);
    const SpecLine& out = block.required("output");
    CellAddress output = block_address(doc.model, out.fields.at(0), out.lineno);

    TornadoData data = tornado(doc.model, spec, output);
    BlockReport report = build_tornado_report(block.name, data);
    if (with_svg) report.svg = render_tornado_svg(data);
    return report;
}

BlockReport run_scenario(WorkbookDocument& doc, const SpecBlock& block, bool with_svg) {
    if (!doc.scenarios)
        throw SheetError("scenario block '" + block.name +
                         "' but the workbook has no [scenarios] section");
    std::vector<CellAddress> outputs = output_list(doc.model, block);

    if (const SpecLine* apply = block.optional("apply")) {
        int k = static_cast<int>(spec_integer(apply->fields.at(0), apply->lineno));
        ScenarioRun run = apply_scenario(doc.model, *doc.scenarios, k);
        // report the applied scenario like a one-row summary
        SA1Table table;
        table.parameter_label = "scenario";
        table.outputs = outputs;
        for (const CellAddress& out : outputs)
            table.output_labels.push_back(doc.model.workbook().label_for(out));
        SA1Row row;
        row.parameter_value = run.number;
        row.scenario_number = run.number;
        row.row_name = run.name;
        for (const CellAddress& out : outputs) row.outputs.push_back(doc.model.value(out));
        table.rows.push_back(std::move(row));

        ScenarioTable applied;
        applied.columns = doc.scenarios->columns;
        applied.rows.push_back(doc.scenarios->rows.at(static_cast<size_t>(k) - 1));
        return build_scenario_summary_report(block.name, applied, table);
    }

    SA1Table data = scenario_summary(doc.model, *doc.scenarios, outputs);
    BlockReport report = build_scenario_summary_report(block.name, *doc.scenarios, data);
    if (with_svg) report.svg = render_sweep_svg(data);
    return report;
}

BlockReport run_goalseek(WorkbookDocument& doc, const SpecBlock& block) {
    GoalSeekSpec spec;
    const SpecLine& set = block.required("set");
    spec.set_cell = block_address(doc.model, set.fields.at(0), set.lineno);
    const SpecLine& target = block.required("target");
    spec.target = spec_number(target.fields.at(0), target.lineno);
    const SpecLine& by = block.required("by_changing");
    spec.by_changing = block_address(doc.model, by.fields.at(0), by.lineno);
    if (const SpecLine* line = block.optional("tolerance"))
        spec.tolerance = spec_number(line->fields.at(0), line->lineno);
    if (const SpecLine* line = block.optional("max_iterations"))
        spec.max_iterations = static_cast<int>(spec_integer(line->fields.at(0), line->lineno));
    if (const SpecLine* line = block.optional("initial"))
        spec.initial = spec_number(line->fields.at(0), line->lineno);
    if (const SpecLine* line = block.optional("starts"))
        spec.starts = number_list(*line);
    bool restore = false;
    if (const SpecLine* line = block.optional("restore"))
        restore = spec_boolean(line->fields.at(0), line->lineno);

    std::vector<GoalSeekResult> results;
    if (spec.starts.empty())
        results.push_back(goal_seek(doc.model, spec, restore));
    else
        results = multi_start_goal_seek(doc.model, spec);
    return build_goalseek_report(block.name, spec, results);
}

BlockReport run_optimize(WorkbookDocument& doc, const SpecBlock& block) {
    OptimizeSpec spec;
    const SpecLine& objective = block.required("objective");
    spec.objective = block_address(doc.model, objective.fields.at(0), objective.lineno);
    if (const SpecLine* line = block.optional("direction")) {
        const std::string& d = line->fields.at(0);
        if (d == "maximize") spec.direction = OptimizeDirection::Maximize;
        else if (d == "minimize") spec.direction = OptimizeDirection::Minimize;
        else throw ParseError("direction must be maximize or minimize", line->lineno);
    }
    for (const SpecLine& line : block.lines) {
        if (line.key != "variable") continue;
        if (line.fields.size() != 3)
            throw ParseError("'variable' needs: variable ADDR LOWER UPPER", line.lineno);
        spec.variables.push_back({block_address(doc.model, line.fields[0], line.lineno),
                                  spec_number(line.fields[1], line.lineno),
                                  spec_number(line.fields[2], line.lineno)});
    }
    if (const SpecLine* line = block.optional("grid_points"))
        spec.grid_points = static_cast<int>(spec_integer(line->fields.at(0), line->lineno));
    if (const SpecLine* line = block.optional("refine_tolerance"))
        spec.refine_tolerance = spec_number(line->fields.at(0), line->lineno);
    bool apply_best = false;
    if (const SpecLine* line = block.optional("apply_best"))
        apply_best = spec_boolean(line->fields.at(0), line->lineno);

    OptimizeResult result = optimize(doc.model, spec, apply_best);
    return build_optimize_report(block.name, spec, result);
}

Distribution parse_distribution(const SpecLine& line) {
    const std::string& kind = line.fields.at(1);
    auto number = [&](size_t i) { return spec_number(line.fields.at(i), line.lineno); };
    try {
        if (kind == "uniform") {
            if (line.fields.size() != 4)
                throw ParseError("bind ADDR uniform A B", line.lineno);
            return Distribution::uniform(number(2), number(3));
        }
        if (kind == "triangular") {
            if (line.fields.size() != 5)
                throw ParseError("bind ADDR triangular A MODE B", line.lineno);
            return Distribution::triangular(number(2), number(3), number(4));
        }
        if (kind == "normal") {
            if (line.fields.size() != 4)
                throw ParseError("bind ADDR normal MEAN SD", line.lineno);
            return Distribution::normal(number(2), number(3));
        }
        if (kind == "discrete") {
            std::vector<double> values, probs;
            for (size_t i = 2; i < line.fields.size(); ++i) {
                const std::string& pair = line.fields[i];
                size_t colon = pair.find(':');
                if (colon == std::string::npos)
                    throw ParseError("discrete entries are VALUE:PROB", line.lineno);
                values.push_back(spec_number(pair.substr(0, colon), line.lineno));
                probs.push_back(spec_number(pair.substr(colon + 1), line.lineno));
            }
            return Distribution::discrete(std::move(values), std::move(probs));
        }
    } catch (const SheetError& e) {
        throw ParseError(e.what(), line.lineno);
    }
    throw ParseError("unknown distribution '" + kind + "'", line.lineno);
}

BlockReport run_simulate(WorkbookDocument& doc, const SpecBlock& block,
                         const RunOptions& options) {
    SimulationSpec spec;
    const SpecLine& trials = block.required("trials");
    spec.trials = spec_integer(trials.fields.at(0), trials.lineno);
    if (const SpecLine* line = block.optional("seed"))
        spec.seed = static_cast<std::uint64_t>(spec_integer(line->fields.at(0), line->lineno));
    if (options.seed_override) spec.seed = *options.seed_override;

    for (const SpecLine& line : block.lines) {
        if (line.key != "bind") continue;
        if (line.fields.size() < 2)
            throw ParseError("'bind' needs: bind ADDR DISTRIBUTION ...", line.lineno);
        CellAddress addr = block_address(doc.model, line.fields[0], line.lineno);
        if (!spec.bindings.emplace(addr, parse_distribution(line)).second)
            throw ParseError("cell " + addr.to_string() + " bound twice", line.lineno);
    }
    spec.outputs = output_list(doc.model, block);
    for (const SpecLine& line : block.lines) {
        if (line.key != "threshold") continue;
        if (line.fields.size() != 3)
            throw ParseError("'threshold' needs: threshold ADDR >=|<= LEVEL", line.lineno);
        ThresholdSpec t;
        t.output = block_address(doc.model, line.fields[0], line.lineno);
        if (line.fields[1] == ">=") t.greater_or_equal = true;
        else if (line.fields[1] == "<=") t.greater_or_equal = false;
        else throw ParseError("threshold operator must be >= or <=", line.lineno);
        t.level = spec_number(line.fields[2], line.lineno);
        spec.thresholds.push_back(t);
    }
    if (const SpecLine* line = block.optional("save_trials"))
        spec.keep_trials = spec_boolean(line->fields.at(0), line->lineno);

    SimulationReport data = run_simulation(doc.model, spec);
    if (data.error_status)
        throw SheetError("simulation '" + block.name + "': " + std::to_string(data.failures) +
                         " of " + std::to_string(data.trials) + " trials failed (over 10%)");
    BlockReport report = build_simulate_report(block.name, spec, data);
    if (spec.keep_trials) {
        report.meta["trial_matrix_file"] = block.name + "_trials.csv";
        report.extra_files.emplace_back("_trials.csv", to_csv(trial_matrix_table(spec, data)));
    }
    return report;
}

} // namespace

BlockReport execute_block(WorkbookDocument& doc, const SpecBlock& block,
                          const RunOptions& options) {
    if (block.kind == "whatif") return run_whatif(doc, block);
    if (block.kind == "sweep1") return run_sweep1(doc, block, options.write_svg);
    if (block.kind == "sweep2") return run_sweep2(doc, block);
    if (block.kind == "tornado") return run_tornado(doc, block, options.write_svg);
    if (block.kind == "scenario") return run_scenario(doc, block, options.write_svg);
    if (block.kind == "goalseek") return run_goalseek(doc, block);
    if (block.kind == "optimize") return run_optimize(doc, block);
    if (block.kind == "simulate") return run_simulate(doc, block, options);
    throw SheetError("unknown block kind '" + block.kind + "'");
}

std::vector<BlockOutcome> run_blocks(WorkbookDocument& doc,
                                     const std::vector<SpecBlock>& blocks,
                                     const RunOptions& options) {
    namespace fs = std::filesystem;
    fs::create_directories(options.out_dir);

    std::vector<BlockOutcome> outcomes;
    for (const SpecBlock& block : blocks) {
        BlockOutcome outcome;
        outcome.kind = block.kind;
        outcome.name = block.name;
        try {
            BlockReport report = execute_block(doc, block, options);
            auto write = [&](const std::string& suffix, const std::string& content) {
                std::string file = block.name + suffix;
                write_text_file((fs::path(options.out_dir) / file).string(), content);
                outcome.files.push_back(file);
            };
            if (options.write_csv) write(".csv", to_csv(report.table));
            if (options.write_json) write(".json", block_report_json(report).dump(2) + "\n");
            if (options.write_svg && report.svg) write(".svg", *report.svg);
            if (options.write_csv)
                for (const auto& [suffix, content] : report.extra_files)
                    write(suffix, content);
            outcome.ok = true;
            outcome.summary = std::to_string(report.table.rows.size()) + " row" +
                              (report.table.rows.size() == 1 ? "" : "s");
            for (const std::string& w : report.warnings)
                outcome.summary += " (warning: " + w + ")";
        } catch (const std::exception& e) {
            outcome.ok = false;
            outcome.summary = e.what();
            if (options.write_json) {
                Json err = Json::object();
                err["schema"] = "sheetlytics.report.v1";
                err["kind"] = block.kind;
                err["name"] = block.name;
                err["error"] = std::string(e.what());
                std::string file = block.name + ".json";
                write_text_file((fs::path(options.out_dir) / file).string(),
                                err.dump(2) + "\n");
                outcome.files.push_back(file);
            }
        }
        outcomes.push_back(std::move(outcome));
    }
    return outcomes;
}

} // namespace sheetlytics
