#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sheetlytics/runner.hpp"
#include "sheetlytics/workbook_io.hpp"

namespace {

using namespace sheetlytics;

constexpr int kExitOk = 0;
constexpr int kExitBlockFailure = 1;
constexpr int kExitUsage = 2;

int cmd_run(const std::string& model_path, const std::string& spec_path,
            const RunOptions& options) {
    WorkbookDocument doc = load_workbook_file(model_path);
    std::vector<SpecBlock> blocks = parse_spec_file(read_text_file(spec_path));
    if (blocks.empty()) {
        std::cerr << "warning: spec file has no blocks, nothing to do\n";
        return kExitOk;
    }

    std::vector<BlockOutcome> outcomes = run_blocks(doc, blocks, options);
    bool all_ok = true;
    for (const BlockOutcome& o : outcomes) {
        std::string files;
        for (const std::string& f : o.files) {
            if (!files.empty()) files += " ";
            files += f;
        }
        if (o.ok) {
            std::cout << "[ok]    " << o.kind << " " << o.name << ": " << o.summary;
            if (!files.empty()) std::cout << " -> " << files;
            std::cout << "\n";
        } else {
            all_ok = false;
            std::cout << "[error] " << o.kind << " " << o.name << ": " << o.summary << "\n";
        }
    }
    return all_ok ? kExitOk : kExitBlockFailure;
}

int cmd_eval(const std::string& model_path, const std::string& cell) {
    WorkbookDocument doc = load_workbook_file(model_path);
    CellAddress addr = parse_address(cell);
    if (!doc.model.workbook().has_cell(addr)) {
        std::cerr << "error: cell " << addr.to_string() << " does not exist in the model\n";
        return kExitUsage;
    }
    std::cout << doc.model.value(addr).to_string() << "\n";
    return kExitOk;
}

int cmd_check(const std::string& model_path) {
    // load_workbook throws on parse errors, bad roles and cycles
    WorkbookDocument doc = load_workbook_file(model_path);
    const Workbook& wb = doc.model.workbook();

    size_t formulas = 0, literals = 0;
    for (const auto& [addr, content] : wb.cells()) {
        (void)addr;
        if (content.is_formula()) ++formulas;
        else ++literals;
    }
    std::cout << "cells: " << wb.cells().size() << " (" << literals << " literals, "
              << formulas << " formulas)\n";

    size_t inputs = 0, outputs = 0, performance = 0;
    for (const auto& [addr, role] : wb.roles()) {
        (void)addr;
        if (is_input_role(role.kind)) ++inputs;
        else ++outputs;
        if (role.kind == RoleKind::Performance) ++performance;
    }
    std::cout << "roles: " << inputs << " inputs, " << outputs << " outputs ("
              << performance << " performance)\n";

    int warnings = 0;
    for (const auto& [addr, role] : wb.roles()) {
        if (role.kind != RoleKind::Performance) continue;
        if (!wb.benchmarks().count(addr)) {
            std::cout << "warning: performance cell " << addr.to_string()
                      << " has no benchmark (non-numeric at base case: "
                      << doc.model.value(addr).to_string() << ")\n";
            ++warnings;
        }
    }
    if (doc.scenarios)
        std::cout << "scenarios: " << doc.scenarios->rows.size() << " over "
                  << doc.scenarios->columns.size() << " inputs\n";
    std::cout << (warnings ? "check finished with warnings\n" : "check ok\n");
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sheetlytics - workbook model analytics"};
    app.require_subcommand(1);

    std::string model_path, spec_path, cell;
    RunOptions options;
    std::string formats = "csv,json,svg";
    std::uint64_t seed_value = 0;

    CLI::App* run = app.add_subcommand("run", "run an analysis spec against a model");
    run->add_option("model", model_path, "workbook file")->required();
    run->add_option("spec", spec_path, "analysis spec file")->required();
    run->add_option("--out", options.out_dir, "output directory")->required();
    run->add_option("--format", formats, "comma-separated subset of csv,json,svg");
    CLI::Option* seed_opt =
        run->add_option("--seed", seed_value, "override the seed of simulate blocks");

    CLI::App* eval = app.add_subcommand("eval", "evaluate one cell of a model");
    eval->add_option("model", model_path, "workbook file")->required();
    eval->add_option("--cell", cell, "cell address, e.g. G13")->required();

    CLI::App* check = app.add_subcommand("check", "parse a model and lint roles/cycles");
    check->add_option("model", model_path, "workbook file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) {
            options.write_csv = formats.find("csv") != std::string::npos;
            options.write_json = formats.find("json") != std::string::npos;
            options.write_svg = formats.find("svg") != std::string::npos;
            if (seed_opt->count() > 0) options.seed_override = seed_value;
            return cmd_run(model_path, spec_path, options);
        }
        if (eval->parsed()) return cmd_eval(model_path, cell);
        if (check->parsed()) return cmd_check(model_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
