#pragma once

#include <optional>
#include <string>

#include "sheetlytics/analysis.hpp"
#include "sheetlytics/engine.hpp"

namespace sheetlytics {

// A parsed workbook file: the model plus the optional scenario table from
// its [scenarios] section.
struct WorkbookDocument {
    Model model;
    std::optional<ScenarioTable> scenarios;
};

// Parses the textual workbook format ([cells] / [roles] / [scenarios]
// sections; '#' comments), builds the model, snapshots the base case and
// computes performance benchmarks. Errors carry 1-based line numbers;
// cycles are detected and reported by cell.
WorkbookDocument load_workbook(const std::string& text);

WorkbookDocument load_workbook_file(const std::string& path);

// Renders a workbook (and scenario table, when present) back into the file
// format. Loading the output reproduces an equivalent workbook cell by
// cell.
std::string save_workbook(const Workbook& wb,
                          const std::optional<ScenarioTable>& scenarios = std::nullopt);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace sheetlytics
