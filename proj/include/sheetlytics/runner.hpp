#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sheetlytics/report.hpp"
#include "sheetlytics/spec_file.hpp"
#include "sheetlytics/workbook_io.hpp"

namespace sheetlytics {

struct RunOptions {
    std::string out_dir;
    bool write_csv = true;
    bool write_json = true;
    bool write_svg = true;
    std::optional<std::uint64_t> seed_override; // applies to simulate blocks
};

struct BlockOutcome {
    std::string kind;
    std::string name;
    bool ok = false;
    std::string summary;            // one human line
    std::vector<std::string> files; // files written (relative to out_dir)
};

// Translates one parsed block into module calls against the document's
// model. Throws SheetError/ParseError on bad blocks; callers decide
// whether to continue.
BlockReport execute_block(WorkbookDocument& doc, const SpecBlock& block,
                          const RunOptions& options);

// Runs every block in order, writing <name>.csv/.json/.svg under
// options.out_dir. A failing block emits <name>.json with an error field
// and execution continues. Outcomes come back in block order.
std::vector<BlockOutcome> run_blocks(WorkbookDocument& doc,
                                     const std::vector<SpecBlock>& blocks,
                                     const RunOptions& options);

} // namespace sheetlytics
