#pragma once

#include <string>
#include <vector>

#include "sheetlytics/errors.hpp"

namespace sheetlytics {

// One key/value line inside an analysis block, already split into fields
// (quoted fields keep their spaces).
struct SpecLine {
    std::string key;
    std::vector<std::string> fields;
    int lineno = 0;
};

// A `[kind name]` block from an analysis spec file. The block name is used
// as the output file stem.
struct SpecBlock {
    std::string kind; // whatif|sweep1|sweep2|tornado|scenario|goalseek|optimize|simulate
    std::string name;
    std::vector<SpecLine> lines;
    int lineno = 0;

    // All values of repeated `key` lines, flattened in file order.
    std::vector<std::string> all_fields(const std::string& key) const;
    // The single line with `key`; throws when missing or repeated.
    const SpecLine& required(const std::string& key) const;
    const SpecLine* optional(const std::string& key) const;
    bool has(const std::string& key) const;
};

// Parses an analysis spec file into ordered blocks. Kinds are checked
// against the supported set and block names must be unique.
std::vector<SpecBlock> parse_spec_file(const std::string& text);

double spec_number(const std::string& field, int lineno);
long spec_integer(const std::string& field, int lineno);
bool spec_boolean(const std::string& field, int lineno);

} // namespace sheetlytics
