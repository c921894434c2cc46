#include "sheetlytics/spec_file.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace sheetlytics {

namespace {

constexpr std::array<const char*, 8> kKinds = {
    "whatif", "sweep1", "sweep2", "tornado", "scenario", "goalseek", "optimize", "simulate",
};

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    size_t end = line.size();
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (c == '"') in_string = !in_string;
        else if (c == '#' && !in_string) { end = i; break; }
    }
    while (end > 0 && std::isspace(static_cast<unsigned char>(line[end - 1]))) --end;
    size_t begin = 0;
    while (begin < end && std::isspace(static_cast<unsigned char>(line[begin]))) ++begin;
    return line.substr(begin, end - begin);
}

std::vector<std::string> split_fields(const std::string& line, int lineno) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size()) break;
        if (line[i] == '"') {
            size_t j = line.find('"', i + 1);
            if (j == std::string::npos) throw ParseError("unterminated quoted string", lineno);
            out.push_back(line.substr(i + 1, j - i - 1));
            i = j + 1;
        } else {
            size_t j = i;
            while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
            out.push_back(line.substr(i, j - i));
            i = j;
        }
    }
    return out;
}

bool valid_block_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
    return true;
}

} // namespace

std::vector<std::string> SpecBlock::all_fields(const std::string& key) const {
    std::vector<std::string> out;
    for (const SpecLine& line : lines)
        if (line.key == key)
            out.insert(out.end(), line.fields.begin(), line.fields.end());
    return out;
}

const SpecLine& SpecBlock::required(const std::string& key) const {
    const SpecLine* found = nullptr;
    for (const SpecLine& line : lines) {
        if (line.key != key) continue;
        if (found)
            throw ParseError("block [" + kind + " " + name + "] repeats '" + key + "'",
                             line.lineno);
        found = &line;
    }
    if (!found)
        throw ParseError("block [" + kind + " " + name + "] is missing '" + key + "'", lineno);
    return *found;
}

const SpecLine* SpecBlock::optional(const std::string& key) const {
    const SpecLine* found = nullptr;
    for (const SpecLine& line : lines) {
        if (line.key != key) continue;
        if (found)
            throw ParseError("block [" + kind + " " + name + "] repeats '" + key + "'",
                             line.lineno);
        found = &line;
    }
    return found;
}

bool SpecBlock::has(const std::string& key) const {
    return std::any_of(lines.begin(), lines.end(),
                       [&](const SpecLine& l) { return l.key == key; });
}

std::vector<SpecBlock> parse_spec_file(const std::string& text) {
    std::vector<SpecBlock> blocks;
    std::set<std::string> names;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = strip_comment(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("unterminated block header", lineno);
            std::vector<std::string> head =
                split_fields(line.substr(1, line.size() - 2), lineno);
            if (head.size() != 2)
                throw ParseError("block header must be '[kind name]'", lineno);
            if (std::find_if(kKinds.begin(), kKinds.end(), [&](const char* k) {
                    return head[0] == k;
                }) == kKinds.end())
                throw ParseError("unknown block kind '" + head[0] + "'", lineno);
            if (!valid_block_name(head[1]))
                throw ParseError("block name '" + head[1] +
                                     "' must be alphanumeric/_/- (it names output files)",
                                 lineno);
            if (!names.insert(head[1]).second)
                throw ParseError("duplicate block name '" + head[1] + "'", lineno);
            blocks.push_back(SpecBlock{head[0], head[1], {}, lineno});
            continue;
        }

        if (blocks.empty())
            throw ParseError("content before any block header", lineno);
        std::vector<std::string> fields = split_fields(line, lineno);
        SpecLine sl;
        sl.key = fields.front();
        sl.fields.assign(fields.begin() + 1, fields.end());
        sl.lineno = lineno;
        blocks.back().lines.push_back(std::move(sl));
    }
    return blocks;
}

double spec_number(const std::string& field, int lineno) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ParseError("bad number '" + field + "'", lineno);
    return v;
}

long spec_integer(const std::string& field, int lineno) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ParseError("bad integer '" + field + "'", lineno);
    return v;
}

bool spec_boolean(const std::string& field, int lineno) {
    if (field == "true") return true;
    if (field == "false") return false;
    throw ParseError("expected 'true' or 'false', got '" + field + "'", lineno);
}

} // namespace sheetlytics
