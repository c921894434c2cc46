#include "sheetlytics/workbook_io.hpp"

#include <charconv>
#include <cctype>
#include <fstream>
#include <sstream>

namespace sheetlytics {

namespace {

// Strips a '#' comment (respecting double-quoted strings) and trailing
// whitespace.
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

// Whitespace-separated fields; double-quoted fields may contain spaces.
std::vector<std::string> split_fields(const std::string& line, int lineno) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size()) break;
        if (line[i] == '"') {
            size_t j = line.find('"', i + 1);
            if (j == std::string::npos)
                throw ParseError("unterminated quoted string", lineno);
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

double parse_number_field(const std::string& text, int lineno) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ParseError("bad number '" + text + "'", lineno);
    return v;
}

enum class Section { None, Cells, Roles, Scenarios };

} // namespace

WorkbookDocument load_workbook(const std::string& text) {
    Workbook wb;
    std::optional<ScenarioTable> scenarios;
    struct PendingRole {
        RoleKind kind;
        CellAddress addr;
        std::string label;
        int lineno;
    };
    std::vector<PendingRole> pending_roles;

    Section section = Section::None;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    int expected_scenario_number = 1;

    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = strip_comment(raw);
        if (line.empty()) continue;

        if (line == "[cells]") { section = Section::Cells; continue; }
        if (line == "[roles]") { section = Section::Roles; continue; }
        if (line == "[scenarios]") {
            section = Section::Scenarios;
            if (scenarios) throw ParseError("duplicate [scenarios] section", lineno);
            scenarios.emplace();
            expected_scenario_number = 1;
            continue;
        }
        if (line.front() == '[')
            throw ParseError("unknown section '" + line + "'", lineno);

        switch (section) {
            case Section::None:
                throw ParseError("content before any section header", lineno);

            case Section::Cells: {
                size_t colon = line.find(':');
                if (colon == std::string::npos)
                    throw ParseError("expected 'ADDR: value'", lineno);
                CellAddress addr;
                try {
                    addr = parse_address(strip_comment(line.substr(0, colon)));
                } catch (const ParseError& e) {
                    throw ParseError(e.what(), lineno);
                }
                if (wb.has_cell(addr))
                    throw ParseError("duplicate address " + addr.to_string(), lineno);
                std::string body = strip_comment(line.substr(colon + 1));
                if (body.empty())
                    throw ParseError("cell " + addr.to_string() + " has no value", lineno);
                CellContent content;
                if (body[0] == '=') {
                    try {
                        content = CellContent::formula(body, parse_formula(body));
                    } catch (const ParseError& e) {
                        throw ParseError(std::string("in formula for ") + addr.to_string() +
                                             ": " + e.what(),
                                         lineno);
                    }
                } else if (body[0] == '"') {
                    if (body.size() < 2 || body.back() != '"')
                        throw ParseError("unterminated text literal", lineno);
                    content = CellContent::text(body.substr(1, body.size() - 2));
                } else {
                    content = CellContent::number(parse_number_field(body, lineno));
                }
                wb.set_cell(addr, std::move(content));
                break;
            }

            case Section::Roles: {
                std::vector<std::string> fields = split_fields(line, lineno);
                if (fields.size() < 2 || fields.size() > 3)
                    throw ParseError("expected 'kind ADDR \"label\"'", lineno);
                try {
                    PendingRole r;
                    r.kind = parse_role_kind(fields[0]);
                    r.addr = parse_address(fields[1]);
                    r.label = fields.size() == 3 ? fields[2] : "";
                    r.lineno = lineno;
                    pending_roles.push_back(std::move(r));
                } catch (const ParseError& e) {
                    throw ParseError(e.what(), lineno);
                }
                break;
            }

            case Section::Scenarios: {
                std::vector<std::string> fields = split_fields(line, lineno);
                if (fields.empty()) break;
                if (fields[0] == "columns") {
                    if (!scenarios->columns.empty())
                        throw ParseError("duplicate 'columns' line", lineno);
                    if (fields.size() < 2)
                        throw ParseError("'columns' needs at least one address", lineno);
                    try {
                        for (size_t i = 1; i < fields.size(); ++i)
                            scenarios->columns.push_back(parse_address(fields[i]));
                    } catch (const ParseError& e) {
                        throw ParseError(e.what(), lineno);
                    }
                    break;
                }
                if (scenarios->columns.empty())
                    throw ParseError("scenario rows must follow a 'columns' line", lineno);
                if (fields.size() != scenarios->columns.size() + 2)
                    throw ParseError("scenario row needs number, name and " +
                                         std::to_string(scenarios->columns.size()) +
                                         " values",
                                     lineno);
                ScenarioTable::Row row;
                row.number = static_cast<int>(parse_number_field(fields[0], lineno));
                if (row.number != expected_scenario_number)
                    throw ParseError("scenario numbers must run 1,2,... in order; expected " +
                                         std::to_string(expected_scenario_number) + " got " +
                                         fields[0],
                                     lineno);
                ++expected_scenario_number;
                row.name = fields[1];
                for (size_t i = 2; i < fields.size(); ++i)
                    row.values.push_back(parse_number_field(fields[i], lineno));
                scenarios->rows.push_back(std::move(row));
                break;
            }
        }
    }

    // roles attach after all cells exist, so file section order is free
    for (const PendingRole& r : pending_roles) {
        if (wb.role(r.addr))
            throw ParseError("cell " + r.addr.to_string() + " already has a role", r.lineno);
        try {
            wb.set_role(r.addr, Role{r.kind, r.label});
        } catch (const SheetError& e) {
            throw ParseError(e.what(), r.lineno);
        }
    }

    Model model = make_model(std::move(wb));

    if (!model.graph().cycle_cells().empty()) {
        std::string cells;
        for (const CellAddress& a : model.graph().cycle_cells()) {
            if (!cells.empty()) cells += ", ";
            cells += a.to_string();
        }
        throw SheetError("workbook has a reference cycle: " + cells);
    }
    if (scenarios) {
        if (scenarios->rows.empty())
            throw SheetError("[scenarios] section has no scenario rows");
        validate_scenario_table(*scenarios, model.workbook(), true);
    }
    return WorkbookDocument{std::move(model), std::move(scenarios)};
}

WorkbookDocument load_workbook_file(const std::string& path) {
    return load_workbook(read_text_file(path));
}

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace

std::string save_workbook(const Workbook& wb, const std::optional<ScenarioTable>& scenarios) {
    std::string out = "[cells]\n";
    for (const auto& [addr, content] : wb.cells()) {
        out += addr.to_string();
        out += ": ";
        if (content.is_number())
            out += format_double(content.number_value());
        else if (content.is_text())
            out += "\"" + content.text_value() + "\"";
        else if (content.is_formula())
            out += content.formula_node().source;
        out += "\n";
    }
    if (!wb.roles().empty()) {
        out += "\n[roles]\n";
        for (const auto& [addr, role] : wb.roles()) {
            out += role_kind_text(role.kind);
            out += " ";
            out += addr.to_string();
            if (!role.label.empty()) out += " \"" + role.label + "\"";
            out += "\n";
        }
    }
    if (scenarios) {
        out += "\n[scenarios]\ncolumns";
        for (const CellAddress& c : scenarios->columns) out += " " + c.to_string();
        out += "\n";
        for (const ScenarioTable::Row& row : scenarios->rows) {
            out += std::to_string(row.number) + " \"" + row.name + "\"";
            for (double v : row.values) out += " " + format_double(v);
            out += "\n";
        }
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SheetError("cannot read file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SheetError("cannot write file: " + path);
    out << content;
    if (!out) throw SheetError("failed writing file: " + path);
}

} // namespace sheetlytics
