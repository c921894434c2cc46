#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>

#include "sheetlytics/errors.hpp"

namespace sheetlytics {

// A1-style cell coordinate. Columns are 1-based ordinals (A=1, Z=26, AA=27).
// The absolute flags record `$` markers from the source text; they matter
// for printing only, never for identity or evaluation.
struct CellAddress {
    int col = 1;
    int row = 1;
    bool col_absolute = false;
    bool row_absolute = false;

    CellAddress() = default;
    CellAddress(int c, int r, bool ca = false, bool ra = false)
        : col(c), row(r), col_absolute(ca), row_absolute(ra) {}

    bool operator==(const CellAddress& o) const { return col == o.col && row == o.row; }
    bool operator!=(const CellAddress& o) const { return !(*this == o); }
    // Reading order: row-major, so B3 < A4.
    bool operator<(const CellAddress& o) const {
        if (row != o.row) return row < o.row;
        return col < o.col;
    }

    // Also compares the absolute flags; used by AST equality checks.
    bool same_text(const CellAddress& o) const {
        return col == o.col && row == o.row &&
               col_absolute == o.col_absolute && row_absolute == o.row_absolute;
    }

    std::string to_string() const;
};

// Parses "B12", "$C25", "aa1", ... Column letters are case-insensitive and
// canonicalized to upper case. Throws ParseError naming the offending token.
CellAddress parse_address(const std::string& text);

// Column letters <-> 1-based ordinal (A=1 .. Z=26, AA=27, ...).
int column_ordinal(const std::string& letters);
std::string column_letters(int ordinal);

// Rectangular range, normalized so start.col <= end.col and start.row <= end.row.
struct CellRange {
    CellAddress start;
    CellAddress end;

    CellRange() = default;
    CellRange(CellAddress a, CellAddress b);

    int rows() const { return end.row - start.row + 1; }
    int cols() const { return end.col - start.col + 1; }
    long size() const { return static_cast<long>(rows()) * cols(); }

    // Cells in row-major order.
    template <typename F>
    void for_each(F fn) const {
        for (int r = start.row; r <= end.row; ++r)
            for (int c = start.col; c <= end.col; ++c)
                fn(CellAddress(c, r));
    }

    bool operator==(const CellRange& o) const { return start == o.start && end == o.end; }

    std::string to_string() const { return start.to_string() + ":" + end.to_string(); }
};

// Spreadsheet-conventional evaluation errors, carried in-band.
enum class ErrorCode { Div0, Value, Ref, Name, Num, Cycle };

std::string error_code_text(ErrorCode code); // "#DIV/0!", "#VALUE!", ...

// The result of evaluating a cell: empty, number, text, boolean, or error.
// Numbers are always finite; non-finite arithmetic results become #NUM!.
class CellValue {
public:
    CellValue() : v_(std::monostate{}) {}
    static CellValue number(double x);
    static CellValue text(std::string s) { CellValue v; v.v_ = std::move(s); return v; }
    static CellValue boolean(bool b) { CellValue v; v.v_ = b; return v; }
    static CellValue error(ErrorCode c) { CellValue v; v.v_ = c; return v; }

    bool is_empty() const { return std::holds_alternative<std::monostate>(v_); }
    bool is_number() const { return std::holds_alternative<double>(v_); }
    bool is_text() const { return std::holds_alternative<std::string>(v_); }
    bool is_boolean() const { return std::holds_alternative<bool>(v_); }
    bool is_error() const { return std::holds_alternative<ErrorCode>(v_); }

    double as_number() const { return std::get<double>(v_); }
    const std::string& as_text() const { return std::get<std::string>(v_); }
    bool as_boolean() const { return std::get<bool>(v_); }
    ErrorCode error_code() const { return std::get<ErrorCode>(v_); }

    // Semantic equality (doubles compared by ==).
    bool operator==(const CellValue& o) const { return v_ == o.v_; }
    bool operator!=(const CellValue& o) const { return !(*this == o); }

    // Bit-exact equality, for restoration and determinism contracts.
    bool identical(const CellValue& o) const;

    std::string to_string() const; // display form: "", number, text, TRUE/FALSE, #ERR!

private:
    std::variant<std::monostate, double, std::string, bool, ErrorCode> v_;
};

struct Expr; // formula.hpp

// What a cell holds: nothing, a number, a text label, or a formula.
// A Formula keeps its source text alongside the parsed tree.
struct CellContent {
    struct Empty {
        bool operator==(const Empty&) const { return true; }
    };
    struct NumberLiteral {
        double value = 0;
        bool operator==(const NumberLiteral& o) const { return value == o.value; }
    };
    struct TextLiteral {
        std::string value;
        bool operator==(const TextLiteral& o) const { return value == o.value; }
    };
    struct Formula {
        std::string source; // includes the leading '='
        std::shared_ptr<const Expr> ast;
        bool operator==(const Formula& o) const { return source == o.source; }
    };

    std::variant<Empty, NumberLiteral, TextLiteral, Formula> node;

    CellContent() : node(Empty{}) {}

    static CellContent empty() { return CellContent(); }
    static CellContent number(double x) {
        CellContent c; c.node = NumberLiteral{x}; return c;
    }
    static CellContent text(std::string s) {
        CellContent c; c.node = TextLiteral{std::move(s)}; return c;
    }
    static CellContent formula(std::string source, std::shared_ptr<const Expr> ast) {
        CellContent c; c.node = Formula{std::move(source), std::move(ast)}; return c;
    }

    bool is_empty() const { return std::holds_alternative<Empty>(node); }
    bool is_number() const { return std::holds_alternative<NumberLiteral>(node); }
    bool is_text() const { return std::holds_alternative<TextLiteral>(node); }
    bool is_formula() const { return std::holds_alternative<Formula>(node); }

    double number_value() const { return std::get<NumberLiteral>(node).value; }
    const std::string& text_value() const { return std::get<TextLiteral>(node).value; }
    const Formula& formula_node() const { return std::get<Formula>(node); }

    bool operator==(const CellContent& o) const { return node == o.node; }
    bool operator!=(const CellContent& o) const { return !(*this == o); }
};

// Role vocabulary: data and decision variables are inputs (literal numbers);
// outputs and performance measures are formula cells.
enum class RoleKind { Data, Decision, Output, Performance };

struct Role {
    RoleKind kind = RoleKind::Data;
    std::string label;

    bool operator==(const Role& o) const { return kind == o.kind && label == o.label; }
};

inline bool is_input_role(RoleKind k) { return k == RoleKind::Data || k == RoleKind::Decision; }
inline bool is_output_role(RoleKind k) { return k == RoleKind::Output || k == RoleKind::Performance; }

std::string role_kind_text(RoleKind k);           // "data", "decision", ...
RoleKind parse_role_kind(const std::string& word); // throws ParseError

} // namespace sheetlytics
