#include "sheetlytics/cell.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <charconv>

namespace sheetlytics {

int column_ordinal(const std::string& letters) {
    if (letters.empty()) throw ParseError("empty column letters");
    long n = 0;
    for (char ch : letters) {
        if (!std::isalpha(static_cast<unsigned char>(ch)))
            throw ParseError("bad column letter '" + std::string(1, ch) + "'");
        n = n * 26 + (std::toupper(static_cast<unsigned char>(ch)) - 'A' + 1);
        if (n > 1'000'000) throw ParseError("column out of range: " + letters);
    }
    return static_cast<int>(n);
}

std::string column_letters(int ordinal) {
    std::string out;
    while (ordinal > 0) {
        --ordinal;
        out.push_back(static_cast<char>('A' + ordinal % 26));
        ordinal /= 26;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::string CellAddress::to_string() const {
    std::string out;
    if (col_absolute) out.push_back('$');
    out += column_letters(col);
    if (row_absolute) out.push_back('$');
    out += std::to_string(row);
    return out;
}

CellAddress parse_address(const std::string& text) {
    size_t i = 0;
    CellAddress addr;
    auto fail = [&]() { throw ParseError("malformed cell address '" + text + "'"); };

    if (i < text.size() && text[i] == '$') { addr.col_absolute = true; ++i; }
    size_t letters_begin = i;
    while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
    if (i == letters_begin) fail();
    addr.col = column_ordinal(text.substr(letters_begin, i - letters_begin));

    if (i < text.size() && text[i] == '$') { addr.row_absolute = true; ++i; }
    size_t digits_begin = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == digits_begin || i != text.size()) fail();

    long row = 0;
    auto [ptr, ec] = std::from_chars(text.data() + digits_begin, text.data() + i, row);
    if (ec != std::errc{} || row < 1 || row > 100'000'000) fail();
    (void)ptr;
    addr.row = static_cast<int>(row);
    return addr;
}

CellRange::CellRange(CellAddress a, CellAddress b) : start(a), end(b) {
    if (start.col > end.col) std::swap(start.col, end.col);
    if (start.row > end.row) std::swap(start.row, end.row);
}

std::string error_code_text(ErrorCode code) {
    switch (code) {
        case ErrorCode::Div0:  return "#DIV/0!";
        case ErrorCode::Value: return "#VALUE!";
        case ErrorCode::Ref:   return "#REF!";
        case ErrorCode::Name:  return "#NAME?";
        case ErrorCode::Num:   return "#NUM!";
        case ErrorCode::Cycle: return "#CYCLE!";
    }
    return "#ERR!";
}

CellValue CellValue::number(double x) {
    if (!std::isfinite(x)) return error(ErrorCode::Num);
    CellValue v;
    v.v_ = x;
    return v;
}

bool CellValue::identical(const CellValue& o) const {
    if (v_.index() != o.v_.index()) return false;
    if (is_number())
        return std::bit_cast<std::uint64_t>(as_number()) ==
               std::bit_cast<std::uint64_t>(o.as_number());
    return v_ == o.v_;
}

std::string CellValue::to_string() const {
    if (is_empty()) return "";
    if (is_text()) return as_text();
    if (is_boolean()) return as_boolean() ? "TRUE" : "FALSE";
    if (is_error()) return error_code_text(error_code());
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, as_number());
    (void)ec;
    return std::string(buf, ptr);
}

std::string role_kind_text(RoleKind k) {
    switch (k) {
        case RoleKind::Data:        return "data";
        case RoleKind::Decision:    return "decision";
        case RoleKind::Output:      return "output";
        case RoleKind::Performance: return "performance";
    }
    return "?";
}

RoleKind parse_role_kind(const std::string& word) {
    if (word == "data") return RoleKind::Data;
    if (word == "decision") return RoleKind::Decision;
    if (word == "output") return RoleKind::Output;
    if (word == "performance") return RoleKind::Performance;
    throw ParseError("unknown role kind '" + word + "'");
}

} // namespace sheetlytics
