#pragma once

#include <stdexcept>
#include <string>

namespace sheetlytics {

// Base class for all structural errors (bad files, bad specs, violated
// preconditions). Evaluation-time problems are not exceptions: they travel
// in-band as error-valued CellValues.
class SheetError : public std::runtime_error {
public:
    explicit SheetError(const std::string& msg) : std::runtime_error(msg) {}
};

// Text could not be parsed. `line` is 1-based when the source is a file
// (0 when unknown); `column` is 1-based within the offending text.
class ParseError : public SheetError {
public:
    ParseError(const std::string& msg, int line = 0, int column = 0)
        : SheetError(format(msg, line, column)), line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    static std::string format(const std::string& msg, int line, int column) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        out += msg;
        if (column > 0) out += " (column " + std::to_string(column) + ")";
        return out;
    }

    int line_;
    int column_;
};

// A write was rejected by the role-based protection rules.
class ProtectionError : public SheetError {
public:
    explicit ProtectionError(const std::string& msg) : SheetError(msg) {}
};

} // namespace sheetlytics
