#pragma once

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "sheetlytics/cell.hpp"

namespace sheetlytics {

enum class BinaryOp { Add, Sub, Mul, Div, Pow, Eq, Ne, Lt, Le, Gt, Ge };

std::string binary_op_text(BinaryOp op);

// Parsed formula tree. Nodes are immutable and shared, so copying a
// workbook never copies ASTs.
struct Expr {
    struct Num { double value; };
    struct Str { std::string value; };
    struct BoolLit { bool value; };
    struct Ref { CellAddress address; };
    struct RangeRef { CellRange range; };
    struct Unary {
        char op; // '-'
        std::shared_ptr<const Expr> operand;
    };
    struct Binary {
        BinaryOp op;
        std::shared_ptr<const Expr> lhs;
        std::shared_ptr<const Expr> rhs;
    };
    struct Call {
        std::string name; // canonical upper case
        std::vector<std::shared_ptr<const Expr>> args;
    };

    std::variant<Num, Str, BoolLit, Ref, RangeRef, Unary, Binary, Call> node;
};

using ExprPtr = std::shared_ptr<const Expr>;

// Parses a formula beginning with '='. Precedence, loosest first:
// comparisons, + -, * /, unary -, ^ (right-associative, binds tighter
// than unary minus, so =-2^2 is -(2^2)). Unknown function names parse
// fine and fail at evaluation with #NAME?. Throws ParseError with a
// 1-based column position otherwise.
ExprPtr parse_formula(const std::string& text);

// Canonical rendering, including the leading '='. Parens are emitted only
// where precedence requires them; parsing the result reproduces the tree.
std::string print_formula(const Expr& expr);

// Structural equality, including absolute-flag fidelity on references.
bool expr_equal(const Expr& a, const Expr& b);

// Every cell the expression can read: each Ref plus every cell of every
// Range. IF contributes all branches.
std::set<CellAddress> dependencies(const Expr& expr);

// Functions the evaluator implements.
bool is_supported_function(const std::string& upper_name);

} // namespace sheetlytics
