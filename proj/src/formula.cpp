#include "sheetlytics/formula.hpp"

#include <array>
#include <cctype>
#include <charconv>

namespace sheetlytics {

namespace {

enum class TokKind { Number, String, Ident, CellRef, Op, LParen, RParen, Comma, Colon, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;       // Ident/CellRef/Op text
    double number = 0;      // Number
    int column = 0;         // 1-based position in the formula text
};

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
public:
    explicit Lexer(const std::string& text, size_t start = 0) : text_(text), pos_(start) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            Token t = next();
            bool end = t.kind == TokKind::End;
            out.push_back(std::move(t));
            if (end) break;
        }
        return out;
    }

private:
    Token next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        Token t;
        t.column = static_cast<int>(pos_) + 1;
        if (pos_ >= text_.size()) return t;

        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
            return lex_number(t);
        }
        if (c == '"') return lex_string(t);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '$' || c == '_')
            return lex_word(t);

        switch (c) {
            case '(': ++pos_; t.kind = TokKind::LParen; return t;
            case ')': ++pos_; t.kind = TokKind::RParen; return t;
            case ',': ++pos_; t.kind = TokKind::Comma; return t;
            case ':': ++pos_; t.kind = TokKind::Colon; return t;
            case '+': case '-': case '*': case '/': case '^': case '=':
                ++pos_;
                t.kind = TokKind::Op;
                t.text = std::string(1, c);
                return t;
            case '<':
                ++pos_;
                t.kind = TokKind::Op;
                if (pos_ < text_.size() && (text_[pos_] == '=' || text_[pos_] == '>')) {
                    t.text = std::string("<") + text_[pos_];
                    ++pos_;
                } else {
                    t.text = "<";
                }
                return t;
            case '>':
                ++pos_;
                t.kind = TokKind::Op;
                if (pos_ < text_.size() && text_[pos_] == '=') {
                    t.text = ">=";
                    ++pos_;
                } else {
                    t.text = ">";
                }
                return t;
            default:
                throw ParseError("unexpected character '" + std::string(1, c) + "'", 0, t.column);
        }
    }

    Token lex_number(Token t) {
        size_t begin = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            } else {
                pos_ = mark; // 'E6' here is a cell ref, not an exponent
            }
        }
        std::string body = text_.substr(begin, pos_ - begin);
        double value = 0;
        auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
        if (ec != std::errc{} || ptr != body.data() + body.size())
            throw ParseError("bad number '" + body + "'", 0, t.column);
        t.kind = TokKind::Number;
        t.number = value;
        return t;
    }

    Token lex_string(Token t) {
        ++pos_; // opening quote
        size_t begin = pos_;
        while (pos_ < text_.size() && text_[pos_] != '"') ++pos_;
        if (pos_ >= text_.size())
            throw ParseError("unterminated string literal", 0, t.column);
        t.kind = TokKind::String;
        t.text = text_.substr(begin, pos_ - begin);
        ++pos_; // closing quote
        return t;
    }

    // A word starting with a letter/'$': either a cell reference or an
    // identifier (function name or TRUE/FALSE).
    Token lex_word(Token t) {
        size_t begin = pos_;
        if (text_[pos_] == '$') ++pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        size_t after_letters = pos_;
        if (pos_ < text_.size() && text_[pos_] == '$') ++pos_;
        bool saw_digit = false;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            saw_digit = true;
            ++pos_;
        }
        bool has_letters = after_letters > begin + (text_[begin] == '$' ? 1 : 0);
        if (has_letters && saw_digit && (pos_ >= text_.size() || !is_ident_char(text_[pos_]))) {
            t.kind = TokKind::CellRef;
            t.text = text_.substr(begin, pos_ - begin);
            return t;
        }
        // Not address-shaped: take the longest identifier run instead.
        pos_ = begin;
        if (text_[pos_] == '$')
            throw ParseError("unexpected character '$'", 0, t.column);
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        t.kind = TokKind::Ident;
        t.text = text_.substr(begin, pos_ - begin);
        return t;
    }

    const std::string& text_;
    size_t pos_;
};

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    ExprPtr run() {
        ExprPtr e = comparison();
        expect_end();
        return e;
    }

private:
    const Token& peek() const { return toks_[idx_]; }
    Token take() { return toks_[idx_++]; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, 0, peek().column);
    }

    void expect_end() {
        if (peek().kind != TokKind::End) fail("unexpected token after expression");
    }

    bool at_op(const char* text) const {
        return peek().kind == TokKind::Op && peek().text == text;
    }

    ExprPtr comparison() {
        ExprPtr left = additive();
        while (peek().kind == TokKind::Op) {
            BinaryOp op;
            const std::string& t = peek().text;
            if (t == "=") op = BinaryOp::Eq;
            else if (t == "<>") op = BinaryOp::Ne;
            else if (t == "<") op = BinaryOp::Lt;
            else if (t == "<=") op = BinaryOp::Le;
            else if (t == ">") op = BinaryOp::Gt;
            else if (t == ">=") op = BinaryOp::Ge;
            else break;
            take();
            ExprPtr right = additive();
            left = make(Expr{Expr::Binary{op, left, right}});
        }
        return left;
    }

    ExprPtr additive() {
        ExprPtr left = multiplicative();
        while (at_op("+") || at_op("-")) {
            BinaryOp op = take().text == "+" ? BinaryOp::Add : BinaryOp::Sub;
            left = make(Expr{Expr::Binary{op, left, multiplicative()}});
        }
        return left;
    }

    ExprPtr multiplicative() {
        ExprPtr left = unary();
        while (at_op("*") || at_op("/")) {
            BinaryOp op = take().text == "*" ? BinaryOp::Mul : BinaryOp::Div;
            left = make(Expr{Expr::Binary{op, left, unary()}});
        }
        return left;
    }

    ExprPtr unary() {
        if (at_op("-")) {
            take();
            return make(Expr{Expr::Unary{'-', unary()}});
        }
        if (at_op("+")) { // unary plus is the identity
            take();
            return unary();
        }
        return power();
    }

    ExprPtr power() {
        ExprPtr base = primary();
        if (at_op("^")) {
            take();
            // right-associative; exponent may carry its own sign
            return make(Expr{Expr::Binary{BinaryOp::Pow, base, unary()}});
        }
        return base;
    }

    ExprPtr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case TokKind::Number: {
                double v = take().number;
                return make(Expr{Expr::Num{v}});
            }
            case TokKind::String: {
                std::string s = take().text;
                return make(Expr{Expr::Str{std::move(s)}});
            }
            case TokKind::CellRef:
                return ref_or_range();
            case TokKind::Ident: {
                std::string name = take().text;
                for (char& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
                if (peek().kind == TokKind::LParen) return call(std::move(name));
                if (name == "TRUE") return make(Expr{Expr::BoolLit{true}});
                if (name == "FALSE") return make(Expr{Expr::BoolLit{false}});
                fail("unknown name '" + name + "'");
            }
            case TokKind::LParen: {
                take();
                ExprPtr inner = comparison();
                if (peek().kind != TokKind::RParen) fail("expected ')'");
                take();
                return inner;
            }
            default:
                fail("expected a value");
        }
    }

    ExprPtr ref_or_range() {
        CellAddress first = parse_address(take().text);
        if (peek().kind == TokKind::Colon) {
            take();
            if (peek().kind != TokKind::CellRef) fail("expected cell after ':'");
            CellAddress second = parse_address(take().text);
            return make(Expr{Expr::RangeRef{CellRange(first, second)}});
        }
        return make(Expr{Expr::Ref{first}});
    }

    ExprPtr call(std::string name) {
        take(); // '('
        std::vector<ExprPtr> args;
        if (peek().kind != TokKind::RParen) {
            args.push_back(comparison());
            while (peek().kind == TokKind::Comma) {
                take();
                args.push_back(comparison());
            }
        }
        if (peek().kind != TokKind::RParen) fail("expected ')' after arguments");
        take();
        return make(Expr{Expr::Call{std::move(name), std::move(args)}});
    }

    std::vector<Token> toks_;
    size_t idx_ = 0;
};

// Precedence levels used by the printer; higher binds tighter.
int precedence(const Expr& e) {
    if (std::holds_alternative<Expr::Binary>(e.node)) {
        switch (std::get<Expr::Binary>(e.node).op) {
            case BinaryOp::Eq: case BinaryOp::Ne:
            case BinaryOp::Lt: case BinaryOp::Le:
            case BinaryOp::Gt: case BinaryOp::Ge: return 1;
            case BinaryOp::Add: case BinaryOp::Sub: return 2;
            case BinaryOp::Mul: case BinaryOp::Div: return 3;
            case BinaryOp::Pow: return 5;
        }
    }
    if (std::holds_alternative<Expr::Unary>(e.node)) return 4;
    return 6;
}

std::string format_number(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

void print_node(const Expr& e, std::string& out);

void print_child(const Expr& child, int parent_prec, bool tighten, std::string& out) {
    bool parens = precedence(child) < parent_prec + (tighten ? 1 : 0);
    if (parens) out.push_back('(');
    print_node(child, out);
    if (parens) out.push_back(')');
}

void print_node(const Expr& e, std::string& out) {
    if (const auto* n = std::get_if<Expr::Num>(&e.node)) {
        out += format_number(n->value);
    } else if (const auto* s = std::get_if<Expr::Str>(&e.node)) {
        out.push_back('"');
        out += s->value;
        out.push_back('"');
    } else if (const auto* b = std::get_if<Expr::BoolLit>(&e.node)) {
        out += b->value ? "TRUE" : "FALSE";
    } else if (const auto* r = std::get_if<Expr::Ref>(&e.node)) {
        out += r->address.to_string();
    } else if (const auto* rr = std::get_if<Expr::RangeRef>(&e.node)) {
        out += rr->range.to_string();
    } else if (const auto* u = std::get_if<Expr::Unary>(&e.node)) {
        out.push_back(u->op);
        // the operand of unary minus must not re-absorb a ^ (= -2^2 vs (-2)^2)
        print_child(*u->operand, precedence(e), false, out);
    } else if (const auto* bin = std::get_if<Expr::Binary>(&e.node)) {
        int prec = precedence(e);
        bool left_assoc = bin->op != BinaryOp::Pow;
        print_child(*bin->lhs, prec, !left_assoc, out);
        out += binary_op_text(bin->op);
        print_child(*bin->rhs, prec, left_assoc, out);
    } else if (const auto* c = std::get_if<Expr::Call>(&e.node)) {
        out += c->name;
        out.push_back('(');
        for (size_t i = 0; i < c->args.size(); ++i) {
            if (i) out.push_back(',');
            print_node(*c->args[i], out);
        }
        out.push_back(')');
    }
}

void collect_deps(const Expr& e, std::set<CellAddress>& out) {
    if (const auto* r = std::get_if<Expr::Ref>(&e.node)) {
        out.insert(r->address);
    } else if (const auto* rr = std::get_if<Expr::RangeRef>(&e.node)) {
        rr->range.for_each([&](CellAddress a) { out.insert(a); });
    } else if (const auto* u = std::get_if<Expr::Unary>(&e.node)) {
        collect_deps(*u->operand, out);
    } else if (const auto* b = std::get_if<Expr::Binary>(&e.node)) {
        collect_deps(*b->lhs, out);
        collect_deps(*b->rhs, out);
    } else if (const auto* c = std::get_if<Expr::Call>(&e.node)) {
        for (const auto& a : c->args) collect_deps(*a, out);
    }
}

} // namespace

std::string binary_op_text(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Pow: return "^";
        case BinaryOp::Eq:  return "=";
        case BinaryOp::Ne:  return "<>";
        case BinaryOp::Lt:  return "<";
        case BinaryOp::Le:  return "<=";
        case BinaryOp::Gt:  return ">";
        case BinaryOp::Ge:  return ">=";
    }
    return "?";
}

ExprPtr parse_formula(const std::string& text) {
    if (text.empty() || text[0] != '=')
        throw ParseError("formula must begin with '='");
    Lexer lexer(text, 1); // columns reported relative to the full text
    Parser parser(lexer.run());
    return parser.run();
}

std::string print_formula(const Expr& expr) {
    std::string out = "=";
    print_node(expr, out);
    return out;
}

bool expr_equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    if (const auto* n = std::get_if<Expr::Num>(&a.node))
        return n->value == std::get<Expr::Num>(b.node).value;
    if (const auto* s = std::get_if<Expr::Str>(&a.node))
        return s->value == std::get<Expr::Str>(b.node).value;
    if (const auto* bl = std::get_if<Expr::BoolLit>(&a.node))
        return bl->value == std::get<Expr::BoolLit>(b.node).value;
    if (const auto* r = std::get_if<Expr::Ref>(&a.node))
        return r->address.same_text(std::get<Expr::Ref>(b.node).address);
    if (const auto* rr = std::get_if<Expr::RangeRef>(&a.node)) {
        const auto& other = std::get<Expr::RangeRef>(b.node).range;
        return rr->range.start.same_text(other.start) && rr->range.end.same_text(other.end);
    }
    if (const auto* u = std::get_if<Expr::Unary>(&a.node)) {
        const auto& o = std::get<Expr::Unary>(b.node);
        return u->op == o.op && expr_equal(*u->operand, *o.operand);
    }
    if (const auto* bin = std::get_if<Expr::Binary>(&a.node)) {
        const auto& o = std::get<Expr::Binary>(b.node);
        return bin->op == o.op && expr_equal(*bin->lhs, *o.lhs) && expr_equal(*bin->rhs, *o.rhs);
    }
    if (const auto* c = std::get_if<Expr::Call>(&a.node)) {
        const auto& o = std::get<Expr::Call>(b.node);
        if (c->name != o.name || c->args.size() != o.args.size()) return false;
        for (size_t i = 0; i < c->args.size(); ++i)
            if (!expr_equal(*c->args[i], *o.args[i])) return false;
        return true;
    }
    return false;
}

std::set<CellAddress> dependencies(const Expr& expr) {
    std::set<CellAddress> out;
    collect_deps(expr, out);
    return out;
}

bool is_supported_function(const std::string& upper_name) {
    static const std::array<const char*, 12> names = {
        "SUM", "AVERAGE", "MIN", "MAX", "ABS", "ROUND",
        "SQRT", "EXP", "LN", "IF", "INDEX", "NPV",
    };
    for (const char* n : names)
        if (upper_name == n) return true;
    return false;
}

} // namespace sheetlytics
