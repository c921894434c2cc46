#include "sheetlytics/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>

namespace sheetlytics {

// ---------------------------------------------------------------------------
// DepGraph

namespace {
const std::set<CellAddress> kNoPrecedents{};
}

void DepGraph::build(const Workbook& wb) {
    precedents_.clear();
    dependents_.clear();
    topo_.clear();
    topo_index_.clear();
    cycle_.clear();

    for (const auto& [addr, content] : wb.cells()) {
        if (!content.is_formula()) continue;
        std::set<CellAddress> deps = dependencies(*content.formula_node().ast);
        for (const CellAddress& d : deps) dependents_[d].insert(addr);
        precedents_.emplace(addr, std::move(deps));
    }

    // Tarjan SCC over formula cells; an SCC of size > 1, or a self-loop,
    // is a reference cycle.
    struct NodeState {
        int index = -1;
        int lowlink = 0;
        bool on_stack = false;
    };
    std::map<CellAddress, NodeState> state;
    std::vector<CellAddress> stack;
    int next_index = 0;

    // explicit stack to avoid deep recursion on long dependency chains
    struct Frame {
        CellAddress node;
        std::vector<CellAddress> succ;
        size_t next = 0;
    };

    auto formula_successors = [&](const CellAddress& n) {
        std::vector<CellAddress> out;
        auto it = precedents_.find(n);
        if (it == precedents_.end()) return out;
        for (const CellAddress& p : it->second)
            if (precedents_.count(p)) out.push_back(p);
        return out;
    };

    std::function<void(const CellAddress&)> strongconnect = [&](const CellAddress& root) {
        std::vector<Frame> frames;
        frames.push_back({root, formula_successors(root), 0});
        state[root] = {next_index, next_index, true};
        ++next_index;
        stack.push_back(root);

        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.next < f.succ.size()) {
                CellAddress w = f.succ[f.next++];
                auto it = state.find(w);
                if (it == state.end()) {
                    state[w] = {next_index, next_index, true};
                    ++next_index;
                    stack.push_back(w);
                    frames.push_back({w, formula_successors(w), 0});
                } else if (it->second.on_stack) {
                    NodeState& fs = state[f.node];
                    fs.lowlink = std::min(fs.lowlink, it->second.index);
                }
            } else {
                NodeState& fs = state[f.node];
                if (fs.lowlink == fs.index) {
                    std::vector<CellAddress> component;
                    while (true) {
                        CellAddress w = stack.back();
                        stack.pop_back();
                        state[w].on_stack = false;
                        component.push_back(w);
                        if (w == f.node) break;
                    }
                    bool self_loop = component.size() == 1 &&
                                     precedents_.at(component[0]).count(component[0]);
                    if (component.size() > 1 || self_loop)
                        for (const CellAddress& c : component) cycle_.insert(c);
                }
                CellAddress done = f.node;
                frames.pop_back();
                if (!frames.empty()) {
                    NodeState& ps = state[frames.back().node];
                    ps.lowlink = std::min(ps.lowlink, state[done].lowlink);
                }
            }
        }
    };

    for (const auto& [addr, deps] : precedents_)
        if (!state.count(addr)) strongconnect(addr);

    // Kahn over the cycle-free formula cells. Edges from cycle members are
    // dropped: those cells hold #CYCLE! up front, so dependents can still
    // be ordered and will absorb the error by value.
    std::map<CellAddress, int> indegree;
    for (const auto& [addr, deps] : precedents_) {
        if (cycle_.count(addr)) continue;
        int n = 0;
        for (const CellAddress& p : deps)
            if (precedents_.count(p) && !cycle_.count(p)) ++n;
        indegree[addr] = n;
    }
    std::deque<CellAddress> ready;
    for (const auto& [addr, deg] : indegree)
        if (deg == 0) ready.push_back(addr);
    while (!ready.empty()) {
        CellAddress n = ready.front();
        ready.pop_front();
        topo_index_[n] = topo_.size();
        topo_.push_back(n);
        auto dit = dependents_.find(n);
        if (dit == dependents_.end()) continue;
        for (const CellAddress& d : dit->second) {
            auto iit = indegree.find(d);
            if (iit != indegree.end() && --iit->second == 0) ready.push_back(d);
        }
    }
}

std::vector<CellAddress> DepGraph::affected(const std::set<CellAddress>& changed) const {
    std::set<CellAddress> seen;
    std::deque<CellAddress> queue(changed.begin(), changed.end());
    while (!queue.empty()) {
        CellAddress n = queue.front();
        queue.pop_front();
        auto dit = dependents_.find(n);
        if (dit == dependents_.end()) continue;
        for (const CellAddress& d : dit->second)
            if (seen.insert(d).second) queue.push_back(d);
    }
    // changed formula cells must recompute themselves too
    for (const CellAddress& c : changed)
        if (precedents_.count(c)) seen.insert(c);

    std::vector<CellAddress> order;
    order.reserve(seen.size());
    for (const CellAddress& n : seen)
        if (topo_index_.count(n)) order.push_back(n);
    std::sort(order.begin(), order.end(), [&](const CellAddress& a, const CellAddress& b) {
        return topo_index_.at(a) < topo_index_.at(b);
    });
    return order;
}

const std::set<CellAddress>& DepGraph::precedents(const CellAddress& addr) const {
    auto it = precedents_.find(addr);
    return it == precedents_.end() ? kNoPrecedents : it->second;
}

// ---------------------------------------------------------------------------
// Expression evaluation

namespace {

const CellValue kEmptyValue{};

const CellValue& lookup(const std::map<CellAddress, CellValue>& values,
                        const CellAddress& addr) {
    auto it = values.find(addr);
    return it == values.end() ? kEmptyValue : it->second;
}

// Numeric coercion: numbers pass through, booleans become 1/0, empty
// becomes 0, text is #VALUE!, errors propagate.
bool to_number(const CellValue& v, double& out, CellValue& err) {
    if (v.is_number()) { out = v.as_number(); return true; }
    if (v.is_boolean()) { out = v.as_boolean() ? 1.0 : 0.0; return true; }
    if (v.is_empty()) { out = 0.0; return true; }
    err = v.is_error() ? v : CellValue::error(ErrorCode::Value);
    return false;
}

class Evaluator {
public:
    explicit Evaluator(const std::map<CellAddress, CellValue>& values) : values_(values) {}

    CellValue eval(const Expr& e) {
        if (const auto* n = std::get_if<Expr::Num>(&e.node)) return CellValue::number(n->value);
        if (const auto* s = std::get_if<Expr::Str>(&e.node)) return CellValue::text(s->value);
        if (const auto* b = std::get_if<Expr::BoolLit>(&e.node)) return CellValue::boolean(b->value);
        if (const auto* r = std::get_if<Expr::Ref>(&e.node)) return lookup(values_, r->address);
        if (std::holds_alternative<Expr::RangeRef>(e.node))
            return CellValue::error(ErrorCode::Value); // bare range in scalar context
        if (const auto* u = std::get_if<Expr::Unary>(&e.node)) return eval_unary(*u);
        if (const auto* bin = std::get_if<Expr::Binary>(&e.node)) return eval_binary(*bin);
        return eval_call(std::get<Expr::Call>(e.node));
    }

private:
    CellValue eval_unary(const Expr::Unary& u) {
        CellValue v = eval(*u.operand);
        double x;
        CellValue err;
        if (!to_number(v, x, err)) return err;
        return CellValue::number(-x);
    }

    CellValue eval_binary(const Expr::Binary& b) {
        CellValue lv = eval(*b.lhs);
        double l;
        CellValue err;
        if (!to_number(lv, l, err)) return err;
        CellValue rv = eval(*b.rhs);
        double r;
        if (!to_number(rv, r, err)) return err;

        switch (b.op) {
            case BinaryOp::Add: return CellValue::number(l + r);
            case BinaryOp::Sub: return CellValue::number(l - r);
            case BinaryOp::Mul: return CellValue::number(l * r);
            case BinaryOp::Div:
                if (r == 0.0) return CellValue::error(ErrorCode::Div0);
                return CellValue::number(l / r);
            case BinaryOp::Pow: return CellValue::number(std::pow(l, r));
            case BinaryOp::Eq:  return CellValue::boolean(l == r);
            case BinaryOp::Ne:  return CellValue::boolean(l != r);
            case BinaryOp::Lt:  return CellValue::boolean(l < r);
            case BinaryOp::Le:  return CellValue::boolean(l <= r);
            case BinaryOp::Gt:  return CellValue::boolean(l > r);
            case BinaryOp::Ge:  return CellValue::boolean(l >= r);
        }
        return CellValue::error(ErrorCode::Value);
    }

    // Folds scalar and range arguments into a number list. Empty and text
    // cells inside ranges are skipped; errors propagate. Returns an error
    // value, or empty on success.
    CellValue collect_numbers(const std::vector<ExprPtr>& args, size_t first,
                              std::vector<double>& out) {
        for (size_t i = first; i < args.size(); ++i) {
            if (const auto* rr = std::get_if<Expr::RangeRef>(&args[i]->node)) {
                CellValue bad;
                rr->range.for_each([&](CellAddress a) {
                    if (!bad.is_empty()) return;
                    const CellValue& v = lookup(values_, a);
                    if (v.is_error()) { bad = v; return; }
                    if (v.is_number()) out.push_back(v.as_number());
                });
                if (!bad.is_empty()) return bad;
            } else {
                CellValue v = eval(*args[i]);
                double x;
                CellValue err;
                if (!to_number(v, x, err)) return err;
                out.push_back(x);
            }
        }
        return CellValue{};
    }

    CellValue arg_number(const std::vector<ExprPtr>& args, size_t i, double& out) {
        CellValue v = eval(*args[i]);
        CellValue err;
        if (!to_number(v, out, err)) return err;
        return CellValue{};
    }

    CellValue eval_call(const Expr::Call& c) {
        const std::string& name = c.name;
        if (!is_supported_function(name)) return CellValue::error(ErrorCode::Name);
        const auto& args = c.args;
        auto wrong_args = [] { return CellValue::error(ErrorCode::Value); };

        if (name == "SUM" || name == "AVERAGE" || name == "MIN" || name == "MAX") {
            if (args.empty()) return wrong_args();
            std::vector<double> xs;
            CellValue bad = collect_numbers(args, 0, xs);
            if (!bad.is_empty()) return bad;
            if (name == "SUM") {
                double s = 0;
                for (double x : xs) s += x;
                return CellValue::number(s);
            }
            if (name == "AVERAGE") {
                if (xs.empty()) return CellValue::error(ErrorCode::Div0);
                double s = 0;
                for (double x : xs) s += x;
                return CellValue::number(s / static_cast<double>(xs.size()));
            }
            if (xs.empty()) return CellValue::number(0); // MIN/MAX of nothing
            double m = xs[0];
            for (double x : xs) m = (name == "MIN") ? std::min(m, x) : std::max(m, x);
            return CellValue::number(m);
        }

        if (name == "ABS" || name == "SQRT" || name == "EXP" || name == "LN") {
            if (args.size() != 1) return wrong_args();
            double x = 0;
            CellValue bad = arg_number(args, 0, x);
            if (!bad.is_empty()) return bad;
            if (name == "ABS") return CellValue::number(std::fabs(x));
            if (name == "SQRT") {
                if (x < 0) return CellValue::error(ErrorCode::Num);
                return CellValue::number(std::sqrt(x));
            }
            if (name == "EXP") return CellValue::number(std::exp(x));
            if (x <= 0) return CellValue::error(ErrorCode::Num);
            return CellValue::number(std::log(x));
        }

        if (name == "ROUND") {
            if (args.size() != 2) return wrong_args();
            double x, nd;
            CellValue bad = arg_number(args, 0, x);
            if (!bad.is_empty()) return bad;
            bad = arg_number(args, 1, nd);
            if (!bad.is_empty()) return bad;
            double scale = std::pow(10.0, std::trunc(nd));
            // half away from zero
            return CellValue::number(std::round(x * scale) / scale);
        }

        if (name == "IF") {
            if (args.size() != 2 && args.size() != 3) return wrong_args();
            double cond;
            CellValue bad = arg_number(args, 0, cond);
            if (!bad.is_empty()) return bad;
            if (cond != 0.0) return eval(*args[1]);
            if (args.size() == 3) return eval(*args[2]);
            return CellValue::boolean(false);
        }

        if (name == "INDEX") {
            if (args.size() != 2) return wrong_args();
            const auto* rr = std::get_if<Expr::RangeRef>(&args[0]->node);
            if (!rr) return wrong_args();
            double kf;
            CellValue bad = arg_number(args, 1, kf);
            if (!bad.is_empty()) return bad;
            long k = static_cast<long>(std::trunc(kf));
            if (k < 1 || k > rr->range.size()) return CellValue::error(ErrorCode::Ref);
            long i = 0;
            CellValue out;
            rr->range.for_each([&](CellAddress a) {
                if (++i == k) out = lookup(values_, a);
            });
            return out;
        }

        if (name == "NPV") {
            if (args.size() < 2) return wrong_args();
            double rate;
            CellValue bad = arg_number(args, 0, rate);
            if (!bad.is_empty()) return bad;
            std::vector<double> flows;
            bad = collect_numbers(args, 1, flows);
            if (!bad.is_empty()) return bad;
            return npv(rate, flows);
        }

        return CellValue::error(ErrorCode::Name);
    }

    const std::map<CellAddress, CellValue>& values_;
};

CellValue literal_value(const CellContent& content) {
    if (content.is_number()) return CellValue::number(content.number_value());
    if (content.is_text()) return CellValue::text(content.text_value());
    return CellValue{};
}

} // namespace

CellValue npv(double rate, const std::vector<double>& flows) {
    if (rate <= -1.0) return CellValue::error(ErrorCode::Num);
    double acc = 0;
    double discount = 1.0;
    for (double flow : flows) {
        discount *= 1.0 + rate; // first flow is discounted one period
        acc += flow / discount;
    }
    return CellValue::number(acc);
}

CellValue evaluate_expr(const Expr& expr,
                        const std::map<CellAddress, CellValue>& values) {
    return Evaluator(values).eval(expr);
}

// ---------------------------------------------------------------------------
// Model

Model::Model(Workbook wb) : wb_(std::move(wb)) {
    wb_.take_stale();
    wb_.take_structural_change();
    graph_.build(wb_);
    full_recalculate();
}

void Model::set_cell(const CellAddress& addr, CellContent content, bool force) {
    wb_.set_cell(addr, std::move(content), force);
}

void Model::set_input(const CellAddress& addr, double value) {
    wb_.set_input(addr, value);
}

void Model::restore_inputs(const Snapshot& snap) {
    wb_.restore_inputs(snap);
}

CellValue Model::value(const CellAddress& addr) {
    if (wb_.has_stale()) recalculate();
    auto it = values_.find(addr);
    if (it == values_.end())
        throw SheetError("unknown cell " + addr.to_string());
    return it->second;
}

const std::map<CellAddress, CellValue>& Model::values() {
    if (wb_.has_stale()) recalculate();
    return values_;
}

std::set<CellAddress> Model::recalculate() {
    std::set<CellAddress> changed = wb_.take_stale();
    if (changed.empty()) return {};

    if (wb_.take_structural_change()) {
        graph_.build(wb_);
        full_recalculate();
        std::set<CellAddress> all;
        for (const CellAddress& a : graph_.evaluation_order()) all.insert(a);
        for (const CellAddress& a : graph_.cycle_cells()) all.insert(a);
        return all;
    }

    for (const CellAddress& addr : changed) {
        auto it = wb_.cells().find(addr);
        if (it == wb_.cells().end())
            values_.erase(addr);
        else if (!it->second.is_formula())
            values_[addr] = literal_value(it->second);
    }

    std::vector<CellAddress> order = graph_.affected(changed);
    std::set<CellAddress> recomputed;
    for (const CellAddress& addr : order) {
        values_[addr] = evaluate_expr(*wb_.cells().at(addr).formula_node().ast, values_);
        recomputed.insert(addr);
    }
    for (const CellAddress& addr : graph_.cycle_cells())
        values_[addr] = CellValue::error(ErrorCode::Cycle);
    return recomputed;
}

void Model::full_recalculate() {
    values_.clear();
    for (const auto& [addr, content] : wb_.cells())
        if (!content.is_formula()) values_[addr] = literal_value(content);
    for (const CellAddress& addr : graph_.cycle_cells())
        values_[addr] = CellValue::error(ErrorCode::Cycle);
    for (const CellAddress& addr : graph_.evaluation_order())
        values_[addr] = evaluate_expr(*wb_.cells().at(addr).formula_node().ast, values_);
}

bool Model::at_base_case() {
    const Snapshot& base = wb_.base_case();
    if (base.values.empty()) return false;
    Snapshot now = wb_.snapshot_inputs();
    if (now.values.size() != base.values.size()) return false;
    for (const auto& [addr, v] : base.values) {
        auto it = now.values.find(addr);
        if (it == now.values.end() || !it->second.identical(v)) return false;
    }
    return true;
}

std::optional<double> Model::benchmark(const CellAddress& addr) const {
    auto it = wb_.benchmarks().find(addr);
    if (it == wb_.benchmarks().end()) return std::nullopt;
    return it->second;
}

bool Model::depends_on(const CellAddress& target, const CellAddress& input) const {
    std::set<CellAddress> seen;
    std::deque<CellAddress> queue{target};
    while (!queue.empty()) {
        CellAddress n = queue.front();
        queue.pop_front();
        for (const CellAddress& p : graph_.precedents(n)) {
            if (p == input) return true;
            if (seen.insert(p).second) queue.push_back(p);
        }
    }
    return false;
}

Model make_model(Workbook wb) {
    Model m(std::move(wb));
    // base case = the inputs as loaded; benchmarks = performance values there
    Workbook staged = m.workbook();
    Snapshot base = staged.snapshot_inputs();
    base.taken_at_base = true;
    staged.set_base_case(base);
    for (const auto& [addr, role] : staged.roles()) {
        if (role.kind != RoleKind::Performance) continue;
        CellValue v = m.value(addr);
        if (v.is_number()) staged.set_benchmark(addr, v.as_number());
    }
    return Model(std::move(staged));
}

} // namespace sheetlytics
