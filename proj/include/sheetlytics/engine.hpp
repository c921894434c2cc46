#pragma once

#include <map>
#include <set>
#include <vector>

#include "sheetlytics/formula.hpp"
#include "sheetlytics/workbook.hpp"

namespace sheetlytics {

// Precedent/dependent edges between cells, with a cached topological order
// over the formula cells. Ranges are expanded to individual cells. Cells on
// reference cycles are identified exactly (strongly connected components).
class DepGraph {
public:
    void build(const Workbook& wb);

    const std::set<CellAddress>& cycle_cells() const { return cycle_; }

    // Transitive formula dependents of `changed` (including changed formula
    // cells themselves), in evaluation order. Cycle members are excluded;
    // they hold #CYCLE! permanently.
    std::vector<CellAddress> affected(const std::set<CellAddress>& changed) const;

    // All formula cells in evaluation order.
    const std::vector<CellAddress>& evaluation_order() const { return topo_; }

    const std::set<CellAddress>& precedents(const CellAddress& addr) const;

private:
    std::map<CellAddress, std::set<CellAddress>> precedents_;
    std::map<CellAddress, std::set<CellAddress>> dependents_;
    std::vector<CellAddress> topo_;                 // formula cells, cycle-free
    std::map<CellAddress, size_t> topo_index_;
    std::set<CellAddress> cycle_;
};

// Net present value with the first flow discounted one period. Rates at or
// below -100% yield #NUM!.
CellValue npv(double rate, const std::vector<double>& flows);

// Evaluates one expression against a value map (missing cells read as
// empty). Exposed for the engine and for reference evaluators in tests.
CellValue evaluate_expr(const Expr& expr,
                        const std::map<CellAddress, CellValue>& values);

// A workbook paired with its dependency graph and computed values — the
// machine that turns inputs into outputs. Copyable; copies are independent,
// so clones may be evaluated concurrently.
class Model {
public:
    explicit Model(Workbook wb);

    const Workbook& workbook() const { return wb_; }

    // Mutations forward to the workbook; recalculation is deferred until a
    // value is read or recalculate() is called.
    void set_cell(const CellAddress& addr, CellContent content, bool force = false);
    void set_input(const CellAddress& addr, double value);
    void restore_inputs(const Snapshot& snap);
    Snapshot snapshot_inputs() const { return wb_.snapshot_inputs(); }

    // Current value of a cell (recalculating first if needed).
    // The cell must exist.
    CellValue value(const CellAddress& addr);

    // All current values, keyed by address, for every cell in the workbook.
    const std::map<CellAddress, CellValue>& values();

    // Applies pending edits incrementally: recomputes exactly the
    // transitive formula dependents of the changed cells. Returns the set
    // of recomputed formula cells. A structural edit (formula added,
    // removed or rewritten) rebuilds the graph first.
    std::set<CellAddress> recalculate();

    // True when the current inputs equal the base-case snapshot.
    bool at_base_case();

    // Benchmark for a performance cell, if one was recorded.
    std::optional<double> benchmark(const CellAddress& addr) const;

    const DepGraph& graph() const { return graph_; }

    // Does `target` transitively depend on `input`?
    bool depends_on(const CellAddress& target, const CellAddress& input) const;

private:
    void full_recalculate();

    Workbook wb_;
    DepGraph graph_;
    std::map<CellAddress, CellValue> values_;
};

// Builds a model and finishes load-time bookkeeping: takes the base-case
// snapshot from the current inputs and records a benchmark for every
// performance cell that evaluates to a number.
Model make_model(Workbook wb);

} // namespace sheetlytics
