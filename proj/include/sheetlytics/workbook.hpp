#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "sheetlytics/cell.hpp"

namespace sheetlytics {

// Frozen copy of input values: literal numbers only, never formulas.
struct Snapshot {
    std::map<CellAddress, CellValue> values;
    bool taken_at_base = false;

    bool operator==(const Snapshot& o) const {
        return taken_at_base == o.taken_at_base && values == o.values;
    }
};

// Single-sheet workbook: the cell grid plus role annotations, performance
// benchmarks and the base-case snapshot. Holds no computed values; the
// engine owns those. Mutations accumulate in a stale set the engine drains.
class Workbook {
public:
    const std::map<CellAddress, CellContent>& cells() const { return cells_; }
    const std::map<CellAddress, Role>& roles() const { return roles_; }
    const std::map<CellAddress, double>& benchmarks() const { return benchmarks_; }
    const Snapshot& base_case() const { return base_case_; }

    bool has_cell(const CellAddress& addr) const { return cells_.count(addr) != 0; }
    const CellContent& content(const CellAddress& addr) const;
    std::optional<Role> role(const CellAddress& addr) const;
    bool has_input_role(const CellAddress& addr) const;

    // Label from the role annotation, or the address text when unlabeled.
    std::string label_for(const CellAddress& addr) const;

    // Replaces a cell's content. Role-protection rules:
    //  - an input-role (data/decision) cell only accepts number literals;
    //  - an output/performance-role cell only accepts formulas.
    // `force` overrides; a role invalidated by a forced write is dropped
    // (and its benchmark with it). Setting identical content is a no-op
    // and leaves no stale mark.
    void set_cell(const CellAddress& addr, CellContent content, bool force = false);

    // Fast path for analysis: assign a new value to an input-role literal.
    void set_input(const CellAddress& addr, double value);

    // Assigns a role. The cell must exist and match the role's kind
    // (inputs on number literals, outputs on formulas). One role per cell.
    void set_role(const CellAddress& addr, Role role);

    void set_benchmark(const CellAddress& addr, double value);
    void set_base_case(Snapshot snap) { base_case_ = std::move(snap); }

    // Current literal value of every input-role cell.
    Snapshot snapshot_inputs() const;

    // Writes every snapshotted value back. Unknown addresses are rejected
    // up front (listing them all); nothing is modified in that case.
    void restore_inputs(const Snapshot& snap);

    // Addresses whose content changed since the engine last looked.
    std::set<CellAddress> take_stale();
    bool has_stale() const { return !stale_.empty(); }
    // True when a set_cell changed a formula or a cell's kind, so the
    // dependency graph must be rebuilt.
    bool take_structural_change();

private:
    std::map<CellAddress, CellContent> cells_;
    std::map<CellAddress, Role> roles_;
    std::map<CellAddress, double> benchmarks_;
    Snapshot base_case_;
    std::set<CellAddress> stale_;
    bool structural_change_ = false;
};

} // namespace sheetlytics
