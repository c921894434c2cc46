#include "sheetlytics/workbook.hpp"

namespace sheetlytics {

namespace {
const CellContent kEmptyContent{};
}

const CellContent& Workbook::content(const CellAddress& addr) const {
    auto it = cells_.find(addr);
    return it == cells_.end() ? kEmptyContent : it->second;
}

std::optional<Role> Workbook::role(const CellAddress& addr) const {
    auto it = roles_.find(addr);
    if (it == roles_.end()) return std::nullopt;
    return it->second;
}

bool Workbook::has_input_role(const CellAddress& addr) const {
    auto it = roles_.find(addr);
    return it != roles_.end() && is_input_role(it->second.kind);
}

std::string Workbook::label_for(const CellAddress& addr) const {
    auto it = roles_.find(addr);
    if (it != roles_.end() && !it->second.label.empty()) return it->second.label;
    return addr.to_string();
}

void Workbook::set_cell(const CellAddress& addr, CellContent content, bool force) {
    const CellContent& old = this->content(addr);
    if (old == content) return;

    auto role_it = roles_.find(addr);
    if (role_it != roles_.end() && !force) {
        RoleKind kind = role_it->second.kind;
        if (is_input_role(kind) && !content.is_number())
            throw ProtectionError("cell " + addr.to_string() + " has " +
                                  role_kind_text(kind) +
                                  " role and only accepts number literals");
        if (is_output_role(kind) && !content.is_formula())
            throw ProtectionError("cell " + addr.to_string() + " has " +
                                  role_kind_text(kind) +
                                  " role; overwriting its formula requires force");
    }

    bool was_formula = old.is_formula();
    bool is_formula = content.is_formula();
    if (was_formula || is_formula) structural_change_ = true;

    if (content.is_empty())
        cells_.erase(addr);
    else
        cells_[addr] = std::move(content);
    stale_.insert(addr);

    // a forced write can leave the role pointing at the wrong cell kind
    if (role_it != roles_.end()) {
        RoleKind kind = role_it->second.kind;
        const CellContent& now = this->content(addr);
        bool ok = (is_input_role(kind) && now.is_number()) ||
                  (is_output_role(kind) && now.is_formula());
        if (!ok) {
            roles_.erase(role_it);
            benchmarks_.erase(addr);
        }
    }
}

void Workbook::set_input(const CellAddress& addr, double value) {
    if (!has_input_role(addr))
        throw SheetError("cell " + addr.to_string() + " is not an input (data/decision) cell");
    set_cell(addr, CellContent::number(value));
}

void Workbook::set_role(const CellAddress& addr, Role role) {
    const CellContent& c = content(addr);
    if (is_input_role(role.kind) && !c.is_number())
        throw SheetError(role_kind_text(role.kind) + " role on " + addr.to_string() +
                         " requires a number-literal cell");
    if (is_output_role(role.kind) && !c.is_formula())
        throw SheetError(role_kind_text(role.kind) + " role on " + addr.to_string() +
                         " requires a formula cell");
    roles_[addr] = std::move(role);
}

void Workbook::set_benchmark(const CellAddress& addr, double value) {
    auto it = roles_.find(addr);
    if (it == roles_.end() || it->second.kind != RoleKind::Performance)
        throw SheetError("benchmark on " + addr.to_string() +
                         " requires a performance-role cell");
    benchmarks_[addr] = value;
}

Snapshot Workbook::snapshot_inputs() const {
    Snapshot snap;
    for (const auto& [addr, role] : roles_) {
        if (!is_input_role(role.kind)) continue;
        snap.values.emplace(addr, CellValue::number(content(addr).number_value()));
    }
    return snap;
}

void Workbook::restore_inputs(const Snapshot& snap) {
    std::string missing;
    for (const auto& [addr, value] : snap.values) {
        if (!has_cell(addr)) {
            if (!missing.empty()) missing += ", ";
            missing += addr.to_string();
        }
        (void)value;
    }
    if (!missing.empty())
        throw SheetError("unknown address " + missing);
    for (const auto& [addr, value] : snap.values)
        set_cell(addr, CellContent::number(value.as_number()));
}

std::set<CellAddress> Workbook::take_stale() {
    std::set<CellAddress> out;
    out.swap(stale_);
    return out;
}

bool Workbook::take_structural_change() {
    bool v = structural_change_;
    structural_change_ = false;
    return v;
}

} // namespace sheetlytics
