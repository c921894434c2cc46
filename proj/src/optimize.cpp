#include "sheetlytics/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sheetlytics {

namespace {

constexpr double kGoldenRatio = 0.6180339887498949; // (sqrt(5)-1)/2
constexpr int kMaxPasses = 50;

struct Objective {
    Model& model;
    const OptimizeSpec& spec;
    int evaluations = 0;
    int errors = 0;
    double best_seen = -std::numeric_limits<double>::infinity();
    std::vector<double> best_seen_point{};

    // Returns the objective in "maximize" orientation; errors map to -inf.
    double at(const std::vector<double>& point) {
        for (size_t i = 0; i < spec.variables.size(); ++i)
            model.set_input(spec.variables[i].cell, point[i]);
        ++evaluations;
        CellValue v = model.value(spec.objective);
        if (!v.is_number()) {
            ++errors;
            return -std::numeric_limits<double>::infinity();
        }
        double x = v.as_number();
        double oriented = spec.direction == OptimizeDirection::Maximize ? x : -x;
        if (oriented > best_seen) {
            best_seen = oriented;
            best_seen_point = point;
        }
        return oriented;
    }
};

// Golden-section maximization of f over [lo, hi] down to interval width
// `tol`. f takes the scalar for one axis; other axes are fixed by the
// caller.
template <typename F>
double golden_section_max(F f, double lo, double hi, double tol) {
    double a = lo, b = hi;
    double x1 = b - kGoldenRatio * (b - a);
    double x2 = a + kGoldenRatio * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > tol) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGoldenRatio * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGoldenRatio * (b - a);
            f2 = f(x2);
        }
    }
    return f1 >= f2 ? x1 : x2;
}

} // namespace

OptimizeResult optimize(Model& model, const OptimizeSpec& spec, bool apply_best) {
    size_t nvars = spec.variables.size();
    if (nvars < 1 || nvars > 2)
        throw SheetError("optimize supports one or two decision variables, got " +
                         std::to_string(nvars));
    if (spec.grid_points < 3) throw SheetError("optimize needs at least 3 grid points");
    for (const OptimizeVariable& var : spec.variables) {
        if (!model.workbook().has_input_role(var.cell))
            throw SheetError("optimize variable " + var.cell.to_string() +
                             " is not an input (data/decision) cell");
        if (!(var.lower < var.upper))
            throw SheetError("optimize variable " + var.cell.to_string() +
                             " needs lower < upper");
    }
    if (nvars == 2 && spec.variables[0].cell == spec.variables[1].cell)
        throw SheetError("optimize variables must be distinct cells");

    OptimizeResult result;
    for (const OptimizeVariable& var : spec.variables)
        result.dependency_warning |= !model.depends_on(spec.objective, var.cell);

    std::vector<double> original;
    for (const OptimizeVariable& var : spec.variables)
        original.push_back(model.workbook().content(var.cell).number_value());

    Objective obj{model, spec};
    int n = spec.grid_points;
    auto grid_value = [&](const OptimizeVariable& var, int i) {
        return var.lower + (var.upper - var.lower) * i / (n - 1);
    };
    std::vector<double> tol(nvars);
    for (size_t v = 0; v < nvars; ++v) {
        double span = spec.variables[v].upper - spec.variables[v].lower;
        tol[v] = spec.refine_tolerance > 0 ? spec.refine_tolerance : 1e-6 * span;
    }

    // exhaustive grid
    std::vector<int> best_idx(nvars, 0);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> point(nvars);
    int grid_total = nvars == 1 ? n : n * n;
    for (int i = 0; i < n; ++i) {
        point[0] = grid_value(spec.variables[0], i);
        if (nvars == 1) {
            double f = obj.at(point);
            if (f > best) { best = f; best_idx[0] = i; }
        } else {
            for (int j = 0; j < n; ++j) {
                point[1] = grid_value(spec.variables[1], j);
                double f = obj.at(point);
                if (f > best) { best = f; best_idx = {i, j}; }
            }
        }
    }
    if (obj.errors * 2 > grid_total) {
        for (size_t v = 0; v < nvars; ++v) model.set_input(spec.variables[v].cell, original[v]);
        model.recalculate();
        throw SheetError("objective " + spec.objective.to_string() + " errored at " +
                         std::to_string(obj.errors) + " of " + std::to_string(grid_total) +
                         " grid points");
    }
    if (!std::isfinite(best)) {
        for (size_t v = 0; v < nvars; ++v) model.set_input(spec.variables[v].cell, original[v]);
        model.recalculate();
        throw SheetError("objective " + spec.objective.to_string() +
                         " produced no numeric value on the grid");
    }

    std::vector<double> best_point(nvars);
    std::vector<double> spacing(nvars);
    for (size_t v = 0; v < nvars; ++v) {
        best_point[v] = grid_value(spec.variables[v], best_idx[v]);
        spacing[v] = (spec.variables[v].upper - spec.variables[v].lower) / (n - 1);
    }
    std::vector<double> grid_best_point = best_point;

    if (nvars == 1) {
        // refine within the grid interval bracketing the best point
        const OptimizeVariable& var = spec.variables[0];
        double lo = grid_value(var, std::max(0, best_idx[0] - 1));
        double hi = grid_value(var, std::min(n - 1, best_idx[0] + 1));
        golden_section_max(
            [&](double x) {
                point[0] = x;
                return obj.at(point);
            },
            lo, hi, tol[0]);
    } else {
        // cyclic per-axis golden-section passes over the full bounds
        for (int pass = 0; pass < kMaxPasses; ++pass) {
            double moved = 0;
            for (size_t v = 0; v < nvars; ++v) {
                const OptimizeVariable& var = spec.variables[v];
                point = best_point;
                double refined = golden_section_max(
                    [&](double x) {
                        point[v] = x;
                        return obj.at(point);
                    },
                    var.lower, var.upper, tol[v]);
                moved = std::max(moved, std::fabs(refined - best_point[v]));
                best_point[v] = refined;
            }
            if (moved < std::max(tol[0], tol[1])) break;
        }
    }

    // the winner is the best point seen anywhere, grid or refinement
    best_point = obj.best_seen_point;
    for (size_t v = 0; v < nvars; ++v)
        result.multimodal_warning |=
            std::fabs(best_point[v] - grid_best_point[v]) > spacing[v];

    // fresh evaluation at the winner; this exact value is reported
    for (size_t v = 0; v < nvars; ++v) model.set_input(spec.variables[v].cell, best_point[v]);
    CellValue final_value = model.value(spec.objective);
    ++obj.evaluations;
    if (!final_value.is_number())
        throw SheetError("objective errored at the refined optimum");

    result.best_point = best_point;
    result.best_value = final_value.as_number();
    result.evaluations = obj.evaluations;

    if (!apply_best) {
        for (size_t v = 0; v < nvars; ++v) model.set_input(spec.variables[v].cell, original[v]);
        model.recalculate();
    }
    return result;
}

} // namespace sheetlytics
