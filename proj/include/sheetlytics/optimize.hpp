#pragma once

#include <string>
#include <vector>

#include "sheetlytics/engine.hpp"

namespace sheetlytics {

enum class OptimizeDirection { Maximize, Minimize };

struct OptimizeVariable {
    CellAddress cell; // decision-role input
    double lower = 0;
    double upper = 0;
};

struct OptimizeSpec {
    std::vector<OptimizeVariable> variables; // one or two
    CellAddress objective;
    OptimizeDirection direction = OptimizeDirection::Maximize;
    int grid_points = 21;         // per axis
    double refine_tolerance = -1; // < 0 => 1e-6 * span per axis
};

struct OptimizeResult {
    std::vector<double> best_point;
    double best_value = 0; // fresh evaluation of the objective at best_point
    int evaluations = 0;
    bool multimodal_warning = false;  // refinement left the best grid cell
    bool dependency_warning = false;  // objective ignores some variable
};

// Best value of a bounded one- or two-variable decision: exhaustive grid,
// then golden-section refinement (on the bracketing interval for one
// variable; cyclic per-axis passes for two). The model is restored unless
// apply_best is set. Errors at isolated grid points count as worst
// possible; errors at more than half the grid abort.
OptimizeResult optimize(Model& model, const OptimizeSpec& spec, bool apply_best = false);

} // namespace sheetlytics
