#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sheetlytics/engine.hpp"

namespace sheetlytics {

struct GoalSeekSpec {
    CellAddress set_cell;            // formula cell to drive
    double target = 0;               // value it should reach
    CellAddress by_changing;         // input cell to vary
    double tolerance = 1e-3;         // on |achieved - target|
    int max_iterations = 100;        // root-finding iterations
    std::optional<double> initial;   // defaults to the input's current value
    double bracket_expansion = 2.0;  // probe growth factor
    std::vector<double> starts;      // multi-start probes (optional)
};

enum class GoalSeekStatus { Converged, MaxIterationsReached, NoBracketFound, FunctionError };

std::string goal_seek_status_text(GoalSeekStatus s);

struct GoalSeekResult {
    GoalSeekStatus status = GoalSeekStatus::NoBracketFound;
    double start = 0;                  // the initial value this run used
    std::optional<double> solution;    // input value found (Converged/MaxIterations)
    double achieved = 0;               // set_cell value at `solution`
    int iterations = 0;                // root-finding iterations
    double residual = 0;               // |achieved - target|
    std::optional<double> error_at;    // x where evaluation failed (FunctionError)
    std::string note;
};

// Finds an input value that drives set_cell to the target, within
// spec.tolerance on the output. Brackets by geometrically expanding probes
// around the start (with a uniform re-scan of the probed span when the
// expanding ladder steps over a sign change), then runs Brent's method.
// On convergence the input is left at the solution unless restore=true;
// failed runs always restore.
GoalSeekResult goal_seek(Model& model, const GoalSeekSpec& spec, bool restore = false);

// goal_seek once per entry of spec.starts, restoring the model between
// runs. Converged solutions within 10*tolerance of each other are merged;
// survivors are sorted by solution and precede any failed runs.
std::vector<GoalSeekResult> multi_start_goal_seek(Model& model, const GoalSeekSpec& spec);

} // namespace sheetlytics
