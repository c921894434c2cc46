#include "sheetlytics/backsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sheetlytics {

namespace {

constexpr int kMaxBracketProbes = 60;
constexpr int kRescanIntervals = 512;

struct EvalFailure {
    double x;
};

// g(x) = set_cell(by_changing := x) - target; throws EvalFailure when the
// model yields a non-number.
class Residual {
public:
    Residual(Model& model, const GoalSeekSpec& spec)
        : model_(model), spec_(spec) {}

    double operator()(double x) {
        model_.set_input(spec_.by_changing, x);
        CellValue v = model_.value(spec_.set_cell);
        if (!v.is_number()) throw EvalFailure{x};
        return v.as_number() - spec_.target;
    }

private:
    Model& model_;
    const GoalSeekSpec& spec_;
};

struct Bracket {
    double a, fa;
    double b, fb;
};

bool opposite_signs(double fa, double fb) {
    return (fa < 0 && fb > 0) || (fa > 0 && fb < 0);
}

// Geometric ladder: probe x0 +- step*expansion^k, alternating directions,
// watching for a sign change against the previous probe on the same side.
std::optional<Bracket> bracket_by_expansion(Residual& g, double x0, double g0,
                                            double step0, double expansion,
                                            std::vector<std::pair<double, double>>& probed) {
    double prev_x[2] = {x0, x0};
    double prev_g[2] = {g0, g0};
    double offset = step0;
    int probes = 0;
    while (probes < kMaxBracketProbes) {
        for (int dir = 0; dir < 2 && probes < kMaxBracketProbes; ++dir) {
            double x = dir == 0 ? x0 + offset : x0 - offset;
            double gx = g(x);
            ++probes;
            probed.emplace_back(x, gx);
            if (gx == 0.0) return Bracket{x, 0.0, x, 0.0};
            if (opposite_signs(prev_g[dir], gx))
                return Bracket{prev_x[dir], prev_g[dir], x, gx};
            prev_x[dir] = x;
            prev_g[dir] = gx;
        }
        offset *= expansion;
    }
    return std::nullopt;
}

// The expanding ladder can step clean over a region where g changes sign
// twice (the classic multiple-IRR hump). When it finds nothing, re-scan the
// span it covered on a uniform grid and take the sign change nearest the
// start.
std::optional<Bracket> bracket_by_rescan(Residual& g, double x0,
                                         const std::vector<std::pair<double, double>>& probed) {
    double lo = x0, hi = x0;
    for (const auto& [x, gx] : probed) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        (void)gx;
    }
    if (!(hi > lo)) return std::nullopt;

    double width = (hi - lo) / kRescanIntervals;
    std::optional<Bracket> best;
    double best_distance = std::numeric_limits<double>::infinity();
    double prev_x = lo;
    double prev_g = g(lo);
    for (int i = 1; i <= kRescanIntervals; ++i) {
        double x = lo + width * i;
        double gx = g(x);
        if (gx == 0.0) return Bracket{x, 0.0, x, 0.0};
        if (opposite_signs(prev_g, gx)) {
            double mid = 0.5 * (prev_x + x);
            double distance = std::fabs(mid - x0);
            if (distance < best_distance) {
                best_distance = distance;
                best = Bracket{prev_x, prev_g, x, gx};
            }
        }
        prev_x = x;
        prev_g = gx;
    }
    return best;
}

// Brent's method on a sign-changing bracket. Termination is on the
// output residual |g| <= tolerance, not on step size.
void brent(Residual& g, Bracket br, double tolerance, int max_iterations,
           GoalSeekResult& result) {
    double a = br.a, fa = br.fa;
    double b = br.b, fb = br.fb;
    if (std::fabs(fa) < std::fabs(fb)) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = a, fc = fa;
    double d = b - a, e = d;
    int iter = 0;

    auto finish = [&](GoalSeekStatus status) {
        result.status = status;
        result.solution = b;
        result.iterations = iter;
    };

    if (std::fabs(fb) <= tolerance) return finish(GoalSeekStatus::Converged);

    while (iter < max_iterations) {
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        double tol1 = 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(b);
        double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) {
            // bracket exhausted at machine precision
            return finish(std::fabs(fb) <= tolerance ? GoalSeekStatus::Converged
                                                     : GoalSeekStatus::MaxIterationsReached);
        }
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            double s = fb / fa;
            double p, q;
            if (a == c) { // secant
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else { // inverse quadratic interpolation
                q = fa / fc;
                double r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0) q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if (std::fabs(d) > tol1)
            b += d;
        else
            b += xm > 0 ? tol1 : -tol1;
        fb = g(b);
        ++iter;
        if (std::fabs(fb) <= tolerance) return finish(GoalSeekStatus::Converged);
        if ((fb > 0) == (fc > 0)) {
            c = a;
            fc = fa;
            e = d = b - a;
        }
    }
    finish(GoalSeekStatus::MaxIterationsReached);
}

} // namespace

std::string goal_seek_status_text(GoalSeekStatus s) {
    switch (s) {
        case GoalSeekStatus::Converged:            return "converged";
        case GoalSeekStatus::MaxIterationsReached: return "max_iterations_reached";
        case GoalSeekStatus::NoBracketFound:       return "no_bracket_found";
        case GoalSeekStatus::FunctionError:        return "function_error";
    }
    return "?";
}

GoalSeekResult goal_seek(Model& model, const GoalSeekSpec& spec, bool restore) {
    if (spec.tolerance <= 0) throw SheetError("goal-seek tolerance must be positive");
    if (spec.max_iterations < 1) throw SheetError("goal-seek needs at least one iteration");
    if (!model.workbook().content(spec.set_cell).is_formula())
        throw SheetError("goal-seek set cell " + spec.set_cell.to_string() +
                         " is not a formula cell");
    if (!model.workbook().has_input_role(spec.by_changing))
        throw SheetError("goal-seek changing cell " + spec.by_changing.to_string() +
                         " is not an input (data/decision) cell");

    double pre_call = model.workbook().content(spec.by_changing).number_value();
    double x0 = spec.initial.value_or(pre_call);

    GoalSeekResult result;
    result.start = x0;

    if (!model.depends_on(spec.set_cell, spec.by_changing)) {
        result.status = GoalSeekStatus::NoBracketFound;
        result.note = spec.set_cell.to_string() + " does not depend on " +
                      spec.by_changing.to_string();
        return result;
    }

    Residual g(model, spec);
    auto restore_input = [&] {
        model.set_input(spec.by_changing, pre_call);
        model.recalculate();
    };

    try {
        double g0 = g(x0);
        if (std::fabs(g0) <= spec.tolerance) {
            result.status = GoalSeekStatus::Converged;
            result.solution = x0;
        } else {
            double step0 = spec.tolerance * std::max(1.0, std::fabs(x0));
            std::vector<std::pair<double, double>> probed;
            std::optional<Bracket> br =
                bracket_by_expansion(g, x0, g0, step0, spec.bracket_expansion, probed);
            if (!br) br = bracket_by_rescan(g, x0, probed);
            if (!br) {
                result.status = GoalSeekStatus::NoBracketFound;
                result.note = "no sign change within " +
                              std::to_string(kMaxBracketProbes) + " probes";
                restore_input();
                return result;
            }
            brent(g, *br, spec.tolerance, spec.max_iterations, result);
        }
        // post-hoc check at the solution; also leaves the input there
        double achieved_delta = g(*result.solution);
        result.achieved = achieved_delta + spec.target;
        result.residual = std::fabs(achieved_delta);
    } catch (const EvalFailure& failure) {
        result.status = GoalSeekStatus::FunctionError;
        result.solution.reset();
        result.error_at = failure.x;
        result.note = "model evaluation failed at " + std::to_string(failure.x);
        restore_input();
        return result;
    }

    if (restore || result.status != GoalSeekStatus::Converged) restore_input();
    return result;
}

std::vector<GoalSeekResult> multi_start_goal_seek(Model& model, const GoalSeekSpec& spec) {
    if (spec.starts.empty())
        throw SheetError("multi-start goal seek needs a non-empty starts list");

    std::vector<GoalSeekResult> converged;
    std::vector<GoalSeekResult> failed;
    for (double start : spec.starts) {
        GoalSeekSpec one = spec;
        one.initial = start;
        GoalSeekResult r = goal_seek(model, one, /*restore=*/true);
        (r.status == GoalSeekStatus::Converged ? converged : failed).push_back(std::move(r));
    }

    std::sort(converged.begin(), converged.end(),
              [](const GoalSeekResult& a, const GoalSeekResult& b) {
                  return *a.solution < *b.solution;
              });
    std::vector<GoalSeekResult> out;
    for (GoalSeekResult& r : converged) {
        if (!out.empty() && out.back().status == GoalSeekStatus::Converged &&
            std::fabs(*r.solution - *out.back().solution) <= 10.0 * spec.tolerance) {
            if (r.residual < out.back().residual) out.back() = std::move(r);
            continue;
        }
        out.push_back(std::move(r));
    }
    for (GoalSeekResult& r : failed) out.push_back(std::move(r));
    return out;
}

} // namespace sheetlytics
