#include "sheetlytics/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace sheetlytics {

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr int kHistogramBins = 20;

std::string fmt(double v) {
    char buf[32];
    int n = std::snprintf(buf, sizeof buf, "%g", v);
    return std::string(buf, buf + n);
}

} // namespace

Distribution Distribution::uniform(double a, double b) {
    if (!(a < b)) throw SheetError("uniform(a,b) needs a < b");
    Distribution d;
    d.v_ = Uniform{a, b};
    return d;
}

Distribution Distribution::triangular(double a, double mode, double b) {
    if (!(a < b) || mode < a || mode > b)
        throw SheetError("triangular(a,mode,b) needs a <= mode <= b and a < b");
    Distribution d;
    d.v_ = Triangular{a, mode, b};
    return d;
}

Distribution Distribution::normal(double mean, double sd) {
    if (!(sd > 0)) throw SheetError("normal(mean,sd) needs sd > 0");
    Distribution d;
    d.v_ = Normal{mean, sd};
    return d;
}

Distribution Distribution::discrete(std::vector<double> values, std::vector<double> probs) {
    if (values.empty() || values.size() != probs.size())
        throw SheetError("discrete distribution needs matching, non-empty values and probabilities");
    double total = 0;
    for (double p : probs) {
        if (p < 0) throw SheetError("discrete probabilities must be non-negative");
        total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9)
        throw SheetError("discrete probabilities must sum to 1 (got " + fmt(total) + ")");
    Distribution d;
    d.v_ = Discrete{std::move(values), std::move(probs)};
    return d;
}

double Distribution::sample(double u, double u2) const {
    if (const auto* p = std::get_if<Uniform>(&v_)) {
        return p->a + (p->b - p->a) * u;
    }
    if (const auto* p = std::get_if<Triangular>(&v_)) {
        double span = p->b - p->a;
        double cut = (p->mode - p->a) / span; // CDF value at the mode
        if (u < cut) return p->a + std::sqrt(u * span * (p->mode - p->a));
        return p->b - std::sqrt((1.0 - u) * span * (p->b - p->mode));
    }
    if (const auto* p = std::get_if<Normal>(&v_)) {
        // Box-Muller; 1-u keeps the log argument in (0,1]
        double r = std::sqrt(-2.0 * std::log(1.0 - u));
        return p->mean + p->sd * r * std::cos(kTwoPi * u2);
    }
    const auto& d = std::get<Discrete>(v_);
    double cum = 0;
    for (size_t i = 0; i < d.values.size(); ++i) {
        cum += d.probs[i];
        if (cum > u) return d.values[i]; // bucket i covers [cum_prev, cum_i)
    }
    return d.values.back();
}

int Distribution::draws_needed() const {
    return std::holds_alternative<Normal>(v_) ? 2 : 1;
}

std::string Distribution::to_string() const {
    if (const auto* p = std::get_if<Uniform>(&v_))
        return "uniform(" + fmt(p->a) + "," + fmt(p->b) + ")";
    if (const auto* p = std::get_if<Triangular>(&v_))
        return "triangular(" + fmt(p->a) + "," + fmt(p->mode) + "," + fmt(p->b) + ")";
    if (const auto* p = std::get_if<Normal>(&v_))
        return "normal(" + fmt(p->mean) + "," + fmt(p->sd) + ")";
    const auto& d = std::get<Discrete>(v_);
    std::string out = "discrete(";
    for (size_t i = 0; i < d.values.size(); ++i) {
        if (i) out += " ";
        out += fmt(d.values[i]) + ":" + fmt(d.probs[i]);
    }
    return out + ")";
}

double percentile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw SheetError("percentile of an empty sample");
    if (p < 0 || p > 100) throw SheetError("percentile p must be in [0,100]");
    double rank = 1.0 + (p / 100.0) * (static_cast<double>(sorted.size()) - 1.0);
    size_t lo = static_cast<size_t>(std::floor(rank)) - 1;
    size_t hi = static_cast<size_t>(std::ceil(rank)) - 1;
    double frac = rank - std::floor(rank);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

namespace {

const int kPercentileKeys[] = {1, 5, 10, 25, 50, 75, 90, 95, 99};

OutputStats summarize(const CellAddress& addr, const std::string& label,
                      std::vector<double> samples) {
    OutputStats stats;
    stats.address = addr;
    stats.label = label;
    stats.n = static_cast<long>(samples.size());
    if (samples.empty()) return stats;

    std::sort(samples.begin(), samples.end());
    double sum = 0;
    for (double x : samples) sum += x;
    stats.mean = sum / static_cast<double>(samples.size());
    double ss = 0;
    for (double x : samples) ss += (x - stats.mean) * (x - stats.mean);
    stats.stddev = samples.size() > 1
                       ? std::sqrt(ss / (static_cast<double>(samples.size()) - 1.0))
                       : 0.0;
    stats.min = samples.front();
    stats.max = samples.back();
    for (int p : kPercentileKeys) stats.percentiles[p] = percentile(samples, p);
    stats.median = stats.percentiles[50];

    stats.histogram.lo = stats.min;
    stats.histogram.hi = stats.max;
    stats.histogram.counts.assign(kHistogramBins, 0);
    double width = (stats.max - stats.min) / kHistogramBins;
    for (double x : samples) {
        int bin = width > 0 ? static_cast<int>((x - stats.min) / width) : 0;
        bin = std::clamp(bin, 0, kHistogramBins - 1);
        ++stats.histogram.counts[static_cast<size_t>(bin)];
    }
    return stats;
}

} // namespace

SimulationReport run_simulation(Model& model, const SimulationSpec& spec) {
    if (spec.trials < 1) throw SheetError("simulation needs at least one trial");
    if (spec.bindings.empty()) throw SheetError("simulation has no input bindings");
    if (spec.outputs.empty()) throw SheetError("simulation has no outputs");
    for (const auto& [addr, dist] : spec.bindings) {
        auto role = model.workbook().role(addr);
        if (!role || role->kind != RoleKind::Data)
            throw SheetError("simulation binding " + addr.to_string() +
                             " requires a data-role cell (uncertainty lives in data)");
        (void)dist;
    }
    for (const ThresholdSpec& t : spec.thresholds) {
        if (std::find(spec.outputs.begin(), spec.outputs.end(), t.output) == spec.outputs.end())
            throw SheetError("threshold on " + t.output.to_string() +
                             " which is not a simulation output");
    }

    Snapshot pre_call = model.snapshot_inputs();

    SimulationReport report;
    report.trials = spec.trials;
    for (const auto& [addr, dist] : spec.bindings) {
        report.bound_inputs.push_back(addr);
        (void)dist;
    }

    std::vector<std::vector<double>> samples(spec.outputs.size());
    for (auto& s : samples) s.reserve(static_cast<size_t>(spec.trials));
    std::vector<long> hits(spec.thresholds.size(), 0);

    for (long t = 1; t <= spec.trials; ++t) {
        SplitMix64 stream(splitmix_mix(spec.seed ^ static_cast<std::uint64_t>(t)));
        TrialRecord record;
        record.trial = t;
        for (const auto& [addr, dist] : spec.bindings) {
            double u = stream.next_double();
            double u2 = dist.draws_needed() == 2 ? stream.next_double() : 0.0;
            double x = dist.sample(u, u2);
            model.set_input(addr, x);
            record.inputs.push_back(x);
        }
        bool failed = false;
        for (const CellAddress& out : spec.outputs) {
            CellValue v = model.value(out);
            record.outputs.push_back(v);
            if (!v.is_number()) failed = true;
        }
        record.failed = failed;
        if (failed) {
            ++report.failures;
        } else {
            for (size_t o = 0; o < spec.outputs.size(); ++o) {
                double x = record.outputs[o].as_number();
                samples[o].push_back(x);
                for (size_t ti = 0; ti < spec.thresholds.size(); ++ti) {
                    const ThresholdSpec& th = spec.thresholds[ti];
                    if (th.output != spec.outputs[o]) continue;
                    bool hit = th.greater_or_equal ? x >= th.level : x <= th.level;
                    if (hit) ++hits[ti];
                }
            }
        }
        if (spec.keep_trials) report.trial_matrix.push_back(std::move(record));
    }

    model.restore_inputs(pre_call);
    model.recalculate();

    report.error_status = report.failures * 10 > spec.trials;
    for (size_t o = 0; o < spec.outputs.size(); ++o)
        report.outputs.push_back(summarize(spec.outputs[o],
                                           model.workbook().label_for(spec.outputs[o]),
                                           std::move(samples[o])));
    for (size_t ti = 0; ti < spec.thresholds.size(); ++ti) {
        long ok = report.trials - report.failures;
        report.thresholds.push_back(
            {spec.thresholds[ti], ok > 0 ? static_cast<double>(hits[ti]) / ok : 0.0});
    }
    return report;
}

} // namespace sheetlytics
