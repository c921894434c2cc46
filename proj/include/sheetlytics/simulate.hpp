#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sheetlytics/engine.hpp"

namespace sheetlytics {

// SplitMix64 (Vigna's constants). The stream is part of the external
// contract: a seed must reproduce bit-identical simulations everywhere.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1): top 53 bits of the next output.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

// One mixing step applied to `x`; used to derive per-trial sub-seeds.
inline std::uint64_t splitmix_mix(std::uint64_t x) {
    return SplitMix64(x).next();
}

// Parametric distribution for an uncertain input. Parameters are validated
// at construction; sampling never fails.
class Distribution {
public:
    struct Uniform { double a, b; };
    struct Triangular { double a, mode, b; };
    struct Normal { double mean, sd; };
    struct Discrete {
        std::vector<double> values;
        std::vector<double> probs;
    };

    static Distribution uniform(double a, double b);
    static Distribution triangular(double a, double mode, double b);
    static Distribution normal(double mean, double sd);
    static Distribution discrete(std::vector<double> values, std::vector<double> probs);

    // Inverse-CDF style sampling from uniforms in [0,1). Normal consumes
    // both u and u2 (Box-Muller); the others use u alone.
    double sample(double u, double u2 = 0) const;

    // Uniforms one sample consumes: 2 for Normal, 1 otherwise.
    int draws_needed() const;

    std::string to_string() const; // "uniform(0,1)", ...

    const std::variant<Uniform, Triangular, Normal, Discrete>& node() const { return v_; }

private:
    std::variant<Uniform, Triangular, Normal, Discrete> v_;
};

struct ThresholdSpec {
    CellAddress output;
    bool greater_or_equal = true; // false => <=
    double level = 0;
};

struct SimulationSpec {
    std::map<CellAddress, Distribution> bindings; // data-role inputs only
    long trials = 1000;
    std::uint64_t seed = 0;
    std::vector<CellAddress> outputs;
    std::vector<ThresholdSpec> thresholds;
    bool keep_trials = false; // retain the raw trial matrix in the report
};

struct Histogram {
    double lo = 0;
    double hi = 0;
    std::vector<long> counts; // 20 equal-width bins
};

struct OutputStats {
    CellAddress address;
    std::string label;
    long n = 0; // successful trials
    double mean = 0;
    double median = 0;
    double stddev = 0; // sample standard deviation
    double min = 0;
    double max = 0;
    std::map<int, double> percentiles; // keys 1,5,10,25,50,75,90,95,99
    Histogram histogram;
};

struct ThresholdResult {
    ThresholdSpec spec;
    double probability = 0;
};

struct TrialRecord {
    long trial = 0; // 1-based
    std::vector<double> inputs;
    std::vector<CellValue> outputs;
    bool failed = false;
};

struct SimulationReport {
    long trials = 0;
    long failures = 0;
    bool error_status = false; // more than 10% of trials failed
    std::vector<CellAddress> bound_inputs;
    std::vector<OutputStats> outputs;
    std::vector<ThresholdResult> thresholds;
    std::vector<TrialRecord> trial_matrix; // only with keep_trials
};

// Inclusive linear-interpolation percentile at rank 1 + (p/100)(n-1).
// `sorted` must be ascending and non-empty; p in [0, 100].
double percentile(const std::vector<double>& sorted, double p);

// Runs the Monte Carlo simulation. Trial t draws from a SplitMix64 stream
// seeded with splitmix_mix(seed ^ t), so results do not depend on
// execution order. The workbook is restored afterwards. Trials whose
// outputs error are recorded as failures; more than 10% failed trials
// flags the whole report.
SimulationReport run_simulation(Model& model, const SimulationSpec& spec);

} // namespace sheetlytics
