#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fermiheat/lattice.hpp"
#include "fermiheat/quasifree.hpp"

namespace fermiheat {

inline constexpr const char* kToolVersion = "fermiheat 0.1.0";

// Aggregates every knob of a scenario run. Serialized as versioned JSON;
// defaults are made explicit when the manifest is written.
struct ScenarioConfig {
    int schema_version = 1;
    int dimension = 1;
    std::vector<double> half_sides = {16.0};  // box half-side L (list for sweeps)
    double coupling = 0.5;                    // lambda
    double beta = 1.0;
    std::vector<std::uint64_t> seeds = {1};
    std::optional<double> constant_omega;     // overrides sampled disorder when set

    std::vector<double> eta_grid = {0.1};
    std::vector<double> scale_grid = {4.0};   // field scale l
    double t0 = 0.0;
    double t1 = 1.0;
    std::vector<double> direction;            // defaults to the first axis
    int quadrature_nodes = 16;

    int step_divisor = 400;                   // integrator step = (t1-t0)/divisor
    double horizon = 0.0;                     // 0 means t1
    double observation_half_side = 4.0;       // dissipation probe window

    int truncation_order = 3;                 // heat-series K
    int series_grid_steps = 128;              // base simplex grid
    double epsilon = 0.5;                     // decay-bound exponent knob
    std::string output_dir = "out";
    bool oracle = false;
    int threads = 1;

    static ScenarioConfig from_json(const std::string& text);
    static ScenarioConfig from_json_file(const std::string& path);
    std::string to_json() const;

    // Throws std::invalid_argument naming every offending field.
    void validate() const;

    double step() const { return (t1 - t0) / step_divisor; }
    double effective_horizon() const { return horizon > 0.0 ? horizon : t1; }
    VectorPotentialSpec potential(double eta, double scale) const;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    double residual = 0.0;
    double tolerance = 0.0;
};

struct RunManifest {
    std::string tool_version = kToolVersion;
    std::uint64_t config_hash = 0;
    std::string config_json;
    long integrator_steps = 0;
    int quadrature_nodes = 0;
    std::vector<CheckResult> checks;

    bool all_pass() const;
    std::string to_json() const;
};

struct ScenarioResult {
    std::string csv;  // long format, one row per (L, seed, eta, l, t)
    RunManifest manifest;
};

// Full trajectory bookkeeping for every parameter tuple; CSV plus manifest
// with first-law / balance / positivity / plateau checks. With oracle=true
// and a box inside the Fock guard, oracle columns are appended.
ScenarioResult run_scenario(const ScenarioConfig& config);

struct ScalingFit {
    double scale;
    double c0, c1, c2, c3, c4;  // polynomial fit of Q(eta), degree 4
    double fit_residual;
};

struct ScalingPoint {
    double scale;
    double eta;
    double heat;
    double ratio;  // Q / (eta^2 l^d)
};

struct ScalingReport {
    std::vector<ScalingFit> fits;
    std::vector<ScalingPoint> points;
    double max_ratio_spread = 0.0;  // max relative deviation of ratio from the mean, at fixed eta

    std::string fits_csv() const;
    std::string points_csv() const;
};

// Fits Q(t_end) against eta per scale l (mirrored signed grid) and reports
// the heat per unit field energy across scales.
ScalingReport scaling_sweep(const ScenarioConfig& config);

struct TaylorReport {
    int order = 0;
    std::vector<double> scales;
    std::vector<double> estimates;        // d^m/d eta^m Q at eta = 0
    std::vector<double> fit_residuals;
    std::vector<double> per_volume;       // estimate / l^d
    bool ill_conditioned = false;

    std::string to_csv() const;
};

TaylorReport taylor_estimate(const ScenarioConfig& config, int order);

struct ThermolimitReport {
    std::vector<double> half_sides;
    std::vector<double> heat;
    std::vector<double> diffs;  // |Q(L_{j+1}) - Q(L_j)|
    bool strictly_decreasing = false;

    std::string to_csv() const;
};

ThermolimitReport thermolimit_sweep(const ScenarioConfig& config);

struct DissipationReport {
    std::vector<double> times;
    std::vector<double> local_increment;  // observation-box internal energy
    std::vector<double> total_increment;
    double peak_local = 0.0;
    double final_local = 0.0;

    std::string to_csv() const;
};

// Requires constant_omega; tracks the observation-box energy after the pulse.
DissipationReport dissipation_probe(const ScenarioConfig& config);

struct CrosscheckReport {
    std::vector<CheckResult> checks;
    bool all_pass() const;
    std::string to_text() const;
};

// Runs the quasi-free and Fock paths on identical inputs and asserts the
// cross-module equalities; box must fit the Fock guard.
CrosscheckReport crosscheck_oracle(const ScenarioConfig& config);

// FNV-1a over the canonical JSON serialization.
std::uint64_t config_hash(const ScenarioConfig& config);

void write_file(const std::string& path, const std::string& content);

}  // namespace fermiheat
