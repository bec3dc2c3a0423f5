#include "fermiheat/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fermiheat/errors.hpp"
#include "fermiheat/fock.hpp"
#include "fermiheat/numerics.hpp"
#include "fermiheat/onebody.hpp"

namespace fermiheat {

using nlohmann::json;

namespace {

std::string format_double(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

DisorderField disorder_for(const ScenarioConfig& config, const LatticeBox& box, std::uint64_t seed) {
    if (config.constant_omega) {
        DisorderField field;
        field.box = box;
        field.seed = seed;
        field.values = Eigen::VectorXd::Constant(box.size(), *config.constant_omega);
        return field;
    }
    return sample_disorder(box, seed);
}

// Q(t1) for one parameter tuple; the heat plateau makes t1 the natural
// readout time.
double heat_at_end(const ScenarioConfig& config, double half_side, std::uint64_t seed, double eta,
                   double scale) {
    const LatticeBox box = build_box(config.dimension, half_side);
    const HermitianOperator h = hamiltonian(box, disorder_for(config, box, seed), config.coupling);
    TrajectoryOptions options;
    options.step = config.step();
    options.horizon = config.t1;
    const EnergyTrajectory trajectory =
        compute_energy_trajectory(h, config.potential(eta, scale), config.beta, options);
    return trajectory.heat.back();
}

// Least-squares polynomial fit with columns scaled by eta_max powers.
Eigen::VectorXd fit_polynomial(const std::vector<double>& xs, const std::vector<double>& ys,
                               int degree, double* residual_out) {
    const int rows = static_cast<int>(xs.size());
    const double x_max = *std::max_element(xs.begin(), xs.end(),
                                           [](double a, double b) { return std::abs(a) < std::abs(b); });
    const double s = std::max(std::abs(x_max), 1e-12);
    Eigen::MatrixXd design(rows, degree + 1);
    Eigen::VectorXd rhs(rows);
    for (int r = 0; r < rows; ++r) {
        double p = 1.0;
        for (int c = 0; c <= degree; ++c) {
            design(r, c) = p;
            p *= xs[static_cast<std::size_t>(r)] / s;
        }
        rhs[r] = ys[static_cast<std::size_t>(r)];
    }
    Eigen::VectorXd scaled = design.colPivHouseholderQr().solve(rhs);
    if (residual_out) *residual_out = (design * scaled - rhs).cwiseAbs().maxCoeff();
    Eigen::VectorXd coeffs(degree + 1);
    double p = 1.0;
    for (int c = 0; c <= degree; ++c) {
        coeffs[c] = scaled[c] / p;
        p *= s;
    }
    return coeffs;
}

void append_check(std::vector<CheckResult>& checks, const std::string& name, double residual,
                  double tolerance) {
    checks.push_back(CheckResult{name, residual <= tolerance, residual, tolerance});
}

}  // namespace

VectorPotentialSpec ScenarioConfig::potential(double eta, double scale) const {
    Eigen::VectorXd dir;
    if (!direction.empty()) {
        dir.resize(static_cast<Eigen::Index>(direction.size()));
        for (std::size_t i = 0; i < direction.size(); ++i) dir[static_cast<Eigen::Index>(i)] = direction[i];
    }
    VectorPotentialSpec spec = VectorPotentialSpec::default_bump(dimension, eta, scale, t0, t1, dir);
    spec.quadrature_nodes = quadrature_nodes;
    return spec;
}

ScenarioConfig ScenarioConfig::from_json(const std::string& text) {
    const json j = json::parse(text);
    ScenarioConfig c;
    c.schema_version = j.value("schema_version", c.schema_version);
    if (c.schema_version != 1) throw std::invalid_argument("config: unsupported schema_version");
    c.dimension = j.value("dimension", c.dimension);
    if (j.contains("half_sides")) c.half_sides = j.at("half_sides").get<std::vector<double>>();
    c.coupling = j.value("coupling", c.coupling);
    c.beta = j.value("beta", c.beta);
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("constant_omega") && !j.at("constant_omega").is_null())
        c.constant_omega = j.at("constant_omega").get<double>();
    if (j.contains("eta_grid")) c.eta_grid = j.at("eta_grid").get<std::vector<double>>();
    if (j.contains("scale_grid")) c.scale_grid = j.at("scale_grid").get<std::vector<double>>();
    c.t0 = j.value("t0", c.t0);
    c.t1 = j.value("t1", c.t1);
    if (j.contains("direction")) c.direction = j.at("direction").get<std::vector<double>>();
    c.quadrature_nodes = j.value("quadrature_nodes", c.quadrature_nodes);
    c.step_divisor = j.value("step_divisor", c.step_divisor);
    c.horizon = j.value("horizon", c.horizon);
    c.observation_half_side = j.value("observation_half_side", c.observation_half_side);
    c.truncation_order = j.value("truncation_order", c.truncation_order);
    c.series_grid_steps = j.value("series_grid_steps", c.series_grid_steps);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.oracle = j.value("oracle", c.oracle);
    c.threads = j.value("threads", c.threads);
    return c;
}

ScenarioConfig ScenarioConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str());
}

std::string ScenarioConfig::to_json() const {
    json j;
    j["schema_version"] = schema_version;
    j["dimension"] = dimension;
    j["half_sides"] = half_sides;
    j["coupling"] = coupling;
    j["beta"] = beta;
    j["seeds"] = seeds;
    if (constant_omega) j["constant_omega"] = *constant_omega;
    else j["constant_omega"] = nullptr;
    j["eta_grid"] = eta_grid;
    j["scale_grid"] = scale_grid;
    j["t0"] = t0;
    j["t1"] = t1;
    j["direction"] = direction;
    j["quadrature_nodes"] = quadrature_nodes;
    j["step_divisor"] = step_divisor;
    j["horizon"] = horizon;
    j["observation_half_side"] = observation_half_side;
    j["truncation_order"] = truncation_order;
    j["series_grid_steps"] = series_grid_steps;
    j["epsilon"] = epsilon;
    j["output_dir"] = output_dir;
    j["oracle"] = oracle;
    j["threads"] = threads;
    return j.dump(2);
}

void ScenarioConfig::validate() const {
    std::vector<std::string> bad;
    if (dimension < 1) bad.push_back("dimension (must be >= 1)");
    if (half_sides.empty()) bad.push_back("half_sides (empty)");
    for (double l : half_sides)
        if (!(l > 0.0)) bad.push_back("half_sides (nonpositive entry)");
    if (coupling < 0.0) bad.push_back("coupling (must be >= 0)");
    if (!(beta > 0.0)) bad.push_back("beta (must be > 0)");
    if (seeds.empty()) bad.push_back("seeds (empty)");
    if (eta_grid.empty()) bad.push_back("eta_grid (empty)");
    if (scale_grid.empty()) bad.push_back("scale_grid (empty)");
    for (double s : scale_grid)
        if (!(s > 0.0)) bad.push_back("scale_grid (nonpositive entry)");
    if (!(t0 < t1)) bad.push_back("t0/t1 (need t0 < t1)");
    if (horizon != 0.0 && !(horizon >= t1)) bad.push_back("horizon (need t1 <= horizon)");
    if (quadrature_nodes < 1) bad.push_back("quadrature_nodes (must be >= 1)");
    if (step_divisor < 1) bad.push_back("step_divisor (must be >= 1)");
    if (truncation_order < 1) bad.push_back("truncation_order (must be >= 1)");
    if (!(epsilon > 0.0)) bad.push_back("epsilon (must be > 0)");
    if (threads < 1) bad.push_back("threads (must be >= 1)");
    if (!direction.empty() && static_cast<int>(direction.size()) != dimension)
        bad.push_back("direction (dimension mismatch)");
    if (!bad.empty()) {
        std::string message = "invalid config:";
        for (const auto& field : bad) message += " " + field + ";";
        throw std::invalid_argument(message);
    }
}

std::uint64_t config_hash(const ScenarioConfig& config) {
    const std::string text = config.to_json();
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char byte : text) {
        hash ^= byte;
        hash *= 1099511628211ULL;
    }
    return hash;
}

bool RunManifest::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::string RunManifest::to_json() const {
    json j;
    j["tool_version"] = tool_version;
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx", static_cast<unsigned long long>(config_hash));
    j["config_hash"] = hash_hex;
    j["config"] = json::parse(config_json);
    j["integrator_steps"] = integrator_steps;
    j["quadrature_nodes"] = quadrature_nodes;
    j["checks"] = json::array();
    for (const auto& check : checks) {
        json c;
        c["name"] = check.name;
        c["pass"] = check.pass;
        c["residual"] = check.residual;
        c["tolerance"] = check.tolerance;
        j["checks"].push_back(c);
    }
    return j.dump(2);
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
    config.validate();
    const double horizon = config.effective_horizon();
    const auto grid = uniform_grid(config.t0, horizon, config.step());

    struct Tuple {
        double half_side;
        std::uint64_t seed;
        double eta;
        double scale;
    };
    std::vector<Tuple> tuples;
    for (double half_side : config.half_sides)
        for (std::uint64_t seed : config.seeds)
            for (double eta : config.eta_grid)
                for (double scale : config.scale_grid)
                    tuples.push_back(Tuple{half_side, seed, eta, scale});

    struct TupleResult {
        EnergyTrajectory trajectory;
        FockEnergyTrajectory oracle;
        bool has_oracle = false;
    };
    std::vector<TupleResult> results(tuples.size());

    auto run_tuple = [&](std::size_t index) {
        const Tuple& tuple = tuples[index];
        const LatticeBox box = build_box(config.dimension, tuple.half_side);
        const HermitianOperator h =
            hamiltonian(box, disorder_for(config, box, tuple.seed), config.coupling);
        const VectorPotentialSpec potential = config.potential(tuple.eta, tuple.scale);
        TrajectoryOptions options;
        options.step = config.step();
        options.horizon = horizon;
        results[index].trajectory = compute_energy_trajectory(h, potential, config.beta, options);
        if (config.oracle && box.size() <= kFockSiteGuard) {
            results[index].oracle =
                fock_energy_trajectory(h, potential, config.beta, config.step(), horizon);
            results[index].has_oracle = true;
        }
    };

    if (config.threads <= 1 || tuples.size() <= 1) {
        for (std::size_t i = 0; i < tuples.size(); ++i) run_tuple(i);
    } else {
        std::vector<std::thread> pool;
        std::size_t next = 0;
        std::mutex mutex;
        std::exception_ptr failure;
        const int n_threads = std::min<int>(config.threads, static_cast<int>(tuples.size()));
        for (int i = 0; i < n_threads; ++i) {
            pool.emplace_back([&]() {
                while (true) {
                    std::size_t index;
                    {
                        std::lock_guard<std::mutex> lock(mutex);
                        if (failure || next >= tuples.size()) return;
                        index = next++;
                    }
                    try {
                        run_tuple(index);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(mutex);
                        if (!failure) failure = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& worker : pool) worker.join();
        if (failure) std::rethrow_exception(failure);
    }

    // Deterministic merge in tuple order.
    const bool any_oracle =
        std::any_of(results.begin(), results.end(), [](const TupleResult& r) { return r.has_oracle; });
    std::string csv = "L,seed,eta,l,t,S,P,work,Q_rel,first_law_residual,balance_residual";
    if (any_oracle) csv += ",S_fock,P_fock,work_fock,Q_fock";
    csv += "\n";

    double max_first_law = 0.0, max_balance = 0.0, min_internal = 0.0, min_heat = 0.0;
    double max_plateau = 0.0, max_oracle_gap = 0.0;
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        const Tuple& tuple = tuples[i];
        const EnergyTrajectory& tr = results[i].trajectory;
        double heat_at_t1 = 0.0;
        for (std::size_t k = 0; k < tr.times.size(); ++k)
            if (tr.times[k] <= config.t1) heat_at_t1 = tr.heat[k];
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            csv += format_double(tuple.half_side) + "," + std::to_string(tuple.seed) + "," +
                   format_double(tuple.eta) + "," + format_double(tuple.scale) + "," +
                   format_double(tr.times[k]) + "," + format_double(tr.internal_energy[k]) + "," +
                   format_double(tr.potential_energy[k]) + "," + format_double(tr.work[k]) + "," +
                   format_double(tr.heat[k]) + "," + format_double(tr.first_law_residual[k]) + "," +
                   format_double(tr.balance_residual[k]);
            if (any_oracle) {
                if (results[i].has_oracle) {
                    const FockEnergyTrajectory& oracle = results[i].oracle;
                    csv += "," + format_double(oracle.internal_energy[k]) + "," +
                           format_double(oracle.potential_energy[k]) + "," +
                           format_double(oracle.work[k]) + "," + format_double(oracle.heat[k]);
                    max_oracle_gap = std::max(
                        {max_oracle_gap, std::abs(oracle.internal_energy[k] - tr.internal_energy[k]),
                         std::abs(oracle.potential_energy[k] - tr.potential_energy[k]),
                         std::abs(oracle.work[k] - tr.work[k]),
                         std::abs(oracle.heat[k] - tr.heat[k])});
                } else {
                    csv += ",,,,";
                }
            }
            csv += "\n";
            max_first_law = std::max(max_first_law, tr.first_law_residual[k]);
            max_balance = std::max(max_balance, tr.balance_residual[k]);
            min_internal = std::min(min_internal, tr.internal_energy[k]);
            min_heat = std::min(min_heat, tr.heat[k]);
            if (tr.times[k] >= config.t1)
                max_plateau = std::max(max_plateau, std::abs(tr.heat[k] - heat_at_t1));
        }
    }

    RunManifest manifest;
    manifest.config_json = config.to_json();
    manifest.config_hash = fermiheat::config_hash(config);
    manifest.integrator_steps = grid.steps;
    manifest.quadrature_nodes = config.quadrature_nodes;
    // Balance tolerance: second-order integrator plus Simpson quadrature;
    // the declared envelope scales with the squared step.
    const double step_ratio = grid.delta / ((config.t1 - config.t0) / 400.0);
    const double balance_tol = 2e-6 * step_ratio * step_ratio;
    append_check(manifest.checks, "first_law_residual", max_first_law, 1e-8);
    append_check(manifest.checks, "balance_residual", max_balance, balance_tol);
    append_check(manifest.checks, "internal_energy_positivity", -min_internal, 1e-10);
    append_check(manifest.checks, "heat_positivity", -min_heat, 1e-10);
    if (horizon > config.t1) append_check(manifest.checks, "heat_plateau", max_plateau, 1e-8);
    if (any_oracle) append_check(manifest.checks, "oracle_gap", max_oracle_gap, 1e-8);

    return ScenarioResult{std::move(csv), std::move(manifest)};
}

std::string ScalingReport::fits_csv() const {
    std::string out = "scale,c0,c1,c2,c3,c4,fit_residual\n";
    for (const auto& f : fits)
        out += format_double(f.scale) + "," + format_double(f.c0) + "," + format_double(f.c1) + "," +
               format_double(f.c2) + "," + format_double(f.c3) + "," + format_double(f.c4) + "," +
               format_double(f.fit_residual) + "\n";
    return out;
}

std::string ScalingReport::points_csv() const {
    std::string out = "scale,eta,Q,ratio\n";
    for (const auto& p : points)
        out += format_double(p.scale) + "," + format_double(p.eta) + "," + format_double(p.heat) +
               "," + format_double(p.ratio) + "\n";
    return out;
}

ScalingReport scaling_sweep(const ScenarioConfig& config) {
    config.validate();
    if (config.eta_grid.size() < 4)
        throw std::invalid_argument("scaling_sweep: need at least 4 eta points");
    if (config.scale_grid.size() < 3)
        throw std::invalid_argument("scaling_sweep: need at least 3 scale points");
    if (config.dimension > 2)
        throw std::invalid_argument("scaling_sweep: d must be 1 or 2");
    const double half_side = config.half_sides.front();
    const std::uint64_t seed = config.seeds.front();

    ScalingReport report;
    for (double scale : config.scale_grid) {
        std::vector<double> etas, heats;
        for (double eta : config.eta_grid) {
            const double q_pos = heat_at_end(config, half_side, seed, eta, scale);
            const double q_neg = heat_at_end(config, half_side, seed, -eta, scale);
            etas.push_back(eta);
            heats.push_back(q_pos);
            etas.push_back(-eta);
            heats.push_back(q_neg);
            report.points.push_back(ScalingPoint{
                scale, eta, q_pos, q_pos / (eta * eta * std::pow(scale, config.dimension))});
        }
        double residual = 0.0;
        const Eigen::VectorXd coeffs = fit_polynomial(etas, heats, 4, &residual);
        report.fits.push_back(
            ScalingFit{scale, coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4], residual});
    }

    // spread of Q/(eta^2 l^d) at the smallest eta across scales
    std::vector<double> ratios;
    const double eta_ref = *std::min_element(config.eta_grid.begin(), config.eta_grid.end());
    for (const auto& p : report.points)
        if (p.eta == eta_ref) ratios.push_back(p.ratio);
    const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / ratios.size();
    for (double r : ratios)
        report.max_ratio_spread = std::max(report.max_ratio_spread, std::abs(r - mean) / std::abs(mean));
    return report;
}

std::string TaylorReport::to_csv() const {
    std::string out = "scale,order,estimate,fit_residual,estimate_per_volume\n";
    for (std::size_t i = 0; i < scales.size(); ++i)
        out += format_double(scales[i]) + "," + std::to_string(order) + "," +
               format_double(estimates[i]) + "," + format_double(fit_residuals[i]) + "," +
               format_double(per_volume[i]) + "\n";
    return out;
}

TaylorReport taylor_estimate(const ScenarioConfig& config, int order) {
    config.validate();
    if (order < 0 || order > 6) throw std::invalid_argument("taylor_estimate: order must be in 0..6");
    const double half_side = config.half_sides.front();
    const std::uint64_t seed = config.seeds.front();

    TaylorReport report;
    report.order = order;
    const int degree = order + 2;
    for (double scale : config.scale_grid) {
        std::vector<double> etas, heats;
        for (double eta : config.eta_grid) {
            etas.push_back(eta);
            heats.push_back(heat_at_end(config, half_side, seed, eta, scale));
            etas.push_back(-eta);
            heats.push_back(heat_at_end(config, half_side, seed, -eta, scale));
        }
        if (static_cast<int>(etas.size()) < degree + 1) report.ill_conditioned = true;
        double residual = 0.0;
        const Eigen::VectorXd coeffs = fit_polynomial(etas, heats, degree, &residual);
        double factorial = 1.0;
        for (int j = 2; j <= order; ++j) factorial *= j;
        const double estimate = coeffs[order] * factorial;
        report.scales.push_back(scale);
        report.estimates.push_back(estimate);
        report.fit_residuals.push_back(residual);
        report.per_volume.push_back(estimate / std::pow(scale, config.dimension));
    }
    return report;
}

std::string ThermolimitReport::to_csv() const {
    std::string out = "half_side,Q,diff_from_previous\n";
    for (std::size_t i = 0; i < half_sides.size(); ++i)
        out += format_double(half_sides[i]) + "," + format_double(heat[i]) + "," +
               format_double(i == 0 ? 0.0 : diffs[i - 1]) + "\n";
    return out;
}

ThermolimitReport thermolimit_sweep(const ScenarioConfig& config) {
    config.validate();
    if (config.half_sides.size() < 3)
        throw std::invalid_argument("thermolimit_sweep: need at least 3 increasing box sizes");
    for (std::size_t i = 1; i < config.half_sides.size(); ++i)
        if (config.half_sides[i] <= config.half_sides[i - 1])
            throw std::invalid_argument("thermolimit_sweep: half_sides must increase");
    const double scale = config.scale_grid.front();
    const double min_l = *std::min_element(config.half_sides.begin(), config.half_sides.end());
    if (scale > min_l)
        throw std::invalid_argument("thermolimit_sweep: field scale exceeds the smallest box");
    const double eta = config.eta_grid.front();
    const std::uint64_t seed = config.seeds.front();

    ThermolimitReport report;
    for (double half_side : config.half_sides) {
        report.half_sides.push_back(half_side);
        report.heat.push_back(heat_at_end(config, half_side, seed, eta, scale));
    }
    for (std::size_t i = 1; i < report.heat.size(); ++i)
        report.diffs.push_back(std::abs(report.heat[i] - report.heat[i - 1]));
    report.strictly_decreasing = true;
    for (std::size_t i = 1; i < report.diffs.size(); ++i)
        if (!(report.diffs[i] < report.diffs[i - 1])) report.strictly_decreasing = false;
    return report;
}

std::string DissipationReport::to_csv() const {
    std::string out = "t,local_increment,total_increment\n";
    for (std::size_t i = 0; i < times.size(); ++i)
        out += format_double(times[i]) + "," + format_double(local_increment[i]) + "," +
               format_double(total_increment[i]) + "\n";
    return out;
}

DissipationReport dissipation_probe(const ScenarioConfig& config) {
    config.validate();
    if (!config.constant_omega)
        throw std::invalid_argument("dissipation_probe: constant_omega must be set");
    const double half_side = config.half_sides.front();
    const LatticeBox box = build_box(config.dimension, half_side);
    const LatticeBox observation = build_box(config.dimension, config.observation_half_side);
    if (!box.contains(observation))
        throw std::invalid_argument("dissipation_probe: observation box exceeds the box");
    const HermitianOperator h =
        hamiltonian(box, disorder_for(config, box, config.seeds.front()), config.coupling);
    const VectorPotentialSpec potential =
        config.potential(config.eta_grid.front(), config.scale_grid.front());

    std::vector<int> parent(static_cast<std::size_t>(observation.size()));
    for (int i = 0; i < observation.size(); ++i)
        parent[static_cast<std::size_t>(i)] = *box.index_of(observation.site(i));

    // symbol stepped in place; long post-pulse horizons would make retaining
    // every D_t prohibitive
    const double t0 = potential.t0;
    const auto [nsteps, delta] = uniform_grid(t0, config.effective_horizon(), config.step());
    const SymbolMatrix fermi = fermi_symbol(h, config.beta);
    SymbolMatrix state = fermi;
    SpectralDecomposition free_part(h);
    const Eigen::MatrixXcd free_step = free_part.propagator(delta);

    DissipationReport report;
    for (long k = 0; k <= nsteps; ++k) {
        const double t = t0 + static_cast<double>(k) * delta;
        const Eigen::MatrixXcd difference = state.entries - fermi.entries;
        Complex local(0.0);
        for (int i : parent)
            for (int j : parent) local += h.entries(i, j) * difference(j, i);
        report.times.push_back(t);
        report.local_increment.push_back(local.real());
        report.total_increment.push_back(internal_energy_increment(state, fermi, h));
        report.peak_local = std::max(report.peak_local, std::abs(local.real()));

        if (k == nsteps) break;
        const double mid = t + 0.5 * delta;
        if (potential.active_at(mid)) {
            HermitianOperator generator = field_energy_operator(box, potential, mid);
            generator.entries += h.entries;
            SpectralDecomposition mid_spectral(generator);
            const Eigen::MatrixXcd u = mid_spectral.propagator(delta);
            state.entries = u * state.entries * u.adjoint();
        } else {
            state.entries = free_step * state.entries * free_step.adjoint();
        }
    }
    report.final_local = std::abs(report.local_increment.back());
    return report;
}

bool CrosscheckReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::string CrosscheckReport::to_text() const {
    std::string out;
    for (const auto& check : checks) {
        out += (check.pass ? "PASS " : "FAIL ") + check.name +
               "  residual=" + format_double(check.residual) +
               "  tolerance=" + format_double(check.tolerance) + "\n";
    }
    return out;
}

CrosscheckReport crosscheck_oracle(const ScenarioConfig& config) {
    config.validate();
    const LatticeBox box = build_box(config.dimension, config.half_sides.front());
    if (box.size() > kFockSiteGuard)
        throw resource_limit_error("crosscheck_oracle: box exceeds the Fock guard");
    const HermitianOperator h =
        hamiltonian(box, disorder_for(config, box, config.seeds.front()), config.coupling);
    const VectorPotentialSpec potential =
        config.potential(config.eta_grid.front(), config.scale_grid.front());
    const double horizon = config.effective_horizon();

    TrajectoryOptions options;
    options.step = config.step();
    options.horizon = horizon;
    const EnergyTrajectory quasi = compute_energy_trajectory(h, potential, config.beta, options);
    const FockEnergyTrajectory fock =
        fock_energy_trajectory(h, potential, config.beta, config.step(), horizon);

    double gap_s = 0.0, gap_p = 0.0, gap_w = 0.0, gap_q = 0.0, first_law_fock = 0.0,
           first_law_quasi = 0.0;
    for (std::size_t k = 0; k < quasi.times.size(); ++k) {
        gap_s = std::max(gap_s, std::abs(quasi.internal_energy[k] - fock.internal_energy[k]));
        gap_p = std::max(gap_p, std::abs(quasi.potential_energy[k] - fock.potential_energy[k]));
        gap_w = std::max(gap_w, std::abs(quasi.work[k] - fock.work[k]));
        gap_q = std::max(gap_q, std::abs(quasi.heat[k] - fock.heat[k]));
        const double scale_fock = 1.0 + std::abs(fock.heat[k]);
        first_law_fock =
            std::max(first_law_fock, std::abs(fock.heat[k] - fock.internal_energy[k]) / scale_fock);
        first_law_quasi = std::max(first_law_quasi, quasi.first_law_residual[k] /
                                                        (1.0 + std::abs(quasi.heat[k])));
    }

    CrosscheckReport report;
    append_check(report.checks, "first_law_fock", first_law_fock, 1e-9);
    append_check(report.checks, "first_law_quasifree", first_law_quasi, 1e-8);
    append_check(report.checks, "internal_energy_match", gap_s, 1e-8);
    append_check(report.checks, "potential_energy_match", gap_p, 1e-8);
    append_check(report.checks, "work_match", gap_w, 1e-8);
    append_check(report.checks, "heat_match", gap_q, 1e-8);
    return report;
}

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    std::ofstream out(target, std::ios::binary);
    if (!out) throw std::runtime_error("write_file: cannot open " + path);
    out << content;
}

}  // namespace fermiheat
