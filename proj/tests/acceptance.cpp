// Acceptance suite: one pass/fail line per criterion, nonzero exit code on
// any failure. Every tolerance is pinned in code next to the check.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fermiheat/experiments.hpp"
#include "fermiheat/fock.hpp"
#include "fermiheat/lattice.hpp"
#include "fermiheat/numerics.hpp"
#include "fermiheat/onebody.hpp"
#include "fermiheat/quasifree.hpp"
#include "fermiheat/trees.hpp"

using namespace fermiheat;

namespace {

int g_failures = 0;
std::chrono::steady_clock::time_point g_last = std::chrono::steady_clock::now();

void report(int criterion, const char* label, bool pass, const std::string& detail) {
    const auto now = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(now - g_last).count();
    g_last = now;
    std::printf("%s  criterion %2d: %s  (%s) [%.1f s]\n", pass ? "PASS" : "FAIL", criterion, label,
                detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
    char buffer[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buffer, sizeof(buffer), format, args);
    va_end(args);
    return buffer;
}

LatticeBox chain(int n_sites) { return LatticeBox::interval(-(n_sites / 2), n_sites - n_sites / 2 - 1); }

Eigen::VectorXcd basis_vector(int n, int index) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
    v[index] = 1.0;
    return v;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// --- criterion 1: first law on driven 6-site chains ------------------------
void criterion_1() {
    const LatticeBox box = chain(6);
    const VectorPotentialSpec potential = VectorPotentialSpec::default_bump(1, 0.2, 2.0, 0.0, 1.0);
    const double step = 1.0 / 100.0;  // the identity is exact per unitary step
    double worst_fock = 0.0, worst_quasi = 0.0;
    for (double lambda : {0.0, 0.5, 1.0}) {
        for (double beta : {0.5, 2.0}) {
            for (std::uint64_t seed = 1; seed <= 10; ++seed) {
                const HermitianOperator h = hamiltonian(box, sample_disorder(box, seed), lambda);

                const FockOperator big = second_quantize(h);
                const DensityMatrix gibbs = gibbs_state(big, beta);
                const FockOperator v = evolve_many_body(big, box, potential, 0.0, 1.0, step);
                const DensityMatrix rho{6, v.entries * gibbs.entries * v.entries.adjoint()};
                const double heat = relative_entropy_fock(rho, gibbs) / beta;
                const double energy = ((rho.entries - gibbs.entries) * big.entries).trace().real();
                worst_fock = std::max(worst_fock, std::abs(heat - energy) / (1.0 + std::abs(energy)));

                const SymbolMatrix fermi = fermi_symbol(h, beta);
                const SymbolMatrix evolved =
                    evolve_symbol(fermi, driven_propagator(h, potential, 0.0, 1.0, step));
                const double q1 = quasifree_relative_entropy(evolved, fermi) / beta;
                const double s1 = internal_energy_increment(evolved, fermi, h);
                worst_quasi = std::max(worst_quasi, std::abs(q1 - s1) / (1.0 + std::abs(s1)));
            }
        }
    }
    report(1, "first law, Fock and quasi-free", worst_fock <= 1e-9 && worst_quasi <= 1e-8,
           fmt("fock residual %.2e <= 1e-9, quasifree %.2e <= 1e-8", worst_fock, worst_quasi));
}

// --- criterion 2: quasi-free trajectory equals the Fock oracle -------------
void criterion_2() {
    double worst = 0.0;
    for (int sites : {4, 6}) {
        const LatticeBox box = chain(sites);
        const HermitianOperator h = hamiltonian(box, sample_disorder(box, 3), 0.8);
        const VectorPotentialSpec potential =
            VectorPotentialSpec::default_bump(1, 0.2, 1.5, 0.0, 1.0);
        const double beta = 1.0, step = 1.0 / 200.0, horizon = 1.2;

        TrajectoryOptions options;
        options.step = step;
        options.horizon = horizon;
        const EnergyTrajectory quasi = compute_energy_trajectory(h, potential, beta, options);
        const FockEnergyTrajectory fock = fock_energy_trajectory(h, potential, beta, step, horizon);
        for (std::size_t k = 0; k < quasi.times.size(); ++k) {
            worst = std::max({worst,
                              std::abs(quasi.internal_energy[k] - fock.internal_energy[k]),
                              std::abs(quasi.potential_energy[k] - fock.potential_energy[k]),
                              std::abs(quasi.work[k] - fock.work[k]),
                              std::abs(quasi.heat[k] - fock.heat[k])});
        }
    }
    report(2, "oracle equivalence of S, P, work, heat", worst <= 1e-8,
           fmt("max gap %.2e <= 1e-8 on 4- and 6-site chains", worst));
}

// --- criterion 3: energy balance and its convergence order -----------------
void criterion_3() {
    const LatticeBox box = build_box(1, 32.0);
    const HermitianOperator h = hamiltonian(box, sample_disorder(box, 1), 0.5);
    const VectorPotentialSpec potential = VectorPotentialSpec::default_bump(1, 0.4, 4.0, 0.0, 1.0);

    auto max_balance = [&](double step) {
        TrajectoryOptions options;
        options.step = step;
        const EnergyTrajectory tr = compute_energy_trajectory(h, potential, 1.0, options);
        double worst = 0.0;
        for (double r : tr.balance_residual) worst = std::max(worst, r);
        return worst;
    };
    const double at_400 = max_balance(1.0 / 400.0);
    const double at_800 = max_balance(1.0 / 800.0);
    report(3, "energy balance |S + P - W|", at_400 <= 1e-6 && at_400 / at_800 >= 3.5,
           fmt("residual %.2e <= 1e-6 at step 1/400, halving shrinks %.2fx >= 3.5x", at_400,
               at_400 / at_800));
}

// --- criterion 4: positivity and heat plateau over random configurations ---
void criterion_4() {
    std::uint64_t state = 2026;
    double min_internal = 0.0, max_plateau = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const double half_side = 3.0 + std::floor(6.0 * uniform01(state));
        const double lambda = 1.5 * uniform01(state);
        const double beta = 0.3 + 2.7 * uniform01(state);
        const double eta = 0.05 + 0.35 * uniform01(state);
        const double scale = 1.5 + 1.5 * uniform01(state);
        const std::uint64_t seed = splitmix64(state);

        const LatticeBox box = build_box(1, half_side);
        const HermitianOperator h = hamiltonian(box, sample_disorder(box, seed), lambda);
        const VectorPotentialSpec potential =
            VectorPotentialSpec::default_bump(1, eta, scale, 0.0, 1.0);
        TrajectoryOptions options;
        options.step = 1.0 / 50.0;
        options.horizon = 21.0;  // t1 + 20
        const EnergyTrajectory tr = compute_energy_trajectory(h, potential, beta, options);

        double heat_at_t1 = 0.0;
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            min_internal = std::min(min_internal, tr.internal_energy[k]);
            if (tr.times[k] <= 1.0) heat_at_t1 = tr.heat[k];
            else max_plateau = std::max(max_plateau, std::abs(tr.heat[k] - heat_at_t1));
        }
    }
    report(4, "positivity of S and heat plateau", min_internal >= -1e-10 && max_plateau <= 1e-8,
           fmt("min S = %.2e >= -1e-10, plateau drift %.2e <= 1e-8 over 50 configs", min_internal,
               max_plateau));
}

// --- criterion 5: tree expansion reconstructs Fock multicommutators --------
void criterion_5() {
    const int n = 5;
    const LatticeBox box = chain(n);
    const HermitianOperator h = hamiltonian(box, sample_disorder(box, 4), 0.7);
    SpectralDecomposition spectral(h);
    const auto car = car_matrices(n);
    const Eigen::Index dim = 1 << n;
    std::uint64_t state = 404;

    auto fock_monomial = [&](const Monomial& m) {
        Eigen::MatrixXcd product = Eigen::MatrixXcd::Identity(dim, dim);
        for (const auto& factor : m.factors) {
            Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim, dim);
            for (int x = 0; x < n; ++x) {
                if (factor.kind == FactorKind::Creation)
                    op += factor.wavefunction[x] * car[static_cast<std::size_t>(x)].entries.adjoint();
                else
                    op += std::conj(factor.wavefunction[x]) * car[static_cast<std::size_t>(x)].entries;
            }
            product = product * op;
        }
        return product;
    };

    double worst = 0.0;
    bool counts_ok = true;
    for (int order : {2, 3, 4}) {
        std::vector<Monomial> monomials;
        std::vector<FockOperator> fock_entries;
        for (int j = 0; j < order; ++j) {
            const int x = static_cast<int>(uniform01(state) * (n - 1));
            const double s = 1.5 * uniform01(state);
            Monomial m{{{FactorKind::Creation, spectral.evolve(s, basis_vector(n, x))},
                        {FactorKind::Annihilation, spectral.evolve(s, basis_vector(n, x + 1))}}};
            fock_entries.push_back(FockOperator{n, fock_monomial(m)});
            monomials.push_back(std::move(m));
        }
        const auto terms = expand_multicommutator(monomials);
        Eigen::MatrixXcd reconstruction = Eigen::MatrixXcd::Zero(dim, dim);
        std::set<std::vector<std::pair<int, int>>> trees_seen;
        for (const auto& term : terms) {
            if (term.scalar != Complex(0.0))
                reconstruction += double(term.sign) * term.scalar * fock_monomial(term.reduced);
            const Tree tree = term.tree();
            trees_seen.insert(tree.bonds);
            if (contraction_map_count(tree, std::vector<int>(order, 2)) !=
                (1L << (2 * (order - 1))))
                counts_ok = false;
        }
        worst = std::max(worst, max_abs(reconstruction - multicommutator(fock_entries).entries));
        long fact = 1;
        for (int j = 2; j < order; ++j) fact *= j;
        if (static_cast<long>(trees_seen.size()) > fact) counts_ok = false;
    }

    bool tree_counts = true;
    for (int order = 2; order <= 8; ++order) {
        long fact = 1;
        for (int j = 2; j < order; ++j) fact *= j;
        if (static_cast<long>(enumerate_trees(order).size()) != fact) tree_counts = false;
    }
    report(5, "tree expansion vs direct multicommutators", worst <= 1e-10 && counts_ok && tree_counts,
           fmt("max entry error %.2e <= 1e-10, |T_N| = (N-1)! for N <= 8, |K_T| = 4^(N-1)", worst));
}

// --- criterion 6: heat series vs quasi-free heat ----------------------------
void criterion_6() {
    const LatticeBox box = build_box(1, 16.0);
    const HermitianOperator h = hamiltonian(box, sample_disorder(box, 1), 0.5);
    const double beta = 1.0, eta = 0.05;
    const VectorPotentialSpec potential = VectorPotentialSpec::default_bump(1, eta, 4.0, 0.0, 1.0);
    const SymbolMatrix fermi = fermi_symbol(h, beta);

    TrajectoryOptions options;
    options.step = 1.0 / 400.0;
    const EnergyTrajectory tr = compute_energy_trajectory(h, potential, beta, options);
    const HeatSeriesResult series = heat_series_sum(3, 128, h, fermi, potential, 1.0);

    const double gap = std::abs(series.total - tr.heat.back());
    // the k = 1 coefficient vanishes identically (the static Hamiltonian
    // commutes with the symbol), so geometric decay is checked on the tail
    const bool decay = std::abs(series.per_order[0]) <= 1e-10 &&
                       std::abs(series.per_order[2]) <= 0.5 * std::abs(series.per_order[1]);
    report(6, "truncated heat series at K = 3", gap <= 1e-6 && decay,
           fmt("|series - Q| = %.2e <= 1e-6; orders %.1e, %.2e, %.1e", gap, series.per_order[0],
               series.per_order[1], series.per_order[2]));
}

// --- criterion 7: Dyson-Phillips truncation order ---------------------------
void criterion_7() {
    const LatticeBox box = build_box(1, 8.0);
    const HermitianOperator h = hamiltonian(box, sample_disorder(box, 4), 0.5);
    const VectorPotentialSpec base = VectorPotentialSpec::default_bump(1, 1.0, 2.0, 0.0, 1.0);

    bool pass = true;
    std::string detail;
    for (int order : {1, 2}) {
        std::vector<double> log_eta, log_res;
        for (double eta : {0.08, 0.16, 0.32}) {
            const VectorPotentialSpec potential = base.with_strength(eta);
            const Eigen::MatrixXcd exact =
                driven_propagator(h, potential, 0.0, 1.0, 1.0 / 800.0).entries;
            const double residual =
                max_abs(dyson_phillips_propagator(h, potential, 0.0, 1.0, order, 400) - exact);
            log_eta.push_back(std::log(eta));
            log_res.push_back(std::log(residual));
        }
        // least-squares slope through the three points
        const double mean_x = (log_eta[0] + log_eta[1] + log_eta[2]) / 3.0;
        const double mean_y = (log_res[0] + log_res[1] + log_res[2]) / 3.0;
        double num = 0.0, den = 0.0;
        for (int i = 0; i < 3; ++i) {
            num += (log_eta[i] - mean_x) * (log_res[i] - mean_y);
            den += (log_eta[i] - mean_x) * (log_eta[i] - mean_x);
        }
        const double slope = num / den;
        if (std::abs(slope - (order + 1.0)) > 0.2) pass = false;
        detail += fmt("K=%d slope %.3f; ", order, slope);
    }
    report(7, "Dyson-Phillips residual order", pass, detail + "target K+1 +/- 0.2");
}

// --- criterion 8: eta^2 l^d scaling law -------------------------------------
void criterion_8() {
    ScenarioConfig config;
    config.dimension = 1;
    config.half_sides = {40.0};
    config.coupling = 2.0;  // diffusive regime: mean free path well under l
    config.beta = 1.0;
    config.seeds = {1};
    config.eta_grid = {0.025, 0.05, 0.075, 0.1};
    config.scale_grid = {4.0, 8.0, 16.0};
    config.t0 = 0.0;
    config.t1 = 1.0;
    config.step_divisor = 200;
    const ScalingReport sweep = scaling_sweep(config);

    bool coefficients_ok = true;
    std::string detail;
    for (const auto& fit : sweep.fits) {
        const double c0_gate = std::max(fit.fit_residual, 1e-10);
        const double c1_gate = std::max(fit.fit_residual / 0.1, 1e-6 * fit.c2 * 0.1);
        if (std::abs(fit.c0) > c0_gate || std::abs(fit.c1) > c1_gate) coefficients_ok = false;
        detail += fmt("l=%g: c0=%.1e c1=%.1e; ", fit.scale, fit.c0, fit.c1);
    }
    // ratio Q/(eta^2 l) at eta = 0.05 stable across l within 25%
    std::vector<double> ratios;
    for (const auto& p : sweep.points)
        if (p.eta == 0.05) ratios.push_back(p.ratio);
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= ratios.size();
    double spread = 0.0;
    for (double r : ratios) spread = std::max(spread, std::abs(r - mean) / mean);
    report(8, "Q(eta) fit and eta^2 l^d scaling", coefficients_ok && spread <= 0.25,
           detail + fmt("ratio spread %.1f%% <= 25%%", 100.0 * spread));
}

// --- criterion 9: thermodynamic-limit stabilization --------------------------
void criterion_9() {
    ScenarioConfig config;
    config.dimension = 1;
    config.half_sides = {8.0, 16.0, 32.0};
    config.coupling = 0.5;
    config.beta = 2.0;  // longer equilibrium correlations keep the L = 8 -> 16
                        // difference well above the float floor
    config.seeds = {1};
    config.eta_grid = {0.1};
    config.scale_grid = {4.0};
    config.step_divisor = 200;
    const ThermolimitReport sweep = thermolimit_sweep(config);
    report(9, "heat stabilization in the box size", sweep.strictly_decreasing,
           fmt("|Q16-Q8| = %.2e > |Q32-Q16| = %.2e", sweep.diffs[0], sweep.diffs[1]));
}

// --- criterion 10: one constant dominates decay data and held-out samples ---
void criterion_10() {
    const double epsilon = 0.5, window = 1.5;
    const LatticeBox box = build_box(1, 10.0);

    // training: correlation profiles across lambda and 30 seeds, plus
    // multicommutator samples; the fitted constant carries 25% headroom
    double fitted = 0.0;
    for (double lambda : {0.0, 0.5, 1.0})
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const HermitianOperator h = hamiltonian(box, sample_disorder(box, seed), lambda);
            fitted = std::max(fitted,
                              correlation_decay_profile(h, window, epsilon).fitted_constant);
        }
    const HermitianOperator h_train = hamiltonian(box, sample_disorder(box, 2), 0.5);
    const SymbolMatrix d_train = fermi_symbol(h_train, 1.0);
    for (int order : {2, 3}) {
        const auto samples = draw_tree_decay_samples(box, order, 20, 0.0, window, 31);
        fitted = std::max(fitted,
                          check_tree_decay_bound(d_train, h_train, epsilon, samples).fitted_constant);
    }
    const double constant = 1.25 * fitted;

    // held out: fresh seeds across lambda for both bound kinds
    bool dominated = true;
    double worst_margin = 0.0;
    for (double lambda : {0.0, 1.0})
        for (std::uint64_t seed = 100; seed < 115; ++seed) {
            const HermitianOperator h = hamiltonian(box, sample_disorder(box, seed), lambda);
            const double required = correlation_decay_profile(h, window, epsilon).fitted_constant;
            worst_margin = std::max(worst_margin, required / constant);
            if (required > constant) dominated = false;
            const SymbolMatrix d = fermi_symbol(h, 1.0);
            for (int order : {2, 3}) {
                const auto samples = draw_tree_decay_samples(box, order, 10, 0.0, window, seed);
                const double needed =
                    check_tree_decay_bound(d, h, epsilon, samples).fitted_constant;
                worst_margin = std::max(worst_margin, needed / constant);
                if (needed > constant) dominated = false;
            }
        }
    report(10, "uniform tree-decay constant on held-out data", dominated,
           fmt("D = %.3f dominates; worst held-out usage %.0f%%", constant, 100.0 * worst_margin));
}

}  // namespace

int main() {
    const auto started = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::printf("%s: %d of 10 criteria failed (%.1f s)\n", g_failures == 0 ? "OK" : "FAILED",
                g_failures, elapsed);
    return g_failures == 0 ? 0 : 1;
}
