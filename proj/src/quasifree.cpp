#include "fermiheat/quasifree.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fermiheat/errors.hpp"
#include "fermiheat/numerics.hpp"

namespace fermiheat {

namespace {

constexpr double kSpectrumClamp = 1e-14;

// Tr(A B) without forming the product.
double real_trace_product(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return a.cwiseProduct(b.transpose()).sum().real();
}

Complex contraction(const SymbolMatrix& symbol, const MonomialFactor& first,
                    const MonomialFactor& second) {
    if (first.kind == second.kind) return Complex(0.0);
    if (first.kind == FactorKind::Creation) {
        // rho(a^*(f) a(g)) = <g, D f>
        return second.wavefunction.dot(symbol.entries * first.wavefunction);
    }
    // rho(a(g) a^*(f)) = <g, (1-D) f>
    const Eigen::VectorXcd df = symbol.entries * second.wavefunction;
    return first.wavefunction.dot(second.wavefunction) - first.wavefunction.dot(df);
}

Complex wick_recurse(const SymbolMatrix& symbol, std::vector<const MonomialFactor*>& slots) {
    const std::size_t m = slots.size();
    if (m == 0) return Complex(1.0);
    if (m % 2 == 1) return Complex(0.0);
    Complex total(0.0);
    const MonomialFactor* head = slots.front();
    for (std::size_t j = 1; j < m; ++j) {
        const Complex pair = contraction(symbol, *head, *slots[j]);
        if (pair == Complex(0.0)) continue;
        std::vector<const MonomialFactor*> rest;
        rest.reserve(m - 2);
        for (std::size_t k = 1; k < m; ++k)
            if (k != j) rest.push_back(slots[k]);
        const double sign = (j % 2 == 1) ? 1.0 : -1.0;
        total += sign * pair * wick_recurse(symbol, rest);
    }
    return total;
}

}  // namespace

SymbolMatrix evolve_symbol(const SymbolMatrix& symbol, const UnitaryMatrix& u) {
    if (symbol.entries.rows() != u.entries.rows())
        throw std::invalid_argument("evolve_symbol: dimension mismatch");
    return SymbolMatrix{symbol.box, u.entries * symbol.entries * u.entries.adjoint()};
}

Complex wick_expectation(const SymbolMatrix& symbol, const Monomial& monomial) {
    std::vector<const MonomialFactor*> slots;
    slots.reserve(monomial.factors.size());
    for (const auto& f : monomial.factors) {
        if (f.wavefunction.size() != symbol.entries.rows())
            throw std::invalid_argument("wick_expectation: wavefunction dimension mismatch");
        slots.push_back(&f);
    }
    return wick_recurse(symbol, slots);
}

double internal_energy_increment(const SymbolMatrix& evolved, const SymbolMatrix& initial,
                                 const HermitianOperator& h) {
    if (evolved.entries.rows() != initial.entries.rows() ||
        evolved.entries.rows() != h.entries.rows())
        throw std::invalid_argument("internal_energy_increment: dimension mismatch");
    return real_trace_product(h.entries, evolved.entries - initial.entries);
}

double potential_energy_increment(const SymbolMatrix& evolved, const HermitianOperator& w) {
    if (evolved.entries.rows() != w.entries.rows())
        throw std::invalid_argument("potential_energy_increment: dimension mismatch");
    return real_trace_product(w.entries, evolved.entries);
}

double work_integral(const std::vector<double>& work_rate_samples, double delta) {
    if (work_rate_samples.size() < 2) return 0.0;
    return simpson(work_rate_samples, delta);
}

double quasifree_relative_entropy(const SymbolMatrix& d1, const SymbolMatrix& d2) {
    if (d1.entries.rows() != d2.entries.rows())
        throw std::invalid_argument("quasifree_relative_entropy: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s1(d1.entries);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s2(d2.entries);
    auto clamp = [](double p) { return std::min(std::max(p, kSpectrumClamp), 1.0 - kSpectrumClamp); };

    double value = 0.0;
    for (Eigen::Index k = 0; k < s1.eigenvalues().size(); ++k) {
        const double p = clamp(s1.eigenvalues()[k]);
        value += p * std::log(p) + (1.0 - p) * std::log(1.0 - p);
    }
    for (Eigen::Index k = 0; k < s2.eigenvalues().size(); ++k) {
        const double q = clamp(s2.eigenvalues()[k]);
        const Eigen::VectorXcd v = s2.eigenvectors().col(k);
        const double occupation = std::real(v.dot(d1.entries * v));
        value -= occupation * std::log(q) + (1.0 - occupation) * std::log(1.0 - q);
    }
    return value;
}

double heat_production(const SymbolMatrix& evolved, const SymbolMatrix& fermi,
                       const HermitianOperator& h, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("heat_production: beta must be > 0");
    const double heat = quasifree_relative_entropy(evolved, fermi) / beta;
    const double energy = internal_energy_increment(evolved, fermi, h);
    if (std::abs(heat - energy) > 1e-8 * (1.0 + std::abs(heat)))
        throw numeric_inconsistency_error(
            "heat_production: relative-entropy heat disagrees with the energy increment");
    return heat;
}

SymbolMatrix restrict_symbol(const SymbolMatrix& symbol, const LatticeBox& subbox) {
    if (!symbol.box.contains(subbox))
        throw std::invalid_argument("restrict_symbol: subbox is not contained in the box");
    const int m = subbox.size();
    Eigen::VectorXi parent(m);
    for (int i = 0; i < m; ++i) parent[i] = *symbol.box.index_of(subbox.site(i));
    Eigen::MatrixXcd sub(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) sub(i, j) = symbol.entries(parent[i], parent[j]);
    return SymbolMatrix{subbox, std::move(sub)};
}

std::string EnergyTrajectory::to_csv() const {
    std::string out = "t,S,P,work,Q_rel,first_law_residual,balance_residual\n";
    char line[256];
    for (std::size_t k = 0; k < times.size(); ++k) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", times[k],
                      internal_energy[k], potential_energy[k], work[k], heat[k],
                      first_law_residual[k], balance_residual[k]);
        out += line;
    }
    return out;
}

EnergyTrajectory compute_energy_trajectory(const HermitianOperator& h,
                                           const VectorPotentialSpec& potential, double beta,
                                           const TrajectoryOptions& options) {
    const double t0 = potential.t0;
    const double t1 = potential.t1;
    const double step = options.step > 0.0 ? options.step : (t1 - t0) / 400.0;
    const double horizon = options.horizon > 0.0 ? options.horizon : t1;
    if (!(horizon > t0)) throw std::invalid_argument("compute_energy_trajectory: horizon must exceed t0");

    const auto [nsteps, delta] = uniform_grid(t0, horizon, step);

    const SymbolMatrix fermi = fermi_symbol(h, beta);
    SymbolMatrix state = fermi;
    SpectralDecomposition free_part(h);
    const Eigen::MatrixXcd free_step = free_part.propagator(delta);

    EnergyTrajectory trajectory;
    trajectory.times.reserve(static_cast<std::size_t>(nsteps + 1));
    std::vector<double> work_rate;
    work_rate.reserve(static_cast<std::size_t>(nsteps + 1));

    for (long k = 0; k <= nsteps; ++k) {
        const double t = t0 + static_cast<double>(k) * delta;
        trajectory.times.push_back(t);
        trajectory.internal_energy.push_back(internal_energy_increment(state, fermi, h));
        if (potential.active_at(t)) {
            const HermitianOperator w = field_energy_operator(h.box, potential, t);
            trajectory.potential_energy.push_back(potential_energy_increment(state, w));
            work_rate.push_back(
                real_trace_product(field_energy_rate(h.box, potential, t).entries, state.entries));
        } else {
            trajectory.potential_energy.push_back(0.0);
            work_rate.push_back(0.0);
        }
        trajectory.heat.push_back(quasifree_relative_entropy(state, fermi) / beta);
        if (options.keep_symbols) trajectory.symbols.push_back(state);

        if (k == nsteps) break;
        const double mid = t + 0.5 * delta;
        if (potential.active_at(mid)) {
            HermitianOperator generator = field_energy_operator(h.box, potential, mid);
            generator.entries += h.entries;
            SpectralDecomposition mid_spectral(generator);
            const Eigen::MatrixXcd u = mid_spectral.propagator(delta);
            state.entries = u * state.entries * u.adjoint();
        } else {
            state.entries = free_step * state.entries * free_step.adjoint();
        }
    }

    trajectory.work = cumulative_integral(work_rate, delta);
    trajectory.first_law_residual.resize(trajectory.times.size());
    trajectory.balance_residual.resize(trajectory.times.size());
    for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
        trajectory.first_law_residual[k] =
            std::abs(trajectory.heat[k] - trajectory.internal_energy[k]);
        trajectory.balance_residual[k] = std::abs(
            trajectory.internal_energy[k] + trajectory.potential_energy[k] - trajectory.work[k]);
    }
    return trajectory;
}

}  // namespace fermiheat
