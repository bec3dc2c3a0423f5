#include "fermiheat/onebody.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace fermiheat {

namespace {
const Complex kI(0.0, 1.0);
}

double UnitaryMatrix::unitarity_defect() const {
    const Eigen::MatrixXcd gram = entries.adjoint() * entries;
    return (gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

SpectralDecomposition::SpectralDecomposition(const HermitianOperator& op, double hermiticity_tol)
    : box_(op.box) {
    if (op.hermiticity_defect() > hermiticity_tol)
        throw std::invalid_argument("SpectralDecomposition: operator is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op.entries);
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
}

Eigen::MatrixXcd SpectralDecomposition::exp_it(double t) const {
    Eigen::VectorXcd phases(eigenvalues_.size());
    for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k)
        phases[k] = std::exp(kI * (t * eigenvalues_[k]));
    return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

Eigen::MatrixXcd SpectralDecomposition::propagator(double t) const { return exp_it(-t); }

Eigen::VectorXcd SpectralDecomposition::evolve(double t, const Eigen::VectorXcd& psi) const {
    Eigen::VectorXcd modes = eigenvectors_.adjoint() * psi;
    for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k)
        modes[k] *= std::exp(kI * (t * eigenvalues_[k]));
    return eigenvectors_ * modes;
}

Eigen::MatrixXcd SpectralDecomposition::apply_function(const std::function<double(double)>& f) const {
    Eigen::VectorXd values(eigenvalues_.size());
    for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) values[k] = f(eigenvalues_[k]);
    return eigenvectors_ * values.asDiagonal() * eigenvectors_.adjoint();
}

UnitaryMatrix free_propagator(const HermitianOperator& h, double t) {
    SpectralDecomposition spectral(h);
    return UnitaryMatrix{h.box, spectral.propagator(t)};
}

UnitaryMatrix driven_propagator(const HermitianOperator& h, const VectorPotentialSpec& potential,
                                double s, double t, double step) {
    if (t < s) throw std::invalid_argument("driven_propagator: t >= s required");
    if (!(step > 0.0)) throw std::invalid_argument("driven_propagator: step must be > 0");

    const int n = h.box.size();
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(n, n);
    if (t == s) return UnitaryMatrix{h.box, std::move(u)};

    SpectralDecomposition free_part(h);

    // Outside [t0,t1] the field vanishes and the segment is autonomous.
    const double pulse_lo = std::min(std::max(potential.t0, s), t);
    const double pulse_hi = std::min(std::max(potential.t1, s), t);

    if (pulse_lo > s) u = free_part.propagator(pulse_lo - s) * u;
    if (pulse_hi > pulse_lo) {
        const double span = pulse_hi - pulse_lo;
        const int nsteps = std::max(1, static_cast<int>(std::ceil(span / step - 1e-12)));
        const double delta = span / nsteps;
        for (int k = 0; k < nsteps; ++k) {
            const double mid = pulse_lo + (k + 0.5) * delta;
            HermitianOperator generator = field_energy_operator(h.box, potential, mid);
            generator.entries += h.entries;
            SpectralDecomposition mid_spectral(generator);
            u = mid_spectral.propagator(delta) * u;
        }
    }
    if (t > pulse_hi) u = free_part.propagator(t - pulse_hi) * u;
    return UnitaryMatrix{h.box, std::move(u)};
}

Eigen::MatrixXcd dyson_phillips_propagator(const HermitianOperator& h,
                                           const VectorPotentialSpec& potential,
                                           double s, double t, int truncation_order,
                                           int grid_steps) {
    if (t < s) throw std::invalid_argument("dyson_phillips_propagator: t >= s required");
    if (truncation_order < 0) throw std::invalid_argument("dyson_phillips_propagator: order must be >= 0");
    if (grid_steps < 1) throw std::invalid_argument("dyson_phillips_propagator: need at least one grid step");

    const int n = h.box.size();
    SpectralDecomposition spectral(h);
    if (truncation_order == 0 || t == s) return spectral.propagator(t - s);

    const int m = grid_steps;
    const double delta = (t - s) / m;

    // Grid data: V_j = exp(-i (sigma_j - s) h) and w at each node.
    std::vector<Eigen::MatrixXcd> forward(static_cast<std::size_t>(m + 1));
    std::vector<Eigen::MatrixXcd> w(static_cast<std::size_t>(m + 1));
    for (int j = 0; j <= m; ++j) {
        const double sigma = s + j * delta;
        forward[static_cast<std::size_t>(j)] = spectral.propagator(sigma - s);
        w[static_cast<std::size_t>(j)] = field_energy_operator(h.box, potential, sigma).entries;
    }

    // term_k(sigma_j) = -i int_s^{sigma_j} exp(-i(sigma_j - r)h) w_r term_{k-1}(r) dr,
    // with the group law exp(-i(sigma_j - r)h) = V_j V_r^dagger turning the
    // nested trapezoid into a running sum.
    std::vector<Eigen::MatrixXcd> term(static_cast<std::size_t>(m + 1));
    for (int j = 0; j <= m; ++j) term[static_cast<std::size_t>(j)] = forward[static_cast<std::size_t>(j)];

    Eigen::MatrixXcd total = spectral.propagator(t - s);
    for (int order = 1; order <= truncation_order; ++order) {
        std::vector<Eigen::MatrixXcd> integrand(static_cast<std::size_t>(m + 1));
        for (int j = 0; j <= m; ++j)
            integrand[static_cast<std::size_t>(j)] =
                forward[static_cast<std::size_t>(j)].adjoint() * w[static_cast<std::size_t>(j)] *
                term[static_cast<std::size_t>(j)];
        std::vector<Eigen::MatrixXcd> next(static_cast<std::size_t>(m + 1));
        Eigen::MatrixXcd running = Eigen::MatrixXcd::Zero(n, n);
        next[0] = Eigen::MatrixXcd::Zero(n, n);
        for (int j = 1; j <= m; ++j) {
            running += 0.5 * delta * (integrand[static_cast<std::size_t>(j - 1)] + integrand[static_cast<std::size_t>(j)]);
            next[static_cast<std::size_t>(j)] = -kI * (forward[static_cast<std::size_t>(j)] * running);
        }
        term = std::move(next);
        total += term[static_cast<std::size_t>(m)];
    }
    return total;
}

SymbolMatrix fermi_symbol(const HermitianOperator& h, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("fermi_symbol: beta must be > 0");
    SpectralDecomposition spectral(h);
    auto fermi = [beta](double energy) {
        const double x = beta * energy;
        if (x > 0.0) {
            const double e = std::exp(-x);
            return e / (1.0 + e);
        }
        return 1.0 / (1.0 + std::exp(x));
    };
    return SymbolMatrix{h.box, spectral.apply_function(fermi)};
}

std::string DecayProfile::to_csv() const {
    std::string out = "separation,max_amplitude,bound_value\n";
    char line[128];
    for (const auto& p : points) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", p.separation, p.max_amplitude,
                      p.bound_value);
        out += line;
    }
    return out;
}

DecayProfile correlation_decay_profile(const HermitianOperator& h, double t, double epsilon,
                                       double interior_margin) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("correlation_decay_profile: epsilon must be > 0");
    SpectralDecomposition spectral(h);
    const Eigen::MatrixXcd u = spectral.propagator(t);
    const int n = h.box.size();
    const int d = h.box.dimension();
    const double reach = std::floor(h.box.half_side());

    auto interior = [&](const Eigen::VectorXd& x) {
        return (reach - x.cwiseAbs().maxCoeff()) >= interior_margin;
    };

    std::map<double, double> max_by_separation;
    for (int a = 0; a < n; ++a) {
        const Eigen::VectorXd xa = h.box.coordinates(a);
        if (!interior(xa)) continue;
        for (int b = 0; b < n; ++b) {
            const Eigen::VectorXd xb = h.box.coordinates(b);
            if (!interior(xb)) continue;
            const double r = (xa - xb).norm();
            const double amp = std::abs(u(a, b));
            auto [it, inserted] = max_by_separation.emplace(r, amp);
            if (!inserted) it->second = std::max(it->second, amp);
        }
    }

    DecayProfile profile;
    profile.epsilon = epsilon;
    profile.time = t;
    profile.fitted_constant = 0.0;
    for (const auto& [r, amp] : max_by_separation) {
        profile.fitted_constant =
            std::max(profile.fitted_constant, amp * (1.0 + std::pow(r, d + epsilon)));
    }
    for (const auto& [r, amp] : max_by_separation) {
        profile.points.push_back(
            {r, amp, profile.fitted_constant / (1.0 + std::pow(r, d + epsilon))});
    }
    return profile;
}

}  // namespace fermiheat
