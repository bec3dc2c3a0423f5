#include "fermiheat/fock.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fermiheat/errors.hpp"
#include "fermiheat/numerics.hpp"

namespace fermiheat {

namespace {

const Complex kI(0.0, 1.0);

constexpr double kSupportThreshold = 1e-12;
constexpr double kLogClamp = 1e-14;

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

void check_guard(int n, bool allow_override) {
    if (n < 1) throw std::invalid_argument("fock: need at least one site");
    if (n > kFockSiteGuard && !allow_override)
        throw resource_limit_error("fock: site count exceeds the 2^14 guard");
}

}  // namespace

std::vector<FockOperator> car_matrices(int n, bool allow_override) {
    check_guard(n, allow_override);
    Eigen::MatrixXcd lower(2, 2), parity(2, 2), identity(2, 2);
    lower << 0, 1, 0, 0;      // |0><1|
    parity << 1, 0, 0, -1;    // Jordan-Wigner string factor
    identity.setIdentity();

    std::vector<FockOperator> ops;
    ops.reserve(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
        for (int k = 0; k < n; ++k) {
            if (k < x) m = kron(m, parity);
            else if (k == x) m = kron(m, lower);
            else m = kron(m, identity);
        }
        ops.push_back(FockOperator{n, std::move(m)});
    }
    return ops;
}

FockOperator second_quantize(const HermitianOperator& h) {
    const int n = h.box.size();
    check_guard(n, false);
    const auto a = car_matrices(n);
    const Eigen::Index dim = Eigen::Index(1) << n;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            if (h.entries(x, y) == Complex(0.0)) continue;
            out += h.entries(x, y) * (a[static_cast<std::size_t>(x)].entries.adjoint() *
                                      a[static_cast<std::size_t>(y)].entries);
        }
    }
    return FockOperator{n, std::move(out)};
}

DensityMatrix gibbs_state(const FockOperator& hamiltonian, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("gibbs_state: beta must be > 0");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hamiltonian.entries);
    const Eigen::VectorXd energies = solver.eigenvalues();
    const double ground = energies.minCoeff();
    Eigen::VectorXd weights(energies.size());
    for (Eigen::Index k = 0; k < energies.size(); ++k)
        weights[k] = std::exp(-beta * (energies[k] - ground));
    weights /= weights.sum();
    return DensityMatrix{hamiltonian.n_sites,
                         solver.eigenvectors() * weights.asDiagonal() * solver.eigenvectors().adjoint()};
}

FockOperator evolve_many_body(const FockOperator& hamiltonian, const LatticeBox& box,
                              const VectorPotentialSpec& potential, double s, double t,
                              double step) {
    if (t < s) throw std::invalid_argument("evolve_many_body: t >= s required");
    if (!(step > 0.0)) throw std::invalid_argument("evolve_many_body: step must be > 0");
    const int n = hamiltonian.n_sites;
    check_guard(n, false);
    const Eigen::Index dim = hamiltonian.entries.rows();

    // Quadratic basis a_x^* a_y, built once; dGamma(M) = sum M_xy B_xy.
    const auto a = car_matrices(n);
    std::vector<Eigen::MatrixXcd> quad(static_cast<std::size_t>(n * n));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            quad[static_cast<std::size_t>(x * n + y)] =
                a[static_cast<std::size_t>(x)].entries.adjoint() * a[static_cast<std::size_t>(y)].entries;
    auto dgamma = [&](const Eigen::MatrixXcd& m) {
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                if (m(x, y) != Complex(0.0)) out += m(x, y) * quad[static_cast<std::size_t>(x * n + y)];
        return out;
    };
    auto exp_step = [&](const Eigen::MatrixXcd& generator, double duration) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(generator);
        Eigen::VectorXcd phases(solver.eigenvalues().size());
        for (Eigen::Index k = 0; k < phases.size(); ++k)
            phases[k] = std::exp(-kI * (duration * solver.eigenvalues()[k]));
        return Eigen::MatrixXcd(solver.eigenvectors() * phases.asDiagonal() *
                                solver.eigenvectors().adjoint());
    };

    Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(dim, dim);
    if (t == s) return FockOperator{n, std::move(v)};

    const double pulse_lo = std::min(std::max(potential.t0, s), t);
    const double pulse_hi = std::min(std::max(potential.t1, s), t);
    if (pulse_lo > s) v = exp_step(hamiltonian.entries, pulse_lo - s) * v;
    if (pulse_hi > pulse_lo) {
        const double span = pulse_hi - pulse_lo;
        const int nsteps = std::max(1, static_cast<int>(std::ceil(span / step - 1e-12)));
        const double delta = span / nsteps;
        for (int k = 0; k < nsteps; ++k) {
            const double mid = pulse_lo + (k + 0.5) * delta;
            const HermitianOperator w = field_energy_operator(box, potential, mid);
            v = exp_step(hamiltonian.entries + dgamma(w.entries), delta) * v;
        }
    }
    if (t > pulse_hi) v = exp_step(hamiltonian.entries, t - pulse_hi) * v;
    return FockOperator{n, std::move(v)};
}

double relative_entropy_fock(const DensityMatrix& rho1, const DensityMatrix& rho2) {
    if (rho1.entries.rows() != rho2.entries.rows())
        throw std::invalid_argument("relative_entropy_fock: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s1(rho1.entries);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s2(rho2.entries);

    // Support condition: every kernel vector of rho2 must be a kernel vector
    // of rho1, otherwise the entropy is infinite.
    double leaked = 0.0;
    for (Eigen::Index k = 0; k < s2.eigenvalues().size(); ++k) {
        if (s2.eigenvalues()[k] >= kSupportThreshold) continue;
        const Eigen::VectorXcd v = s2.eigenvectors().col(k);
        leaked += std::real(v.dot(rho1.entries * v));
    }
    if (leaked > kSupportThreshold) return std::numeric_limits<double>::infinity();

    double value = 0.0;
    for (Eigen::Index k = 0; k < s1.eigenvalues().size(); ++k) {
        const double p = s1.eigenvalues()[k];
        if (p > kLogClamp) value += p * std::log(p);  // x ln x -> 0 as x -> 0
    }
    for (Eigen::Index k = 0; k < s2.eigenvalues().size(); ++k) {
        const double q = s2.eigenvalues()[k];
        if (q < kSupportThreshold) continue;
        const Eigen::VectorXcd v = s2.eigenvectors().col(k);
        value -= std::real(v.dot(rho1.entries * v)) * std::log(std::max(q, kLogClamp));
    }
    if (value < 0.0 && value > -1e-12) value = 0.0;
    return value;
}

FockOperator multicommutator(const std::vector<FockOperator>& operators) {
    if (operators.size() < 2)
        throw std::invalid_argument("multicommutator: need at least two operators");
    const Eigen::Index dim = operators.front().entries.rows();
    for (const auto& op : operators)
        if (op.entries.rows() != dim || op.entries.cols() != dim)
            throw std::invalid_argument("multicommutator: dimension mismatch");
    Eigen::MatrixXcd nested = operators.back().entries;
    for (std::size_t k = operators.size() - 1; k-- > 0;) {
        const Eigen::MatrixXcd& b = operators[k].entries;
        nested = b * nested - nested * b;
    }
    return FockOperator{operators.front().n_sites, std::move(nested)};
}

DensityMatrix quasifree_density_matrix(const SymbolMatrix& symbol) {
    const int n = symbol.box.size();
    check_guard(n, false);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(symbol.entries);
    Eigen::VectorXd logits(solver.eigenvalues().size());
    for (Eigen::Index k = 0; k < logits.size(); ++k) {
        const double p = std::min(std::max(solver.eigenvalues()[k], kLogClamp), 1.0 - kLogClamp);
        logits[k] = std::log((1.0 - p) / p);
    }
    HermitianOperator generator{symbol.box,
                                solver.eigenvectors() * logits.asDiagonal() * solver.eigenvectors().adjoint()};
    return gibbs_state(second_quantize(generator), 1.0);
}

DensityMatrix restrict_state(const DensityMatrix& rho, int m_keep) {
    if (m_keep < 1 || m_keep > rho.n_sites)
        throw std::invalid_argument("restrict_state: invalid site prefix");
    const Eigen::Index keep_dim = Eigen::Index(1) << m_keep;
    const Eigen::Index drop_dim = Eigen::Index(1) << (rho.n_sites - m_keep);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(keep_dim, keep_dim);
    for (Eigen::Index i = 0; i < keep_dim; ++i)
        for (Eigen::Index j = 0; j < keep_dim; ++j)
            for (Eigen::Index k = 0; k < drop_dim; ++k)
                out(i, j) += rho.entries(i * drop_dim + k, j * drop_dim + k);
    return DensityMatrix{m_keep, std::move(out)};
}

Eigen::MatrixXcd two_point_matrix(const DensityMatrix& rho) {
    const int n = rho.n_sites;
    const auto a = car_matrices(n);
    Eigen::MatrixXcd m(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            m(y, x) = (rho.entries * a[static_cast<std::size_t>(x)].entries.adjoint() *
                       a[static_cast<std::size_t>(y)].entries)
                          .trace();
    return m;
}

double von_neumann_entropy(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho.entries);
    double s = 0.0;
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
        const double p = solver.eigenvalues()[k];
        if (p > kLogClamp) s -= p * std::log(p);
    }
    return s;
}

FockEnergyTrajectory fock_energy_trajectory(const HermitianOperator& h,
                                            const VectorPotentialSpec& potential, double beta,
                                            double step, double horizon) {
    const int n = h.box.size();
    check_guard(n, false);
    const double t0 = potential.t0;
    const double end = horizon > 0.0 ? horizon : potential.t1;
    const auto [nsteps, delta] = uniform_grid(t0, end, step);
    const Eigen::Index dim = Eigen::Index(1) << n;

    const auto a = car_matrices(n);
    std::vector<Eigen::MatrixXcd> quad(static_cast<std::size_t>(n * n));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            quad[static_cast<std::size_t>(x * n + y)] =
                a[static_cast<std::size_t>(x)].entries.adjoint() * a[static_cast<std::size_t>(y)].entries;
    auto dgamma = [&](const Eigen::MatrixXcd& m) {
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                if (m(x, y) != Complex(0.0)) out += m(x, y) * quad[static_cast<std::size_t>(x * n + y)];
        return out;
    };
    auto exp_step = [&](const Eigen::MatrixXcd& generator, double duration) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(generator);
        Eigen::VectorXcd phases(solver.eigenvalues().size());
        for (Eigen::Index k = 0; k < phases.size(); ++k)
            phases[k] = std::exp(-kI * (duration * solver.eigenvalues()[k]));
        return Eigen::MatrixXcd(solver.eigenvectors() * phases.asDiagonal() *
                                solver.eigenvectors().adjoint());
    };

    const FockOperator big_h{n, dgamma(h.entries)};
    const DensityMatrix gibbs = gibbs_state(big_h, beta);
    const double base_energy = (gibbs.entries * big_h.entries).trace().real();
    Eigen::MatrixXcd state = gibbs.entries;
    const Eigen::MatrixXcd free_step = exp_step(big_h.entries, delta);

    FockEnergyTrajectory out;
    std::vector<double> work_rate;
    for (long k = 0; k <= nsteps; ++k) {
        const double t = t0 + static_cast<double>(k) * delta;
        out.times.push_back(t);
        out.internal_energy.push_back((state * big_h.entries).trace().real() - base_energy);
        if (potential.active_at(t)) {
            const HermitianOperator w = field_energy_operator(h.box, potential, t);
            out.potential_energy.push_back((state * dgamma(w.entries)).trace().real());
            const HermitianOperator dw = field_energy_rate(h.box, potential, t);
            work_rate.push_back((state * dgamma(dw.entries)).trace().real());
        } else {
            out.potential_energy.push_back(0.0);
            work_rate.push_back(0.0);
        }
        out.heat.push_back(relative_entropy_fock(DensityMatrix{n, state}, gibbs) / beta);

        if (k == nsteps) break;
        const double mid = t + 0.5 * delta;
        Eigen::MatrixXcd u;
        if (potential.active_at(mid)) {
            const HermitianOperator w = field_energy_operator(h.box, potential, mid);
            u = exp_step(big_h.entries + dgamma(w.entries), delta);
        } else {
            u = free_step;
        }
        state = u * state * u.adjoint();
    }
    out.work = cumulative_integral(work_rate, delta);
    return out;
}

}  // namespace fermiheat
