#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "fermiheat/errors.hpp"
#include "fermiheat/fock.hpp"
#include "fermiheat/lattice.hpp"
#include "fermiheat/numerics.hpp"
#include "fermiheat/onebody.hpp"
#include "fermiheat/quasifree.hpp"

using namespace fermiheat;

namespace {

double operator_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

Eigen::VectorXcd random_vector(int n, std::uint64_t& state) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = Complex(2.0 * uniform01(state) - 1.0, 2.0 * uniform01(state) - 1.0);
    return v;
}

// Haar-ish random unitary via QR of a random complex matrix.
Eigen::MatrixXcd random_unitary(int n, std::uint64_t& state) {
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = Complex(2.0 * uniform01(state) - 1.0, 2.0 * uniform01(state) - 1.0);
    return Eigen::HouseholderQR<Eigen::MatrixXcd>(m).householderQ();
}

// Random symbol with spectrum strictly inside (0,1).
SymbolMatrix random_symbol(const LatticeBox& box, std::uint64_t& state) {
    const int n = box.size();
    const Eigen::MatrixXcd u = random_unitary(n, state);
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p[i] = 0.05 + 0.9 * uniform01(state);
    return SymbolMatrix{box, u * p.asDiagonal() * u.adjoint()};
}

// Fock-side expectation of a monomial of creation/annihilation operators.
Complex fock_monomial_expectation(const DensityMatrix& rho, const Monomial& monomial) {
    const auto a = car_matrices(rho.n_sites);
    const Eigen::Index dim = rho.entries.rows();
    Eigen::MatrixXcd product = Eigen::MatrixXcd::Identity(dim, dim);
    for (const auto& factor : monomial.factors) {
        Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim, dim);
        for (int x = 0; x < rho.n_sites; ++x) {
            if (factor.kind == FactorKind::Creation)
                op += factor.wavefunction[x] * a[static_cast<std::size_t>(x)].entries.adjoint();
            else
                op += std::conj(factor.wavefunction[x]) * a[static_cast<std::size_t>(x)].entries;
        }
        product = product * op;
    }
    return (rho.entries * product).trace();
}

}  // namespace

TEST_CASE("evolve symbol") {
    const LatticeBox box = LatticeBox::interval(0, 4);
    const HermitianOperator h = hamiltonian(box, sample_disorder(box, 12), 0.8);
    const SymbolMatrix d = fermi_symbol(h, 1.5);

    const UnitaryMatrix id{box, Eigen::MatrixXcd::Identity(5, 5)};
    CHECK(operator_distance(evolve_symbol(d, id).entries, d.entries) == 0.0);

    std::uint64_t state = 99;
    const UnitaryMatrix u{box, random_unitary(5, state)};
    const SymbolMatrix evolved = evolve_symbol(d, u);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> before(d.entries);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> after(evolved.entries);
    CHECK((before.eigenvalues() - after.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-12);

    const UnitaryMatrix wrong{box, Eigen::MatrixXcd::Identity(4, 4)};
    CHECK_THROWS_AS(evolve_symbol(d, wrong), std::invalid_argument);
}

TEST_CASE("evolved two-point functions match the fock oracle on a 4-site chain") {
    const LatticeBox box = LatticeBox::interval(0, 3);
    const HermitianOperator h = hamiltonian(box, sample_disorder(box, 5), 0.6);
    const double beta = 1.1;
    const VectorPotentialSpec potential = VectorPotentialSpec::default_bump(1, 0.35, 1.5, 0.0, 1.0);
    const double step = 1.0 / 64;

    const SymbolMatrix d_t =
        evolve_symbol(fermi_symbol(h, beta), driven_propagator(h, potential, 0.0, 1.0, step));

    const FockOperator big = second_quantize(h);
    const DensityMatrix gibbs = gibbs_state(big, beta);
    const FockOperator v = evolve_many_body(big, box, potential, 0.0, 1.0, step);
    const DensityMatrix rho{4, v.entries * gibbs.entries * v.entries.adjoint()};
    CHECK(operator_distance(two_point_matrix(rho), d_t.entries) < 1e-9);
}

TEST_CASE("wick expectation") {
    const LatticeBox box = LatticeBox::interval(0, 4);
    std::uint64_t state = 1234;
    const SymbolMatrix d = random_symbol(box, state);
    const int n = box.size();

    SUBCASE("two-point kernels") {
        const Eigen::VectorXcd f = random_vector(n, state);
        const Eigen::VectorXcd g = random_vector(n, state);
        Monomial cr_an{{{FactorKind::Creation, f}, {FactorKind::Annihilation, g}}};
        CHECK(std::abs(wick_expectation(d, cr_an) - Complex(g.dot(d.entries * f))) < 1e-13);
        Monomial an_cr{{{FactorKind::Annihilation, g}, {FactorKind::Creation, f}}};
        const Complex hole = g.dot(f) - g.dot(d.entries * f);
        CHECK(std::abs(wick_expectation(d, an_cr) - hole) < 1e-13);
    }

    SUBCASE("unbalanced monomials vanish") {
        const Eigen::VectorXcd f = random_vector(n, state);
        Monomial unbalanced{{{FactorKind::Creation, f},
                             {FactorKind::Creation, f},
                             {FactorKind::Annihilation, f},
                             {FactorKind::Creation, f}}};
        CHECK(std::abs(wick_expectation(d, unbalanced)) < 1e-13);
    }

    SUBCASE("normal-ordered input equals the determinant formula") {
        for (int m : {2, 3}) {
            std::vector<Eigen::VectorXcd> fs, gs;
            for (int j = 0; j < m; ++j) {
                fs.push_back(random_vector(n, state));
                gs.push_back(random_vector(n, state));
            }
            // a*(f_1)...a*(f_m) a(g_m)...a(g_1)
            Monomial monomial;
            for (int j = 0; j < m; ++j) monomial.factors.push_back({FactorKind::Creation, fs[j]});
            for (int j = m - 1; j >= 0; --j)
                monomial.factors.push_back({FactorKind::Annihilation, gs[j]});
            Eigen::MatrixXcd kernel(m, m);
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k) kernel(j, k) = gs[k].dot(d.entries * fs[j]);
            CHECK(std::abs(wick_expectation(d, monomial) - kernel.determinant()) < 1e-11);
        }
    }

    SUBCASE("matches the fock oracle on random monomials") {
        const DensityMatrix rho = quasifree_density_matrix(d);
        for (int trial = 0; trial < 4; ++trial) {
            Monomial monomial;
            for (int j = 0; j < 2; ++j) {
                monomial.factors.push_back({FactorKind::Creation, random_vector(n, state)});
                monomial.factors.push_back({FactorKind::Annihilation, random_vector(n, state)});
            }
            // interleave order differs per trial
            if (trial % 2 == 1) std::swap(monomial.factors[1], monomial.factors[2]);
            CHECK(std::abs(wick_expectation(d, monomial) - fock_monomial_expectation(rho, monomial)) <
                  1e-9);
        }
    }
}

TEST_CASE("energy increments against the fock oracle") {
    const LatticeBox box = LatticeBox::interval(0, 4);
    const HermitianOperator h = hamiltonian(box, sample_disorder(box, 31), 0.9);
    const double beta = 0.8;
    const SymbolMatrix d = fermi_symbol(h, beta);
    const VectorPotentialSpec potential = VectorPotentialSpec::default_bump(1, 0.3, 2.0, 0.0, 1.0);
    const double step = 1.0 / 64;
    const double t = 0.85;

    const SymbolMatrix d_t = evolve_symbol(d, driven_propagator(h, potential, 0.0, t, step));
    const HermitianOperator w = field_energy_operator(box, potential, t);

    CHECK(internal_energy_increment(d, d, h) == 0.0);
    const double s_value = internal_energy_increment(d_t, d, h);
    const double p_value = potential_energy_increment(d_t, w);

    const FockOperator big = second_quantize(h);
    const DensityMatrix gibbs = gibbs_state(big, beta);
    const FockOperator v = evolve_many_body(big, box, potential, 0.0, t, step);
    const Eigen::MatrixXcd rho = v.entries * gibbs.entries * v.entries.adjoint();
    const double s_fock = ((rho - gibbs.entries) * big.entries).trace().real();
    const double p_fock = (rho * second_quantize(w).entries).trace().real();
    CHECK(std::abs(s_value - s_fock) < 1e-9);
    CHECK(std::abs(p_value - p_fock) < 1e-9);
}

TEST_CASE("quasifree relative entropy") {
    const LatticeBox box = LatticeBox::interval(0, 4);
    std::uint64_t state = 777;

    SUBCASE("identical symbols give zero") {
        const SymbolMatrix d = random_symbol(box, state);
        CHECK(std::abs(quasifree_relative_entropy(d, d)) < 1e-10);
    }

    SUBCASE("nonnegative on random pairs") {
        for (int trial = 0; trial < 10; ++trial) {
            const SymbolMatrix d1 = random_symbol(box, state);
            const SymbolMatrix d2 = random_symbol(box, state);
            CHECK(quasifree_relative_entropy(d1, d2) >= -1e-10);
        }
    }

    SUBCASE("equals the fock relative entropy of the quasifree states") {
        for (int trial = 0; trial < 5; ++trial) {
            const SymbolMatrix d1 = random_symbol(box, state);
            const SymbolMatrix d2 = random_symbol(box, state);
            const double one_particle = quasifree_relative_entropy(d1, d2);
            const double fock = relative_entropy_fock(quasifree_density_matrix(d1),
                                                      quasifree_density_matrix(d2));
            CHECK(std::abs(one_particle - fock) < 1e-8 * (1.0 + std::abs(fock)));
        }
    }

    SUBCASE("dimension mismatch is rejected") {
        const SymbolMatrix d1 = random_symbol(box, state);
        const SymbolMatrix d2 = random_symbol(LatticeBox::interval(0, 3), state);
        CHECK_THROWS_AS(quasifree_relative_entropy(d1, d2), std::invalid_argument);
    }
}

TEST_CASE("first law as an exact identity on random unitaries") {
    const LatticeBox box = build_box(1, 5.0);
    const HermitianOperator h = hamiltonian(box, sample_disorder(box, 2), 0.7);
    const double beta = 1.7;
    const SymbolMatrix d = fermi_symbol(h, beta);
    std::uint64_t state = 31;
    for (int trial = 0; trial < 6; ++trial) {
        const UnitaryMatrix u{box, random_unitary(box.size(), state)};
        const SymbolMatrix d_t = evolve_symbol(d, u);
        const double entropy = quasifree_relative_entropy(d_t, d);
        const double energy = internal_energy_increment(d_t, d, h);
        CHECK(std::abs(entropy / beta - energy) <= 1e-10 * (1.0 + std::abs(energy)));
        CHECK_NOTHROW(heat_production(d_t, d, h, beta));
    }
}

TEST_CASE("heat production flags inconsistent inputs") {
    const LatticeBox box = LatticeBox::interval(0, 3);
    const HermitianOperator h = hamiltonian(box, sample_disorder(box, 8), 0.5);
    const SymbolMatrix d = fermi_symbol(h, 1.0);
    SymbolMatrix tampered = d;
    tampered.entries(0, 0) += 0.05;  // not unitarily equivalent to d
    CHECK_THROWS_AS(heat_production(tampered, d, h, 1.0), numeric_inconsistency_error);
}

TEST_CASE("restrict symbol") {
    const LatticeBox chain = LatticeBox::interval(0, 5);
    const HermitianOperator h = hamiltonian(chain, sample_disorder(chain, 3), 0.5);
    const SymbolMatrix d = fermi_symbol(h, 1.2);

    const SymbolMatrix full = restrict_symbol(d, chain);
    CHECK(operator_distance(full.entries, d.entries) == 0.0);

    const LatticeBox sub = LatticeBox::interval(0, 3);
    const SymbolMatrix reduced = restrict_symbol(d, sub);
    CHECK(reduced.entries.rows() == 4);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(reduced.entries);
    CHECK(solver.eigenvalues().minCoeff() >= -1e-12);
    CHECK(solver.eigenvalues().maxCoeff() <= 1.0 + 1e-12);
    CHECK((reduced.entries - reduced.entries.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);

    const LatticeBox outside = LatticeBox::interval(4, 7);
    CHECK_THROWS_AS(restrict_symbol(d, outside), std::invalid_argument);
}

TEST_CASE("restricted relative entropy is monotone in the box") {
    // nested 2 in 4 in 6 site chains, checked through the fock oracle
    const LatticeBox chain = LatticeBox::interval(0, 5);
    const HermitianOperator h = hamiltonian(chain, sample_disorder(chain, 14), 0.8);
    const double beta = 1.0;
    const SymbolMatrix d2 = fermi_symbol(h, beta);
    const VectorPotentialSpec potential = VectorPotentialSpec::default_bump(1, 0.45, 2.0, 0.0, 1.0);
    const SymbolMatrix d1 = evolve_symbol(d2, driven_propagator(h, potential, 0.0, 1.0, 0.02));

    double previous_fock = -1.0, previous_symbol = -1.0;
    for (int keep : {2, 4, 6}) {
        const LatticeBox sub = LatticeBox::interval(0, keep - 1);
        const double via_symbol = quasifree_relative_entropy(restrict_symbol(d1, sub),
                                                             restrict_symbol(d2, sub));
        const DensityMatrix rho1 = quasifree_density_matrix(d1);
        const DensityMatrix rho2 = quasifree_density_matrix(d2);
        const double via_fock =
            relative_entropy_fock(restrict_state(rho1, keep), restrict_state(rho2, keep));
        CHECK(std::abs(via_symbol - via_fock) < 1e-8 * (1.0 + via_fock));
        CHECK(via_fock >= previous_fock - 1e-11);
        CHECK(via_symbol >= previous_symbol - 1e-11);
        previous_fock = via_fock;
        previous_symbol = via_symbol;
    }
}

TEST_CASE("two-dimensional trajectory keeps the structural identities") {
    const LatticeBox box = build_box(2, 2.0);  // 25 sites
    const HermitianOperator h = hamiltonian(box, sample_disorder(box, 7), 0.8);
    Eigen::VectorXd diagonal(2);
    diagonal << 1.0, 1.0;
    VectorPotentialSpec potential =
        VectorPotentialSpec::default_bump(2, 0.3, 1.5, 0.0, 1.0, diagonal);
    TrajectoryOptions options;
    options.step = 1.0 / 100;
    options.horizon = 1.5;
    const EnergyTrajectory tr = compute_energy_trajectory(h, potential, 1.2, options);
    CHECK(tr.heat.back() > 0.0);
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        CHECK(tr.internal_energy[k] >= -1e-10);
        CHECK(tr.first_law_residual[k] <= 1e-8 * (1.0 + std::abs(tr.heat[k])));
        CHECK(tr.balance_residual[k] <= 1e-6);
    }
}

TEST_CASE("work integral rejects odd grids") {
    CHECK_THROWS_AS(work_integral({0.0, 1.0, 2.0, 1.0}, 0.1), std::invalid_argument);
    CHECK(work_integral({0.0, 1.0, 0.0}, 0.5) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("energy trajectory bookkeeping") {
    const LatticeBox box = build_box(1, 8.0);
    const HermitianOperator h = hamiltonian(box, sample_disorder(box, 20), 0.5);
    const VectorPotentialSpec potential = VectorPotentialSpec::default_bump(1, 0.2, 3.0, 0.0, 1.0);
    TrajectoryOptions options;
    options.step = 1.0 / 200;
    options.horizon = 3.0;
    const EnergyTrajectory tr = compute_energy_trajectory(h, potential, 1.0, options);

    CHECK(tr.times.front() == 0.0);
    CHECK(tr.internal_energy.front() == 0.0);
    CHECK(tr.work.front() == 0.0);
    CHECK(tr.heat.front() == doctest::Approx(0.0).epsilon(1e-12));

    double heat_after = -1.0, work_after = 0.0;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        CHECK(tr.internal_energy[k] >= -1e-10);
        CHECK(tr.heat[k] >= -1e-10);
        CHECK(tr.first_law_residual[k] <= 1e-8 * (1.0 + std::abs(tr.heat[k])));
        CHECK(tr.balance_residual[k] <= 5e-6);
        if (tr.times[k] >= 1.0) {
            if (heat_after < 0.0) {  // first grid point past the pulse
                heat_after = tr.heat[k];
                work_after = tr.work[k];
            }
            CHECK(std::abs(tr.heat[k] - heat_after) <= 1e-8);
            // integrand vanishes once the field is off; constant up to the
            // even/odd quadrature-closure difference over the pulse tail
            CHECK(std::abs(tr.work[k] - work_after) <= 1e-14);
        }
    }
    CHECK(tr.heat.back() > 0.0);  // the pulse heats the system

    const std::string csv = tr.to_csv();
    CHECK(csv.rfind("t,S,P,work,Q_rel,first_law_residual,balance_residual\n", 0) == 0);

    // eta = 0: everything stays at zero
    const EnergyTrajectory still =
        compute_energy_trajectory(h, potential.with_strength(0.0), 1.0, options);
    for (std::size_t k = 0; k < still.times.size(); ++k) {
        CHECK(std::abs(still.internal_energy[k]) < 1e-10);
        CHECK(std::abs(still.potential_energy[k]) < 1e-12);
        CHECK(std::abs(still.work[k]) < 1e-12);
        CHECK(std::abs(still.heat[k]) < 1e-10);
    }
}
