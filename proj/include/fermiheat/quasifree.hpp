#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fermiheat/lattice.hpp"
#include "fermiheat/onebody.hpp"

namespace fermiheat {

enum class FactorKind { Creation, Annihilation };

struct MonomialFactor {
    FactorKind kind;
    Eigen::VectorXcd wavefunction;
};

// Ordered product of creation/annihilation operators with one-particle
// wavefunctions over the box sites.
struct Monomial {
    std::vector<MonomialFactor> factors;
};

// D_t = U d U^dagger; spectrum preserved.
SymbolMatrix evolve_symbol(const SymbolMatrix& symbol, const UnitaryMatrix& u);

// Gauge-invariant quasi-free expectation of an arbitrary monomial by
// recursive pair contraction; the elementary contractions are
//   rho(a^*(f) a(g)) = <g, D f>,   rho(a(g) a^*(f)) = <g, (1-D) f>,
// same-kind pairs vanish. Equals the determinant formula on normal-ordered
// input.
Complex wick_expectation(const SymbolMatrix& symbol, const Monomial& monomial);

// S = Re Tr(h (D_t - d)).
double internal_energy_increment(const SymbolMatrix& evolved, const SymbolMatrix& initial,
                                 const HermitianOperator& h);

// P = Re Tr(w_t D_t).
double potential_energy_increment(const SymbolMatrix& evolved, const HermitianOperator& w);

// Integral over [t_0, t_0 + delta*(samples-1)] of the supplied infinitesimal
// work samples Re Tr((dw/ds) D_s), composite Simpson; the interval count
// must be even.
double work_integral(const std::vector<double>& work_rate_samples, double delta);

// Tr[D1(ln D1 - ln D2)] + Tr[(1-D1)(ln(1-D1) - ln(1-D2))], eigenvalues
// clamped to [1e-14, 1-1e-14] before the logs.
double quasifree_relative_entropy(const SymbolMatrix& d1, const SymbolMatrix& d2);

// Q = beta^{-1} * relative entropy of D_t w.r.t. the Fermi symbol; throws
// numeric_inconsistency_error when the result disagrees with the internal
// energy increment beyond 1e-8 * (1 + |Q|).
double heat_production(const SymbolMatrix& evolved, const SymbolMatrix& fermi,
                       const HermitianOperator& h, double beta);

// Principal submatrix on the subbox sites (the restricted state's symbol).
SymbolMatrix restrict_symbol(const SymbolMatrix& symbol, const LatticeBox& subbox);

struct EnergyTrajectory {
    std::vector<double> times;
    std::vector<double> internal_energy;      // S
    std::vector<double> potential_energy;     // P
    std::vector<double> work;                 // cumulative electromagnetic work
    std::vector<double> heat;                 // Q = beta^{-1} relative entropy
    std::vector<double> first_law_residual;   // |Q - S|
    std::vector<double> balance_residual;     // |S + P - work|
    std::vector<SymbolMatrix> symbols;        // D_t per grid point (optional use)

    std::string to_csv() const;  // t,S,P,work,Q_rel,first_law_residual,balance_residual
};

struct TrajectoryOptions {
    double step = 0.0;         // integrator/grid step; 0 -> (t1-t0)/400
    double horizon = 0.0;      // final time; 0 -> t1
    bool keep_symbols = false; // retain D_t per grid point
};

// Drives D_t from the Fermi symbol of h through the field window and emits
// the energy bookkeeping on the uniform grid {t0 + k*step}.
EnergyTrajectory compute_energy_trajectory(const HermitianOperator& h,
                                           const VectorPotentialSpec& potential, double beta,
                                           const TrajectoryOptions& options = {});

}  // namespace fermiheat
