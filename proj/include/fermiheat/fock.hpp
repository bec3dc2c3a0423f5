#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fermiheat/lattice.hpp"
#include "fermiheat/onebody.hpp"

namespace fermiheat {

// Dense operator on the 2^n-dimensional fermion Fock space. Oracle scale
// only; site count is guarded (see kFockSiteGuard).
struct FockOperator {
    int n_sites = 0;
    Eigen::MatrixXcd entries;
};

struct DensityMatrix {
    int n_sites = 0;
    Eigen::MatrixXcd entries;
};

// Hard guard on the Fock-space site count (dimension 2^14 = 16384). Calls
// that would exceed it throw resource_limit_error unless allow_override.
inline constexpr int kFockSiteGuard = 14;

// Annihilation operators a_0..a_{n-1} in the Jordan-Wigner representation;
// basis index bit k (site 0 = most significant) is the occupancy of site k.
std::vector<FockOperator> car_matrices(int n, bool allow_override = false);

// dGamma(h) = sum_{x,y} h_{x,y} a_x^* a_y.
FockOperator second_quantize(const HermitianOperator& h);

// exp(-beta H) / Trace(exp(-beta H)).
DensityMatrix gibbs_state(const FockOperator& hamiltonian, double beta);

// Propagator V(t,s) of dV/dt = -i (H + dGamma(w_t)) V; the evolved state is
// V rho V^dagger. Same stepping policy as the one-particle integrator so
// discretization errors cancel in cross-checks. The box is needed to build
// w_t from the potential.
FockOperator evolve_many_body(const FockOperator& hamiltonian, const LatticeBox& box,
                              const VectorPotentialSpec& potential, double s, double t,
                              double step);

// Relative entropy of finite-dimensional states; +infinity when the support
// condition supp(rho2) >= supp(rho1) fails (eigenvalue threshold 1e-12).
double relative_entropy_fock(const DensityMatrix& rho1, const DensityMatrix& rho2);

// Right-nested [B_1, [B_2, [...]]].
FockOperator multicommutator(const std::vector<FockOperator>& operators);

// --- helpers for oracle tests -------------------------------------------

// Density matrix of the gauge-invariant quasi-free state with the given
// symbol (eigenvalues clamped away from 0 and 1).
DensityMatrix quasifree_density_matrix(const SymbolMatrix& symbol);

// Restriction of a state to the leading m_keep sites (partial trace over the
// trailing Jordan-Wigner factors; exact for observables on a site prefix).
DensityMatrix restrict_state(const DensityMatrix& rho, int m_keep);

// Trace(rho a_x^* a_y) for all x,y, as a symbol-convention matrix
// M(y,x) = Trace(rho a_x^* a_y).
Eigen::MatrixXcd two_point_matrix(const DensityMatrix& rho);

double von_neumann_entropy(const DensityMatrix& rho);

// Full many-body energy bookkeeping on the same uniform grid as
// compute_energy_trajectory; the direct oracle for S, P, work and heat.
struct FockEnergyTrajectory {
    std::vector<double> times;
    std::vector<double> internal_energy;
    std::vector<double> potential_energy;
    std::vector<double> work;
    std::vector<double> heat;
};

FockEnergyTrajectory fock_energy_trajectory(const HermitianOperator& h,
                                            const VectorPotentialSpec& potential, double beta,
                                            double step, double horizon);

}  // namespace fermiheat
