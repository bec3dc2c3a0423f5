#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fermiheat/lattice.hpp"

namespace fermiheat {

struct UnitaryMatrix {
    LatticeBox box;
    Eigen::MatrixXcd entries;

    double unitarity_defect() const;
};

// One-particle correlation matrix of a quasi-free state; Hermitian with
// spectrum in [0,1]. Index convention: state(a_x^* a_y) = entries(y, x).
struct SymbolMatrix {
    LatticeBox box;
    Eigen::MatrixXcd entries;
};

// Eigendecomposition of a Hermitian operator, cached so that exponentials at
// many times cost one n^2-scaling product each instead of a fresh solve.
class SpectralDecomposition {
public:
    explicit SpectralDecomposition(const HermitianOperator& op, double hermiticity_tol = 1e-12);

    const LatticeBox& box() const { return box_; }
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    const Eigen::MatrixXcd& eigenvectors() const { return eigenvectors_; }

    Eigen::MatrixXcd exp_it(double t) const;            // exp(i t h)
    Eigen::MatrixXcd propagator(double t) const;        // exp(-i t h)
    Eigen::VectorXcd evolve(double t, const Eigen::VectorXcd& psi) const;  // exp(i t h) psi
    Eigen::MatrixXcd apply_function(const std::function<double(double)>& f) const;

private:
    LatticeBox box_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXcd eigenvectors_;
};

// exp(-i t h) by Hermitian eigendecomposition.
UnitaryMatrix free_propagator(const HermitianOperator& h, double t);

// Propagator of dU/dt = -i (h + w_t) U, U(s,s) = 1, returned as U(t,s).
// Exponential-midpoint stepping inside the field window [t0,t1]; outside the
// window the generator is static and the segment is one exact exponential.
UnitaryMatrix driven_propagator(const HermitianOperator& h, const VectorPotentialSpec& potential,
                                double s, double t, double step);

// Truncation at order K of the perturbation series around the free
// propagator; iterated simplex integrals by nested composite trapezoid on a
// shared uniform grid with grid_steps intervals.
Eigen::MatrixXcd dyson_phillips_propagator(const HermitianOperator& h,
                                           const VectorPotentialSpec& potential,
                                           double s, double t, int truncation_order,
                                           int grid_steps);

// (1 + exp(beta h))^{-1}; commutes with h.
SymbolMatrix fermi_symbol(const HermitianOperator& h, double beta);

struct DecayProfilePoint {
    double separation;
    double max_amplitude;
    double bound_value;  // fitted_constant / (1 + r^{d+epsilon})
};

struct DecayProfile {
    std::vector<DecayProfilePoint> points;
    double fitted_constant;  // smallest D with max_amplitude <= D/(1+r^{d+eps})
    double epsilon;
    double time;

    std::string to_csv() const;  // columns separation,max_amplitude,bound_value
};

// Tabulates max_{|x-y|=r} |<e_x, exp(-i t h) e_y>| per separation and the
// smallest constant dominating it under the polynomial decay envelope.
// interior_margin > 0 drops pairs within that distance of the box edge
// (boundary reflections are a finite-box artifact, not lattice decay).
DecayProfile correlation_decay_profile(const HermitianOperator& h, double t, double epsilon,
                                       double interior_margin = 0.0);

}  // namespace fermiheat
