#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace fermiheat {

using Complex = std::complex<double>;
using Site = std::vector<int>;  // one integer coordinate per dimension

// Finite set of lattice sites with a fixed lexicographic enumeration.
// The standard box of half-side L contains all x with |x_i| <= floor(L);
// arbitrary site sets (intervals, sub-boxes) are supported for oracle work.
// Immutable and cheap to copy.
class LatticeBox {
public:
    LatticeBox() = default;

    static LatticeBox build(int dimension, double half_side);
    static LatticeBox interval(int lo, int hi);  // d = 1 sites lo..hi
    static LatticeBox from_sites(int dimension, std::vector<Site> sites);

    int dimension() const { return data_->dimension; }
    double half_side() const { return data_->half_side; }
    int size() const { return static_cast<int>(data_->sites.size()); }
    const Site& site(int index) const { return data_->sites[index]; }
    const std::vector<Site>& sites() const { return data_->sites; }
    std::optional<int> index_of(const Site& site) const;
    bool contains(const LatticeBox& other) const;
    bool same_sites(const LatticeBox& other) const { return data_ == other.data_ || data_->sites == other.data_->sites; }

    Eigen::VectorXd coordinates(int index) const;  // site as a real vector

private:
    struct Data {
        int dimension = 0;
        double half_side = 0.0;
        std::vector<Site> sites;
    };
    explicit LatticeBox(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
    std::shared_ptr<const Data> data_;
};

// Static random potential omega in [-1,1]^Lambda. Values are a pure function
// of (seed, site coordinates), so enlarging the box extends the field without
// disturbing the interior.
struct DisorderField {
    LatticeBox box;
    Eigen::VectorXd values;
    std::uint64_t seed = 0;
};

struct HermitianOperator {
    LatticeBox box;
    Eigen::MatrixXcd entries;

    double hermiticity_defect() const;
};

// Separable vector potential A(t,x) = eta * g(t) * f(x/l) * e_hat with smooth
// compactly supported profiles; g lives on [t0,t1], f on [-1,1]^d. Profiles
// are pluggable; defaults are the C-infinity bumps exp(-1/(1-s^2)).
class VectorPotentialSpec {
public:
    std::function<double(double)> time_profile;        // g, support [t0,t1]
    std::function<double(double)> time_profile_deriv;  // g'
    std::function<double(const Eigen::VectorXd&)> space_profile;  // f, support [-1,1]^d
    Eigen::VectorXd direction;  // unit vector e_hat
    double strength = 0.0;      // eta
    double scale = 1.0;         // l
    double t0 = 0.0;
    double t1 = 1.0;
    int quadrature_nodes = 16;

    static VectorPotentialSpec default_bump(int dimension, double eta, double scale,
                                            double t0, double t1,
                                            Eigen::VectorXd direction = {});

    // A(t,x) as a covector in R^d.
    Eigen::VectorXd evaluate(double t, const Eigen::VectorXd& x) const;
    // Line integral of A along the straight segment x -> y at time t,
    // by Gauss-Legendre quadrature with quadrature_nodes points.
    double bond_phase(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
    // d/dt of bond_phase, using the analytic time-profile derivative.
    double bond_phase_rate(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

    bool active_at(double t) const { return t > t0 && t < t1; }

    VectorPotentialSpec with_strength(double eta) const {
        VectorPotentialSpec copy = *this;
        copy.strength = eta;
        return copy;
    }
};

LatticeBox build_box(int dimension, double half_side);

DisorderField sample_disorder(const LatticeBox& box, std::uint64_t seed);

// Discrete Laplacian on the box: 2d on the diagonal, -1 between nearest
// neighbors that both lie inside the box (open boundary).
HermitianOperator laplacian(const LatticeBox& box);

// h = laplacian + lambda * diag(omega).
HermitianOperator hamiltonian(const LatticeBox& box, const DisorderField& omega, double lambda);

// Laplacian with every hopping entry multiplied by the Peierls phase
// exp(-i * line integral of A along the bond); diagonal unchanged.
HermitianOperator peierls_laplacian(const LatticeBox& box, const VectorPotentialSpec& potential, double t);

// w_t = peierls_laplacian - laplacian; vanishes outside [t0,t1] and outside
// the spatial support of the rescaled potential.
HermitianOperator field_energy_operator(const LatticeBox& box, const VectorPotentialSpec& potential, double t);

// Analytic d/dt of field_energy_operator (the work-integral integrand
// operator); avoids numeric differencing of the Peierls phases.
HermitianOperator field_energy_rate(const LatticeBox& box, const VectorPotentialSpec& potential, double t);

// E(t,x) = -dA/dt as a covector.
Eigen::VectorXd electric_field(const VectorPotentialSpec& potential, double t, const Eigen::VectorXd& x);

}  // namespace fermiheat
