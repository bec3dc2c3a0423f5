#include "fermiheat/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fermiheat/numerics.hpp"

namespace fermiheat {

LatticeBox LatticeBox::build(int dimension, double half_side) {
    if (dimension < 1) throw std::invalid_argument("LatticeBox: dimension must be >= 1");
    if (!(half_side > 0.0)) throw std::invalid_argument("LatticeBox: half side must be > 0");
    const int reach = static_cast<int>(std::floor(half_side));
    const int width = 2 * reach + 1;

    std::vector<Site> sites;
    sites.reserve(static_cast<std::size_t>(std::pow(width, dimension)));
    Site current(dimension, -reach);
    while (true) {
        sites.push_back(current);
        int axis = dimension - 1;
        while (axis >= 0) {
            if (++current[axis] <= reach) break;
            current[axis] = -reach;
            --axis;
        }
        if (axis < 0) break;
    }

    auto data = std::make_shared<Data>();
    data->dimension = dimension;
    data->half_side = half_side;
    data->sites = std::move(sites);
    return LatticeBox(std::move(data));
}

LatticeBox LatticeBox::interval(int lo, int hi) {
    if (lo > hi) throw std::invalid_argument("LatticeBox: empty interval");
    std::vector<Site> sites;
    sites.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (int x = lo; x <= hi; ++x) sites.push_back({x});
    auto data = std::make_shared<Data>();
    data->dimension = 1;
    data->half_side = std::max(std::abs(lo), std::abs(hi));
    data->sites = std::move(sites);
    return LatticeBox(std::move(data));
}

LatticeBox LatticeBox::from_sites(int dimension, std::vector<Site> sites) {
    if (dimension < 1) throw std::invalid_argument("LatticeBox: dimension must be >= 1");
    if (sites.empty()) throw std::invalid_argument("LatticeBox: empty site set");
    for (const Site& s : sites)
        if (static_cast<int>(s.size()) != dimension)
            throw std::invalid_argument("LatticeBox: site dimension mismatch");
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    double reach = 0.0;
    for (const Site& s : sites)
        for (int c : s) reach = std::max(reach, static_cast<double>(std::abs(c)));
    auto data = std::make_shared<Data>();
    data->dimension = dimension;
    data->half_side = reach;
    data->sites = std::move(sites);
    return LatticeBox(std::move(data));
}

std::optional<int> LatticeBox::index_of(const Site& site) const {
    const auto& sites = data_->sites;
    auto it = std::lower_bound(sites.begin(), sites.end(), site);
    if (it == sites.end() || *it != site) return std::nullopt;
    return static_cast<int>(it - sites.begin());
}

bool LatticeBox::contains(const LatticeBox& other) const {
    if (other.dimension() != dimension()) return false;
    for (const Site& s : other.sites())
        if (!index_of(s)) return false;
    return true;
}

Eigen::VectorXd LatticeBox::coordinates(int index) const {
    const Site& s = data_->sites[static_cast<std::size_t>(index)];
    Eigen::VectorXd x(dimension());
    for (int i = 0; i < dimension(); ++i) x[i] = s[static_cast<std::size_t>(i)];
    return x;
}

double HermitianOperator::hermiticity_defect() const {
    return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

// exp(-1/(1-s^2)) on (-1,1), zero outside; C-infinity with all derivatives
// vanishing at the support edge.
double bump(double s) {
    const double s2 = s * s;
    if (s2 >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - s2));
}

double bump_deriv(double s) {
    const double s2 = s * s;
    if (s2 >= 1.0) return 0.0;
    const double u = 1.0 - s2;
    return bump(s) * (-2.0 * s / (u * u));
}

std::uint64_t hash_site(std::uint64_t seed, const Site& site) {
    std::uint64_t state = seed ^ 0x51ed2701a9c1fb59ULL;
    splitmix64(state);
    for (int c : site) {
        state ^= static_cast<std::uint64_t>(static_cast<std::int64_t>(c)) + 0x9e3779b97f4a7c15ULL;
        splitmix64(state);
    }
    return state;
}

}  // namespace

VectorPotentialSpec VectorPotentialSpec::default_bump(int dimension, double eta, double scale,
                                                      double t0, double t1,
                                                      Eigen::VectorXd direction) {
    if (!(t0 < t1)) throw std::invalid_argument("VectorPotentialSpec: t0 < t1 required");
    if (!(scale > 0.0)) throw std::invalid_argument("VectorPotentialSpec: scale must be > 0");
    VectorPotentialSpec spec;
    const double mid = 0.5 * (t0 + t1);
    const double rate = 2.0 / (t1 - t0);
    spec.time_profile = [mid, rate](double t) { return bump((t - mid) * rate); };
    spec.time_profile_deriv = [mid, rate](double t) { return rate * bump_deriv((t - mid) * rate); };
    spec.space_profile = [](const Eigen::VectorXd& u) {
        double f = 1.0;
        for (Eigen::Index i = 0; i < u.size(); ++i) f *= bump(u[i]);
        return f;
    };
    if (direction.size() == 0) {
        direction = Eigen::VectorXd::Zero(dimension);
        direction[0] = 1.0;
    }
    if (direction.size() != dimension)
        throw std::invalid_argument("VectorPotentialSpec: direction dimension mismatch");
    spec.direction = direction / direction.norm();
    spec.strength = eta;
    spec.scale = scale;
    spec.t0 = t0;
    spec.t1 = t1;
    return spec;
}

Eigen::VectorXd VectorPotentialSpec::evaluate(double t, const Eigen::VectorXd& x) const {
    return (strength * time_profile(t) * space_profile(x / scale)) * direction;
}

double VectorPotentialSpec::bond_phase(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    const double g = strength * time_profile(t);
    if (g == 0.0) return 0.0;
    const double along = direction.dot(y - x);
    if (along == 0.0) return 0.0;
    const QuadratureRule rule = gauss_legendre_unit(quadrature_nodes);
    double integral = 0.0;
    for (int q = 0; q < quadrature_nodes; ++q) {
        const double a = rule.nodes[static_cast<std::size_t>(q)];
        integral += rule.weights[static_cast<std::size_t>(q)] *
                    space_profile((a * y + (1.0 - a) * x) / scale);
    }
    return g * integral * along;
}

double VectorPotentialSpec::bond_phase_rate(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    const double gdot = strength * time_profile_deriv(t);
    if (gdot == 0.0) return 0.0;
    const double along = direction.dot(y - x);
    if (along == 0.0) return 0.0;
    const QuadratureRule rule = gauss_legendre_unit(quadrature_nodes);
    double integral = 0.0;
    for (int q = 0; q < quadrature_nodes; ++q) {
        const double a = rule.nodes[static_cast<std::size_t>(q)];
        integral += rule.weights[static_cast<std::size_t>(q)] *
                    space_profile((a * y + (1.0 - a) * x) / scale);
    }
    return gdot * integral * along;
}

LatticeBox build_box(int dimension, double half_side) {
    return LatticeBox::build(dimension, half_side);
}

DisorderField sample_disorder(const LatticeBox& box, std::uint64_t seed) {
    DisorderField field;
    field.box = box;
    field.seed = seed;
    field.values.resize(box.size());
    for (int i = 0; i < box.size(); ++i) {
        std::uint64_t state = hash_site(seed, box.site(i));
        field.values[i] = 2.0 * uniform01(state) - 1.0;
    }
    return field;
}

HermitianOperator laplacian(const LatticeBox& box) {
    const int n = box.size();
    const int d = box.dimension();
    HermitianOperator op{box, Eigen::MatrixXcd::Zero(n, n)};
    for (int i = 0; i < n; ++i) {
        op.entries(i, i) = 2.0 * d;
        Site neighbor = box.site(i);
        for (int axis = 0; axis < d; ++axis) {
            for (int step : {-1, +1}) {
                neighbor[static_cast<std::size_t>(axis)] += step;
                if (auto j = box.index_of(neighbor)) op.entries(i, *j) = -1.0;
                neighbor[static_cast<std::size_t>(axis)] -= step;
            }
        }
    }
    return op;
}

HermitianOperator hamiltonian(const LatticeBox& box, const DisorderField& omega, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("hamiltonian: lambda must be >= 0");
    if (!box.same_sites(omega.box)) throw std::invalid_argument("hamiltonian: disorder field on a different box");
    HermitianOperator op = laplacian(box);
    op.entries.diagonal() += (lambda * omega.values).cast<Complex>();
    return op;
}

HermitianOperator peierls_laplacian(const LatticeBox& box, const VectorPotentialSpec& potential, double t) {
    HermitianOperator op = laplacian(box);
    const int n = box.size();
    const Complex i_unit(0.0, 1.0);
    for (int a = 0; a < n; ++a) {
        const Eigen::VectorXd xa = box.coordinates(a);
        for (int b = 0; b < n; ++b) {
            if (a == b || op.entries(a, b) == Complex(0.0)) continue;
            const double phase = potential.bond_phase(t, xa, box.coordinates(b));
            op.entries(a, b) *= std::exp(-i_unit * phase);
        }
    }
    return op;
}

HermitianOperator field_energy_operator(const LatticeBox& box, const VectorPotentialSpec& potential, double t) {
    HermitianOperator w = peierls_laplacian(box, potential, t);
    w.entries -= laplacian(box).entries;
    return w;
}

HermitianOperator field_energy_rate(const LatticeBox& box, const VectorPotentialSpec& potential, double t) {
    HermitianOperator base = laplacian(box);
    HermitianOperator rate{box, Eigen::MatrixXcd::Zero(box.size(), box.size())};
    const int n = box.size();
    const Complex i_unit(0.0, 1.0);
    for (int a = 0; a < n; ++a) {
        const Eigen::VectorXd xa = box.coordinates(a);
        for (int b = 0; b < n; ++b) {
            if (a == b || base.entries(a, b) == Complex(0.0)) continue;
            const Eigen::VectorXd xb = box.coordinates(b);
            const double phase = potential.bond_phase(t, xa, xb);
            const double phase_rate = potential.bond_phase_rate(t, xa, xb);
            rate.entries(a, b) = base.entries(a, b) * (-i_unit * phase_rate) * std::exp(-i_unit * phase);
        }
    }
    return rate;
}

Eigen::VectorXd electric_field(const VectorPotentialSpec& potential, double t, const Eigen::VectorXd& x) {
    return (-potential.strength * potential.time_profile_deriv(t) *
            potential.space_profile(x / potential.scale)) *
           potential.direction;
}

}  // namespace fermiheat
