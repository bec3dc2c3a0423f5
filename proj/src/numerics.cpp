#include "fermiheat/numerics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>

namespace fermiheat {

namespace {

QuadratureRule compute_gauss_legendre(int n) {
    // Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix, weights
    // come from the first eigenvector components.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k - 1, k) = b;
        jacobi(k, k - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        // map from [-1,1] to [0,1]; weights on [-1,1] sum to 2
        rule.nodes[static_cast<std::size_t>(k)] = 0.5 * (solver.eigenvalues()[k] + 1.0);
        const double v0 = solver.eigenvectors()(0, k);
        rule.weights[static_cast<std::size_t>(k)] = v0 * v0;
    }
    return rule;
}

}  // namespace

QuadratureRule gauss_legendre_unit(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre_unit: need at least one node");
    static std::mutex mutex;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

UniformGrid uniform_grid(double t_lo, double t_hi, double step) {
    if (!(t_hi > t_lo)) throw std::invalid_argument("uniform_grid: empty interval");
    if (!(step > 0.0)) throw std::invalid_argument("uniform_grid: step must be > 0");
    const long n = std::max<long>(1, std::lround((t_hi - t_lo) / step));
    return UniformGrid{n, (t_hi - t_lo) / static_cast<double>(n)};
}

double simpson(const std::vector<double>& samples, double delta) {
    const std::size_t m = samples.size();
    if (m < 3 || m % 2 == 0)
        throw std::invalid_argument("simpson: need an even number of intervals");
    double odd = 0.0, even = 0.0;
    for (std::size_t i = 1; i + 1 < m; i += 2) odd += samples[i];
    for (std::size_t i = 2; i + 1 < m; i += 2) even += samples[i];
    return delta / 3.0 * (samples.front() + samples.back() + 4.0 * odd + 2.0 * even);
}

std::vector<double> cumulative_integral(const std::vector<double>& samples, double delta) {
    const std::size_t m = samples.size();
    std::vector<double> out(m, 0.0);
    std::vector<double> simpson_even(m, 0.0);  // Simpson value at even indices
    for (std::size_t k = 2; k < m; k += 2) {
        simpson_even[k] = simpson_even[k - 2] +
                          delta / 3.0 * (samples[k - 2] + 4.0 * samples[k - 1] + samples[k]);
    }
    for (std::size_t k = 1; k < m; ++k) {
        if (k % 2 == 0) {
            out[k] = simpson_even[k];
        } else if (k >= 3) {
            out[k] = simpson_even[k - 3] +
                     3.0 * delta / 8.0 *
                         (samples[k - 3] + 3.0 * samples[k - 2] + 3.0 * samples[k - 1] + samples[k]);
        } else {
            out[k] = 0.5 * delta * (samples[0] + samples[1]);
        }
    }
    return out;
}

}  // namespace fermiheat
