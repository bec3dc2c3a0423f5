#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fermiheat {

struct QuadratureRule {
    std::vector<double> nodes;    // on (0, 1)
    std::vector<double> weights;  // sum to 1
};

// Gauss-Legendre rule mapped to the unit interval (Golub-Welsch).
QuadratureRule gauss_legendre_unit(int n);

// Composite Simpson on a uniform grid; requires an even interval count.
double simpson(const std::vector<double>& samples, double delta);

// Running integral on a uniform grid: Simpson at even indices, Simpson plus a
// 3/8 closure at odd indices >= 3, trapezoid for the very first interval.
std::vector<double> cumulative_integral(const std::vector<double>& samples, double delta);

// Shared uniform-grid policy so that one-particle and Fock trajectories
// sample identical time points.
struct UniformGrid {
    long steps;
    double delta;
};

UniformGrid uniform_grid(double t_lo, double t_hi, double step);

// SplitMix64 step; the basis of all reproducible sampling in this library.
// std::uniform_real_distribution is not bit-stable across standard libraries,
// so random values are always derived from this generator directly.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

}  // namespace fermiheat
