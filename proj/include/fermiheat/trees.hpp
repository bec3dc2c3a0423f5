#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fermiheat/lattice.hpp"
#include "fermiheat/onebody.hpp"
#include "fermiheat/quasifree.hpp"

namespace fermiheat {

// Tree on vertices 1..N in which N is a leaf and removing N, N-1, ... always
// removes a leaf. Bonds are stored as (i,j) with i < j.
struct Tree {
    int vertex_count = 0;
    std::vector<std::pair<int, int>> bonds;
};

// Recursive family: one tree on two vertices, and every tree on N vertices
// arises by attaching N to some vertex of a tree on N-1. |trees(N)| = (N-1)!.
std::vector<Tree> enumerate_trees(int vertex_count);

// A slot inside the multicommutator: which entry (vertex, 1 = innermost),
// which factor of that entry, and its kind.
struct SlotRef {
    int vertex = 0;
    int factor = 0;
    FactorKind kind = FactorKind::Creation;
};

struct ContractionBond {
    SlotRef lower;   // pick from the earlier entry
    SlotRef higher;  // pick from the later entry
};

// One term of the tree expansion: sign * scalar * reduced monomial, with the
// tree read off the bonds. Terms whose contracted slots would collide carry
// sign zero and are never produced; same-kind picks are kept with scalar 0.
struct TreeTerm {
    int sign = 0;
    Complex scalar{0.0, 0.0};
    Monomial reduced;
    std::vector<SlotRef> reduced_slots;
    std::vector<ContractionBond> bonds;

    Tree tree() const;
};

// Expands the right-nested multicommutator of the given monomials into tree
// terms; monomials[0] is the outermost entry, so vertex labels count from
// the innermost (vertex 1 = monomials.back()). The reconstruction
// sum_terms sign * scalar * reduced equals the multicommutator. Guarded at
// six entries of at most four factors each.
std::vector<TreeTerm> expand_multicommutator(const std::vector<Monomial>& monomials);

// {a(psi), a*(phi)} = <psi, phi>; same-kind pairs vanish.
Complex anticommutator_scalar(const MonomialFactor& a, const MonomialFactor& b);

// Same, with both wavefunctions first evolved by exp(i s h).
Complex anticommutator_scalar(const MonomialFactor& a, const MonomialFactor& b,
                              const SpectralDecomposition& h, double s_a, double s_b);

// Number of formal contraction maps of a tree: product over bonds of the
// slot counts at both ends (collisions included).
long contraction_map_count(const Tree& tree, const std::vector<int>& factors_per_vertex);

// v_N = sum over trees of prod over bonds 1/(1 + |x_k - x_l|^{d+eps}).
double tree_decay_envelope(double epsilon, const std::vector<Site>& positions);

struct TreeDecaySample {
    std::vector<double> times;  // s_i
    std::vector<Site> sites;    // x_i
    std::vector<Site> hops;     // z_i with |z_i| = 1
};

std::vector<TreeDecaySample> draw_tree_decay_samples(const LatticeBox& box, int order, int count,
                                                     double t_lo, double t_hi, std::uint64_t seed);

struct TreeDecayReport {
    struct Row {
        double expectation_abs;
        double envelope;
        double required_constant;  // (|expectation| / envelope)^{1/(N-1)}
    };
    std::vector<Row> rows;
    double fitted_constant = 0.0;  // max over rows
    double epsilon = 0.0;

    std::string to_csv() const;
};

// Evaluates |state expectation of the N-fold multicommutator of evolved
// hopping bilinears| per sample, via the tree expansion plus Wick, and the
// constant needed for the envelope to dominate.
TreeDecayReport check_tree_decay_bound(const SymbolMatrix& symbol, const HermitianOperator& h,
                                       double epsilon,
                                       const std::vector<TreeDecaySample>& samples);

// Heat-energy coefficient u_k(s_1,...,s_k,t): the field term at each time is
// expanded into evolved hopping bilinears, the (k+1)-fold multicommutator
// into tree terms, and the Wick pairings against the Fermi symbol; the bond
// sums collapse to matrix chains in the eigenbasis of h. Times must satisfy
// t0 <= s_k <= ... <= s_1 <= t.
double heat_series_coefficient(int k, const std::vector<double>& times, double t,
                               const HermitianOperator& h, const SymbolMatrix& fermi,
                               const VectorPotentialSpec& potential);

struct HeatSeriesResult {
    double total = 0.0;
    std::vector<double> per_order;      // simplex-integrated u_k, k = 1..K
    std::vector<int> grid_steps;        // trapezoid resolution used per order

    std::string to_csv() const;
};

// Sum over k <= K of the simplex-integrated u_k by nested composite
// trapezoid. The grid is geometrically coarsened per order from
// base_grid_steps (cost control; resolutions are reported).
HeatSeriesResult heat_series_sum(int truncation_order, int base_grid_steps,
                                 const HermitianOperator& h, const SymbolMatrix& fermi,
                                 const VectorPotentialSpec& potential, double t);

}  // namespace fermiheat
