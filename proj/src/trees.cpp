#include "fermiheat/trees.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <stdexcept>

#include "fermiheat/errors.hpp"
#include "fermiheat/numerics.hpp"

namespace fermiheat {

namespace {

const Complex kI(0.0, 1.0);

constexpr int kMaxEntries = 6;
constexpr int kMaxFactorsPerEntry = 4;

struct RawTerm {
    int sign = 1;
    std::vector<SlotRef> slots;
    std::vector<ContractionBond> bonds;
};

// Constructive form of the inductive tree expansion. Entry v+1 is
// commutated from the left against every term of the level-v expansion:
// contracting its slot k2 against slot k1 of a reduced list q contributes
// sign (-1)^{k1+1} and the spliced ordering
//   new[0..k2) ++ q[0..k1) ++ q[k1+1..) ++ new[k2+1..).
std::vector<RawTerm> expand_slots(const std::vector<std::vector<SlotRef>>& vertex_slots) {
    const int n_vertices = static_cast<int>(vertex_slots.size());
    std::vector<RawTerm> terms{RawTerm{1, vertex_slots.front(), {}}};
    for (int v = 2; v <= n_vertices; ++v) {
        const auto& fresh = vertex_slots[static_cast<std::size_t>(v - 1)];
        std::vector<RawTerm> next;
        next.reserve(terms.size() * fresh.size() * 4);
        for (const RawTerm& term : terms) {
            const std::size_t reduced_len = term.slots.size();
            for (std::size_t k2 = 0; k2 < fresh.size(); ++k2) {
                for (std::size_t k1 = 0; k1 < reduced_len; ++k1) {
                    RawTerm out;
                    out.sign = term.sign * ((k1 % 2 == 0) ? 1 : -1);  // (-1)^{k1+1}, 1-based
                    out.slots.reserve(reduced_len + fresh.size() - 2);
                    out.slots.insert(out.slots.end(), fresh.begin(),
                                     fresh.begin() + static_cast<std::ptrdiff_t>(k2));
                    for (std::size_t i = 0; i < reduced_len; ++i)
                        if (i != k1) out.slots.push_back(term.slots[i]);
                    out.slots.insert(out.slots.end(),
                                     fresh.begin() + static_cast<std::ptrdiff_t>(k2) + 1,
                                     fresh.end());
                    out.bonds = term.bonds;
                    out.bonds.push_back(ContractionBond{term.slots[k1], fresh[k2]});
                    next.push_back(std::move(out));
                }
            }
        }
        terms = std::move(next);
    }
    return terms;
}

double site_distance(const Site& a, const Site& b) {
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        sq += diff * diff;
    }
    return std::sqrt(sq);
}

}  // namespace

std::vector<Tree> enumerate_trees(int vertex_count) {
    if (vertex_count < 2) throw std::invalid_argument("enumerate_trees: need at least two vertices");
    std::vector<Tree> trees{Tree{2, {{1, 2}}}};
    for (int n = 3; n <= vertex_count; ++n) {
        std::vector<Tree> next;
        next.reserve(trees.size() * static_cast<std::size_t>(n - 1));
        for (const Tree& tree : trees) {
            for (int k = 1; k < n; ++k) {
                Tree grown = tree;
                grown.vertex_count = n;
                grown.bonds.push_back({k, n});
                next.push_back(std::move(grown));
            }
        }
        trees = std::move(next);
    }
    return trees;
}

Tree TreeTerm::tree() const {
    Tree tree;
    tree.vertex_count = 0;
    for (const auto& bond : bonds) {
        const int lo = std::min(bond.lower.vertex, bond.higher.vertex);
        const int hi = std::max(bond.lower.vertex, bond.higher.vertex);
        tree.bonds.push_back({lo, hi});
        tree.vertex_count = std::max(tree.vertex_count, hi);
    }
    std::sort(tree.bonds.begin(), tree.bonds.end());
    return tree;
}

std::vector<TreeTerm> expand_multicommutator(const std::vector<Monomial>& monomials) {
    const int n_entries = static_cast<int>(monomials.size());
    if (n_entries < 2)
        throw std::invalid_argument("expand_multicommutator: need at least two entries");
    if (n_entries > kMaxEntries)
        throw resource_limit_error("expand_multicommutator: too many entries");
    for (const Monomial& m : monomials) {
        if (m.factors.empty() || m.factors.size() % 2 != 0)
            throw std::invalid_argument("expand_multicommutator: entries need even nonzero length");
        if (static_cast<int>(m.factors.size()) > kMaxFactorsPerEntry)
            throw resource_limit_error("expand_multicommutator: entry monomial too long");
    }

    // Vertex 1 is the innermost entry, i.e. the last element of the input.
    std::vector<std::vector<SlotRef>> vertex_slots(static_cast<std::size_t>(n_entries));
    for (int v = 1; v <= n_entries; ++v) {
        const Monomial& m = monomials[static_cast<std::size_t>(n_entries - v)];
        auto& slots = vertex_slots[static_cast<std::size_t>(v - 1)];
        slots.reserve(m.factors.size());
        for (int f = 0; f < static_cast<int>(m.factors.size()); ++f)
            slots.push_back(SlotRef{v, f, m.factors[static_cast<std::size_t>(f)].kind});
    }

    auto factor_of = [&](const SlotRef& slot) -> const MonomialFactor& {
        return monomials[static_cast<std::size_t>(n_entries - slot.vertex)]
            .factors[static_cast<std::size_t>(slot.factor)];
    };

    std::vector<TreeTerm> terms;
    for (RawTerm& raw : expand_slots(vertex_slots)) {
        TreeTerm term;
        term.sign = raw.sign;
        term.scalar = Complex(1.0);
        for (const auto& bond : raw.bonds)
            term.scalar *= anticommutator_scalar(factor_of(bond.lower), factor_of(bond.higher));
        term.reduced_slots = std::move(raw.slots);
        term.reduced.factors.reserve(term.reduced_slots.size());
        for (const SlotRef& slot : term.reduced_slots) term.reduced.factors.push_back(factor_of(slot));
        term.bonds = std::move(raw.bonds);
        terms.push_back(std::move(term));
    }
    return terms;
}

Complex anticommutator_scalar(const MonomialFactor& a, const MonomialFactor& b) {
    if (a.kind == b.kind) return Complex(0.0);
    // {a(psi), a*(phi)} = <psi, phi>, symmetric in the two arguments
    const MonomialFactor& annih = (a.kind == FactorKind::Annihilation) ? a : b;
    const MonomialFactor& creat = (a.kind == FactorKind::Annihilation) ? b : a;
    return annih.wavefunction.dot(creat.wavefunction);
}

Complex anticommutator_scalar(const MonomialFactor& a, const MonomialFactor& b,
                              const SpectralDecomposition& h, double s_a, double s_b) {
    if (a.kind == b.kind) return Complex(0.0);
    MonomialFactor ea{a.kind, h.evolve(s_a, a.wavefunction)};
    MonomialFactor eb{b.kind, h.evolve(s_b, b.wavefunction)};
    return anticommutator_scalar(ea, eb);
}

long contraction_map_count(const Tree& tree, const std::vector<int>& factors_per_vertex) {
    long count = 1;
    for (const auto& [i, j] : tree.bonds) {
        count *= factors_per_vertex[static_cast<std::size_t>(i - 1)];
        count *= factors_per_vertex[static_cast<std::size_t>(j - 1)];
    }
    return count;
}

double tree_decay_envelope(double epsilon, const std::vector<Site>& positions) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("tree_decay_envelope: epsilon must be > 0");
    const int n = static_cast<int>(positions.size());
    if (n < 2) throw std::invalid_argument("tree_decay_envelope: need at least two positions");
    const int d = static_cast<int>(positions.front().size());
    double total = 0.0;
    for (const Tree& tree : enumerate_trees(n)) {
        double product = 1.0;
        for (const auto& [i, j] : tree.bonds) {
            const double r = site_distance(positions[static_cast<std::size_t>(i - 1)],
                                           positions[static_cast<std::size_t>(j - 1)]);
            product /= 1.0 + std::pow(r, d + epsilon);
        }
        total += product;
    }
    return total;
}

std::vector<TreeDecaySample> draw_tree_decay_samples(const LatticeBox& box, int order, int count,
                                                     double t_lo, double t_hi, std::uint64_t seed) {
    if (order < 2) throw std::invalid_argument("draw_tree_decay_samples: order must be >= 2");
    std::uint64_t state = seed ^ 0xd6e8feb86659fd93ULL;
    std::vector<TreeDecaySample> samples;
    samples.reserve(static_cast<std::size_t>(count));
    const int d = box.dimension();
    long attempts = 0;
    while (static_cast<int>(samples.size()) < count) {
        if (++attempts > 1000L * count)
            throw std::invalid_argument("draw_tree_decay_samples: box has too few interior bonds");
        TreeDecaySample sample;
        bool ok = true;
        for (int i = 0; i < order; ++i) {
            sample.times.push_back(t_lo + (t_hi - t_lo) * uniform01(state));
            const int site_index = static_cast<int>(uniform01(state) * box.size());
            const Site x = box.site(std::min(site_index, box.size() - 1));
            Site z(static_cast<std::size_t>(d), 0);
            const int axis = static_cast<int>(uniform01(state) * d) % d;
            z[static_cast<std::size_t>(axis)] = (uniform01(state) < 0.5) ? -1 : 1;
            Site y = x;
            y[static_cast<std::size_t>(axis)] += z[static_cast<std::size_t>(axis)];
            if (!box.index_of(y)) {
                ok = false;
                break;
            }
            sample.sites.push_back(x);
            sample.hops.push_back(z);
        }
        if (ok) samples.push_back(std::move(sample));
    }
    return samples;
}

std::string TreeDecayReport::to_csv() const {
    std::string out = "expectation_abs,envelope,required_constant\n";
    char line[128];
    for (const auto& row : rows) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", row.expectation_abs, row.envelope,
                      row.required_constant);
        out += line;
    }
    return out;
}

TreeDecayReport check_tree_decay_bound(const SymbolMatrix& symbol, const HermitianOperator& h,
                                       double epsilon,
                                       const std::vector<TreeDecaySample>& samples) {
    SpectralDecomposition spectral(h);
    const int n = h.box.size();
    TreeDecayReport report;
    report.epsilon = epsilon;
    for (const TreeDecaySample& sample : samples) {
        const int order = static_cast<int>(sample.sites.size());
        std::vector<Monomial> entries(static_cast<std::size_t>(order));
        for (int i = 0; i < order; ++i) {
            const Site& x = sample.sites[static_cast<std::size_t>(i)];
            Site y = x;
            for (int c = 0; c < h.box.dimension(); ++c)
                y[static_cast<std::size_t>(c)] += sample.hops[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
            Eigen::VectorXcd ex = Eigen::VectorXcd::Zero(n);
            Eigen::VectorXcd ey = Eigen::VectorXcd::Zero(n);
            ex[*h.box.index_of(x)] = 1.0;
            ey[*h.box.index_of(y)] = 1.0;
            const double s = sample.times[static_cast<std::size_t>(i)];
            entries[static_cast<std::size_t>(i)].factors = {
                MonomialFactor{FactorKind::Creation, spectral.evolve(s, ex)},
                MonomialFactor{FactorKind::Annihilation, spectral.evolve(s, ey)}};
        }
        Complex expectation(0.0);
        for (const TreeTerm& term : expand_multicommutator(entries)) {
            if (term.scalar == Complex(0.0)) continue;
            expectation +=
                double(term.sign) * term.scalar * wick_expectation(symbol, term.reduced);
        }
        const double envelope = tree_decay_envelope(epsilon, sample.sites);
        TreeDecayReport::Row row;
        row.expectation_abs = std::abs(expectation);
        row.envelope = envelope;
        row.required_constant =
            std::pow(row.expectation_abs / envelope, 1.0 / static_cast<double>(order - 1));
        report.rows.push_back(row);
        report.fitted_constant = std::max(report.fitted_constant, row.required_constant);
    }
    return report;
}

// --- heat-series evaluation ------------------------------------------------

namespace {

// Structural expansion of a multicommutator of hopping bilinears: vertex v
// carries one creation and one annihilation slot standing for
// sum_{x,y} C_v(x,y) a^*(...x) a(...y). Only kind-alternating contractions
// survive, so every surviving pattern is a cycle through all vertices; its
// value is a trace of per-vertex coefficient matrices joined by kernels that
// are diagonal in the eigenbasis of h.
struct CyclePattern {
    int sign = 0;
    struct Edge {
        int an_vertex;   // annihilation side
        int cr_vertex;   // creation side
        bool is_wick;    // closing edge through the state
        bool wick_hole;  // wick edge of the a a^* kind: weight 1-f instead of f
    };
    std::vector<Edge> cycle;  // directed an -> cr, starting at vertex 1
};

std::vector<CyclePattern> bilinear_patterns(int n_vertices) {
    std::vector<std::vector<SlotRef>> vertex_slots(static_cast<std::size_t>(n_vertices));
    for (int v = 1; v <= n_vertices; ++v)
        vertex_slots[static_cast<std::size_t>(v - 1)] = {
            SlotRef{v, 0, FactorKind::Creation}, SlotRef{v, 1, FactorKind::Annihilation}};

    std::vector<CyclePattern> patterns;
    for (const RawTerm& term : expand_slots(vertex_slots)) {
        bool compatible = term.slots.size() == 2 &&
                          term.slots[0].kind != term.slots[1].kind;
        for (const auto& bond : term.bonds)
            compatible = compatible && bond.lower.kind != bond.higher.kind;
        if (!compatible) continue;

        // Slot -> edge map; edge stores which side is the annihilation slot.
        struct EdgeInfo {
            int an_vertex, cr_vertex;
            bool is_wick, wick_hole;
        };
        std::vector<EdgeInfo> edges;
        for (const auto& bond : term.bonds) {
            const bool lower_an = bond.lower.kind == FactorKind::Annihilation;
            edges.push_back(EdgeInfo{lower_an ? bond.lower.vertex : bond.higher.vertex,
                                     lower_an ? bond.higher.vertex : bond.lower.vertex, false,
                                     false});
        }
        {
            const bool first_cr = term.slots[0].kind == FactorKind::Creation;
            const SlotRef& an = first_cr ? term.slots[1] : term.slots[0];
            const SlotRef& cr = first_cr ? term.slots[0] : term.slots[1];
            // rho(a^* a) carries the symbol f, rho(a a^*) carries 1 - f
            edges.push_back(EdgeInfo{an.vertex, cr.vertex, true, !first_cr});
        }

        // Walk the cycle an -> cr starting from vertex 1's annihilation slot.
        CyclePattern pattern;
        pattern.sign = term.sign;
        std::vector<bool> used(edges.size(), false);
        int current = 1;
        for (std::size_t step = 0; step < edges.size(); ++step) {
            int found = -1;
            for (std::size_t e = 0; e < edges.size(); ++e)
                if (!used[e] && edges[e].an_vertex == current) found = static_cast<int>(e);
            if (found < 0) {  // not a single cycle; cannot happen for valid terms
                pattern.cycle.clear();
                break;
            }
            used[static_cast<std::size_t>(found)] = true;
            const EdgeInfo& e = edges[static_cast<std::size_t>(found)];
            pattern.cycle.push_back(CyclePattern::Edge{e.an_vertex, e.cr_vertex, e.is_wick, e.wick_hole});
            current = e.cr_vertex;
        }
        if (pattern.cycle.size() == edges.size() && current == 1)
            patterns.push_back(std::move(pattern));
    }
    return patterns;
}

const std::vector<CyclePattern>& cached_bilinear_patterns(int n_vertices) {
    static std::mutex mutex;
    static std::map<int, std::vector<CyclePattern>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n_vertices);
    if (it == cache.end()) it = cache.emplace(n_vertices, bilinear_patterns(n_vertices)).first;
    return it->second;
}

// Evaluates i^k * sum over patterns of sign * Tr(chain) for the vertex data
// (coefficient matrices in the h eigenbasis, evolution times sigma). The
// chain is C_1 K_1 C_{v2} K_2 ... K_last traced, kernels diagonal.
double evaluate_patterns(int k, const std::vector<Eigen::MatrixXcd>& coeff,
                         const std::vector<double>& sigma, const Eigen::VectorXd& energies,
                         const Eigen::VectorXd& occupation) {
    const int n = static_cast<int>(energies.size());
    Complex total(0.0);
    Eigen::VectorXcd kernel(n);
    for (const CyclePattern& pattern : cached_bilinear_patterns(k + 1)) {
        Eigen::MatrixXcd acc = coeff[0];  // walk begins at vertex 1
        Complex value(0.0);
        for (const auto& edge : pattern.cycle) {
            const double dt = sigma[static_cast<std::size_t>(edge.cr_vertex - 1)] -
                              sigma[static_cast<std::size_t>(edge.an_vertex - 1)];
            for (int m = 0; m < n; ++m) {
                Complex kv = std::exp(kI * (dt * energies[m]));
                if (edge.is_wick)
                    kv *= edge.wick_hole ? (1.0 - occupation[m]) : occupation[m];
                kernel[m] = kv;
            }
            if (edge.cr_vertex == 1) {  // closing edge: trace against the diagonal
                value = acc.diagonal().cwiseProduct(kernel).sum();
                break;
            }
            acc = acc * (kernel.asDiagonal() * coeff[static_cast<std::size_t>(edge.cr_vertex - 1)]);
        }
        total += double(pattern.sign) * value;
    }
    Complex phase(1.0);
    for (int j = 0; j < k; ++j) phase *= kI;
    return (phase * total).real();
}

struct VertexData {
    std::vector<Eigen::MatrixXcd> coeff;
    std::vector<double> sigma;
};

}  // namespace

double heat_series_coefficient(int k, const std::vector<double>& times, double t,
                               const HermitianOperator& h, const SymbolMatrix& fermi,
                               const VectorPotentialSpec& potential) {
    if (k < 1) throw std::invalid_argument("heat_series_coefficient: k must be >= 1");
    if (static_cast<int>(times.size()) != k)
        throw std::invalid_argument("heat_series_coefficient: need k times");
    const double t0 = potential.t0;
    double previous = t;
    for (double s : times) {
        if (s > previous || s < t0)
            throw std::invalid_argument("heat_series_coefficient: times must satisfy t0 <= s_k <= ... <= s_1 <= t");
        previous = s;
    }

    SpectralDecomposition spectral(h);
    const Eigen::MatrixXcd fermi_eigen =
        spectral.eigenvectors().adjoint() * fermi.entries * spectral.eigenvectors();
    const Eigen::VectorXd occupation = fermi_eigen.diagonal().real();

    VertexData data;
    data.coeff.resize(static_cast<std::size_t>(k + 1));
    data.sigma.resize(static_cast<std::size_t>(k + 1));
    data.coeff[0] = spectral.eigenvalues().cast<Complex>().asDiagonal();
    data.sigma[0] = t - t0;
    for (int j = 1; j <= k; ++j) {
        const double s = times[static_cast<std::size_t>(j - 1)];
        const Eigen::MatrixXcd w = field_energy_operator(h.box, potential, s).entries;
        data.coeff[static_cast<std::size_t>(j)] =
            spectral.eigenvectors().adjoint() * w * spectral.eigenvectors();
        data.sigma[static_cast<std::size_t>(j)] = s - t0;
    }
    return evaluate_patterns(k, data.coeff, data.sigma, spectral.eigenvalues(), occupation);
}

std::string HeatSeriesResult::to_csv() const {
    std::string out = "order,value,grid_steps\n";
    char line[96];
    for (std::size_t k = 0; k < per_order.size(); ++k) {
        std::snprintf(line, sizeof(line), "%zu,%.17g,%d\n", k + 1, per_order[k], grid_steps[k]);
        out += line;
    }
    return out;
}

HeatSeriesResult heat_series_sum(int truncation_order, int base_grid_steps,
                                 const HermitianOperator& h, const SymbolMatrix& fermi,
                                 const VectorPotentialSpec& potential, double t) {
    if (truncation_order < 1) throw std::invalid_argument("heat_series_sum: K must be >= 1");
    if (base_grid_steps < 2) throw std::invalid_argument("heat_series_sum: grid too coarse");
    const double t0 = potential.t0;
    if (!(t > t0)) {
        HeatSeriesResult empty;
        empty.per_order.assign(static_cast<std::size_t>(truncation_order), 0.0);
        empty.grid_steps.assign(static_cast<std::size_t>(truncation_order), 0);
        return empty;
    }

    SpectralDecomposition spectral(h);
    const Eigen::MatrixXcd fermi_eigen =
        spectral.eigenvectors().adjoint() * fermi.entries * spectral.eigenvectors();
    const Eigen::VectorXd occupation = fermi_eigen.diagonal().real();

    HeatSeriesResult result;
    for (int k = 1; k <= truncation_order; ++k) {
        const int m = std::max(8, base_grid_steps >> (k - 1));
        const double delta = (t - t0) / m;

        // field coefficient matrices on the shared grid, in the eigenbasis
        std::vector<Eigen::MatrixXcd> w_grid(static_cast<std::size_t>(m + 1));
        for (int i = 0; i <= m; ++i) {
            const Eigen::MatrixXcd w = field_energy_operator(h.box, potential, t0 + i * delta).entries;
            w_grid[static_cast<std::size_t>(i)] =
                spectral.eigenvectors().adjoint() * w * spectral.eigenvectors();
        }

        std::vector<Eigen::MatrixXcd> coeff(static_cast<std::size_t>(k + 1));
        std::vector<double> sigma(static_cast<std::size_t>(k + 1));
        coeff[0] = spectral.eigenvalues().cast<Complex>().asDiagonal();
        sigma[0] = t - t0;

        double order_value = 0.0;
        // nested trapezoid over t0 <= s_k <= ... <= s_1 <= t on grid indices
        std::function<void(int, int, double)> recurse = [&](int level, int upper, double weight) {
            if (level == k) {
                order_value += weight * evaluate_patterns(k, coeff, sigma, spectral.eigenvalues(),
                                                          occupation);
                return;
            }
            if (upper == 0) return;  // zero-length inner integral
            for (int i = 0; i <= upper; ++i) {
                const double w = delta * ((i == 0 || i == upper) ? 0.5 : 1.0);
                coeff[static_cast<std::size_t>(level + 1)] = w_grid[static_cast<std::size_t>(i)];
                sigma[static_cast<std::size_t>(level + 1)] = i * delta;
                recurse(level + 1, i, weight * w);
            }
        };
        recurse(0, m, 1.0);

        result.per_order.push_back(order_value);
        result.grid_steps.push_back(m);
        result.total += order_value;
    }
    return result;
}

}  // namespace fermiheat
