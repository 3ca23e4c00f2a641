#pragma once

// Seeded generators and small oracles shared by the unit tests.

#include "hjgraph/graph.hpp"
#include "hjgraph/lattice.hpp"
#include "hjgraph/scheme.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace hjgraph::testing {

inline std::mt19937_64 rng(std::uint64_t seed = 12345) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline std::vector<double> uniform_vector(std::mt19937_64& g, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(g, lo, hi);
    return v;
}

inline Field random_field(const std::shared_ptr<const Lattice>& lattice, std::mt19937_64& g, double lo,
                          double hi) {
    return Field(lattice, uniform_vector(g, lattice->size(), lo, hi));
}

/// Smooth field: sum_k a_k sin(b_k xi_k + c_k).
inline Field smooth_field(const std::shared_ptr<const Lattice>& lattice, std::mt19937_64& g) {
    const auto d = static_cast<std::size_t>(lattice->d());
    const auto a = uniform_vector(g, d, -1.0, 1.0);
    const auto b = uniform_vector(g, d, 0.5, 3.0);
    const auto c = uniform_vector(g, d, 0.0, 3.0);
    Field f(lattice);
    for (std::size_t s = 0; s < lattice->size(); ++s) {
        const SimplexPoint xi = lattice->xi(s);
        double v = 0.0;
        for (std::size_t k = 0; k < d; ++k) v += a[k] * std::sin(b[k] * xi[k] + c[k]);
        f[s] = v;
    }
    return f;
}

inline SolverConfig base_config(int d = 2, int N = 16) {
    SolverConfig c;
    c.graph = Graph::complete(d);
    c.N = N;
    c.hamiltonian = HamiltonianSpec::lax_friedrichs(3.0);
    return c;
}

/// Site holding the given integer cumulative coordinates.
inline std::size_t site_at(const Lattice& lattice, std::vector<int> coords) { return *lattice.find(coords); }

}  // namespace hjgraph::testing
