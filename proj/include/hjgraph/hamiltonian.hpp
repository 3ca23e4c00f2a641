#pragma once

#include "hjgraph/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace hjgraph {

enum class SchemeKind { LaxFriedrichs, OsherSethian };

std::string to_string(SchemeKind kind);
SchemeKind scheme_kind_from_string(const std::string& name);

/// Numerical Hamiltonian for H(xi, P) = I(xi)^{-2} ||P||_xi^2 (kappa = 2).
struct HamiltonianSpec {
    static constexpr double kKappa = 2.0;

    SchemeKind scheme = SchemeKind::LaxFriedrichs;
    double r0 = 1.0;     // radius of the (P, Q) ball on which monotonicity is required
    double gamma = 2.0;  // Lax-Friedrichs viscosity, shared by all edges

    /// gamma defaults to 2 r0.
    static HamiltonianSpec lax_friedrichs(double r0, double gamma = 0.0);
    static HamiltonianSpec osher_sethian(double r0);

    void validate() const;
};

// Edge-local kernels. `c` is I(xi)^{-2} g_{i,j}(xi); p, q are the forward and
// backward quotients on that edge. Sums run over unordered edges i < j.

inline double edge_value(const HamiltonianSpec& spec, double c, double p, double q) {
    if (spec.scheme == SchemeKind::LaxFriedrichs) {
        return c * (0.5 * (p * p + q * q) - spec.gamma * (p - q));
    }
    const double up = std::max(q, 0.0);
    const double down = std::min(p, 0.0);
    return c * (up * up + down * down);
}

inline double edge_dp(const HamiltonianSpec& spec, double c, double p) {
    if (spec.scheme == SchemeKind::LaxFriedrichs) return c * (p - spec.gamma);
    return 2.0 * c * std::min(p, 0.0);
}

inline double edge_dq(const HamiltonianSpec& spec, double c, double q) {
    if (spec.scheme == SchemeKind::LaxFriedrichs) return c * (q + spec.gamma);
    return 2.0 * c * std::max(q, 0.0);
}

/// Second derivatives (d2/dp2, d2/dpdq, d2/dq2) on one edge. The Osher-Sethian
/// indicators use strict inequalities.
struct EdgeHessian {
    double pp = 0.0;
    double pq = 0.0;
    double qq = 0.0;
};

inline EdgeHessian edge_hessian(const HamiltonianSpec& spec, double c, double p, double q) {
    if (spec.scheme == SchemeKind::LaxFriedrichs) return {c, 0.0, c};
    return {p < 0.0 ? 2.0 * c : 0.0, 0.0, q > 0.0 ? 2.0 * c : 0.0};
}

/// I^{-2}(xi) ||P||_xi^2; 0 on the simplex boundary.
double continuous_H(const Graph& graph, MetricKind kind, const SimplexPoint& xi,
                    std::span<const double> p);

double numerical_G(const HamiltonianSpec& spec, const Graph& graph, MetricKind kind,
                   const SimplexPoint& xi, std::span<const double> p, std::span<const double> q);

double dG_dp(const HamiltonianSpec& spec, const Graph& graph, MetricKind kind, const SimplexPoint& xi,
             std::span<const double> p, std::span<const double> q, std::size_t edge);

double dG_dq(const HamiltonianSpec& spec, const Graph& graph, MetricKind kind, const SimplexPoint& xi,
             std::span<const double> p, std::span<const double> q, std::size_t edge);

struct AuditWitness {
    std::string property;
    std::vector<double> xi;
    EdgeValues p;
    EdgeValues q;
    std::size_t edge = 0;
    double value = 0.0;
};

struct AuditReport {
    std::size_t samples = 0;
    double max_consistency_residual = 0.0;  // |G(xi,P,P) - H| / (1 + |H|)
    double max_lipschitz_ratio = 0.0;
    double lipschitz_bound = 0.0;
    double max_hessian_ratio = 0.0;  // max second derivative / (C g_{i,j})
    std::vector<AuditWitness> violations;

    bool ok() const { return violations.empty(); }
};

/// Monte-Carlo audit of monotonicity, consistency, local Lipschitz continuity
/// and bounded nonnegative second derivatives on ||P||_inf, ||Q||_inf <= r0.
AuditReport audit_assumptions(const HamiltonianSpec& spec, const Graph& graph, MetricKind kind,
                              std::size_t samples, std::uint64_t seed = 20240601);

/// Uniform random interior point of the simplex.
template <class Rng>
SimplexPoint random_interior_point(int d, Rng& rng);

}  // namespace hjgraph

#include <random>

namespace hjgraph {

template <class Rng>
SimplexPoint random_interior_point(int d, Rng& rng) {
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> xi(static_cast<std::size_t>(d));
    double sum = 0.0;
    for (auto& v : xi) {
        v = expo(rng) + 1e-300;
        sum += v;
    }
    double head = 0.0;
    for (std::size_t k = 0; k + 1 < xi.size(); ++k) {
        xi[k] /= sum;
        head += xi[k];
    }
    xi.back() = std::max(1.0 - head, 1e-300);
    return SimplexPoint(std::move(xi));
}

}  // namespace hjgraph
