#include "hjgraph/hamiltonian.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace hjgraph {

std::string to_string(SchemeKind kind) {
    return kind == SchemeKind::LaxFriedrichs ? "lax_friedrichs" : "osher_sethian";
}

SchemeKind scheme_kind_from_string(const std::string& name) {
    if (name == "lax_friedrichs") return SchemeKind::LaxFriedrichs;
    if (name == "osher_sethian") return SchemeKind::OsherSethian;
    throw std::invalid_argument("unknown scheme kind '" + name + "'");
}

HamiltonianSpec HamiltonianSpec::lax_friedrichs(double r0, double gamma) {
    HamiltonianSpec spec{SchemeKind::LaxFriedrichs, r0, gamma > 0.0 ? gamma : 2.0 * r0};
    spec.validate();
    return spec;
}

HamiltonianSpec HamiltonianSpec::osher_sethian(double r0) {
    HamiltonianSpec spec{SchemeKind::OsherSethian, r0, 2.0 * r0};
    spec.validate();
    return spec;
}

void HamiltonianSpec::validate() const {
    if (!(r0 > 0.0) || !std::isfinite(r0)) throw std::invalid_argument("scheme r0 must be > 0");
    if (scheme == SchemeKind::LaxFriedrichs && (!(gamma > 0.0) || !std::isfinite(gamma))) {
        throw std::invalid_argument("Lax-Friedrichs gamma must be > 0");
    }
}

namespace {

void check_edge_vector(const Graph& graph, std::span<const double> v) {
    if (v.size() != graph.num_edges()) {
        throw std::invalid_argument("edge vector length does not match the edge count");
    }
}

double edge_coefficient(const Graph& graph, MetricKind kind, const SimplexPoint& xi, std::size_t e,
                        double inv_sq) {
    const Edge& edge = graph.edges()[e];
    return inv_sq * metric_weight(kind, xi[static_cast<std::size_t>(edge.i)],
                                  xi[static_cast<std::size_t>(edge.j)]);
}

}  // namespace

double continuous_H(const Graph& graph, MetricKind kind, const SimplexPoint& xi,
                    std::span<const double> p) {
    const double inv_sq = inv_sum_neg_sq(xi);
    if (inv_sq == 0.0) return 0.0;
    return inv_sq * xi_norm_sq(graph, kind, xi, p);
}

double numerical_G(const HamiltonianSpec& spec, const Graph& graph, MetricKind kind,
                   const SimplexPoint& xi, std::span<const double> p, std::span<const double> q) {
    check_edge_vector(graph, p);
    check_edge_vector(graph, q);
    const double inv_sq = inv_sum_neg_sq(xi);
    if (inv_sq == 0.0) return 0.0;
    double sum = 0.0;
    for (std::size_t e = 0; e < graph.num_edges(); ++e) {
        sum += edge_value(spec, edge_coefficient(graph, kind, xi, e, inv_sq), p[e], q[e]);
    }
    return sum;
}

double dG_dp(const HamiltonianSpec& spec, const Graph& graph, MetricKind kind, const SimplexPoint& xi,
             std::span<const double> p, std::span<const double> q, std::size_t edge) {
    check_edge_vector(graph, p);
    check_edge_vector(graph, q);
    return edge_dp(spec, edge_coefficient(graph, kind, xi, edge, inv_sum_neg_sq(xi)), p[edge]);
}

double dG_dq(const HamiltonianSpec& spec, const Graph& graph, MetricKind kind, const SimplexPoint& xi,
             std::span<const double> p, std::span<const double> q, std::size_t edge) {
    check_edge_vector(graph, p);
    check_edge_vector(graph, q);
    return edge_dq(spec, edge_coefficient(graph, kind, xi, edge, inv_sum_neg_sq(xi)), q[edge]);
}

AuditReport audit_assumptions(const HamiltonianSpec& spec, const Graph& graph, MetricKind kind,
                              std::size_t samples, std::uint64_t seed) {
    spec.validate();
    AuditReport report;
    report.samples = samples;
    const std::size_t ne = graph.num_edges();
    const double d4 = std::pow(static_cast<double>(graph.d()), 4.0);
    // sup I^{-2} = d^{-4} (attained at the barycentre) and g <= 1.
    const double hessian_c = 2.0 / d4;
    const double slope = spec.scheme == SchemeKind::LaxFriedrichs ? (spec.r0 + spec.gamma) : 2.0 * spec.r0;
    report.lipschitz_bound = slope / d4 * std::sqrt(static_cast<double>(ne));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ball(-spec.r0, spec.r0);
    auto draw = [&](EdgeValues& v) {
        v.resize(ne);
        for (auto& x : v) x = ball(rng);
    };

    auto witness = [&](const std::string& property, const SimplexPoint& xi, const EdgeValues& p,
                       const EdgeValues& q, std::size_t e, double value) {
        report.violations.push_back(
            AuditWitness{property, std::vector<double>(xi.values().begin(), xi.values().end()), p, q, e, value});
    };

    EdgeValues p, q, p2, q2;
    for (std::size_t n = 0; n < samples; ++n) {
        const SimplexPoint xi = random_interior_point(graph.d(), rng);
        draw(p);
        draw(q);
        draw(p2);
        draw(q2);
        const double inv_sq = inv_sum_neg_sq(xi);

        for (std::size_t e = 0; e < ne; ++e) {
            const double c = edge_coefficient(graph, kind, xi, e, inv_sq);
            const double dp = edge_dp(spec, c, p[e]);
            const double dq = edge_dq(spec, c, q[e]);
            if (dp > 0.0) witness("monotonicity_p", xi, p, q, e, dp);
            if (dq < 0.0) witness("monotonicity_q", xi, p, q, e, dq);

            const EdgeHessian hess = edge_hessian(spec, c, p[e], q[e]);
            const double g = metric_weight(kind, xi[static_cast<std::size_t>(graph.edges()[e].i)],
                                           xi[static_cast<std::size_t>(graph.edges()[e].j)]);
            for (double entry : {hess.pp, hess.pq, hess.qq}) {
                if (entry < 0.0) witness("hessian_negative", xi, p, q, e, entry);
                if (g > 0.0) {
                    const double ratio = entry / (hessian_c * g);
                    report.max_hessian_ratio = std::max(report.max_hessian_ratio, ratio);
                    if (ratio > 1.0 + 1e-12) witness("hessian_bound", xi, p, q, e, entry);
                }
            }
        }

        const double h_val = continuous_H(graph, kind, xi, p);
        const double residual = std::abs(numerical_G(spec, graph, kind, xi, p, p) - h_val) / (1.0 + std::abs(h_val));
        report.max_consistency_residual = std::max(report.max_consistency_residual, residual);
        if (residual > 1e-12) witness("consistency", xi, p, p, 0, residual);

        double dist = 0.0;
        double dp_norm = 0.0;
        double dq_norm = 0.0;
        for (std::size_t e = 0; e < ne; ++e) {
            dp_norm += (p[e] - p2[e]) * (p[e] - p2[e]);
            dq_norm += (q[e] - q2[e]) * (q[e] - q2[e]);
        }
        dist = std::sqrt(dp_norm) + std::sqrt(dq_norm);
        if (dist > 0.0) {
            const double ratio = std::abs(numerical_G(spec, graph, kind, xi, p, q) -
                                          numerical_G(spec, graph, kind, xi, p2, q2)) / dist;
            if (!std::isfinite(ratio)) {
                witness("lipschitz_nonfinite", xi, p, q, 0, ratio);
            } else {
                report.max_lipschitz_ratio = std::max(report.max_lipschitz_ratio, ratio);
                if (ratio > report.lipschitz_bound * (1.0 + 1e-9)) witness("lipschitz_bound", xi, p, q, 0, ratio);
            }
        }
    }
    return report;
}

}  // namespace hjgraph
