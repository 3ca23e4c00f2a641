#include "hjgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace hjgraph {

Graph::Graph(std::vector<std::vector<double>> omega) {
    d_ = static_cast<int>(omega.size());
    if (d_ < 2) {
        throw std::invalid_argument("graph needs at least 2 vertices");
    }
    omega_.assign(static_cast<std::size_t>(d_ * d_), 0.0);
    for (int i = 0; i < d_; ++i) {
        if (static_cast<int>(omega[static_cast<std::size_t>(i)].size()) != d_) {
            throw std::invalid_argument("omega must be a square matrix");
        }
        for (int j = 0; j < d_; ++j) {
            const double w = omega[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (!std::isfinite(w) || w < 0.0) {
                throw std::invalid_argument("omega entries must be finite and nonnegative");
            }
            omega_[static_cast<std::size_t>(i * d_ + j)] = w;
        }
    }
    for (int i = 0; i < d_; ++i) {
        if (omega_[static_cast<std::size_t>(i * d_ + i)] != 0.0) {
            throw std::invalid_argument("omega must have a zero diagonal (no self-loops)");
        }
        for (int j = i + 1; j < d_; ++j) {
            const double w = this->omega(i, j);
            if (w != this->omega(j, i)) {
                throw std::invalid_argument("omega must be symmetric");
            }
            if (w > 0.0) {
                edges_.push_back(Edge{i, j, w, std::sqrt(w)});
            }
        }
    }

    std::vector<bool> seen(static_cast<std::size_t>(d_), false);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = true;
    int reached = 1;
    while (!frontier.empty()) {
        const int v = frontier.front();
        frontier.pop();
        for (int u = 0; u < d_; ++u) {
            if (!seen[static_cast<std::size_t>(u)] && this->omega(v, u) > 0.0) {
                seen[static_cast<std::size_t>(u)] = true;
                ++reached;
                frontier.push(u);
            }
        }
    }
    if (reached != d_) {
        throw std::invalid_argument("graph must be connected");
    }
}

Graph Graph::two_node(double weight) { return complete(2, weight); }

Graph Graph::triangle(double weight) { return complete(3, weight); }

Graph Graph::complete(int d, double weight) {
    std::vector<std::vector<double>> w(static_cast<std::size_t>(d),
                                       std::vector<double>(static_cast<std::size_t>(d), weight));
    for (int i = 0; i < d; ++i) {
        w[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 0.0;
    }
    return Graph(std::move(w));
}

std::vector<std::vector<double>> Graph::omega_matrix() const {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(d_));
    for (int i = 0; i < d_; ++i) {
        for (int j = 0; j < d_; ++j) {
            out[static_cast<std::size_t>(i)].push_back(omega(i, j));
        }
    }
    return out;
}

std::string to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::Average: return "average";
        case MetricKind::Logarithmic: return "logarithmic";
        case MetricKind::Harmonic: return "harmonic";
    }
    return "unknown";
}

MetricKind metric_kind_from_string(const std::string& name) {
    if (name == "average") return MetricKind::Average;
    if (name == "logarithmic") return MetricKind::Logarithmic;
    if (name == "harmonic") return MetricKind::Harmonic;
    throw std::invalid_argument("unknown metric kind '" + name + "'");
}

SimplexPoint::SimplexPoint(std::vector<double> xi) : xi_(std::move(xi)) {
    if (xi_.size() < 2) {
        throw std::invalid_argument("simplex point needs at least 2 coordinates");
    }
    double sum = 0.0;
    for (double v : xi_) {
        if (!(v >= 0.0)) {
            throw std::invalid_argument("simplex point coordinates must be nonnegative");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
        throw std::invalid_argument("simplex point coordinates must sum to 1");
    }
}

bool SimplexPoint::on_boundary() const noexcept {
    return std::any_of(xi_.begin(), xi_.end(), [](double v) { return v == 0.0; });
}

double metric_weight(MetricKind kind, double t, double r) {
    if (!(t >= 0.0) || !(r >= 0.0)) {
        throw std::domain_error("metric_weight requires nonnegative arguments");
    }
    switch (kind) {
        case MetricKind::Average:
            return 0.5 * (t + r);
        case MetricKind::Logarithmic: {
            if (t == 0.0 || r == 0.0) return 0.0;
            const double hi = std::max(t, r);
            const double lo = std::min(t, r);
            const double diff = hi - lo;
            if (diff <= 1e-8 * hi) {
                // ln t - ln r cancels catastrophically here; second-order series.
                const double mean = 0.5 * (hi + lo);
                return mean - diff * diff / (12.0 * mean);
            }
            if (diff <= lo) {
                return diff / std::log1p(diff / lo);
            }
            return diff / (std::log(hi) - std::log(lo));
        }
        case MetricKind::Harmonic:
            if (t == 0.0 || r == 0.0) return 0.0;
            return 2.0 / (1.0 / t + 1.0 / r);
    }
    return 0.0;
}

EdgeValues edge_metric_weights(const Graph& graph, MetricKind kind, const SimplexPoint& xi) {
    EdgeValues g;
    g.reserve(graph.num_edges());
    for (const Edge& e : graph.edges()) {
        g.push_back(metric_weight(kind, xi[static_cast<std::size_t>(e.i)],
                                  xi[static_cast<std::size_t>(e.j)]));
    }
    return g;
}

double inv_sum(const SimplexPoint& xi) {
    double sum = 0.0;
    for (double v : xi.values()) {
        if (v == 0.0) return std::numeric_limits<double>::infinity();
        sum += 1.0 / v;
    }
    return sum;
}

double inv_sum_neg_sq(const SimplexPoint& xi) {
    const double s = inv_sum(xi);
    if (std::isinf(s)) return 0.0;
    return 1.0 / (s * s);
}

double xi_norm_sq(const Graph& graph, MetricKind kind, const SimplexPoint& xi,
                  std::span<const double> p) {
    if (p.size() != graph.num_edges()) {
        throw std::invalid_argument("edge vector length does not match the edge count");
    }
    double sum = 0.0;
    const auto& edges = graph.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const double g = metric_weight(kind, xi[static_cast<std::size_t>(edges[e].i)],
                                       xi[static_cast<std::size_t>(edges[e].j)]);
        sum += p[e] * p[e] * g;
    }
    return sum;
}

EdgeValues graph_gradient(const Graph& graph, std::span<const double> phi) {
    if (static_cast<int>(phi.size()) != graph.d()) {
        throw std::invalid_argument("vertex vector length does not match d");
    }
    EdgeValues out;
    out.reserve(graph.num_edges());
    for (const Edge& e : graph.edges()) {
        out.push_back(e.sqrt_omega * (phi[static_cast<std::size_t>(e.i)] -
                                      phi[static_cast<std::size_t>(e.j)]));
    }
    return out;
}

std::vector<double> divergence(const Graph& graph, MetricKind kind, const SimplexPoint& xi,
                               const SquareMatrix& upsilon) {
    const int d = graph.d();
    if (upsilon.n != d) {
        throw std::invalid_argument("upsilon dimension does not match d");
    }
    std::vector<double> out(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i < d; ++i) {
        double acc = 0.0;
        for (int j = 0; j < d; ++j) {
            const double w = graph.omega(i, j);
            if (w == 0.0) continue;
            acc += std::sqrt(w) * upsilon(j, i) *
                   metric_weight(kind, xi[static_cast<std::size_t>(i)], xi[static_cast<std::size_t>(j)]);
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

}  // namespace hjgraph
