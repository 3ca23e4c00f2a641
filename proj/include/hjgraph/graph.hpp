#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hjgraph {

/// Undirected edge {i, j} with i < j (0-based vertex labels).
struct Edge {
    int i = 0;
    int j = 0;
    double omega = 0.0;
    double sqrt_omega = 0.0;
};

/// Per-edge reals, indexed like Graph::edges(). Holds the upper-triangular
/// entries p_{i,j} (i < j) of a skew-symmetric matrix.
using EdgeValues = std::vector<double>;

/// Weighted, connected, undirected graph without self-loops.
class Graph {
public:
    /// Builds from a dense symmetric weight matrix. Throws std::invalid_argument
    /// on asymmetry, negative or diagonal weights, d < 2, or a disconnected graph.
    explicit Graph(std::vector<std::vector<double>> omega);

    static Graph two_node(double weight = 1.0);
    static Graph triangle(double weight = 1.0);
    static Graph complete(int d, double weight = 1.0);

    int d() const noexcept { return d_; }
    double omega(int i, int j) const { return omega_[static_cast<std::size_t>(i * d_ + j)]; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t num_edges() const noexcept { return edges_.size(); }
    std::vector<std::vector<double>> omega_matrix() const;

private:
    int d_ = 0;
    std::vector<double> omega_;
    std::vector<Edge> edges_;
};

enum class MetricKind { Average, Logarithmic, Harmonic };

std::string to_string(MetricKind kind);
MetricKind metric_kind_from_string(const std::string& name);

/// A probability vector on the vertices.
class SimplexPoint {
public:
    static constexpr double kSumTolerance = 1e-12;

    /// Throws std::invalid_argument for negative entries or |sum - 1| > 1e-12.
    explicit SimplexPoint(std::vector<double> xi);

    std::size_t size() const noexcept { return xi_.size(); }
    double operator[](std::size_t k) const { return xi_[k]; }
    std::span<const double> values() const noexcept { return xi_; }
    bool on_boundary() const noexcept;

private:
    std::vector<double> xi_;
};

/// Dense d x d matrix; used for skew-symmetric edge fields.
struct SquareMatrix {
    int n = 0;
    std::vector<double> a;

    explicit SquareMatrix(int size) : n(size), a(static_cast<std::size_t>(size * size), 0.0) {}
    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }
};

/// Mean g(t, r) of two vertex masses. Throws std::domain_error for negative input.
double metric_weight(MetricKind kind, double t, double r);

/// g_{i,j}(xi) for every edge.
EdgeValues edge_metric_weights(const Graph& graph, MetricKind kind, const SimplexPoint& xi);

/// I(xi) = sum 1/xi_i; +infinity when any coordinate vanishes.
double inv_sum(const SimplexPoint& xi);

/// I(xi)^{-2}, exactly 0 on the simplex boundary.
double inv_sum_neg_sq(const SimplexPoint& xi);

/// ||P||_xi^2 = sum over edges i<j of p_{i,j}^2 g_{i,j}(xi).
double xi_norm_sq(const Graph& graph, MetricKind kind, const SimplexPoint& xi,
                  std::span<const double> p);

/// (sqrt(omega_{i,j}) (phi_i - phi_j)) on each edge.
EdgeValues graph_gradient(const Graph& graph, std::span<const double> phi);

/// div_xi(upsilon)_i = sum_j sqrt(omega_{i,j}) upsilon_{j,i} g_{i,j}(xi).
std::vector<double> divergence(const Graph& graph, MetricKind kind, const SimplexPoint& xi,
                               const SquareMatrix& upsilon);

}  // namespace hjgraph
