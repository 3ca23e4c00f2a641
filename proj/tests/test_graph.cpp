#include "hjgraph/graph.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace hjgraph;
using hjgraph::testing::rng;
using hjgraph::testing::uniform;

TEST(MetricWeight, Examples) {
    EXPECT_DOUBLE_EQ(metric_weight(MetricKind::Average, 0.2, 0.6), 0.4);
    EXPECT_EQ(metric_weight(MetricKind::Logarithmic, 0.3, 0.3), 0.3);
    EXPECT_EQ(metric_weight(MetricKind::Harmonic, 0.5, 0.0), 0.0);
    EXPECT_NEAR(metric_weight(MetricKind::Logarithmic, std::numbers::e, 1.0), std::numbers::e - 1.0, 1e-12);
    EXPECT_NEAR(metric_weight(MetricKind::Logarithmic, std::numbers::e, 1.0), 1.718281828, 1e-9);
}

TEST(MetricWeight, BoundaryZeros) {
    EXPECT_EQ(metric_weight(MetricKind::Logarithmic, 0.0, 0.4), 0.0);
    EXPECT_EQ(metric_weight(MetricKind::Logarithmic, 0.4, 0.0), 0.0);
    EXPECT_EQ(metric_weight(MetricKind::Harmonic, 0.0, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(metric_weight(MetricKind::Harmonic, 0.25, 0.75), 2.0 / (4.0 + 4.0 / 3.0));
}

TEST(MetricWeight, NegativeInputIsDomainError) {
    EXPECT_THROW(metric_weight(MetricKind::Average, -0.1, 0.5), std::domain_error);
    EXPECT_THROW(metric_weight(MetricKind::Logarithmic, 0.5, -1e-300), std::domain_error);
    EXPECT_THROW(metric_weight(MetricKind::Harmonic, std::nan(""), 0.5), std::domain_error);
}

TEST(MetricWeight, PropertiesOnRandomSamples) {
    auto g = rng(1);
    for (MetricKind kind : {MetricKind::Average, MetricKind::Logarithmic, MetricKind::Harmonic}) {
        for (int n = 0; n < 10000; ++n) {
            const double t = uniform(g, 0.0, 1.0);
            const double r = uniform(g, 0.0, 1.0);
            const double v = metric_weight(kind, t, r);
            EXPECT_EQ(v, metric_weight(kind, r, t));
            EXPECT_GE(v, std::min(t, r) - 1e-12);
            EXPECT_LE(v, std::max(t, r) + 1e-12);
            for (double lambda : {0.5, 2.0}) {
                EXPECT_NEAR(metric_weight(kind, lambda * t, lambda * r), lambda * v, 1e-12);
            }
        }
    }
}

TEST(MetricWeight, LogarithmicContinuousAcrossDiagonal) {
    auto g = rng(2);
    for (int n = 0; n < 2000; ++n) {
        const double t = uniform(g, 1e-3, 1.0);
        const double r = t + std::pow(10.0, uniform(g, -16.0, -6.0));
        const double eps = r - t;  // representable gap
        const double v = metric_weight(MetricKind::Logarithmic, t, r);
        EXPECT_LE(std::abs(v - t), eps) << "t=" << t << " eps=" << eps;
        EXPECT_GE(v, t);
        EXPECT_LE(v, t + eps);
    }
}

TEST(InvSum, Examples) {
    EXPECT_DOUBLE_EQ(inv_sum(SimplexPoint({0.5, 0.5})), 4.0);
    EXPECT_DOUBLE_EQ(inv_sum(SimplexPoint({0.25, 0.25, 0.5})), 10.0);
    EXPECT_TRUE(std::isinf(inv_sum(SimplexPoint({0.0, 1.0}))));
    EXPECT_EQ(inv_sum_neg_sq(SimplexPoint({0.0, 1.0})), 0.0);
    EXPECT_DOUBLE_EQ(inv_sum_neg_sq(SimplexPoint({0.5, 0.5})), 1.0 / 16.0);
}

TEST(XiNorm, Examples) {
    const Graph g = Graph::two_node();
    EXPECT_DOUBLE_EQ(xi_norm_sq(g, MetricKind::Average, SimplexPoint({0.5, 0.5}), std::vector<double>{2.0}), 2.0);
    EXPECT_EQ(xi_norm_sq(g, MetricKind::Average, SimplexPoint({0.3, 0.7}), std::vector<double>{0.0}), 0.0);
    for (MetricKind kind : {MetricKind::Harmonic, MetricKind::Logarithmic}) {
        EXPECT_EQ(xi_norm_sq(g, kind, SimplexPoint({0.0, 1.0}), std::vector<double>{5.0}), 0.0);
    }
    EXPECT_THROW(xi_norm_sq(g, MetricKind::Average, SimplexPoint({0.5, 0.5}), std::vector<double>{1.0, 2.0}),
                 std::invalid_argument);
}

TEST(GraphGradient, Examples) {
    EXPECT_EQ(graph_gradient(Graph::two_node(), std::vector<double>{1.0, 0.0}), (EdgeValues{1.0}));
    EXPECT_EQ(graph_gradient(Graph::triangle(), std::vector<double>{3.0, 3.0, 3.0}), (EdgeValues{0.0, 0.0, 0.0}));
    EXPECT_EQ(graph_gradient(Graph::triangle(), std::vector<double>{1.0, 2.0, 4.0}), (EdgeValues{-1.0, -3.0, -2.0}));
}

TEST(GraphGradient, ScalesWithSqrtOmega) {
    const Graph g({{0.0, 4.0}, {4.0, 0.0}});
    EXPECT_DOUBLE_EQ(graph_gradient(g, std::vector<double>{1.0, 0.5})[0], 1.0);
}

namespace {

SquareMatrix random_skew(int d, std::mt19937_64& g) {
    SquareMatrix u(d);
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            u(i, j) = uniform(g, -1.0, 1.0);
            u(j, i) = -u(i, j);
        }
    }
    return u;
}

}  // namespace

TEST(Divergence, ZeroField) {
    const auto div = divergence(Graph::triangle(), MetricKind::Average, SimplexPoint({0.2, 0.3, 0.5}), SquareMatrix(3));
    for (double v : div) EXPECT_EQ(v, 0.0);
}

TEST(Divergence, NegativeAdjointOfGradient) {
    auto g = rng(3);
    const Graph graph({{0.0, 1.0, 2.0}, {1.0, 0.0, 0.5}, {2.0, 0.5, 0.0}});
    for (MetricKind kind : {MetricKind::Average, MetricKind::Logarithmic, MetricKind::Harmonic}) {
        for (int n = 0; n < 500; ++n) {
            const SimplexPoint xi = random_interior_point(3, g);
            const auto phi = hjgraph::testing::uniform_vector(g, 3, -2.0, 2.0);
            const SquareMatrix ups = random_skew(3, g);
            const EdgeValues grad = graph_gradient(graph, phi);
            const EdgeValues gw = edge_metric_weights(graph, kind, xi);
            double lhs = 0.0;
            for (std::size_t e = 0; e < graph.num_edges(); ++e) {
                lhs += grad[e] * ups(graph.edges()[e].i, graph.edges()[e].j) * gw[e];
            }
            const auto div = divergence(graph, kind, xi, ups);
            double rhs = 0.0;
            double total = 0.0;
            for (int i = 0; i < 3; ++i) {
                rhs -= phi[static_cast<std::size_t>(i)] * div[static_cast<std::size_t>(i)];
                total += div[static_cast<std::size_t>(i)];
            }
            EXPECT_NEAR(lhs, rhs, 1e-12);
            EXPECT_NEAR(total, 0.0, 1e-12);
        }
    }
}

TEST(GraphType, ValidatesConstruction) {
    EXPECT_THROW(Graph(std::vector<std::vector<double>>{{0.0}}), std::invalid_argument);
    EXPECT_THROW(Graph({{0.0, 1.0}, {2.0, 0.0}}), std::invalid_argument);
    EXPECT_THROW(Graph({{1.0, 1.0}, {1.0, 0.0}}), std::invalid_argument);
    EXPECT_THROW(Graph({{0.0, -1.0}, {-1.0, 0.0}}), std::invalid_argument);
    EXPECT_THROW(Graph({{0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}), std::invalid_argument);
    EXPECT_THROW(Graph({{0.0, 1.0}, {1.0}}), std::invalid_argument);
}

TEST(GraphType, EdgesMatchPositiveWeights) {
    const Graph path({{0.0, 1.0, 0.0}, {1.0, 0.0, 3.0}, {0.0, 3.0, 0.0}});
    ASSERT_EQ(path.num_edges(), 2u);
    EXPECT_EQ(path.edges()[0].i, 0);
    EXPECT_EQ(path.edges()[0].j, 1);
    EXPECT_EQ(path.edges()[1].i, 1);
    EXPECT_EQ(path.edges()[1].j, 2);
    EXPECT_DOUBLE_EQ(path.edges()[1].sqrt_omega, std::sqrt(3.0));
    EXPECT_EQ(Graph::complete(4).num_edges(), 6u);
    EXPECT_EQ(path.omega_matrix()[2][1], 3.0);
}

TEST(SimplexPointType, Validates) {
    EXPECT_NO_THROW(SimplexPoint({0.5, 0.5 + 5e-13}));
    EXPECT_THROW(SimplexPoint({0.5, 0.6}), std::invalid_argument);
    EXPECT_THROW(SimplexPoint({-0.1, 1.1}), std::invalid_argument);
    EXPECT_THROW(SimplexPoint({1.0}), std::invalid_argument);
    EXPECT_TRUE(SimplexPoint({0.0, 1.0}).on_boundary());
    EXPECT_FALSE(SimplexPoint({0.4, 0.6}).on_boundary());
}

TEST(MetricKindNames, RoundTrip) {
    for (MetricKind kind : {MetricKind::Average, MetricKind::Logarithmic, MetricKind::Harmonic}) {
        EXPECT_EQ(metric_kind_from_string(to_string(kind)), kind);
    }
    EXPECT_THROW(metric_kind_from_string("geometric"), std::invalid_argument);
}
