#pragma once

#include "hjgraph/graph.hpp"
#include "hjgraph/hamiltonian.hpp"
#include "hjgraph/lattice.hpp"
#include "hjgraph/weights.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hjgraph {

/// Built-in initial data and potentials.
struct ProblemSpec {
    enum class InitialDatum { Constant, Linear, Quadratic, CosineInS };
    enum class Potential { Zero, Linear, Quadratic };

    InitialDatum u0 = InitialDatum::Quadratic;
    Potential potential = Potential::Zero;
    /// Coefficients c_i of the linear potential sum c_i xi_i (length d).
    std::vector<double> potential_coeffs;
    double T = 0.5;
};

std::string to_string(ProblemSpec::InitialDatum u0);
std::string to_string(ProblemSpec::Potential f);
ProblemSpec::InitialDatum initial_datum_from_string(const std::string& name);
ProblemSpec::Potential potential_from_string(const std::string& name);

/// Constant: 1. Linear: xi_1. Quadratic: xi_1^2. CosineInS: sum_k cos(pi s^k).
double initial_value(ProblemSpec::InitialDatum u0, const SimplexPoint& xi);
double potential_value(const ProblemSpec& problem, const SimplexPoint& xi);

enum class Integrator { Euler, Heun };

std::string to_string(Integrator integrator);
Integrator integrator_from_string(const std::string& name);

struct SolverConfig {
    Graph graph = Graph::two_node();
    MetricKind metric = MetricKind::Average;
    int N = 32;
    HamiltonianSpec hamiltonian = HamiltonianSpec::lax_friedrichs(3.0);
    WeightSpec weight = WeightSpec::polynomial(1.0);
    ProblemSpec problem;
    double cfl = 0.5;
    Integrator integrator = Integrator::Heun;
    /// Upper bound on the time step; defaults to h.
    std::optional<double> dt_max;
    std::size_t site_budget = Lattice::kDefaultSiteBudget;

    void validate() const;
};

/// Non-finite values appeared during time stepping.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::size_t step)
        : std::runtime_error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Forward/backward difference quotients sqrt(omega_{i,j}) D^{+/-} u / h per
/// (site, edge), stored site-major. Quotients whose shift leaves the simplex
/// are exactly 0.
struct DiffPair {
    std::size_t num_edges = 0;
    std::vector<double> forward;
    std::vector<double> backward;

    double p(std::size_t site, std::size_t edge) const { return forward[site * num_edges + edge]; }
    double q(std::size_t site, std::size_t edge) const { return backward[site * num_edges + edge]; }
};

/// A_{i,j} = dG/dp_{i,j} and B_{i,j} = dG/dq_{i,j} at (xi, [D^{+/-} u]), site-major.
struct LinearizedCoeffs {
    std::shared_ptr<const Lattice> lattice;
    std::size_t num_edges = 0;
    std::vector<double> a;
    std::vector<double> b;

    double A(std::size_t site, std::size_t edge) const { return a[site * num_edges + edge]; }
    double B(std::size_t site, std::size_t edge) const { return b[site * num_edges + edge]; }
};

struct Diagnostics {
    double m1 = 0.0;  // max |D^{+/-} u| / h over sites and edges
    double m2 = 0.0;  // max unit-direction second difference on interior-h sites
};

struct DiagnosticsTimeline {
    std::vector<double> times;
    std::vector<double> m1;
    std::vector<double> m2;
    std::vector<double> linf;
    std::vector<double> dt;  // step taken from this level; 0 at the final time
};

/// Consistency remainders, measured with a central-difference gradient proxy.
struct RemainderReport {
    std::vector<Field> plus;   // per edge
    std::vector<Field> minus;  // per edge
    double l1 = 0.0;           // sum over edges of int (|R+| + |R-|)
    double l1_weighted = 0.0;  // same with weight w
};

struct SolveOptions {
    /// Times in (0, T) that the stepper lands on exactly; snapshots are kept.
    std::vector<double> sample_times;
    bool track_remainders = false;
    /// Called at every time level with the step that follows (0 at T).
    std::function<void(std::size_t level, double t, double dt, const Field& u)> observer;
};

struct SolveResult {
    Field final;
    DiagnosticsTimeline timeline;
    std::vector<double> sample_times;
    std::vector<Field> samples;
    double max_quotient = 0.0;      // max over t of ||[D^+u]||_inf v ||[D^-u]||_inf
    double max_remainder_l1 = 0.0;  // only when track_remainders
    std::size_t steps = 0;
};

/// Semi-discrete monotone scheme  d/dt u + G(xi, [D^{+/-} u]) + F(xi) = 0  on
/// the simplex lattice, integrated explicitly.
class Scheme {
public:
    explicit Scheme(SolverConfig config);

    const SolverConfig& config() const noexcept { return config_; }
    const Graph& graph() const noexcept { return config_.graph; }
    const Lattice& lattice() const noexcept { return *lattice_; }
    const std::shared_ptr<const Lattice>& lattice_ptr() const noexcept { return lattice_; }
    std::size_t num_edges() const noexcept { return config_.graph.num_edges(); }
    VertexPair pair(std::size_t edge) const;

    const Field& weight() const noexcept { return weight_; }
    const Field& potential() const noexcept { return potential_; }
    Field initial() const;

    /// I(xi)^{-2} g_{i,j}(xi) at a site.
    double coefficient(std::size_t site, std::size_t edge) const { return coeff_[site * num_edges() + edge]; }
    double sqrt_omega(std::size_t edge) const { return config_.graph.edges()[edge].sqrt_omega; }
    std::int64_t neighbour(std::size_t site, std::size_t edge, int sign) const;

    DiffPair diff_matrices(const Field& u) const;
    /// -G(xi, [D^{+/-} u]) - F(xi) per site.
    Field rhs(const Field& u) const;
    /// cfl h / s_max with s_max = max_x sum_e sqrt(omega)(|dG/dp| + |dG/dq|),
    /// floored at 1e-12 and capped by dt_max.
    double cfl_dt(const Field& u) const;
    double dt_max() const;

    Field euler_step(const Field& u, double dt) const;
    Field heun_step(const Field& u, double dt) const;
    Field step(const Field& u, double dt) const;

    Diagnostics diagnostics(const Field& u) const;
    RemainderReport remainders(const Field& u) const;
    LinearizedCoeffs linearized_coeffs(const Field& u) const;

    /// Advances the initial datum to T, landing exactly on T and on every
    /// sample time. Throws DivergenceError on non-finite values.
    SolveResult solve(const SolveOptions& options = {}) const;

private:
    SolverConfig config_;
    std::shared_ptr<const Lattice> lattice_;
    std::vector<double> coeff_;
    Field weight_;
    Field potential_;
};

/// Two-pass R0 calibration: a preliminary solve with R0 = 1.5 max|[D^{+/-} U0]|,
/// then R0 = 1.5 times the largest quotient observed along that trajectory.
/// `gamma_override` (if set) is kept for both passes.
double calibrate_r0(SolverConfig config, std::optional<double> gamma_override = std::nullopt);

}  // namespace hjgraph
