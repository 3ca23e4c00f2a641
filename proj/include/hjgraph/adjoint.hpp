#pragma once

#include "hjgraph/scheme.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hjgraph {

/// Linearized coefficients along a forward trajectory, one entry per time
/// level 0..L. Level L is the final time and carries dt = 0.
///
/// When the level count exceeds `max_snapshots`, only u checkpoints and the
/// step sizes are kept; a segment of coefficients is regenerated on demand by
/// replaying the (deterministic) forward steps. Not safe for concurrent use.
class CoefficientTape {
public:
    static constexpr std::size_t kDefaultMaxSnapshots = 2000;

    static CoefficientTape record(const Scheme& scheme, std::size_t max_snapshots = kDefaultMaxSnapshots);

    std::size_t levels() const noexcept { return times_.size(); }
    double time(std::size_t level) const { return times_.at(level); }
    double dt(std::size_t level) const { return dts_.at(level); }
    const std::vector<double>& times() const noexcept { return times_; }
    const Scheme& scheme() const noexcept { return *scheme_; }
    bool checkpointed() const noexcept { return stride_ > 0; }

    const LinearizedCoeffs& coeffs(std::size_t level) const;

private:
    const Scheme* scheme_ = nullptr;
    std::vector<double> times_;
    std::vector<double> dts_;
    std::vector<LinearizedCoeffs> full_;
    // Checkpoint mode.
    std::size_t stride_ = 0;
    std::vector<Field> checkpoints_;
    mutable std::size_t cached_segment_ = static_cast<std::size_t>(-1);
    mutable std::vector<LinearizedCoeffs> segment_;
};

/// L_h phi = sum_e (sqrt(omega)/h)(A D^+ phi + B D^- phi); quotients whose
/// shift exits are 0.
Field linearized_apply(const Scheme& scheme, const LinearizedCoeffs& coeffs, const Field& phi);

/// The discrete maximum principle failed during a forward dual step.
class MaxPrincipleError : public std::runtime_error {
public:
    MaxPrincipleError(const std::string& what, std::size_t step)
        : std::runtime_error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

struct DualTrajectory {
    std::vector<double> times;
    std::vector<Field> phi;
    std::vector<double> min;
    std::vector<double> max;
};

/// Euler steps of  d/dt phi + L_h phi = 0  from level `start` (phi = f) to T,
/// using the tape's step sizes. Throws MaxPrincipleError naming the step when
/// min decreases or max increases by more than 1e-12 (1 + |f|_inf).
DualTrajectory forward_dual_solve(const CoefficientTape& tape, const Field& f, std::size_t start = 0);

/// Terminal datum of the adjoint problem.
struct AdjointTerminal {
    enum class Kind { Dirac, General };
    Kind kind = Kind::Dirac;
    std::size_t site = 0;
    Field nu;

    static AdjointTerminal dirac(std::size_t site) { return {Kind::Dirac, site, {}}; }
    static AdjointTerminal general(Field nu) { return {Kind::General, 0, std::move(nu)}; }
};

struct AdjointState {
    Field sigma;  // rho / w on interior sites, 0 on the boundary
    Field rho;    // sigma w
};

struct ConservationTimeline {
    std::vector<double> t;
    std::vector<double> mass;        // sum rho h^{d-1}
    std::vector<double> min_sigma;   // over interior sites
    std::vector<double> max_wsigma;  // |rho|_inf
};

struct AdjointResult {
    AdjointState initial;   // at t = 0
    AdjointState terminal;  // at t = T
    ConservationTimeline timeline;  // ordered by increasing t
    /// rho at every level (ordered by level) when requested.
    std::vector<Field> rho_levels;
};

struct AdjointOptions {
    bool keep_levels = false;
    std::function<void(std::size_t level, double t, const AdjointState& state)> observer;
};

AdjointState make_state(Field rho, const Field& weight);

/// Backward flux-form update of rho = sigma w,
///   rho_n = rho_{n+1} + dt_n sum_e (sqrt(omega)/h)(D^-[rho A] + D^+[rho B]),
/// with zero extension of the fluxes. This is the exact lattice transpose of the
/// forward dual step, so sum rho h^{d-1} is conserved. Dirac terminal: rho is
/// 1/h^{d-1} at the site (std::invalid_argument on a boundary site); general
/// terminal: rho = nu w. Throws std::runtime_error when rho goes negative
/// beyond 1e-12 |rho|_inf.
AdjointResult adjoint_backward_solve(const CoefficientTape& tape, const AdjointTerminal& terminal,
                                     const AdjointOptions& options = {});

/// (1/w) sum_e (sqrt(omega)/h)(D^-[sigma A w] + D^+[sigma B w]) on interior
/// sites, 0 on the boundary.
Field adjoint_conservative(const Scheme& scheme, const LinearizedCoeffs& coeffs, const Field& weight,
                           const Field& sigma);

/// The same operator expanded with the discrete product rule:
///   sum_e (sqrt(omega)/h)(D^-[sigma A] + D^+[sigma B]) + S,
///   S = sum_e (sqrt(omega)/h)((D^- w / w)(sigma A)(x - h m) + (D^+ w / w)(sigma B)(x + h m)).
Field adjoint_decomposed(const Scheme& scheme, const LinearizedCoeffs& coeffs, const Field& weight,
                         const Field& sigma);

struct IbpResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;  // |lhs - rhs|
    double scale = 0.0;     // sum of absolute summands on both sides
};

/// Weighted summation by parts on one edge with fluxes F_A = sigma A and
/// F_B = sigma B (zero-extended off the lattice):
///   sum w (F_A D^+ phi + F_B D^- phi)  vs  -sum phi (D^-[F_A w] + D^+[F_B w]),
/// both scaled by sqrt(omega)/h and h^{d-1}. The two sides differ by the
/// boundary sum of F_A phi w over sites whose + shift exits, minus the
/// analogous F_B term, so the identity is exact when w vanishes there.
IbpResult ibp_check(const Lattice& lattice, VertexPair pair, double sqrt_omega, const Field& weight,
                    const Field& phi, const Field& flux_a, const Field& flux_b);

IbpResult ibp_check(const Scheme& scheme, const LinearizedCoeffs& coeffs, std::size_t edge, const Field& weight,
                    const Field& phi, const Field& sigma);

/// Smooth test function phi(t, xi) with its time derivative.
struct TestFunction {
    std::function<double(double, const SimplexPoint&)> value;
    std::function<double(double, const SimplexPoint&)> time_derivative;
};

/// |int_0^T sum rho (d/dt phi + L_t phi) h^{d-1} dt - phi(T, xi_0) + sum rho(0) phi(0) h^{d-1}|
/// with the trapezoid rule over the tape's levels and a Dirac terminal at `site`.
double duality_check(const CoefficientTape& tape, std::size_t site, const TestFunction& phi);

}  // namespace hjgraph
