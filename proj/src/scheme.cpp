#include "hjgraph/scheme.hpp"

#include "hjgraph/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hjgraph {

std::string to_string(ProblemSpec::InitialDatum u0) {
    switch (u0) {
        case ProblemSpec::InitialDatum::Constant: return "constant";
        case ProblemSpec::InitialDatum::Linear: return "linear";
        case ProblemSpec::InitialDatum::Quadratic: return "quadratic";
        case ProblemSpec::InitialDatum::CosineInS: return "cosine-in-s";
    }
    return "unknown";
}

std::string to_string(ProblemSpec::Potential f) {
    switch (f) {
        case ProblemSpec::Potential::Zero: return "zero";
        case ProblemSpec::Potential::Linear: return "linear";
        case ProblemSpec::Potential::Quadratic: return "quadratic";
    }
    return "unknown";
}

ProblemSpec::InitialDatum initial_datum_from_string(const std::string& name) {
    if (name == "constant") return ProblemSpec::InitialDatum::Constant;
    if (name == "linear") return ProblemSpec::InitialDatum::Linear;
    if (name == "quadratic") return ProblemSpec::InitialDatum::Quadratic;
    if (name == "cosine-in-s") return ProblemSpec::InitialDatum::CosineInS;
    throw std::invalid_argument("unknown initial datum '" + name + "'");
}

ProblemSpec::Potential potential_from_string(const std::string& name) {
    if (name == "zero") return ProblemSpec::Potential::Zero;
    if (name == "linear") return ProblemSpec::Potential::Linear;
    if (name == "quadratic") return ProblemSpec::Potential::Quadratic;
    throw std::invalid_argument("unknown potential '" + name + "'");
}

double initial_value(ProblemSpec::InitialDatum u0, const SimplexPoint& xi) {
    switch (u0) {
        case ProblemSpec::InitialDatum::Constant: return 1.0;
        case ProblemSpec::InitialDatum::Linear: return xi[0];
        case ProblemSpec::InitialDatum::Quadratic: return xi[0] * xi[0];
        case ProblemSpec::InitialDatum::CosineInS: {
            double sum = 0.0;
            for (double s : pi_forward(xi)) sum += std::cos(std::numbers::pi * s);
            return sum;
        }
    }
    return 0.0;
}

double potential_value(const ProblemSpec& problem, const SimplexPoint& xi) {
    switch (problem.potential) {
        case ProblemSpec::Potential::Zero: return 0.0;
        case ProblemSpec::Potential::Linear: {
            double sum = 0.0;
            for (std::size_t k = 0; k < xi.size() && k < problem.potential_coeffs.size(); ++k) {
                sum += problem.potential_coeffs[k] * xi[k];
            }
            return sum;
        }
        case ProblemSpec::Potential::Quadratic: {
            double sum = 0.0;
            for (double v : xi.values()) sum += v * v;
            return sum;
        }
    }
    return 0.0;
}

std::string to_string(Integrator integrator) {
    return integrator == Integrator::Euler ? "euler" : "heun";
}

Integrator integrator_from_string(const std::string& name) {
    if (name == "euler") return Integrator::Euler;
    if (name == "heun") return Integrator::Heun;
    throw std::invalid_argument("unknown integrator '" + name + "'");
}

void SolverConfig::validate() const {
    if (N < 2) throw std::invalid_argument("lattice N must be >= 2");
    if (!(problem.T > 0.0) || !std::isfinite(problem.T)) throw std::invalid_argument("problem T must be > 0");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("cfl must lie in (0, 1]");
    if (dt_max && !(*dt_max > 0.0)) throw std::invalid_argument("dt_max must be > 0");
    if (problem.potential == ProblemSpec::Potential::Linear &&
        static_cast<int>(problem.potential_coeffs.size()) != graph.d()) {
        throw std::invalid_argument("linear potential needs d coefficients");
    }
    hamiltonian.validate();
    weight.validate();
}

Scheme::Scheme(SolverConfig config) : config_(std::move(config)) {
    config_.validate();
    lattice_ = Lattice::build(config_.graph.d(), config_.N, config_.site_budget);
    const std::size_t ne = num_edges();
    const std::size_t ns = lattice_->size();

    coeff_.assign(ns * ne, 0.0);
    potential_ = Field(lattice_);
    for (std::size_t s = 0; s < ns; ++s) {
        const SimplexPoint xi = lattice_->xi(s);
        potential_[s] = potential_value(config_.problem, xi);
        if (lattice_->on_boundary(s)) continue;  // I^{-2} = 0: zero extension
        const double inv_sq = inv_sum_neg_sq(xi);
        const auto g = edge_metric_weights(config_.graph, config_.metric, xi);
        for (std::size_t e = 0; e < ne; ++e) coeff_[s * ne + e] = inv_sq * g[e];
    }
    weight_ = weight_field(config_.weight, lattice_);
}

VertexPair Scheme::pair(std::size_t edge) const {
    const Edge& e = config_.graph.edges()[edge];
    return VertexPair{e.i, e.j};
}

std::int64_t Scheme::neighbour(std::size_t site, std::size_t edge, int sign) const {
    return lattice_->neighbour(site, pair(edge), sign);
}

Field Scheme::initial() const {
    Field u(lattice_);
    for (std::size_t s = 0; s < lattice_->size(); ++s) {
        u[s] = initial_value(config_.problem.u0, lattice_->xi(s));
    }
    return u;
}

DiffPair Scheme::diff_matrices(const Field& u) const {
    const std::size_t ne = num_edges();
    const std::size_t ns = lattice_->size();
    const double inv_h = 1.0 / lattice_->h();
    DiffPair out{ne, std::vector<double>(ns * ne, 0.0), std::vector<double>(ns * ne, 0.0)};
    std::vector<VertexPair> pairs;
    for (std::size_t e = 0; e < ne; ++e) pairs.push_back(pair(e));
    parallel::parallel_for(ns, [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            for (std::size_t e = 0; e < ne; ++e) {
                const double scale = sqrt_omega(e) * inv_h;
                const auto up = lattice_->neighbour(s, pairs[e], +1);
                const auto down = lattice_->neighbour(s, pairs[e], -1);
                if (up >= 0) out.forward[s * ne + e] = scale * (u[static_cast<std::size_t>(up)] - u[s]);
                if (down >= 0) out.backward[s * ne + e] = scale * (u[s] - u[static_cast<std::size_t>(down)]);
            }
        }
    });
    return out;
}

Field Scheme::rhs(const Field& u) const {
    const DiffPair dq = diff_matrices(u);
    const std::size_t ne = num_edges();
    Field out(lattice_);
    const HamiltonianSpec& spec = config_.hamiltonian;
    parallel::parallel_for(lattice_->size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            double g = 0.0;
            for (std::size_t e = 0; e < ne; ++e) {
                g += edge_value(spec, coeff_[s * ne + e], dq.p(s, e), dq.q(s, e));
            }
            out[s] = -g - potential_[s];
        }
    });
    return out;
}

double Scheme::dt_max() const { return config_.dt_max.value_or(lattice_->h()); }

double Scheme::cfl_dt(const Field& u) const {
    const LinearizedCoeffs lc = linearized_coeffs(u);
    const std::size_t ne = num_edges();
    double s_max = 0.0;
    for (std::size_t s = 0; s < lattice_->size(); ++s) {
        double speed = 0.0;
        for (std::size_t e = 0; e < ne; ++e) {
            speed += sqrt_omega(e) * (std::abs(lc.A(s, e)) + std::abs(lc.B(s, e)));
        }
        s_max = std::max(s_max, speed);
    }
    s_max = std::max(s_max, 1e-12);
    return std::min(config_.cfl * lattice_->h() / s_max, dt_max());
}

Field Scheme::euler_step(const Field& u, double dt) const {
    Field out = rhs(u);
    for (std::size_t s = 0; s < out.size(); ++s) out[s] = u[s] + dt * out[s];
    return out;
}

Field Scheme::heun_step(const Field& u, double dt) const {
    const Field stage = euler_step(u, dt);
    const Field second = euler_step(stage, dt);
    Field out(lattice_);
    for (std::size_t s = 0; s < out.size(); ++s) out[s] = 0.5 * (u[s] + second[s]);
    return out;
}

Field Scheme::step(const Field& u, double dt) const {
    return config_.integrator == Integrator::Euler ? euler_step(u, dt) : heun_step(u, dt);
}

Diagnostics Scheme::diagnostics(const Field& u) const {
    const std::size_t ne = num_edges();
    const double h = lattice_->h();
    Diagnostics out;
    double m2 = -std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < ne; ++e) {
        const VertexPair vp = pair(e);
        for (std::size_t s = 0; s < lattice_->size(); ++s) {
            const auto up = lattice_->neighbour(s, vp, +1);
            const auto down = lattice_->neighbour(s, vp, -1);
            if (up >= 0) out.m1 = std::max(out.m1, std::abs(u[static_cast<std::size_t>(up)] - u[s]) / h);
            if (down >= 0) out.m1 = std::max(out.m1, std::abs(u[s] - u[static_cast<std::size_t>(down)]) / h);
            if (up >= 0 && down >= 0) {
                // |e_{i,j}|^2 = 2: normalise to a unit tangent direction.
                const double second =
                    (u[static_cast<std::size_t>(up)] - 2.0 * u[s] + u[static_cast<std::size_t>(down)]) / (2.0 * h * h);
                m2 = std::max(m2, second);
            }
        }
    }
    out.m2 = std::isfinite(m2) ? m2 : 0.0;
    return out;
}

RemainderReport Scheme::remainders(const Field& u) const {
    const std::size_t ne = num_edges();
    const double h = lattice_->h();
    const std::size_t ns = lattice_->size();
    RemainderReport out;
    std::vector<double> abs_terms(ns);
    std::vector<double> weighted_terms(ns);
    for (std::size_t e = 0; e < ne; ++e) {
        const VertexPair vp = pair(e);
        // Directional-derivative proxy: central where possible, one-sided otherwise.
        auto gradient = [&](std::size_t y) {
            const auto up = lattice_->neighbour(y, vp, +1);
            const auto down = lattice_->neighbour(y, vp, -1);
            if (up >= 0 && down >= 0) {
                return (u[static_cast<std::size_t>(up)] - u[static_cast<std::size_t>(down)]) / (2.0 * h);
            }
            if (up >= 0) return (u[static_cast<std::size_t>(up)] - u[y]) / h;
            if (down >= 0) return (u[y] - u[static_cast<std::size_t>(down)]) / h;
            return 0.0;
        };
        Field plus(lattice_);
        Field minus(lattice_);
        for (std::size_t s = 0; s < ns; ++s) {
            const auto up = lattice_->neighbour(s, vp, +1);
            const auto down = lattice_->neighbour(s, vp, -1);
            // No quotient exists where the shift exits; the remainder is 0 there.
            if (up >= 0) {
                plus[s] = gradient(static_cast<std::size_t>(up)) - (u[static_cast<std::size_t>(up)] - u[s]) / h;
            }
            if (down >= 0) {
                minus[s] = gradient(static_cast<std::size_t>(down)) - (u[s] - u[static_cast<std::size_t>(down)]) / h;
            }
            abs_terms[s] = std::abs(plus[s]) + std::abs(minus[s]);
            weighted_terms[s] = abs_terms[s] * weight_[s];
        }
        out.l1 += parallel::pairwise_sum(abs_terms) * lattice_->cell_volume();
        out.l1_weighted += parallel::pairwise_sum(weighted_terms) * lattice_->cell_volume();
        out.plus.push_back(std::move(plus));
        out.minus.push_back(std::move(minus));
    }
    return out;
}

LinearizedCoeffs Scheme::linearized_coeffs(const Field& u) const {
    const DiffPair dq = diff_matrices(u);
    const std::size_t ne = num_edges();
    const std::size_t ns = lattice_->size();
    LinearizedCoeffs out{lattice_, ne, std::vector<double>(ns * ne), std::vector<double>(ns * ne)};
    const HamiltonianSpec& spec = config_.hamiltonian;
    parallel::parallel_for(ns, [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            for (std::size_t e = 0; e < ne; ++e) {
                const double c = coeff_[s * ne + e];
                out.a[s * ne + e] = edge_dp(spec, c, dq.p(s, e));
                out.b[s * ne + e] = edge_dq(spec, c, dq.q(s, e));
            }
        }
    });
    return out;
}

SolveResult Scheme::solve(const SolveOptions& options) const {
    const double T = config_.problem.T;
    std::vector<double> stops;
    for (double t : options.sample_times) {
        if (t > 0.0 && t < T) stops.push_back(t);
    }
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
    stops.push_back(T);

    SolveResult result;
    Field u = initial();
    double t = 0.0;
    std::size_t level = 0;
    std::size_t next_stop = 0;
    const double snap = 1e-12 * T;

    auto record = [&](double dt) {
        const Diagnostics diag = diagnostics(u);
        result.timeline.times.push_back(t);
        result.timeline.m1.push_back(diag.m1);
        result.timeline.m2.push_back(diag.m2);
        result.timeline.linf.push_back(max_abs(u));
        result.timeline.dt.push_back(dt);
        const DiffPair dq = diff_matrices(u);
        for (double v : dq.forward) result.max_quotient = std::max(result.max_quotient, std::abs(v));
        for (double v : dq.backward) result.max_quotient = std::max(result.max_quotient, std::abs(v));
        if (options.track_remainders) {
            result.max_remainder_l1 = std::max(result.max_remainder_l1, remainders(u).l1);
        }
        if (options.observer) options.observer(level, t, dt, u);
    };

    while (next_stop < stops.size()) {
        const double stop = stops[next_stop];
        double dt = cfl_dt(u);
        bool lands = false;
        if (t + dt >= stop - snap) {
            dt = stop - t;
            lands = true;
        }
        record(dt);
        Field next = step(u, dt);
        for (double v : next.values) {
            if (!std::isfinite(v)) {
                throw DivergenceError("non-finite value after step " + std::to_string(level) + " (t=" +
                                          std::to_string(t) + ")",
                                      level);
            }
        }
        u = std::move(next);
        ++level;
        if (lands) {
            t = stop;
            if (next_stop + 1 < stops.size()) {
                result.sample_times.push_back(t);
                result.samples.push_back(u);
            }
            ++next_stop;
        } else {
            t += dt;
        }
    }
    record(0.0);
    result.steps = level;
    result.final = std::move(u);
    return result;
}

double calibrate_r0(SolverConfig config, std::optional<double> gamma_override) {
    auto with_r0 = [&](double r0) {
        config.hamiltonian.r0 = r0;
        config.hamiltonian.gamma = gamma_override.value_or(2.0 * r0);
    };
    constexpr double kFloor = 1e-3;
    with_r0(1.0);
    Scheme probe(config);
    const DiffPair dq0 = probe.diff_matrices(probe.initial());
    double initial_max = 0.0;
    for (double v : dq0.forward) initial_max = std::max(initial_max, std::abs(v));
    for (double v : dq0.backward) initial_max = std::max(initial_max, std::abs(v));

    with_r0(1.5 * std::max(initial_max, kFloor));
    const SolveResult pre = Scheme(config).solve();
    return 1.5 * std::max(pre.max_quotient, kFloor);
}

}  // namespace hjgraph
