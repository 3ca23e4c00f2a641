#include "hjgraph/adjoint.hpp"

#include "hjgraph/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjgraph {

CoefficientTape CoefficientTape::record(const Scheme& scheme, std::size_t max_snapshots) {
    if (max_snapshots < 2) throw std::invalid_argument("max_snapshots must be >= 2");
    CoefficientTape tape;
    tape.scheme_ = &scheme;
    bool overflow = false;
    SolveOptions options;
    options.observer = [&](std::size_t, double t, double dt, const Field& u) {
        tape.times_.push_back(t);
        tape.dts_.push_back(dt);
        if (overflow) return;
        if (tape.full_.size() + 1 > max_snapshots) {
            overflow = true;
            tape.full_.clear();
            tape.full_.shrink_to_fit();
            return;
        }
        tape.full_.push_back(scheme.linearized_coeffs(u));
    };
    scheme.solve(options);
    if (!overflow) return tape;

    // Checkpoints and one regenerated segment together stay within max_snapshots.
    const std::size_t levels = tape.times_.size();
    const std::size_t half = std::max<std::size_t>(1, max_snapshots / 2);
    tape.stride_ = (levels + half - 1) / half;
    Field u = scheme.initial();
    for (std::size_t n = 0; n < levels; ++n) {
        if (n % tape.stride_ == 0) tape.checkpoints_.push_back(u);
        if (tape.dts_[n] > 0.0) u = scheme.step(u, tape.dts_[n]);
    }
    return tape;
}

const LinearizedCoeffs& CoefficientTape::coeffs(std::size_t level) const {
    if (level >= levels()) throw std::out_of_range("tape level out of range");
    if (stride_ == 0) return full_[level];
    const std::size_t segment = level / stride_;
    if (segment != cached_segment_) {
        segment_.clear();
        Field u = checkpoints_[segment];
        const std::size_t begin = segment * stride_;
        const std::size_t end = std::min(levels(), begin + stride_);
        for (std::size_t n = begin; n < end; ++n) {
            segment_.push_back(scheme_->linearized_coeffs(u));
            if (n + 1 < end) u = scheme_->step(u, dts_[n]);
        }
        cached_segment_ = segment;
    }
    return segment_[level - segment * stride_];
}

Field linearized_apply(const Scheme& scheme, const LinearizedCoeffs& coeffs, const Field& phi) {
    if (!same_lattice(phi, Field(scheme.lattice_ptr()))) {
        throw std::invalid_argument("linearized_apply: field lives on a different lattice");
    }
    const Lattice& lat = scheme.lattice();
    const std::size_t ne = scheme.num_edges();
    const double inv_h = 1.0 / lat.h();
    Field out(scheme.lattice_ptr());
    parallel::parallel_for(lat.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            double acc = 0.0;
            for (std::size_t e = 0; e < ne; ++e) {
                const auto up = scheme.neighbour(s, e, +1);
                const auto down = scheme.neighbour(s, e, -1);
                const double dplus = up >= 0 ? phi[static_cast<std::size_t>(up)] - phi[s] : 0.0;
                const double dminus = down >= 0 ? phi[s] - phi[static_cast<std::size_t>(down)] : 0.0;
                acc += scheme.sqrt_omega(e) * inv_h * (coeffs.A(s, e) * dplus + coeffs.B(s, e) * dminus);
            }
            out[s] = acc;
        }
    });
    return out;
}

namespace {

std::pair<double, double> min_max(const Field& f) {
    const auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
    return {*lo, *hi};
}

}  // namespace

DualTrajectory forward_dual_solve(const CoefficientTape& tape, const Field& f, std::size_t start) {
    if (start >= tape.levels()) throw std::out_of_range("forward_dual_solve: start level out of range");
    const double tol = 1e-12 * (1.0 + max_abs(f));
    DualTrajectory out;
    Field phi = f;
    auto [lo, hi] = min_max(phi);
    for (std::size_t n = start; n < tape.levels(); ++n) {
        out.times.push_back(tape.time(n));
        out.phi.push_back(phi);
        out.min.push_back(lo);
        out.max.push_back(hi);
        const double dt = tape.dt(n);
        if (dt == 0.0) break;
        const Field lphi = linearized_apply(tape.scheme(), tape.coeffs(n), phi);
        for (std::size_t s = 0; s < phi.size(); ++s) phi[s] -= dt * lphi[s];
        const auto [nlo, nhi] = min_max(phi);
        if (nlo < lo - tol || nhi > hi + tol) {
            throw MaxPrincipleError("maximum principle violated at step " + std::to_string(n) + " (t=" +
                                        std::to_string(tape.time(n)) + "); check the CFL factor",
                                    n);
        }
        lo = nlo;
        hi = nhi;
    }
    return out;
}

AdjointState make_state(Field rho, const Field& weight) {
    AdjointState state{Field(rho.lattice), std::move(rho)};
    for (std::size_t s = 0; s < state.rho.size(); ++s) {
        state.sigma[s] = weight[s] > 0.0 ? state.rho[s] / weight[s] : 0.0;
    }
    return state;
}

namespace {

// One backward step rho_{n+1} -> rho_n, written as a nonnegative combination.
Field adjoint_step(const Scheme& scheme, const LinearizedCoeffs& coeffs, const Field& rho, double dt) {
    const Lattice& lat = scheme.lattice();
    const std::size_t ne = scheme.num_edges();
    const double inv_h = 1.0 / lat.h();
    Field out(scheme.lattice_ptr());
    parallel::parallel_for(lat.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t s = begin; s < end; ++s) {
            double outflow = 0.0;
            double inflow = 0.0;
            for (std::size_t e = 0; e < ne; ++e) {
                const double k = scheme.sqrt_omega(e) * inv_h;
                outflow += k * (coeffs.B(s, e) - coeffs.A(s, e));
                const auto up = scheme.neighbour(s, e, +1);
                const auto down = scheme.neighbour(s, e, -1);
                if (down >= 0) {
                    const auto y = static_cast<std::size_t>(down);
                    inflow -= k * coeffs.A(y, e) * rho[y];
                }
                if (up >= 0) {
                    const auto y = static_cast<std::size_t>(up);
                    inflow += k * coeffs.B(y, e) * rho[y];
                }
            }
            out[s] = rho[s] * (1.0 - dt * outflow) + dt * inflow;
        }
    });
    return out;
}

}  // namespace

AdjointResult adjoint_backward_solve(const CoefficientTape& tape, const AdjointTerminal& terminal,
                                     const AdjointOptions& options) {
    const Scheme& scheme = tape.scheme();
    const Lattice& lat = scheme.lattice();
    const Field& weight = scheme.weight();

    Field rho(scheme.lattice_ptr());
    if (terminal.kind == AdjointTerminal::Kind::Dirac) {
        if (terminal.site >= lat.size()) throw std::invalid_argument("Dirac site index out of range");
        if (lat.on_boundary(terminal.site) || weight[terminal.site] <= 0.0) {
            throw std::invalid_argument("Dirac site " + std::to_string(terminal.site) +
                                        " lies on the boundary (w = 0)");
        }
        rho[terminal.site] = 1.0 / lat.cell_volume();
    } else {
        if (!same_lattice(terminal.nu, rho)) throw std::invalid_argument("terminal nu lives on a different lattice");
        for (std::size_t s = 0; s < lat.size(); ++s) rho[s] = terminal.nu[s] * weight[s];
    }

    const std::size_t levels = tape.levels();
    AdjointResult result;
    ConservationTimeline tl;
    std::vector<Field> kept;

    auto record = [&](std::size_t level, const AdjointState& state) {
        double min_sigma = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < lat.size(); ++s) {
            if (weight[s] > 0.0) min_sigma = std::min(min_sigma, state.sigma[s]);
        }
        tl.t.push_back(tape.time(level));
        tl.mass.push_back(lattice_integral(state.rho));
        tl.min_sigma.push_back(min_sigma);
        tl.max_wsigma.push_back(max_abs(state.rho));
        if (options.keep_levels) kept.push_back(state.rho);
        if (options.observer) options.observer(level, tape.time(level), state);
    };

    AdjointState state = make_state(rho, weight);
    result.terminal = state;
    record(levels - 1, state);
    for (std::size_t n = levels - 1; n-- > 0;) {
        Field next = adjoint_step(scheme, tape.coeffs(n), state.rho, tape.dt(n));
        const double scale = max_abs(next);
        for (double v : next.values) {
            if (v < -1e-12 * scale) {
                throw std::runtime_error("adjoint density went negative at step " + std::to_string(n));
            }
        }
        state = make_state(std::move(next), weight);
        record(n, state);
    }
    result.initial = state;

    std::reverse(tl.t.begin(), tl.t.end());
    std::reverse(tl.mass.begin(), tl.mass.end());
    std::reverse(tl.min_sigma.begin(), tl.min_sigma.end());
    std::reverse(tl.max_wsigma.begin(), tl.max_wsigma.end());
    std::reverse(kept.begin(), kept.end());
    result.timeline = std::move(tl);
    result.rho_levels = std::move(kept);
    return result;
}

namespace {

template <typename Body>
Field interior_map(const Scheme& scheme, const Field& weight, Body body) {
    Field out(scheme.lattice_ptr());
    for (std::size_t s = 0; s < out.size(); ++s) {
        if (weight[s] > 0.0) out[s] = body(s);
    }
    return out;
}

}  // namespace

Field adjoint_conservative(const Scheme& scheme, const LinearizedCoeffs& coeffs, const Field& weight,
                           const Field& sigma) {
    const double inv_h = 1.0 / scheme.lattice().h();
    const std::size_t ne = scheme.num_edges();
    auto flux_a = [&](std::int64_t y, std::size_t e) {
        if (y < 0) return 0.0;
        const auto k = static_cast<std::size_t>(y);
        return sigma[k] * coeffs.A(k, e) * weight[k];
    };
    auto flux_b = [&](std::int64_t y, std::size_t e) {
        if (y < 0) return 0.0;
        const auto k = static_cast<std::size_t>(y);
        return sigma[k] * coeffs.B(k, e) * weight[k];
    };
    return interior_map(scheme, weight, [&](std::size_t s) {
        const auto x = static_cast<std::int64_t>(s);
        double acc = 0.0;
        for (std::size_t e = 0; e < ne; ++e) {
            const auto up = scheme.neighbour(s, e, +1);
            const auto down = scheme.neighbour(s, e, -1);
            acc += scheme.sqrt_omega(e) * inv_h *
                   ((flux_a(x, e) - flux_a(down, e)) + (flux_b(up, e) - flux_b(x, e)));
        }
        return acc / weight[s];
    });
}

Field adjoint_decomposed(const Scheme& scheme, const LinearizedCoeffs& coeffs, const Field& weight,
                         const Field& sigma) {
    const double inv_h = 1.0 / scheme.lattice().h();
    const std::size_t ne = scheme.num_edges();
    auto sa = [&](std::int64_t y, std::size_t e) {
        return y < 0 ? 0.0 : sigma[static_cast<std::size_t>(y)] * coeffs.A(static_cast<std::size_t>(y), e);
    };
    auto sb = [&](std::int64_t y, std::size_t e) {
        return y < 0 ? 0.0 : sigma[static_cast<std::size_t>(y)] * coeffs.B(static_cast<std::size_t>(y), e);
    };
    auto w_at = [&](std::int64_t y, std::size_t s) { return y < 0 ? weight[s] : weight[static_cast<std::size_t>(y)]; };
    return interior_map(scheme, weight, [&](std::size_t s) {
        const auto x = static_cast<std::int64_t>(s);
        double transport = 0.0;
        double drift = 0.0;
        for (std::size_t e = 0; e < ne; ++e) {
            const double k = scheme.sqrt_omega(e) * inv_h;
            const auto up = scheme.neighbour(s, e, +1);
            const auto down = scheme.neighbour(s, e, -1);
            transport += k * ((sa(x, e) - sa(down, e)) + (sb(up, e) - sb(x, e)));
            const double dminus_w = weight[s] - w_at(down, s);
            const double dplus_w = w_at(up, s) - weight[s];
            drift += k * (dminus_w / weight[s] * sa(down, e) + dplus_w / weight[s] * sb(up, e));
        }
        return transport + drift;
    });
}

IbpResult ibp_check(const Lattice& lattice, VertexPair pair, double sqrt_omega, const Field& weight,
                    const Field& phi, const Field& flux_a, const Field& flux_b) {
    const std::size_t n = lattice.size();
    if (weight.size() != n || phi.size() != n || flux_a.size() != n || flux_b.size() != n) {
        throw std::invalid_argument("ibp_check: field sizes do not match the lattice");
    }
    const double k = sqrt_omega / lattice.h();
    std::vector<double> lhs(n), rhs(n), abs_terms(n);
    for (std::size_t s = 0; s < n; ++s) {
        const auto up = lattice.neighbour(s, pair, +1);
        const auto down = lattice.neighbour(s, pair, -1);
        const double dplus_phi = up >= 0 ? phi[static_cast<std::size_t>(up)] - phi[s] : 0.0;
        const double dminus_phi = down >= 0 ? phi[s] - phi[static_cast<std::size_t>(down)] : 0.0;
        const double l = weight[s] * (flux_a[s] * dplus_phi + flux_b[s] * dminus_phi);

        const double aw = flux_a[s] * weight[s];
        const double bw = flux_b[s] * weight[s];
        const double aw_down = down >= 0 ? flux_a[static_cast<std::size_t>(down)] * weight[static_cast<std::size_t>(down)] : 0.0;
        const double bw_up = up >= 0 ? flux_b[static_cast<std::size_t>(up)] * weight[static_cast<std::size_t>(up)] : 0.0;
        const double r = -phi[s] * ((aw - aw_down) + (bw_up - bw));

        lhs[s] = k * l;
        rhs[s] = k * r;
        abs_terms[s] = std::abs(lhs[s]) + std::abs(rhs[s]);
    }
    IbpResult result;
    result.lhs = parallel::pairwise_sum(lhs) * lattice.cell_volume();
    result.rhs = parallel::pairwise_sum(rhs) * lattice.cell_volume();
    result.scale = parallel::pairwise_sum(abs_terms) * lattice.cell_volume();
    result.residual = std::abs(result.lhs - result.rhs);
    return result;
}

IbpResult ibp_check(const Scheme& scheme, const LinearizedCoeffs& coeffs, std::size_t edge, const Field& weight,
                    const Field& phi, const Field& sigma) {
    Field fa(scheme.lattice_ptr());
    Field fb(scheme.lattice_ptr());
    for (std::size_t s = 0; s < fa.size(); ++s) {
        fa[s] = sigma[s] * coeffs.A(s, edge);
        fb[s] = sigma[s] * coeffs.B(s, edge);
    }
    return ibp_check(scheme.lattice(), scheme.pair(edge), scheme.sqrt_omega(edge), weight, phi, fa, fb);
}

double duality_check(const CoefficientTape& tape, std::size_t site, const TestFunction& phi) {
    const Scheme& scheme = tape.scheme();
    const Lattice& lat = scheme.lattice();
    AdjointOptions options;
    options.keep_levels = true;
    const AdjointResult adj = adjoint_backward_solve(tape, AdjointTerminal::dirac(site), options);

    auto sample = [&](const std::function<double(double, const SimplexPoint&)>& f, double t) {
        Field out(scheme.lattice_ptr());
        for (std::size_t s = 0; s < lat.size(); ++s) out[s] = f(t, lat.xi(s));
        return out;
    };

    const std::size_t levels = tape.levels();
    std::vector<double> integrand(levels);
    for (std::size_t n = 0; n < levels; ++n) {
        const double t = tape.time(n);
        const Field value = sample(phi.value, t);
        const Field rate = sample(phi.time_derivative, t);
        const Field lphi = linearized_apply(scheme, tape.coeffs(n), value);
        Field terms(scheme.lattice_ptr());
        for (std::size_t s = 0; s < lat.size(); ++s) terms[s] = adj.rho_levels[n][s] * (rate[s] + lphi[s]);
        integrand[n] = lattice_integral(terms);
    }
    double integral = 0.0;
    for (std::size_t n = 0; n + 1 < levels; ++n) {
        integral += 0.5 * tape.dt(n) * (integrand[n] + integrand[n + 1]);
    }
    const Field phi0 = sample(phi.value, 0.0);
    Field start(scheme.lattice_ptr());
    for (std::size_t s = 0; s < lat.size(); ++s) start[s] = adj.initial.rho[s] * phi0[s];
    const double terminal = phi.value(tape.time(levels - 1), lat.xi(site));
    return std::abs(integral - terminal + lattice_integral(start));
}

}  // namespace hjgraph
