// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "hjgraph/adjoint.hpp"
#include "hjgraph/convergence.hpp"
#include "hjgraph/format.hpp"
#include "hjgraph/hamiltonian.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace hjgraph;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    std::cout << (ok ? "PASS " : "FAIL ") << id << ' ' << name << ": " << detail << std::endl;
}

void info(const std::string& text) { std::cout << "     " << text << std::endl; }

const MetricKind kMetrics[] = {MetricKind::Average, MetricKind::Logarithmic, MetricKind::Harmonic};
const SchemeKind kSchemes[] = {SchemeKind::LaxFriedrichs, SchemeKind::OsherSethian};

HamiltonianSpec spec_for(SchemeKind kind, double r0) {
    return kind == SchemeKind::LaxFriedrichs ? HamiltonianSpec::lax_friedrichs(r0)
                                             : HamiltonianSpec::osher_sethian(r0);
}

// Acceptance problem: U0 = xi_1^2, F = 0, T = 0.5, polynomial weight alpha = 1.
SolverConfig acceptance_config(int d, int N, SchemeKind kind) {
    SolverConfig c;
    c.graph = Graph::complete(d);
    c.metric = MetricKind::Average;
    c.N = N;
    c.hamiltonian = spec_for(kind, 1.0);
    c.weight = WeightSpec::polynomial(1.0);
    c.problem.u0 = ProblemSpec::InitialDatum::Quadratic;
    c.problem.potential = ProblemSpec::Potential::Zero;
    c.problem.T = 0.5;
    return c;
}

SolverConfig calibrated(SolverConfig c) {
    const double r0 = calibrate_r0(c);
    c.hamiltonian = spec_for(c.hamiltonian.scheme, r0);
    return c;
}

Field random_field(const std::shared_ptr<const Lattice>& lattice, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Field f(lattice);
    for (auto& v : f.values) v = dist(rng);
    return f;
}

std::vector<std::size_t> interior_sites(const Lattice& lattice) {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < lattice.size(); ++s) {
        if (!lattice.on_boundary(s)) out.push_back(s);
    }
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

// 1. G(xi, P, P) = H(xi, P).
void consistency() {
    const auto start = Clock::now();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> pdist(-5.0, 5.0);
    double worst = 0.0;
    std::size_t count = 0;
    for (int d : {2, 3}) {
        const Graph graph = Graph::complete(d);
        for (SchemeKind scheme : kSchemes) {
            const auto spec = spec_for(scheme, 5.0);
            for (MetricKind metric : kMetrics) {
                for (int n = 0; n < 10000; ++n) {
                    const SimplexPoint xi = random_interior_point(d, rng);
                    EdgeValues p(graph.num_edges());
                    for (auto& v : p) v = pdist(rng);
                    const double h = continuous_H(graph, metric, xi, p);
                    const double g = numerical_G(spec, graph, metric, xi, p, p);
                    worst = std::max(worst, std::abs(g - h) / (1.0 + std::abs(h)));
                    ++count;
                }
            }
        }
    }
    const double t = seconds_since(start);
    report(1, "consistency", worst <= 1e-12 && t < 1.0,
           "max |G(P,P)-H|/(1+|H|) = " + format_real(worst) + " (limit 1e-12) over " + std::to_string(count) +
               " samples, " + fmt(t) + " s (limit 1 s)");
}

// 2. Partial-derivative signs on a 20^3 grid of (xi, p, q).
void monotonicity() {
    const auto start = Clock::now();
    constexpr int kGrid = 20;
    const double r0 = 3.0;
    std::size_t violations = 0;
    std::size_t checks = 0;
    for (int d : {2, 3}) {
        const Graph graph = Graph::complete(d);
        for (SchemeKind scheme : kSchemes) {
            const auto spec = spec_for(scheme, r0);
            for (MetricKind metric : kMetrics) {
                for (int a = 0; a < kGrid; ++a) {
                    // Interior points along a curve through the simplex.
                    const double x = (a + 0.5) / kGrid;
                    std::vector<double> xi;
                    if (d == 2) {
                        xi = {x, 1.0 - x};
                    } else {
                        xi = {0.5 * x, 0.5 * (1.0 - x) + 0.25 * x, 0.5 - 0.25 * x};
                    }
                    const SimplexPoint point(xi);
                    for (int b = 0; b < kGrid; ++b) {
                        const double p = -r0 + 2.0 * r0 * b / (kGrid - 1);
                        for (int c = 0; c < kGrid; ++c) {
                            const double q = -r0 + 2.0 * r0 * c / (kGrid - 1);
                            const EdgeValues pv(graph.num_edges(), p);
                            const EdgeValues qv(graph.num_edges(), q);
                            for (std::size_t e = 0; e < graph.num_edges(); ++e) {
                                if (dG_dp(spec, graph, metric, point, pv, qv, e) > 0.0) ++violations;
                                if (dG_dq(spec, graph, metric, point, pv, qv, e) < 0.0) ++violations;
                                checks += 2;
                            }
                        }
                    }
                }
            }
        }
    }
    const double t = seconds_since(start);
    report(2, "monotonicity", violations == 0 && t < 1.0,
           std::to_string(violations) + " sign violations in " + std::to_string(checks) + " checks, " + fmt(t) +
               " s (limit 1 s)");
}

// 3. Weighted summation by parts on the lattice.
void ibp_identity() {
    const auto start = Clock::now();
    std::mt19937_64 rng(3);
    double worst = 0.0;
    std::size_t count = 0;
    for (int d : {2, 3}) {
        for (int N : {8, 16}) {
            for (const WeightSpec& ws : {WeightSpec::polynomial(1.0), WeightSpec::exponential(1.0)}) {
                SolverConfig cfg = acceptance_config(d, N, SchemeKind::LaxFriedrichs);
                cfg.hamiltonian = HamiltonianSpec::lax_friedrichs(3.0);
                cfg.weight = ws;
                const Scheme scheme(cfg);
                const LinearizedCoeffs coeffs = scheme.linearized_coeffs(scheme.initial());
                for (int n = 0; n < 100; ++n) {
                    const Field phi = random_field(scheme.lattice_ptr(), rng, -1.0, 1.0);
                    const Field sigma = random_field(scheme.lattice_ptr(), rng, 0.0, 1.0);
                    for (std::size_t e = 0; e < scheme.num_edges(); ++e) {
                        const IbpResult r = ibp_check(scheme, coeffs, e, scheme.weight(), phi, sigma);
                        worst = std::max(worst, r.scale > 0.0 ? r.residual / r.scale : r.residual);
                        ++count;
                    }
                }
            }
        }
    }
    const double t = seconds_since(start);
    report(3, "weighted_ibp", worst <= 1e-12 && t < 5.0,
           "max residual/scale = " + format_real(worst) + " (limit 1e-12) over " + std::to_string(count) +
               " edge checks, " + fmt(t) + " s (limit 5 s)");
}

// 4. Dirac terminals keep unit mass at every stored time.
void mass_conservation(double& linf_excess) {
    const auto start = Clock::now();
    std::mt19937_64 rng(4);
    double worst = 0.0;
    double min_sigma = 0.0;
    std::size_t runs = 0;
    for (auto [d, N] : {std::pair{2, 32}, std::pair{3, 16}}) {
        for (SchemeKind scheme_kind : kSchemes) {
            const Scheme scheme(calibrated(acceptance_config(d, N, scheme_kind)));
            const SolveResult fwd = scheme.solve();
            const double u0 = max_abs(scheme.initial());
            for (std::size_t k = 0; k < fwd.timeline.times.size(); ++k) {
                linf_excess = std::max(linf_excess, fwd.timeline.linf[k] - u0);
            }
            const CoefficientTape tape = CoefficientTape::record(scheme);
            auto sites = interior_sites(scheme.lattice());
            std::shuffle(sites.begin(), sites.end(), rng);
            for (std::size_t k = 0; k < 5; ++k) {
                const AdjointResult adj = adjoint_backward_solve(tape, AdjointTerminal::dirac(sites[k]));
                for (std::size_t n = 0; n < adj.timeline.t.size(); ++n) {
                    worst = std::max(worst, std::abs(adj.timeline.mass[n] - 1.0));
                    min_sigma = std::min(min_sigma, adj.timeline.min_sigma[n]);
                }
                ++runs;
            }
        }
    }
    const double t = seconds_since(start);
    report(4, "adjoint_mass", worst <= 1e-8 && t < 30.0,
           "max |mass-1| = " + format_real(worst) + " (limit 1e-8) over " + std::to_string(runs) +
               " Dirac runs, min sigma = " + format_real(min_sigma) + ", " + fmt(t) + " s (limit 30 s)");
}

// 5. Forward dual steps neither lower the min nor raise the max.
void max_principle() {
    const auto start = Clock::now();
    std::mt19937_64 rng(5);
    double worst = 0.0;
    std::size_t steps = 0;
    bool raised = false;
    std::string message;
    for (auto [d, N] : {std::pair{2, 32}, std::pair{3, 16}}) {
        for (SchemeKind scheme_kind : kSchemes) {
            SolverConfig cfg = calibrated(acceptance_config(d, N, scheme_kind));
            cfg.integrator = Integrator::Euler;
            const Scheme scheme(cfg);
            const CoefficientTape tape = CoefficientTape::record(scheme);
            for (int n = 0; n < 10; ++n) {
                const Field f = random_field(scheme.lattice_ptr(), rng, 0.0, 1.0);
                try {
                    const DualTrajectory dual = forward_dual_solve(tape, f);
                    for (std::size_t k = 1; k < dual.phi.size(); ++k) {
                        worst = std::max(worst, dual.min[k - 1] - dual.min[k]);
                        worst = std::max(worst, dual.max[k] - dual.max[k - 1]);
                        ++steps;
                    }
                } catch (const MaxPrincipleError& e) {
                    raised = true;
                    message = e.what();
                }
            }
        }
    }
    const double t = seconds_since(start);
    report(5, "max_principle", !raised && worst <= 1e-12 && t < 10.0,
           (raised ? message + "; " : std::string()) + "max overshoot = " + format_real(worst) +
               " (limit 1e-12) over " + std::to_string(steps) + " steps, 40 data, " + fmt(t) + " s (limit 10 s)");
}

struct Study {
    std::string label;
    ConvergenceReport report;
    double band_lo;
    double band_hi;
};

Study run_study(const std::string& label, SolverConfig base, std::vector<int> n_list, double lo, double hi) {
    StudyOptions opts;
    opts.auto_r0 = true;
    return {label, refinement_study(base, std::move(n_list), opts), lo, hi};
}

std::string level_errors(const ConvergenceReport& rep) {
    std::string out;
    for (const auto& l : rep.levels) {
        if (l.reference) continue;
        out += " N=" + std::to_string(l.N) + ":" + fmt(l.l1w_error);
    }
    return out;
}

}  // namespace

int main() {
    std::cout << "hjgraph acceptance suite" << std::endl;
    consistency();
    monotonicity();
    ibp_identity();
    double adjoint_excess = -1.0;
    mass_conservation(adjoint_excess);
    max_principle();

    const auto start = Clock::now();
    std::vector<Study> studies;
    studies.push_back(run_study("d=2 LF", acceptance_config(2, 8, SchemeKind::LaxFriedrichs), {8, 16, 32, 64, 128},
                                0.8, 1.25));
    studies.push_back(run_study("d=2 OS", acceptance_config(2, 8, SchemeKind::OsherSethian), {8, 16, 32, 64, 128},
                                0.75, 1.3));
    studies.push_back(run_study("d=3 LF", acceptance_config(3, 4, SchemeKind::LaxFriedrichs), {4, 8, 16, 32},
                                0.75, 1.3));
    const double study_time = seconds_since(start);

    // 6. L-infinity bound along every acceptance trajectory (F = 0).
    {
        double excess = adjoint_excess;
        for (const auto& s : studies) {
            for (const auto& l : s.report.levels) excess = std::max(excess, l.linf_excess);
        }
        report(6, "linf_bound", excess <= 1e-10,
               "max_t |u|_inf - (|U0|_inf + t|F|_inf) = " + format_real(excess) + " (limit 1e-10)");
    }

    // 7. First-order weighted-L1 rate against the finest grid.
    {
        bool ok = study_time < 300.0;
        std::string detail;
        for (const auto& s : studies) {
            const double slope = s.report.l1w ? s.report.l1w->slope : std::nan("");
            const bool in_band = slope >= s.band_lo && slope <= s.band_hi;
            ok = ok && in_band;
            detail += s.label + " slope " + fmt(slope) + " in [" + fmt(s.band_lo) + ", " + fmt(s.band_hi) + "] " +
                      (in_band ? "yes" : "NO") + "; ";
        }
        report(7, "first_order_rate", ok, detail + fmt(study_time) + " s (limit 300 s)");
        for (const auto& s : studies) {
            info(s.label + " R0=" + fmt(s.report.r0) + " l1w errors:" + level_errors(s.report));
            if (s.report.cauchy_l1w) info(s.label + " consecutive-level slope (not gated): " +
                                          fmt(s.report.cauchy_l1w->slope));
            if (s.report.sup_l1w) info(s.label + " sup-over-t slope (not gated): " + fmt(s.report.sup_l1w->slope));
        }
    }

    // 8. max_t M1 and max_t M2 are uniform in h.
    {
        bool ok = true;
        std::string detail;
        for (const auto& s : studies) {
            double m1_lo = INFINITY, m1_hi = 0.0, m2_lo = INFINITY, m2_hi = 0.0;
            for (const auto& l : s.report.levels) {
                m1_lo = std::min(m1_lo, l.max_m1);
                m1_hi = std::max(m1_hi, l.max_m1);
                m2_lo = std::min(m2_lo, l.max_m2);
                m2_hi = std::max(m2_hi, l.max_m2);
            }
            const double r1 = m1_hi / m1_lo;
            const double r2 = m2_hi / m2_lo;
            const double growth = s.report.levels.back().max_m2 / s.report.levels.front().max_m2;
            ok = ok && r1 < 2.0 && r2 < 2.0 && growth < 2.0;
            detail += s.label + " M1 ratio " + fmt(r1) + ", M2 ratio " + fmt(r2) + " (finest/coarsest M2 " +
                      fmt(growth) + "); ";
        }
        report(8, "uniform_diagnostics", ok, detail + "limit 2");
    }

    // 9. L1 remainder norm is O(h) on the d = 2 study.
    {
        const auto& rep = studies.front().report;
        const double slope = rep.remainder ? rep.remainder->slope : std::nan("");
        report(9, "remainder_rate", slope >= 0.8, "d=2 LF remainder slope " + fmt(slope) + " (limit >= 0.8)");
    }

    // 10. max_t |w sigma|_inf / |nu|_inf is uniform in h for nu = 1.
    {
        const auto t10 = Clock::now();
        std::vector<double> peaks;
        std::string detail;
        for (int N : {8, 16, 32}) {
            const Scheme scheme(calibrated(acceptance_config(2, N, SchemeKind::LaxFriedrichs)));
            const CoefficientTape tape = CoefficientTape::record(scheme);
            const AdjointResult adj =
                adjoint_backward_solve(tape, AdjointTerminal::general(Field(scheme.lattice_ptr(), 1.0)));
            const double peak = *std::max_element(adj.timeline.max_wsigma.begin(), adj.timeline.max_wsigma.end());
            peaks.push_back(peak);
            detail += "N=" + std::to_string(N) + ":" + fmt(peak) + " ";
        }
        const double ratio = *std::max_element(peaks.begin(), peaks.end()) / *std::min_element(peaks.begin(), peaks.end());
        report(10, "adjoint_linf_stability", ratio < 2.0,
               detail + "ratio " + fmt(ratio) + " (limit 2), " + fmt(seconds_since(t10)) + " s");
    }

    std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
