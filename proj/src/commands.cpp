#include "hjgraph/commands.hpp"

#include "hjgraph/adjoint.hpp"
#include "hjgraph/config.hpp"
#include "hjgraph/convergence.hpp"
#include "hjgraph/format.hpp"
#include "hjgraph/parallel.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <ostream>
#include <random>

namespace hjgraph {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

void write_resolved(const fs::path& dir, const RunConfig& config) {
    auto os = open_output(dir / "resolved_config.json");
    os << resolved_config(config);
}

int cmd_solve(RunConfig& config, const fs::path& dir, std::ostream& out) {
    resolve_r0(config);
    write_resolved(dir, config);
    const Scheme scheme(config.solver);
    const SolveResult result = scheme.solve();
    {
        auto os = open_output(dir / "field.csv");
        write_field_csv(os, result.final);
    }
    {
        auto os = open_output(dir / "diagnostics.csv");
        const auto& tl = result.timeline;
        os << "t,m1,m2,linf,dt\n";
        for (std::size_t k = 0; k < tl.times.size(); ++k) {
            os << format_real(tl.times[k]) << ',' << format_real(tl.m1[k]) << ',' << format_real(tl.m2[k]) << ','
               << format_real(tl.linf[k]) << ',' << format_real(tl.dt[k]) << '\n';
        }
    }
    out << "solve: N=" << config.solver.N << " steps=" << result.steps
        << " r0=" << format_real(config.solver.hamiltonian.r0) << '\n';
    return kExitOk;
}

AdjointTerminal make_terminal(const RunConfig& config, const Scheme& scheme) {
    if (config.run.terminal == RunSection::Terminal::Uniform) {
        return AdjointTerminal::general(Field(scheme.lattice_ptr(), 1.0));
    }
    return AdjointTerminal::dirac(dirac_site(config, scheme.lattice()));
}

int cmd_adjoint(RunConfig& config, const fs::path& dir, std::ostream& out) {
    resolve_r0(config);
    write_resolved(dir, config);
    const Scheme scheme(config.solver);
    const AdjointTerminal terminal = make_terminal(config, scheme);
    const CoefficientTape tape = CoefficientTape::record(scheme, config.run.max_snapshots);
    const AdjointResult result = adjoint_backward_solve(tape, terminal);
    {
        auto os = open_output(dir / "sigma.csv");
        write_field_csv(os, result.initial.sigma);
    }
    {
        auto os = open_output(dir / "rho.csv");
        write_field_csv(os, result.initial.rho);
    }
    {
        auto os = open_output(dir / "conservation.csv");
        const auto& tl = result.timeline;
        os << "t,mass,min_sigma,max_wsigma\n";
        for (std::size_t k = 0; k < tl.t.size(); ++k) {
            os << format_real(tl.t[k]) << ',' << format_real(tl.mass[k]) << ',' << format_real(tl.min_sigma[k])
               << ',' << format_real(tl.max_wsigma[k]) << '\n';
        }
    }
    out << "adjoint: levels=" << tape.levels() << " mass(0)=" << format_real(result.timeline.mass.front()) << '\n';
    return kExitOk;
}

int cmd_converge(RunConfig& config, const fs::path& dir, std::ostream& out) {
    StudyOptions options;
    options.auto_r0 = config.auto_r0;
    options.gamma = config.gamma;
    const ConvergenceReport report = refinement_study(config.solver, config.run.N_list, options);
    config.solver.hamiltonian.r0 = report.r0;
    config.solver.hamiltonian.gamma = report.gamma;
    config.auto_r0 = false;
    write_resolved(dir, config);
    {
        auto os = open_output(dir / "rates.csv");
        write_rates_csv(os, report);
    }
    {
        auto os = open_output(dir / "rates.json");
        write_rates_json(os, report);
    }
    out << "converge: reference N=" << report.reference_N;
    if (report.l1w) out << " l1w slope=" << format_real(report.l1w->slope);
    out << '\n';
    for (const auto& level : report.levels) {
        if (level.diverged) out << "  N=" << level.N << " diverged: " << level.message << '\n';
    }
    return kExitOk;
}

struct AuditLine {
    std::string name;
    bool ok = true;
    double value = 0.0;
    double limit = 0.0;
    std::string detail;
};

Field random_field(const std::shared_ptr<const Lattice>& lattice, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Field f(lattice);
    for (auto& v : f.values) v = dist(rng);
    return f;
}

int cmd_audit(RunConfig& config, const fs::path& dir, std::ostream& out) {
    resolve_r0(config);
    write_resolved(dir, config);
    const SolverConfig& sc = config.solver;
    std::vector<AuditLine> lines;
    std::mt19937_64 rng(config.run.seed);

    {
        const AuditReport a = audit_assumptions(sc.hamiltonian, sc.graph, sc.metric, 10000, config.run.seed);
        AuditLine line{"assumptions", a.ok(), a.max_consistency_residual, 1e-12, ""};
        line.detail = "violations=" + std::to_string(a.violations.size()) +
                      " lipschitz=" + format_real(a.max_lipschitz_ratio) + "/" + format_real(a.lipschitz_bound) +
                      " hessian_ratio=" + format_real(a.max_hessian_ratio);
        if (!a.violations.empty()) line.detail += " first=" + a.violations.front().property;
        lines.push_back(line);
    }

    const Scheme scheme(sc);
    const SolveResult solve = scheme.solve();
    {
        const double u0 = max_abs(scheme.initial());
        const double f = max_abs(scheme.potential());
        double excess = -std::numeric_limits<double>::infinity();
        const auto& tl = solve.timeline;
        for (std::size_t k = 0; k < tl.times.size(); ++k) {
            excess = std::max(excess, tl.linf[k] - (u0 + tl.times[k] * f));
        }
        lines.push_back({"linf_bound", excess <= 1e-10, excess, 1e-10, "max_t |u|_inf - (|U0| + t|F|)"});
    }

    {
        const LinearizedCoeffs coeffs = scheme.linearized_coeffs(scheme.initial());
        double worst = 0.0;
        bool ok = true;
        for (int trial = 0; trial < 20; ++trial) {
            const Field phi = random_field(scheme.lattice_ptr(), rng, -1.0, 1.0);
            const Field sigma = random_field(scheme.lattice_ptr(), rng, 0.0, 1.0);
            for (std::size_t e = 0; e < scheme.num_edges(); ++e) {
                const IbpResult r = ibp_check(scheme, coeffs, e, scheme.weight(), phi, sigma);
                const double rel = r.scale > 0.0 ? r.residual / r.scale : r.residual;
                worst = std::max(worst, rel);
                if (r.residual > 1e-12 * r.scale) ok = false;
            }
        }
        lines.push_back({"ibp_identity", ok, worst, 1e-12, "residual / scale"});
    }

    const CoefficientTape tape = CoefficientTape::record(scheme, config.run.max_snapshots);
    {
        const std::size_t site = dirac_site(config, scheme.lattice());
        AdjointResult adj;
        try {
            adj = adjoint_backward_solve(tape, AdjointTerminal::dirac(site));
        } catch (const std::runtime_error& e) {
            lines.push_back({"mass_conservation", false, 0.0, 1e-8, std::string("not evaluated: ") + e.what()});
            lines.push_back({"adjoint_nonnegative", false, 0.0, -1e-12, e.what()});
        }
        double drift = 0.0;
        double min_sigma = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < adj.timeline.t.size(); ++k) {
            drift = std::max(drift, std::abs(adj.timeline.mass[k] - 1.0));
            min_sigma = std::min(min_sigma, adj.timeline.min_sigma[k]);
        }
        if (!adj.timeline.t.empty()) {
            lines.push_back({"mass_conservation", drift <= 1e-8, drift, 1e-8, "site " + std::to_string(site)});
            lines.push_back({"adjoint_nonnegative", min_sigma >= -1e-12, min_sigma, -1e-12, "min sigma"});
        }
    }

    {
        bool ok = true;
        std::string detail = "5 random nonnegative data";
        for (int trial = 0; trial < 5 && ok; ++trial) {
            const Field f = random_field(scheme.lattice_ptr(), rng, 0.0, 1.0);
            try {
                forward_dual_solve(tape, f);
            } catch (const MaxPrincipleError& e) {
                ok = false;
                detail = e.what();
            }
        }
        lines.push_back({"max_principle", ok, 0.0, 1e-12, detail});
    }

    bool all = true;
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& line : lines) {
        all = all && line.ok;
        out << (line.ok ? "PASS " : "FAIL ") << line.name << " value=" << format_real(line.value)
            << " limit=" << format_real(line.limit) << " " << line.detail << '\n';
        doc.push_back({{"name", line.name},
                       {"ok", line.ok},
                       {"value", line.value},
                       {"limit", line.limit},
                       {"detail", line.detail}});
    }
    auto os = open_output(dir / "audit.json");
    os << doc.dump(2) << '\n';
    return all ? kExitOk : kExitAuditViolation;
}

}  // namespace

int run_command(const CommandOptions& options, std::ostream& out, std::ostream& err) {
    try {
        RunConfig config = load_config(options.config);
        fs::path dir = options.out.empty() ? fs::path(config.run.output_dir) : options.out;
        if (dir.empty()) {
            err << "error: no output directory (use --out or run.output_dir)\n";
            return kExitConfig;
        }
        if (!options.out.empty()) config.run.output_dir = options.out.string();
        fs::create_directories(dir);
        parallel::set_threads(options.threads.value_or(config.run.threads));

        if (options.subcommand == "solve") return cmd_solve(config, dir, out);
        if (options.subcommand == "adjoint") return cmd_adjoint(config, dir, out);
        if (options.subcommand == "converge") return cmd_converge(config, dir, out);
        if (options.subcommand == "audit") return cmd_audit(config, dir, out);
        err << "error: unknown subcommand '" << options.subcommand << "'\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DivergenceError& e) {
        err << "diverged: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const MaxPrincipleError& e) {
        err << "diverged: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::length_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDivergence;
    }
}

}  // namespace hjgraph
