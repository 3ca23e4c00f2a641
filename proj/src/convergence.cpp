#include "hjgraph/convergence.hpp"

#include "hjgraph/format.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>

namespace hjgraph {

Field restrict_to(const Field& fine, const std::shared_ptr<const Lattice>& coarse) {
    const Lattice& f = *fine.lattice;
    if (f.d() != coarse->d()) throw std::invalid_argument("restrict_to: lattice dimensions differ");
    if (coarse->N() > f.N() || f.N() % coarse->N() != 0) {
        throw std::invalid_argument("restrict_to: N=" + std::to_string(coarse->N()) + " does not divide N=" +
                                    std::to_string(f.N()));
    }
    const int ratio = f.N() / coarse->N();
    Field out(coarse);
    std::vector<int> c(static_cast<std::size_t>(f.d() - 1));
    for (std::size_t s = 0; s < coarse->size(); ++s) {
        const auto cc = coarse->coords(s);
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = cc[k] * ratio;
        out[s] = fine[*f.find(c)];
    }
    return out;
}

RateFit fit_rate(std::span<const double> h, std::span<const double> e) {
    if (h.size() != e.size()) throw std::invalid_argument("fit_rate: h and e differ in length");
    if (h.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
    const auto n = static_cast<double>(h.size());
    double sx = 0.0, sy = 0.0;
    std::vector<double> x, y;
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (!(h[k] > 0.0) || !(e[k] > 0.0)) throw std::invalid_argument("fit_rate: entries must be positive");
        x.push_back(std::log(h[k]));
        y.push_back(std::log(e[k]));
        sx += x.back();
        sy += y.back();
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_rate: h values must not all coincide");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double r = y[k] - (fit.intercept + fit.slope * x[k]);
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

namespace {

struct LevelRun {
    LevelReport report;
    std::shared_ptr<const Lattice> lattice;
    Field weight;
    std::vector<Field> fields;  // samples followed by the final field
};

LevelRun run_level(SolverConfig config, int N, const std::vector<double>& sample_times) {
    config.N = N;
    LevelRun run;
    run.report.N = N;
    run.report.h = 1.0 / N;
    Scheme scheme(config);
    run.lattice = scheme.lattice_ptr();
    run.weight = scheme.weight();

    const double u0_max = max_abs(scheme.initial());
    const double f_max = max_abs(scheme.potential());
    SolveOptions options;
    options.sample_times = sample_times;
    options.track_remainders = true;
    try {
        SolveResult result = scheme.solve(options);
        const auto& tl = result.timeline;
        double excess = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < tl.times.size(); ++k) {
            run.report.max_m1 = std::max(run.report.max_m1, tl.m1[k]);
            run.report.max_m2 = std::max(run.report.max_m2, tl.m2[k]);
            excess = std::max(excess, tl.linf[k] - (u0_max + tl.times[k] * f_max));
        }
        if (tl.times.empty()) excess = 0.0;
        run.report.linf_excess = excess;
        run.report.remainder_l1 = result.max_remainder_l1;
        run.report.steps = result.steps;
        run.fields = std::move(result.samples);
        run.fields.push_back(std::move(result.final));
    } catch (const DivergenceError& e) {
        run.report.diverged = true;
        run.report.message = e.what();
    }
    return run;
}

std::optional<RateFit> try_fit(const std::vector<double>& h, const std::vector<double>& e) {
    if (h.size() < 3) return std::nullopt;
    for (double v : e) {
        if (!(v > 0.0)) return std::nullopt;
    }
    return fit_rate(h, e);
}

}  // namespace

ConvergenceReport refinement_study(const SolverConfig& base, std::vector<int> n_list, const StudyOptions& options) {
    std::sort(n_list.begin(), n_list.end());
    if (n_list.size() < 2) throw std::invalid_argument("N_list needs at least 2 entries");
    if (std::set<int>(n_list.begin(), n_list.end()).size() != n_list.size()) {
        throw std::invalid_argument("N_list contains duplicates");
    }
    const int finest = n_list.back();
    for (int N : n_list) {
        if (N < 2) throw std::invalid_argument("N_list entries must be >= 2");
        if (finest % N != 0) {
            throw std::invalid_argument("N_list is not nested: " + std::to_string(N) + " does not divide " +
                                        std::to_string(finest));
        }
    }

    SolverConfig config = base;
    if (options.auto_r0) {
        SolverConfig coarse = config;
        coarse.N = n_list.front();
        const double r0 = calibrate_r0(coarse, options.gamma);
        config.hamiltonian.r0 = r0;
        config.hamiltonian.gamma = options.gamma.value_or(2.0 * r0);
    }
    config.hamiltonian.validate();

    ConvergenceReport report;
    report.r0 = config.hamiltonian.r0;
    report.gamma = config.hamiltonian.gamma;
    report.reference_N = finest;

    std::vector<double> sample_times;
    for (double f : options.sample_fractions) sample_times.push_back(f * config.problem.T);

    LevelRun reference = run_level(config, finest, sample_times);
    if (reference.report.diverged) {
        throw std::runtime_error("reference level N=" + std::to_string(finest) + " diverged: " +
                                 reference.report.message);
    }
    reference.report.reference = true;

    std::vector<double> hs, l1w, linf, sup_l1w, sup_linf;
    std::vector<LevelRun> runs;
    for (std::size_t k = 0; k + 1 < n_list.size(); ++k) {
        LevelRun run = run_level(config, n_list[k], sample_times);
        if (!run.report.diverged) {
            const double mass = lattice_integral(run.weight);
            for (std::size_t j = 0; j < run.fields.size(); ++j) {
                const Field ref = restrict_to(reference.fields[j], run.lattice);
                Field diff(run.lattice);
                for (std::size_t s = 0; s < diff.size(); ++s) diff[s] = run.fields[j][s] - ref[s];
                const double e1 = weighted_l1(diff, run.weight) / mass;
                const double einf = max_abs(diff);
                run.report.sup_l1w_error = std::max(run.report.sup_l1w_error, e1);
                run.report.sup_linf_error = std::max(run.report.sup_linf_error, einf);
                if (j + 1 == run.fields.size()) {
                    run.report.l1w_error = e1;
                    run.report.linf_error = einf;
                }
            }
            hs.push_back(run.report.h);
            l1w.push_back(run.report.l1w_error);
            linf.push_back(run.report.linf_error);
            sup_l1w.push_back(run.report.sup_l1w_error);
            sup_linf.push_back(run.report.sup_linf_error);
        }
        runs.push_back(std::move(run));
    }
    runs.push_back(std::move(reference));

    // Consecutive-level differences; no reference bias, so they expose the raw order.
    std::vector<double> ch, ce;
    for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
        LevelRun& coarse = runs[k];
        const LevelRun& fine = runs[k + 1];
        if (coarse.report.diverged || fine.report.diverged) continue;
        if (fine.report.N % coarse.report.N != 0) continue;
        const Field ref = restrict_to(fine.fields.back(), coarse.lattice);
        Field diff(coarse.lattice);
        for (std::size_t s = 0; s < diff.size(); ++s) diff[s] = coarse.fields.back()[s] - ref[s];
        coarse.report.cauchy_l1w = weighted_l1(diff, coarse.weight) / lattice_integral(coarse.weight);
        ch.push_back(coarse.report.h);
        ce.push_back(coarse.report.cauchy_l1w);
    }
    for (auto& run : runs) report.levels.push_back(std::move(run.report));
    report.cauchy_l1w = try_fit(ch, ce);

    report.l1w = try_fit(hs, l1w);
    report.linf = try_fit(hs, linf);
    report.sup_l1w = try_fit(hs, sup_l1w);
    report.sup_linf = try_fit(hs, sup_linf);

    std::vector<double> rh, re;
    for (const auto& level : report.levels) {
        if (level.diverged) continue;
        rh.push_back(level.h);
        re.push_back(level.remainder_l1);
    }
    report.remainder = try_fit(rh, re);
    return report;
}

void write_rates_csv(std::ostream& os, const ConvergenceReport& report) {
    os << "N,h,l1w_error,linf_error,max_m1,max_m2,remainder_l1\n";
    for (const auto& level : report.levels) {
        os << level.N << ',' << format_real(level.h) << ',';
        if (!level.reference && !level.diverged) {
            os << format_real(level.l1w_error) << ',' << format_real(level.linf_error);
        } else {
            os << ',';
        }
        os << ',';
        if (!level.diverged) {
            os << format_real(level.max_m1) << ',' << format_real(level.max_m2) << ','
               << format_real(level.remainder_l1);
        } else {
            os << ",,";
        }
        os << '\n';
    }
}

void write_rates_json(std::ostream& os, const ConvergenceReport& report) {
    using nlohmann::ordered_json;
    auto fit_json = [](const std::optional<RateFit>& fit) -> ordered_json {
        if (!fit) return nullptr;
        return ordered_json{{"slope", fit->slope}, {"intercept", fit->intercept}, {"r2", fit->r2}};
    };
    ordered_json doc;
    doc["reference_N"] = report.reference_N;
    doc["r0"] = report.r0;
    doc["gamma"] = report.gamma;
    doc["slopes"] = ordered_json{{"l1w_error", fit_json(report.l1w)},
                                 {"linf_error", fit_json(report.linf)},
                                 {"remainder_l1", fit_json(report.remainder)}};
    doc["sup_over_t"] = ordered_json{{"gated", false},
                                     {"l1w_error", fit_json(report.sup_l1w)},
                                     {"linf_error", fit_json(report.sup_linf)}};
    doc["consecutive_levels"] = ordered_json{{"gated", false}, {"l1w_error", fit_json(report.cauchy_l1w)}};
    ordered_json levels = ordered_json::array();
    for (const auto& level : report.levels) {
        ordered_json l{{"N", level.N},
                       {"h", level.h},
                       {"reference", level.reference},
                       {"diverged", level.diverged},
                       {"steps", level.steps}};
        if (level.diverged) {
            l["message"] = level.message;
        } else {
            if (!level.reference) {
                l["l1w_error"] = level.l1w_error;
                l["linf_error"] = level.linf_error;
                l["sup_l1w_error"] = level.sup_l1w_error;
                l["sup_linf_error"] = level.sup_linf_error;
                l["cauchy_l1w"] = level.cauchy_l1w;
            }
            l["max_m1"] = level.max_m1;
            l["max_m2"] = level.max_m2;
            l["remainder_l1"] = level.remainder_l1;
            l["linf_excess"] = level.linf_excess;
        }
        levels.push_back(std::move(l));
    }
    doc["levels"] = std::move(levels);
    os << doc.dump(2) << '\n';
}

}  // namespace hjgraph
