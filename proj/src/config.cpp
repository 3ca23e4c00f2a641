#include "hjgraph/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace hjgraph {

using nlohmann::ordered_json;

namespace {

class Section {
public:
    Section(const ordered_json& doc, std::string path, std::set<std::string> allowed)
        : doc_(doc), path_(std::move(path)) {
        if (!doc_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
        for (const auto& item : doc_.items()) {
            if (!allowed.count(item.key())) throw ConfigError(key(item.key()), "unknown key");
        }
    }

    std::string key(const std::string& name) const { return path_.empty() ? name : path_ + "." + name; }
    bool has(const std::string& name) const { return doc_.contains(name) && !doc_.at(name).is_null(); }
    const ordered_json& at(const std::string& name) const { return doc_.at(name); }

    double number(const std::string& name, double fallback) const {
        if (!has(name)) return fallback;
        const auto& v = at(name);
        if (!v.is_number()) throw ConfigError(key(name), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(key(name), "must be finite");
        return x;
    }

    std::int64_t integer(const std::string& name, std::int64_t fallback) const {
        if (!has(name)) return fallback;
        const auto& v = at(name);
        if (!v.is_number_integer()) throw ConfigError(key(name), "expected an integer");
        return v.get<std::int64_t>();
    }

    std::string string(const std::string& name, const std::string& fallback) const {
        if (!has(name)) return fallback;
        const auto& v = at(name);
        if (!v.is_string()) throw ConfigError(key(name), "expected a string");
        return v.get<std::string>();
    }

    Section child(const std::string& name, std::set<std::string> allowed) const {
        static const ordered_json empty = ordered_json::object();
        return Section(has(name) ? at(name) : empty, key(name), std::move(allowed));
    }

private:
    const ordered_json& doc_;
    std::string path_;
};

template <typename Fn>
auto enum_value(const Section& sec, const std::string& name, const std::string& fallback, Fn parse) {
    const std::string text = sec.string(name, fallback);
    try {
        return parse(text);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(sec.key(name), e.what());
    }
}

std::vector<double> number_array(const Section& sec, const std::string& name) {
    const auto& v = sec.at(name);
    if (!v.is_array()) throw ConfigError(sec.key(name), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!v[k].is_number()) throw ConfigError(sec.key(name) + "[" + std::to_string(k) + "]", "expected a number");
        out.push_back(v[k].get<double>());
    }
    return out;
}

Graph parse_graph(const Section& sec) {
    const std::int64_t d = sec.integer("d", 2);
    if (d < 2) throw ConfigError(sec.key("d"), "must be >= 2");
    if (d > 16) throw ConfigError(sec.key("d"), "must be <= 16");
    if (!sec.has("omega")) return Graph::complete(static_cast<int>(d));
    const auto& m = sec.at("omega");
    if (!m.is_array() || m.size() != static_cast<std::size_t>(d)) {
        throw ConfigError(sec.key("omega"), "expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
    }
    std::vector<std::vector<double>> omega;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const std::string row_key = sec.key("omega") + "[" + std::to_string(i) + "]";
        if (!m[i].is_array() || m[i].size() != static_cast<std::size_t>(d)) {
            throw ConfigError(row_key, "expected a row of length " + std::to_string(d));
        }
        std::vector<double> row;
        for (std::size_t j = 0; j < m[i].size(); ++j) {
            if (!m[i][j].is_number()) throw ConfigError(row_key + "[" + std::to_string(j) + "]", "expected a number");
            row.push_back(m[i][j].get<double>());
        }
        omega.push_back(std::move(row));
    }
    try {
        return Graph(std::move(omega));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(sec.key("omega"), e.what());
    }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
    }
    const Section root(doc, "", {"graph", "metric", "lattice", "scheme", "weight", "problem", "run"});
    RunConfig cfg;
    SolverConfig& s = cfg.solver;

    s.graph = parse_graph(root.child("graph", {"d", "omega"}));
    const int d = s.graph.d();

    const Section metric = root.child("metric", {"kind"});
    s.metric = enum_value(metric, "kind", "average", metric_kind_from_string);

    const Section lattice = root.child("lattice", {"N"});
    const std::int64_t N = lattice.integer("N", 32);
    if (N < 2) throw ConfigError(lattice.key("N"), "must be >= 2");
    if (N > 1'000'000) throw ConfigError(lattice.key("N"), "must be <= 1000000");
    s.N = static_cast<int>(N);

    const Section scheme = root.child("scheme", {"kind", "r0", "gamma", "cfl", "integrator"});
    const SchemeKind kind = enum_value(scheme, "kind", "lax_friedrichs", scheme_kind_from_string);
    double r0 = 1.0;
    cfg.auto_r0 = true;
    if (scheme.has("r0")) {
        const auto& v = scheme.at("r0");
        if (v.is_string()) {
            if (v.get<std::string>() != "auto") throw ConfigError(scheme.key("r0"), "expected a number or \"auto\"");
        } else {
            r0 = scheme.number("r0", 1.0);
            if (!(r0 > 0.0)) throw ConfigError(scheme.key("r0"), "must be > 0");
            cfg.auto_r0 = false;
        }
    }
    if (scheme.has("gamma")) {
        const double gamma = scheme.number("gamma", 0.0);
        if (!(gamma > 0.0)) throw ConfigError(scheme.key("gamma"), "must be > 0");
        if (kind != SchemeKind::LaxFriedrichs) throw ConfigError(scheme.key("gamma"), "only used by lax_friedrichs");
        cfg.gamma = gamma;
    }
    s.hamiltonian = HamiltonianSpec{kind, r0, cfg.gamma.value_or(2.0 * r0)};
    s.cfl = scheme.number("cfl", 0.5);
    if (!(s.cfl > 0.0 && s.cfl <= 1.0)) throw ConfigError(scheme.key("cfl"), "must lie in (0, 1]");
    s.integrator = enum_value(scheme, "integrator", "heun", integrator_from_string);

    const Section weight = root.child("weight", {"kind", "alpha", "lambda"});
    s.weight.kind = enum_value(weight, "kind", "polynomial", weight_kind_from_string);
    s.weight.alpha = weight.number("alpha", 1.0);
    s.weight.lambda = weight.number("lambda", 1.0);
    if (!(s.weight.alpha >= 1.0)) throw ConfigError(weight.key("alpha"), "must be >= 1");
    if (!(s.weight.lambda > 0.0)) throw ConfigError(weight.key("lambda"), "must be > 0");

    const Section problem = root.child("problem", {"u0", "F", "F_coeffs", "T"});
    s.problem.u0 = enum_value(problem, "u0", "quadratic", initial_datum_from_string);
    s.problem.potential = enum_value(problem, "F", "zero", potential_from_string);
    if (problem.has("F_coeffs")) {
        if (s.problem.potential != ProblemSpec::Potential::Linear) {
            throw ConfigError(problem.key("F_coeffs"), "only used by F = \"linear\"");
        }
        s.problem.potential_coeffs = number_array(problem, "F_coeffs");
        if (static_cast<int>(s.problem.potential_coeffs.size()) != d) {
            throw ConfigError(problem.key("F_coeffs"), "expected " + std::to_string(d) + " coefficients");
        }
    } else if (s.problem.potential == ProblemSpec::Potential::Linear) {
        throw ConfigError(problem.key("F_coeffs"), "required for F = \"linear\"");
    }
    s.problem.T = problem.number("T", 0.5);
    if (!(s.problem.T > 0.0)) throw ConfigError(problem.key("T"), "must be > 0");

    const Section run = root.child("run", {"N_list", "dirac_site", "terminal", "output_dir", "seed", "site_budget",
                                           "max_snapshots", "dt_max", "threads"});
    if (run.has("N_list")) {
        const auto& v = run.at("N_list");
        if (!v.is_array()) throw ConfigError(run.key("N_list"), "expected an array of integers");
        cfg.run.N_list.clear();
        for (std::size_t k = 0; k < v.size(); ++k) {
            const std::string item = run.key("N_list") + "[" + std::to_string(k) + "]";
            if (!v[k].is_number_integer()) throw ConfigError(item, "expected an integer");
            const auto n = v[k].get<std::int64_t>();
            if (n < 2 || n > 1'000'000) throw ConfigError(item, "must lie in [2, 1000000]");
            cfg.run.N_list.push_back(static_cast<int>(n));
        }
    }
    if (run.has("dirac_site")) {
        const auto& v = run.at("dirac_site");
        if (v.is_number_integer()) {
            const auto idx = v.get<std::int64_t>();
            if (idx < 0) throw ConfigError(run.key("dirac_site"), "must be >= 0");
            cfg.run.dirac_site = static_cast<std::size_t>(idx);
        } else if (v.is_array()) {
            auto xi = number_array(run, "dirac_site");
            if (static_cast<int>(xi.size()) != d) {
                throw ConfigError(run.key("dirac_site"), "expected " + std::to_string(d) + " coordinates");
            }
            cfg.run.dirac_site = std::move(xi);
        } else {
            throw ConfigError(run.key("dirac_site"), "expected a site index or a point");
        }
    }
    const std::string terminal = run.string("terminal", "dirac");
    if (terminal == "dirac") {
        cfg.run.terminal = RunSection::Terminal::Dirac;
    } else if (terminal == "uniform") {
        cfg.run.terminal = RunSection::Terminal::Uniform;
    } else {
        throw ConfigError(run.key("terminal"), "expected \"dirac\" or \"uniform\"");
    }
    cfg.run.output_dir = run.string("output_dir", "");
    const std::int64_t seed = run.integer("seed", 20240601);
    if (seed < 0) throw ConfigError(run.key("seed"), "must be >= 0");
    cfg.run.seed = static_cast<std::uint64_t>(seed);
    const std::int64_t budget = run.integer("site_budget", static_cast<std::int64_t>(Lattice::kDefaultSiteBudget));
    if (budget < 1) throw ConfigError(run.key("site_budget"), "must be >= 1");
    s.site_budget = static_cast<std::size_t>(budget);
    const std::int64_t snapshots = run.integer("max_snapshots", 2000);
    if (snapshots < 2) throw ConfigError(run.key("max_snapshots"), "must be >= 2");
    cfg.run.max_snapshots = static_cast<std::size_t>(snapshots);
    if (run.has("dt_max")) {
        const double dt_max = run.number("dt_max", 0.0);
        if (!(dt_max > 0.0)) throw ConfigError(run.key("dt_max"), "must be > 0");
        s.dt_max = dt_max;
    }
    const std::int64_t threads = run.integer("threads", 1);
    if (threads < 1 || threads > 1024) throw ConfigError(run.key("threads"), "must lie in [1, 1024]");
    cfg.run.threads = static_cast<int>(threads);

    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string resolved_config(const RunConfig& config) {
    const SolverConfig& s = config.solver;
    ordered_json doc;
    doc["graph"] = {{"d", s.graph.d()}, {"omega", s.graph.omega_matrix()}};
    doc["metric"] = {{"kind", to_string(s.metric)}};
    doc["lattice"] = {{"N", s.N}};
    ordered_json scheme{{"kind", to_string(s.hamiltonian.scheme)}};
    if (config.auto_r0) {
        scheme["r0"] = "auto";
    } else {
        scheme["r0"] = s.hamiltonian.r0;
    }
    if (config.gamma) scheme["gamma"] = *config.gamma;
    scheme["cfl"] = s.cfl;
    scheme["integrator"] = to_string(s.integrator);
    doc["scheme"] = std::move(scheme);
    doc["weight"] = {{"kind", to_string(s.weight.kind)}, {"alpha", s.weight.alpha}, {"lambda", s.weight.lambda}};
    ordered_json problem{{"u0", to_string(s.problem.u0)}, {"F", to_string(s.problem.potential)}};
    if (s.problem.potential == ProblemSpec::Potential::Linear) problem["F_coeffs"] = s.problem.potential_coeffs;
    problem["T"] = s.problem.T;
    doc["problem"] = std::move(problem);
    ordered_json run{{"N_list", config.run.N_list}};
    if (const auto* idx = std::get_if<std::size_t>(&config.run.dirac_site)) run["dirac_site"] = *idx;
    if (const auto* xi = std::get_if<std::vector<double>>(&config.run.dirac_site)) run["dirac_site"] = *xi;
    run["terminal"] = config.run.terminal == RunSection::Terminal::Dirac ? "dirac" : "uniform";
    run["output_dir"] = config.run.output_dir;
    run["seed"] = config.run.seed;
    run["site_budget"] = s.site_budget;
    run["max_snapshots"] = config.run.max_snapshots;
    if (s.dt_max) run["dt_max"] = *s.dt_max;
    run["threads"] = config.run.threads;
    doc["run"] = std::move(run);
    return doc.dump(2) + "\n";
}

void resolve_r0(RunConfig& config) {
    if (!config.auto_r0) return;
    const double r0 = calibrate_r0(config.solver, config.gamma);
    config.solver.hamiltonian.r0 = r0;
    config.solver.hamiltonian.gamma = config.gamma.value_or(2.0 * r0);
    config.auto_r0 = false;
}

std::size_t dirac_site(const RunConfig& config, const Lattice& lattice) {
    if (const auto* idx = std::get_if<std::size_t>(&config.run.dirac_site)) {
        if (*idx >= lattice.size()) {
            throw ConfigError("run.dirac_site", "site index " + std::to_string(*idx) + " out of range");
        }
        return *idx;
    }
    if (const auto* xi = std::get_if<std::vector<double>>(&config.run.dirac_site)) {
        std::optional<std::size_t> site;
        try {
            site = lattice.locate(SimplexPoint(*xi));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("run.dirac_site", e.what());
        }
        if (!site) throw ConfigError("run.dirac_site", "point is not a lattice site");
        return *site;
    }
    // Interior site nearest the barycentre; ties go to the lowest index.
    const double centre = 1.0 / lattice.d();
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < lattice.size(); ++s) {
        if (lattice.on_boundary(s)) continue;
        const SimplexPoint xi = lattice.xi(s);
        double dist = 0.0;
        for (double v : xi.values()) dist += (v - centre) * (v - centre);
        if (dist < best_dist) {
            best_dist = dist;
            best = s;
        }
    }
    if (!std::isfinite(best_dist)) throw ConfigError("lattice.N", "lattice has no interior site");
    return best;
}

}  // namespace hjgraph
