#pragma once

#include "hjgraph/scheme.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hjgraph {

/// Schema violation in a run configuration; `key_path()` is dotted, e.g. "scheme.kind".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key_path, const std::string& message)
        : std::runtime_error(key_path + ": " + message), key_path_(std::move(key_path)) {}
    const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

struct RunSection {
    std::vector<int> N_list{8, 16, 32, 64};
    /// Terminal site for Dirac adjoints: a site index or a lattice point xi.
    /// Unset means the interior site closest to the barycentre.
    std::variant<std::monostate, std::size_t, std::vector<double>> dirac_site;
    enum class Terminal { Dirac, Uniform } terminal = Terminal::Dirac;
    std::string output_dir;
    std::uint64_t seed = 20240601;
    std::size_t max_snapshots = 2000;
    int threads = 1;
};

struct RunConfig {
    SolverConfig solver;
    /// R0 is calibrated from the initial datum when true.
    bool auto_r0 = true;
    /// Explicit Lax-Friedrichs gamma; 2 R0 otherwise.
    std::optional<double> gamma;
    RunSection run;
};

/// Strict parse: unknown keys, type mismatches and out-of-range values throw
/// ConfigError naming the key path.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Fully defaulted document (pretty JSON) that parses back to the same config.
std::string resolved_config(const RunConfig& config);

/// Replaces an automatic R0 by its calibrated value (at the configured N).
void resolve_r0(RunConfig& config);

/// Site selected by run.dirac_site (see RunSection). Throws ConfigError when
/// the point is not a lattice site.
std::size_t dirac_site(const RunConfig& config, const Lattice& lattice);

}  // namespace hjgraph
