#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace hjgraph {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitDivergence = 2,
    kExitAuditViolation = 3,
};

struct CommandOptions {
    std::string subcommand;  // solve | adjoint | converge | audit
    std::filesystem::path config;
    /// Overrides run.output_dir when non-empty.
    std::filesystem::path out;
    std::optional<int> threads;
};

/// Runs one subcommand and returns its exit code. Progress goes to `out`,
/// errors to `err`.
int run_command(const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace hjgraph
