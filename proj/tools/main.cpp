// hjgraph: solve | adjoint | converge | audit --config <path> --out <dir> [--threads k]

#include "hjgraph/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Monotone finite-difference solver for Hamilton-Jacobi equations on graph simplices"};
    app.require_subcommand(1);

    hjgraph::CommandOptions options;
    std::string config;
    std::string out;
    int threads = 0;

    for (const char* name : {"solve", "adjoint", "converge", "audit"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory (overrides run.output_dir)");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : hjgraph::kExitConfig;
    }

    options.subcommand = app.get_subcommands().front()->get_name();
    options.config = config;
    options.out = out;
    if (threads > 0) options.threads = threads;
    return hjgraph::run_command(options, std::cout, std::cerr);
}
