// deformlab run <taskfile> [--format text|structured] [--seed N] [--degree-budget N]
//
// Exit status: 0 success, 1 negative verdict, 2 error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "deformlab/cli/run.hpp"

int main(int argc, char** argv)
{
    using namespace deformlab::cli;

    CLI::App app{"Exact computations on deformations of algebras"};
    app.require_subcommand(1);
    auto* run = app.add_subcommand("run", "Run a task file");
    std::string path;
    std::string format = "text";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> budget;
    run->add_option("taskfile", path, "Task file")->required();
    run->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "structured"}));
    run->add_option("--seed", seed, "Seed overriding [scalars] seed");
    run->add_option("--degree-budget", budget, "Largest degree-like option a task may request");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            std::cerr << "error: cannot read " << path << "\n";
            return 2;
        }
        std::ostringstream text;
        text << in.rdbuf();
        const auto task = parse_task(text.str());
        const auto report = run_task(task, RunOptions{seed, budget});
        std::cout << emit_report(report, format == "structured" ? Format::structured : Format::text);
        return report.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << path << ": " << e.what() << "\n";
        return 2;
    }
}
