// Command-line front end: problem files in, verification reports and
// trajectory CSVs out.
#include <CLI11.hpp>

#include "pgeom/commands.hpp"
#include "pgeom/dynamics.hpp"
#include "pgeom/error.hpp"

#include <fstream>
#include <iostream>

namespace {

using namespace pgeom;

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Numeric:
        case ErrorKind::Domain:
        case ErrorKind::Undecidable:
        case ErrorKind::Overflow:
            return 3;
        default:
            return 2;
    }
}

std::string default_out(const std::string& input, const std::string& command,
                        const std::string& ext) {
    std::string stem = input;
    auto dot = stem.rfind('.');
    if (dot != std::string::npos && dot > stem.rfind('/')) stem = stem.substr(0, dot);
    return stem + "." + command + ext;
}

struct CliConfig {
    std::string problem_path;
    std::string out;
    std::string report_format = "text";
    std::string route = "auto";
    std::uint64_t seed = 0;
    double tol = 1e-9;
    int samples = 50;
    int max_steps = 0;
};

int run(const std::string& command, const CliConfig& cfg) {
    ProblemFile pf = ProblemFile::load(cfg.problem_path);
    CommandOptions opt;
    opt.zero.seed = cfg.seed;
    opt.zero.tol = cfg.tol;
    opt.zero.samples = cfg.samples;
    opt.route = cfg.route;
    opt.max_steps = cfg.max_steps;

    CommandResult result;
    if (command == "check") result = cmd_check(pf, opt);
    else if (command == "consistency") result = cmd_consistency(pf, opt);
    else if (command == "dirac") result = cmd_dirac(pf, opt);
    else if (command == "reduce") result = cmd_reduce(pf, opt);
    else if (command == "prescribe") result = cmd_prescribe(pf, opt);
    else if (command == "integrate") result = cmd_integrate(pf, opt);
    else fail(ErrorKind::Validation, "unknown command");

    if (result.emitted) {
        std::string path = cfg.out.empty()
                               ? default_out(cfg.problem_path, command, ".json")
                               : cfg.out;
        std::ofstream out(path);
        if (!out) fail(ErrorKind::Validation, "cannot write '" + path + "'");
        out << result.emitted->dump(2) << "\n";
        std::cerr << "wrote " << path << "\n";
    }
    if (result.trajectory) {
        std::string path = cfg.out.empty()
                               ? default_out(cfg.problem_path, command, ".csv")
                               : cfg.out;
        std::ofstream out(path);
        if (!out) fail(ErrorKind::Validation, "cannot write '" + path + "'");
        write_csv(*result.trajectory, out);
        std::cerr << "wrote " << path << "\n";
    }

    if (cfg.report_format == "machine")
        std::cout << result.report.to_json().dump(2) << "\n";
    else
        std::cout << result.report.to_text();
    return result.report.pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poisson and symplectic geometry toolkit"};
    app.require_subcommand(1);

    CliConfig cfg;
    const char* names[] = {"check", "consistency", "dirac", "reduce", "prescribe",
                           "integrate"};
    const char* descriptions[] = {
        "verify antisymmetry, Jacobi, declared Casimirs and first integrals",
        "run the constraint consistency chain",
        "construct the Dirac bracket and emit it as a new problem file",
        "restrict the structure to the constraint surface",
        "build a bracket with prescribed Casimir functions",
        "integrate the flow and export a trajectory CSV"};
    for (size_t i = 0; i < 6; ++i) {
        auto* sub = app.add_subcommand(names[i], descriptions[i]);
        sub->add_option("problem", cfg.problem_path, "problem file (json)")
            ->required();
        sub->add_option("--seed", cfg.seed, "seed for all randomized checks");
        sub->add_option("--tol", cfg.tol, "numeric zero tolerance");
        sub->add_option("--samples", cfg.samples, "sample count for numeric checks");
        sub->add_option("--out", cfg.out, "output path for emitted files / CSV");
        sub->add_option("--report-format", cfg.report_format, "text or machine")
            ->check(CLI::IsMember({"text", "machine"}));
        if (std::string(names[i]) == "reduce")
            sub->add_option("--route", cfg.route, "casimir, dirac, or auto")
                ->check(CLI::IsMember({"casimir", "dirac", "auto"}));
        if (std::string(names[i]) == "consistency")
            sub->add_option("--max-steps", cfg.max_steps, "chain step limit");
    }

    CLI11_PARSE(app, argc, argv);

    std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, cfg);
    } catch (const pgeom::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
