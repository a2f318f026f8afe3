#ifndef PGEOM_COMMANDS_HPP
#define PGEOM_COMMANDS_HPP

#include "pgeom/dynamics.hpp"
#include "pgeom/problem.hpp"

#include <optional>
#include <string>

namespace pgeom {

struct CommandOptions {
    ZeroTestOptions zero;
    std::string route = "auto"; // reduce: casimir | dirac | auto
    int max_steps = 0;          // consistency chain; 0 picks 2 * dim
};

struct CommandResult {
    Report report;
    std::optional<Json> emitted; // emitted problem file, when the command makes one
    std::optional<Trajectory> trajectory;
};

CommandResult cmd_check(const ProblemFile& pf, const CommandOptions& opt = {});
CommandResult cmd_consistency(const ProblemFile& pf, const CommandOptions& opt = {});
CommandResult cmd_dirac(const ProblemFile& pf, const CommandOptions& opt = {});
CommandResult cmd_reduce(const ProblemFile& pf, const CommandOptions& opt = {});
CommandResult cmd_prescribe(const ProblemFile& pf, const CommandOptions& opt = {});
CommandResult cmd_integrate(const ProblemFile& pf, const CommandOptions& opt = {});

} // namespace pgeom

#endif
