#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rephase/error.hpp"

namespace rephase::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitSolverFailure = 2,
    kExitInfeasible = 3,
};

/// Entry point of the `rephase` tool. Reports go to out, diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// One compared quantity of a validation case.
struct Check {
    std::string name;
    double value;
    double reference;
    double tolerance;
    bool relative;
    bool pass;
};

/// A pipeline stage (linear, nonlinear, continuation) failed outright.
class StageError : public Error {
public:
    StageError(const std::string& stage, const std::string& what)
        : Error(stage + ": " + what), stage(stage) {}
    std::string stage;
};

struct CaseResult {
    std::string id;
    std::vector<Check> checks;
    /// Informational values that have no reference, e.g. iteration counts.
    std::vector<std::pair<std::string, double>> info;
    double seconds = 0.0;

    bool passed() const;
};

/// Ids of the embedded reference cases, time cases first.
std::vector<std::string> reference_case_ids();

/// Runs linear solve, costate map and nonlinear refinement for one case.
/// Throws DomainError for an unknown id and StageError when a stage fails.
CaseResult validate_case(const std::string& id);

}  // namespace rephase::cli
