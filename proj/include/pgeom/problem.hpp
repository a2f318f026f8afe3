#ifndef PGEOM_PROBLEM_HPP
#define PGEOM_PROBLEM_HPP

#include "pgeom/dirac.hpp"
#include "pgeom/structures.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pgeom {

using Json = nlohmann::ordered_json;

/// One file fully determines a run: chart, structure, scalar data, and the
/// integrator block.
struct ProblemFile {
    Chart chart;
    std::map<std::string, double> parameter_values;

    // structure description, one of:
    std::string structure_type; // canonical | lie_poisson | explicit | prescribed
    int canonical_pairs = 0;
    StructureConstants lie_constants;
    std::map<std::pair<int, int>, Expression> explicit_entries; // 1-based, i < j
    std::vector<Expression> prescribed_casimirs;
    std::vector<std::string> prescribed_solved;
    std::map<std::pair<int, int>, Expression> prescribed_base; // over kept coords

    std::optional<Expression> hamiltonian;
    std::vector<Constraint> constraints;
    std::optional<Parametrization> parametrization;
    std::vector<Expression> casimir_candidates;
    std::vector<Expression> first_integrals;

    struct Integrator {
        std::string mode = "poisson"; // poisson | dirac | multiplier | series
        std::vector<double> z0;
        double tau_end = 1.0;
        double h = 1e-3;
        int order = 4; // series mode
    };
    std::optional<Integrator> integrator;

    static ProblemFile from_json(const Json& j);
    static ProblemFile load(const std::string& path);
    Json to_json() const;

    /// Builds the Poisson structure described by the file (prescribed
    /// structures are assembled through the casimir construction).
    PoissonStructure build_structure(const ZeroTestOptions& opt = {}) const;
    /// Base structure on the kept coordinates, prescribed type only.
    PoissonStructure build_prescribed_base(const ZeroTestOptions& opt = {}) const;

    std::optional<ConstraintSet> build_constraints(const ZeroTestOptions& opt = {}) const;
    ScalarField require_hamiltonian() const;
};

struct CheckEntry {
    std::string name;
    std::string property; // which identity or quantity was verified
    bool pass = true;
    std::string tier;     // exact | numeric | structural
    std::optional<ZeroVerdict> verdict;
    std::optional<double> value; // drifts, deviations
    std::string note;
};

struct Report {
    std::string command;
    std::uint64_t seed = 0;
    std::vector<CheckEntry> checks;

    void add(CheckEntry entry) { checks.push_back(std::move(entry)); }
    void add_verdict(const std::string& name, const std::string& property,
                     const ZeroVerdict& v, bool required_zero = true);
    bool pass() const;

    Json to_json() const;
    std::string to_text() const;
};

} // namespace pgeom

#endif
