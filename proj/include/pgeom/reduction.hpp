#ifndef PGEOM_REDUCTION_HPP
#define PGEOM_REDUCTION_HPP

#include "pgeom/dirac.hpp"
#include "pgeom/structures.hpp"

namespace pgeom {

/// Poisson structure induced on a parametrized surface, together with the
/// data used to build it.
struct SubmanifoldStructure {
    Chart sub_chart;
    PoissonStructure induced;
    Parametrization parametrization;
    Chart parent_chart;

    Expression restrict_expr(const Expression& ambient) const;
};

/// Restriction of an ambient scalar to the surface coordinates.
ScalarField restrict_function(const ScalarField& A, const ConstraintSet& C);

/// Induced bracket on a Casimir surface: the kept block of the tensor with
/// the parametrization substituted. Every K must pass casimir_check; the
/// tensor identity w^{i alpha} = w^{i b} d_b f^alpha is verified on the
/// surface.
SubmanifoldStructure induced_bracket(const PoissonStructure& P, const ConstraintSet& K,
                                     const ZeroTestOptions& opt = {});

struct DiagramClosureReport {
    int points = 0;
    double max_deviation = 0.0;
    bool pass = false;
    ZeroVerdict dirac_casimir;
    ZeroVerdict dirac_jacobi;
};

/// Two routes to the reduced bracket: restricting the Dirac tensor versus
/// inverting the pulled-back symplectic form; compared numerically on
/// surface points.
DiagramClosureReport diagram_closure_check(const PoissonStructure& P,
                                           const ConstraintSet& C,
                                           const ZeroTestOptions& opt = {},
                                           int points = 25, double tol = 1e-8);

struct PrescribeResult {
    PoissonStructure structure;
    ZeroVerdict casimir;        // every K against the built structure
    ZeroVerdict block_identity; // block form against the closed formula
};

/// Builds a bracket on `chart` with the given functions as Casimirs, from a
/// base structure W0 on the kept coordinates.
PrescribeResult prescribe_casimirs(const Chart& chart,
                                   const std::vector<Expression>& casimirs,
                                   const std::vector<std::string>& solved,
                                   const PoissonStructure& base,
                                   const ZeroTestOptions& opt = {});

/// Surface agreement of the parent bracket with the induced one on scalar
/// pairs.
ZeroVerdict poisson_submanifold_check(
    const PoissonStructure& parent, const SubmanifoldStructure& S,
    const std::vector<std::pair<ScalarField, ScalarField>>& pairs,
    const ZeroTestOptions& opt = {});

struct FirstIntegralReductionResult {
    SubmanifoldStructure sub;
    ScalarField reduced_hamiltonian;
    double max_flow_deviation = 0.0;
    int points = 0;
};

/// Hamiltonian reduction to a level surface of first integrals with
/// invertible mutual brackets: the reduced tensor is the kept block of the
/// Dirac tensor.
FirstIntegralReductionResult first_integral_reduction(const PoissonStructure& P,
                                                      const ScalarField& H,
                                                      const ConstraintSet& C,
                                                      const ZeroTestOptions& opt = {});

} // namespace pgeom

#endif
