#ifndef PGEOM_DIRAC_HPP
#define PGEOM_DIRAC_HPP

#include "pgeom/linalg.hpp"
#include "pgeom/structures.hpp"
#include "pgeom/symmat.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pgeom {

/// User-supplied resolution of the constraint surface: each solved
/// coordinate as a function of the kept ones. The tool never solves
/// constraint equations itself.
struct Parametrization {
    std::vector<std::pair<std::string, Expression>> solved;

    bool solves(const std::string& coord) const;
};

enum class ConstraintOrigin { Primary, Secondary };

struct Constraint {
    Expression expr;
    ConstraintOrigin origin = ConstraintOrigin::Primary;
    int step = 0; // generation step for secondary constraints
};

/// Ordered constraints over a chart, optionally with a parametrization.
/// Functional independence and surface consistency are checked on creation.
class ConstraintSet {
public:
    static ConstraintSet create(Chart chart, std::vector<Constraint> constraints,
                                std::optional<Parametrization> parametrization,
                                const ZeroTestOptions& opt = {});

    const Chart& chart() const { return chart_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    int size() const { return static_cast<int>(constraints_.size()); }
    Expression expr(int alpha) const { return constraints_[alpha].expr; }

    bool has_parametrization() const { return param_.has_value(); }
    const Parametrization& parametrization() const;

    /// Chart of the kept coordinates (requires a parametrization).
    Chart sub_chart() const;
    std::vector<std::string> kept_coordinates() const;

    /// Substitutes the solved coordinates by their parametrization.
    Expression restrict_to_surface(const Expression& e) const;

    /// Full-dimensional points on the surface, kept coordinates sampled in
    /// [-1, 1]; parameters are sampled alongside. Deterministic per seed.
    std::vector<std::map<std::string, double>> surface_points(int count,
                                                              std::uint64_t seed) const;

private:
    ConstraintSet() = default;
    Chart chart_;
    std::vector<Constraint> constraints_;
    std::optional<Parametrization> param_;
};

/// Delta^{ab} = {Phi^a, Phi^b}.
ExprMatrix delta_matrix(const PoissonStructure& P, const ConstraintSet& C);

/// Verdict on det Delta; NonZero certifies the second-class property.
/// With on_surface the parametrization is substituted first.
ZeroVerdict second_class_check(const PoissonStructure& P, const ConstraintSet& C,
                               bool on_surface, const ZeroTestOptions& opt = {});

struct ChainResult {
    enum class Outcome { Terminated, Contradiction, StepLimit };
    Outcome outcome = Outcome::Terminated;
    std::optional<ConstraintSet> final_set; // Terminated only
    Expression witness;                     // Contradiction only
    int steps = 0;
    std::vector<std::string> log;
};

/// Iterates Psi = {Phi, H}: drops what vanishes on the surface, appends what
/// is functionally independent, and reports a contradiction when a dependent
/// candidate stays bounded away from zero on the surface.
ChainResult consistency_chain(const PoissonStructure& P, const ScalarField& H,
                              const ConstraintSet& C, int max_steps,
                              const ZeroTestOptions& opt = {});

struct DiracResult {
    PoissonStructure omega_d;     // provenance dirac; Jacobi verdict inside
    ExprMatrix delta;
    ExprMatrix delta_inverse;
    Expression delta_det;
    ZeroVerdict casimir_property; // {z^i, Phi^a}_D over all i, a
    std::vector<Expression> lambda; // multipliers, filled when a Hamiltonian is known
};

/// The modified bracket under which every constraint is a Casimir.
DiracResult dirac_bracket(const PoissonStructure& P, const ConstraintSet& C,
                          const ZeroTestOptions& opt = {});

/// Numeric Dirac tensor at one point, for charts or constraint counts where
/// the symbolic path is out of reach.
Mat dirac_tensor_at(const PoissonStructure& P, const ConstraintSet& C,
                    const std::map<std::string, double>& point);

/// A_d = A - {A, Phi^a} Dtilde_{ab} Phi^b; agrees with A on the surface.
ScalarField deformed_function(const PoissonStructure& P, const ConstraintSet& C,
                              const ScalarField& A, const ZeroTestOptions& opt = {});

/// On-surface agreement of {A,B}_D with {A_d,B_d}.
ZeroVerdict deformed_bracket_check(const PoissonStructure& P, const ConstraintSet& C,
                                   const ScalarField& A, const ScalarField& B,
                                   const ZeroTestOptions& opt = {});

/// lambda^b = -Dtilde^{ba} {Phi_a, H0}; the defining linear relation is
/// re-verified exactly.
std::vector<Expression> multipliers(const PoissonStructure& P, const ScalarField& H0,
                                    const ConstraintSet& C,
                                    const ZeroTestOptions& opt = {});

/// H~ = H - Phi^a Dtilde_{ab} {Phi^b, H}; its Poisson flow matches the Dirac
/// flow of H on the surface.
ScalarField total_hamiltonian(const PoissonStructure& P, const ScalarField& H,
                              const ConstraintSet& C, const ZeroTestOptions& opt = {});

} // namespace pgeom

#endif
