#ifndef PGEOM_STRUCTURES_HPP
#define PGEOM_STRUCTURES_HPP

#include "pgeom/expr.hpp"

#include <string>
#include <vector>

namespace pgeom {

/// Named coordinate chart: ordered coordinates plus free parameters.
struct Chart {
    std::string name;
    std::vector<std::string> coordinates;
    std::vector<std::string> parameters;

    Chart() = default;
    Chart(std::string chart_name, std::vector<std::string> coords,
          std::vector<std::string> params = {});

    int dim() const { return static_cast<int>(coordinates.size()); }
    int coord_index(const std::string& name) const;
    /// Coordinates followed by parameters; the symbol set for parsing.
    std::vector<std::string> symbols() const;

    friend bool operator==(const Chart& a, const Chart& b) {
        return a.coordinates == b.coordinates && a.parameters == b.parameters;
    }
};

struct ScalarField {
    Chart chart;
    Expression expr;
};

struct VectorField {
    Chart chart;
    std::vector<Expression> components;
};

enum class Provenance { Canonical, LiePoisson, Explicit, Dirac, Induced, Prescribed };

const char* provenance_name(Provenance p);

/// Antisymmetric Poisson tensor stored as its strict upper triangle, with the
/// Jacobi verdict recorded at construction. For the derived provenances
/// (dirac, induced, prescribed) a nonzero residual is a construction error;
/// for explicit input it is only recorded.
class PoissonStructure {
public:
    static PoissonStructure create(Chart chart,
                                   std::vector<Expression> upper_triangle,
                                   Provenance provenance,
                                   const ZeroTestOptions& opt = {});

    const Chart& chart() const { return chart_; }
    Provenance provenance() const { return provenance_; }
    const ZeroVerdict& jacobi_verdict() const { return jacobi_; }

    /// omega^{ij} with the sign implied by antisymmetric storage.
    Expression entry(int i, int j) const;
    const std::vector<Expression>& upper_triangle() const { return upper_; }

    bool structurally_equal(const PoissonStructure& other) const;

private:
    PoissonStructure() = default;

    Chart chart_;
    std::vector<Expression> upper_; // row-major strict upper triangle
    Provenance provenance_ = Provenance::Explicit;
    ZeroVerdict jacobi_;
};

int upper_index(int i, int j, int n);

/// Structure constants c^{ij}_k for lie_poisson, dense cube c[i][j][k].
using StructureConstants = std::vector<std::vector<std::vector<Rational>>>;

PoissonStructure canonical(int n_pairs);
PoissonStructure lie_poisson(const StructureConstants& c);
/// so(3): c^{ij}_k = epsilon_ijk.
StructureConstants so3_constants();

Expression bracket(const PoissonStructure& P, const ScalarField& A, const ScalarField& B);
Expression bracket_expr(const PoissonStructure& P, const Expression& A, const Expression& B);

struct JacobiReport {
    struct Entry {
        int i, j, k;
        Expression residual;
        ZeroVerdict verdict;
    };
    std::vector<Entry> entries;
    ZeroVerdict verdict;
};

JacobiReport jacobi_residual(const PoissonStructure& P, const ZeroTestOptions& opt = {});

VectorField hamiltonian_field(const PoissonStructure& P, const ScalarField& H);

VectorField lie_bracket(const VectorField& V, const VectorField& U);

/// Checks X_{A,B} + [X_A, X_B] = 0 componentwise.
ZeroVerdict homomorphism_check(const PoissonStructure& P, const ScalarField& A,
                               const ScalarField& B, const ZeroTestOptions& opt = {});

/// Invertible chart transition; both directions are user-supplied and the
/// round trip is verified numerically at construction.
struct CoordinateMap {
    Chart source;
    Chart target;
    std::vector<Expression> forward; // target coords as functions on source
    std::vector<Expression> inverse; // source coords as functions on target

    static CoordinateMap create(Chart source, Chart target,
                                std::vector<Expression> forward,
                                std::vector<Expression> inverse,
                                const ZeroTestOptions& opt = {});
};

PoissonStructure change_coordinates(const PoissonStructure& P, const CoordinateMap& map,
                                    const ZeroTestOptions& opt = {});

ZeroVerdict casimir_check(const PoissonStructure& P, const ScalarField& K,
                          const ZeroTestOptions& opt = {});

/// Pullback compatibility of phi: source -> target with both brackets,
/// tested on a scalar pair (A, B) over the target chart.
ZeroVerdict poisson_map_check(const PoissonStructure& source,
                              const PoissonStructure& target,
                              const std::vector<Expression>& phi,
                              const ScalarField& A, const ScalarField& B,
                              const ZeroTestOptions& opt = {});

/// Generic rank of the gradient matrix of `exprs` over sample points
/// (pivoted elimination, threshold 1e-8). Errors if no point is usable.
int gradient_rank(const Chart& chart, const std::vector<Expression>& exprs,
                  const ZeroTestOptions& opt = {}, int points = 25);

bool functionally_independent(const Chart& chart, const std::vector<Expression>& exprs,
                              const ZeroTestOptions& opt = {});

} // namespace pgeom

#endif
