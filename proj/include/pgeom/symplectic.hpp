#ifndef PGEOM_SYMPLECTIC_HPP
#define PGEOM_SYMPLECTIC_HPP

#include "pgeom/linalg.hpp"
#include "pgeom/structures.hpp"
#include "pgeom/symmat.hpp"

#include <map>

namespace pgeom {

/// Covariant antisymmetric two-form; antisymmetry is structural and the
/// closedness residual verdict is recorded at construction.
class SymplecticForm {
public:
    static SymplecticForm create(Chart chart, std::vector<Expression> upper_triangle,
                                 const ZeroTestOptions& opt = {});

    const Chart& chart() const { return chart_; }
    const ZeroVerdict& closedness_verdict() const { return closedness_; }
    Expression entry(int i, int j) const;
    const std::vector<Expression>& upper_triangle() const { return upper_; }

private:
    SymplecticForm() = default;
    Chart chart_;
    std::vector<Expression> upper_;
    ZeroVerdict closedness_;
};

struct ClosednessReport {
    struct Entry {
        int i, j, k;
        Expression residual;
        ZeroVerdict verdict;
    };
    std::vector<Entry> entries;
    ZeroVerdict verdict;
};

ClosednessReport closedness_residual(const SymplecticForm& F,
                                     const ZeroTestOptions& opt = {});

/// Symbolic inverse of a nondegenerate Poisson tensor (dimension <= 8).
/// Verifies inverse * tensor = identity and records the closedness verdict.
SymplecticForm invert(const PoissonStructure& P, const ZeroTestOptions& opt = {});

/// The opposite direction of the same correspondence.
PoissonStructure invert_form(const SymplecticForm& F, const ZeroTestOptions& opt = {});

/// Numeric inverse at one point; the fallback for large charts.
Mat invert_at(const PoissonStructure& P, const std::map<std::string, double>& point);

/// Vector potential with curl equal to the form, for polynomial entries.
/// Gauge: radial homotopy with zero integration constants. The curl identity
/// is re-verified exactly and a failure raises Error(NotClosed).
VectorField potential(const SymplecticForm& F);

/// Hamiltonian generator of V when one exists; otherwise throws
/// Error(NotHamiltonian) naming the nonzero curl component.
ScalarField generator(const PoissonStructure& P, const VectorField& V);

/// Injective parametrized surface x -> z(x) inside an ambient chart.
struct Embedding {
    Chart sub;
    Chart ambient;
    std::vector<Expression> map; // one expression per ambient coordinate

    static Embedding create(Chart sub, Chart ambient, std::vector<Expression> map,
                            const ZeroTestOptions& opt = {});
};

SymplecticForm pullback(const SymplecticForm& F, const Embedding& E,
                        const ZeroTestOptions& opt = {});

struct PartitionedInverseReport {
    Mat alpha, beta, gamma;
    bool a_invertible = false;
    bool gamma_invertible = false;
    double gamma_identity_error = 0.0; // |gamma^{-1} - (c + b^T a^{-1} b)|
    double a_identity_error = 0.0;     // |a^{-1} - (alpha + beta gamma^{-1} beta^T)|
    bool identities_hold = false;
};

/// Block inverse identities for an antisymmetric invertible matrix split
/// after `top` rows/columns.
PartitionedInverseReport partitioned_inverse(const Mat& A, int top, double tol = 1e-10);

} // namespace pgeom

#endif
