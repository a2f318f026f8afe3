#include "pgeom/symplectic.hpp"

#include "pgeom/error.hpp"

#include <cmath>

namespace pgeom {

Expression SymplecticForm::entry(int i, int j) const {
    const int n = chart_.dim();
    if (i < 0 || j < 0 || i >= n || j >= n)
        fail(ErrorKind::Validation, "form index out of range");
    if (i == j) return Expression::integer(0);
    if (i < j) return upper_[upper_index(i, j, n)];
    return normalize(-upper_[upper_index(j, i, n)]);
}

SymplecticForm SymplecticForm::create(Chart chart, std::vector<Expression> upper_triangle,
                                      const ZeroTestOptions& opt) {
    const int n = chart.dim();
    if (static_cast<int>(upper_triangle.size()) != n * (n - 1) / 2)
        fail(ErrorKind::Validation, "wrong number of upper-triangle entries");
    SymplecticForm F;
    F.chart_ = std::move(chart);
    F.upper_.reserve(upper_triangle.size());
    for (auto& e : upper_triangle) F.upper_.push_back(normalize(e));
    F.closedness_ = closedness_residual(F, opt).verdict;
    return F;
}

ClosednessReport closedness_residual(const SymplecticForm& F, const ZeroTestOptions& opt) {
    const Chart& ch = F.chart();
    const int n = ch.dim();
    ClosednessReport report;
    report.verdict = ZeroVerdict::proved();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                Expression res = normalize(
                    differentiate(F.entry(j, k), ch.coordinates[i]) +
                    differentiate(F.entry(k, i), ch.coordinates[j]) +
                    differentiate(F.entry(i, j), ch.coordinates[k]));
                ZeroVerdict v = is_zero(res, opt);
                report.verdict = ZeroVerdict::merge(report.verdict, v);
                report.entries.push_back({i + 1, j + 1, k + 1, res, v});
            }
    return report;
}

namespace {

ExprMatrix full_matrix(const Chart& ch, const std::vector<Expression>& upper,
                       bool covariant_sign_irrelevant = true) {
    (void)covariant_sign_irrelevant;
    const int n = ch.dim();
    ExprMatrix m = expr_matrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            m[i][j] = upper[upper_index(i, j, n)];
            m[j][i] = normalize(-m[i][j]);
        }
    return m;
}

std::vector<Expression> upper_of(const ExprMatrix& m) {
    const int n = static_cast<int>(m.size());
    std::vector<Expression> upper;
    upper.reserve(n * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) upper.push_back(m[i][j]);
    return upper;
}

} // namespace

SymplecticForm invert(const PoissonStructure& P, const ZeroTestOptions& opt) {
    const Chart& ch = P.chart();
    const int n = ch.dim();
    if (n > 8)
        fail(ErrorKind::DimensionTooLarge,
             "symbolic inversion limited to dimension 8; use invert_at per point");
    ExprMatrix omega = full_matrix(ch, P.upper_triangle());
    Expression d = sym_det(omega);
    if (is_zero(d, opt).zero())
        fail(ErrorKind::DegenerateStructure,
             "Poisson tensor is degenerate (det = " + d.str() + ")");
    ExprMatrix inv = sym_inverse(omega);
    // inverse check: inv * omega = identity
    ExprMatrix prod = sym_mul(inv, omega);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Expression want = i == j ? Expression::integer(1) : Expression::integer(0);
            if (!is_zero(prod[i][j] - want, opt).zero())
                fail(ErrorKind::Validation, "inverse verification failed");
        }
    return SymplecticForm::create(ch, upper_of(inv), opt);
}

PoissonStructure invert_form(const SymplecticForm& F, const ZeroTestOptions& opt) {
    const Chart& ch = F.chart();
    if (ch.dim() > 8)
        fail(ErrorKind::DimensionTooLarge,
             "symbolic inversion limited to dimension 8");
    ExprMatrix form = full_matrix(ch, F.upper_triangle());
    Expression d = sym_det(form);
    if (is_zero(d, opt).zero())
        fail(ErrorKind::DegenerateStructure, "form is degenerate");
    ExprMatrix inv = sym_inverse(form);
    return PoissonStructure::create(ch, upper_of(inv), Provenance::Explicit, opt);
}

Mat invert_at(const PoissonStructure& P, const std::map<std::string, double>& point) {
    const int n = P.chart().dim();
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double v = evaluate(P.entry(i, j), point);
            m(i, j) = v;
            m(j, i) = -v;
        }
    double d = det(m);
    if (std::abs(d) <= 1e-10)
        fail(ErrorKind::Numeric, "Poisson tensor is singular at the given point");
    return inverse(m);
}

namespace {

// radial homotopy antiderivative: each monomial of weight d in the chart
// coordinates picks up the factor 1/(d + offset)
Expression homotopy_integral(const Expression& entry, const Chart& ch, int offset) {
    auto monos = collect_monomials(entry, ch.coordinates);
    std::vector<Expression> terms;
    for (const auto& [coeff, powers] : monos) {
        int d = 0;
        std::vector<Expression> factors = {coeff};
        for (const auto& [var, e] : powers) {
            d += e;
            factors.push_back(Expression::power(Expression::symbol(var), e));
        }
        factors.push_back(Expression::rational(Rational(1, d + offset)));
        terms.push_back(Expression::product(std::move(factors)));
    }
    return normalize(Expression::sum(std::move(terms)));
}

} // namespace

VectorField potential(const SymplecticForm& F) {
    const Chart& ch = F.chart();
    const int n = ch.dim();
    if (!F.closedness_verdict().zero())
        fail(ErrorKind::NotClosed, "form is not closed; no potential exists");
    for (const auto& e : F.upper_triangle())
        if (!is_polynomial_in(e, ch.coordinates))
            fail(ErrorKind::NonPolynomialEntry,
                 "potential requires polynomial entries, got " + e.str());

    VectorField a{ch, std::vector<Expression>(n, Expression::integer(0))};
    for (int j = 0; j < n; ++j) {
        std::vector<Expression> terms;
        for (int i = 0; i < n; ++i) {
            Expression w = F.entry(i, j);
            if (w.is_literal_zero()) continue;
            terms.push_back(Expression::symbol(ch.coordinates[i]) *
                            homotopy_integral(w, ch, 2));
        }
        a.components[j] = normalize(Expression::sum(std::move(terms)));
    }
    // exact curl check
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Expression curl = differentiate(a.components[j], ch.coordinates[i]) -
                              differentiate(a.components[i], ch.coordinates[j]);
            if (!normalize(curl - F.entry(i, j)).is_literal_zero())
                fail(ErrorKind::NotClosed,
                     "potential failed the curl check at entry (" +
                         std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
        }
    return a;
}

ScalarField generator(const PoissonStructure& P, const VectorField& V) {
    if (!(P.chart() == V.chart))
        fail(ErrorKind::Validation, "generator: chart mismatch");
    const Chart& ch = P.chart();
    const int n = ch.dim();
    SymplecticForm F = invert(P);
    std::vector<Expression> U(n);
    for (int i = 0; i < n; ++i) {
        std::vector<Expression> terms;
        for (int j = 0; j < n; ++j) {
            Expression w = F.entry(i, j);
            if (w.is_literal_zero() || V.components[j].is_literal_zero()) continue;
            terms.push_back(w * V.components[j]);
        }
        U[i] = normalize(Expression::sum(std::move(terms)));
        if (!is_polynomial_in(U[i], ch.coordinates))
            fail(ErrorKind::NonPolynomialEntry,
                 "generator requires polynomial covariant components, got " + U[i].str());
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Expression curl = normalize(differentiate(U[j], ch.coordinates[i]) -
                                        differentiate(U[i], ch.coordinates[j]));
            if (!curl.is_literal_zero())
                fail(ErrorKind::NotHamiltonian,
                     "field is not Hamiltonian: curl component (" +
                         std::to_string(i + 1) + "," + std::to_string(j + 1) +
                         ") = " + curl.str());
        }
    std::vector<Expression> terms;
    for (int j = 0; j < n; ++j) {
        if (U[j].is_literal_zero()) continue;
        terms.push_back(Expression::symbol(ch.coordinates[j]) *
                        homotopy_integral(U[j], ch, 1));
    }
    ScalarField A{ch, normalize(Expression::sum(std::move(terms)))};
    VectorField X = hamiltonian_field(P, A);
    for (int i = 0; i < n; ++i)
        if (!normalize(X.components[i] - V.components[i]).is_literal_zero())
            fail(ErrorKind::Validation, "generator verification failed");
    return A;
}

Embedding Embedding::create(Chart sub, Chart ambient, std::vector<Expression> map,
                            const ZeroTestOptions& opt) {
    if (static_cast<int>(map.size()) != ambient.dim())
        fail(ErrorKind::Validation, "embedding needs one expression per ambient coordinate");
    const int k = sub.dim();
    // numeric injectivity: rank of dz/dx must be k at sample points
    int r = gradient_rank(sub, map, opt);
    if (r != k)
        fail(ErrorKind::Validation,
             "embedding Jacobian is rank deficient (rank " + std::to_string(r) +
                 " of " + std::to_string(k) + ")");
    Embedding E;
    E.sub = std::move(sub);
    E.ambient = std::move(ambient);
    E.map = std::move(map);
    return E;
}

SymplecticForm pullback(const SymplecticForm& F, const Embedding& E,
                        const ZeroTestOptions& opt) {
    if (!(F.chart() == E.ambient))
        fail(ErrorKind::Validation, "pullback: ambient chart mismatch");
    const Chart& sub = E.sub;
    const int k = sub.dim();
    const int n = E.ambient.dim();

    std::map<std::string, Expression> onto;
    for (int i = 0; i < n; ++i) onto.emplace(E.ambient.coordinates[i], E.map[i]);

    std::vector<std::vector<Expression>> jac(n, std::vector<Expression>(k));
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < k; ++a)
            jac[i][a] = differentiate(E.map[i], sub.coordinates[a]);

    std::vector<Expression> upper;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
            std::vector<Expression> terms;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    Expression w = F.entry(i, j);
                    if (w.is_literal_zero()) continue;
                    terms.push_back(substitute(w, onto) *
                                    (jac[i][a] * jac[j][b] - jac[i][b] * jac[j][a]));
                }
            upper.push_back(normalize(Expression::sum(std::move(terms))));
        }
    return SymplecticForm::create(sub, std::move(upper), opt);
}

PartitionedInverseReport partitioned_inverse(const Mat& A, int top, double tol) {
    const int n = A.rows();
    if (A.cols() != n) fail(ErrorKind::Validation, "partitioned_inverse: square matrix required");
    if (top <= 0 || top >= n)
        fail(ErrorKind::Validation, "partitioned_inverse: block split out of range");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::abs(A(i, j) + A(j, i)) > 1e-12)
                fail(ErrorKind::Validation, "partitioned_inverse: matrix is not antisymmetric");

    Mat Ainv = inverse(A, 0.0); // throws SingularMatrix when A is singular

    const int bot = n - top;
    Mat a = A.block(0, 0, top, top);
    Mat b = A.block(0, top, top, bot);
    Mat c = A.block(top, top, bot, bot);

    PartitionedInverseReport rep;
    rep.alpha = Ainv.block(0, 0, top, top);
    rep.beta = Ainv.block(0, top, top, bot);
    rep.gamma = Ainv.block(top, top, bot, bot);

    auto try_inverse = [](const Mat& m, Mat& out) {
        try {
            out = inverse(m, 1e-12);
            return true;
        } catch (const Error&) {
            return false;
        }
    };
    Mat a_inv, gamma_inv;
    rep.a_invertible = try_inverse(a, a_inv);
    rep.gamma_invertible = try_inverse(rep.gamma, gamma_inv);
    if (rep.a_invertible && rep.gamma_invertible) {
        Mat lhs1 = gamma_inv;
        Mat rhs1 = c + b.transposed() * a_inv * b;
        rep.gamma_identity_error = (lhs1 - rhs1).max_abs();
        Mat lhs2 = a_inv;
        Mat rhs2 = rep.alpha + rep.beta * gamma_inv * rep.beta.transposed();
        rep.a_identity_error = (lhs2 - rhs2).max_abs();
        rep.identities_hold =
            rep.gamma_identity_error <= tol && rep.a_identity_error <= tol;
    }
    return rep;
}

} // namespace pgeom
