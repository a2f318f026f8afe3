#include "pgeom/structures.hpp"

#include "pgeom/error.hpp"
#include "pgeom/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pgeom {

Chart::Chart(std::string chart_name, std::vector<std::string> coords,
             std::vector<std::string> params)
    : name(std::move(chart_name)),
      coordinates(std::move(coords)),
      parameters(std::move(params)) {
    if (coordinates.empty())
        fail(ErrorKind::Validation, "chart needs at least one coordinate");
    std::set<std::string> seen;
    for (const auto& c : coordinates)
        if (!seen.insert(c).second)
            fail(ErrorKind::Validation, "duplicate coordinate '" + c + "'");
    for (const auto& p : parameters)
        if (!seen.insert(p).second)
            fail(ErrorKind::Validation, "parameter '" + p + "' collides with another symbol");
}

int Chart::coord_index(const std::string& coord) const {
    auto it = std::find(coordinates.begin(), coordinates.end(), coord);
    return it == coordinates.end() ? -1 : static_cast<int>(it - coordinates.begin());
}

std::vector<std::string> Chart::symbols() const {
    std::vector<std::string> s = coordinates;
    s.insert(s.end(), parameters.begin(), parameters.end());
    return s;
}

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::Canonical: return "canonical";
        case Provenance::LiePoisson: return "lie_poisson";
        case Provenance::Explicit: return "explicit";
        case Provenance::Dirac: return "dirac";
        case Provenance::Induced: return "induced";
        case Provenance::Prescribed: return "prescribed";
    }
    return "?";
}

int upper_index(int i, int j, int n) {
    // strict upper triangle, row-major: (i, j) with i < j
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

Expression PoissonStructure::entry(int i, int j) const {
    const int n = chart_.dim();
    if (i < 0 || j < 0 || i >= n || j >= n)
        fail(ErrorKind::Validation, "tensor index out of range");
    if (i == j) return Expression::integer(0);
    if (i < j) return upper_[upper_index(i, j, n)];
    return normalize(-upper_[upper_index(j, i, n)]);
}

bool PoissonStructure::structurally_equal(const PoissonStructure& other) const {
    if (!(chart_ == other.chart_)) return false;
    for (size_t k = 0; k < upper_.size(); ++k)
        if (!upper_[k].same(other.upper_[k])) return false;
    return true;
}

PoissonStructure PoissonStructure::create(Chart chart,
                                          std::vector<Expression> upper_triangle,
                                          Provenance provenance,
                                          const ZeroTestOptions& opt) {
    const int n = chart.dim();
    if (static_cast<int>(upper_triangle.size()) != n * (n - 1) / 2)
        fail(ErrorKind::Validation, "wrong number of upper-triangle entries");
    PoissonStructure P;
    P.chart_ = std::move(chart);
    P.upper_.reserve(upper_triangle.size());
    for (auto& e : upper_triangle) P.upper_.push_back(normalize(e));
    P.provenance_ = provenance;
    P.jacobi_ = jacobi_residual(P, opt).verdict;
    const bool derived = provenance == Provenance::Dirac ||
                         provenance == Provenance::Induced ||
                         provenance == Provenance::Prescribed;
    if (derived && !P.jacobi_.zero())
        fail(ErrorKind::Validation,
             std::string("derived structure (") + provenance_name(provenance) +
                 ") has a nonzero Jacobi residual");
    return P;
}

PoissonStructure canonical(int n_pairs) {
    if (n_pairs < 1) fail(ErrorKind::Validation, "canonical structure needs n >= 1 pairs");
    std::vector<std::string> coords;
    for (int a = 1; a <= n_pairs; ++a) coords.push_back("q" + std::to_string(a));
    for (int a = 1; a <= n_pairs; ++a) coords.push_back("p" + std::to_string(a));
    Chart chart("canonical" + std::to_string(2 * n_pairs), coords);
    const int n = 2 * n_pairs;
    std::vector<Expression> upper(n * (n - 1) / 2, Expression::integer(0));
    for (int a = 0; a < n_pairs; ++a)
        upper[upper_index(a, n_pairs + a, n)] = Expression::integer(1);
    return PoissonStructure::create(std::move(chart), std::move(upper),
                                    Provenance::Canonical);
}

StructureConstants so3_constants() {
    StructureConstants c(3, std::vector<std::vector<Rational>>(3, std::vector<Rational>(3)));
    c[0][1][2] = Rational(1);
    c[1][0][2] = Rational(-1);
    c[1][2][0] = Rational(1);
    c[2][1][0] = Rational(-1);
    c[2][0][1] = Rational(1);
    c[0][2][1] = Rational(-1);
    return c;
}

PoissonStructure lie_poisson(const StructureConstants& c) {
    const int n = static_cast<int>(c.size());
    if (n < 1) fail(ErrorKind::Validation, "empty structure constants");
    for (const auto& plane : c) {
        if (static_cast<int>(plane.size()) != n)
            fail(ErrorKind::Validation, "structure constants are not cubic");
        for (const auto& row : plane)
            if (static_cast<int>(row.size()) != n)
                fail(ErrorKind::Validation, "structure constants are not cubic");
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (c[i][j][k] != -c[j][i][k])
                    fail(ErrorKind::Validation,
                         "structure constants not antisymmetric at (i,j,k)=(" +
                             std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                             std::to_string(k + 1) + ")");
    // c^{ij}_a c^{ak}_b + cycle(i,j,k) = 0
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int b = 0; b < n; ++b) {
                    Rational s(0);
                    for (int a = 0; a < n; ++a) {
                        s += c[i][j][a] * c[a][k][b];
                        s += c[j][k][a] * c[a][i][b];
                        s += c[k][i][a] * c[a][j][b];
                    }
                    if (!s.is_zero())
                        fail(ErrorKind::Validation,
                             "structure constants violate the Jacobi condition at "
                             "(i,j,k)=(" +
                                 std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                 "," + std::to_string(k + 1) + ")");
                }

    std::vector<std::string> coords;
    for (int i = 1; i <= n; ++i) coords.push_back("z" + std::to_string(i));
    Chart chart("lie_poisson" + std::to_string(n), coords);
    std::vector<Expression> upper;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            std::vector<Expression> terms;
            for (int k = 0; k < n; ++k)
                if (!c[i][j][k].is_zero())
                    terms.push_back(Expression::rational(c[i][j][k]) *
                                    Expression::symbol(coords[k]));
            upper.push_back(Expression::sum(std::move(terms)));
        }
    return PoissonStructure::create(std::move(chart), std::move(upper),
                                    Provenance::LiePoisson);
}

namespace {

void require_same_chart(const Chart& a, const Chart& b, const char* what) {
    if (!(a == b))
        fail(ErrorKind::Validation, std::string(what) + ": chart mismatch");
}

} // namespace

Expression bracket_expr(const PoissonStructure& P, const Expression& A,
                        const Expression& B) {
    const Chart& ch = P.chart();
    const int n = ch.dim();
    std::vector<Expression> dA(n), dB(n);
    for (int i = 0; i < n; ++i) {
        dA[i] = differentiate(A, ch.coordinates[i]);
        dB[i] = differentiate(B, ch.coordinates[i]);
    }
    std::vector<Expression> terms;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Expression w = P.entry(i, j);
            if (w.is_literal_zero()) continue;
            terms.push_back(w * (dA[i] * dB[j] - dA[j] * dB[i]));
        }
    return normalize(Expression::sum(std::move(terms)));
}

Expression bracket(const PoissonStructure& P, const ScalarField& A, const ScalarField& B) {
    require_same_chart(P.chart(), A.chart, "bracket");
    require_same_chart(P.chart(), B.chart, "bracket");
    return bracket_expr(P, A.expr, B.expr);
}

JacobiReport jacobi_residual(const PoissonStructure& P, const ZeroTestOptions& opt) {
    const Chart& ch = P.chart();
    const int n = ch.dim();
    JacobiReport report;
    report.verdict = ZeroVerdict::proved();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                std::vector<Expression> terms;
                for (int p = 0; p < n; ++p) {
                    Expression wip = P.entry(i, p);
                    Expression wjp = P.entry(j, p);
                    Expression wkp = P.entry(k, p);
                    const std::string& zp = ch.coordinates[p];
                    if (!wip.is_literal_zero())
                        terms.push_back(wip * differentiate(P.entry(j, k), zp));
                    if (!wjp.is_literal_zero())
                        terms.push_back(wjp * differentiate(P.entry(k, i), zp));
                    if (!wkp.is_literal_zero())
                        terms.push_back(wkp * differentiate(P.entry(i, j), zp));
                }
                Expression res = normalize(Expression::sum(std::move(terms)));
                ZeroVerdict v = is_zero(res, opt);
                report.verdict = ZeroVerdict::merge(report.verdict, v);
                report.entries.push_back({i + 1, j + 1, k + 1, res, v});
            }
    return report;
}

VectorField hamiltonian_field(const PoissonStructure& P, const ScalarField& H) {
    require_same_chart(P.chart(), H.chart, "hamiltonian_field");
    const Chart& ch = P.chart();
    const int n = ch.dim();
    std::vector<Expression> dH(n);
    for (int j = 0; j < n; ++j) dH[j] = differentiate(H.expr, ch.coordinates[j]);
    VectorField X{ch, {}};
    X.components.reserve(n);
    for (int i = 0; i < n; ++i) {
        std::vector<Expression> terms;
        for (int j = 0; j < n; ++j) {
            Expression w = P.entry(i, j);
            if (!w.is_literal_zero()) terms.push_back(w * dH[j]);
        }
        X.components.push_back(normalize(Expression::sum(std::move(terms))));
    }
    return X;
}

VectorField lie_bracket(const VectorField& V, const VectorField& U) {
    require_same_chart(V.chart, U.chart, "lie_bracket");
    const Chart& ch = V.chart;
    const int n = ch.dim();
    if (static_cast<int>(V.components.size()) != n ||
        static_cast<int>(U.components.size()) != n)
        fail(ErrorKind::Validation, "vector field has wrong component count");
    VectorField W{ch, {}};
    for (int i = 0; i < n; ++i) {
        std::vector<Expression> terms;
        for (int j = 0; j < n; ++j) {
            terms.push_back(V.components[j] * differentiate(U.components[i], ch.coordinates[j]));
            terms.push_back(-(U.components[j] * differentiate(V.components[i], ch.coordinates[j])));
        }
        W.components.push_back(normalize(Expression::sum(std::move(terms))));
    }
    return W;
}

ZeroVerdict homomorphism_check(const PoissonStructure& P, const ScalarField& A,
                               const ScalarField& B, const ZeroTestOptions& opt) {
    VectorField XA = hamiltonian_field(P, A);
    VectorField XB = hamiltonian_field(P, B);
    VectorField LB = lie_bracket(XA, XB);
    ScalarField AB{P.chart(), bracket(P, A, B)};
    VectorField XAB = hamiltonian_field(P, AB);
    ZeroVerdict verdict = ZeroVerdict::proved();
    for (int i = 0; i < P.chart().dim(); ++i) {
        Expression s = normalize(XAB.components[i] + LB.components[i]);
        verdict = ZeroVerdict::merge(verdict, is_zero(s, opt));
    }
    return verdict;
}

CoordinateMap CoordinateMap::create(Chart source_chart, Chart target_chart,
                                    std::vector<Expression> fwd,
                                    std::vector<Expression> inv,
                                    const ZeroTestOptions& opt) {
    if (static_cast<int>(fwd.size()) != target_chart.dim() ||
        static_cast<int>(inv.size()) != source_chart.dim())
        fail(ErrorKind::Validation, "coordinate map component count mismatch");

    // round trip forward(inverse(z')) == z' sampled over the target box,
    // and the symmetric check on the source side
    auto check_roundtrip = [&](const Chart& outer, const std::vector<Expression>& first,
                               const std::vector<Expression>& second,
                               const Chart& inner) {
        Sampler rng(opt.seed);
        int accepted = 0;
        for (int attempt = 0; attempt < 10 * 50 && accepted < 50; ++attempt) {
            std::map<std::string, double> pt;
            for (const auto& c : outer.coordinates)
                pt[c] = rng.uniform(-opt.box, opt.box);
            for (const auto& p : outer.parameters) pt[p] = rng.uniform(-opt.box, opt.box);
            std::map<std::string, double> mid = pt;
            bool ok = true;
            std::map<std::string, double> inner_pt;
            for (size_t i = 0; i < first.size() && ok; ++i) {
                auto v = try_evaluate(first[i], pt, 1e-12);
                if (!v) ok = false;
                else inner_pt[inner.coordinates[i]] = *v;
            }
            if (!ok) continue;
            for (const auto& p : outer.parameters) inner_pt[p] = pt[p];
            for (size_t i = 0; i < second.size() && ok; ++i) {
                auto v = try_evaluate(second[i], inner_pt, 1e-12);
                if (!v) ok = false;
                else if (std::abs(*v - pt.at(outer.coordinates[i])) > 1e-8)
                    fail(ErrorKind::Validation,
                         "coordinate map round trip failed at coordinate " +
                             outer.coordinates[i]);
            }
            if (!ok) continue;
            ++accepted;
        }
        if (accepted == 0)
            fail(ErrorKind::Validation, "coordinate map round trip had no usable points");
    };
    check_roundtrip(target_chart, inv, fwd, source_chart);
    check_roundtrip(source_chart, fwd, inv, target_chart);

    CoordinateMap m;
    m.source = std::move(source_chart);
    m.target = std::move(target_chart);
    m.forward = std::move(fwd);
    m.inverse = std::move(inv);
    return m;
}

PoissonStructure change_coordinates(const PoissonStructure& P, const CoordinateMap& map,
                                    const ZeroTestOptions& opt) {
    require_same_chart(P.chart(), map.source, "change_coordinates");
    const Chart& src = map.source;
    const Chart& dst = map.target;
    const int n = src.dim();
    if (dst.dim() != n)
        fail(ErrorKind::Validation, "change_coordinates: dimension mismatch");

    std::map<std::string, Expression> to_target;
    for (int i = 0; i < n; ++i) to_target.emplace(src.coordinates[i], map.inverse[i]);

    // d phi^{i'} / d z^i, evaluated before substitution
    std::vector<std::vector<Expression>> jac(n, std::vector<Expression>(n));
    for (int ip = 0; ip < n; ++ip)
        for (int i = 0; i < n; ++i)
            jac[ip][i] = differentiate(map.forward[ip], src.coordinates[i]);

    std::vector<Expression> upper;
    for (int ip = 0; ip < n; ++ip)
        for (int jp = ip + 1; jp < n; ++jp) {
            std::vector<Expression> terms;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    Expression w = P.entry(i, j);
                    if (w.is_literal_zero()) continue;
                    terms.push_back(w * (jac[ip][i] * jac[jp][j] - jac[ip][j] * jac[jp][i]));
                }
            Expression e = Expression::sum(std::move(terms));
            upper.push_back(normalize(substitute(e, to_target)));
        }
    return PoissonStructure::create(dst, std::move(upper), P.provenance(), opt);
}

ZeroVerdict casimir_check(const PoissonStructure& P, const ScalarField& K,
                          const ZeroTestOptions& opt) {
    VectorField X = hamiltonian_field(P, K);
    ZeroVerdict verdict = ZeroVerdict::proved();
    for (const auto& comp : X.components)
        verdict = ZeroVerdict::merge(verdict, is_zero(comp, opt));
    return verdict;
}

ZeroVerdict poisson_map_check(const PoissonStructure& source,
                              const PoissonStructure& target,
                              const std::vector<Expression>& phi,
                              const ScalarField& A, const ScalarField& B,
                              const ZeroTestOptions& opt) {
    if (static_cast<int>(phi.size()) != target.chart().dim())
        fail(ErrorKind::Validation,
             "poisson_map_check: map has wrong number of components");
    require_same_chart(target.chart(), A.chart, "poisson_map_check");
    require_same_chart(target.chart(), B.chart, "poisson_map_check");

    std::map<std::string, Expression> pull;
    for (int t = 0; t < target.chart().dim(); ++t)
        pull.emplace(target.chart().coordinates[t], phi[t]);

    Expression pullA = substitute(A.expr, pull);
    Expression pullB = substitute(B.expr, pull);
    Expression lhs = bracket_expr(source, pullA, pullB);
    Expression rhs = substitute(bracket_expr(target, A.expr, B.expr), pull);
    return is_zero(lhs - rhs, opt);
}

int gradient_rank(const Chart& chart, const std::vector<Expression>& exprs,
                  const ZeroTestOptions& opt, int points) {
    const int n = chart.dim();
    const int m = static_cast<int>(exprs.size());
    std::vector<std::vector<Expression>> grad(m, std::vector<Expression>(n));
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i)
            grad[a][i] = differentiate(exprs[a], chart.coordinates[i]);

    Sampler rng(opt.seed);
    int best = -1;
    int used = 0;
    for (int attempt = 0; attempt < 10 * points && used < points; ++attempt) {
        std::map<std::string, double> pt;
        for (const auto& c : chart.coordinates) pt[c] = rng.uniform(-opt.box, opt.box);
        for (const auto& p : chart.parameters) pt[p] = rng.uniform(-opt.box, opt.box);
        Mat g(m, n);
        bool ok = true;
        for (int a = 0; a < m && ok; ++a)
            for (int i = 0; i < n && ok; ++i) {
                auto v = try_evaluate(grad[a][i], pt, opt.min_den);
                if (!v) ok = false;
                else g(a, i) = *v;
            }
        if (!ok) continue;
        ++used;
        best = std::max(best, rank(g, 1e-8));
    }
    if (best < 0)
        fail(ErrorKind::Undecidable, "rank test inconclusive: all sample points degenerate");
    return best;
}

bool functionally_independent(const Chart& chart, const std::vector<Expression>& exprs,
                              const ZeroTestOptions& opt) {
    if (exprs.empty()) return true;
    return gradient_rank(chart, exprs, opt) == static_cast<int>(exprs.size());
}

} // namespace pgeom
