#include "pgeom/reduction.hpp"

#include "pgeom/error.hpp"
#include "pgeom/linalg.hpp"
#include "pgeom/symplectic.hpp"

#include <algorithm>
#include <cmath>

namespace pgeom {

Expression SubmanifoldStructure::restrict_expr(const Expression& ambient) const {
    std::map<std::string, Expression> repl;
    for (const auto& [name, f] : parametrization.solved) repl.emplace(name, f);
    return normalize(substitute(ambient, repl));
}

ScalarField restrict_function(const ScalarField& A, const ConstraintSet& C) {
    if (!(A.chart == C.chart()))
        fail(ErrorKind::Validation, "restrict_function: chart mismatch");
    return ScalarField{C.sub_chart(), C.restrict_to_surface(A.expr)};
}

namespace {

std::vector<int> kept_indices(const Chart& chart, const Parametrization& p) {
    std::vector<int> kept;
    for (int i = 0; i < chart.dim(); ++i)
        if (!p.solves(chart.coordinates[i])) kept.push_back(i);
    return kept;
}

// restriction of the kept block of a tensor, as a new structure
PoissonStructure restricted_block(const PoissonStructure& P, const ConstraintSet& C,
                                  Provenance provenance, const ZeroTestOptions& opt) {
    Chart sub = C.sub_chart();
    std::vector<int> kept = kept_indices(P.chart(), C.parametrization());
    const int k = static_cast<int>(kept.size());
    std::vector<Expression> upper;
    upper.reserve(k * (k - 1) / 2);
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
            upper.push_back(C.restrict_to_surface(P.entry(kept[a], kept[b])));
    return PoissonStructure::create(sub, std::move(upper), provenance, opt);
}

} // namespace

SubmanifoldStructure induced_bracket(const PoissonStructure& P, const ConstraintSet& K,
                                     const ZeroTestOptions& opt) {
    if (!(P.chart() == K.chart()))
        fail(ErrorKind::Validation, "induced_bracket: chart mismatch");
    if (!K.has_parametrization())
        fail(ErrorKind::Validation, "induced_bracket needs a parametrization");
    for (int b = 0; b < K.size(); ++b) {
        ZeroVerdict v = casimir_check(P, ScalarField{P.chart(), K.expr(b)}, opt);
        if (!v.zero())
            fail(ErrorKind::NotACasimir,
                 "function " + K.expr(b).str() + " is not a Casimir of the structure");
    }

    SubmanifoldStructure S{K.sub_chart(),
                           restricted_block(P, K, Provenance::Induced, opt),
                           K.parametrization(), P.chart()};

    // tensor identity w^{i alpha} = w^{i b} d_b f^alpha on the surface
    const Chart& ch = P.chart();
    std::vector<int> kept = kept_indices(ch, K.parametrization());
    ZeroTestOptions surface_opt = opt;
    surface_opt.box = 1.0;
    for (const auto& [alpha_name, f] : K.parametrization().solved) {
        int alpha = ch.coord_index(alpha_name);
        for (int i = 0; i < ch.dim(); ++i) {
            std::vector<Expression> terms = {P.entry(i, alpha)};
            for (int b : kept)
                terms.push_back(-(P.entry(i, b) *
                                  differentiate(f, ch.coordinates[b])));
            Expression residual =
                K.restrict_to_surface(Expression::sum(std::move(terms)));
            if (!is_zero(residual, surface_opt).zero())
                fail(ErrorKind::Validation,
                     "induced_bracket: tensor identity failed for coordinate " +
                         ch.coordinates[i] + " against " + alpha_name);
        }
    }
    return S;
}

DiagramClosureReport diagram_closure_check(const PoissonStructure& P,
                                           const ConstraintSet& C,
                                           const ZeroTestOptions& opt, int points,
                                           double tol) {
    if (!C.has_parametrization())
        fail(ErrorKind::Validation, "diagram_closure_check needs a parametrization");

    DiracResult D = dirac_bracket(P, C, opt);
    PoissonStructure restrictedD = restricted_block(D.omega_d, C, Provenance::Induced, opt);

    // symplectic route: pull the inverse form back along the embedding
    SymplecticForm F = invert(P, opt);
    Chart sub = C.sub_chart();
    std::vector<Expression> emb;
    const Chart& ch = P.chart();
    std::map<std::string, Expression> f_of;
    for (const auto& [name, f] : C.parametrization().solved) f_of.emplace(name, f);
    for (const auto& coord : ch.coordinates) {
        auto it = f_of.find(coord);
        emb.push_back(it == f_of.end() ? Expression::symbol(coord) : it->second);
    }
    Embedding E = Embedding::create(sub, ch, emb, opt);
    SymplecticForm Ff = pullback(F, E, opt);

    const int k = sub.dim();
    DiagramClosureReport rep;
    rep.dirac_casimir = D.casimir_property;
    rep.dirac_jacobi = D.omega_d.jacobi_verdict();

    Sampler rng(opt.seed);
    int used = 0;
    double max_dev = 0.0;
    for (int attempt = 0; attempt < 20 * points && used < points; ++attempt) {
        std::map<std::string, double> pt;
        for (const auto& c : sub.coordinates) pt[c] = rng.uniform(-1, 1);
        for (const auto& p : sub.parameters) pt[p] = rng.uniform(-1, 1);
        bool ok = true;
        Mat form(k, k), dirac(k, k);
        for (int a = 0; a < k && ok; ++a)
            for (int b = a + 1; b < k && ok; ++b) {
                auto vf = try_evaluate(Ff.entry(a, b), pt, 1e-6);
                auto vd = try_evaluate(restrictedD.entry(a, b), pt, 1e-6);
                if (!vf || !vd) {
                    ok = false;
                    break;
                }
                form(a, b) = *vf;
                form(b, a) = -*vf;
                dirac(a, b) = *vd;
                dirac(b, a) = -*vd;
            }
        if (!ok) continue;
        Mat inv;
        try {
            inv = inverse(form, 1e-10);
        } catch (const Error&) {
            continue;
        }
        ++used;
        max_dev = std::max(max_dev, (inv - dirac).max_abs());
    }
    if (used == 0)
        fail(ErrorKind::Undecidable, "diagram closure: no usable surface points");
    rep.points = used;
    rep.max_deviation = max_dev;
    rep.pass = max_dev <= tol && rep.dirac_casimir.zero() && rep.dirac_jacobi.zero();
    return rep;
}

namespace {

ExprMatrix transpose(const ExprMatrix& m) {
    if (m.empty()) return m;
    ExprMatrix t = expr_matrix(static_cast<int>(m[0].size()), static_cast<int>(m.size()));
    for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = 0; j < m[0].size(); ++j) t[j][i] = m[i][j];
    return t;
}

} // namespace

PrescribeResult prescribe_casimirs(const Chart& chart,
                                   const std::vector<Expression>& casimirs,
                                   const std::vector<std::string>& solved,
                                   const PoissonStructure& base,
                                   const ZeroTestOptions& opt) {
    const int n = chart.dim();
    const int p = static_cast<int>(casimirs.size());
    if (p == 0) fail(ErrorKind::Validation, "prescribe_casimirs needs casimirs");
    if (static_cast<int>(solved.size()) != p)
        fail(ErrorKind::Validation, "one solved coordinate per casimir is required");
    if ((n - p) % 2 != 0)
        fail(ErrorKind::Validation,
             "residual dimension n - p must be even, got " + std::to_string(n - p));
    if (!base.jacobi_verdict().zero())
        fail(ErrorKind::Validation, "base structure fails the Jacobi identity");

    std::vector<std::string> kept;
    for (const auto& c : chart.coordinates)
        if (std::find(solved.begin(), solved.end(), c) == solved.end())
            kept.push_back(c);
    if (static_cast<int>(kept.size()) != n - p)
        fail(ErrorKind::Validation, "solved coordinates must be distinct chart coordinates");
    if (base.chart().coordinates != kept)
        fail(ErrorKind::Validation,
             "base structure must live on the kept coordinates");

    // primed coordinates: (K^1..K^p, kept...)
    std::vector<Expression> primed = casimirs;
    for (const auto& c : kept) primed.push_back(Expression::symbol(c));

    ExprMatrix jac = expr_matrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int jp = 0; jp < n; ++jp)
            jac[i][jp] = differentiate(primed[jp], chart.coordinates[i]);

    Expression det_a;
    ExprMatrix atilde;
    try {
        atilde = sym_inverse(jac, &det_a);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::SingularMatrix)
            fail(ErrorKind::SingularMatrix,
                 "prescribe_casimirs: the coordinate jacobian is singular (det = " +
                     det_a.str() + ")");
        throw;
    }
    if (is_zero(det_a, opt).zero())
        fail(ErrorKind::SingularMatrix,
             "prescribe_casimirs: the coordinate jacobian is singular");

    ExprMatrix w0ext = expr_matrix(n, n);
    for (int a = 0; a < n - p; ++a)
        for (int b = 0; b < n - p; ++b) w0ext[p + a][p + b] = base.entry(a, b);

    ExprMatrix omega = sym_mul(sym_mul(transpose(atilde), w0ext), atilde);
    std::vector<Expression> upper;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) upper.push_back(omega[i][j]);

    PrescribeResult result{
        PoissonStructure::create(chart, std::move(upper), Provenance::Prescribed, opt),
        ZeroVerdict::proved(), ZeroVerdict::proved()};

    for (const auto& K : casimirs)
        result.casimir = ZeroVerdict::merge(
            result.casimir, casimir_check(result.structure, ScalarField{chart, K}, opt));
    if (!result.casimir.zero())
        fail(ErrorKind::Validation, "prescribed casimir failed its own check");

    // block identity: with b = dK/d(solved), c = dK/d(kept), M = c b^{-1}:
    // omega = [[M^T w M, -M^T w], [-w M, w]]
    ExprMatrix bmat = expr_matrix(p, p), cmat = expr_matrix(n - p, p);
    for (int jp = 0; jp < p; ++jp) {
        for (int al = 0; al < p; ++al)
            bmat[al][jp] = differentiate(casimirs[jp], solved[al]);
        for (int a = 0; a < n - p; ++a)
            cmat[a][jp] = differentiate(casimirs[jp], kept[a]);
    }
    ExprMatrix binv = sym_inverse(bmat);
    ExprMatrix M = sym_mul(cmat, binv);
    ExprMatrix w = expr_matrix(n - p, n - p);
    for (int a = 0; a < n - p; ++a)
        for (int b = 0; b < n - p; ++b) w[a][b] = base.entry(a, b);
    ExprMatrix wM = sym_mul(w, M);
    ExprMatrix MtwM = sym_mul(transpose(M), wM);

    std::vector<int> solved_idx, kept_idx;
    for (const auto& s : solved) solved_idx.push_back(chart.coord_index(s));
    for (const auto& kc : kept) kept_idx.push_back(chart.coord_index(kc));
    auto check = [&](const Expression& got, const Expression& want) {
        result.block_identity = ZeroVerdict::merge(
            result.block_identity, is_zero(got - want, opt));
    };
    for (int al = 0; al < p; ++al) {
        for (int be = 0; be < p; ++be)
            check(result.structure.entry(solved_idx[al], solved_idx[be]), MtwM[al][be]);
        for (int a = 0; a < n - p; ++a) {
            // -M^T w = (w M)^T because w is antisymmetric
            check(result.structure.entry(solved_idx[al], kept_idx[a]),
                  transpose(wM)[al][a]);
            check(result.structure.entry(kept_idx[a], solved_idx[al]),
                  normalize(-wM[a][al]));
        }
    }
    for (int a = 0; a < n - p; ++a)
        for (int b = 0; b < n - p; ++b)
            check(result.structure.entry(kept_idx[a], kept_idx[b]), w[a][b]);
    return result;
}

ZeroVerdict poisson_submanifold_check(
    const PoissonStructure& parent, const SubmanifoldStructure& S,
    const std::vector<std::pair<ScalarField, ScalarField>>& pairs,
    const ZeroTestOptions& opt) {
    ZeroTestOptions surface_opt = opt;
    surface_opt.box = 1.0;
    ZeroVerdict verdict = ZeroVerdict::proved();
    for (const auto& [A, B] : pairs) {
        if (!(A.chart == parent.chart()) || !(B.chart == parent.chart()))
            fail(ErrorKind::Validation, "poisson_submanifold_check: chart mismatch");
        Expression lhs = S.restrict_expr(bracket(parent, A, B));
        Expression Abar = S.restrict_expr(A.expr);
        Expression Bbar = S.restrict_expr(B.expr);
        Expression rhs = bracket_expr(S.induced, Abar, Bbar);
        verdict = ZeroVerdict::merge(verdict, is_zero(lhs - rhs, surface_opt));
    }
    return verdict;
}

FirstIntegralReductionResult first_integral_reduction(const PoissonStructure& P,
                                                      const ScalarField& H,
                                                      const ConstraintSet& C,
                                                      const ZeroTestOptions& opt) {
    for (int a = 0; a < C.size(); ++a) {
        Expression br = bracket_expr(P, C.expr(a), H.expr);
        if (!is_zero(br, opt).zero())
            fail(ErrorKind::NotFirstIntegral,
                 "constraint " + C.expr(a).str() + " is not a first integral: {Phi,H} = " +
                     br.str());
    }
    if (!C.has_parametrization())
        fail(ErrorKind::Validation, "first_integral_reduction needs a parametrization");
    ZeroVerdict sc = second_class_check(P, C, true, opt);
    if (sc.kind != ZeroVerdict::Kind::NonZero)
        fail(ErrorKind::DegenerateDelta,
             "first integrals have a degenerate bracket matrix on the surface");

    DiracResult D = dirac_bracket(P, C, opt);
    FirstIntegralReductionResult out{
        SubmanifoldStructure{C.sub_chart(),
                             restricted_block(D.omega_d, C, Provenance::Induced, opt),
                             C.parametrization(), P.chart()},
        ScalarField{C.sub_chart(), C.restrict_to_surface(H.expr)}, 0.0, 0};

    // reduced flow equals the ambient flow restricted to the surface
    VectorField ambient = hamiltonian_field(P, H);
    VectorField reduced = hamiltonian_field(out.sub.induced, out.reduced_hamiltonian);
    std::vector<int> kept = kept_indices(P.chart(), C.parametrization());
    auto pts = C.surface_points(25, opt.seed);
    for (const auto& pt : pts) {
        bool ok = true;
        double dev = 0.0;
        for (size_t a = 0; a < kept.size() && ok; ++a) {
            auto va = try_evaluate(ambient.components[kept[a]], pt, 1e-10);
            auto vr = try_evaluate(reduced.components[a], pt, 1e-10);
            if (!va || !vr) {
                ok = false;
                break;
            }
            dev = std::max(dev, std::abs(*va - *vr));
        }
        if (!ok) continue;
        ++out.points;
        out.max_flow_deviation = std::max(out.max_flow_deviation, dev);
    }
    if (out.points == 0)
        fail(ErrorKind::Undecidable, "first_integral_reduction: no usable surface points");
    return out;
}

} // namespace pgeom
