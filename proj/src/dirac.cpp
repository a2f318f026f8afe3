#include "pgeom/dirac.hpp"

#include "pgeom/error.hpp"

#include <algorithm>
#include <cmath>

namespace pgeom {

bool Parametrization::solves(const std::string& coord) const {
    for (const auto& [name, f] : solved)
        if (name == coord) return true;
    return false;
}

const Parametrization& ConstraintSet::parametrization() const {
    if (!param_)
        fail(ErrorKind::Validation, "constraint set has no parametrization");
    return *param_;
}

std::vector<std::string> ConstraintSet::kept_coordinates() const {
    const Parametrization& p = parametrization();
    std::vector<std::string> kept;
    for (const auto& c : chart_.coordinates)
        if (!p.solves(c)) kept.push_back(c);
    return kept;
}

Chart ConstraintSet::sub_chart() const {
    return Chart(chart_.name + "_surface", kept_coordinates(), chart_.parameters);
}

Expression ConstraintSet::restrict_to_surface(const Expression& e) const {
    const Parametrization& p = parametrization();
    std::map<std::string, Expression> repl;
    for (const auto& [name, f] : p.solved) repl.emplace(name, f);
    return normalize(substitute(e, repl));
}

std::vector<std::map<std::string, double>> ConstraintSet::surface_points(
    int count, std::uint64_t seed) const {
    const Parametrization& p = parametrization();
    std::vector<std::string> kept = kept_coordinates();
    Sampler rng(seed);
    std::vector<std::map<std::string, double>> out;
    for (int attempt = 0; attempt < 10 * count && static_cast<int>(out.size()) < count;
         ++attempt) {
        std::map<std::string, double> pt;
        for (const auto& c : kept) pt[c] = rng.uniform(-1, 1);
        for (const auto& par : chart_.parameters) pt[par] = rng.uniform(-1, 1);
        bool ok = true;
        for (const auto& [name, f] : p.solved) {
            auto v = try_evaluate(f, pt, 1e-8);
            if (!v) {
                ok = false;
                break;
            }
            pt[name] = *v;
        }
        if (ok) out.push_back(std::move(pt));
    }
    if (out.empty())
        fail(ErrorKind::Undecidable, "no usable surface sample points");
    return out;
}

ConstraintSet ConstraintSet::create(Chart chart, std::vector<Constraint> constraints,
                                    std::optional<Parametrization> parametrization,
                                    const ZeroTestOptions& opt) {
    if (constraints.empty())
        fail(ErrorKind::Validation, "constraint set needs at least one constraint");
    ConstraintSet C;
    C.chart_ = std::move(chart);
    for (auto& c : constraints) c.expr = normalize(c.expr);
    C.constraints_ = std::move(constraints);
    C.param_ = std::move(parametrization);

    std::vector<Expression> exprs;
    for (const auto& c : C.constraints_) exprs.push_back(c.expr);
    if (!functionally_independent(C.chart_, exprs, opt))
        fail(ErrorKind::Validation, "constraints are not functionally independent");

    if (C.param_) {
        std::vector<std::string> kept = C.kept_coordinates();
        if (static_cast<int>(C.param_->solved.size()) + static_cast<int>(kept.size()) !=
            C.chart_.dim())
            fail(ErrorKind::Validation, "parametrization split does not cover the chart");
        for (const auto& [name, f] : C.param_->solved) {
            if (C.chart_.coord_index(name) < 0)
                fail(ErrorKind::Validation,
                     "parametrization solves unknown coordinate '" + name + "'");
            for (const auto& s : free_symbols(f))
                if (C.param_->solves(s))
                    fail(ErrorKind::Validation,
                         "parametrization of '" + name + "' uses a solved coordinate");
        }
        for (const auto& c : C.constraints_) {
            ZeroVerdict v = is_zero(C.restrict_to_surface(c.expr), opt);
            if (!v.zero())
                fail(ErrorKind::Validation,
                     "parametrization does not solve constraint " + c.expr.str());
        }
    }
    return C;
}

ExprMatrix delta_matrix(const PoissonStructure& P, const ConstraintSet& C) {
    if (!(P.chart() == C.chart()))
        fail(ErrorKind::Validation, "delta_matrix: chart mismatch");
    const int m = C.size();
    ExprMatrix delta = expr_matrix(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) {
            delta[a][b] = bracket_expr(P, C.expr(a), C.expr(b));
            delta[b][a] = normalize(-delta[a][b]);
        }
    return delta;
}

ZeroVerdict second_class_check(const PoissonStructure& P, const ConstraintSet& C,
                               bool on_surface, const ZeroTestOptions& opt) {
    ExprMatrix delta = delta_matrix(P, C);
    Expression d = sym_det(delta);
    if (on_surface) {
        if (!C.has_parametrization())
            fail(ErrorKind::Validation,
                 "second_class_check on the surface needs a parametrization");
        d = C.restrict_to_surface(d);
        ZeroTestOptions surface_opt = opt;
        surface_opt.box = 1.0;
        return is_zero(d, surface_opt);
    }
    return is_zero(d, opt);
}

// ---------------------------------------------------------------------------
// consistency chain

namespace {

std::string ordinal(int step) { return "step " + std::to_string(step); }

} // namespace

ChainResult consistency_chain(const PoissonStructure& P, const ScalarField& H,
                              const ConstraintSet& C, int max_steps,
                              const ZeroTestOptions& opt) {
    if (!(P.chart() == C.chart()) || !(P.chart() == H.chart))
        fail(ErrorKind::Validation, "consistency_chain: chart mismatch");
    const int n = P.chart().dim();

    std::vector<Constraint> current = C.constraints();
    std::vector<Expression> frontier;
    for (const auto& c : current) frontier.push_back(c.expr);

    ZeroTestOptions surface_opt = opt;
    surface_opt.box = 1.0;

    ChainResult result;
    auto current_exprs = [&] {
        std::vector<Expression> e;
        for (const auto& c : current) e.push_back(c.expr);
        return e;
    };

    for (int step = 1; step <= max_steps; ++step) {
        std::vector<Expression> next_frontier;
        for (const auto& phi : frontier) {
            Expression psi = bracket_expr(P, phi, H.expr);
            if (psi.is_literal_zero()) {
                result.log.push_back(ordinal(step) + ": {" + phi.str() +
                                     ", H} vanishes identically");
                continue;
            }
            Expression on_surface =
                C.has_parametrization() ? C.restrict_to_surface(psi) : psi;
            ZeroVerdict v = is_zero(on_surface, surface_opt);
            if (v.zero()) {
                result.log.push_back(ordinal(step) + ": {" + phi.str() +
                                     ", H} vanishes on the surface (" +
                                     std::string(v.tier()) + ")");
                continue;
            }
            // candidate survives; functionally independent of the current set?
            std::vector<Expression> exprs = current_exprs();
            int base_rank = gradient_rank(P.chart(), exprs, opt);
            exprs.push_back(psi);
            int ext_rank = gradient_rank(P.chart(), exprs, opt);
            if (ext_rank > base_rank) {
                if (static_cast<int>(current.size()) + 1 > n)
                    fail(ErrorKind::Undecidable,
                         "consistency chain produced more constraints than the "
                         "chart dimension");
                current.push_back(Constraint{psi, ConstraintOrigin::Secondary, step});
                next_frontier.push_back(psi);
                result.log.push_back(ordinal(step) + ": appended secondary " +
                                     psi.str());
                continue;
            }
            // dependent on the current set: decide constant-on-surface
            std::set<std::string> syms = free_symbols(on_surface);
            bool all_big = false, all_small = true;
            if (syms.empty()) {
                double val = evaluate(on_surface, {});
                all_big = std::abs(val) > 1e-6;
                all_small = !all_big;
            } else if (C.has_parametrization()) {
                auto pts = C.surface_points(50, opt.seed);
                all_big = true;
                for (const auto& pt : pts) {
                    auto val = try_evaluate(psi, pt, 0.0);
                    if (!val) continue;
                    all_big = all_big && std::abs(*val) > 1e-6;
                    all_small = all_small && std::abs(*val) <= 1e-6;
                }
            } else {
                fail(ErrorKind::Undecidable,
                     "dependent candidate " + psi.str() +
                         " cannot be classified without a parametrization");
            }
            if (all_big) {
                result.outcome = ChainResult::Outcome::Contradiction;
                result.witness = psi;
                result.steps = step;
                result.log.push_back(ordinal(step) + ": contradiction, " + psi.str() +
                                     " is nonzero on the surface");
                return result;
            }
            if (all_small) {
                result.log.push_back(ordinal(step) + ": dropped dependent candidate " +
                                     psi.str());
                continue;
            }
            fail(ErrorKind::Undecidable,
                 "dependent candidate " + psi.str() +
                     " is neither zero nor constant on the surface samples");
        }
        if (next_frontier.empty()) {
            result.outcome = ChainResult::Outcome::Terminated;
            result.steps = step;
            // a stale parametrization no longer solves the extended set
            std::optional<Parametrization> param;
            if (current.size() == C.constraints().size() && C.has_parametrization())
                param = C.parametrization();
            result.final_set =
                ConstraintSet::create(P.chart(), current, std::move(param), opt);
            return result;
        }
        frontier = std::move(next_frontier);
    }
    result.outcome = ChainResult::Outcome::StepLimit;
    result.steps = max_steps;
    return result;
}

// ---------------------------------------------------------------------------
// Dirac bracket

namespace {

// G[i][a] = {z^i, Phi^a}
ExprMatrix coordinate_brackets(const PoissonStructure& P, const ConstraintSet& C) {
    const Chart& ch = P.chart();
    const int n = ch.dim();
    const int m = C.size();
    ExprMatrix G = expr_matrix(n, m);
    for (int a = 0; a < m; ++a) {
        VectorField X = hamiltonian_field(P, ScalarField{ch, C.expr(a)});
        for (int i = 0; i < n; ++i) G[i][a] = X.components[i];
    }
    return G;
}

} // namespace

DiracResult dirac_bracket(const PoissonStructure& P, const ConstraintSet& C,
                          const ZeroTestOptions& opt) {
    if (!(P.chart() == C.chart()))
        fail(ErrorKind::Validation, "dirac_bracket: chart mismatch");
    const int m = C.size();
    if (m % 2 != 0)
        fail(ErrorKind::Validation,
             "dirac_bracket needs an even number of constraints, got " +
                 std::to_string(m));
    const Chart& ch = P.chart();
    const int n = ch.dim();

    ExprMatrix delta = delta_matrix(P, C);
    Expression det;
    ExprMatrix delta_inv;
    try {
        delta_inv = sym_inverse(delta, &det);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::SingularMatrix)
            fail(ErrorKind::DegenerateDelta,
                 "constraint matrix is degenerate: det = " + det.str());
        throw;
    }
    if (is_zero(det, opt).zero())
        fail(ErrorKind::DegenerateDelta,
             "constraint matrix is degenerate: det = " + det.str());

    ExprMatrix G = coordinate_brackets(P, C);

    // omega_D^{ij} = omega^{ij} - {z^i,Phi^a} Dtilde_{ab} {Phi^b,z^j}
    //             = omega^{ij} + sum_ab G[i][a] Dtilde[a][b] G[j][b]
    std::vector<Expression> upper;
    upper.reserve(n * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            std::vector<Expression> terms = {P.entry(i, j)};
            for (int a = 0; a < m; ++a) {
                if (G[i][a].is_literal_zero()) continue;
                for (int b = 0; b < m; ++b) {
                    if (delta_inv[a][b].is_literal_zero() ||
                        G[j][b].is_literal_zero())
                        continue;
                    terms.push_back(G[i][a] * delta_inv[a][b] * G[j][b]);
                }
            }
            upper.push_back(normalize(Expression::sum(std::move(terms))));
        }

    PoissonStructure omega_d =
        PoissonStructure::create(ch, std::move(upper), Provenance::Dirac, opt);
    ZeroVerdict casimir = ZeroVerdict::proved();
    for (int a = 0; a < m; ++a)
        casimir = ZeroVerdict::merge(
            casimir, casimir_check(omega_d, ScalarField{ch, C.expr(a)}, opt));
    return DiracResult{std::move(omega_d), std::move(delta), std::move(delta_inv),
                       det, std::move(casimir), {}};
}

Mat dirac_tensor_at(const PoissonStructure& P, const ConstraintSet& C,
                    const std::map<std::string, double>& point) {
    const Chart& ch = P.chart();
    const int n = ch.dim();
    const int m = C.size();
    if (m % 2 != 0)
        fail(ErrorKind::Validation, "dirac_tensor_at needs an even number of constraints");

    Mat omega(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double v = evaluate(P.entry(i, j), point);
            omega(i, j) = v;
            omega(j, i) = -v;
        }
    // gradients of the constraints
    Mat grad(m, n);
    for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i)
            grad(a, i) = evaluate(differentiate(C.expr(a), ch.coordinates[i]), point);
    // G = omega grad^T, Delta = grad omega grad^T
    Mat G = omega * grad.transposed();
    Mat delta = grad * G;
    Mat delta_inv;
    try {
        delta_inv = inverse(delta, 1e-12);
    } catch (const Error&) {
        fail(ErrorKind::DegenerateDelta,
             "constraint matrix is numerically degenerate at the given point");
    }
    return omega + G * delta_inv * G.transposed();
}

ScalarField deformed_function(const PoissonStructure& P, const ConstraintSet& C,
                              const ScalarField& A, const ZeroTestOptions& opt) {
    const int m = C.size();
    ExprMatrix delta = delta_matrix(P, C);
    Expression det;
    ExprMatrix delta_inv = sym_inverse(delta, &det);
    if (is_zero(det, opt).zero())
        fail(ErrorKind::DegenerateDelta, "constraint matrix is degenerate");
    std::vector<Expression> terms = {A.expr};
    for (int a = 0; a < m; ++a) {
        Expression br = bracket_expr(P, A.expr, C.expr(a));
        if (br.is_literal_zero()) continue;
        for (int b = 0; b < m; ++b) {
            if (delta_inv[a][b].is_literal_zero()) continue;
            terms.push_back(-(br * delta_inv[a][b] * C.expr(b)));
        }
    }
    return ScalarField{P.chart(), normalize(Expression::sum(std::move(terms)))};
}

ZeroVerdict deformed_bracket_check(const PoissonStructure& P, const ConstraintSet& C,
                                   const ScalarField& A, const ScalarField& B,
                                   const ZeroTestOptions& opt) {
    DiracResult D = dirac_bracket(P, C, opt);
    ScalarField Ad = deformed_function(P, C, A, opt);
    ScalarField Bd = deformed_function(P, C, B, opt);
    Expression dirac_side = bracket(D.omega_d, A, B);
    Expression poisson_side = bracket(P, Ad, Bd);
    Expression diff = dirac_side - poisson_side;
    ZeroTestOptions surface_opt = opt;
    surface_opt.box = 1.0;
    return is_zero(C.restrict_to_surface(diff), surface_opt);
}

std::vector<Expression> multipliers(const PoissonStructure& P, const ScalarField& H0,
                                    const ConstraintSet& C, const ZeroTestOptions& opt) {
    if (C.size() % 2 != 0)
        fail(ErrorKind::Validation,
             "multipliers need an even second-class constraint set, got " +
                 std::to_string(C.size()));
    const int m = C.size();
    ExprMatrix delta = delta_matrix(P, C);
    Expression det;
    ExprMatrix delta_inv = sym_inverse(delta, &det);
    if (is_zero(det, opt).zero())
        fail(ErrorKind::DegenerateDelta, "constraint matrix is degenerate");

    std::vector<Expression> phiH(m);
    for (int a = 0; a < m; ++a) phiH[a] = bracket_expr(P, C.expr(a), H0.expr);

    std::vector<Expression> lambda(m);
    for (int b = 0; b < m; ++b) {
        std::vector<Expression> terms;
        for (int a = 0; a < m; ++a) {
            if (delta_inv[b][a].is_literal_zero() || phiH[a].is_literal_zero()) continue;
            terms.push_back(-(delta_inv[b][a] * phiH[a]));
        }
        lambda[b] = normalize(Expression::sum(std::move(terms)));
    }
    // defining relation: {Phi_a, H0} + Delta_{ab} lambda^b = 0
    for (int a = 0; a < m; ++a) {
        std::vector<Expression> terms = {phiH[a]};
        for (int b = 0; b < m; ++b) terms.push_back(delta[a][b] * lambda[b]);
        if (!is_zero(Expression::sum(std::move(terms)), opt).zero())
            fail(ErrorKind::Validation, "multiplier defining relation failed");
    }
    return lambda;
}

ScalarField total_hamiltonian(const PoissonStructure& P, const ScalarField& H,
                              const ConstraintSet& C, const ZeroTestOptions& opt) {
    const int m = C.size();
    ExprMatrix delta = delta_matrix(P, C);
    Expression det;
    ExprMatrix delta_inv = sym_inverse(delta, &det);
    if (is_zero(det, opt).zero())
        fail(ErrorKind::DegenerateDelta, "constraint matrix is degenerate");
    std::vector<Expression> terms = {H.expr};
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            if (delta_inv[a][b].is_literal_zero()) continue;
            Expression br = bracket_expr(P, C.expr(b), H.expr);
            if (br.is_literal_zero()) continue;
            terms.push_back(-(C.expr(a) * delta_inv[a][b] * br));
        }
    }
    return ScalarField{P.chart(), normalize(Expression::sum(std::move(terms)))};
}

} // namespace pgeom
