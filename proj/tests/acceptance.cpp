// Acceptance suite: every criterion the toolkit must meet, at its stated
// tolerance, one pass/fail line per criterion. Returns nonzero if any fails.
#include "pgeom/commands.hpp"
#include "pgeom/dynamics.hpp"
#include "pgeom/error.hpp"
#include "pgeom/reduction.hpp"
#include "pgeom/symplectic.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace pgeom;

namespace {

int failures = 0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}


void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s %2d. %s%s%s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++failures;
}

Expression on(const Chart& ch, const std::string& text) {
    return parse(text, ch.symbols());
}

std::string corpus(const std::string& name) {
    return std::string(PGEOM_CORPUS_DIR) + "/" + name;
}

ConstraintSet plane_pair(const PoissonStructure& P) {
    const Chart& ch = P.chart();
    Parametrization param;
    param.solved = {{"q1", on(ch, "0")}, {"p1", on(ch, "0")}};
    return ConstraintSet::create(
        ch, {Constraint{on(ch, "q1")}, Constraint{on(ch, "p1")}}, param);
}

ConstraintSet sphere_pair(const PoissonStructure& P) {
    const Chart& ch = P.chart();
    Parametrization param;
    param.solved = {
        {"q3", on(ch, "sqrt(1 - q1^2 - q2^2)")},
        {"p3", on(ch, "-(q1*p1 + q2*p2)/sqrt(1 - q1^2 - q2^2)")},
    };
    return ConstraintSet::create(
        ch,
        {Constraint{on(ch, "q1^2 + q2^2 + q3^2 - 1")},
         Constraint{on(ch, "q1*p1 + q2*p2 + q3*p3")}},
        param);
}

// ---------------------------------------------------------------------------

void criterion_1_jacobi_suite() {
    bool pass = true;
    std::string detail;
    pass &= jacobi_residual(canonical(2)).verdict.exact();
    pass &= jacobi_residual(lie_poisson(so3_constants())).verdict.exact();

    Chart ch("m3", {"z1", "z2", "z3"});
    PoissonStructure broken = PoissonStructure::create(
        ch, {on(ch, "1"), on(ch, "z1"), on(ch, "0")}, Provenance::Explicit);
    JacobiReport rep = jacobi_residual(broken);
    bool witness = rep.verdict.kind == ZeroVerdict::Kind::NonZero &&
                   rep.entries.size() == 1 && rep.entries[0].residual.is_literal_one();
    pass &= witness;
    detail = witness ? "counterexample residual J^{123} = 1" : "missing witness";
    report(1, "jacobi-suite", pass, detail);
}

void criterion_2_covariance() {
    ZeroTestOptions opt;
    opt.samples = 50;
    bool pass = true;
    double worst = 0.0;

    // canonical R^2 under the nonlinear shear (q, p) -> (q, p + q^2)
    PoissonStructure P = canonical(1);
    Chart sheared("sheared", {"Q1", "P1"});
    CoordinateMap m1 = CoordinateMap::create(
        P.chart(), sheared, {on(P.chart(), "q1"), on(P.chart(), "p1 + q1^2")},
        {parse("Q1", sheared.symbols()), parse("P1 - Q1^2", sheared.symbols())});
    PoissonStructure P1 = change_coordinates(P, m1, opt);
    pass &= P1.jacobi_verdict().zero();

    // so(3) under the triangular polynomial map
    PoissonStructure so3 = lie_poisson(so3_constants());
    Chart tri("tri", {"w1", "w2", "w3"});
    CoordinateMap m2 = CoordinateMap::create(
        so3.chart(), tri,
        {on(so3.chart(), "z1"), on(so3.chart(), "z2 + z1^2"),
         on(so3.chart(), "z3 + z1*z2")},
        {parse("w1", tri.symbols()), parse("w2 - w1^2", tri.symbols()),
         parse("w3 - w1*(w2 - w1^2)", tri.symbols())});
    PoissonStructure P2 = change_coordinates(so3, m2, opt);
    pass &= P2.jacobi_verdict().zero();

    // sample the residuals explicitly at 50 seeded points
    for (const PoissonStructure* S : {&P1, &P2}) {
        JacobiReport rep = jacobi_residual(*S, opt);
        Sampler rng(opt.seed);
        for (const auto& entry : rep.entries) {
            for (int s = 0; s < 50; ++s) {
                std::map<std::string, double> pt;
                for (const auto& c : S->chart().coordinates)
                    pt[c] = rng.uniform(-2, 2);
                auto v = try_evaluate(entry.residual, pt, 1e-8);
                if (v) worst = std::max(worst, std::abs(*v));
            }
        }
    }
    pass &= worst <= 1e-9;
    report(2, "covariance-of-jacobi", pass,
           "max residual sample " + fmt(worst));
}

void criterion_3_dirac_exactness() {
    bool pass = true;
    PoissonStructure P4 = canonical(2);
    DiracResult D4 = dirac_bracket(P4, plane_pair(P4));
    const Chart& c4 = P4.chart();
    int q1 = c4.coord_index("q1"), q2 = c4.coord_index("q2");
    int p1 = c4.coord_index("p1"), p2 = c4.coord_index("p2");
    pass &= D4.omega_d.entry(q2, p2).is_literal_one();
    for (int j = 0; j < 4; ++j) {
        pass &= D4.omega_d.entry(q1, j).is_literal_zero();
        pass &= D4.omega_d.entry(p1, j).is_literal_zero();
    }

    PoissonStructure P6 = canonical(3);
    DiracResult D6 = dirac_bracket(P6, sphere_pair(P6));
    const Chart& c6 = P6.chart();
    for (int i = 0; i < 3 && pass; ++i)
        for (int j = 0; j < 3 && pass; ++j) {
            Expression expect = on(
                c6, std::string(i == j ? "1" : "0") + " - q" + std::to_string(i + 1) +
                        "*q" + std::to_string(j + 1) + "/(q1^2+q2^2+q3^2)");
            Expression got =
                D6.omega_d.entry(c6.coord_index("q" + std::to_string(i + 1)),
                                 c6.coord_index("p" + std::to_string(j + 1)));
            pass &= is_zero(got - expect).exact();
        }
    report(3, "dirac-bracket-exactness", pass,
           "plane pair and sphere projector both exact");
}

void criterion_4_casimir_property() {
    bool pass = true;
    PoissonStructure P4 = canonical(2);
    pass &= dirac_bracket(P4, plane_pair(P4)).casimir_property.exact();
    PoissonStructure P6 = canonical(3);
    pass &= dirac_bracket(P6, sphere_pair(P6)).casimir_property.exact();

    PoissonStructure so3 = lie_poisson(so3_constants());
    Parametrization param;
    param.solved = {{"z1", on(so3.chart(), "0")}, {"z2", on(so3.chart(), "0")}};
    ConstraintSet C = ConstraintSet::create(
        so3.chart(), {Constraint{on(so3.chart(), "z1")}, Constraint{on(so3.chart(), "z2")}},
        param);
    pass &= dirac_bracket(so3, C).casimir_property.exact();
    report(4, "dirac-casimir-property", pass, "exact for every corpus system");
}

void criterion_5_degenerate_base_jacobi() {
    PoissonStructure so3 = lie_poisson(so3_constants());
    Parametrization param;
    param.solved = {{"z1", on(so3.chart(), "0")}, {"z2", on(so3.chart(), "0")}};
    ConstraintSet C = ConstraintSet::create(
        so3.chart(), {Constraint{on(so3.chart(), "z1")}, Constraint{on(so3.chart(), "z2")}},
        param);
    ZeroTestOptions opt;
    opt.samples = 100;
    DiracResult D = dirac_bracket(so3, C, opt);
    JacobiReport rep = jacobi_residual(D.omega_d, opt);
    bool pass = rep.verdict.zero();
    if (rep.verdict.kind == ZeroVerdict::Kind::NumericZero)
        pass &= rep.verdict.max_abs <= 1e-9;
    report(5, "dirac-jacobi-degenerate-base", pass,
           std::string("verdict ") + rep.verdict.kind_name());
}

void criterion_6_diagram_closure() {
    PoissonStructure P4 = canonical(2);
    DiagramClosureReport flat = diagram_closure_check(P4, plane_pair(P4));
    PoissonStructure P6 = canonical(3);
    DiagramClosureReport round = diagram_closure_check(P6, sphere_pair(P6));
    bool pass = flat.pass && flat.points == 25 && flat.max_deviation <= 1e-8 &&
                round.pass && round.points == 25 && round.max_deviation <= 1e-8;
    report(6, "diagram-closure", pass,
           "max deviations " + fmt(flat.max_deviation) + ", " +
               fmt(round.max_deviation));
}

void criterion_7_consistency_chain() {
    PoissonStructure P = canonical(1);
    const Chart& ch = P.chart();
    Parametrization pq;
    pq.solved = {{"q1", on(ch, "0")}};
    ConstraintSet Cq = ConstraintSet::create(ch, {Constraint{on(ch, "q1")}}, pq);
    ChainResult grow =
        consistency_chain(P, ScalarField{ch, on(ch, "p1^2/2")}, Cq, 10);
    bool pass = grow.outcome == ChainResult::Outcome::Terminated &&
                grow.final_set->size() == 2 &&
                grow.final_set->expr(1).same(on(ch, "p1")) &&
                second_class_check(P, *grow.final_set, false).kind ==
                    ZeroVerdict::Kind::NonZero;

    Parametrization pp;
    pp.solved = {{"p1", on(ch, "0")}};
    ConstraintSet Cp = ConstraintSet::create(ch, {Constraint{on(ch, "p1")}}, pp);
    ChainResult contra = consistency_chain(P, ScalarField{ch, on(ch, "q1")}, Cp, 10);
    pass &= contra.outcome == ChainResult::Outcome::Contradiction &&
            is_zero(contra.witness + Expression::integer(1)).exact();
    report(7, "consistency-chain", pass,
           "secondary then closure; contradiction detected");
}

void criterion_8_multiplier_equivalence() {
    PoissonStructure P = canonical(3);
    ConstraintSet C = sphere_pair(P);
    ScalarField H{P.chart(), on(P.chart(), "(p1^2 + p2^2 + p3^2)/2")};
    std::vector<double> z0 = {1, 0, 0, 0, 1, 0};

    Trajectory td = integrate_dirac(P, H, C, z0, {}, 10.0, 1e-3, {});
    Trajectory tm = integrate_multiplier(P, H, C, z0, {}, 10.0, 1e-3, {});
    double gap = 0.0;
    for (size_t k = 0; k < td.states.size(); ++k)
        for (int i = 0; i < 6; ++i)
            gap = std::max(gap, std::abs(td.states[k][i] - tm.states[k][i]));

    // defining relation {Phi_a, H0} + Delta_{ab} lambda^b = 0 along the path
    ExprMatrix delta = delta_matrix(P, C);
    std::vector<Expression> lambda = multipliers(P, H, C);
    std::vector<Expression> phiH = {bracket_expr(P, C.expr(0), H.expr),
                                    bracket_expr(P, C.expr(1), H.expr)};
    double residual = 0.0;
    for (size_t k = 0; k < tm.states.size(); k += 100) {
        std::map<std::string, double> pt;
        for (int i = 0; i < 6; ++i) pt[P.chart().coordinates[i]] = tm.states[k][i];
        for (int a = 0; a < 2; ++a) {
            double r = evaluate(phiH[a], pt);
            for (int b = 0; b < 2; ++b)
                r += evaluate(delta[a][b], pt) * evaluate(lambda[b], pt);
            residual = std::max(residual, std::abs(r));
        }
    }
    bool pass = gap <= 1e-6 && residual <= 1e-8;
    report(8, "multiplier-equivalence", pass,
           "trajectory gap " + fmt(gap) + ", relation residual " +
               fmt(residual));
}

void criterion_9_constraint_tangency() {
    PoissonStructure P = canonical(3);
    ConstraintSet C = sphere_pair(P);
    ScalarField H{P.chart(), on(P.chart(), "(p1^2 + p2^2 + p3^2)/2")};
    std::vector<double> z0 = {1, 0, 0, 0, 10, 0};

    Trajectory full = integrate_dirac(P, H, C, z0, {}, 10.0, 1e-3, {});
    double drift_full =
        std::max(full.max_abs("Phi1"), full.max_abs("Phi2"));
    Trajectory half = integrate_dirac(P, H, C, z0, {}, 10.0, 5e-4, {});
    double drift_half = std::max(half.max_abs("Phi1"), half.max_abs("Phi2"));

    bool pass = full.max_abs("Phi1") <= 1e-7 && full.max_abs("Phi2") <= 1e-7 &&
                drift_full / drift_half >= 10.0;
    report(9, "constraint-tangency", pass,
           "drift " + fmt(drift_full) + ", halving ratio " +
               fmt(drift_full / drift_half));
}

void criterion_10_precession() {
    ProblemFile pf = ProblemFile::load(corpus("so3_precession.json"));
    PoissonStructure so3 = pf.build_structure();
    ScalarField H = pf.require_hamiltonian();
    Trajectory t = integrate(so3, H, pf.integrator->z0, pf.parameter_values,
                             pf.integrator->tau_end, pf.integrator->h,
                             {Monitor{"K", on(so3.chart(), "z1^2 + z2^2 + z3^2")}});
    double worst = 0.0;
    for (size_t k = 0; k < t.states.size(); ++k) {
        double tau = t.times[k];
        worst = std::max(worst, std::abs(t.states[k][0] - std::cos(tau)));
        worst = std::max(worst, std::abs(t.states[k][1] - std::sin(tau)));
        worst = std::max(worst, std::abs(t.states[k][2]));
    }
    bool pass = worst <= 1e-6 && t.max_drift("K") <= 1e-8;
    report(10, "precession", pass,
           "max deviation " + fmt(worst) + ", Casimir drift " +
               fmt(t.max_drift("K")));
}

void criterion_11_series() {
    PoissonStructure P = canonical(1);
    ScalarField H{P.chart(), on(P.chart(), "(q1^2 + p1^2)/2")};
    std::vector<double> z0 = {1.0, 0.0};

    SeriesResult s8 = series_solution(P, H, z0, {}, 0.1, 8);
    Trajectory ref8 = integrate(P, H, z0, {}, 0.1, 1e-3);
    double gap8 = std::max(std::abs(s8.point[0] - ref8.final_state()[0]),
                           std::abs(s8.point[1] - ref8.final_state()[1]));
    bool pass = gap8 <= 1e-10;

    std::string slopes;
    for (int order : {2, 4, 6}) {
        const double taus[3] = {0.05, 0.1, 0.2};
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (double tau : taus) {
            SeriesResult s = series_solution(P, H, z0, {}, tau, order);
            Trajectory ref = integrate(P, H, z0, {}, tau, 1e-4);
            double err = 0.0;
            for (int i = 0; i < 2; ++i)
                err = std::max(err, std::abs(s.point[i] - ref.final_state()[i]));
            double x = std::log(tau), y = std::log(err);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
        pass &= std::abs(slope - (order + 1)) <= 0.3;
        slopes += (slopes.empty() ? "" : ", ") + fmt(slope);
    }
    report(11, "series-solution", pass,
           "order-8 gap " + fmt(gap8) + "; slopes " + slopes);
}

void criterion_12_prescribed_casimirs() {
    // generic single Casimir on a 3-manifold
    Chart ch("m3", {"z1", "z2", "z3"});
    Chart kept("kept", {"z2", "z3"});
    PoissonStructure base =
        PoissonStructure::create(kept, {Expression::integer(1)}, Provenance::Explicit);
    Expression K = on(ch, "z1 + z2^2");
    PrescribeResult r = prescribe_casimirs(ch, {K}, {"z1"}, base);
    Expression d1 = differentiate(K, "z1"), d2 = differentiate(K, "z2"),
               d3 = differentiate(K, "z3");
    bool pass =
        is_zero(r.structure.entry(0, 1) - Expression::quotient(d3, d1)).exact() &&
        is_zero(r.structure.entry(0, 2) + Expression::quotient(d2, d1)).exact() &&
        is_zero(r.structure.entry(1, 2) - Expression::quotient(d1, d1)).exact() &&
        r.casimir.exact();

    // restriction to K = 0 yields the canonical pair
    Parametrization param;
    param.solved = {{"z1", on(ch, "-z2^2")}};
    ConstraintSet KS = ConstraintSet::create(ch, {Constraint{K}}, param);
    SubmanifoldStructure S = induced_bracket(r.structure, KS);
    pass &= S.induced.entry(0, 1).is_literal_one();

    // quadratic Casimir reproduces the rescaled Lie-Poisson form
    Expression K2 = on(ch, "(z1^2 + z2^2 + z3^2)/2 - 1");
    PrescribeResult r2 = prescribe_casimirs(ch, {K2}, {"z1"}, base);
    pass &= is_zero(r2.structure.entry(0, 1) - on(ch, "z3/z1")).exact() &&
            is_zero(r2.structure.entry(0, 2) + on(ch, "z2/z1")).exact() &&
            r2.structure.entry(1, 2).is_literal_one() && r2.casimir.exact();
    report(12, "prescribed-casimirs", pass,
           "closed form, restriction, and quadratic Casimir all exact");
}

void criterion_13_reduced_flow() {
    PoissonStructure so3 = lie_poisson(so3_constants());
    const Chart& ch = so3.chart();
    ScalarField H{ch, on(ch, "z3")}; // z . B with B = (0, 0, 1)
    Parametrization param;
    param.solved = {{"z3", on(ch, "sqrt(1 - z1^2 - z2^2)")}};
    ConstraintSet K = ConstraintSet::create(
        ch, {Constraint{on(ch, "z1^2 + z2^2 + z3^2 - 1")}}, param);
    SubmanifoldStructure S = induced_bracket(so3, K);

    std::vector<double> z0 = {0.6, 0.0, 0.8};
    Trajectory ambient = integrate(so3, H, z0, {}, 5.0, 1e-3);
    ScalarField Hred{S.sub_chart, S.restrict_expr(H.expr)};
    Trajectory reduced = integrate(S.induced, Hred, {0.6, 0.0}, {}, 5.0, 1e-3);
    double gap = 0.0;
    for (size_t k = 0; k < ambient.states.size(); ++k) {
        gap = std::max(gap, std::abs(ambient.states[k][0] - reduced.states[k][0]));
        gap = std::max(gap, std::abs(ambient.states[k][1] - reduced.states[k][1]));
    }
    report(13, "reduced-flow-equivalence", gap <= 1e-6,
           "max component gap " + fmt(gap));
}

void criterion_14_flow_commutativity() {
    PoissonStructure P = canonical(2);
    const Chart& ch = P.chart();
    VectorField Xq1 = hamiltonian_field(P, ScalarField{ch, on(ch, "q1")});
    VectorField Xq2 = hamiltonian_field(P, ScalarField{ch, on(ch, "q2")});
    CommutativityResult commuting =
        commutativity_check(Xq1, Xq2, 0.8, 0.6, {0.1, -0.2, 0.3, 0.4}, {}, 1e-3);
    bool pass = commuting.flow_gap <= 1e-8;

    Chart plane("plane", {"z1", "z2"});
    VectorField V{plane, {on(plane, "1"), on(plane, "0")}};
    VectorField U{plane, {on(plane, "0"), on(plane, "z1")}};
    double sxx = 0, sxy = 0, bracket_norm = 0;
    for (double tau : {0.2, 0.4, 0.6}) {
        for (double lam : {0.1, 0.3}) {
            CommutativityResult r =
                commutativity_check(V, U, tau, lam, {0.0, 0.0}, {}, 1e-3);
            bracket_norm = r.bracket_norm;
            double x = tau * lam;
            sxx += x * x;
            sxy += x * r.flow_gap;
        }
    }
    double slope = sxy / sxx; // least squares through the origin
    pass &= std::abs(slope - bracket_norm) <= 0.2 * bracket_norm;
    report(14, "flow-commutativity", pass,
           "commuting gap " + fmt(commuting.flow_gap) + ", slope " +
               fmt(slope) + " vs |[V,U]| = " +
               fmt(bracket_norm));
}

void criterion_15_poincare_roundtrip() {
    bool pass = true;
    std::vector<SymplecticForm> forms;
    forms.push_back(invert(canonical(1)));
    forms.push_back(invert(canonical(2)));
    {
        Chart ch("plane", {"z1", "z2"});
        forms.push_back(SymplecticForm::create(ch, {on(ch, "1 + z1^2")}));
    }
    {
        Chart c4("four", {"z1", "z2", "z3", "z4"});
        std::vector<Expression> a = {on(c4, "0"), on(c4, "z1*z3"), on(c4, "0"),
                                     on(c4, "z4*z1^2")};
        std::vector<Expression> upper;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                upper.push_back(normalize(differentiate(a[j], c4.coordinates[i]) -
                                          differentiate(a[i], c4.coordinates[j])));
        forms.push_back(SymplecticForm::create(c4, upper));
    }
    for (const auto& F : forms) {
        VectorField a = potential(F); // throws if the curl check fails
        const Chart& ch = F.chart();
        for (int i = 0; i < ch.dim() && pass; ++i)
            for (int j = i + 1; j < ch.dim() && pass; ++j) {
                Expression curl = differentiate(a.components[j], ch.coordinates[i]) -
                                  differentiate(a.components[i], ch.coordinates[j]);
                pass &= normalize(curl - F.entry(i, j)).is_literal_zero();
            }
    }
    report(15, "poincare-roundtrip", pass,
           std::to_string(forms.size()) + " polynomial forms reconstructed exactly");
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion_1_jacobi_suite();
    criterion_2_covariance();
    criterion_3_dirac_exactness();
    criterion_4_casimir_property();
    criterion_5_degenerate_base_jacobi();
    criterion_6_diagram_closure();
    criterion_7_consistency_chain();
    criterion_8_multiplier_equivalence();
    criterion_9_constraint_tangency();
    criterion_10_precession();
    criterion_11_series();
    criterion_12_prescribed_casimirs();
    criterion_13_reduced_flow();
    criterion_14_flow_commutativity();
    criterion_15_poincare_roundtrip();
    std::printf("%d of 15 criteria passed\n", 15 - failures);
    return failures == 0 ? 0 : 1;
}
