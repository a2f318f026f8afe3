#include "pgeom/commands.hpp"

#include "pgeom/error.hpp"
#include "pgeom/reduction.hpp"
#include "pgeom/symplectic.hpp"

#include <algorithm>
#include <cmath>

namespace pgeom {

namespace {

void add_jacobi_entries(Report& report, const PoissonStructure& P,
                        const ZeroTestOptions& opt) {
    JacobiReport jr = jacobi_residual(P, opt);
    report.add_verdict("jacobi-identity", "w^{ip} d_p w^{jk} + cycle(i,j,k) = 0",
                       jr.verdict);
    for (const auto& e : jr.entries) {
        if (e.verdict.zero()) continue;
        CheckEntry c;
        c.name = "jacobi-residual(" + std::to_string(e.i) + "," + std::to_string(e.j) +
                 "," + std::to_string(e.k) + ")";
        c.property = "residual component";
        c.pass = false;
        c.tier = e.verdict.tier();
        c.verdict = e.verdict;
        c.note = "residual = " + e.residual.str();
        report.add(std::move(c));
    }
}

void add_second_class_entry(Report& report, const PoissonStructure& P,
                            const ConstraintSet& C, const ZeroTestOptions& opt) {
    bool on_surface = C.has_parametrization();
    ZeroVerdict det = second_class_check(P, C, on_surface, opt);
    CheckEntry c;
    c.name = "second-class";
    c.property = on_surface ? "det {Phi,Phi} nonzero on the surface"
                            : "det {Phi,Phi} nonzero";
    c.pass = det.kind == ZeroVerdict::Kind::NonZero;
    c.tier = det.tier();
    c.verdict = det;
    c.note = c.pass ? "constraints are second class" : "determinant vanishes";
    report.add(std::move(c));
}

std::string mode_or(const ProblemFile& pf, const char* fallback) {
    return pf.integrator ? pf.integrator->mode : fallback;
}

} // namespace

CommandResult cmd_check(const ProblemFile& pf, const CommandOptions& opt) {
    CommandResult result;
    result.report.command = "check";
    result.report.seed = opt.zero.seed;
    PoissonStructure P = pf.build_structure(opt.zero);

    CheckEntry anti;
    anti.name = "antisymmetry";
    anti.property = "w^{ij} = -w^{ji}";
    anti.pass = true;
    anti.tier = "structural";
    anti.note = "upper-triangle storage";
    result.report.add(std::move(anti));

    add_jacobi_entries(result.report, P, opt.zero);

    for (size_t k = 0; k < pf.casimir_candidates.size(); ++k)
        result.report.add_verdict(
            "casimir K" + std::to_string(k + 1), "{z^i, K} = 0 for all i",
            casimir_check(P, ScalarField{pf.chart, pf.casimir_candidates[k]}, opt.zero));

    if (!pf.first_integrals.empty()) {
        ScalarField H = pf.require_hamiltonian();
        for (size_t q = 0; q < pf.first_integrals.size(); ++q)
            result.report.add_verdict(
                "first-integral Q" + std::to_string(q + 1), "{Q, H} = 0",
                is_zero(bracket_expr(P, pf.first_integrals[q], H.expr), opt.zero));
    }
    return result;
}

CommandResult cmd_consistency(const ProblemFile& pf, const CommandOptions& opt) {
    CommandResult result;
    result.report.command = "consistency";
    result.report.seed = opt.zero.seed;
    PoissonStructure P = pf.build_structure(opt.zero);
    auto C = pf.build_constraints(opt.zero);
    if (!C) fail(ErrorKind::Validation, "consistency requires constraints");
    ScalarField H = pf.require_hamiltonian();

    int max_steps = opt.max_steps > 0 ? opt.max_steps : 2 * pf.chart.dim();
    ChainResult chain = consistency_chain(P, H, *C, max_steps, opt.zero);

    CheckEntry outcome;
    outcome.name = "chain-outcome";
    outcome.property = "iterate {Phi, H} to closure";
    outcome.tier = "numeric";
    switch (chain.outcome) {
        case ChainResult::Outcome::Terminated:
            outcome.pass = true;
            outcome.note = "terminated after " + std::to_string(chain.steps) +
                           " step(s) with " +
                           std::to_string(chain.final_set->size()) + " constraint(s)";
            break;
        case ChainResult::Outcome::Contradiction:
            outcome.pass = true;
            outcome.note = "contradiction: " + chain.witness.str() +
                           " must vanish but is nonzero on the surface";
            break;
        case ChainResult::Outcome::StepLimit:
            outcome.pass = false;
            outcome.note = "step limit reached";
            break;
    }
    result.report.add(std::move(outcome));
    for (const auto& line : chain.log) {
        CheckEntry e;
        e.name = "chain-log";
        e.property = line;
        e.pass = true;
        e.tier = "numeric";
        result.report.add(std::move(e));
    }

    if (chain.outcome == ChainResult::Outcome::Terminated) {
        add_second_class_entry(result.report, P, *chain.final_set, opt.zero);
        ProblemFile updated = pf;
        updated.constraints = chain.final_set->constraints();
        if (!chain.final_set->has_parametrization()) updated.parametrization.reset();
        result.emitted = updated.to_json();
    }
    return result;
}

CommandResult cmd_dirac(const ProblemFile& pf, const CommandOptions& opt) {
    CommandResult result;
    result.report.command = "dirac";
    result.report.seed = opt.zero.seed;
    PoissonStructure P = pf.build_structure(opt.zero);
    auto C = pf.build_constraints(opt.zero);
    if (!C) fail(ErrorKind::Validation, "dirac requires constraints");

    add_second_class_entry(result.report, P, *C, opt.zero);
    DiracResult D = dirac_bracket(P, *C, opt.zero);
    if (pf.hamiltonian)
        D.lambda = multipliers(P, pf.require_hamiltonian(), *C, opt.zero);
    result.report.add_verdict("casimir-property", "{z^i, Phi^a}_D = 0 for all i, a",
                              D.casimir_property);
    result.report.add_verdict("jacobi-identity", "Dirac tensor satisfies Jacobi",
                              D.omega_d.jacobi_verdict());
    for (size_t a = 0; a < D.lambda.size(); ++a) {
        CheckEntry e;
        e.name = "lambda" + std::to_string(a + 1);
        e.property = "multiplier solving {Phi, H} + Delta lambda = 0";
        e.pass = true;
        e.tier = "exact";
        e.note = D.lambda[a].str();
        result.report.add(std::move(e));
    }

    ProblemFile out;
    out.chart = pf.chart;
    out.parameter_values = pf.parameter_values;
    out.structure_type = "explicit";
    const int n = pf.chart.dim();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Expression e = D.omega_d.entry(i, j);
            if (!e.is_literal_zero()) out.explicit_entries.emplace(std::make_pair(i + 1, j + 1), e);
        }
    out.hamiltonian = pf.hamiltonian;
    for (const auto& c : pf.constraints) out.casimir_candidates.push_back(c.expr);
    out.parametrization = pf.parametrization;
    if (pf.integrator) {
        out.integrator = pf.integrator;
        out.integrator->mode = "poisson"; // the emitted tensor is the Dirac one
    }
    result.emitted = out.to_json();
    return result;
}

CommandResult cmd_reduce(const ProblemFile& pf, const CommandOptions& opt) {
    CommandResult result;
    result.report.command = "reduce";
    result.report.seed = opt.zero.seed;
    PoissonStructure P = pf.build_structure(opt.zero);
    auto C = pf.build_constraints(opt.zero);
    if (!C) fail(ErrorKind::Validation, "reduce requires constraints");
    if (!C->has_parametrization())
        fail(ErrorKind::Validation, "reduce requires a parametrization");

    std::string route = opt.route;
    if (route == "auto") {
        bool all_casimir = true;
        for (int a = 0; a < C->size() && all_casimir; ++a)
            all_casimir =
                casimir_check(P, ScalarField{pf.chart, C->expr(a)}, opt.zero).zero();
        route = all_casimir ? "casimir" : "dirac";
    }

    SubmanifoldStructure S = [&] {
        if (route == "casimir") return induced_bracket(P, *C, opt.zero);
        if (route == "dirac") {
            DiracResult D = dirac_bracket(P, *C, opt.zero);
            result.report.add_verdict("casimir-property",
                                      "{z^i, Phi^a}_D = 0 for all i, a",
                                      D.casimir_property);
            return induced_bracket(D.omega_d, *C, opt.zero);
        }
        fail(ErrorKind::Validation, "unknown reduce route '" + route + "'");
    }();

    CheckEntry routec;
    routec.name = "route";
    routec.property = "reduction path";
    routec.pass = true;
    routec.tier = "structural";
    routec.note = route;
    result.report.add(std::move(routec));
    result.report.add_verdict("jacobi-identity", "induced tensor satisfies Jacobi",
                              S.induced.jacobi_verdict());

    // when the base is nondegenerate and the set is second class, both diagram
    // paths exist and must agree
    bool closure_possible = route == "dirac" || C->size() % 2 == 0;
    if (closure_possible) {
        try {
            DiagramClosureReport closure = diagram_closure_check(P, *C, opt.zero);
            CheckEntry e;
            e.name = "diagram-closure";
            e.property = "restrict-then-invert agrees with dirac-then-restrict";
            e.pass = closure.pass;
            e.tier = "numeric";
            e.value = closure.max_deviation;
            e.note = "over " + std::to_string(closure.points) + " surface points";
            result.report.add(std::move(e));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateStructure &&
                e.kind() != ErrorKind::DegenerateDelta &&
                e.kind() != ErrorKind::DimensionTooLarge)
                throw;
            CheckEntry skip;
            skip.name = "diagram-closure";
            skip.property = "restrict-then-invert agrees with dirac-then-restrict";
            skip.pass = true;
            skip.tier = "structural";
            skip.note = std::string("not applicable: ") + e.what();
            result.report.add(std::move(skip));
        }
    }

    ProblemFile out;
    out.chart = S.sub_chart;
    out.parameter_values = pf.parameter_values;
    out.structure_type = "explicit";
    const int k = S.sub_chart.dim();
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
            Expression e = S.induced.entry(a, b);
            if (!e.is_literal_zero())
                out.explicit_entries.emplace(std::make_pair(a + 1, b + 1), e);
        }
    if (pf.hamiltonian)
        out.hamiltonian = C->restrict_to_surface(*pf.hamiltonian);
    if (pf.integrator) {
        out.integrator = pf.integrator;
        out.integrator->mode = "poisson";
        std::vector<double> z0;
        for (const auto& coord : S.sub_chart.coordinates)
            z0.push_back(pf.integrator->z0[pf.chart.coord_index(coord)]);
        out.integrator->z0 = std::move(z0);
    }
    result.emitted = out.to_json();
    return result;
}

CommandResult cmd_prescribe(const ProblemFile& pf, const CommandOptions& opt) {
    CommandResult result;
    result.report.command = "prescribe";
    result.report.seed = opt.zero.seed;
    if (pf.structure_type != "prescribed")
        fail(ErrorKind::Validation, "prescribe requires a prescribed structure block");

    PoissonStructure base = pf.build_prescribed_base(opt.zero);
    PrescribeResult r = prescribe_casimirs(pf.chart, pf.prescribed_casimirs,
                                           pf.prescribed_solved, base, opt.zero);
    result.report.add_verdict("casimir-property", "every K commutes with all coordinates",
                              r.casimir);
    result.report.add_verdict("jacobi-identity", "prescribed tensor satisfies Jacobi",
                              r.structure.jacobi_verdict());
    result.report.add_verdict("block-identity",
                              "tensor blocks match the partitioned closed form",
                              r.block_identity);

    // dimension-3, single-Casimir closed form: w^{ij} = eps^{ijk} d_k K / det a
    if (pf.chart.dim() == 3 && pf.prescribed_casimirs.size() == 1 &&
        pf.prescribed_solved[0] == pf.chart.coordinates[0] &&
        base.entry(0, 1).is_literal_one()) {
        const Expression& K = pf.prescribed_casimirs[0];
        Expression d1 = differentiate(K, pf.chart.coordinates[0]);
        Expression d2 = differentiate(K, pf.chart.coordinates[1]);
        Expression d3 = differentiate(K, pf.chart.coordinates[2]);
        auto matches = [&](int i, int j, const Expression& want) {
            Expression expect = normalize(want);
            CheckEntry e;
            e.name = "closed-form(" + std::to_string(i + 1) + "," +
                     std::to_string(j + 1) + ")";
            e.property = "entry equals eps^{ijk} d_k K / det a";
            e.pass = r.structure.entry(i, j).str() == expect.str();
            e.tier = "exact";
            e.note = "expected " + expect.str();
            result.report.add(std::move(e));
        };
        matches(0, 1, Expression::quotient(d3, d1));
        matches(0, 2, normalize(-Expression::quotient(d2, d1)));
        matches(1, 2, Expression::quotient(d1, d1));
    }

    ProblemFile out;
    out.chart = pf.chart;
    out.parameter_values = pf.parameter_values;
    out.structure_type = "explicit";
    const int n = pf.chart.dim();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Expression e = r.structure.entry(i, j);
            if (!e.is_literal_zero())
                out.explicit_entries.emplace(std::make_pair(i + 1, j + 1), e);
        }
    out.hamiltonian = pf.hamiltonian;
    out.casimir_candidates = pf.prescribed_casimirs;
    out.parametrization = pf.parametrization;
    out.integrator = pf.integrator;
    result.emitted = out.to_json();
    return result;
}

CommandResult cmd_integrate(const ProblemFile& pf, const CommandOptions& opt) {
    CommandResult result;
    result.report.command = "integrate";
    result.report.seed = opt.zero.seed;
    if (!pf.integrator) fail(ErrorKind::Validation, "integrate requires an integrator block");
    const auto& integ = *pf.integrator;
    PoissonStructure P = pf.build_structure(opt.zero);
    ScalarField H = pf.require_hamiltonian();

    std::vector<Monitor> monitors = {Monitor{"H", H.expr}};
    for (size_t k = 0; k < pf.casimir_candidates.size(); ++k)
        monitors.push_back(Monitor{"K" + std::to_string(k + 1), pf.casimir_candidates[k]});
    for (size_t q = 0; q < pf.first_integrals.size(); ++q)
        monitors.push_back(Monitor{"Q" + std::to_string(q + 1), pf.first_integrals[q]});
    for (size_t a = 0; a < pf.constraints.size(); ++a)
        monitors.push_back(
            Monitor{"Phi" + std::to_string(a + 1), pf.constraints[a].expr});

    const std::string mode = mode_or(pf, "poisson");
    Trajectory t;
    if (mode == "poisson") {
        t = integrate(P, H, integ.z0, pf.parameter_values, integ.tau_end, integ.h,
                      monitors);
    } else if (mode == "dirac" || mode == "multiplier") {
        auto C = pf.build_constraints(opt.zero);
        if (!C) fail(ErrorKind::Validation, mode + " mode requires constraints");
        // constraint monitors come back from the integrator itself
        std::vector<Monitor> base;
        for (const auto& m : monitors)
            if (m.name.rfind("Phi", 0) != 0) base.push_back(m);
        t = mode == "dirac"
                ? integrate_dirac(P, H, *C, integ.z0, pf.parameter_values,
                                  integ.tau_end, integ.h, base)
                : integrate_multiplier(P, H, *C, integ.z0, pf.parameter_values,
                                       integ.tau_end, integ.h, base);
    } else if (mode == "series") {
        SeriesResult s = series_solution(P, H, integ.z0, pf.parameter_values,
                                         integ.tau_end, integ.order);
        t = integrate(P, H, integ.z0, pf.parameter_values, integ.tau_end, integ.h,
                      monitors);
        double gap = 0.0;
        for (size_t i = 0; i < s.point.size(); ++i)
            gap = std::max(gap, std::abs(s.point[i] - t.final_state()[i]));
        for (size_t i = 0; i < s.point.size(); ++i) {
            CheckEntry e;
            e.name = "series-" + pf.chart.coordinates[i];
            e.property = "order-" + std::to_string(integ.order) + " series value";
            e.pass = true;
            e.tier = "numeric";
            e.value = s.point[i];
            result.report.add(std::move(e));
        }
        CheckEntry g;
        g.name = "series-gap";
        g.property = "max |series - rk4 reference|";
        g.pass = true;
        g.tier = "numeric";
        g.value = gap;
        if (s.transcendental) g.note = "transcendental atoms present";
        result.report.add(std::move(g));
    } else {
        fail(ErrorKind::Validation, "unknown integrator mode '" + mode + "'");
    }

    for (const auto& name : t.monitor_names) {
        CheckEntry e;
        e.name = "drift-" + name;
        e.property = name.rfind("Phi", 0) == 0 || name.rfind("lambda", 0) == 0
                         ? "max |value| along the line"
                         : "max |value - initial| along the line";
        e.pass = true;
        e.tier = "numeric";
        e.value = name.rfind("Phi", 0) == 0 || name.rfind("lambda", 0) == 0
                      ? t.max_abs(name)
                      : t.max_drift(name);
        result.report.add(std::move(e));
    }
    result.trajectory = std::move(t);
    return result;
}

} // namespace pgeom
