#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pgeom/error.hpp"
#include "pgeom/reduction.hpp"

#include <cmath>

using namespace pgeom;

namespace {

Expression on(const Chart& ch, const std::string& text) {
    return parse(text, ch.symbols());
}

ConstraintSet so3_casimir_sphere(const PoissonStructure& so3) {
    const Chart& ch = so3.chart();
    Parametrization param;
    param.solved = {{"z3", on(ch, "sqrt(1 - z1^2 - z2^2)")}};
    return ConstraintSet::create(
        ch, {Constraint{on(ch, "z1^2 + z2^2 + z3^2 - 1")}}, param);
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

} // namespace

TEST_CASE("restrict_function") {
    PoissonStructure so3 = lie_poisson(so3_constants());
    ConstraintSet K = so3_casimir_sphere(so3);
    const Chart& ch = so3.chart();

    // independent of the solved coordinate: unchanged
    ScalarField A{ch, on(ch, "z1*z2")};
    CHECK(restrict_function(A, K).expr.same(normalize(on(ch, "z1*z2"))));

    // the Casimir itself restricts to zero (numerically, through the sqrt atom)
    ScalarField C{ch, on(ch, "z1^2 + z2^2 + z3^2 - 1")};
    CHECK(is_zero(restrict_function(C, K).expr).zero());

    // z^beta - f^beta restricts to an exact zero
    ScalarField D{ch, on(ch, "z3 - sqrt(1 - z1^2 - z2^2)")};
    CHECK(restrict_function(D, K).expr.is_literal_zero());
}

TEST_CASE("induced_bracket: so(3) Casimir sphere") {
    PoissonStructure so3 = lie_poisson(so3_constants());
    ConstraintSet K = so3_casimir_sphere(so3);
    SubmanifoldStructure S = induced_bracket(so3, K);
    CHECK(S.sub_chart.coordinates == std::vector<std::string>{"z1", "z2"});
    CHECK(is_zero(S.induced.entry(0, 1) -
                  parse("sqrt(1 - z1^2 - z2^2)", S.sub_chart.symbols()))
              .exact());
    CHECK(S.induced.jacobi_verdict().zero());

    // not a Casimir: rejected with the offending function named
    const Chart& ch = so3.chart();
    Parametrization param;
    param.solved = {{"z3", on(ch, "0")}};
    ConstraintSet bad =
        ConstraintSet::create(ch, {Constraint{on(ch, "z3")}}, param);
    try {
        induced_bracket(so3, bad);
        FAIL("expected NotACasimir");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotACasimir);
        CHECK(std::string(e.what()).find("z3") != std::string::npos);
    }

    // a constant function has no gradient: fails functional independence
    CHECK_THROWS_AS(
        ConstraintSet::create(ch, {Constraint{on(ch, "0")}}, std::nullopt), Error);
}

TEST_CASE("induced bracket is coordinate independent") {
    // omega = eps^{ijk} d_k K with K = z1 + z2^2 has K as a Casimir and
    // restricts to the canonical pair on K = 0
    Chart ch("m3", {"z1", "z2", "z3"});
    PoissonStructure base = PoissonStructure::create(
        ch,
        {on(ch, "0"), on(ch, "-2*z2"), on(ch, "1")},
        Provenance::Explicit);
    REQUIRE(base.jacobi_verdict().exact());

    Parametrization param;
    param.solved = {{"z1", on(ch, "-z2^2")}};
    ConstraintSet K =
        ConstraintSet::create(ch, {Constraint{on(ch, "z1 + z2^2")}}, param);
    SubmanifoldStructure S = induced_bracket(base, K);
    CHECK(S.induced.entry(0, 1).is_literal_one()); // {z2, z3} = 1

    // same surface described after the shear z3 -> z3 + z1
    Chart ch2("m3s", {"w1", "w2", "w3"});
    CoordinateMap shear = CoordinateMap::create(
        ch, ch2,
        {on(ch, "z1"), on(ch, "z2"), on(ch, "z3 + z1")},
        {parse("w1", ch2.symbols()), parse("w2", ch2.symbols()),
         parse("w3 - w1", ch2.symbols())});
    PoissonStructure moved = change_coordinates(base, shear);
    Parametrization param2;
    param2.solved = {{"w1", parse("-w2^2", ch2.symbols())}};
    ConstraintSet K2 = ConstraintSet::create(
        ch2, {Constraint{parse("w1 + w2^2", ch2.symbols())}}, param2);
    SubmanifoldStructure S2 = induced_bracket(moved, K2);

    // surface charts are related by psi: (z2, z3) -> (z2, z3 - z2^2);
    // the induced tensors must be related by the same jacobian
    const Chart& sc = S.sub_chart;
    Expression z2s = Expression::symbol(sc.coordinates[0]);
    Expression z3s = Expression::symbol(sc.coordinates[1]);
    std::map<std::string, Expression> psi_back = {
        {"w2", z2s}, {"w3", normalize(z3s - z2s * z2s)}};
    // d psi has unit determinant, so the single entry transports unchanged
    Expression transported = substitute(S2.induced.entry(0, 1), psi_back);
    CHECK(is_zero(transported - S.induced.entry(0, 1)).exact());
}

TEST_CASE("diagram closure: plane pair and sphere pair") {
    PoissonStructure P4 = canonical(2);
    DiagramClosureReport flat = diagram_closure_check(P4, plane_pair(P4));
    CHECK(flat.pass);
    CHECK(flat.points == 25);
    CHECK(flat.max_deviation <= 1e-8);

    PoissonStructure P6 = canonical(3);
    DiagramClosureReport round = diagram_closure_check(P6, sphere_pair(P6));
    CHECK(round.pass);
    CHECK(round.max_deviation <= 1e-8);
}

TEST_CASE("prescribe_casimirs: closed form on a 3-manifold") {
    Chart ch("m3", {"z1", "z2", "z3"});
    PoissonStructure w0 = canonical(1); // chart (q1, p1)
    // rename the base onto the kept coordinates (z2, z3)
    Chart kept("kept", {"z2", "z3"});
    PoissonStructure base = PoissonStructure::create(
        kept, {Expression::integer(1)}, Provenance::Explicit);
    (void)w0;

    Expression K = on(ch, "z1 + z2^2");
    PrescribeResult r = prescribe_casimirs(ch, {K}, {"z1"}, base);
    CHECK(r.casimir.exact());
    CHECK(r.block_identity.exact());
    CHECK(r.structure.jacobi_verdict().exact());

    // omega^{ij} = (1/det a) eps^{ijk} d_k K with det a = d_1 K = 1
    CHECK(is_zero(r.structure.entry(0, 1) - differentiate(K, "z3")).exact());
    CHECK(is_zero(r.structure.entry(0, 2) + differentiate(K, "z2")).exact());
    CHECK(is_zero(r.structure.entry(1, 2) - differentiate(K, "z1")).exact());

    // restriction to K = 0 gives the canonical bracket {z2, z3} = 1
    Parametrization param;
    param.solved = {{"z1", on(ch, "-z2^2")}};
    ConstraintSet KS = ConstraintSet::create(ch, {Constraint{K}}, param);
    SubmanifoldStructure S = induced_bracket(r.structure, KS);
    CHECK(S.induced.entry(0, 1).is_literal_one());
}

TEST_CASE("prescribe_casimirs: Lie-Poisson form from the quadratic Casimir") {
    Chart ch("m3", {"z1", "z2", "z3"});
    Chart kept("kept", {"z2", "z3"});
    PoissonStructure base = PoissonStructure::create(
        kept, {Expression::integer(1)}, Provenance::Explicit);

    Expression K = on(ch, "(z1^2 + z2^2 + z3^2)/2 - 1");
    PrescribeResult r = prescribe_casimirs(ch, {K}, {"z1"}, base);
    CHECK(r.casimir.exact());
    // omega^{ij} = (1/z1) eps^{ijk} z^k
    CHECK(is_zero(r.structure.entry(0, 1) - on(ch, "z3/z1")).exact());
    CHECK(is_zero(r.structure.entry(0, 2) + on(ch, "z2/z1")).exact());
    CHECK(r.structure.entry(1, 2).is_literal_one());
}

TEST_CASE("prescribe_casimirs: coordinate Casimir pads the base") {
    Chart ch("m3", {"z1", "z2", "z3"});
    Chart kept("kept", {"z2", "z3"});
    PoissonStructure base = PoissonStructure::create(
        kept, {parse("z2", kept.symbols())}, Provenance::Explicit);
    PrescribeResult r = prescribe_casimirs(ch, {on(ch, "z1")}, {"z1"}, base);
    CHECK(r.structure.entry(0, 1).is_literal_zero());
    CHECK(r.structure.entry(0, 2).is_literal_zero());
    CHECK(is_zero(r.structure.entry(1, 2) - on(ch, "z2")).exact());

    // odd residual dimension is rejected
    Chart ch4("m4", {"z1", "z2", "z3", "z4"});
    CHECK_THROWS_AS(
        prescribe_casimirs(ch4, {parse("z1", ch4.symbols())}, {"z1"}, base),
        Error);

    // K independent of the solved coordinate: singular jacobian
    try {
        prescribe_casimirs(ch, {on(ch, "z2")}, {"z1"}, base);
        FAIL("expected singular jacobian");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingularMatrix);
    }
}

TEST_CASE("complete Casimir set induces a nondegenerate structure") {
    PoissonStructure so3 = lie_poisson(so3_constants());
    ConstraintSet K = so3_casimir_sphere(so3);
    SubmanifoldStructure S = induced_bracket(so3, K);
    // 2D induced tensor: nonzero entry means nonzero determinant
    Sampler rng(31);
    int used = 0;
    for (int attempt = 0; attempt < 200 && used < 25; ++attempt) {
        std::map<std::string, double> pt = {{"z1", rng.uniform(-0.7, 0.7)},
                                            {"z2", rng.uniform(-0.7, 0.7)}};
        auto v = try_evaluate(S.induced.entry(0, 1), pt, 1e-10);
        if (!v) continue;
        ++used;
        CHECK(std::abs(*v) > 1e-8);
    }
    CHECK(used == 25);
}

TEST_CASE("poisson_submanifold_check") {
    PoissonStructure so3 = lie_poisson(so3_constants());
    ConstraintSet K = so3_casimir_sphere(so3);
    SubmanifoldStructure S = induced_bracket(so3, K);
    const Chart& ch = so3.chart();

    std::vector<std::pair<ScalarField, ScalarField>> pairs = {
        {ScalarField{ch, on(ch, "z1")}, ScalarField{ch, on(ch, "z2")}},
        {ScalarField{ch, on(ch, "z1*z2")}, ScalarField{ch, on(ch, "z2 + z3")}},
    };
    CHECK(poisson_submanifold_check(so3, S, pairs).zero());

    // a deliberately negated induced tensor fails with a witness
    SubmanifoldStructure wrong = S;
    wrong.induced = PoissonStructure::create(
        S.sub_chart, {normalize(-S.induced.entry(0, 1))}, Provenance::Explicit);
    ZeroVerdict v = poisson_submanifold_check(so3, wrong, pairs);
    CHECK(v.kind == ZeroVerdict::Kind::NonZero);
}

TEST_CASE("first_integral_reduction") {
    PoissonStructure P = canonical(2);
    const Chart& ch = P.chart();

    // {q1, H} = p1 != 0: not a first integral
    ScalarField Hbad{ch, on(ch, "(p1^2 + p2^2 + q1^2 + q2^2)/2")};
    CHECK_THROWS_AS(first_integral_reduction(P, Hbad, plane_pair(P)), Error);

    ScalarField H{ch, on(ch, "p2^2/2")};
    FirstIntegralReductionResult r = first_integral_reduction(P, H, plane_pair(P));
    CHECK(r.sub.induced.entry(0, 1).is_literal_one());
    CHECK(is_zero(r.reduced_hamiltonian.expr -
                  parse("p2^2/2", r.sub.sub_chart.symbols()))
              .exact());
    CHECK(r.max_flow_deviation <= 1e-10);
}

TEST_CASE("hamiltonian field identity on surfaces (restriction commutes)") {
    // for random polynomial B, the ambient field restricted to the surface
    // equals the field of the restricted function built with the induced tensor
    PoissonStructure so3 = lie_poisson(so3_constants());
    ConstraintSet K = so3_casimir_sphere(so3);
    SubmanifoldStructure S = induced_bracket(so3, K);
    const Chart& ch = so3.chart();

    std::vector<std::string> kept = K.kept_coordinates();
    auto pts = K.surface_points(50, 0);
    for (int iter = 0; iter < 4; ++iter) {
        Expression B = on(ch, "z1^2*z2 + z3*z1");
        if (iter == 1) B = on(ch, "z2*z3");
        if (iter == 2) B = on(ch, "z1 + z2 + z3^2");
        if (iter == 3) B = on(ch, "z3^3");
        VectorField ambient = hamiltonian_field(so3, ScalarField{ch, B});
        ScalarField Bbar{S.sub_chart, S.restrict_expr(B)};
        VectorField reduced = hamiltonian_field(S.induced, Bbar);
        for (const auto& pt : pts) {
            for (size_t a = 0; a < kept.size(); ++a) {
                auto va = try_evaluate(ambient.components[ch.coord_index(kept[a])], pt, 1e-9);
                auto vr = try_evaluate(reduced.components[a], pt, 1e-9);
                if (!va || !vr) continue;
                CHECK(std::abs(*va - *vr) < 1e-9);
            }
        }
    }
}
