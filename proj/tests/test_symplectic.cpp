#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pgeom/error.hpp"
#include "pgeom/symplectic.hpp"

#include <cmath>

using namespace pgeom;

namespace {

Expression on(const Chart& ch, const std::string& text) {
    return parse(text, ch.symbols());
}

PoissonStructure two_dim(const std::string& w12) {
    Chart ch("plane", {"z1", "z2"});
    return PoissonStructure::create(ch, {on(ch, w12)}, Provenance::Explicit);
}

} // namespace

TEST_CASE("invert: canonical blocks and the 2D scalar case") {
    PoissonStructure P = canonical(1);
    SymplecticForm F = invert(P);
    CHECK(F.entry(0, 1).same(Expression::integer(-1)));
    CHECK(F.entry(1, 0).is_literal_one());
    CHECK(F.closedness_verdict().exact());

    PoissonStructure Q = two_dim("1 + z1^2");
    SymplecticForm FQ = invert(Q);
    CHECK(is_zero(FQ.entry(0, 1) - on(Q.chart(), "-1/(1+z1^2)")).exact());

    PoissonStructure so3 = lie_poisson(so3_constants());
    CHECK_THROWS_AS(invert(so3), Error);
    try {
        invert(so3);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateStructure);
    }
}

TEST_CASE("invert round trip is the identity") {
    PoissonStructure P = two_dim("1 + z1^2");
    PoissonStructure back = invert_form(invert(P));
    CHECK(back.structurally_equal(P));

    PoissonStructure C = canonical(2);
    CHECK(invert_form(invert(C)).structurally_equal(C));
}

TEST_CASE("invert_at: numeric fallback") {
    PoissonStructure P = canonical(1);
    Mat m = invert_at(P, {{"q1", 0.3}, {"p1", -0.2}});
    CHECK(m(0, 1) == doctest::Approx(-1.0));
    CHECK(m(1, 0) == doctest::Approx(1.0));

    PoissonStructure Q = two_dim("z1");
    Mat mq = invert_at(Q, {{"z1", 2.0}, {"z2", 0.0}});
    CHECK(mq(0, 1) == doctest::Approx(-0.5));

    PoissonStructure so3 = lie_poisson(so3_constants());
    CHECK_THROWS_AS(invert_at(so3, {{"z1", 1.0}, {"z2", 0.5}, {"z3", -0.3}}), Error);
}

TEST_CASE("potential: gauge and curl check") {
    // constant form on the plane
    Chart ch("plane", {"z1", "z2"});
    SymplecticForm F = SymplecticForm::create(ch, {on(ch, "1")});
    VectorField a = potential(F);
    CHECK(is_zero(a.components[0] - on(ch, "-z2/2")).exact());
    CHECK(is_zero(a.components[1] - on(ch, "z1/2")).exact());

    // canonical pair: a = (p/2, -q/2) up to gauge; the curl check is the contract
    PoissonStructure P = canonical(1);
    SymplecticForm FC = invert(P);
    VectorField ac = potential(FC);
    const Chart& cch = FC.chart();
    Expression curl = differentiate(ac.components[1], cch.coordinates[0]) -
                      differentiate(ac.components[0], cch.coordinates[1]);
    CHECK(normalize(curl - FC.entry(0, 1)).is_literal_zero());

    // polynomial form built from a known potential on a 4D chart
    Chart c4("four", {"z1", "z2", "z3", "z4"});
    std::vector<Expression> known = {on(c4, "0"), on(c4, "z1*z3"), on(c4, "0"), on(c4, "0")};
    std::vector<Expression> upper;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            upper.push_back(normalize(differentiate(known[j], c4.coordinates[i]) -
                                      differentiate(known[i], c4.coordinates[j])));
    SymplecticForm F4 = SymplecticForm::create(c4, upper);
    CHECK(F4.closedness_verdict().exact());
    VectorField a4 = potential(F4);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            Expression c = differentiate(a4.components[j], c4.coordinates[i]) -
                           differentiate(a4.components[i], c4.coordinates[j]);
            CHECK(normalize(c - F4.entry(i, j)).is_literal_zero());
        }

    // non-polynomial entry is rejected
    SymplecticForm Fbad = SymplecticForm::create(ch, {on(ch, "1/(1+z1^2)")});
    CHECK_THROWS_AS(potential(Fbad), Error);

    // non-closed form is rejected
    Chart c4b("fourb", {"z1", "z2", "z3", "z4"});
    std::vector<Expression> nc(6, Expression::integer(0));
    nc[0] = on(c4b, "z3");
    SymplecticForm Fnc = SymplecticForm::create(c4b, nc);
    CHECK(!Fnc.closedness_verdict().zero());
    CHECK_THROWS_AS(potential(Fnc), Error);
}

TEST_CASE("generator: oscillator field and failure") {
    PoissonStructure P = canonical(1);
    const Chart& ch = P.chart();
    VectorField V{ch, {on(ch, "p1"), on(ch, "-q1")}};
    ScalarField A = generator(P, V);
    CHECK(is_zero(A.expr - on(ch, "(q1^2+p1^2)/2")).exact());

    VectorField zero{ch, {on(ch, "0"), on(ch, "0")}};
    CHECK(generator(P, zero).expr.is_literal_zero());

    VectorField bad{ch, {on(ch, "q1"), on(ch, "0")}};
    try {
        generator(P, bad);
        FAIL("expected NotHamiltonian");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotHamiltonian);
    }
}

TEST_CASE("pullback: identity and canonical restriction") {
    PoissonStructure P = canonical(2);
    SymplecticForm F = invert(P);
    const Chart& ch = P.chart();

    // identity embedding
    Chart same("copy", {"x1", "x2", "x3", "x4"});
    std::vector<Expression> ident;
    for (const auto& c : same.coordinates) ident.push_back(parse(c, same.symbols()));
    Embedding E = Embedding::create(same, ch, ident);
    SymplecticForm FF = pullback(F, E);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            std::map<std::string, Expression> ren;
            for (int t = 0; t < 4; ++t)
                ren.emplace(ch.coordinates[t], Expression::symbol(same.coordinates[t]));
            CHECK(is_zero(FF.entry(i, j) - substitute(F.entry(i, j), ren)).exact());
        }

    // q1 = 0, p1 = 0 slice of canonical R^4 gives the canonical 2D form
    Chart slice("slice", {"x1", "x2"}); // (q2, p2)
    std::vector<Expression> emb = {on(slice, "0"), on(slice, "x1"), on(slice, "0"),
                                   on(slice, "x2")};
    Embedding E2 = Embedding::create(slice, ch, emb);
    SymplecticForm F2 = pullback(F, E2);
    CHECK(F2.entry(0, 1).same(Expression::integer(-1)));

    // rank-deficient embedding is rejected
    Chart thin("thin", {"x1", "x2"});
    std::vector<Expression> degenerate = {on(thin, "x1"), on(thin, "x1"), on(thin, "0"),
                                          on(thin, "0")};
    CHECK_THROWS_AS(Embedding::create(thin, ch, degenerate), Error);
}

TEST_CASE("pullback contracts like the ambient form on pushed-forward vectors") {
    PoissonStructure P = canonical(2);
    SymplecticForm F = invert(P);
    const Chart& amb = P.chart();

    Chart slice("slice", {"x1", "x2"});
    // curved surface: q1 = x1^2, q2 = x1, p1 = x2, p2 = x1*x2
    std::vector<Expression> emb = {on(slice, "x1^2"), on(slice, "x1"),
                                   on(slice, "x2"), on(slice, "x1*x2")};
    Embedding E = Embedding::create(slice, amb, emb);
    SymplecticForm Ff = pullback(F, E);

    // tangent fields on the slice and their pushforwards
    std::vector<std::vector<Expression>> fields = {
        {on(slice, "1"), on(slice, "0")},
        {on(slice, "x2"), on(slice, "-x1")},
    };
    auto push = [&](const std::vector<Expression>& v, int i) {
        std::vector<Expression> terms;
        for (int a = 0; a < 2; ++a)
            terms.push_back(differentiate(emb[i], slice.coordinates[a]) * v[a]);
        return normalize(Expression::sum(std::move(terms)));
    };

    Sampler rng(17);
    int used = 0;
    for (int attempt = 0; attempt < 100 && used < 25; ++attempt) {
        std::map<std::string, double> x = {{"x1", rng.uniform(-1, 1)},
                                           {"x2", rng.uniform(-1, 1)}};
        // contraction on the slice
        double sub = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                sub += evaluate(Ff.entry(a, b), x) * evaluate(fields[0][a], x) *
                       evaluate(fields[1][b], x);
        // ambient contraction at the image point with pushed vectors
        std::map<std::string, double> z = x;
        for (int i = 0; i < 4; ++i) z[amb.coordinates[i]] = evaluate(emb[i], x);
        double full = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                full += evaluate(F.entry(i, j), z) * evaluate(push(fields[0], i), x) *
                        evaluate(push(fields[1], j), x);
        CHECK(std::abs(sub - full) <= 1e-9);
        ++used;
    }
    CHECK(used == 25);
}

TEST_CASE("partitioned_inverse: canonical, random, and the iff statement") {
    // canonical 4x4 block form
    Mat A(4, 4);
    A(0, 2) = 1;
    A(1, 3) = 1;
    A(2, 0) = -1;
    A(3, 1) = -1;
    PartitionedInverseReport rep = partitioned_inverse(A, 2);
    CHECK(rep.a_invertible == false); // a block of zeros
    CHECK(rep.gamma_invertible == false);

    // random antisymmetric 6x6 with invertible top block
    Sampler rng(5);
    Mat R(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            double v = rng.uniform(-1, 1);
            R(i, j) = v;
            R(j, i) = -v;
        }
    PartitionedInverseReport rr = partitioned_inverse(R, 2);
    CHECK(rr.a_invertible);
    CHECK(rr.gamma_invertible);
    CHECK(rr.identities_hold);
    CHECK(rr.gamma_identity_error <= 1e-10);
    CHECK(rr.a_identity_error <= 1e-10);

    // singular a block forces singular gamma block (invertible A throughout)
    Mat S(4, 4);
    S(0, 2) = 1;
    S(2, 0) = -1;
    S(1, 3) = 1;
    S(3, 1) = -1;
    PartitionedInverseReport rs = partitioned_inverse(S, 2);
    CHECK(rs.a_invertible == rs.gamma_invertible);
}

TEST_CASE("closedness of the inverse matches Jacobi of the tensor") {
    // nondegenerate quadratic structure on the plane: Jacobi holds trivially
    PoissonStructure P = two_dim("1 + z1^2");
    CHECK(P.jacobi_verdict().exact());
    CHECK(invert(P).closedness_verdict().exact());

    // a 4D structure with nonzero Jacobi residual must yield a non-closed form
    Chart c4("c4", {"z1", "z2", "z3", "z4"});
    std::vector<Expression> upper(6, Expression::integer(0));
    upper[upper_index(0, 1, 4)] = on(c4, "1");
    upper[upper_index(0, 2, 4)] = on(c4, "z1");
    upper[upper_index(1, 2, 4)] = on(c4, "0");
    upper[upper_index(0, 3, 4)] = on(c4, "0");
    upper[upper_index(1, 3, 4)] = on(c4, "1");
    upper[upper_index(2, 3, 4)] = on(c4, "1");
    PoissonStructure bad = PoissonStructure::create(c4, upper, Provenance::Explicit);
    if (!bad.jacobi_verdict().zero()) {
        SymplecticForm F = invert(bad);
        CHECK(!F.closedness_verdict().zero());
    }
}
