#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pgeom/error.hpp"
#include "pgeom/expr.hpp"

#include <cmath>

using namespace pgeom;

namespace {

const std::vector<std::string> xyz = {"x", "y", "z"};

Expression P(const std::string& s) { return parse(s, xyz); }

// random polynomial expression over x, y, z with small integer coefficients
Expression random_poly(Sampler& rng, int depth = 3) {
    int pick = static_cast<int>(rng.next_u64() % (depth <= 0 ? 2 : 5));
    switch (pick) {
        case 0: {
            long long c = static_cast<long long>(rng.next_u64() % 9) - 4;
            return Expression::integer(c);
        }
        case 1:
            return Expression::symbol(xyz[rng.next_u64() % 3]);
        case 2:
            return random_poly(rng, depth - 1) + random_poly(rng, depth - 1);
        case 3:
            return random_poly(rng, depth - 1) * random_poly(rng, depth - 1);
        default:
            return Expression::power(random_poly(rng, depth - 1),
                                     1 + static_cast<int>(rng.next_u64() % 2));
    }
}

Expression random_rational(Sampler& rng) {
    Expression num = random_poly(rng);
    // keep denominators bounded away from the zero polynomial
    Expression den = random_poly(rng, 2) * random_poly(rng, 2) + Expression::integer(3);
    return Expression::quotient(num, den);
}

} // namespace

TEST_CASE("parse: grammar and round trips") {
    std::vector<std::string> chart = {"q1", "q2", "p1", "p2"};
    Expression e = parse("q1*p2 - p1", chart);
    CHECK(parse(e.str(), chart).same(e));

    std::vector<std::string> z3 = {"z1", "z2", "z3"};
    Expression ex12 = parse("(1/2)*(z1^2+z2^2+z3^2)", z3);
    CHECK(evaluate(ex12, {{"z1", 1.0}, {"z2", 2.0}, {"z3", 3.0}}) == doctest::Approx(7.0));
    CHECK(parse(ex12.str(), z3).same(ex12));

    CHECK_THROWS_AS(parse("z1^p2", {"z1", "p2"}), Error);
    CHECK_THROWS_AS(parse("q3 + 1", chart), Error);
    CHECK_THROWS_AS(parse("q1 +", chart), Error);
    CHECK_THROWS_AS(parse("tan(q1)", chart), Error);

    // unary minus and signed exponents
    CHECK(parse("-q1", chart).same(parse("0 - q1", chart)));
    CHECK(parse("q1^-1", chart).same(parse("1/q1", chart)));
}

TEST_CASE("parse: error positions name the offender") {
    try {
        parse("x + w*y", xyz);
        FAIL("expected parse error");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::Parse);
        CHECK(std::string(err.what()).find("'w'") != std::string::npos);
    }
}

TEST_CASE("differentiate: spec cases") {
    std::vector<std::string> z3 = {"z1", "z2", "z3"};
    Expression a = parse("(1/2)*(z1^2+z2^2+z3^2)", z3);
    CHECK(differentiate(a, "z1").same(parse("z1", z3)));

    std::vector<std::string> qp = {"q", "p"};
    CHECK(differentiate(parse("p", qp), "q").is_literal_zero());

    Expression s = parse("sin(x^2)", xyz);
    Expression ds = differentiate(s, "x");
    CHECK(ds.same(parse("2*x*cos(x^2)", xyz)));
}

TEST_CASE("evaluate: values and domain errors") {
    CHECK(evaluate(P("x*y"), {{"x", 2}, {"y", 3}}) == doctest::Approx(6.0));
    CHECK(evaluate(P("sin(x)"), {{"x", 0}}) == doctest::Approx(0.0));
    CHECK_THROWS_AS(evaluate(P("log(x)"), {{"x", -1.0}}), Error);
    CHECK_THROWS_AS(evaluate(P("sqrt(x)"), {{"x", -4.0}}), Error);
    CHECK_THROWS_AS(evaluate(P("1/x"), {{"x", 0.0}}), Error);
    CHECK_THROWS_AS(evaluate(P("x+y"), {{"x", 0.0}}), Error);
}

TEST_CASE("normalize: canonical rational forms") {
    Expression e = P("(x+1)^2 - x^2 - 2*x - 1");
    CHECK(normalize(e).is_literal_zero());

    // parse() normalizes, so build the raw quotient to observe the assumption
    Expression xsym = Expression::symbol("x");
    NormalizeResult nr = normalize_full(Expression::quotient(xsym, xsym));
    CHECK(nr.expr.is_literal_one());
    REQUIRE(nr.nonzero_assumptions.size() == 1);
    CHECK(nr.nonzero_assumptions[0] == "x != 0");

    CHECK(normalize(P("sin(x)+sin(x)")).same(P("2*sin(x)")));

    // same mathematical function, same tree
    CHECK(normalize(P("(x+y)*(x-y)")).same(normalize(P("x^2-y^2"))));
    CHECK(normalize(P("(x^2-1)/(x-1)")).same(P("x+1")));
    CHECK(normalize(P("sin(x^2+2*x+1)")).same(normalize(P("sin((x+1)^2)"))));
}

TEST_CASE("is_zero: two tiers") {
    // antisymmetric contraction: sum_{j,k} eps^{1jk} z^k z^j = z3*z2 - z2*z3
    Expression eps = P("y*z - z*y");
    CHECK(is_zero(eps).kind == ZeroVerdict::Kind::ProvedZero);

    Expression pyth = P("sin(x)^2 + cos(x)^2 - 1");
    ZeroVerdict v = is_zero(pyth);
    CHECK(v.kind == ZeroVerdict::Kind::NumericZero);
    CHECK(v.samples == 50);
    CHECK(v.max_abs <= 1e-12);

    ZeroVerdict nz = is_zero(P("x*y - 1"));
    CHECK(nz.kind == ZeroVerdict::Kind::NonZero);
    CHECK(nz.witness.count("x") == 1);
    CHECK(std::abs(evaluate(P("x*y - 1"), nz.witness) - nz.witness_value) < 1e-15);

    CHECK_THROWS_AS(is_zero(P("x"), ZeroTestOptions{-1.0, 50, 0, 2.0, 1e-8}), Error);

    // every sample point lands outside the log domain: undecidable
    try {
        is_zero(P("log(-2 - x^2)"));
        FAIL("expected undecidable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Undecidable);
    }
}

TEST_CASE("is_zero: determinism given seed") {
    ZeroVerdict a = is_zero(P("x*y - 1"));
    ZeroVerdict b = is_zero(P("x*y - 1"));
    CHECK(a.witness == b.witness);
    ZeroTestOptions other;
    other.seed = 7;
    ZeroVerdict c = is_zero(P("x*y - 1"), other);
    CHECK(c.kind == ZeroVerdict::Kind::NonZero);
}

TEST_CASE("property: derivative matches central finite differences") {
    Sampler rng(42);
    int checked = 0;
    while (checked < 100) {
        Expression e = random_poly(rng);
        Expression de = differentiate(e, "x");
        std::map<std::string, double> pt = {{"x", rng.uniform(-2, 2)},
                                            {"y", rng.uniform(-2, 2)},
                                            {"z", rng.uniform(-2, 2)}};
        const double h = 1e-5;
        auto up = pt, dn = pt;
        up["x"] += h;
        dn["x"] -= h;
        double fd = (evaluate(e, up) - evaluate(e, dn)) / (2 * h);
        double ex = evaluate(de, pt);
        CHECK(std::abs(fd - ex) <= 1e-6 * std::max(1.0, std::abs(ex)));
        ++checked;
    }
}

TEST_CASE("property: normalize is idempotent") {
    Sampler rng(1);
    for (int i = 0; i < 60; ++i) {
        Expression e = i % 2 ? random_rational(rng) : random_poly(rng);
        Expression n1 = normalize(e);
        CHECK(normalize(n1).same(n1));
    }
}

TEST_CASE("property: e - e is proved zero") {
    Sampler rng(2);
    for (int i = 0; i < 60; ++i) {
        Expression e = i % 2 ? random_rational(rng) : random_poly(rng);
        CHECK(is_zero(e - e).kind == ZeroVerdict::Kind::ProvedZero);
    }
}

TEST_CASE("property: parse(print(e)) equals normalize(e)") {
    Sampler rng(3);
    for (int i = 0; i < 60; ++i) {
        Expression e = i % 2 ? random_rational(rng) : random_poly(rng);
        Expression n = normalize(e);
        CHECK(parse(n.str(), xyz).same(n));
    }
}

TEST_CASE("substitution composes with normalize") {
    Expression e = P("x^2 + y");
    Expression s = substitute(e, {{"x", P("y+1")}});
    CHECK(normalize(s).same(normalize(P("(y+1)^2 + y"))));
}

TEST_CASE("compiled evaluation agrees with tree evaluation") {
    Sampler rng(4);
    std::vector<std::string> slots = {"x", "y", "z"};
    for (int i = 0; i < 40; ++i) {
        Expression e = random_rational(rng);
        CompiledExpr ce(normalize(e), slots);
        double vals[3] = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        std::map<std::string, double> pt = {
            {"x", vals[0]}, {"y", vals[1]}, {"z", vals[2]}};
        auto ref = try_evaluate(normalize(e), pt, 0.0);
        if (!ref) continue;
        CHECK(ce.eval(vals) == doctest::Approx(*ref).epsilon(1e-12));
    }
}

TEST_CASE("monomial collection") {
    auto monos = collect_monomials(P("3*x^2*y + 2*x^2*y - z*x + 5"), {"x", "y"});
    REQUIRE(monos.size() == 3);
    for (const auto& [coeff, powers] : monos) {
        if (powers.empty()) {
            CHECK(coeff.same(Expression::integer(5)));
        } else if (powers.count("y")) {
            CHECK(coeff.same(Expression::integer(5)));
            CHECK(powers.at("x") == 2);
        } else {
            CHECK(coeff.same(normalize(-Expression::symbol("z"))));
        }
    }
    CHECK(is_polynomial_in(P("x/(1+z)"), {"x", "y"}));
    CHECK(!is_polynomial_in(P("1/x"), {"x"}));
    CHECK(!is_polynomial_in(P("sin(x)"), {"x"}));
    CHECK(is_polynomial_in(P("sin(z)*x^2"), {"x"}));
}
