// Internal sparse multivariate polynomial arithmetic over exact rationals.
// Variables are atom indices assigned by the normalizer; monomials follow
// graded lexicographic order so canonical forms are reproducible.
#ifndef PGEOM_SRC_POLY_HPP
#define PGEOM_SRC_POLY_HPP

#include "pgeom/rational.hpp"

#include <map>
#include <vector>

namespace pgeom::detail {

using Mono = std::vector<int>;

inline int mono_degree(const Mono& m) {
    int d = 0;
    for (int e : m) d += e;
    return d;
}

struct GrlexLess {
    bool operator()(const Mono& a, const Mono& b) const {
        int da = mono_degree(a), db = mono_degree(b);
        if (da != db) return da < db;
        return a < b;
    }
};

struct Poly {
    int nvars = 0;
    std::map<Mono, Rational, GrlexLess> terms;

    static Poly zero(int nvars) { return Poly{nvars, {}}; }
    static Poly constant(int nvars, const Rational& c);
    static Poly variable(int nvars, int index);

    bool is_zero() const { return terms.empty(); }
    bool is_constant() const;
    Rational constant_value() const; // valid when is_constant()

    int total_degree() const;
    int degree_in(int var) const;
    bool involves(int var) const { return degree_in(var) > 0; }

    const Mono& leading_mono() const { return terms.rbegin()->first; }
    const Rational& leading_coeff() const { return terms.rbegin()->second; }

    void add_term(const Mono& m, const Rational& c);

    Poly operator-() const;
    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    friend bool operator==(const Poly& a, const Poly& b) {
        return a.nvars == b.nvars && a.terms == b.terms;
    }

    Poly scaled(const Rational& c) const;
    Poly mono_multiplied(const Mono& m) const;
    Poly pow(int k) const; // k >= 0

    /// Signed rational content: gcd of coefficients carrying the sign of the
    /// leading one. Dividing by it yields coprime integer coefficients with a
    /// positive leading coefficient.
    Rational signed_content() const;
    /// Componentwise minimum exponent over all terms.
    Mono monomial_content() const;

    /// View as univariate in `var` with Poly coefficients (degree -> coeff).
    std::map<int, Poly> univariate_in(int var) const;
    static Poly from_univariate(int nvars, int var, const std::map<int, Poly>& coeffs);
};

/// Exact quotient; the caller guarantees divisibility.
Poly divexact(const Poly& a, const Poly& b);

/// Primitive multivariate gcd, canonically scaled (integer coprime
/// coefficients, positive leading coefficient).
Poly poly_gcd(const Poly& a, const Poly& b);

std::string poly_repr(const Poly& p); // debugging aid

/// Rational function num/den with gcd-free invariant and a canonically
/// scaled denominator.
struct RatFunc {
    Poly num, den;

    static RatFunc from_poly(const Poly& p);
    static RatFunc make(Poly n, Poly d, std::vector<Poly>* cancelled);

    bool is_zero() const { return num.is_zero(); }

    static RatFunc add(const RatFunc& a, const RatFunc& b, std::vector<Poly>* cancelled);
    static RatFunc mul(const RatFunc& a, const RatFunc& b, std::vector<Poly>* cancelled);
    static RatFunc div(const RatFunc& a, const RatFunc& b, std::vector<Poly>* cancelled);
    static RatFunc pow(const RatFunc& a, int k, std::vector<Poly>* cancelled);
    RatFunc negated() const;
};

} // namespace pgeom::detail

#endif
