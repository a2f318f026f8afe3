#include "poly.hpp"

#include "pgeom/error.hpp"

#include <algorithm>
#include <sstream>

namespace pgeom::detail {

Poly Poly::constant(int nvars, const Rational& c) {
    Poly p{nvars, {}};
    if (!c.is_zero()) p.terms.emplace(Mono(nvars, 0), c);
    return p;
}

Poly Poly::variable(int nvars, int index) {
    Poly p{nvars, {}};
    Mono m(nvars, 0);
    m[index] = 1;
    p.terms.emplace(std::move(m), Rational(1));
    return p;
}

bool Poly::is_constant() const {
    return terms.empty() ||
           (terms.size() == 1 && mono_degree(terms.begin()->first) == 0);
}

Rational Poly::constant_value() const {
    return terms.empty() ? Rational(0) : terms.begin()->second;
}

int Poly::total_degree() const {
    return terms.empty() ? 0 : mono_degree(terms.rbegin()->first);
}

int Poly::degree_in(int var) const {
    int d = 0;
    for (const auto& [m, c] : terms) d = std::max(d, m[var]);
    return d;
}

void Poly::add_term(const Mono& m, const Rational& c) {
    if (c.is_zero()) return;
    auto it = terms.find(m);
    if (it == terms.end()) {
        terms.emplace(m, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms.erase(it);
    }
}

Poly Poly::operator-() const {
    Poly r{nvars, {}};
    for (const auto& [m, c] : terms) r.terms.emplace(m, -c);
    return r;
}

Poly operator+(const Poly& a, const Poly& b) {
    Poly r = a;
    for (const auto& [m, c] : b.terms) r.add_term(m, c);
    return r;
}

Poly operator-(const Poly& a, const Poly& b) {
    Poly r = a;
    for (const auto& [m, c] : b.terms) r.add_term(m, -c);
    return r;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly r{a.nvars, {}};
    Mono m(a.nvars, 0);
    for (const auto& [ma, ca] : a.terms) {
        for (const auto& [mb, cb] : b.terms) {
            for (int i = 0; i < a.nvars; ++i) m[i] = ma[i] + mb[i];
            r.add_term(m, ca * cb);
        }
    }
    return r;
}

Poly Poly::scaled(const Rational& c) const {
    Poly r{nvars, {}};
    if (c.is_zero()) return r;
    for (const auto& [m, k] : terms) r.terms.emplace(m, k * c);
    return r;
}

Poly Poly::mono_multiplied(const Mono& m) const {
    Poly r{nvars, {}};
    for (const auto& [mm, c] : terms) {
        Mono t = mm;
        for (int i = 0; i < nvars; ++i) t[i] += m[i];
        r.terms.emplace(std::move(t), c);
    }
    return r;
}

Poly Poly::pow(int k) const {
    Poly r = Poly::constant(nvars, Rational(1));
    Poly base = *this;
    while (k > 0) {
        if (k & 1) r = r * base;
        base = base * base;
        k >>= 1;
    }
    return r;
}

Rational Poly::signed_content() const {
    if (terms.empty()) return Rational(0);
    Rational g(0);
    for (const auto& [m, c] : terms) {
        g = g.is_zero() ? c.abs() : Rational::content_gcd(g, c);
        if (g.is_one()) break;
    }
    return leading_coeff().negative() ? -g : g;
}

Mono Poly::monomial_content() const {
    Mono m(nvars, 0);
    if (terms.empty()) return m;
    m = terms.begin()->first;
    for (const auto& [mm, c] : terms)
        for (int i = 0; i < nvars; ++i) m[i] = std::min(m[i], mm[i]);
    return m;
}

std::map<int, Poly> Poly::univariate_in(int var) const {
    std::map<int, Poly> out;
    for (const auto& [m, c] : terms) {
        Mono rest = m;
        int d = rest[var];
        rest[var] = 0;
        auto [it, inserted] = out.try_emplace(d, Poly::zero(nvars));
        it->second.add_term(rest, c);
    }
    return out;
}

Poly Poly::from_univariate(int nvars, int var, const std::map<int, Poly>& coeffs) {
    Poly r = Poly::zero(nvars);
    for (const auto& [d, p] : coeffs) {
        for (const auto& [m, c] : p.terms) {
            Mono t = m;
            t[var] += d;
            r.add_term(t, c);
        }
    }
    return r;
}

Poly divexact(const Poly& a, const Poly& b) {
    if (b.is_zero()) fail(ErrorKind::Domain, "polynomial division by zero");
    Poly rem = a;
    Poly q = Poly::zero(a.nvars);
    const Mono& lb = b.leading_mono();
    const Rational& cb = b.leading_coeff();
    while (!rem.is_zero()) {
        const Mono& lr = rem.leading_mono();
        Mono qm(a.nvars, 0);
        for (int i = 0; i < a.nvars; ++i) {
            qm[i] = lr[i] - lb[i];
            if (qm[i] < 0)
                fail(ErrorKind::Domain, "inexact polynomial division");
        }
        Rational qc = rem.leading_coeff() / cb;
        q.add_term(qm, qc);
        rem = rem - b.mono_multiplied(qm).scaled(qc);
    }
    return q;
}

namespace {

Poly canonical_primitive(const Poly& p) {
    if (p.is_zero()) return p;
    Rational c = p.signed_content();
    return p.scaled(Rational(1) / c);
}

// gcd of the univariate-view coefficients (the content w.r.t. var)
Poly content_in(const Poly& p, int var) {
    Poly g = Poly::zero(p.nvars);
    for (const auto& [d, c] : p.univariate_in(var)) {
        g = g.is_zero() ? c : poly_gcd(g, c);
        if (g.is_constant() && !g.is_zero()) break;
    }
    return g.is_zero() ? g : canonical_primitive(g);
}

// pseudo-remainder of a by b in var (both with positive degree in var)
Poly pseudo_rem(Poly a, const Poly& b, int var) {
    int db = b.degree_in(var);
    auto bu = b.univariate_in(var);
    Poly lb = bu.rbegin()->second;
    while (!a.is_zero()) {
        int da = a.degree_in(var);
        if (da < db) break;
        auto au = a.univariate_in(var);
        Poly la = au.rbegin()->second;
        Mono shift(a.nvars, 0);
        shift[var] = da - db;
        a = a * lb - b.mono_multiplied(shift) * la;
    }
    return a;
}

} // namespace

Poly poly_gcd(const Poly& a, const Poly& b) {
    if (a.is_zero()) return canonical_primitive(b);
    if (b.is_zero()) return canonical_primitive(a);

    Mono ma = a.monomial_content();
    Mono mb = b.monomial_content();
    Mono common(a.nvars, 0);
    for (int i = 0; i < a.nvars; ++i) common[i] = std::min(ma[i], mb[i]);

    Mono inv_ma = ma, inv_mb = mb;
    Poly pa = a, pb = b;
    // strip each argument's own monomial content
    {
        std::map<Mono, Rational, GrlexLess> ta, tb;
        for (const auto& [m, c] : a.terms) {
            Mono t = m;
            for (int i = 0; i < a.nvars; ++i) t[i] -= ma[i];
            ta.emplace(std::move(t), c);
        }
        for (const auto& [m, c] : b.terms) {
            Mono t = m;
            for (int i = 0; i < b.nvars; ++i) t[i] -= mb[i];
            tb.emplace(std::move(t), c);
        }
        pa.terms = std::move(ta);
        pb.terms = std::move(tb);
    }
    pa = canonical_primitive(pa);
    pb = canonical_primitive(pb);

    Poly mono_part = Poly::zero(a.nvars);
    mono_part.terms.emplace(common, Rational(1));

    // pick the main variable: smallest combined degree among shared variables
    int var = -1, best = 0;
    for (int i = 0; i < a.nvars; ++i) {
        int da = pa.degree_in(i), db = pb.degree_in(i);
        if (da == 0 && db == 0) continue;
        if (da == 0 || db == 0) continue; // gcd cannot involve i beyond content
        int d = da + db;
        if (var < 0 || d < best) {
            var = i;
            best = d;
        }
    }
    // no shared variable: the primitive parts are coprime
    if (var < 0) return mono_part;

    Poly ca = content_in(pa, var);
    Poly cb = content_in(pb, var);
    Poly cont = poly_gcd(ca, cb);
    Poly A = divexact(pa, ca);
    Poly B = divexact(pb, cb);
    if (A.degree_in(var) < B.degree_in(var)) std::swap(A, B);

    while (true) {
        Poly r = pseudo_rem(A, B, var);
        if (r.is_zero()) break;
        if (r.degree_in(var) == 0) return canonical_primitive(mono_part * cont);
        Poly rc = content_in(r, var);
        A = B;
        B = divexact(r, rc);
    }
    return canonical_primitive(mono_part * cont * B);
}

std::string poly_repr(const Poly& p) {
    std::ostringstream os;
    if (p.is_zero()) return "0";
    bool first = true;
    for (auto it = p.terms.rbegin(); it != p.terms.rend(); ++it) {
        if (!first) os << " + ";
        first = false;
        os << it->second.str();
        for (int i = 0; i < p.nvars; ++i)
            if (it->first[i] > 0) os << "*a" << i << "^" << it->first[i];
    }
    return os.str();
}

RatFunc RatFunc::from_poly(const Poly& p) {
    return RatFunc{p, Poly::constant(p.nvars, Rational(1))};
}

RatFunc RatFunc::make(Poly n, Poly d, std::vector<Poly>* cancelled) {
    if (d.is_zero()) fail(ErrorKind::Domain, "division by zero expression");
    if (n.is_zero()) return from_poly(Poly::zero(n.nvars));
    Poly g = poly_gcd(n, d);
    if (!g.is_constant()) {
        n = divexact(n, g);
        d = divexact(d, g);
        if (cancelled) cancelled->push_back(g);
    }
    // scale so the denominator is integer-primitive with positive lead
    Rational s = d.signed_content();
    if (!s.is_one()) {
        Rational inv = Rational(1) / s;
        n = n.scaled(inv);
        d = d.scaled(inv);
    }
    return RatFunc{std::move(n), std::move(d)};
}

RatFunc RatFunc::add(const RatFunc& a, const RatFunc& b, std::vector<Poly>* cancelled) {
    if (a.den == b.den) return make(a.num + b.num, a.den, cancelled);
    return make(a.num * b.den + b.num * a.den, a.den * b.den, cancelled);
}

RatFunc RatFunc::mul(const RatFunc& a, const RatFunc& b, std::vector<Poly>* cancelled) {
    return make(a.num * b.num, a.den * b.den, cancelled);
}

RatFunc RatFunc::div(const RatFunc& a, const RatFunc& b, std::vector<Poly>* cancelled) {
    if (b.num.is_zero()) fail(ErrorKind::Domain, "division by zero expression");
    return make(a.num * b.den, a.den * b.num, cancelled);
}

RatFunc RatFunc::pow(const RatFunc& a, int k, std::vector<Poly>* cancelled) {
    if (k == 0) return from_poly(Poly::constant(a.num.nvars, Rational(1)));
    if (k < 0) {
        if (a.num.is_zero())
            fail(ErrorKind::Domain, "zero raised to a negative power");
        return make(a.den.pow(-k), a.num.pow(-k), cancelled);
    }
    return make(a.num.pow(k), a.den.pow(k), cancelled);
}

RatFunc RatFunc::negated() const { return RatFunc{-num, den}; }

} // namespace pgeom::detail
