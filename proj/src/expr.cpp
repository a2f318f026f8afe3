#include "pgeom/expr.hpp"

#include "pgeom/error.hpp"
#include "poly.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

namespace pgeom {

using detail::Mono;
using detail::mono_degree;
using detail::Poly;
using detail::RatFunc;

const char* func_name(FuncKind f) {
    switch (f) {
        case FuncKind::Sin: return "sin";
        case FuncKind::Cos: return "cos";
        case FuncKind::Exp: return "exp";
        case FuncKind::Log: return "log";
        case FuncKind::Sqrt: return "sqrt";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// construction

std::shared_ptr<const Node> Expression::zero_node() {
    static const std::shared_ptr<const Node> z = [] {
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::RationalConst;
        n->rat = Rational(0);
        return n;
    }();
    return z;
}

Expression Expression::rational(const Rational& r) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::RationalConst;
    n->rat = r;
    return Expression(std::move(n));
}

Expression Expression::floating(double v) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::FloatConst;
    n->fval = v;
    return Expression(std::move(n));
}

Expression Expression::symbol(const std::string& name) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Symbol;
    n->name = name;
    return Expression(std::move(n));
}

Expression Expression::sum(std::vector<Expression> kids) {
    if (kids.empty()) return Expression::integer(0);
    if (kids.size() == 1) return kids[0];
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Sum;
    n->kids = std::move(kids);
    return Expression(std::move(n));
}

Expression Expression::product(std::vector<Expression> kids) {
    if (kids.empty()) return Expression::integer(1);
    if (kids.size() == 1) return kids[0];
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Product;
    n->kids = std::move(kids);
    return Expression(std::move(n));
}

Expression Expression::power(Expression base, int exponent) {
    if (exponent == 1) return base;
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Power;
    n->kids = {std::move(base)};
    n->exponent = exponent;
    return Expression(std::move(n));
}

Expression Expression::quotient(Expression num, Expression den) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Quotient;
    n->kids = {std::move(num), std::move(den)};
    return Expression(std::move(n));
}

Expression Expression::apply(FuncKind f, Expression arg) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Func;
    n->kids = {std::move(arg)};
    n->func = f;
    return Expression(std::move(n));
}

bool Expression::same(const Expression& other) const {
    if (node_ == other.node_) return true;
    const Node& a = *node_;
    const Node& b = *other.node_;
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case NodeKind::RationalConst: return a.rat == b.rat;
        case NodeKind::FloatConst: return a.fval == b.fval;
        case NodeKind::Symbol: return a.name == b.name;
        case NodeKind::Power:
            if (a.exponent != b.exponent) return false;
            break;
        case NodeKind::Func:
            if (a.func != b.func) return false;
            break;
        default: break;
    }
    if (a.kids.size() != b.kids.size()) return false;
    for (size_t i = 0; i < a.kids.size(); ++i)
        if (!a.kids[i].same(b.kids[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// printing

namespace {

std::string float_repr(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    // keep a decimal marker so the token re-parses as a float
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

bool is_negative_leading(const Expression& e) {
    const Node& n = e.node();
    if (n.kind == NodeKind::RationalConst) return n.rat.negative();
    if (n.kind == NodeKind::FloatConst) return n.fval < 0;
    if ((n.kind == NodeKind::Product || n.kind == NodeKind::Quotient) && !n.kids.empty())
        return is_negative_leading(n.kids[0]);
    return false;
}

Expression negate_for_print(const Expression& e) {
    const Node& n = e.node();
    if (n.kind == NodeKind::RationalConst) return Expression::rational(-n.rat);
    if (n.kind == NodeKind::FloatConst) return Expression::floating(-n.fval);
    if (n.kind == NodeKind::Product) {
        std::vector<Expression> kids = n.kids;
        const Node& head = kids[0].node();
        if (head.kind == NodeKind::RationalConst) {
            Rational r = -head.rat;
            if (r.is_one()) {
                kids.erase(kids.begin());
                return Expression::product(std::move(kids));
            }
            kids[0] = Expression::rational(r);
            return Expression::product(std::move(kids));
        }
    }
    if (n.kind == NodeKind::Quotient)
        return Expression::quotient(negate_for_print(n.kids[0]), n.kids[1]);
    return Expression::product({Expression::integer(-1), e});
}

void print_node(std::ostringstream& os, const Expression& e);

// parenthesize when embedding in a product or the numerator slot
void print_tight(std::ostringstream& os, const Expression& e) {
    const Node& n = e.node();
    bool parens = n.kind == NodeKind::Sum ||
                  (n.kind == NodeKind::RationalConst && n.rat.negative()) ||
                  (n.kind == NodeKind::FloatConst && n.fval < 0);
    if (parens) os << "(";
    print_node(os, e);
    if (parens) os << ")";
}

// denominator or power-base position: single token or call only
void print_atomic(std::ostringstream& os, const Expression& e) {
    const Node& n = e.node();
    bool plain = n.kind == NodeKind::Symbol || n.kind == NodeKind::Func ||
                 (n.kind == NodeKind::RationalConst && n.rat.is_integer() &&
                  !n.rat.negative()) ||
                 (n.kind == NodeKind::FloatConst && n.fval >= 0);
    if (plain) {
        print_node(os, e);
    } else {
        os << "(";
        print_node(os, e);
        os << ")";
    }
}

void print_node(std::ostringstream& os, const Expression& e) {
    const Node& n = e.node();
    switch (n.kind) {
        case NodeKind::RationalConst:
            os << n.rat.str();
            break;
        case NodeKind::FloatConst:
            os << float_repr(n.fval);
            break;
        case NodeKind::Symbol:
            os << n.name;
            break;
        case NodeKind::Sum: {
            bool first = true;
            for (const auto& k : n.kids) {
                if (first) {
                    print_node(os, k);
                    first = false;
                } else if (is_negative_leading(k)) {
                    os << " - ";
                    print_tight(os, negate_for_print(k));
                } else {
                    os << " + ";
                    print_tight(os, k);
                }
            }
            break;
        }
        case NodeKind::Product: {
            size_t start = 0;
            if (n.kids.size() > 1 && n.kids[0].node().kind == NodeKind::RationalConst &&
                n.kids[0].node().rat == Rational(-1)) {
                os << "-"; // unary sign instead of -1*
                start = 1;
            }
            for (size_t idx = start; idx < n.kids.size(); ++idx) {
                const Expression& k = n.kids[idx];
                if (idx > start) os << "*";
                if (idx == 0 && (k.node().kind == NodeKind::RationalConst ||
                                 k.node().kind == NodeKind::FloatConst)) {
                    print_node(os, k); // leading coefficient may carry a sign
                } else {
                    print_tight(os, k);
                }
            }
            break;
        }
        case NodeKind::Power:
            print_atomic(os, n.kids[0]);
            os << "^" << n.exponent;
            break;
        case NodeKind::Quotient:
            print_tight(os, n.kids[0]);
            os << "/";
            print_atomic(os, n.kids[1]);
            break;
        case NodeKind::Func:
            os << func_name(n.func) << "(";
            print_node(os, n.kids[0]);
            os << ")";
            break;
    }
}

} // namespace

std::string Expression::str() const {
    std::ostringstream os;
    print_node(os, *this);
    return os.str();
}

const char* ZeroVerdict::kind_name() const {
    switch (kind) {
        case Kind::ProvedZero: return "proved_zero";
        case Kind::NumericZero: return "numeric_zero";
        case Kind::NonZero: return "nonzero";
    }
    return "?";
}

ZeroVerdict ZeroVerdict::merge(const ZeroVerdict& a, const ZeroVerdict& b) {
    ZeroVerdict out;
    out.assumptions = a.assumptions;
    out.assumptions.insert(out.assumptions.end(), b.assumptions.begin(),
                           b.assumptions.end());
    if (a.kind == Kind::NonZero || b.kind == Kind::NonZero) {
        const ZeroVerdict& w = a.kind == Kind::NonZero ? a : b;
        out.kind = Kind::NonZero;
        out.witness = w.witness;
        out.witness_value = w.witness_value;
        return out;
    }
    if (a.kind == Kind::NumericZero || b.kind == Kind::NumericZero) {
        out.kind = Kind::NumericZero;
        out.samples = a.kind == Kind::NumericZero && b.kind == Kind::NumericZero
                          ? std::min(a.samples, b.samples)
                          : std::max(a.samples, b.samples);
        out.max_abs = std::max(a.max_abs, b.max_abs);
        return out;
    }
    return out;
}

// ---------------------------------------------------------------------------
// parser

namespace {

struct Parser {
    const std::string& text;
    size_t pos = 0;
    const std::vector<std::string>& symbols;

    [[noreturn]] void error(const std::string& msg) const {
        fail(ErrorKind::Parse,
             msg + " at position " + std::to_string(pos));
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    Expression parse_expr() {
        skip_ws();
        bool neg = eat('-');
        Expression acc = parse_term();
        if (neg) acc = Expression::product({Expression::integer(-1), acc});
        while (true) {
            if (eat('+')) {
                acc = acc + parse_term();
            } else if (eat('-')) {
                acc = acc - parse_term();
            } else {
                return acc;
            }
        }
    }

    Expression parse_term() {
        Expression acc = parse_factor();
        while (true) {
            if (eat('*')) {
                acc = acc * parse_factor();
            } else if (eat('/')) {
                acc = Expression::quotient(acc, parse_factor());
            } else {
                return acc;
            }
        }
    }

    Expression parse_factor() {
        Expression base = parse_base();
        if (eat('^')) {
            skip_ws();
            bool neg = eat('-');
            size_t start = pos;
            long long v = 0;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                v = v * 10 + (text[pos] - '0');
                if (v > 1000000) error("exponent out of range");
                ++pos;
            }
            if (pos == start) error("exponent must be an integer literal");
            return Expression::power(base, static_cast<int>(neg ? -v : v));
        }
        return base;
    }

    Expression parse_base() {
        skip_ws();
        if (pos >= text.size()) error("unexpected end of input");
        char c = text[pos];
        if (c == '(') {
            ++pos;
            Expression e = parse_expr();
            if (!eat(')')) error("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
        error(std::string("unexpected character '") + c + "'");
    }

    Expression parse_number() {
        size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
            ++pos;
        bool is_float = false;
        if (pos < text.size() && text[pos] == '.') {
            is_float = true;
            ++pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                ++pos;
        }
        if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
            size_t mark = pos;
            ++pos;
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
            if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                is_float = true;
                while (pos < text.size() &&
                       std::isdigit(static_cast<unsigned char>(text[pos])))
                    ++pos;
            } else {
                pos = mark;
            }
        }
        std::string tok = text.substr(start, pos - start);
        if (is_float) return Expression::floating(std::strtod(tok.c_str(), nullptr));
        errno = 0;
        long long v = std::strtoll(tok.c_str(), nullptr, 10);
        if (errno == ERANGE) error("integer literal out of range");
        return Expression::integer(v);
    }

    Expression parse_ident() {
        size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string name = text.substr(start, pos - start);
        static const std::pair<const char*, FuncKind> funcs[] = {
            {"sin", FuncKind::Sin}, {"cos", FuncKind::Cos}, {"exp", FuncKind::Exp},
            {"log", FuncKind::Log}, {"sqrt", FuncKind::Sqrt}};
        for (const auto& [fn, fk] : funcs) {
            if (name == fn) {
                if (!eat('(')) error("expected '(' after function name");
                Expression arg = parse_expr();
                if (!eat(')')) error("expected ')'");
                return Expression::apply(fk, arg);
            }
        }
        if (std::find(symbols.begin(), symbols.end(), name) == symbols.end()) {
            pos = start;
            error("unknown identifier '" + name + "'");
        }
        return Expression::symbol(name);
    }
};

} // namespace

Expression parse(const std::string& text, const std::vector<std::string>& symbols) {
    Parser p{text, 0, symbols};
    Expression e = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.error("trailing input");
    return normalize(e);
}

// ---------------------------------------------------------------------------
// normalization

namespace {

struct Atom {
    int rank = 0;    // 0 symbol, 1 float, 2 function
    std::string key; // unique identity
    NodeKind kind = NodeKind::Symbol;
    std::string name;
    double fval = 0.0;
    FuncKind func = FuncKind::Sin;
    Expression arg; // normalized, for functions

    Expression to_expr() const {
        switch (kind) {
            case NodeKind::Symbol: return Expression::symbol(name);
            case NodeKind::FloatConst: return Expression::floating(fval);
            default: return Expression::apply(func, arg);
        }
    }
};

struct AtomTable {
    std::vector<Atom> atoms;
    std::map<std::string, int> index;

    int lookup(const std::string& key) const {
        auto it = index.find(key);
        return it == index.end() ? -1 : it->second;
    }
};

using ArgMemo = std::map<const Node*, Expression>;

Expression normalized_arg(const Expression& e, ArgMemo& memo) {
    auto it = memo.find(&e.node());
    if (it != memo.end()) return it->second;
    Expression n = normalize(e.node().kids[0]);
    memo.emplace(&e.node(), n);
    return n;
}

void collect_atoms(const Expression& e, std::vector<Atom>& out, ArgMemo& memo) {
    const Node& n = e.node();
    switch (n.kind) {
        case NodeKind::Symbol: {
            Atom a;
            a.rank = 0;
            a.key = n.name;
            a.kind = NodeKind::Symbol;
            a.name = n.name;
            out.push_back(std::move(a));
            return;
        }
        case NodeKind::FloatConst: {
            Atom a;
            a.rank = 1;
            a.key = "#" + float_repr(n.fval);
            a.kind = NodeKind::FloatConst;
            a.fval = n.fval;
            out.push_back(std::move(a));
            return;
        }
        case NodeKind::Func: {
            Expression arg = normalized_arg(e, memo);
            Atom a;
            a.rank = 2;
            a.key = std::string(func_name(n.func)) + "(" + arg.str() + ")";
            a.kind = NodeKind::Func;
            a.func = n.func;
            a.arg = arg;
            out.push_back(std::move(a));
            return;
        }
        case NodeKind::RationalConst:
            return;
        default:
            for (const auto& k : n.kids) collect_atoms(k, out, memo);
            return;
    }
}

RatFunc to_ratfunc(const Expression& e, const AtomTable& table, ArgMemo& memo,
                   std::vector<Poly>* cancelled) {
    const Node& n = e.node();
    const int nv = static_cast<int>(table.atoms.size());
    switch (n.kind) {
        case NodeKind::RationalConst:
            return RatFunc::from_poly(Poly::constant(nv, n.rat));
        case NodeKind::FloatConst:
            return RatFunc::from_poly(
                Poly::variable(nv, table.lookup("#" + float_repr(n.fval))));
        case NodeKind::Symbol:
            return RatFunc::from_poly(Poly::variable(nv, table.lookup(n.name)));
        case NodeKind::Func: {
            Expression arg = normalized_arg(e, memo);
            std::string key =
                std::string(func_name(n.func)) + "(" + arg.str() + ")";
            return RatFunc::from_poly(Poly::variable(nv, table.lookup(key)));
        }
        case NodeKind::Sum: {
            RatFunc acc = to_ratfunc(n.kids[0], table, memo, cancelled);
            for (size_t i = 1; i < n.kids.size(); ++i)
                acc = RatFunc::add(acc, to_ratfunc(n.kids[i], table, memo, cancelled),
                                   cancelled);
            return acc;
        }
        case NodeKind::Product: {
            RatFunc acc = to_ratfunc(n.kids[0], table, memo, cancelled);
            for (size_t i = 1; i < n.kids.size(); ++i)
                acc = RatFunc::mul(acc, to_ratfunc(n.kids[i], table, memo, cancelled),
                                   cancelled);
            return acc;
        }
        case NodeKind::Power:
            return RatFunc::pow(to_ratfunc(n.kids[0], table, memo, cancelled),
                                n.exponent, cancelled);
        case NodeKind::Quotient:
            return RatFunc::div(to_ratfunc(n.kids[0], table, memo, cancelled),
                                to_ratfunc(n.kids[1], table, memo, cancelled),
                                cancelled);
    }
    fail(ErrorKind::Validation, "unreachable expression kind");
}

Expression poly_to_expr(const Poly& p, const AtomTable& table) {
    if (p.is_zero()) return Expression::integer(0);
    std::vector<Expression> terms;
    for (auto it = p.terms.rbegin(); it != p.terms.rend(); ++it) {
        const Mono& m = it->first;
        const Rational& c = it->second;
        std::vector<Expression> factors;
        if (!c.is_one() || mono_degree(m) == 0)
            factors.push_back(Expression::rational(c));
        for (size_t v = 0; v < m.size(); ++v) {
            if (m[v] == 0) continue;
            Expression a = table.atoms[v].to_expr();
            factors.push_back(m[v] == 1 ? a : Expression::power(a, m[v]));
        }
        terms.push_back(Expression::product(std::move(factors)));
    }
    return Expression::sum(std::move(terms));
}

std::string poly_to_string(const Poly& p, const AtomTable& table) {
    return poly_to_expr(p, table).str();
}

} // namespace

NormalizeResult normalize_full(const Expression& e) {
    ArgMemo memo;
    std::vector<Atom> raw;
    collect_atoms(e, raw, memo);
    std::sort(raw.begin(), raw.end(), [](const Atom& a, const Atom& b) {
        if (a.rank != b.rank) return a.rank < b.rank;
        return a.key < b.key;
    });
    AtomTable table;
    for (auto& a : raw) {
        if (table.index.count(a.key)) continue;
        table.index.emplace(a.key, static_cast<int>(table.atoms.size()));
        table.atoms.push_back(std::move(a));
    }

    std::vector<Poly> cancelled;
    RatFunc rf = to_ratfunc(e, table, memo, &cancelled);

    NormalizeResult out;
    Expression num = poly_to_expr(rf.num, table);
    if (rf.den.is_constant() && rf.den.constant_value().is_one()) {
        out.expr = num;
    } else {
        out.expr = Expression::quotient(num, poly_to_expr(rf.den, table));
    }
    std::set<std::string> seen;
    for (const auto& g : cancelled) {
        if (g.is_constant()) continue;
        std::string s = poly_to_string(g, table);
        if (seen.insert(s).second)
            out.nonzero_assumptions.push_back(s + " != 0");
    }
    return out;
}

Expression normalize(const Expression& e) { return normalize_full(e).expr; }

// ---------------------------------------------------------------------------
// calculus and evaluation

Expression differentiate(const Expression& e, const std::string& sym) {
    const Node& n = e.node();
    switch (n.kind) {
        case NodeKind::RationalConst:
        case NodeKind::FloatConst:
            return Expression::integer(0);
        case NodeKind::Symbol:
            return Expression::integer(n.name == sym ? 1 : 0);
        case NodeKind::Sum: {
            std::vector<Expression> kids;
            kids.reserve(n.kids.size());
            for (const auto& k : n.kids) kids.push_back(differentiate(k, sym));
            return normalize(Expression::sum(std::move(kids)));
        }
        case NodeKind::Product: {
            std::vector<Expression> terms;
            for (size_t i = 0; i < n.kids.size(); ++i) {
                std::vector<Expression> factors = n.kids;
                factors[i] = differentiate(n.kids[i], sym);
                terms.push_back(Expression::product(std::move(factors)));
            }
            return normalize(Expression::sum(std::move(terms)));
        }
        case NodeKind::Power: {
            // d(b^k) = k b^(k-1) b'
            Expression d = differentiate(n.kids[0], sym);
            return normalize(Expression::product(
                {Expression::integer(n.exponent),
                 Expression::power(n.kids[0], n.exponent - 1), d}));
        }
        case NodeKind::Quotient: {
            const Expression& u = n.kids[0];
            const Expression& v = n.kids[1];
            Expression du = differentiate(u, sym);
            Expression dv = differentiate(v, sym);
            return normalize(Expression::quotient(
                du * v - u * dv, Expression::power(v, 2)));
        }
        case NodeKind::Func: {
            const Expression& u = n.kids[0];
            Expression du = differentiate(u, sym);
            Expression outer;
            switch (n.func) {
                case FuncKind::Sin:
                    outer = Expression::apply(FuncKind::Cos, u);
                    break;
                case FuncKind::Cos:
                    outer = -Expression::apply(FuncKind::Sin, u);
                    break;
                case FuncKind::Exp:
                    outer = Expression::apply(FuncKind::Exp, u);
                    break;
                case FuncKind::Log:
                    outer = Expression::quotient(Expression::integer(1), u);
                    break;
                case FuncKind::Sqrt:
                    outer = Expression::quotient(
                        Expression::integer(1),
                        Expression::integer(2) * Expression::apply(FuncKind::Sqrt, u));
                    break;
            }
            return normalize(outer * du);
        }
    }
    fail(ErrorKind::Validation, "unreachable expression kind");
}

Expression substitute(const Expression& e, const std::map<std::string, Expression>& repl) {
    const Node& n = e.node();
    switch (n.kind) {
        case NodeKind::RationalConst:
        case NodeKind::FloatConst:
            return e;
        case NodeKind::Symbol: {
            auto it = repl.find(n.name);
            return it == repl.end() ? e : it->second;
        }
        default: {
            std::vector<Expression> kids;
            kids.reserve(n.kids.size());
            for (const auto& k : n.kids) kids.push_back(substitute(k, repl));
            switch (n.kind) {
                case NodeKind::Sum: return Expression::sum(std::move(kids));
                case NodeKind::Product: return Expression::product(std::move(kids));
                case NodeKind::Power:
                    return Expression::power(std::move(kids[0]), n.exponent);
                case NodeKind::Quotient:
                    return Expression::quotient(std::move(kids[0]), std::move(kids[1]));
                case NodeKind::Func:
                    return Expression::apply(n.func, std::move(kids[0]));
                default: break;
            }
        }
    }
    fail(ErrorKind::Validation, "unreachable expression kind");
}

namespace {

double ipow(double b, int k) {
    if (k < 0) return 1.0 / ipow(b, -k);
    double r = 1.0;
    while (k > 0) {
        if (k & 1) r *= b;
        b *= b;
        k >>= 1;
    }
    return r;
}

} // namespace

double evaluate(const Expression& e, const std::map<std::string, double>& point) {
    const Node& n = e.node();
    switch (n.kind) {
        case NodeKind::RationalConst: return n.rat.to_double();
        case NodeKind::FloatConst: return n.fval;
        case NodeKind::Symbol: {
            auto it = point.find(n.name);
            if (it == point.end())
                fail(ErrorKind::Parse, "unbound symbol '" + n.name + "'");
            return it->second;
        }
        case NodeKind::Sum: {
            double s = 0;
            for (const auto& k : n.kids) s += evaluate(k, point);
            return s;
        }
        case NodeKind::Product: {
            double p = 1;
            for (const auto& k : n.kids) p *= evaluate(k, point);
            return p;
        }
        case NodeKind::Power: {
            double b = evaluate(n.kids[0], point);
            if (n.exponent < 0 && b == 0.0)
                fail(ErrorKind::Domain, "zero base with negative exponent in " + e.str());
            return ipow(b, n.exponent);
        }
        case NodeKind::Quotient: {
            double num = evaluate(n.kids[0], point);
            double den = evaluate(n.kids[1], point);
            if (den == 0.0)
                fail(ErrorKind::Domain, "division by zero in " + e.str());
            return num / den;
        }
        case NodeKind::Func: {
            double a = evaluate(n.kids[0], point);
            switch (n.func) {
                case FuncKind::Sin: return std::sin(a);
                case FuncKind::Cos: return std::cos(a);
                case FuncKind::Exp: return std::exp(a);
                case FuncKind::Log:
                    if (a <= 0.0)
                        fail(ErrorKind::Domain, "log of non-positive in " + e.str());
                    return std::log(a);
                case FuncKind::Sqrt:
                    if (a < 0.0)
                        fail(ErrorKind::Domain, "sqrt of negative in " + e.str());
                    return std::sqrt(a);
            }
            break;
        }
    }
    fail(ErrorKind::Validation, "unreachable expression kind");
}

std::optional<double> try_evaluate(const Expression& e,
                                   const std::map<std::string, double>& point,
                                   double min_den) {
    const Node& n = e.node();
    switch (n.kind) {
        case NodeKind::RationalConst: return n.rat.to_double();
        case NodeKind::FloatConst: return n.fval;
        case NodeKind::Symbol: {
            auto it = point.find(n.name);
            if (it == point.end()) return std::nullopt;
            return it->second;
        }
        case NodeKind::Sum: {
            double s = 0;
            for (const auto& k : n.kids) {
                auto v = try_evaluate(k, point, min_den);
                if (!v) return std::nullopt;
                s += *v;
            }
            return s;
        }
        case NodeKind::Product: {
            double p = 1;
            for (const auto& k : n.kids) {
                auto v = try_evaluate(k, point, min_den);
                if (!v) return std::nullopt;
                p *= *v;
            }
            return p;
        }
        case NodeKind::Power: {
            auto b = try_evaluate(n.kids[0], point, min_den);
            if (!b) return std::nullopt;
            if (n.exponent < 0 && std::abs(*b) <= min_den) return std::nullopt;
            return ipow(*b, n.exponent);
        }
        case NodeKind::Quotient: {
            auto num = try_evaluate(n.kids[0], point, min_den);
            auto den = try_evaluate(n.kids[1], point, min_den);
            if (!num || !den || std::abs(*den) <= min_den) return std::nullopt;
            return *num / *den;
        }
        case NodeKind::Func: {
            auto a = try_evaluate(n.kids[0], point, min_den);
            if (!a) return std::nullopt;
            switch (n.func) {
                case FuncKind::Sin: return std::sin(*a);
                case FuncKind::Cos: return std::cos(*a);
                case FuncKind::Exp: {
                    double v = std::exp(*a);
                    if (!std::isfinite(v)) return std::nullopt;
                    return v;
                }
                case FuncKind::Log:
                    if (*a <= min_den) return std::nullopt;
                    return std::log(*a);
                case FuncKind::Sqrt:
                    if (*a < 0.0) return std::nullopt;
                    return std::sqrt(*a);
            }
            break;
        }
    }
    return std::nullopt;
}

namespace {

void collect_symbols(const Expression& e, std::set<std::string>& out) {
    const Node& n = e.node();
    if (n.kind == NodeKind::Symbol) {
        out.insert(n.name);
        return;
    }
    for (const auto& k : n.kids) collect_symbols(k, out);
}

} // namespace

std::set<std::string> free_symbols(const Expression& e) {
    std::set<std::string> out;
    collect_symbols(e, out);
    return out;
}

bool is_rational_form(const Expression& e) {
    const Node& n = e.node();
    if (n.kind == NodeKind::FloatConst || n.kind == NodeKind::Func) return false;
    for (const auto& k : n.kids)
        if (!is_rational_form(k)) return false;
    return true;
}

bool is_polynomial_in(const Expression& e, const std::vector<std::string>& vars) {
    Expression c = normalize(e);
    const Node& n = c.node();
    auto touches_var = [&](const Expression& sub) {
        auto syms = free_symbols(sub);
        for (const auto& v : vars)
            if (syms.count(v)) return true;
        return false;
    };
    if (n.kind == NodeKind::Quotient && touches_var(n.kids[1])) return false;
    // the numerator side: every var occurrence must be a plain symbol factor,
    // i.e. not buried inside a function atom
    std::function<bool(const Expression&)> ok = [&](const Expression& sub) -> bool {
        const Node& m = sub.node();
        if (m.kind == NodeKind::Func) return !touches_var(sub);
        for (const auto& k : m.kids)
            if (!ok(k)) return false;
        return true;
    };
    return ok(c);
}

std::vector<std::pair<Expression, std::map<std::string, int>>>
collect_monomials(const Expression& e, const std::vector<std::string>& vars) {
    Expression c = normalize(e);
    if (!is_polynomial_in(c, vars))
        fail(ErrorKind::NonPolynomialEntry,
             "expression is not polynomial in the chart coordinates: " + c.str());
    const Node* n = &c.node();
    Expression den = Expression::integer(1);
    if (n->kind == NodeKind::Quotient) {
        den = n->kids[1];
        Expression num = n->kids[0];
        c = num;
        n = &c.node();
    }
    std::vector<Expression> terms;
    if (n->kind == NodeKind::Sum)
        terms = n->kids;
    else
        terms = {c};

    std::map<std::map<std::string, int>, std::vector<Expression>> buckets;
    for (const auto& t : terms) {
        std::map<std::string, int> powers;
        std::vector<Expression> coeff_factors;
        const Node& tn = t.node();
        std::vector<Expression> factors =
            tn.kind == NodeKind::Product ? tn.kids : std::vector<Expression>{t};
        for (const auto& f : factors) {
            const Node& fn = f.node();
            std::string name;
            int exp = 1;
            if (fn.kind == NodeKind::Symbol) {
                name = fn.name;
            } else if (fn.kind == NodeKind::Power &&
                       fn.kids[0].node().kind == NodeKind::Symbol) {
                name = fn.kids[0].node().name;
                exp = fn.exponent;
            }
            if (!name.empty() &&
                std::find(vars.begin(), vars.end(), name) != vars.end()) {
                powers[name] += exp;
            } else {
                coeff_factors.push_back(f);
            }
        }
        buckets[powers].push_back(Expression::product(std::move(coeff_factors)));
    }
    std::vector<std::pair<Expression, std::map<std::string, int>>> out;
    for (auto& [powers, coeffs] : buckets) {
        Expression coeff = normalize(Expression::quotient(
            Expression::sum(std::move(coeffs)), den));
        if (!coeff.is_literal_zero()) out.emplace_back(coeff, powers);
    }
    return out;
}

// ---------------------------------------------------------------------------
// zero testing

std::uint64_t Sampler::next_u64() {
    state_ += 0x9E3779B97f4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Sampler::uniform(double lo, double hi) {
    double frac = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + frac * (hi - lo);
}

ZeroVerdict is_zero(const Expression& e, const ZeroTestOptions& opt) {
    if (opt.tol <= 0 || opt.samples < 1)
        fail(ErrorKind::Validation, "is_zero requires tol > 0 and samples >= 1");
    NormalizeResult nr = normalize_full(e);
    ZeroVerdict out;
    out.assumptions = nr.nonzero_assumptions;
    if (nr.expr.is_literal_zero()) {
        out.kind = ZeroVerdict::Kind::ProvedZero;
        return out;
    }

    std::set<std::string> syms = free_symbols(nr.expr);
    std::vector<std::string> vars(syms.begin(), syms.end());
    Sampler rng(opt.seed);
    int accepted = 0;
    double max_abs = 0.0;
    const int max_attempts = vars.empty() ? 1 : 10 * opt.samples;
    const int wanted = vars.empty() ? 1 : opt.samples;
    for (int attempt = 0; attempt < max_attempts && accepted < wanted; ++attempt) {
        std::map<std::string, double> point;
        for (const auto& v : vars) point[v] = rng.uniform(-opt.box, opt.box);
        auto val = try_evaluate(nr.expr, point, opt.min_den);
        if (!val || !std::isfinite(*val)) continue;
        ++accepted;
        if (std::abs(*val) > opt.tol) {
            out.kind = ZeroVerdict::Kind::NonZero;
            out.witness = point;
            out.witness_value = *val;
            return out;
        }
        max_abs = std::max(max_abs, std::abs(*val));
    }
    if (accepted == 0)
        fail(ErrorKind::Undecidable,
             "zero test undecidable: all sample points rejected for " + nr.expr.str());
    out.kind = ZeroVerdict::Kind::NumericZero;
    out.samples = accepted;
    out.max_abs = max_abs;
    return out;
}

// ---------------------------------------------------------------------------
// compiled evaluation

CompiledExpr::CompiledExpr(const Expression& e, const std::vector<std::string>& slots) {
    std::map<std::string, int> slot_of;
    for (size_t i = 0; i < slots.size(); ++i)
        slot_of[slots[i]] = static_cast<int>(i);
    root_ = build(e, slot_of);
}

int CompiledExpr::build(const Expression& e, const std::map<std::string, int>& slot_of) {
    const Node& n = e.node();
    CNode c;
    c.kind = n.kind;
    switch (n.kind) {
        case NodeKind::RationalConst:
            c.value = n.rat.to_double();
            break;
        case NodeKind::FloatConst:
            c.value = n.fval;
            break;
        case NodeKind::Symbol: {
            auto it = slot_of.find(n.name);
            if (it == slot_of.end())
                fail(ErrorKind::Parse, "unbound symbol '" + n.name + "'");
            c.slot = it->second;
            break;
        }
        case NodeKind::Power:
            c.exponent = n.exponent;
            break;
        case NodeKind::Func:
            c.func = n.func;
            break;
        default:
            break;
    }
    std::vector<int> kid_ids;
    kid_ids.reserve(n.kids.size());
    for (const auto& k : n.kids) kid_ids.push_back(build(k, slot_of));
    c.first = static_cast<int>(kid_index_.size());
    c.count = static_cast<int>(kid_ids.size());
    kid_index_.insert(kid_index_.end(), kid_ids.begin(), kid_ids.end());
    nodes_.push_back(c);
    return static_cast<int>(nodes_.size()) - 1;
}

double CompiledExpr::eval_node(int idx, const double* slots) const {
    const CNode& c = nodes_[idx];
    switch (c.kind) {
        case NodeKind::RationalConst:
        case NodeKind::FloatConst:
            return c.value;
        case NodeKind::Symbol:
            return slots[c.slot];
        case NodeKind::Sum: {
            double s = 0;
            for (int i = 0; i < c.count; ++i)
                s += eval_node(kid_index_[c.first + i], slots);
            return s;
        }
        case NodeKind::Product: {
            double p = 1;
            for (int i = 0; i < c.count; ++i)
                p *= eval_node(kid_index_[c.first + i], slots);
            return p;
        }
        case NodeKind::Power: {
            double b = eval_node(kid_index_[c.first], slots);
            if (c.exponent < 0 && b == 0.0)
                fail(ErrorKind::Domain, "zero base with negative exponent");
            return ipow(b, c.exponent);
        }
        case NodeKind::Quotient: {
            double num = eval_node(kid_index_[c.first], slots);
            double den = eval_node(kid_index_[c.first + 1], slots);
            if (den == 0.0) fail(ErrorKind::Domain, "division by zero");
            return num / den;
        }
        case NodeKind::Func: {
            double a = eval_node(kid_index_[c.first], slots);
            switch (c.func) {
                case FuncKind::Sin: return std::sin(a);
                case FuncKind::Cos: return std::cos(a);
                case FuncKind::Exp: return std::exp(a);
                case FuncKind::Log:
                    if (a <= 0.0) fail(ErrorKind::Domain, "log of non-positive");
                    return std::log(a);
                case FuncKind::Sqrt:
                    if (a < 0.0) fail(ErrorKind::Domain, "sqrt of negative");
                    return std::sqrt(a);
            }
            break;
        }
    }
    fail(ErrorKind::Validation, "unreachable compiled node");
}

double CompiledExpr::eval(const double* slots) const {
    if (root_ < 0) fail(ErrorKind::Validation, "empty compiled expression");
    return eval_node(root_, slots);
}

} // namespace pgeom
