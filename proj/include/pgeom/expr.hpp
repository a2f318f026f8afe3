#ifndef PGEOM_EXPR_HPP
#define PGEOM_EXPR_HPP

#include "pgeom/rational.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pgeom {

enum class FuncKind { Sin, Cos, Exp, Log, Sqrt };

const char* func_name(FuncKind f);

enum class NodeKind {
    RationalConst,
    FloatConst,
    Symbol,
    Sum,      // n >= 2 children
    Product,  // n >= 2 children
    Power,    // integer exponent
    Quotient, // children: numerator, denominator
    Func      // one child
};

class Expression;

struct Node {
    NodeKind kind;
    Rational rat;                  // RationalConst
    double fval = 0.0;             // FloatConst
    std::string name;              // Symbol
    std::vector<Expression> kids;  // Sum/Product/Quotient/Func/Power
    int exponent = 0;              // Power
    FuncKind func = FuncKind::Sin; // Func
};

/// Immutable symbolic scalar over named symbols. Shared, cheap to copy,
/// safe to use from several threads once built.
class Expression {
public:
    Expression() : node_(zero_node()) {}

    static Expression rational(const Rational& r);
    static Expression integer(long long n) { return rational(Rational(n)); }
    static Expression floating(double v);
    static Expression symbol(const std::string& name);
    static Expression sum(std::vector<Expression> kids);
    static Expression product(std::vector<Expression> kids);
    static Expression power(Expression base, int exponent);
    static Expression quotient(Expression num, Expression den);
    static Expression apply(FuncKind f, Expression arg);

    const Node& node() const { return *node_; }
    NodeKind kind() const { return node_->kind; }

    bool is_rational_const() const { return node_->kind == NodeKind::RationalConst; }
    bool is_literal_zero() const {
        return is_rational_const() && node_->rat.is_zero();
    }
    bool is_literal_one() const {
        return is_rational_const() && node_->rat.is_one();
    }

    /// Structural equality.
    bool same(const Expression& other) const;

    /// Deterministic text form; canonical expressions re-parse to themselves.
    std::string str() const;

    friend Expression operator+(const Expression& a, const Expression& b) {
        return Expression::sum({a, b});
    }
    friend Expression operator-(const Expression& a, const Expression& b) {
        return Expression::sum({a, Expression::product({Expression::integer(-1), b})});
    }
    friend Expression operator*(const Expression& a, const Expression& b) {
        return Expression::product({a, b});
    }
    friend Expression operator/(const Expression& a, const Expression& b) {
        return Expression::quotient(a, b);
    }
    Expression operator-() const {
        return Expression::product({Expression::integer(-1), *this});
    }

private:
    explicit Expression(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static std::shared_ptr<const Node> zero_node();

    std::shared_ptr<const Node> node_;
};

/// Parses `text` against the declared symbol set. The result is normalized,
/// so parse(print(e)) reproduces normalize(e) exactly.
Expression parse(const std::string& text, const std::vector<std::string>& symbols);

struct NormalizeResult {
    Expression expr;
    // Non-constant factors cancelled between numerator and denominator;
    // the simplification assumes each is nonzero.
    std::vector<std::string> nonzero_assumptions;
};

Expression normalize(const Expression& e);
NormalizeResult normalize_full(const Expression& e);

Expression differentiate(const Expression& e, const std::string& sym);

Expression substitute(const Expression& e, const std::map<std::string, Expression>& repl);

/// Evaluates at a point; throws Error(Domain) naming the offending
/// sub-expression, Error(Parse) for unbound symbols.
double evaluate(const Expression& e, const std::map<std::string, double>& point);

/// Evaluation that instead of throwing reports failure (domain violation or
/// any |denominator| <= min_den) as nullopt. Used by the sampling zero test.
std::optional<double> try_evaluate(const Expression& e,
                                   const std::map<std::string, double>& point,
                                   double min_den);

std::set<std::string> free_symbols(const Expression& e);

/// True when e is built from rationals, symbols, +, -, *, /, integer powers
/// only (the subclass with an exact zero decision).
bool is_rational_form(const Expression& e);

/// True when normalize(e) is a polynomial in `vars`: unit denominator and
/// every occurrence of a var is a plain symbol factor.
bool is_polynomial_in(const Expression& e, const std::vector<std::string>& vars);

/// Monomial decomposition of a polynomial-in-vars expression: list of
/// (coefficient expression free of vars, var -> exponent).
std::vector<std::pair<Expression, std::map<std::string, int>>>
collect_monomials(const Expression& e, const std::vector<std::string>& vars);

struct ZeroVerdict {
    enum class Kind { ProvedZero, NumericZero, NonZero };
    Kind kind = Kind::ProvedZero;
    int samples = 0;      // numeric tier: accepted sample count
    double max_abs = 0.0; // numeric tier: max |value| seen
    std::map<std::string, double> witness;
    double witness_value = 0.0;
    std::vector<std::string> assumptions;

    bool zero() const { return kind != Kind::NonZero; }
    bool exact() const { return kind == Kind::ProvedZero; }
    const char* tier() const {
        return kind == Kind::ProvedZero ? "exact" : "numeric";
    }
    const char* kind_name() const;

    static ZeroVerdict proved() { return ZeroVerdict{}; }
    /// Combines componentwise verdicts: any NonZero wins, else the weakest
    /// numeric evidence is kept.
    static ZeroVerdict merge(const ZeroVerdict& a, const ZeroVerdict& b);
};

struct ZeroTestOptions {
    double tol = 1e-9;
    int samples = 50;
    std::uint64_t seed = 0;
    double box = 2.0;       // sample cube [-box, box]^n
    double min_den = 1e-8;  // reject points this close to a pole
};

/// Two-tier zero test: exact when the canonical numerator polynomial
/// vanishes, numeric sampling otherwise. Deterministic for a fixed seed.
ZeroVerdict is_zero(const Expression& e, const ZeroTestOptions& opt = {});

/// Expression compiled against a fixed symbol layout for tight loops.
class CompiledExpr {
public:
    CompiledExpr() = default;
    CompiledExpr(const Expression& e, const std::vector<std::string>& slots);

    /// slots must hold one value per name given at construction.
    double eval(const double* slots) const;

private:
    struct CNode {
        NodeKind kind;
        double value = 0.0;
        int slot = -1;
        int first = 0, count = 0; // children range in kid_index_
        int exponent = 0;
        FuncKind func = FuncKind::Sin;
    };
    double eval_node(int idx, const double* slots) const;
    int build(const Expression& e, const std::map<std::string, int>& slot_of);

    std::vector<CNode> nodes_;
    std::vector<int> kid_index_;
    int root_ = -1;
};

/// Deterministic generator behind every sampling check (splitmix64).
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64();
    double uniform(double lo, double hi);

private:
    std::uint64_t state_;
};

} // namespace pgeom

#endif
