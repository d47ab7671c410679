#pragma once

#include "invforge/poly.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace invforge {

/// Irreducibility-agnostic denominator factor: a primitive polynomial with
/// positive leading coefficient raised to a positive power.
struct Factor {
    Poly poly;
    std::uint32_t exp = 1;
};

enum class AtomKind : std::uint8_t { Exp, Log, Sin, Cos, Pow };

/// Immutable exact expression in normal form: an expanded numerator over a
/// product of polynomial factors. Elementary-function applications are
/// interned atoms that behave as extra indeterminates.
///
/// Normalization guarantees that no denominator factor divides the
/// numerator and that the numerator carries the rational content, so two
/// constructions of the same rational function agree whenever the
/// denominators factor the same way.
class Expr {
public:
    Expr();
    Expr(long long n);             // NOLINT: numeric literals in formulas
    Expr(const Rational& r);       // NOLINT
    Expr(Symbol s);                // NOLINT
    explicit Expr(Poly p);

    /// num / (prod den) with full normalization.
    static Expr fraction(Poly num, std::vector<Factor> den);

    const Poly& numerator() const;
    const std::vector<Factor>& denominator() const;
    /// Expanded denominator (1 for polynomials).
    Poly denominator_poly() const;

    bool is_zero() const;
    bool is_polynomial() const { return denominator().empty(); }
    std::optional<Rational> as_rational() const;
    std::optional<Symbol> as_symbol() const;

    /// Symbols occurring directly (atoms included as symbols).
    std::vector<Symbol> symbols() const;
    /// Free symbols, looking through atoms; atom symbols are not included.
    std::set<Symbol> free_symbols() const;
    bool has_atoms() const;
    bool depends_on(Symbol s) const;

    Expr operator-() const;
    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    Expr& operator+=(const Expr& o) { return *this = *this + o; }
    Expr& operator-=(const Expr& o) { return *this = *this - o; }
    Expr& operator*=(const Expr& o) { return *this = *this * o; }
    Expr& operator/=(const Expr& o) { return *this = *this / o; }
    Expr pow(long long e) const;

    /// Structural equality of normal forms.
    friend bool operator==(const Expr& a, const Expr& b);
    std::size_t hash() const;

    /// Plain rendering, e.g. "2*f - 2*v*f_v + v^2*f_vv".
    std::string str() const;

private:
    struct Rep;
    explicit Expr(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
    static Expr make(Poly num, std::vector<Factor> den, bool trusted);

    std::shared_ptr<const Rep> rep_;

    friend Expr make_atom(AtomKind kind, const Expr& arg, const Rational& exponent);
};

Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
/// e^r for rational r; integer r reduces to Expr::pow.
Expr pow(const Expr& e, const Rational& r);

struct AtomInfo {
    AtomKind kind;
    Expr arg;
    Rational exponent; ///< Pow only; lies strictly between 0 and 1
};
/// Atom data for a symbol of kind Atom.
AtomInfo atom_info(Symbol atom);

using Bindings = std::unordered_map<Symbol, Expr>;
using DerivationRule = std::function<Expr(Symbol)>;

/// Partial derivative with respect to `s`.
Expr differentiate(const Expr& e, Symbol s);
/// Applies the derivation that sends each (non-atom) symbol s to rule(s).
/// Atoms are differentiated through the chain rule.
Expr derive(const Expr& e, const DerivationRule& rule);
/// Simultaneous substitution; throws CyclicSubstitution when a bound symbol
/// occurs in any replacement.
Expr substitute(const Expr& e, const Bindings& bindings);

/// Exact identity check by cross-multiplication. Throws UnsupportedForm
/// when the difference is nonzero only modulo transcendental identities,
/// i.e. still contains function atoms.
bool canonical_equal(const Expr& a, const Expr& b);

struct ProbabilisticVerdict {
    bool equal = false;
    int points = 0;
    /// Upper bound on the probability that unequal inputs were reported
    /// equal. Schwartz-Zippel for rational inputs; 0 marks a floating
    /// comparison, which has no rigorous bound.
    double false_positive_bound = 0;
    bool exact_arithmetic = true;
};

/// Randomized identity check at `points` >= 20 sample points.
ProbabilisticVerdict probabilistic_equal(const Expr& a, const Expr& b, int points = 20, std::uint64_t seed = 1,
                                         double tolerance = 1e-9);

using NumericPoint = std::unordered_map<Symbol, double>;
double eval_numeric(const Expr& e, const NumericPoint& point);

/// Expanded numerator/denominator with coprime integer coefficients and a
/// positive leading denominator coefficient.
struct RationalNormalForm {
    Poly numerator;
    Poly denominator;
    std::string str() const;
    friend bool operator==(const RationalNormalForm&, const RationalNormalForm&) = default;
};
RationalNormalForm normal_form(const Expr& e);

/// Rendering of a polynomial in ascending term order.
std::string poly_str(const Poly& p);

} // namespace invforge

template <>
struct std::hash<invforge::Expr> {
    std::size_t operator()(const invforge::Expr& e) const { return e.hash(); }
};
