#pragma once

#include "invforge/rational.hpp"
#include "invforge/symbol.hpp"

#include <boost/container/small_vector.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace invforge {

/// Power product of symbols. Each entry packs `key << 16 | exponent`,
/// entries sorted by key, exponents positive.
class Monomial {
public:
    using Storage = boost::container::small_vector<std::uint64_t, 4>;
    static constexpr std::uint32_t kMaxExponent = 0xFFFF;

    Monomial() = default;
    explicit Monomial(Symbol s, std::uint32_t e = 1);

    bool is_one() const { return data_.empty(); }
    std::size_t size() const { return data_.size(); }
    Symbol symbol(std::size_t n) const { return Symbol::from_key(data_[n] >> 16); }
    std::uint32_t exponent(std::size_t n) const { return static_cast<std::uint32_t>(data_[n] & 0xFFFF); }
    std::uint32_t exponent_of(Symbol s) const;
    std::uint32_t total_degree() const;

    Monomial operator*(const Monomial& o) const;
    /// Quotient if `o` divides this monomial.
    std::optional<Monomial> divide(const Monomial& o) const;
    bool divisible_by(const Monomial& o) const;
    /// This monomial with the exponent of `s` lowered by one (s must occur).
    Monomial reduce_one(Symbol s) const;
    Monomial without(Symbol s) const;
    Monomial gcd(const Monomial& o) const;

    /// Lex order with the highest symbol most significant.
    static int compare(const Monomial& a, const Monomial& b);
    friend bool operator==(const Monomial& a, const Monomial& b) { return a.data_ == b.data_; }

    std::size_t hash() const;
    const Storage& raw() const { return data_; }

private:
    Storage data_;
};

struct MonomialHash {
    std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

struct Term {
    Monomial mono;
    Rational coeff;
};

/// Sparse multivariate polynomial with exact rational coefficients. Terms
/// are kept sorted with the leading (largest) monomial first.
class Poly {
public:
    Poly() = default;
    static Poly constant(const Rational& c);
    static Poly variable(Symbol s);
    static Poly term(const Monomial& m, const Rational& c);
    /// Builds from arbitrary terms: sorts, merges duplicates, drops zeros.
    static Poly from_terms(std::vector<Term> terms);

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one()); }
    Rational constant_value() const;
    /// Constant term (coefficient of the empty monomial).
    Rational constant_term() const;
    std::size_t size() const { return terms_.size(); }
    const std::vector<Term>& terms() const { return terms_; }
    const Term& leading() const { return terms_.front(); }

    Poly operator-() const;
    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly scaled(const Rational& c) const;
    Poly times(const Monomial& m, const Rational& c) const;
    Poly pow(unsigned e) const;

    /// Quotient if `d` divides this polynomial exactly.
    std::optional<Poly> divide_exact(const Poly& d) const;
    /// Quotient by a monomial that divides every term.
    Poly divide_monomial(const Monomial& m) const;

    Poly derivative(Symbol s) const;
    std::uint32_t degree(Symbol s) const;
    std::uint32_t total_degree() const;
    bool contains(Symbol s) const;
    std::vector<Symbol> symbols() const;
    Monomial monomial_gcd() const;

    /// Positive rational content: gcd of numerators over lcm of denominators.
    Rational content() const;
    /// Returns (c, p) with *this == c * p, p having coprime integer
    /// coefficients and a positive leading coefficient.
    std::pair<Rational, Poly> primitive() const;

    double eval(const std::function<double(Symbol)>& value) const;
    /// Evaluation modulo the Mersenne prime 2^61 - 1.
    std::uint64_t eval_mod(const std::function<std::uint64_t(Symbol)>& value) const;

    static int compare(const Poly& a, const Poly& b);
    friend bool operator==(const Poly& a, const Poly& b);
    std::size_t hash() const;

private:
    std::vector<Term> terms_;
};

namespace modp {
constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;
std::uint64_t mul(std::uint64_t a, std::uint64_t b);
std::uint64_t add(std::uint64_t a, std::uint64_t b);
std::uint64_t sub(std::uint64_t a, std::uint64_t b);
std::uint64_t pow(std::uint64_t a, std::uint64_t e);
std::uint64_t inv(std::uint64_t a);
/// Residue of a rational; nullopt if the denominator vanishes mod p.
std::optional<std::uint64_t> of(const Rational& r);
} // namespace modp

} // namespace invforge
