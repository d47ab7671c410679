#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace invforge {

/// Exact rational number. Values whose numerator and denominator fit in
/// 63 bits stay inline; anything larger is promoted to a shared GMP value.
class Rational {
public:
    Rational() noexcept = default;
    Rational(long long n) noexcept : n_(n), d_(1) // NOLINT: implicit by design of arithmetic
    {
        if (n == INT64_MIN) promote_from(static_cast<__int128>(n), 1);
    }
    Rational(long long n, long long d);
    explicit Rational(const mpq_class& q) { assign(q); }

    /// Accepts "a", "-a", "a/b".
    static Rational parse(std::string_view text);

    bool is_zero() const noexcept { return !big_ && n_ == 0; }
    bool is_one() const noexcept { return !big_ && n_ == 1 && d_ == 1; }
    bool is_integer() const;
    bool is_small() const noexcept { return !big_; }
    int sign() const;

    long long small_num() const noexcept { return n_; }
    long long small_den() const noexcept { return d_; }

    mpq_class to_mpq() const;
    mpz_class num() const;
    mpz_class den() const;
    double to_double() const;
    std::string str() const;

    Rational abs() const { return sign() < 0 ? -*this : *this; }
    Rational inverse() const;
    Rational pow(long long e) const;

    Rational operator-() const;
    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b) { return a * b.inverse(); }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b);
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    std::size_t hash() const;

private:
    void assign(const mpq_class& q);
    void promote_from(__int128 n, __int128 d);
    static Rational from_i128(__int128 n, __int128 d);

    long long n_ = 0;
    long long d_ = 1;
    std::shared_ptr<const mpq_class> big_;
};

/// Greatest common divisor of numerators over lcm of denominators; the
/// result is positive. Used to strip content from polynomials.
Rational rational_gcd(const Rational& a, const Rational& b);

} // namespace invforge
