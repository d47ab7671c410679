#include "invforge/rational.hpp"

#include <functional>

namespace invforge {

namespace {

constexpr __int128 kSmallMax = INT64_MAX;

__int128 abs128(__int128 x) { return x < 0 ? -x : x; }

__int128 gcd128(__int128 a, __int128 b)
{
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

long long gcd64(long long a, long long b)
{
    return static_cast<long long>(std::gcd(static_cast<unsigned long long>(a < 0 ? -a : a),
                                           static_cast<unsigned long long>(b < 0 ? -b : b)));
}

mpz_class to_mpz(__int128 x)
{
    bool neg = x < 0;
    unsigned __int128 ux = neg ? static_cast<unsigned __int128>(-(x + 1)) + 1 : static_cast<unsigned __int128>(x);
    mpz_class hi(static_cast<unsigned long>(static_cast<unsigned long long>(ux >> 64)));
    mpz_class lo(static_cast<unsigned long>(static_cast<unsigned long long>(ux)));
    mpz_class r = (hi << 64) + lo;
    return neg ? mpz_class(-r) : r;
}

} // namespace

Rational::Rational(long long n, long long d)
{
    if (d == 0) throw std::domain_error("rational with zero denominator");
    *this = from_i128(n, d);
}

Rational Rational::from_i128(__int128 n, __int128 d)
{
    if (d < 0) {
        n = -n;
        d = -d;
    }
    if (n == 0) return Rational();
    __int128 g = gcd128(n, d);
    if (g != 1) {
        n /= g;
        d /= g;
    }
    Rational r;
    if (abs128(n) <= kSmallMax && d <= kSmallMax) {
        r.n_ = static_cast<long long>(n);
        r.d_ = static_cast<long long>(d);
    } else {
        r.promote_from(n, d);
    }
    return r;
}

void Rational::promote_from(__int128 n, __int128 d)
{
    mpq_class q(to_mpz(n), to_mpz(d));
    q.canonicalize();
    big_ = std::make_shared<const mpq_class>(std::move(q));
    n_ = 0;
    d_ = 1;
}

void Rational::assign(const mpq_class& q)
{
    const mpz_class& num = q.get_num();
    const mpz_class& den = q.get_den();
    if (num.fits_slong_p() && den.fits_slong_p() && num != LONG_MIN) {
        n_ = num.get_si();
        d_ = den.get_si();
        big_.reset();
    } else {
        big_ = std::make_shared<const mpq_class>(q);
        n_ = 0;
        d_ = 1;
    }
}

Rational Rational::parse(std::string_view text)
{
    std::string s(text);
    mpq_class q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("invalid rational literal: " + s);
    if (q.get_den() == 0) throw std::domain_error("rational with zero denominator");
    q.canonicalize();
    return Rational(q);
}

bool Rational::is_integer() const { return big_ ? big_->get_den() == 1 : d_ == 1; }

int Rational::sign() const
{
    if (big_) return sgn(*big_);
    return (n_ > 0) - (n_ < 0);
}

mpq_class Rational::to_mpq() const
{
    if (big_) return *big_;
    return mpq_class(mpz_class(static_cast<long>(n_)), mpz_class(static_cast<long>(d_)));
}

mpz_class Rational::num() const { return big_ ? big_->get_num() : mpz_class(static_cast<long>(n_)); }
mpz_class Rational::den() const { return big_ ? big_->get_den() : mpz_class(static_cast<long>(d_)); }

double Rational::to_double() const
{
    if (big_) return big_->get_d();
    if (d_ == 1) return static_cast<double>(n_);
    return static_cast<double>(n_) / static_cast<double>(d_);
}

std::string Rational::str() const
{
    if (big_) return big_->get_str();
    if (d_ == 1) return std::to_string(n_);
    return std::to_string(n_) + "/" + std::to_string(d_);
}

Rational Rational::inverse() const
{
    if (is_zero()) throw std::domain_error("division by zero");
    if (big_) {
        mpq_class q = 1 / *big_;
        return Rational(q);
    }
    return n_ < 0 ? from_i128(-static_cast<__int128>(d_), -static_cast<__int128>(n_))
                  : from_i128(d_, n_);
}

Rational Rational::pow(long long e) const
{
    if (e < 0) return inverse().pow(-e);
    Rational result(1);
    Rational base = *this;
    while (e > 0) {
        if (e & 1) result *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return result;
}

Rational Rational::operator-() const
{
    if (big_) return Rational(mpq_class(-*big_));
    Rational r;
    r.n_ = -n_;
    r.d_ = d_;
    return r;
}

Rational operator+(const Rational& a, const Rational& b)
{
    if (!a.big_ && !b.big_) {
        if (a.d_ == b.d_) {
            if (a.d_ == 1) {
                __int128 n = static_cast<__int128>(a.n_) + b.n_;
                if (n <= kSmallMax && n >= -kSmallMax) {
                    Rational r;
                    r.n_ = static_cast<long long>(n);
                    return r;
                }
            }
            return Rational::from_i128(static_cast<__int128>(a.n_) + b.n_, a.d_);
        }
        long long g = gcd64(a.d_, b.d_);
        __int128 n = static_cast<__int128>(a.n_) * (b.d_ / g) + static_cast<__int128>(b.n_) * (a.d_ / g);
        __int128 d = static_cast<__int128>(a.d_ / g) * b.d_;
        return Rational::from_i128(n, d);
    }
    return Rational(mpq_class(a.to_mpq() + b.to_mpq()));
}

Rational operator*(const Rational& a, const Rational& b)
{
    if (!a.big_ && !b.big_) {
        if (a.n_ == 0 || b.n_ == 0) return Rational();
        if (a.d_ == 1 && b.d_ == 1) {
            __int128 n = static_cast<__int128>(a.n_) * b.n_;
            if (n <= kSmallMax && n >= -kSmallMax) {
                Rational r;
                r.n_ = static_cast<long long>(n);
                return r;
            }
            return Rational::from_i128(n, 1);
        }
        long long g1 = gcd64(a.n_, b.d_);
        long long g2 = gcd64(b.n_, a.d_);
        __int128 n = static_cast<__int128>(a.n_ / g1) * (b.n_ / g2);
        __int128 d = static_cast<__int128>(a.d_ / g2) * (b.d_ / g1);
        return Rational::from_i128(n, d);
    }
    return Rational(mpq_class(a.to_mpq() * b.to_mpq()));
}

bool operator==(const Rational& a, const Rational& b)
{
    if (!a.big_ && !b.big_) return a.n_ == b.n_ && a.d_ == b.d_;
    if (a.big_ && b.big_) return *a.big_ == *b.big_;
    return false; // canonical: a value is big only when it does not fit inline
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b)
{
    if (!a.big_ && !b.big_) {
        __int128 l = static_cast<__int128>(a.n_) * b.d_;
        __int128 r = static_cast<__int128>(b.n_) * a.d_;
        return l <=> r;
    }
    int c = cmp(a.to_mpq(), b.to_mpq());
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
}

std::size_t Rational::hash() const
{
    if (!big_) return std::hash<long long>()(n_) * 31 + std::hash<long long>()(d_);
    return std::hash<std::string>()(big_->get_str());
}

Rational rational_gcd(const Rational& a, const Rational& b)
{
    if (a.is_zero()) return b.abs();
    if (b.is_zero()) return a.abs();
    if (a.is_small() && b.is_small()) {
        long long gn = gcd64(a.small_num(), b.small_num());
        long long gd = gcd64(a.small_den(), b.small_den());
        __int128 ld = static_cast<__int128>(a.small_den() / gd) * b.small_den();
        if (ld <= kSmallMax) return Rational(gn, static_cast<long long>(ld));
    }
    mpz_class gn, ld;
    mpz_gcd(gn.get_mpz_t(), a.num().get_mpz_t(), b.num().get_mpz_t());
    mpz_lcm(ld.get_mpz_t(), a.den().get_mpz_t(), b.den().get_mpz_t());
    return Rational(mpq_class(gn, ld));
}

} // namespace invforge
