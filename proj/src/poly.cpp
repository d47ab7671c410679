#include "invforge/poly.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace invforge {

namespace {

constexpr std::uint64_t key_of(std::uint64_t e) { return e >> 16; }
constexpr std::uint32_t exp_of(std::uint64_t e) { return static_cast<std::uint32_t>(e & 0xFFFF); }
constexpr std::uint64_t pack(std::uint64_t key, std::uint64_t exp) { return (key << 16) | exp; }

void check_exponent(std::uint64_t e)
{
    if (e > Monomial::kMaxExponent) throw std::overflow_error("monomial exponent overflow");
}

struct DescOrder {
    bool operator()(const Monomial& a, const Monomial& b) const { return Monomial::compare(a, b) > 0; }
};

} // namespace

Monomial::Monomial(Symbol s, std::uint32_t e)
{
    check_exponent(e);
    if (e > 0) data_.push_back(pack(s.key(), e));
}

std::uint32_t Monomial::exponent_of(Symbol s) const
{
    for (auto e : data_)
        if (key_of(e) == s.key()) return exp_of(e);
    return 0;
}

std::uint32_t Monomial::total_degree() const
{
    std::uint32_t d = 0;
    for (auto e : data_) d += exp_of(e);
    return d;
}

Monomial Monomial::operator*(const Monomial& o) const
{
    Monomial r;
    r.data_.reserve(data_.size() + o.data_.size());
    std::size_t i = 0, j = 0;
    while (i < data_.size() && j < o.data_.size()) {
        auto ka = key_of(data_[i]), kb = key_of(o.data_[j]);
        if (ka < kb) {
            r.data_.push_back(data_[i++]);
        } else if (kb < ka) {
            r.data_.push_back(o.data_[j++]);
        } else {
            std::uint64_t e = exp_of(data_[i]) + static_cast<std::uint64_t>(exp_of(o.data_[j]));
            check_exponent(e);
            r.data_.push_back(pack(ka, e));
            ++i;
            ++j;
        }
    }
    while (i < data_.size()) r.data_.push_back(data_[i++]);
    while (j < o.data_.size()) r.data_.push_back(o.data_[j++]);
    return r;
}

bool Monomial::divisible_by(const Monomial& o) const
{
    std::size_t i = 0;
    for (auto e : o.data_) {
        while (i < data_.size() && key_of(data_[i]) < key_of(e)) ++i;
        if (i == data_.size() || key_of(data_[i]) != key_of(e) || exp_of(data_[i]) < exp_of(e)) return false;
        ++i;
    }
    return true;
}

std::optional<Monomial> Monomial::divide(const Monomial& o) const
{
    if (!divisible_by(o)) return std::nullopt;
    Monomial r;
    std::size_t j = 0;
    for (auto e : data_) {
        if (j < o.data_.size() && key_of(o.data_[j]) == key_of(e)) {
            auto d = exp_of(e) - exp_of(o.data_[j]);
            if (d > 0) r.data_.push_back(pack(key_of(e), d));
            ++j;
        } else {
            r.data_.push_back(e);
        }
    }
    return r;
}

Monomial Monomial::reduce_one(Symbol s) const
{
    Monomial r;
    for (auto e : data_) {
        if (key_of(e) == s.key()) {
            if (exp_of(e) > 1) r.data_.push_back(e - 1);
        } else {
            r.data_.push_back(e);
        }
    }
    return r;
}

Monomial Monomial::without(Symbol s) const
{
    Monomial r;
    for (auto e : data_)
        if (key_of(e) != s.key()) r.data_.push_back(e);
    return r;
}

Monomial Monomial::gcd(const Monomial& o) const
{
    Monomial r;
    std::size_t i = 0, j = 0;
    while (i < data_.size() && j < o.data_.size()) {
        auto ka = key_of(data_[i]), kb = key_of(o.data_[j]);
        if (ka < kb) {
            ++i;
        } else if (kb < ka) {
            ++j;
        } else {
            r.data_.push_back(pack(ka, std::min(exp_of(data_[i]), exp_of(o.data_[j]))));
            ++i;
            ++j;
        }
    }
    return r;
}

int Monomial::compare(const Monomial& a, const Monomial& b)
{
    auto i = a.data_.size(), j = b.data_.size();
    while (i > 0 && j > 0) {
        --i;
        --j;
        auto ka = key_of(a.data_[i]), kb = key_of(b.data_[j]);
        if (ka != kb) return ka > kb ? 1 : -1;
        auto ea = exp_of(a.data_[i]), eb = exp_of(b.data_[j]);
        if (ea != eb) return ea > eb ? 1 : -1;
    }
    if (i > 0) return 1;
    if (j > 0) return -1;
    return 0;
}

std::size_t Monomial::hash() const
{
    std::size_t h = 1469598103934665603ull;
    for (auto e : data_) {
        h ^= e + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
}

// ---------------------------------------------------------------------------

Poly Poly::constant(const Rational& c)
{
    Poly p;
    if (!c.is_zero()) p.terms_.push_back({Monomial(), c});
    return p;
}

Poly Poly::variable(Symbol s)
{
    Poly p;
    p.terms_.push_back({Monomial(s), Rational(1)});
    return p;
}

Poly Poly::term(const Monomial& m, const Rational& c)
{
    Poly p;
    if (!c.is_zero()) p.terms_.push_back({m, c});
    return p;
}

Poly Poly::from_terms(std::vector<Term> terms)
{
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return Monomial::compare(a.mono, b.mono) > 0; });
    Poly p;
    p.terms_.reserve(terms.size());
    for (auto& t : terms) {
        if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
            p.terms_.back().coeff += t.coeff;
            if (p.terms_.back().coeff.is_zero()) p.terms_.pop_back();
        } else if (!t.coeff.is_zero()) {
            p.terms_.push_back(std::move(t));
        }
    }
    return p;
}

Rational Poly::constant_value() const
{
    if (!is_constant()) throw std::logic_error("polynomial is not constant");
    return terms_.empty() ? Rational() : terms_[0].coeff;
}

Rational Poly::constant_term() const
{
    if (!terms_.empty() && terms_.back().mono.is_one()) return terms_.back().coeff;
    return Rational();
}

Poly Poly::operator-() const
{
    Poly r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
}

Poly operator+(const Poly& a, const Poly& b)
{
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    Poly r;
    r.terms_.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() && j < b.terms_.size()) {
        int c = Monomial::compare(a.terms_[i].mono, b.terms_[j].mono);
        if (c > 0) {
            r.terms_.push_back(a.terms_[i++]);
        } else if (c < 0) {
            r.terms_.push_back(b.terms_[j++]);
        } else {
            Rational s = a.terms_[i].coeff + b.terms_[j].coeff;
            if (!s.is_zero()) r.terms_.push_back({a.terms_[i].mono, std::move(s)});
            ++i;
            ++j;
        }
    }
    while (i < a.terms_.size()) r.terms_.push_back(a.terms_[i++]);
    while (j < b.terms_.size()) r.terms_.push_back(b.terms_[j++]);
    return r;
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly Poly::scaled(const Rational& c) const
{
    if (c.is_zero()) return Poly();
    if (c.is_one()) return *this;
    Poly r = *this;
    for (auto& t : r.terms_) t.coeff *= c;
    return r;
}

Poly Poly::times(const Monomial& m, const Rational& c) const
{
    if (c.is_zero()) return Poly();
    Poly r;
    r.terms_.reserve(terms_.size());
    // multiplying by a monomial preserves the term order
    for (const auto& t : terms_) r.terms_.push_back({t.mono * m, t.coeff * c});
    return r;
}

Poly operator*(const Poly& a, const Poly& b)
{
    if (a.is_zero() || b.is_zero()) return Poly();
    if (a.terms_.size() == 1) return b.times(a.terms_[0].mono, a.terms_[0].coeff);
    if (b.terms_.size() == 1) return a.times(b.terms_[0].mono, b.terms_[0].coeff);
    const Poly& big = a.terms_.size() >= b.terms_.size() ? a : b;
    const Poly& small = &big == &a ? b : a;
    std::unordered_map<Monomial, Rational, MonomialHash> acc;
    acc.reserve(big.terms_.size() * small.terms_.size());
    for (const auto& s : small.terms_) {
        for (const auto& t : big.terms_) {
            auto [it, inserted] = acc.try_emplace(t.mono * s.mono);
            it->second += t.coeff * s.coeff;
        }
    }
    std::vector<Term> terms;
    terms.reserve(acc.size());
    for (auto& [m, c] : acc)
        if (!c.is_zero()) terms.push_back({m, std::move(c)});
    return Poly::from_terms(std::move(terms));
}

Poly Poly::pow(unsigned e) const
{
    Poly result = constant(1);
    Poly base = *this;
    while (e > 0) {
        if (e & 1) result = result * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return result;
}

std::optional<Poly> Poly::divide_exact(const Poly& d) const
{
    if (d.is_zero()) throw std::domain_error("polynomial division by zero");
    if (is_zero()) return Poly();
    if (d.terms_.size() == 1) {
        const auto& lt = d.terms_[0];
        Poly q;
        q.terms_.reserve(terms_.size());
        Rational inv = lt.coeff.inverse();
        for (const auto& t : terms_) {
            auto m = t.mono.divide(lt.mono);
            if (!m) return std::nullopt;
            q.terms_.push_back({std::move(*m), t.coeff * inv});
        }
        return q;
    }
    const auto& lt = d.terms_[0];
    Rational inv = lt.coeff.inverse();
    std::map<Monomial, Rational, DescOrder> rem;
    for (const auto& t : terms_) rem.emplace_hint(rem.end(), t.mono, t.coeff);
    std::vector<Term> quotient;
    while (!rem.empty()) {
        auto it = rem.begin();
        auto m = it->first.divide(lt.mono);
        if (!m) return std::nullopt;
        Rational c = it->second * inv;
        rem.erase(it);
        for (std::size_t k = 1; k < d.terms_.size(); ++k) {
            Monomial pm = d.terms_[k].mono * *m;
            Rational pc = d.terms_[k].coeff * c;
            auto [pos, inserted] = rem.try_emplace(std::move(pm));
            pos->second -= pc;
            if (pos->second.is_zero()) rem.erase(pos);
        }
        quotient.push_back({std::move(*m), std::move(c)});
    }
    Poly q;
    q.terms_ = std::move(quotient); // produced in descending order
    return q;
}

Poly Poly::divide_monomial(const Monomial& m) const
{
    if (m.is_one()) return *this;
    Poly q;
    q.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
        auto r = t.mono.divide(m);
        if (!r) throw std::logic_error("monomial does not divide polynomial");
        q.terms_.push_back({std::move(*r), t.coeff});
    }
    return q;
}

Poly Poly::derivative(Symbol s) const
{
    std::vector<Term> out;
    for (const auto& t : terms_) {
        auto e = t.mono.exponent_of(s);
        if (e == 0) continue;
        out.push_back({t.mono.reduce_one(s), t.coeff * Rational(e)});
    }
    return from_terms(std::move(out));
}

std::uint32_t Poly::degree(Symbol s) const
{
    std::uint32_t d = 0;
    for (const auto& t : terms_) d = std::max(d, t.mono.exponent_of(s));
    return d;
}

std::uint32_t Poly::total_degree() const
{
    std::uint32_t d = 0;
    for (const auto& t : terms_) d = std::max(d, t.mono.total_degree());
    return d;
}

bool Poly::contains(Symbol s) const
{
    for (const auto& t : terms_)
        if (t.mono.exponent_of(s) > 0) return true;
    return false;
}

std::vector<Symbol> Poly::symbols() const
{
    std::vector<Symbol> out;
    for (const auto& t : terms_)
        for (std::size_t n = 0; n < t.mono.size(); ++n) out.push_back(t.mono.symbol(n));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Monomial Poly::monomial_gcd() const
{
    if (terms_.empty()) return Monomial();
    Monomial g = terms_[0].mono;
    for (std::size_t n = 1; n < terms_.size() && !g.is_one(); ++n) g = g.gcd(terms_[n].mono);
    return g;
}

Rational Poly::content() const
{
    Rational g;
    for (const auto& t : terms_) g = rational_gcd(g, t.coeff);
    return g;
}

std::pair<Rational, Poly> Poly::primitive() const
{
    if (is_zero()) return {Rational(), Poly()};
    Rational c = content();
    if (terms_[0].coeff.sign() < 0) c = -c;
    return {c, scaled(c.inverse())};
}

double Poly::eval(const std::function<double(Symbol)>& value) const
{
    double sum = 0;
    std::unordered_map<std::uint64_t, double> cache;
    for (const auto& t : terms_) {
        double term = t.coeff.to_double();
        for (std::size_t n = 0; n < t.mono.size(); ++n) {
            Symbol s = t.mono.symbol(n);
            auto it = cache.find(s.key());
            double x = it != cache.end() ? it->second : cache.emplace(s.key(), value(s)).first->second;
            auto e = t.mono.exponent(n);
            double p = 1;
            for (std::uint32_t k = 0; k < e; ++k) p *= x;
            term *= p;
        }
        sum += term;
    }
    return sum;
}

std::uint64_t Poly::eval_mod(const std::function<std::uint64_t(Symbol)>& value) const
{
    std::uint64_t sum = 0;
    std::unordered_map<std::uint64_t, std::uint64_t> cache;
    for (const auto& t : terms_) {
        auto c = modp::of(t.coeff);
        if (!c) continue; // denominators divisible by p do not occur in practice
        std::uint64_t term = *c;
        for (std::size_t n = 0; n < t.mono.size(); ++n) {
            Symbol s = t.mono.symbol(n);
            auto it = cache.find(s.key());
            std::uint64_t x = it != cache.end() ? it->second : cache.emplace(s.key(), value(s)).first->second;
            term = modp::mul(term, modp::pow(x, t.mono.exponent(n)));
        }
        sum = modp::add(sum, term);
    }
    return sum;
}

int Poly::compare(const Poly& a, const Poly& b)
{
    std::size_t n = std::min(a.terms_.size(), b.terms_.size());
    for (std::size_t k = 0; k < n; ++k) {
        int c = Monomial::compare(a.terms_[k].mono, b.terms_[k].mono);
        if (c != 0) return c;
        auto cc = a.terms_[k].coeff <=> b.terms_[k].coeff;
        if (cc != 0) return cc < 0 ? -1 : 1;
    }
    if (a.terms_.size() != b.terms_.size()) return a.terms_.size() < b.terms_.size() ? -1 : 1;
    return 0;
}

bool operator==(const Poly& a, const Poly& b)
{
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t k = 0; k < a.terms_.size(); ++k)
        if (!(a.terms_[k].mono == b.terms_[k].mono) || !(a.terms_[k].coeff == b.terms_[k].coeff)) return false;
    return true;
}

std::size_t Poly::hash() const
{
    std::size_t h = terms_.size();
    for (const auto& t : terms_) h = h * 1000003u ^ (t.mono.hash() + 31 * t.coeff.hash());
    return h;
}

// ---------------------------------------------------------------------------

namespace modp {

std::uint64_t mul(std::uint64_t a, std::uint64_t b)
{
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    std::uint64_t lo = static_cast<std::uint64_t>(p & kPrime);
    std::uint64_t hi = static_cast<std::uint64_t>(p >> 61);
    std::uint64_t r = lo + hi;
    if (r >= kPrime) r -= kPrime;
    return r;
}

std::uint64_t add(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t r = a + b;
    if (r >= kPrime) r -= kPrime;
    return r;
}

std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + kPrime - b; }

std::uint64_t pow(std::uint64_t a, std::uint64_t e)
{
    std::uint64_t r = 1;
    while (e > 0) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

std::uint64_t inv(std::uint64_t a) { return pow(a, kPrime - 2); }

std::optional<std::uint64_t> of(const Rational& r)
{
    std::uint64_t n, d;
    if (r.is_small()) {
        long long sn = r.small_num();
        n = static_cast<std::uint64_t>(sn < 0 ? -sn : sn) % kPrime;
        if (sn < 0) n = sub(0, n);
        d = static_cast<std::uint64_t>(r.small_den()) % kPrime;
    } else {
        mpz_class num = r.num(), den = r.den();
        n = mpz_fdiv_ui(num.get_mpz_t(), kPrime);
        d = mpz_fdiv_ui(den.get_mpz_t(), kPrime);
    }
    if (d == 0) return std::nullopt;
    return mul(n, inv(d));
}

} // namespace modp

} // namespace invforge
