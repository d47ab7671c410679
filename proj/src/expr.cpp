#include "invforge/expr.hpp"

#include "invforge/errors.hpp"
#include "internal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <shared_mutex>

namespace invforge {

struct Expr::Rep {
    Poly num;
    std::vector<Factor> den;
};

namespace {

std::uint64_t splitmix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t random_residue(Symbol s, std::uint64_t salt) { return splitmix(s.key() ^ splitmix(salt)) % modp::kPrime; }

std::optional<Symbol> single_variable(const Poly& p)
{
    if (p.size() != 1) return std::nullopt;
    const auto& t = p.leading();
    if (t.mono.size() != 1 || t.mono.exponent(0) != 1 || !t.coeff.is_one()) return std::nullopt;
    return t.mono.symbol(0);
}

/// A variable in which p is linear with a constant coefficient; such a
/// primitive p is irreducible.
std::optional<Symbol> unit_linear_variable(const Poly& p)
{
    for (Symbol s : p.symbols()) {
        if (p.degree(s) != 1) continue;
        bool constant_coeff = true;
        for (const auto& t : p.terms())
            if (t.mono.exponent_of(s) == 1 && t.mono.size() != 1) {
                constant_coeff = false;
                break;
            }
        if (constant_coeff) return s;
    }
    return std::nullopt;
}

bool is_irreducible(const Poly& p) { return single_variable(p) || unit_linear_variable(p); }

/// Cheap necessary condition for p | num: num vanishes at a random point of
/// the hypersurface p = 0. Returns true when the test does not apply.
bool maybe_divides(const Poly& num, const Poly& p)
{
    for (std::uint64_t salt = 1; salt <= 2; ++salt) {
        std::optional<Symbol> lin;
        for (Symbol s : p.symbols())
            if (p.degree(s) == 1) {
                lin = s;
                break;
            }
        if (!lin) return true;
        Symbol x = *lin;
        std::vector<Term> a_terms, b_terms;
        for (const auto& t : p.terms()) {
            if (t.mono.exponent_of(x) == 1)
                a_terms.push_back({t.mono.without(x), t.coeff});
            else
                b_terms.push_back(t);
        }
        auto value = [salt](Symbol s) { return random_residue(s, salt); };
        std::uint64_t a = Poly::from_terms(std::move(a_terms)).eval_mod(value);
        if (a == 0) continue;
        std::uint64_t b = Poly::from_terms(std::move(b_terms)).eval_mod(value);
        std::uint64_t root = modp::mul(modp::sub(0, b), modp::inv(a));
        std::uint64_t r = num.eval_mod([&](Symbol s) { return s == x ? root : value(s); });
        return r == 0;
    }
    return true;
}

/// Divides factor powers out of `num`; returns the remaining exponent.
std::uint32_t cancel_factor(Poly& num, const Poly& p, std::uint32_t exp)
{
    if (auto s = single_variable(p)) {
        std::uint32_t common = std::numeric_limits<std::uint32_t>::max();
        for (const auto& t : num.terms()) {
            common = std::min(common, t.mono.exponent_of(*s));
            if (common == 0) return exp;
        }
        std::uint32_t k = std::min(common, exp);
        if (k > 0) num = num.divide_monomial(Monomial(*s, k));
        return exp - k;
    }
    while (exp > 0) {
        if (num.total_degree() < p.total_degree()) break;
        if (!maybe_divides(num, p)) break;
        auto q = num.divide_exact(p);
        if (!q) break;
        num = std::move(*q);
        --exp;
    }
    return exp;
}

bool factor_less(const Factor& a, const Factor& b) { return Poly::compare(a.poly, b.poly) < 0; }

void sort_merge(std::vector<Factor>& den)
{
    std::sort(den.begin(), den.end(), factor_less);
    std::vector<Factor> out;
    out.reserve(den.size());
    for (auto& f : den) {
        if (f.exp == 0) continue;
        if (!out.empty() && out.back().poly == f.poly)
            out.back().exp += f.exp;
        else
            out.push_back(std::move(f));
    }
    den = std::move(out);
}

Poly expand(const std::vector<Factor>& den)
{
    Poly r = Poly::constant(1);
    for (const auto& f : den) r = r * f.poly.pow(f.exp);
    return r;
}

/// Splits q into content, monomial factors, known factors and a residual
/// factor. Returns the rational scale with q == scale * prod(factors).
Rational split_factors(const Poly& q, const std::vector<const Poly*>& known, std::vector<Factor>& out)
{
    if (q.is_zero()) throw DivisionByZeroPolynomial("division by the zero polynomial");
    if (q.is_constant()) return q.constant_value();
    auto [scale, prim] = q.primitive();
    Monomial g = prim.monomial_gcd();
    if (!g.is_one()) {
        for (std::size_t n = 0; n < g.size(); ++n) out.push_back({Poly::variable(g.symbol(n)), g.exponent(n)});
        prim = prim.divide_monomial(g);
    }
    if (prim.is_constant()) return scale * prim.constant_value();
    for (const Poly* k : known) {
        if (k->is_constant() || single_variable(*k)) continue;
        std::uint32_t count = 0;
        while (!prim.is_constant() && prim.total_degree() >= k->total_degree() && maybe_divides(prim, *k)) {
            auto d = prim.divide_exact(*k);
            if (!d) break;
            prim = std::move(*d);
            ++count;
        }
        if (count > 0) out.push_back({*k, count});
        if (prim.is_constant()) return scale * prim.constant_value();
    }
    auto [s2, rest] = prim.primitive();
    out.push_back({std::move(rest), 1});
    return scale * s2;
}

std::vector<const Poly*> known_polys(std::initializer_list<const std::vector<Factor>*> dens)
{
    std::vector<const Poly*> out;
    for (const auto* d : dens)
        for (const auto& f : *d) out.push_back(&f.poly);
    return out;
}

// ---------------------------------------------------------------------------
// Atoms

struct AtomTable {
    std::shared_mutex mutex;
    std::vector<AtomInfo> atoms;
    std::unordered_map<std::string, std::uint32_t> index;
};

AtomTable& atom_table()
{
    static AtomTable table;
    return table;
}

char atom_tag(AtomKind k)
{
    switch (k) {
    case AtomKind::Exp: return 'e';
    case AtomKind::Log: return 'l';
    case AtomKind::Sin: return 's';
    case AtomKind::Cos: return 'c';
    case AtomKind::Pow: return 'p';
    }
    return '?';
}

} // namespace

Expr make_atom(AtomKind kind, const Expr& arg, const Rational& exponent)
{
    std::string key = std::string(1, atom_tag(kind)) + "|" + exponent.str() + "|" + arg.str();
    auto& table = atom_table();
    {
        std::shared_lock lock(table.mutex);
        auto it = table.index.find(key);
        if (it != table.index.end()) return Expr(Symbol::atom(it->second));
    }
    std::unique_lock lock(table.mutex);
    auto it = table.index.find(key);
    if (it != table.index.end()) return Expr(Symbol::atom(it->second));
    auto idx = static_cast<std::uint32_t>(table.atoms.size());
    table.atoms.push_back({kind, arg, exponent});
    table.index.emplace(std::move(key), idx);
    return Expr(Symbol::atom(idx));
}

AtomInfo atom_info(Symbol atom)
{
    if (atom.kind() != SymbolKind::Atom) throw std::invalid_argument("not an atom symbol");
    auto& table = atom_table();
    std::shared_lock lock(table.mutex);
    return table.atoms.at(atom.payload());
}

// ---------------------------------------------------------------------------
// Construction and normalization

Expr::Expr() : rep_(std::make_shared<Rep>()) {}

Expr::Expr(long long n) : Expr(Poly::constant(Rational(n))) {}

Expr::Expr(const Rational& r) : Expr(Poly::constant(r)) {}

Expr::Expr(Symbol s) : Expr(Poly::variable(s)) {}

Expr::Expr(Poly p)
{
    auto rep = std::make_shared<Rep>();
    rep->num = std::move(p);
    rep_ = std::move(rep);
}

Expr Expr::make(Poly num, std::vector<Factor> den, bool trusted)
{
    if (num.is_zero()) return Expr();
    sort_merge(den);
    if (!trusted) {
        for (auto& f : den) f.exp = cancel_factor(num, f.poly, f.exp);
        den.erase(std::remove_if(den.begin(), den.end(), [](const Factor& f) { return f.exp == 0; }), den.end());
    }
    auto rep = std::make_shared<Rep>();
    rep->num = std::move(num);
    rep->den = std::move(den);
    return Expr(std::shared_ptr<const Rep>(std::move(rep)));
}

Expr Expr::fraction(Poly num, std::vector<Factor> den)
{
    std::vector<Factor> clean;
    Rational scale(1);
    std::vector<const Poly*> none;
    for (auto& f : den) {
        std::vector<Factor> parts;
        Rational s = split_factors(f.poly, none, parts);
        scale *= s.pow(f.exp);
        for (auto& p : parts) {
            p.exp *= f.exp;
            clean.push_back(std::move(p));
        }
    }
    return make(num.scaled(scale.inverse()), std::move(clean), false);
}

const Poly& Expr::numerator() const { return rep_->num; }
const std::vector<Factor>& Expr::denominator() const { return rep_->den; }
Poly Expr::denominator_poly() const { return expand(rep_->den); }

bool Expr::is_zero() const { return rep_->num.is_zero(); }

std::optional<Rational> Expr::as_rational() const
{
    if (!rep_->den.empty() || !rep_->num.is_constant()) return std::nullopt;
    return rep_->num.constant_value();
}

std::optional<Symbol> Expr::as_symbol() const
{
    if (!rep_->den.empty()) return std::nullopt;
    return single_variable(rep_->num);
}

std::vector<Symbol> Expr::symbols() const
{
    std::vector<Symbol> out = rep_->num.symbols();
    for (const auto& f : rep_->den) {
        auto s = f.poly.symbols();
        out.insert(out.end(), s.begin(), s.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::set<Symbol> Expr::free_symbols() const
{
    std::set<Symbol> out;
    for (Symbol s : symbols()) {
        if (s.kind() == SymbolKind::Atom) {
            auto inner = atom_info(s).arg.free_symbols();
            out.insert(inner.begin(), inner.end());
        } else {
            out.insert(s);
        }
    }
    return out;
}

bool Expr::has_atoms() const
{
    for (Symbol s : symbols())
        if (s.kind() == SymbolKind::Atom) return true;
    return false;
}

bool Expr::depends_on(Symbol s) const { return free_symbols().count(s) > 0; }

Expr Expr::operator-() const
{
    auto rep = std::make_shared<Rep>(*rep_);
    rep->num = -rep->num;
    return Expr(std::shared_ptr<const Rep>(std::move(rep)));
}

namespace {

bool same_den(const std::vector<Factor>& a, const std::vector<Factor>& b)
{
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k].exp != b[k].exp || !(a[k].poly == b[k].poly)) return false;
    return true;
}

} // namespace

Expr operator+(const Expr& a, const Expr& b)
{
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    const auto& da = a.denominator();
    const auto& db = b.denominator();
    if (same_den(da, db)) {
        if (da.empty()) return Expr(a.numerator() + b.numerator());
        return Expr::make(a.numerator() + b.numerator(), da, false);
    }
    // least common multiple over the factor lists
    std::vector<Factor> lcm;
    Poly fa = Poly::constant(1), fb = Poly::constant(1);
    std::size_t i = 0, j = 0;
    while (i < da.size() || j < db.size()) {
        int c = i == da.size() ? 1 : j == db.size() ? -1 : Poly::compare(da[i].poly, db[j].poly);
        if (c < 0) {
            lcm.push_back(da[i]);
            fb = fb * da[i].poly.pow(da[i].exp);
            ++i;
        } else if (c > 0) {
            lcm.push_back(db[j]);
            fa = fa * db[j].poly.pow(db[j].exp);
            ++j;
        } else {
            std::uint32_t e = std::max(da[i].exp, db[j].exp);
            lcm.push_back({da[i].poly, e});
            if (e > da[i].exp) fa = fa * da[i].poly.pow(e - da[i].exp);
            if (e > db[j].exp) fb = fb * db[j].poly.pow(e - db[j].exp);
            ++i;
            ++j;
        }
    }
    return Expr::make(a.numerator() * fa + b.numerator() * fb, std::move(lcm), false);
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b)
{
    if (a.is_zero() || b.is_zero()) return Expr();
    const auto& da = a.denominator();
    const auto& db = b.denominator();
    if (da.empty() && db.empty()) return Expr(a.numerator() * b.numerator());
    Poly na = a.numerator(), nb = b.numerator();
    std::vector<Factor> den;
    den.reserve(da.size() + db.size());
    bool all_irreducible = true;
    for (const auto& f : db) {
        std::uint32_t e = cancel_factor(na, f.poly, f.exp);
        if (e > 0) den.push_back({f.poly, e});
    }
    for (const auto& f : da) {
        std::uint32_t e = cancel_factor(nb, f.poly, f.exp);
        if (e > 0) den.push_back({f.poly, e});
    }
    for (const auto& f : den)
        if (!is_irreducible(f.poly)) all_irreducible = false;
    return Expr::make(na * nb, std::move(den), all_irreducible);
}

Expr operator/(const Expr& a, const Expr& b)
{
    if (b.is_zero()) throw DivisionByZeroPolynomial("division by an expression that normalizes to zero");
    if (auto r = b.as_rational()) {
        auto rep = std::make_shared<Expr::Rep>(*a.rep_);
        rep->num = rep->num.scaled(r->inverse());
        return Expr(std::shared_ptr<const Expr::Rep>(std::move(rep)));
    }
    std::vector<Factor> parts;
    auto known = known_polys({&a.denominator(), &b.denominator()});
    Rational scale = split_factors(b.numerator(), known, parts);
    Expr inv = Expr::make(expand(b.denominator()).scaled(scale.inverse()), std::move(parts), false);
    return a * inv;
}

Expr Expr::pow(long long e) const
{
    if (e == 0) return Expr(1);
    if (e < 0) return (Expr(1) / *this).pow(-e);
    if (e == 1) return *this;
    std::vector<Factor> den = rep_->den;
    bool all_irreducible = true;
    for (auto& f : den) {
        f.exp *= static_cast<std::uint32_t>(e);
        if (!is_irreducible(f.poly)) all_irreducible = false;
    }
    return make(rep_->num.pow(static_cast<unsigned>(e)), std::move(den), all_irreducible);
}

bool operator==(const Expr& a, const Expr& b)
{
    if (a.rep_ == b.rep_) return true;
    return a.numerator() == b.numerator() && same_den(a.denominator(), b.denominator());
}

std::size_t Expr::hash() const
{
    std::size_t h = rep_->num.hash();
    for (const auto& f : rep_->den) h = h * 131 + f.poly.hash() * 7 + f.exp;
    return h;
}

// ---------------------------------------------------------------------------
// Elementary functions

Expr exp(const Expr& e)
{
    if (e.is_zero()) return Expr(1);
    if (auto s = e.as_symbol(); s && s->kind() == SymbolKind::Atom) {
        auto info = atom_info(*s);
        if (info.kind == AtomKind::Log) return info.arg;
    }
    return make_atom(AtomKind::Exp, e, Rational());
}

Expr log(const Expr& e)
{
    if (e.is_zero()) throw NumericDomain("log(0)");
    if (auto r = e.as_rational(); r && r->is_one()) return Expr();
    if (auto s = e.as_symbol(); s && s->kind() == SymbolKind::Atom) {
        auto info = atom_info(*s);
        if (info.kind == AtomKind::Exp) return info.arg;
    }
    return make_atom(AtomKind::Log, e, Rational());
}

Expr sin(const Expr& e)
{
    if (e.is_zero()) return Expr();
    return make_atom(AtomKind::Sin, e, Rational());
}

Expr cos(const Expr& e)
{
    if (e.is_zero()) return Expr(1);
    return make_atom(AtomKind::Cos, e, Rational());
}

namespace {

std::optional<mpz_class> exact_root(const mpz_class& x, unsigned long k)
{
    if (x < 0) {
        if (k % 2 == 0) return std::nullopt;
        auto r = exact_root(-x, k);
        if (!r) return std::nullopt;
        return mpz_class(-*r);
    }
    mpz_class r;
    if (mpz_root(r.get_mpz_t(), x.get_mpz_t(), k) == 0) return std::nullopt;
    return r;
}

} // namespace

Expr pow(const Expr& e, const Rational& r)
{
    if (r.is_integer()) {
        mpz_class n = r.num();
        if (!n.fits_slong_p()) throw std::overflow_error("exponent too large");
        return e.pow(n.get_si());
    }
    if (e.is_zero()) {
        if (r.sign() < 0) throw DivisionByZeroPolynomial("zero raised to a negative power");
        return Expr();
    }
    mpz_class num = r.num(), den = r.den();
    mpz_class whole;
    mpz_fdiv_q(whole.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    Rational frac = r - Rational(mpq_class(whole));
    Expr int_part = e.pow(whole.get_si());
    if (auto c = e.as_rational()) {
        unsigned long k = den.get_ui();
        auto pn = exact_root(c->num(), k);
        auto pd = exact_root(c->den(), k);
        if (pn && pd) {
            Rational root{mpq_class(*pn, *pd)};
            return Expr(root.pow(num.get_si()));
        }
    }
    return int_part * make_atom(AtomKind::Pow, e, frac);
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

using PolyRule = std::unordered_map<std::uint64_t, Poly>;

Poly derive_poly(const Poly& p, const PolyRule& rule)
{
    std::unordered_map<Monomial, Rational, MonomialHash> acc;
    for (const auto& t : p.terms()) {
        for (std::size_t n = 0; n < t.mono.size(); ++n) {
            Symbol s = t.mono.symbol(n);
            auto it = rule.find(s.key());
            if (it == rule.end()) continue;
            Monomial base = t.mono.reduce_one(s);
            Rational c = t.coeff * Rational(t.mono.exponent(n));
            for (const auto& q : it->second.terms()) {
                auto [pos, inserted] = acc.try_emplace(base * q.mono);
                pos->second += c * q.coeff;
            }
        }
    }
    std::vector<Term> terms;
    terms.reserve(acc.size());
    for (auto& [m, c] : acc)
        if (!c.is_zero()) terms.push_back({m, std::move(c)});
    return Poly::from_terms(std::move(terms));
}

Expr derive_with_poly_rule(const Expr& e, const PolyRule& rule)
{
    const Poly& num = e.numerator();
    const auto& den = e.denominator();
    Poly dnum = derive_poly(num, rule);
    std::vector<std::size_t> moving;
    std::vector<Poly> dp(den.size());
    for (std::size_t k = 0; k < den.size(); ++k) {
        dp[k] = derive_poly(den[k].poly, rule);
        if (!dp[k].is_zero()) moving.push_back(k);
    }
    if (moving.empty()) {
        if (den.empty()) return Expr(std::move(dnum));
        return Expr::fraction(std::move(dnum), den);
    }
    Poly all = Poly::constant(1);
    for (auto k : moving) all = all * den[k].poly;
    Poly correction;
    for (auto k : moving) {
        Poly others = Poly::constant(1);
        for (auto l : moving)
            if (l != k) others = others * den[l].poly;
        correction = correction + (dp[k] * others).scaled(Rational(den[k].exp));
    }
    std::vector<Factor> new_den = den;
    for (auto k : moving) new_den[k].exp += 1;
    return Expr::fraction(dnum * all - num * correction, std::move(new_den));
}

Expr atom_derivative(Symbol atom, const DerivationRule& rule)
{
    AtomInfo info = atom_info(atom);
    Expr darg = derive(info.arg, rule);
    if (darg.is_zero()) return Expr();
    switch (info.kind) {
    case AtomKind::Exp: return Expr(atom) * darg;
    case AtomKind::Log: return darg / info.arg;
    case AtomKind::Sin: return cos(info.arg) * darg;
    case AtomKind::Cos: return -sin(info.arg) * darg;
    case AtomKind::Pow: return Expr(info.exponent) * Expr(atom) * darg / info.arg;
    }
    return Expr();
}

} // namespace

Expr derive(const Expr& e, const DerivationRule& rule)
{
    std::unordered_map<std::uint64_t, Expr> images;
    bool all_poly = true;
    for (Symbol s : e.symbols()) {
        Expr d = s.kind() == SymbolKind::Atom ? atom_derivative(s, rule) : rule(s);
        if (d.is_zero()) continue;
        if (!d.is_polynomial()) all_poly = false;
        images.emplace(s.key(), std::move(d));
    }
    if (images.empty()) return Expr();
    if (all_poly) {
        PolyRule rule_poly;
        for (auto& [k, d] : images) rule_poly.emplace(k, d.numerator());
        return derive_with_poly_rule(e, rule_poly);
    }
    Expr sum;
    for (auto& [k, d] : images) {
        PolyRule unit{{k, Poly::constant(1)}};
        sum += derive_with_poly_rule(e, unit) * d;
    }
    return sum;
}

Expr differentiate(const Expr& e, Symbol s)
{
    return derive(e, [s](Symbol x) { return x == s ? Expr(1) : Expr(); });
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

using KeyBindings = std::unordered_map<std::uint64_t, Expr>;

struct PowerCache {
    const Expr* value;
    Poly den;
    std::vector<Poly> num_powers{Poly::constant(1)};
    std::vector<Poly> den_powers{Poly::constant(1)};

    const Poly& num_pow(std::uint32_t e)
    {
        while (num_powers.size() <= e) num_powers.push_back(num_powers.back() * value->numerator());
        return num_powers[e];
    }
    const Poly& den_pow(std::uint32_t e)
    {
        while (den_powers.size() <= e) den_powers.push_back(den_powers.back() * den);
        return den_powers[e];
    }
};

Expr substitute_poly(const Poly& p, const KeyBindings& bindings)
{
    std::unordered_map<std::uint64_t, std::uint32_t> max_exp;
    struct Group {
        Monomial bound;
        std::vector<Term> rest;
    };
    std::unordered_map<Monomial, std::size_t, MonomialHash> group_index;
    std::vector<Group> groups;
    for (const auto& t : p.terms()) {
        Monomial bound, rest;
        for (std::size_t n = 0; n < t.mono.size(); ++n) {
            Symbol s = t.mono.symbol(n);
            Monomial m(s, t.mono.exponent(n));
            if (bindings.count(s.key())) {
                bound = bound * m;
                auto& me = max_exp[s.key()];
                me = std::max(me, t.mono.exponent(n));
            } else {
                rest = rest * m;
            }
        }
        auto [it, inserted] = group_index.try_emplace(bound, groups.size());
        if (inserted) groups.push_back({bound, {}});
        groups[it->second].rest.push_back({std::move(rest), t.coeff});
    }
    if (max_exp.empty()) return Expr(p);

    std::unordered_map<std::uint64_t, PowerCache> caches;
    std::vector<Factor> den;
    for (auto& [key, e] : max_exp) {
        const Expr& val = bindings.at(key);
        PowerCache cache{&val, val.denominator_poly()};
        caches.emplace(key, std::move(cache));
        for (const auto& f : val.denominator()) den.push_back({f.poly, f.exp * e});
    }

    Poly total;
    for (auto& g : groups) {
        Poly value = Poly::constant(1);
        std::size_t n = 0;
        // bound variables absent from this group still contribute den^E
        for (auto& [key, e] : max_exp) {
            auto& cache = caches.at(key);
            std::uint32_t have = 0;
            for (n = 0; n < g.bound.size(); ++n)
                if (g.bound.symbol(n).key() == key) have = g.bound.exponent(n);
            if (have > 0) value = value * cache.num_pow(have);
            if (!cache.value->is_polynomial() && e > have) value = value * cache.den_pow(e - have);
        }
        total = total + value * Poly::from_terms(std::move(g.rest));
    }
    return Expr::fraction(std::move(total), std::move(den));
}

Expr substitute_keys(const Expr& e, const KeyBindings& bindings)
{
    Expr num = substitute_poly(e.numerator(), bindings);
    if (e.denominator().empty()) return num;
    Expr den(1);
    for (const auto& f : e.denominator()) {
        Expr fs = substitute_poly(f.poly, bindings);
        if (fs.is_zero()) throw DivisionByZeroPolynomial("substitution makes a denominator vanish");
        den = den * fs.pow(f.exp);
    }
    return num / den;
}

Expr rebuild_atom(const AtomInfo& info, const Expr& arg)
{
    switch (info.kind) {
    case AtomKind::Exp: return exp(arg);
    case AtomKind::Log: return log(arg);
    case AtomKind::Sin: return sin(arg);
    case AtomKind::Cos: return cos(arg);
    case AtomKind::Pow: return pow(arg, info.exponent);
    }
    return arg;
}

void bind_atoms(const Expr& e, const Bindings& bindings, KeyBindings& keyed)
{
    for (Symbol s : e.symbols()) {
        if (s.kind() != SymbolKind::Atom || keyed.count(s.key())) continue;
        AtomInfo info = atom_info(s);
        bool touched = false;
        for (Symbol f : info.arg.free_symbols())
            if (bindings.count(f)) {
                touched = true;
                break;
            }
        if (!touched) continue;
        Expr arg = substitute(info.arg, bindings);
        keyed.emplace(s.key(), rebuild_atom(info, arg));
    }
}

} // namespace

Expr substitute(const Expr& e, const Bindings& bindings)
{
    if (bindings.empty()) return e;
    for (const auto& [s, val] : bindings)
        for (Symbol f : val.free_symbols())
            if (bindings.count(f))
                throw CyclicSubstitution("substitution is cyclic: " + f.name() + " occurs in the value bound to " +
                                         s.name());
    KeyBindings keyed;
    for (const auto& [s, val] : bindings) keyed.emplace(s.key(), val);
    bind_atoms(e, bindings, keyed);
    bool any = false;
    for (Symbol s : e.symbols())
        if (keyed.count(s.key())) {
            any = true;
            break;
        }
    if (!any) return e;
    return substitute_keys(e, keyed);
}

// ---------------------------------------------------------------------------
// Equality and evaluation

bool canonical_equal(const Expr& a, const Expr& b)
{
    Expr d = a - b;
    if (d.is_zero()) return true;
    if (d.has_atoms())
        throw UnsupportedForm("difference contains transcendental subterms; use probabilistic_equal");
    return false;
}

double eval_numeric(const Expr& e, const NumericPoint& point)
{
    std::unordered_map<std::uint64_t, double> atom_values;
    std::function<double(Symbol)> value = [&](Symbol s) -> double {
        if (s.kind() != SymbolKind::Atom) {
            auto it = point.find(s);
            if (it == point.end()) throw UnboundSymbol("unbound symbol " + s.name());
            return it->second;
        }
        auto it = atom_values.find(s.key());
        if (it != atom_values.end()) return it->second;
        AtomInfo info = atom_info(s);
        double x = eval_numeric(info.arg, point);
        double r = 0;
        switch (info.kind) {
        case AtomKind::Exp: r = std::exp(x); break;
        case AtomKind::Log:
            if (!(x > 0)) throw NumericDomain("log of a non-positive value");
            r = std::log(x);
            break;
        case AtomKind::Sin: r = std::sin(x); break;
        case AtomKind::Cos: r = std::cos(x); break;
        case AtomKind::Pow:
            if (x < 0) throw NumericDomain("fractional power of a negative value");
            r = std::pow(x, info.exponent.to_double());
            break;
        }
        atom_values.emplace(s.key(), r);
        return r;
    };
    double num = e.numerator().eval(value);
    double den = 1;
    for (const auto& f : e.denominator()) den *= std::pow(f.poly.eval(value), static_cast<double>(f.exp));
    if (den == 0) throw NumericDomain("division by zero");
    return num / den;
}

ProbabilisticVerdict probabilistic_equal(const Expr& a, const Expr& b, int points, std::uint64_t seed,
                                         double tolerance)
{
    if (points < 20) throw std::invalid_argument("probabilistic equality needs at least 20 points");
    ProbabilisticVerdict verdict;
    verdict.points = points;
    Expr d = a - b;
    if (d.is_zero()) {
        verdict.equal = true;
        return verdict;
    }
    if (!d.has_atoms()) {
        // exact evaluation of the cleared numerator modulo a 61-bit prime
        double bound = 1;
        double degree = static_cast<double>(d.numerator().total_degree());
        bool all_zero = true;
        for (int k = 0; k < points && all_zero; ++k) {
            auto salt = splitmix(seed + static_cast<std::uint64_t>(k));
            if (d.numerator().eval_mod([salt](Symbol s) { return random_residue(s, salt); }) != 0) all_zero = false;
            bound *= degree / static_cast<double>(modp::kPrime);
        }
        verdict.equal = all_zero;
        verdict.false_positive_bound = all_zero ? bound : 0;
        return verdict;
    }
    verdict.exact_arithmetic = false;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.25, 1.75);
    auto syms = a.free_symbols();
    auto more = b.free_symbols();
    syms.insert(more.begin(), more.end());
    int agreed = 0;
    for (int attempt = 0; attempt < points * 20 && agreed < points; ++attempt) {
        NumericPoint pt;
        for (Symbol s : syms) pt[s] = dist(rng);
        double va, vb;
        try {
            va = eval_numeric(a, pt);
            vb = eval_numeric(b, pt);
        } catch (const NumericDomain&) {
            continue;
        }
        if (std::abs(va - vb) > tolerance * (1 + std::abs(va) + std::abs(vb))) {
            verdict.equal = false;
            return verdict;
        }
        ++agreed;
    }
    verdict.equal = agreed == points;
    verdict.points = agreed;
    return verdict;
}

RationalNormalForm normal_form(const Expr& e)
{
    const Poly& num = e.numerator();
    mpz_class lcm = 1;
    for (const auto& t : num.terms()) {
        mpz_class d = t.coeff.den();
        mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), d.get_mpz_t());
    }
    Poly n = num.scaled(Rational(mpq_class(lcm)));
    Poly d = e.denominator_poly().scaled(Rational(mpq_class(lcm)));
    Rational g = rational_gcd(n.is_zero() ? Rational() : n.content(), d.content());
    if (n.is_zero()) return {Poly(), Poly::constant(1)};
    return {n.scaled(g.inverse()), d.scaled(g.inverse())};
}

std::string RationalNormalForm::str() const
{
    return "(" + poly_str(numerator) + ")/(" + poly_str(denominator) + ")";
}

} // namespace invforge
