#include "invforge/structure.hpp"

#include "invforge/errors.hpp"

#include <boost/math/special_functions/binomial.hpp>

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <mutex>

namespace invforge::structure {

namespace {

using jet::f;

Expr binom(int n, int k) { return Expr(static_cast<long long>(boost::math::binomial_coefficient<double>(n, k))); }

char letter(Dir d) { return d == Dir::U ? 'u' : 'v'; }

Symbol deriv_symbol(Symbol s, Dir d)
{
    auto [i, j] = s.indices();
    std::string word = s.kind() == SymbolKind::Invariant ? "" : s.word();
    return Symbol::inv_deriv(i, j, std::string(1, letter(d)) + word);
}

struct ClosedCache {
    std::mutex mutex;
    std::map<std::uint64_t, Expr> table;
};

ClosedCache& closed_cache()
{
    static ClosedCache cache;
    return cache;
}

/// Closed form of an abstract symbol I^{ij} or a derivative word of it.
Expr closed_form(Symbol s)
{
    auto& cache = closed_cache();
    {
        std::lock_guard lock(cache.mutex);
        auto it = cache.table.find(s.key());
        if (it != cache.table.end()) return it->second;
    }
    auto [i, j] = s.indices();
    Expr out;
    if (s.kind() == SymbolKind::Invariant) {
        out = frame::normalized_invariant(i, j).expr;
    } else {
        std::string word = s.word();
        Symbol inner = word.size() == 1 ? Symbol::invariant(i, j) : Symbol::inv_deriv(i, j, word.substr(1));
        out = invariant_derivative(closed_form(inner), word[0] == 'u' ? Dir::U : Dir::V);
    }
    std::lock_guard lock(cache.mutex);
    return cache.table.emplace(s.key(), out).first->second;
}

/// iota on parameter coefficients: u -> 0, v -> 1, f_{ij} -> I(i,j).
Expr iota_abstract(const Expr& e)
{
    Bindings b{{Symbol::u(), Expr()}, {Symbol::v(), Expr(1)}};
    for (Symbol s : e.free_symbols())
        if (s.kind() == SymbolKind::Jet) {
            auto [i, j] = s.indices();
            b.emplace(s, I(i, j));
        }
    return substitute(e, b);
}

OneForm phantom_relation(int i, int j, const MaurerCartan& mc)
{
    return I(i + 1, j) * omega1() + I(i, j + 1) * omega2() + iota_theta(i, j, mc);
}

bool valid_recurrence_index(int i, int j) { return (i == 1 && j == 1) || (i + j >= 3 && j != 0); }

} // namespace

OneForm omega1() { return {Expr(1), Expr()}; }
OneForm omega2() { return {Expr(), Expr(1)}; }

Expr wedge(const OneForm& a, const OneForm& b) { return a.w1 * b.w2 - a.w2 * b.w1; }

Expr I(int i, int j)
{
    if (frame::is_phantom(i, j)) return i == 0 && j == 0 ? Expr(1) : Expr();
    return Expr(Symbol::invariant(i, j));
}

Expr invariant_derivative(const Expr& e, Dir dir)
{
    const Expr v = Symbol::v();
    Expr dv = jet::total_derivative(e, Dir::V);
    if (dir == Dir::V) return v * dv;
    Expr du = jet::total_derivative(e, Dir::U);
    return Expr(2) * v * v / frame::relative_W() * (du - Expr(Rational(1, 2)) * v * f(0, 2) * dv);
}

Expr abstract_derivative(const Expr& e, Dir dir)
{
    return derive(e, [dir](Symbol s) -> Expr {
        if (s.kind() == SymbolKind::Invariant || s.kind() == SymbolKind::InvDeriv) return Expr(deriv_symbol(s, dir));
        return Expr();
    });
}

Expr expand_abstract(const Expr& e)
{
    Bindings b;
    for (Symbol s : e.free_symbols())
        if (s.kind() == SymbolKind::Invariant || s.kind() == SymbolKind::InvDeriv) b.emplace(s, closed_form(s));
    return substitute(e, b);
}

MaurerCartan maurer_cartan_forms(int max_k)
{
    if (max_k < 0) throw InvalidOrder("Maurer-Cartan order must be non-negative");
    const Expr half(Rational(1, 2));
    MaurerCartan mc;
    mc.c1 = {half * I(1, 2) - I(1, 1), half * I(0, 3) - Expr(1)};
    mc.c2 = {I(1, 1) - I(1, 2), -I(0, 3)};
    mc.phi = {OneForm{Expr(-1), Expr()}, OneForm{half * I(1, 2) - I(1, 1), half * I(0, 3) - Expr(2)},
              OneForm{half * I(1, 2), half * I(0, 3)}};
    for (int i = 1; i + 2 <= max_k; ++i) {
        OneForm next = mc.phi[static_cast<std::size_t>(i + 1)] + I(i, 1) * omega2();
        for (int k = 1; k <= i - 1; ++k) next = next - (binom(i, k) * I(i - k, 1)) * mc.phi[static_cast<std::size_t>(k + 1)];
        mc.phi.push_back(next);
    }
    mc.phi.resize(static_cast<std::size_t>(max_k) + 1);
    return mc;
}

OneForm iota_theta(int i, int j, const MaurerCartan& mc)
{
    Expr theta = jet::prolong_component(i, j);
    OneForm out;
    auto add = [&](Symbol param, const OneForm& form) {
        Expr coeff = differentiate(theta, param);
        if (!coeff.is_zero()) out = out + iota_abstract(coeff) * form;
    };
    add(Symbol::alg_const(1), mc.c1);
    add(Symbol::alg_const(2), mc.c2);
    for (Symbol s : theta.free_symbols())
        if (s.kind() == SymbolKind::PhiDeriv) {
            auto k = static_cast<std::size_t>(s.indices().first);
            if (k >= mc.phi.size()) throw InvalidOrder("Maurer-Cartan forms do not reach phi^(" + std::to_string(k) + ")");
            add(s, mc.phi[k]);
        }
    return out;
}

std::vector<RelationResult> phantom_check(int max_i) { return phantom_check(maurer_cartan_forms(max_i + 2), max_i); }

std::vector<RelationResult> phantom_check(const MaurerCartan& mc, int max_i)
{
    std::vector<RelationResult> out;
    auto record = [&](std::string name, const OneForm& r) { out.push_back({std::move(name), r.is_zero(), r}); };
    record("iota(u)", omega1() + mc.phi[0]);
    record("iota(v)", omega2() + mc.phi[1] - mc.c1);
    record("I00", phantom_relation(0, 0, mc));
    record("I01", phantom_relation(0, 1, mc));
    record("I02", phantom_relation(0, 2, mc));
    for (int i = 1; i <= max_i; ++i) record("I" + std::to_string(i) + "0", phantom_relation(i, 0, mc));
    return out;
}

std::pair<Expr, Expr> recurrence(int i, int j)
{
    if (i < 0 || j < 0 || !valid_recurrence_index(i, j))
        throw InvalidIndex("no non-phantom recurrence for I^(" + std::to_string(i) + "," + std::to_string(j) + ")");
    MaurerCartan mc = maurer_cartan_forms(i + 2);
    Symbol X = Symbol::invariant(i + 1, j), Y = Symbol::invariant(i, j + 1);
    OneForm rel = phantom_relation(i, j, mc);
    Expr e1 = rel.w1 - abstract_derivative(I(i, j), Dir::U);
    Expr e2 = rel.w2 - abstract_derivative(I(i, j), Dir::V);
    Expr a11 = differentiate(e1, X), a12 = differentiate(e1, Y);
    Expr a21 = differentiate(e2, X), a22 = differentiate(e2, Y);
    Bindings zero{{X, Expr()}, {Y, Expr()}};
    Expr b1 = -substitute(e1, zero), b2 = -substitute(e2, zero);
    Expr det = a11 * a22 - a12 * a21;
    if (det.is_zero()) throw InvalidIndex("recurrence system is degenerate");
    return {(b1 * a22 - a12 * b2) / det, (a11 * b2 - b1 * a21) / det};
}

CommutatorCoeffs commutator_coeffs()
{
    MaurerCartan mc = maurer_cartan_forms(2);
    // d_h iota(du) = phi-hat' ^ omega^1, d_h iota(dv) = iota(phi'' v) ^ omega^1
    Expr du_form = wedge(mc.phi[1], omega1());
    Expr dv_form = wedge(iota_abstract(Expr(Symbol::v())) * mc.phi[2], omega1());
    return {-du_form, -dv_form};
}

Expr commutator_defect(const Expr& e)
{
    CommutatorCoeffs y = commutator_coeffs();
    Expr y1 = expand_abstract(y.Y112), y2 = expand_abstract(y.Y212);
    Expr du = invariant_derivative(e, Dir::U), dv = invariant_derivative(e, Dir::V);
    Expr lhs = invariant_derivative(dv, Dir::U) - invariant_derivative(du, Dir::V);
    return lhs - (y1 * du + y2 * dv);
}

Expr i03_from_generator()
{
    Expr du = Expr(Symbol::inv_deriv(1, 1, "u")), dv = Expr(Symbol::inv_deriv(1, 1, "v"));
    Expr comm = Expr(Symbol::inv_deriv(1, 1, "uv")) - Expr(Symbol::inv_deriv(1, 1, "vu"));
    return Expr(2) * (Expr(2) * du + comm) / (du + dv);
}

GeneratorValue i03_from_generator_at(const Expr& fn, double u, double v)
{
    Expr gen = i03_from_generator();
    auto jets = jet::concrete_jet(fn, 4);
    NumericPoint pt{{Symbol::u(), u}, {Symbol::v(), v}};
    for (const auto& [ij, e] : jets) pt[Symbol::jet(ij.first, ij.second)] = eval_numeric(e, pt);
    Expr du = closed_form(Symbol::inv_deriv(1, 1, "u")), dv = closed_form(Symbol::inv_deriv(1, 1, "v"));
    Expr uv = closed_form(Symbol::inv_deriv(1, 1, "uv")), vu = closed_form(Symbol::inv_deriv(1, 1, "vu"));
    double ndu = eval_numeric(du, pt), ndv = eval_numeric(dv, pt);
    double nuv = eval_numeric(uv, pt), nvu = eval_numeric(vu, pt);
    double den = ndu + ndv;
    double scale = 1 + std::abs(ndu) + std::abs(ndv);
    if (std::abs(den) <= 1e-10 * scale)
        throw GeneratorDegenerate("D_u I11 + D_v I11 vanishes at the point; the generator formula is 0/0");
    double value = 2 * (2 * ndu + (nuv - nvu)) / den;
    double direct = eval_numeric(frame::normalized_invariant(0, 3).expr, pt);
    return {value, direct};
}

std::vector<BasisElement> functional_basis(int k)
{
    if (k < 2) throw InvalidOrder("functional bases start at order 2");
    std::vector<BasisElement> out;
    for (int n = 0; n <= k - 2; ++n)
        for (int i = n; i >= 0; --i) {
            int j = n - i;
            std::string word = std::string(static_cast<std::size_t>(i), 'u') + std::string(static_cast<std::size_t>(j), 'v');
            Expr sym = word.empty() ? Expr(Symbol::invariant(1, 1)) : Expr(Symbol::inv_deriv(1, 1, word));
            out.push_back({sym.str(), sym, 2 + n});
        }
    for (int j = 0; j <= k - 3; ++j) {
        std::string word(static_cast<std::size_t>(j), 'v');
        Expr sym = word.empty() ? Expr(Symbol::invariant(0, 3)) : Expr(Symbol::inv_deriv(0, 3, word));
        out.push_back({sym.str(), sym, 3 + j});
    }
    return out;
}

namespace {

struct RewriteCache {
    std::mutex mutex;
    std::map<std::pair<int, int>, Expr> table;
};

RewriteCache& rewrite_cache()
{
    static RewriteCache cache;
    return cache;
}

Expr apply_word(Expr e, const std::string& word)
{
    for (auto it = word.rbegin(); it != word.rend(); ++it) e = abstract_derivative(e, *it == 'u' ? Dir::U : Dir::V);
    return e;
}

} // namespace

Expr rewrite_in_generators(int i, int j)
{
    if (i < 0 || j < 0 || frame::is_phantom(i, j))
        throw InvalidIndex("I^(" + std::to_string(i) + "," + std::to_string(j) + ") is phantom");
    if (i == 1 && j == 1) return Expr(Symbol::invariant(1, 1));
    if (i == 0 && j == 3) return i03_from_generator();
    auto& cache = rewrite_cache();
    {
        std::lock_guard lock(cache.mutex);
        auto it = cache.table.find({i, j});
        if (it != cache.table.end()) return it->second;
    }
    Expr raw;
    if (j >= 2 && !frame::is_phantom(i, j - 1))
        raw = recurrence(i, j - 1).second;
    else
        raw = recurrence(i - 1, j).first;
    Bindings b;
    for (Symbol s : raw.free_symbols()) {
        if (s.kind() != SymbolKind::Invariant && s.kind() != SymbolKind::InvDeriv) continue;
        auto [k, l] = s.indices();
        if (k == 1 && l == 1) continue;
        Expr base = rewrite_in_generators(k, l);
        b.emplace(s, s.kind() == SymbolKind::Invariant ? base : apply_word(base, s.word()));
    }
    Expr out = substitute(raw, b);
    std::lock_guard lock(cache.mutex);
    return cache.table.emplace(std::pair{i, j}, out).first->second;
}

bool agrees_at_random_points(const Expr& abstract, const Expr& closed, int points, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long long> num(-40, 40), den(1, 17);
    std::set<Symbol> needed = closed.free_symbols();
    std::map<Symbol, Expr> closed_parts;
    for (Symbol s : abstract.free_symbols()) {
        if (s.kind() != SymbolKind::Invariant && s.kind() != SymbolKind::InvDeriv) continue;
        closed_parts.emplace(s, closed_form(s));
        for (Symbol t : closed_parts.at(s).free_symbols()) needed.insert(t);
    }
    for (int done = 0, tries = 0; done < points; ++tries) {
        if (tries > 20 * points) throw NumericDomain("no admissible sample point for the identity check");
        Bindings at;
        for (Symbol s : needed) {
            if (s.kind() != SymbolKind::Jet && s.kind() != SymbolKind::V && s.kind() != SymbolKind::U)
                throw UnsupportedForm("identity check over jets only");
            at.emplace(s, Expr(Rational(num(rng), den(rng))));
        }
        try {
            Bindings values;
            for (const auto& [s, e] : closed_parts) values.emplace(s, substitute(e, at));
            Expr lhs = substitute(abstract, values);
            Expr rhs = substitute(closed, at);
            if (lhs != rhs) return false;
            ++done;
        } catch (const DivisionByZeroPolynomial&) {
        }
    }
    return true;
}

} // namespace invforge::structure
