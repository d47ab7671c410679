#include "invforge/jet.hpp"

#include "invforge/errors.hpp"

#include <boost/math/special_functions/binomial.hpp>

namespace invforge::jet {

namespace {

Expr binom(int n, int k) { return Expr(static_cast<long long>(boost::math::binomial_coefficient<double>(n, k))); }

int delta(int a, int b) { return a == b ? 1 : 0; }

} // namespace

Expr total_derivative(const Expr& e, Dir dir)
{
    return derive(e, [dir](Symbol s) -> Expr {
        switch (s.kind()) {
        case SymbolKind::U: return dir == Dir::U ? Expr(1) : Expr();
        case SymbolKind::V: return dir == Dir::V ? Expr(1) : Expr();
        case SymbolKind::Jet: {
            auto [i, j] = s.indices();
            return dir == Dir::U ? f(i + 1, j) : f(i, j + 1);
        }
        case SymbolKind::PhiDeriv: return dir == Dir::U ? phi(s.indices().first + 1) : Expr();
        default: return Expr();
        }
    });
}

int order(const Expr& e)
{
    int best = -1;
    for (Symbol s : e.free_symbols())
        if (s.kind() == SymbolKind::Jet) {
            auto [i, j] = s.indices();
            best = std::max(best, i + j);
        }
    return best;
}

JetMap concrete_jet(const Expr& fn, int max_order)
{
    if (max_order < 0) throw InvalidOrder("jet order must be non-negative");
    JetMap out;
    Expr column = fn;
    for (int i = 0; i <= max_order; ++i) {
        Expr cur = column;
        for (int j = 0; i + j <= max_order; ++j) {
            out.emplace(std::pair{i, j}, cur);
            cur = differentiate(cur, Symbol::v());
        }
        column = differentiate(column, Symbol::u());
    }
    return out;
}

Bindings jet_bindings(const JetMap& jets)
{
    Bindings b;
    for (const auto& [ij, e] : jets) b.emplace(Symbol::jet(ij.first, ij.second), e);
    return b;
}

std::map<std::pair<int, int>, double> numeric_jet(const JetMap& jets, double u, double v)
{
    NumericPoint pt{{Symbol::u(), u}, {Symbol::v(), v}};
    std::map<std::pair<int, int>, double> out;
    for (const auto& [ij, e] : jets) out.emplace(ij, eval_numeric(e, pt));
    return out;
}

VectorField general_field()
{
    const Expr t = Symbol::t(), x = Symbol::x(), v = Symbol::v();
    const Expr c0 = Symbol::alg_const(0), c1 = Symbol::alg_const(1), c2 = Symbol::alg_const(2),
               c3 = Symbol::alg_const(3);
    VectorField q;
    q.tau = Expr(2) * c1 * t + c0;
    q.xi = c1 * x + c2 * t + c3;
    q.phi = phi(0);
    q.eta = (phi(1) - c1) * v;
    q.theta = (phi(1) - Expr(2) * c1) * f(0, 0) - c2 * v - phi(2) * v * v;
    return q;
}

Expr prolong_component(int i, int j)
{
    if (i < 0 || j < 0) throw InvalidIndex("jet indices must be non-negative");
    const Expr v = Symbol::v();
    const Expr c1 = Symbol::alg_const(1), c2 = Symbol::alg_const(2);
    Expr first;
    for (int k = 0; k <= i; ++k) first += binom(i, k) * phi(k + 1) * f(i - k, j);
    Expr second;
    for (int k = 1; k <= i; ++k) second += binom(i, k) * (phi(k) * f(i - k + 1, j) + v * phi(k + 1) * f(i - k, j + 1));
    return -Expr(j - 1) * first - second + Expr(j - 2) * c1 * f(i, j) -
           c2 * Expr(delta(0, i)) * (Expr(delta(0, j)) * v + Expr(delta(1, j))) -
           phi(i + 2) * (Expr(delta(0, j)) * v * v + Expr(2 * delta(1, j)) * v + Expr(2 * delta(2, j)));
}

Expr prolong_component_by_operators(int i, int j)
{
    if (i < 0 || j < 0) throw InvalidIndex("jet indices must be non-negative");
    VectorField q = general_field();
    Expr e = q.theta - q.phi * f(1, 0) - q.eta * f(0, 1);
    for (int k = 0; k < j; ++k) e = total_derivative(e, Dir::V);
    for (int k = 0; k < i; ++k) e = total_derivative(e, Dir::U);
    return e + q.phi * f(i + 1, j) + q.eta * f(i, j + 1);
}

Expr prolonged_action(const Expr& e)
{
    VectorField q = general_field();
    Expr out = q.phi * differentiate(e, Symbol::u()) + q.eta * differentiate(e, Symbol::v());
    for (Symbol s : e.free_symbols())
        if (s.kind() == SymbolKind::Jet) {
            auto [i, j] = s.indices();
            out += prolong_component(i, j) * differentiate(e, s);
        }
    return out;
}

} // namespace invforge::jet
