#include "catch_amalgamated.hpp"

#include "invforge/jet.hpp"
#include "invforge/parse.hpp"

#include <random>

using namespace invforge;
using jet::Dir;
using jet::f;

namespace {

const Expr v = Symbol::v();

Expr random_jet_function(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> idx(0, 2), coeff(-3, 3), len(1, 4);
    Expr num, den(1);
    for (int k = len(rng); k > 0; --k) num += Expr(coeff(rng)) * f(idx(rng), idx(rng)) * v.pow(idx(rng));
    den += f(idx(rng), idx(rng)).pow(2) + v * v;
    return num / den;
}

} // namespace

TEST_CASE("total derivatives on the jet space")
{
    CHECK(jet::total_derivative(f(0, 0), Dir::V) == f(0, 1));
    CHECK(jet::total_derivative(v * f(0, 1), Dir::U) == v * f(1, 1));
    Expr W = Expr(2) * f(0, 0) - Expr(2) * v * f(0, 1) + v * v * f(0, 2);
    CHECK(jet::total_derivative(W, Dir::V) == v * v * f(0, 3));
    CHECK(jet::order(W) == 2);
    CHECK(jet::order(v) == -1);
}

TEST_CASE("total derivatives commute")
{
    std::mt19937_64 rng(3);
    for (int k = 0; k < 100; ++k) {
        Expr e = random_jet_function(rng);
        auto uv = jet::total_derivative(jet::total_derivative(e, Dir::U), Dir::V);
        auto vu = jet::total_derivative(jet::total_derivative(e, Dir::V), Dir::U);
        CHECK(canonical_equal(uv, vu));
    }
}

TEST_CASE("concrete jets")
{
    auto j = jet::concrete_jet(parse("v^3"), 3);
    CHECK(j.at({0, 1}) == Expr(3) * v * v);
    CHECK(j.at({0, 2}) == Expr(6) * v);
    CHECK(j.at({0, 3}) == Expr(6));
    CHECK(j.at({1, 0}).is_zero());
    CHECK(j.at({2, 1}).is_zero());
    auto e = jet::concrete_jet(parse("exp(u)"), 2);
    CHECK(e.at({1, 0}) == exp(Expr(Symbol::u())));
    CHECK(e.at({2, 0}) == exp(Expr(Symbol::u())));
    CHECK(e.at({1, 1}).is_zero());
    auto p = jet::concrete_jet(parse("u+v^2"), 2);
    CHECK(p.at({1, 0}) == Expr(1));
    CHECK(p.at({0, 1}) == Expr(2) * v);
    CHECK(p.at({0, 2}) == Expr(2));
    CHECK(p.at({1, 1}).is_zero());
}

TEST_CASE("concrete jets are compatible with total derivatives")
{
    Expr fn = parse("exp(u) + u^2*v^3");
    auto jets = jet::concrete_jet(fn, 4);
    auto b = jet::jet_bindings(jets);
    Expr e = v * f(1, 1) + f(0, 2) / (Expr(1) + f(0, 0) * f(0, 0));
    for (Dir d : {Dir::U, Dir::V}) {
        Expr lhs = substitute(jet::total_derivative(e, d), b);
        Expr rhs = differentiate(substitute(e, b), d == Dir::U ? Symbol::u() : Symbol::v());
        CHECK(probabilistic_equal(lhs, rhs).equal);
    }
}

TEST_CASE("prolongation components")
{
    const Expr c1 = Symbol::alg_const(1), c2 = Symbol::alg_const(2);
    CHECK(canonical_equal(jet::prolong_component(0, 0),
                          (jet::phi(1) - Expr(2) * c1) * f(0, 0) - c2 * v - jet::phi(2) * v * v));
    CHECK(canonical_equal(jet::prolong_component(0, 1), -c1 * f(0, 1) - c2 - Expr(2) * jet::phi(2) * v));
    Expr t02 = jet::prolong_component(0, 2);
    CHECK_FALSE(t02.depends_on(Symbol::alg_const(2)));
    CHECK(canonical_equal(differentiate(t02, Symbol::phi(2)), Expr(-2)));
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; i + j <= 4; ++j) {
            INFO(i << "," << j);
            CHECK(canonical_equal(jet::prolong_component(i, j), jet::prolong_component_by_operators(i, j)));
        }
}
