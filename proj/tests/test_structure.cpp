#include "catch_amalgamated.hpp"

#include "invforge/errors.hpp"
#include "invforge/parse.hpp"
#include "invforge/structure.hpp"

#include <boost/math/special_functions/binomial.hpp>

#include <cmath>

using namespace invforge;
using namespace invforge::structure;
using jet::f;

namespace {

const Expr half(Rational(1, 2));

Expr Iv(int i, int j) { return I(i, j); }
Expr D(int i, int j, const char* w) { return Expr(Symbol::inv_deriv(i, j, w)); }

Expr binom(int n, int k) { return Expr(static_cast<long long>(boost::math::binomial_coefficient<double>(n, k))); }

int delta(int a, int b) { return a == b ? 1 : 0; }

OneForm closed_iota_theta(int i, int j, const MaurerCartan& mc)
{
    auto phi = [&](int k) { return mc.phi[static_cast<std::size_t>(k)]; };
    OneForm out;
    for (int k = 0; k <= i; ++k) out = out - (Expr(j - 1) * binom(i, k) * Iv(i - k, j)) * phi(k + 1);
    for (int k = 1; k <= i; ++k)
        out = out - (binom(i, k) * Iv(i - k + 1, j)) * phi(k) - (binom(i, k) * Iv(i - k, j + 1)) * phi(k + 1);
    out = out + (Expr(j - 2) * Iv(i, j)) * mc.c1;
    out = out - Expr(delta(0, i) * (delta(0, j) + delta(1, j))) * mc.c2;
    out = out - Expr(delta(0, j) + 2 * delta(1, j) + 2 * delta(2, j)) * phi(i + 2);
    return out;
}

double at_v3(const Expr& closed)
{
    auto jets = jet::concrete_jet(parse("v^3"), 8);
    return eval_numeric(substitute(closed, jet::jet_bindings(jets)), {{Symbol::u(), 0.3}, {Symbol::v(), 1.0}});
}

} // namespace

TEST_CASE("Maurer-Cartan forms")
{
    auto mc = maurer_cartan_forms(6);
    REQUIRE(mc.phi.size() == 7);
    CHECK(mc.phi[3] == OneForm{half * Iv(1, 2), Iv(1, 1) + half * Iv(0, 3)});
    CHECK(mc.phi[4] == OneForm{half * Iv(1, 2) - Iv(1, 1) * Iv(1, 2),
                               Iv(1, 1) + half * Iv(0, 3) + Iv(2, 1) - Iv(1, 1) * Iv(0, 3)});
    for (int k = 5; k <= 6; ++k) {
        const Expr& top = mc.phi[static_cast<std::size_t>(k)].w2;
        CHECK(differentiate(top, Symbol::invariant(k - 2, 1)) == Expr(1));
        for (Symbol s : (mc.phi[static_cast<std::size_t>(k)].w1 * top).free_symbols()) {
            auto [i, j] = s.indices();
            CHECK(i + j <= k - 1);
            if (i + j == k - 1) CHECK(s == Symbol::invariant(k - 2, 1));
        }
    }
    CHECK_THROWS_AS(maurer_cartan_forms(-1), InvalidOrder);
}

TEST_CASE("phantom relations hold")
{
    for (const auto& r : phantom_check(5)) {
        INFO(r.name);
        CHECK(r.passed);
    }
}

TEST_CASE("perturbed Maurer-Cartan forms break exactly the relations that use c2")
{
    auto mc = maurer_cartan_forms(6);
    mc.c2.w2 = mc.c2.w2 + Expr(1);
    int failed = 0;
    for (const auto& r : phantom_check(mc, 4)) {
        if (!r.passed) {
            ++failed;
            CHECK((r.name == "I00" || r.name == "I01"));
        }
    }
    CHECK(failed == 2);
}

TEST_CASE("invariantized prolongation components match the closed sum")
{
    auto mc = maurer_cartan_forms(7);
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; i + j <= 5; ++j) {
            INFO(i << "," << j);
            CHECK(iota_theta(i, j, mc) == closed_iota_theta(i, j, mc));
        }
}

TEST_CASE("first recurrences")
{
    auto [i21, i12] = recurrence(1, 1);
    CHECK(i12 == D(1, 1, "v") + Iv(1, 1) * Iv(0, 3) - Iv(1, 1) + Iv(0, 3));
    CHECK(i21 == D(1, 1, "u") - Expr(2) * Iv(1, 1) * Iv(1, 1) + (Iv(1, 1) + Expr(1)) * i12);
    auto [i13, i04] = recurrence(0, 3);
    CHECK(i13 == D(0, 3, "u") - Iv(1, 1) * Iv(0, 3) + half * Iv(1, 2) * Iv(0, 3));
    CHECK(i04 == D(0, 3, "v") + half * Iv(0, 3) * Iv(0, 3) - Expr(3) * Iv(0, 3));
    CHECK(canonical_equal(expand_abstract(i04), frame::normalized_invariant(0, 4).expr));
    CHECK_FALSE(canonical_equal(expand_abstract(D(0, 3, "v") + half * Iv(0, 3) * Iv(0, 3) - Iv(0, 3)),
                                frame::normalized_invariant(0, 4).expr));
    CHECK_THROWS_AS(recurrence(0, 2), InvalidIndex);
    CHECK_THROWS_AS(recurrence(2, 0), InvalidIndex);
    CHECK_THROWS_AS(recurrence(1, 0), InvalidIndex);
}

TEST_CASE("recurrences agree with direct invariantization")
{
    for (int n = 2; n <= 4; ++n)
        for (int j = 1; j <= n; ++j) {
            int i = n - j;
            if (!(i == 1 && j == 1) && n < 3) continue;
            INFO(i << "," << j);
            auto [x, y] = recurrence(i, j);
            CHECK(canonical_equal(expand_abstract(x), frame::normalized_invariant(i + 1, j).expr));
            CHECK(canonical_equal(expand_abstract(y), frame::normalized_invariant(i, j + 1).expr));
        }
}

TEST_CASE("invariant values for v^3")
{
    CHECK(at_v3(frame::normalized_invariant(1, 1).expr) == Catch::Approx(-6));
    CHECK(at_v3(frame::normalized_invariant(0, 3).expr) == Catch::Approx(6));
    CHECK(at_v3(frame::normalized_invariant(1, 2).expr) == Catch::Approx(-24));
    CHECK(at_v3(frame::normalized_invariant(2, 1).expr) == Catch::Approx(48));
}

TEST_CASE("commutator of invariant derivatives")
{
    auto y = commutator_coeffs();
    CHECK(y.Y112 == half * Iv(0, 3) - Expr(2));
    CHECK(y.Y212 == half * Iv(0, 3));
    for (const Expr& e : {Expr(Symbol::u()), Expr(Symbol::v()), f(0, 0), f(0, 1), frame::normalized_invariant(1, 1).expr}) {
        INFO(e.str());
        CHECK(canonical_equal(commutator_defect(e), Expr()));
    }
}

TEST_CASE("I03 from the generator")
{
    Expr gen = expand_abstract(i03_from_generator());
    CHECK(canonical_equal(gen, frame::normalized_invariant(0, 3).expr));
    auto val = i03_from_generator_at(parse("u^2 + u*v^3"), 0.7, 1.3);
    CHECK(val.value == Catch::Approx(val.direct).epsilon(1e-9));
    CHECK_THROWS_AS(i03_from_generator_at(parse("exp(u)"), -std::log(2.0), 1.0), GeneratorDegenerate);
}

TEST_CASE("functional bases")
{
    auto b2 = functional_basis(2);
    REQUIRE(b2.size() == 1);
    CHECK(b2[0].symbol == Iv(1, 1));
    auto b4 = functional_basis(4);
    CHECK(b4.size() == 6 + 2);
    for (int k = 2; k <= 6; ++k) {
        int n = k - 1;
        CHECK(functional_basis(k).size() == static_cast<std::size_t>(n * (n + 1) / 2 + (k - 2)));
    }
    for (const auto& e : b4) CHECK(e.order <= 4);
    CHECK_THROWS_AS(functional_basis(1), InvalidOrder);
}

TEST_CASE("invariants rewrite in I11 and its derivatives")
{
    for (int n = 3; n <= 5; ++n)
        for (int j = 1; j <= n; ++j) {
            int i = n - j;
            INFO(i << "," << j);
            Expr r = rewrite_in_generators(i, j);
            for (Symbol s : r.free_symbols()) CHECK(s.indices() == std::pair{1, 1});
            CHECK(agrees_at_random_points(r, frame::normalized_invariant(i, j).expr, 3, 11));
        }
    CHECK_FALSE(agrees_at_random_points(rewrite_in_generators(1, 3), frame::normalized_invariant(3, 1).expr, 3, 11));
    CHECK_THROWS_AS(rewrite_in_generators(2, 0), InvalidIndex);
}
