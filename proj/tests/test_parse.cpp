#include "catch_amalgamated.hpp"

#include "invforge/errors.hpp"
#include "invforge/parse.hpp"

#include <random>

using namespace invforge;

namespace {

Expr random_expr(std::mt19937_64& rng, int depth)
{
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 3 : 9);
    std::uniform_int_distribution<int> small(-4, 4);
    const Expr u = Symbol::u(), v = Symbol::v();
    switch (pick(rng)) {
    case 0: return Expr(Rational(small(rng), 1 + std::abs(small(rng))));
    case 1: return u;
    case 2: return v;
    case 3: return Expr(Symbol::jet(std::abs(small(rng)) % 3, std::abs(small(rng)) % 3));
    case 4: return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 5: return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    case 6: {
        Expr d = random_expr(rng, depth - 1);
        return d.is_zero() ? d : random_expr(rng, depth - 1) / d;
    }
    case 7: return exp(random_expr(rng, depth - 1));
    case 8: return random_expr(rng, depth - 1).pow(2);
    default: return sin(u + v) * random_expr(rng, depth - 1);
    }
}

} // namespace

TEST_CASE("parser accepts the user grammar")
{
    const Expr u = Symbol::u(), v = Symbol::v();
    CHECK(parse("v^3") == v.pow(3));
    CHECK(parse("ux^3") == v.pow(3));
    CHECK(parse("exp(u) + 2*v") == exp(u) + Expr(2) * v);
    CHECK(parse("0.5*v") == Expr(Rational(1, 2)) * v);
    CHECK(parse("2^3^2") == Expr(512));
    CHECK(parse("-v^2") == -(v * v));
    CHECK(parse("v^(1/2)") == pow(v, Rational(1, 2)));
    CHECK(parse("u/(1+v)\n - 3") == u / (Expr(1) + v) - Expr(3));
}

TEST_CASE("parser reports positions")
{
    try {
        parse("u +* v");
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.line() == 1);
        CHECK(e.column() == 4);
    }
    try {
        parse("u + w");
        FAIL("expected an unknown identifier");
    } catch (const UnknownIdentifier& e) {
        CHECK(e.name() == "w");
        CHECK(e.column() == 5);
    }
    CHECK_THROWS_AS(parse("2v"), SyntaxError);
    CHECK_THROWS_AS(parse("f_v"), UnknownIdentifier);
    CHECK_THROWS_AS(parse("t + u"), UnknownIdentifier);
    CHECK_THROWS_AS(parse("v^u"), SyntaxError);
    CHECK_THROWS_AS(parse("(u"), SyntaxError);
    CHECK_THROWS_AS(parse("u $ v"), SyntaxError);
}

TEST_CASE("printing styles")
{
    Expr w = parse("2*f - 2*v*f_v + v^2*f_vv", ParseMode::Engine);
    CHECK(print(w) == "2*f - 2*v*f_v + v^2*f_vv");
    CHECK(print(w, PrintStyle::Latex).find("f_{vv}") != std::string::npos);
    auto j = nlohmann::json::parse(print(parse("v^3"), PrintStyle::Json));
    CHECK(j["op"] == "pow");
    CHECK(j["args"][0]["name"] == "v");
    CHECK(j["args"][1]["num"] == "3");
}

TEST_CASE("print then parse round trips")
{
    std::mt19937_64 rng(11);
    for (int k = 0; k < 200; ++k) {
        Expr e = random_expr(rng, 3);
        Expr back = parse(print(e), ParseMode::Engine);
        INFO(print(e));
        if (e.has_atoms())
            CHECK(back == e);
        else
            CHECK(canonical_equal(back, e));
    }
}
