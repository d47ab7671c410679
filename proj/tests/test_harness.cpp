#include "catch_amalgamated.hpp"

#include "invforge/errors.hpp"
#include "invforge/harness.hpp"
#include "invforge/parse.hpp"
#include "invforge/structure.hpp"

#include <cmath>

using namespace invforge;
using namespace invforge::harness;

TEST_CASE("invariance under random group elements")
{
    auto r = invariance_test(parse("exp(u)"), 2, 100, 1);
    CHECK(r.samples == 100);
    CHECK(r.max_rel_error <= 1e-9);
    CHECK(r.failures.empty());
    for (const auto& text : corpus()) {
        INFO(text);
        auto rep = invariance_test(parse(text), 4, 10, 7);
        CHECK(rep.max_rel_error <= 1e-9);
    }
    auto control = invariance_test(parse("exp(u) + v^3"), {{1, 1, jet::f(1, 1)}, {0, 3, frame::relative_W()}}, 2, 5, 1);
    CHECK(control.failures.size() == 10);
    CHECK_THROWS_AS(invariance_test(parse("v^2"), 2, 5, 1), NoRegularPoint);
    CHECK_THROWS_AS(invariance_test(parse("v^3"), 5, 5, 1), InvalidOrder);
}

TEST_CASE("invariants of v^3 are constant")
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto p = sample_regular_point(parse("v^3"), seed);
        auto jets = numeric_jets(parse("v^3"), p.u, p.v, 3);
        NumericPoint pt{{Symbol::u(), p.u}, {Symbol::v(), p.v}};
        for (const auto& [ij, x] : jets) pt[Symbol::jet(ij.first, ij.second)] = x;
        CHECK(eval_numeric(frame::normalized_invariant(1, 1).expr, pt) == Catch::Approx(-6));
        CHECK(eval_numeric(frame::normalized_invariant(0, 3).expr, pt) == Catch::Approx(6));
    }
}

TEST_CASE("reports are deterministic")
{
    auto a = invariance_test(parse("sin(u) + v^3"), 3, 5, 99).to_json().dump();
    auto b = invariance_test(parse("sin(u) + v^3"), 3, 5, 99).to_json().dump();
    CHECK(a == b);
}

TEST_CASE("independence ranks")
{
    Expr f = parse("exp(u) + v^3");
    Expr i11 = frame::normalized_invariant(1, 1).expr;
    CHECK(independence_rank({i11}, f, 5, 3) == 1);
    CHECK(independence_rank({i11, Expr(2) * i11}, f, 5, 3) == 1);
    std::vector<Expr> basis;
    for (const auto& b : structure::functional_basis(3)) basis.push_back(structure::expand_abstract(b.symbol));
    CHECK(independence_rank(basis, f, 5, 3) == 4);
}

TEST_CASE("explicit images agree with the point action")
{
    auto g = group::random_element(5, group::Mode::Symbolic, 1);
    Expr f = parse("exp(u) + v^3");
    Expr img = image_of(f, g);
    for (auto [u, v] : {std::pair{0.3, 1.2}, std::pair{-0.4, 0.7}}) {
        double fv = eval_numeric(f, {{Symbol::u(), u}, {Symbol::v(), v}});
        auto p = group::act_point(g, u, v, fv);
        CHECK(eval_numeric(img, {{Symbol::u(), p.u}, {Symbol::v(), p.v}}) == Catch::Approx(p.f).epsilon(1e-12));
    }
    CHECK(group::check_class_preservation(g, f));
    CHECK_THROWS_AS(image_of(f, group::random_element(5, group::Mode::Symbolic, 3)), UnsupportedForm);
}

TEST_CASE("signatures are invariant")
{
    auto g = group::random_element(8, group::Mode::Symbolic, 1);
    Expr f = parse("exp(u)");
    Expr img = image_of(f, g);
    double u = 0.2, v = 1.1;
    auto p = group::act_point(g, u, v, std::exp(u));
    auto a = signature_at(f, u, v), b = signature_at(img, p.u, p.v);
    for (std::size_t k = 0; k < 4; ++k) CHECK(a.values[k] == Catch::Approx(b.values[k]).epsilon(1e-10));
}

TEST_CASE("necessary-condition equivalence")
{
    auto r = equivalence_necessary(parse("exp(u)"), parse("v^3"), 10, 1e-6, 4);
    CHECK(r.verdict == Verdict::Inequivalent);
    auto back = equivalence_necessary(parse("v^3"), parse("exp(u)"), 10, 1e-6, 4);
    CHECK(back.verdict == Verdict::Inequivalent);
    auto img = image_of(parse("exp(u)"), group::random_element(21, group::Mode::Symbolic, 1));
    auto c = equivalence_necessary(parse("exp(u)"), img, 10, 1e-6, 4);
    INFO(c.to_json().dump());
    CHECK(c.verdict == Verdict::Consistent);
    CHECK(equivalence_necessary(parse("u + v^2"), parse("u + v^2"), 10, 1e-6, 4).verdict == Verdict::Consistent);
    // phi' < 0 sends v > 0 to v~ < 0
    auto flip = group::random_element(4, group::Mode::Symbolic, 1);
    REQUIRE(flip.taylor().coeffs.at(1) < Rational(0));
    CHECK(equivalence_necessary(parse("exp(u)"), image_of(parse("exp(u)"), flip), 100, 1e-6, 4).verdict ==
          Verdict::Consistent);
    CHECK_THROWS_AS(equivalence_necessary(parse("v^2"), parse("v^3"), 5, 1e-6, 4), NoRegularPoint);
}
