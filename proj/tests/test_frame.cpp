#include "catch_amalgamated.hpp"

#include "invforge/errors.hpp"
#include "invforge/frame.hpp"
#include "invforge/parse.hpp"

using namespace invforge;
using jet::f;

namespace {

const Expr u = Symbol::u();
const Expr v = Symbol::v();

Expr W() { return frame::relative_W(); }

Expr i11_closed_form()
{
    return Expr(-2) * v * v * (Expr(4) * f(1, 0) - Expr(2) * v * f(1, 1) + W() * f(0, 2)) / W().pow(2);
}

} // namespace

TEST_CASE("relative invariants of sample nonlinearities")
{
    auto cube = jet::concrete_jet(parse("v^3"), 2);
    CHECK(frame::relative_W(cube) == Expr(2) * v.pow(3));
    CHECK(frame::relative_S(cube).is_zero());
    auto one = jet::concrete_jet(parse("1"), 2);
    CHECK(frame::relative_W(one) == Expr(2));
    auto ex = jet::concrete_jet(parse("exp(u)"), 2);
    CHECK(frame::relative_W(ex) == Expr(2) * exp(u));
    CHECK(frame::relative_S(ex) == Expr(2) * exp(u));
}

TEST_CASE("classification of strata")
{
    auto r = frame::classify(parse("u+v^2"), 1, 1);
    CHECK(r.tag == frame::Regularity::Regular);
    CHECK(r.W == Expr(2));
    auto s = frame::classify(parse("u+v^2"), 0, 1);
    CHECK(s.tag == frame::Regularity::Singular);
    CHECK(s.S == Expr(2));
    CHECK(s.exact);
    CHECK(frame::classify(parse("v^2"), 1, 1).tag == frame::Regularity::UltraSingular);
    CHECK(frame::classify(parse("v^2"), Rational(-3, 7), 5).tag == frame::Regularity::UltraSingular);
    auto e = frame::classify(parse("exp(u)"), 0, 1);
    CHECK(e.tag == frame::Regularity::Regular);
}

TEST_CASE("moving frame closed forms")
{
    auto fr = frame::solve_frame(3);
    CHECK(canonical_equal(fr.C1, W() / (Expr(2) * v)));
    CHECK(canonical_equal(fr.C2, f(0, 1) - v * f(0, 2)));
    CHECK(fr.phi[0].is_zero());
    CHECK(canonical_equal(fr.phi[1], W() / (Expr(2) * v * v)));
    CHECK(canonical_equal(fr.phi[2], W() * f(0, 2) / (Expr(4) * v * v)));
    CHECK(canonical_equal(fr.phi[3], frame::phi3_closed_form()));
    auto jets = group::transform_jet(group::GroupElement::formal(), 3);
    auto b = fr.bindings();
    CHECK(substitute(jets.at({0, 0}), b) == Expr(1));
    CHECK(substitute(jets.at({0, 1}), b).is_zero());
    CHECK(substitute(jets.at({0, 2}), b).is_zero());
    for (int i = 1; i <= 3; ++i) CHECK(substitute(jets.at({i, 0}), b).is_zero());
    CHECK_THROWS_AS(frame::solve_frame(1), InvalidOrder);
}

TEST_CASE("frame of v^3 at (1,1)")
{
    auto fr = frame::solve_frame(2);
    auto jets = jet::concrete_jet(parse("v^3"), 2);
    auto val = [&](const Expr& e) { return substitute(substitute(e, jet::jet_bindings(jets)), {{Symbol::v(), 1}}); };
    CHECK(val(fr.C1) == Expr(1));
    CHECK(val(fr.C2) == Expr(-3));
    CHECK(val(fr.phi[1]) == Expr(1));
    CHECK(val(fr.phi[2]) == Expr(3));
}

TEST_CASE("normalized invariants")
{
    CHECK(canonical_equal(frame::normalized_invariant(1, 1).expr, i11_closed_form()));
    CHECK(frame::normalized_invariant(1, 1).order == 2);
    CHECK_FALSE(frame::normalized_invariant(1, 1).phantom);
    CHECK(canonical_equal(frame::normalized_invariant(0, 3).expr, Expr(2) * v.pow(3) * f(0, 3) / W()));
    CHECK(frame::normalized_invariant(3, 0).phantom);
    CHECK(frame::normalized_invariant(3, 0).expr.is_zero());
    CHECK(frame::invariantize(u).is_zero());
    CHECK(frame::invariantize(v) == Expr(1));
    CHECK(canonical_equal(frame::invariantize(f(1, 1)), i11_closed_form()));
    CHECK_THROWS_AS(frame::invariantize(f(0, 4), frame::solve_frame(3)), FrameOrderTooLow);
}

TEST_CASE("invariantization is idempotent")
{
    for (int i = 0; i <= 4; ++i)
        for (int j = 1; i + j <= 4; ++j) {
            if (frame::is_phantom(i, j)) continue;
            const Expr& e = frame::normalized_invariant(i, j).expr;
            INFO(i << "," << j);
            CHECK(canonical_equal(frame::invariantize(e), e));
        }
}

TEST_CASE("non-phantom invariants have order i+j")
{
    for (int i = 0; i <= 3; ++i)
        for (int j = 1; i + j <= 4; ++j) {
            if (frame::is_phantom(i, j)) continue;
            CHECK(jet::order(frame::normalized_invariant(i, j).expr) == i + j);
        }
}

TEST_CASE("closed second u-derivative against the operator form")
{
    const Expr p1 = Symbol::phi(1), p2 = Symbol::phi(2);
    const Expr C1 = Symbol::group_const(1);
    auto du = [](const Expr& e) { return jet::total_derivative(e, jet::Dir::U); };
    Expr r = p2 / p1;
    Expr nested = du(Expr(1) / p1 * du(du(Expr(1) / p1)));
    auto closed = [&](int s) {
        return (f(2, 0) - Expr(s) * r * (f(1, 0) - Expr(2) * v * f(1, 1)) + r * r * v * v * f(0, 2) +
                du(r) * (f(0, 0) - v * f(0, 1)) - Expr(s) * p1 * p1 * nested * v * v) /
               (C1 * C1 * p1);
    };
    Expr derived = group::transform_jet(group::GroupElement::formal(), 2).at({2, 0});
    CHECK_FALSE(canonical_equal(derived, closed(1)));
    CHECK(canonical_equal(derived, closed(-1)));
}
