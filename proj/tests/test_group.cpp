#include "catch_amalgamated.hpp"

#include "invforge/errors.hpp"
#include "invforge/frame.hpp"
#include "invforge/group.hpp"
#include "invforge/parse.hpp"

#include <random>

using namespace invforge;
using group::GroupElement;
using jet::f;

namespace {

const Expr u = Symbol::u();
const Expr v = Symbol::v();
const Expr C1 = Symbol::group_const(1), C2 = Symbol::group_const(2);
const Expr p1 = Symbol::phi(1), p2 = Symbol::phi(2), p3 = Symbol::phi(3);

GroupElement scaling(long long c1) { return GroupElement({0, c1, 0, 0}, group::TaylorPhi{0, {0, 1}}); }

double rel(double a, double b) { return std::abs(a - b) / (1 + std::abs(a)); }

} // namespace

TEST_CASE("point action")
{
    auto id = GroupElement::identity();
    auto img = group::act_point(id, u, v, f(0, 0));
    CHECK(img.u == u);
    CHECK(img.v == v);
    CHECK(img.f == f(0, 0));
    auto num = group::act_point(scaling(2), 0.0, 1.0, 1.0);
    CHECK(num.f == Catch::Approx(0.25));
    GroupElement dbl({0, 1, 0, 0}, group::TaylorPhi{0, {0, 2}});
    CHECK(group::act_point(dbl, u, v, f(0, 0)).v == Expr(2) * v);
    GroupElement flat({0, 1, 0, 0}, group::TaylorPhi{0, {0, 1, 1}});
    CHECK_THROWS_AS(group::act_point(flat, -0.5, 1.0, 1.0), SingularGroupElement);
    CHECK_THROWS_AS(GroupElement({0, 0, 0, 0}, group::TaylorPhi{0, {0, 1}}), SingularGroupElement);
}

TEST_CASE("implicit differentiation operators")
{
    auto ops = group::implicit_diff_ops(GroupElement::identity());
    CHECK(ops.a == Expr(1));
    CHECK(ops.b.is_zero());
    CHECK(ops.c == Expr(1));
    CHECK(group::implicit_diff_ops(scaling(2)).c == Expr(2));
    auto formal = GroupElement::formal();
    auto fops = group::implicit_diff_ops(formal);
    auto img = group::act_point(formal, u, v, f(0, 0));
    CHECK(fops.apply_u(img.u) == Expr(1));
    CHECK(fops.apply_u(img.v).is_zero());
    CHECK(fops.apply_v(img.u).is_zero());
    CHECK(fops.apply_v(img.v) == Expr(1));
}

TEST_CASE("transformed jets match the low-order closed forms")
{
    auto jets = group::transform_jet(GroupElement::formal(), 2);
    CHECK(canonical_equal(jets.at({0, 1}), (p1 * f(0, 1) - C2 * p1 - Expr(2) * p2 * v) / (C1 * p1)));
    CHECK(canonical_equal(jets.at({0, 2}), (p1 * f(0, 2) - Expr(2) * p2) / (p1 * p1)));
    CHECK(canonical_equal(jets.at({1, 0}), (p1 * f(1, 0) + p2 * (f(0, 0) - v * f(0, 1)) - p3 * v * v +
                                            Expr(2) * p2 * p2 / p1 * v * v) /
                                               (C1 * C1 * p1)));
    CHECK(canonical_equal(jets.at({1, 1}), (p1 * f(1, 1) - p2 * v * f(0, 2) - Expr(2) * p3 * v +
                                            Expr(4) * p2 * p2 / p1 * v) /
                                               (C1 * p1 * p1)));
    auto id = group::transform_jet(GroupElement::identity(), 3);
    for (const auto& [ij, e] : id) CHECK(e == f(ij.first, ij.second));
}

TEST_CASE("relative invariants transform by multipliers")
{
    auto g = GroupElement::formal();
    auto jets = group::transform_jet(g, 2);
    auto img = group::act_point(g, u, v, f(0, 0));
    Expr Wt = Expr(2) * jets.at({0, 0}) - Expr(2) * img.v * jets.at({0, 1}) + img.v * img.v * jets.at({0, 2});
    Expr W = frame::relative_W();
    CHECK(canonical_equal(Wt, p1 * W / (C1 * C1)));
    CHECK_FALSE(canonical_equal(Wt, W / (C1 * C1)));
    Expr St = Expr(2) * jets.at({1, 0}) - img.v * jets.at({1, 1});
    CHECK(canonical_equal(St, frame::relative_S() / (C1 * C1) + p2 / p1 * W / (C1 * C1)));
    Expr inessential = jets.at({0, 0}) - img.v * jets.at({0, 1});
    CHECK_FALSE(inessential.depends_on(Symbol::group_const(2)));
}

TEST_CASE("group law")
{
    auto a = scaling(2), b = scaling(3);
    auto ab = group::compose(a, b);
    CHECK(ab.c(1) == Expr(6));
    auto inv = group::inverse(a);
    CHECK(inv.c(1) == Expr(Rational(1, 2)));
    auto same = group::compose(GroupElement::identity(), a);
    CHECK(same.c(1) == Expr(2));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> pt(-0.3, 0.3);
    for (int k = 0; k < 50; ++k) {
        auto g1 = group::random_element(100 + k, group::Mode::Numeric, 3);
        auto g2 = group::random_element(200 + k, group::Mode::Numeric, 3);
        double pu = pt(rng), pv = 1 + pt(rng), pf = pt(rng);
        auto seq = group::act_point(g1, group::act_point(g2, pu, pv, pf).u, group::act_point(g2, pu, pv, pf).v,
                                    group::act_point(g2, pu, pv, pf).f);
        auto comp = group::act_point(group::compose(g1, g2), pu, pv, pf);
        CHECK(rel(seq.u, comp.u) < 1e-10);
        CHECK(rel(seq.v, comp.v) < 1e-10);
        CHECK(rel(seq.f, comp.f) < 1e-10);
    }
    auto g = group::random_element(9, group::Mode::Symbolic, 1);
    auto e = group::compose(g, group::inverse(g));
    CHECK(e.c(1) == Expr(1));
    CHECK(e.c(2).is_zero());
    CHECK(e.c(0).is_zero());
    CHECK(e.c(3).is_zero());
    CHECK(e.taylor().derivative(0) == u);
}

TEST_CASE("truncated inverse is accurate near the anchor")
{
    auto g = group::random_element(17, group::Mode::Numeric, 5);
    auto gi = group::inverse(g);
    for (double du : {-1e-3, 0.0, 2e-3}) {
        double there = g.taylor().derivative_at(0, du);
        CHECK(std::abs(gi.taylor().derivative_at(0, there) - du) < 1e-12);
    }
}

TEST_CASE("random elements")
{
    auto a = group::random_element(42, group::Mode::Numeric, 4);
    auto b = group::random_element(42, group::Mode::Numeric, 4);
    CHECK(a.to_json() == b.to_json());
    for (int k = 0; k < 1000; ++k) {
        auto g = group::random_element(static_cast<std::uint64_t>(k), group::Mode::Numeric, 4);
        CHECK(!g.c(1).is_zero());
        CHECK(g.taylor().derivative_at(1, 0) != 0);
    }
}

TEST_CASE("class preservation")
{
    for (const char* text : {"v^3", "exp(u)", "u + v^2"}) {
        Expr fn = parse(text);
        CHECK(group::check_class_preservation(GroupElement::identity(), fn));
        CHECK(group::check_class_preservation(group::random_element(3, group::Mode::Symbolic, 3), fn));
        CHECK(group::check_class_preservation(GroupElement::formal(), fn));
    }
    auto bad = group::point_map(GroupElement::identity());
    bad.V = v * v;
    CHECK_FALSE(group::check_class_preservation(bad, parse("v^3")));
    auto mixing = group::point_map(GroupElement::identity());
    mixing.X = Expr(Symbol::x()) + u;
    CHECK_FALSE(group::check_class_preservation(mixing, parse("v^3")));
    auto twisted = group::point_map(GroupElement::identity());
    twisted.U = u + Expr(Symbol::x()) * Expr(Symbol::x());
    CHECK_FALSE(group::check_class_preservation(twisted, parse("v^3")));
}
