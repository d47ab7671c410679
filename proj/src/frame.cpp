#include "invforge/frame.hpp"

#include "invforge/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace invforge::frame {

namespace {

using jet::f;

const Expr& V()
{
    static const Expr v = Symbol::v();
    return v;
}

Expr from_jets(const Expr& formal, const jet::JetMap& jets) { return substitute(formal, jet::jet_bindings(jets)); }

struct FrameCache {
    std::mutex mutex;
    std::optional<Frame> frame;
};

FrameCache& frame_cache()
{
    static FrameCache cache;
    return cache;
}

struct InvariantCache {
    std::mutex mutex;
    std::map<std::pair<int, int>, Invariant> table;
};

InvariantCache& invariant_cache()
{
    static InvariantCache cache;
    return cache;
}

} // namespace

Expr relative_W() { return Expr(2) * f(0, 0) - Expr(2) * V() * f(0, 1) + V() * V() * f(0, 2); }
Expr relative_S() { return Expr(2) * f(1, 0) - V() * f(1, 1); }
Expr relative_W(const jet::JetMap& jets) { return from_jets(relative_W(), jets); }
Expr relative_S(const jet::JetMap& jets) { return from_jets(relative_S(), jets); }

std::string to_string(Regularity r)
{
    switch (r) {
    case Regularity::Regular: return "regular";
    case Regularity::Singular: return "singular";
    case Regularity::UltraSingular: return "ultra-singular";
    }
    return "?";
}

bool numerically_regular(double W, double fv0, double v, double fv, double fvv)
{
    return std::abs(W) > 1e-8 * (1 + std::abs(fv0) + std::abs(v * fv) + std::abs(v * v * fvv));
}

RegularityClass classify(const Expr& fn, const Rational& u, const Rational& v)
{
    auto jets = jet::concrete_jet(fn, 2);
    Bindings at{{Symbol::u(), Expr(u)}, {Symbol::v(), Expr(v)}};
    for (auto& [ij, e] : jets) e = substitute(e, at);
    Expr W = relative_W(jets), S = relative_S(jets);
    W = substitute(W, at);
    S = substitute(S, at);
    NumericPoint pt{{Symbol::u(), u.to_double()}, {Symbol::v(), v.to_double()}};
    RegularityClass out{Regularity::Regular, W, S, eval_numeric(W, pt), eval_numeric(S, pt), true};
    bool w_zero, s_zero;
    if (!W.has_atoms() && !S.has_atoms()) {
        w_zero = W.is_zero();
        s_zero = S.is_zero();
    } else {
        out.exact = false;
        double vd = v.to_double();
        double f0 = eval_numeric(jets.at({0, 0}), pt), f1 = eval_numeric(jets.at({0, 1}), pt),
               f2 = eval_numeric(jets.at({0, 2}), pt);
        double scale = 1 + std::abs(f0) + std::abs(vd * f1) + std::abs(vd * vd * f2);
        w_zero = !numerically_regular(out.w_value, f0, vd, f1, f2);
        s_zero = std::abs(out.s_value) <= 1e-8 * scale;
    }
    if (!w_zero)
        out.tag = Regularity::Regular;
    else
        out.tag = s_zero ? Regularity::UltraSingular : Regularity::Singular;
    return out;
}

Bindings Frame::bindings() const
{
    Bindings b{{Symbol::group_const(1), C1}, {Symbol::group_const(2), C2}};
    for (std::size_t k = 0; k < phi.size(); ++k) b.emplace(Symbol::phi(static_cast<int>(k)), phi[k]);
    return b;
}

Frame solve_frame(int order)
{
    if (order < 2) throw InvalidOrder("frame order must be at least 2");
    auto& cache = frame_cache();
    std::lock_guard lock(cache.mutex);
    if (cache.frame && cache.frame->order >= order) {
        Frame out = *cache.frame;
        out.order = order;
        out.phi.resize(static_cast<std::size_t>(order) + 3);
        return out;
    }
    const Expr W = relative_W();
    Frame fr;
    if (cache.frame) {
        fr = *cache.frame;
    } else {
        fr.order = 0;
        fr.C1 = W / (Expr(2) * V());
        fr.C2 = f(0, 1) - V() * f(0, 2);
        fr.phi = {Expr(), W / (Expr(2) * V() * V()), W * f(0, 2) / (Expr(4) * V() * V())};
    }
    auto formal = group::transform_jet(group::GroupElement::formal(), order);
    for (int i = fr.order + 1; i <= order; ++i) {
        Symbol unknown = Symbol::phi(i + 2);
        Expr e = substitute(formal.at({i, 0}), fr.bindings());
        Expr a = differentiate(e, unknown);
        if (a.is_zero() || a.depends_on(unknown))
            throw FrameUnsolvable("normalization f~_" + jet_suffix(i, 0) + " = 0 is not linear in phi^(" +
                                  std::to_string(i + 2) + ")");
        Expr b = substitute(e, {{unknown, Expr()}});
        fr.phi.push_back(-b / a);
        fr.order = i;
    }
    fr.order = order;
    cache.frame = fr;
    return fr;
}

Expr phi3_closed_form()
{
    const Expr W = relative_W();
    return W / (Expr(4) * V().pow(4)) *
           (Expr(2) * f(1, 0) + (f(0, 0) - V() * f(0, 1) + V() * V() * f(0, 2)) * f(0, 2));
}

bool is_phantom(int i, int j)
{
    if (i < 0 || j < 0) throw InvalidIndex("invariant indices must be non-negative");
    return (i == 0 && j <= 2) || (j == 0 && i >= 1);
}

const Invariant& normalized_invariant(int i, int j)
{
    bool phantom = is_phantom(i, j);
    auto& cache = invariant_cache();
    {
        std::lock_guard lock(cache.mutex);
        auto it = cache.table.find({i, j});
        if (it != cache.table.end()) return it->second;
    }
    int order = std::max(i + j, 2);
    Frame fr = solve_frame(order);
    Expr transformed = group::transform_jet(group::GroupElement::formal(), i + j).at({i, j});
    Invariant inv{i, j, substitute(transformed, fr.bindings()), i + j, phantom};
    std::lock_guard lock(cache.mutex);
    return cache.table.emplace(std::pair{i, j}, std::move(inv)).first->second;
}

Expr invariantize(const Expr& e, const Frame& frame)
{
    int ord = jet::order(e);
    if (ord > frame.order) throw FrameOrderTooLow("expression of order " + std::to_string(ord) +
                                                  " needs a frame of at least that order");
    Bindings to_abstract{{Symbol::u(), Expr()}, {Symbol::v(), Expr(1)}};
    for (Symbol s : e.free_symbols())
        if (s.kind() == SymbolKind::Jet) {
            auto [i, j] = s.indices();
            to_abstract.emplace(s, Expr(Symbol::invariant(i, j)));
        }
    return expand_invariants(substitute(e, to_abstract));
}

Expr invariantize(const Expr& e) { return invariantize(e, solve_frame(std::max(2, jet::order(e)))); }

Expr expand_invariants(const Expr& e)
{
    Bindings b;
    for (Symbol s : e.free_symbols())
        if (s.kind() == SymbolKind::Invariant) {
            auto [i, j] = s.indices();
            b.emplace(s, normalized_invariant(i, j).expr);
        }
    return substitute(e, b);
}

} // namespace invforge::frame
