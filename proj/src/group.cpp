#include "invforge/group.hpp"

#include "invforge/errors.hpp"

#include <cmath>
#include <mutex>
#include <random>

namespace invforge::group {

namespace {

using Coeffs = std::vector<Rational>;

Coeffs poly_mul(const Coeffs& a, const Coeffs& b, std::size_t limit = SIZE_MAX)
{
    if (a.empty() || b.empty()) return {};
    Coeffs r(std::min(a.size() + b.size() - 1, limit));
    for (std::size_t i = 0; i < a.size() && i < r.size(); ++i)
        for (std::size_t j = 0; j < b.size() && i + j < r.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

void poly_add_scaled(Coeffs& acc, const Coeffs& p, const Rational& s)
{
    if (acc.size() < p.size()) acc.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) acc[i] += s * p[i];
}

/// a(b(w)) with a, b given as coefficient vectors; truncated at `limit` terms.
Coeffs poly_compose(const Coeffs& a, const Coeffs& b, std::size_t limit = SIZE_MAX)
{
    Coeffs result;
    Coeffs power{Rational(1)};
    for (std::size_t k = 0; k < a.size(); ++k) {
        poly_add_scaled(result, power, a[k]);
        if (k + 1 < a.size()) power = poly_mul(power, b, limit);
    }
    while (!result.empty() && result.back().is_zero()) result.pop_back();
    if (result.empty()) result.push_back(Rational());
    return result;
}

Rational falling(int m, int k)
{
    Rational r(1);
    for (int n = 0; n < k; ++n) r *= Rational(m - n);
    return r;
}

Rational dyadic(double x) { return Rational(std::llround(x * 1024), 1024); }

struct FormalCache {
    std::mutex mutex;
    jet::JetMap jets;
    int order = -1;
};

FormalCache& formal_cache()
{
    static FormalCache cache;
    return cache;
}

jet::JetMap transform_formal(const GroupElement& g, int max_order)
{
    const Expr v = Symbol::v();
    ImplicitOps ops = implicit_diff_ops(g);
    Expr phi1 = g.phi_derivative(1), phi2 = g.phi_derivative(2);
    Expr c1 = g.c(1), c2 = g.c(2);
    jet::JetMap out;
    Expr column = (phi1 * jet::f(0, 0) - c2 * phi1 * v - phi2 * v * v) / (c1 * c1);
    for (int j = 0; j <= max_order; ++j) {
        Expr cur = column;
        for (int i = 0; i + j <= max_order; ++i) {
            out.emplace(std::pair{i, j}, cur);
            if (i + j < max_order) cur = ops.apply_u(cur);
        }
        if (j < max_order) column = ops.apply_v(column);
    }
    return out;
}

} // namespace

Expr TaylorPhi::derivative(int k) const
{
    Expr w = Expr(Symbol::u()) - Expr(anchor);
    Expr out;
    for (int m = static_cast<int>(coeffs.size()) - 1; m >= k; --m) out = out * w + Expr(coeffs[m] * falling(m, k));
    return out;
}

double TaylorPhi::derivative_at(int k, double u) const
{
    double w = u - anchor.to_double();
    double out = 0;
    for (int m = static_cast<int>(coeffs.size()) - 1; m >= k; --m)
        out = out * w + coeffs[m].to_double() * falling(m, k).to_double();
    return out;
}

GroupElement GroupElement::formal()
{
    GroupElement g;
    for (int k = 0; k < 4; ++k) g.c_[k] = Expr(Symbol::group_const(k));
    g.phi_ = FormalPhi{};
    return g;
}

GroupElement GroupElement::identity() { return GroupElement({0, 1, 0, 0}, TaylorPhi{0, {0, 1}}); }

GroupElement::GroupElement(std::array<Rational, 4> c, TaylorPhi phi, Mode mode) : phi_(phi), mode_(mode)
{
    if (c[1].is_zero()) throw SingularGroupElement("C1 must be nonzero");
    if (phi.coeffs.size() < 2 || phi.coeffs[1].is_zero()) throw SingularGroupElement("phi'(anchor) must be nonzero");
    for (int k = 0; k < 4; ++k) c_[k] = Expr(c[k]);
}

Expr GroupElement::c(int k) const { return c_.at(k); }

const TaylorPhi& GroupElement::taylor() const
{
    if (is_formal()) throw std::logic_error("formal element has no Taylor data");
    return std::get<TaylorPhi>(phi_);
}

Expr GroupElement::phi_derivative(int k) const
{
    if (is_formal()) return jet::phi(k);
    return taylor().derivative(k);
}

NumericPoint GroupElement::numeric_parameters(double u, int max_k) const
{
    if (is_formal()) throw std::logic_error("formal element has no numeric parameters");
    NumericPoint pt;
    for (int k = 0; k < 4; ++k) pt[Symbol::group_const(k)] = c_[k].as_rational()->to_double();
    for (int k = 0; k <= max_k; ++k) pt[Symbol::phi(k)] = taylor().derivative_at(k, u);
    return pt;
}

Bindings GroupElement::parameter_bindings(const Expr& u, int max_k) const
{
    if (is_formal()) throw std::logic_error("formal element has no parameter values");
    Bindings b;
    for (int k = 0; k < 4; ++k) b.emplace(Symbol::group_const(k), c_[k]);
    for (int k = 0; k <= max_k; ++k) {
        Expr d = taylor().derivative(k);
        if (!(u == Expr(Symbol::u()))) d = substitute(d, {{Symbol::u(), u}});
        b.emplace(Symbol::phi(k), d);
    }
    return b;
}

nlohmann::json GroupElement::to_json() const
{
    nlohmann::json j;
    for (int k = 0; k < 4; ++k) j["C" + std::to_string(k)] = c_[k].str();
    if (is_formal()) {
        j["phi"] = "formal";
    } else {
        nlohmann::json coeffs = nlohmann::json::array();
        for (const auto& r : taylor().coeffs) coeffs.push_back(r.str());
        j["phi"] = {{"anchor", taylor().anchor.str()}, {"coeffs", coeffs}};
    }
    return j;
}

PointImage act_point(const GroupElement& g, const Expr& u, const Expr& v, const Expr& f)
{
    Expr p0 = g.phi_derivative(0), p1 = g.phi_derivative(1), p2 = g.phi_derivative(2);
    if (!g.is_formal() && !(u == Expr(Symbol::u()))) {
        Bindings at{{Symbol::u(), u}};
        p0 = substitute(p0, at);
        p1 = substitute(p1, at);
        p2 = substitute(p2, at);
    }
    if (p1.is_zero()) throw SingularGroupElement("phi' vanishes");
    Expr c1 = g.c(1), c2 = g.c(2);
    return {p0, p1 * v / c1, (p1 * f - c2 * p1 * v - p2 * v * v) / (c1 * c1)};
}

NumericImage act_point(const GroupElement& g, double u, double v, double f)
{
    const auto& t = g.taylor();
    double p0 = t.derivative_at(0, u), p1 = t.derivative_at(1, u), p2 = t.derivative_at(2, u);
    if (p1 == 0) throw SingularGroupElement("phi' vanishes at the point");
    double c1 = g.c(1).as_rational()->to_double(), c2 = g.c(2).as_rational()->to_double();
    return {p0, p1 * v / c1, (p1 * f - c2 * p1 * v - p2 * v * v) / (c1 * c1)};
}

Expr ImplicitOps::apply_u(const Expr& e) const
{
    return a * jet::total_derivative(e, jet::Dir::U) + b * jet::total_derivative(e, jet::Dir::V);
}

Expr ImplicitOps::apply_v(const Expr& e) const { return c * jet::total_derivative(e, jet::Dir::V); }

ImplicitOps implicit_diff_ops(const GroupElement& g)
{
    Expr p1 = g.phi_derivative(1), p2 = g.phi_derivative(2);
    if (p1.is_zero()) throw SingularGroupElement("phi' vanishes identically");
    const Expr v = Symbol::v();
    return {Expr(1) / p1, -p2 * v / (p1 * p1), g.c(1) / p1};
}

jet::JetMap transform_jet(const GroupElement& g, int max_order)
{
    if (max_order < 0) throw InvalidOrder("jet order must be non-negative");
    if (!g.is_formal()) {
        jet::JetMap formal = transform_jet(GroupElement::formal(), max_order);
        Bindings b = g.parameter_bindings(Expr(Symbol::u()), max_order + 2);
        for (auto& [ij, e] : formal) e = substitute(e, b);
        return formal;
    }
    auto& cache = formal_cache();
    std::lock_guard lock(cache.mutex);
    if (cache.order < max_order) {
        cache.jets = transform_formal(g, max_order);
        cache.order = max_order;
    }
    jet::JetMap out;
    for (const auto& [ij, e] : cache.jets)
        if (ij.first + ij.second <= max_order) out.emplace(ij, e);
    return out;
}

jet::JetMap transform_jet(const GroupElement& g, const jet::JetMap& jets, int max_order)
{
    for (int i = 0; i <= max_order; ++i)
        for (int j = 0; i + j <= max_order; ++j)
            if (!jets.count({i, j}))
                throw MissingJet("missing jet f_" + jet_suffix(i, j) + " for order " + std::to_string(max_order));
    Bindings b = jet::jet_bindings(jets);
    jet::JetMap out = transform_jet(g, max_order);
    for (auto& [ij, e] : out) e = substitute(e, b);
    return out;
}

std::map<std::pair<int, int>, double> transform_jet(const GroupElement& g,
                                                    const std::map<std::pair<int, int>, double>& jets, double u,
                                                    double v, int max_order)
{
    NumericPoint pt = g.numeric_parameters(u, max_order + 2);
    if (pt.at(Symbol::phi(1)) == 0) throw SingularGroupElement("phi' vanishes at the point");
    pt[Symbol::u()] = u;
    pt[Symbol::v()] = v;
    for (int i = 0; i <= max_order; ++i)
        for (int j = 0; i + j <= max_order; ++j) {
            auto it = jets.find({i, j});
            if (it == jets.end()) throw MissingJet("missing jet f_" + jet_suffix(i, j));
            pt[Symbol::jet(i, j)] = it->second;
        }
    std::map<std::pair<int, int>, double> out;
    for (const auto& [ij, e] : transform_jet(GroupElement::formal(), max_order)) out.emplace(ij, eval_numeric(e, pt));
    return out;
}

GroupElement compose(const GroupElement& g1, const GroupElement& g2)
{
    if (g1.is_formal() || g2.is_formal()) throw std::invalid_argument("composition needs Taylor elements");
    auto r = [](const GroupElement& g, int k) { return *g.c(k).as_rational(); };
    std::array<Rational, 4> c{
        r(g1, 1) * r(g1, 1) * r(g2, 0) + r(g1, 0),
        r(g1, 1) * r(g2, 1),
        r(g2, 2) + r(g2, 1) * r(g1, 2),
        r(g1, 1) * r(g2, 3) + r(g1, 1) * r(g1, 2) * r(g2, 0) + r(g1, 3),
    };
    const auto& t1 = g1.taylor();
    const auto& t2 = g2.taylor();
    Coeffs inner = t2.coeffs;
    inner[0] -= t1.anchor;
    TaylorPhi phi{t2.anchor, poly_compose(t1.coeffs, inner)};
    Mode mode = g1.mode() == Mode::Numeric || g2.mode() == Mode::Numeric ? Mode::Numeric : Mode::Symbolic;
    return GroupElement(c, phi, mode);
}

GroupElement inverse(const GroupElement& g)
{
    if (g.is_formal()) throw std::invalid_argument("inversion needs a Taylor element");
    auto r = [&](int k) { return *g.c(k).as_rational(); };
    Rational c1 = r(1);
    std::array<Rational, 4> c{-r(0) / (c1 * c1), c1.inverse(), -r(2) / c1, -(r(3) - r(2) * r(0) / c1) / c1};
    const auto& t = g.taylor();
    std::size_t n = t.coeffs.size();
    Coeffs a = t.coeffs;
    a[0] = Rational();
    Coeffs rev(2);
    rev[1] = a[1].inverse();
    for (std::size_t m = 2; m < n; ++m) {
        rev.resize(m + 1);
        Coeffs comp = poly_compose(a, rev, m + 1);
        Rational coeff = m < comp.size() ? comp[m] : Rational();
        rev[m] = -coeff / a[1];
    }
    rev[0] = t.anchor;
    return GroupElement(c, TaylorPhi{t.coeffs[0], rev}, g.mode());
}

PointMap point_map(const GroupElement& g)
{
    const Expr t = Symbol::t(), x = Symbol::x();
    Expr c1 = g.c(1);
    return {c1 * c1 * t + g.c(0), c1 * x + c1 * g.c(2) * t + g.c(3), g.phi_derivative(0), std::nullopt};
}

namespace {

Expr partial(const Expr& e, Symbol var)
{
    return derive(e, [var](Symbol s) -> Expr {
        if (s == var) return Expr(1);
        if (var == Symbol::u()) {
            if (s.kind() == SymbolKind::PhiDeriv) return jet::phi(s.indices().first + 1);
            if (s.kind() == SymbolKind::Jet) return jet::f(s.indices().first + 1, s.indices().second);
        }
        if (var == Symbol::v() && s.kind() == SymbolKind::Jet)
            return jet::f(s.indices().first, s.indices().second + 1);
        return Expr();
    });
}

bool vanishes(const Expr& e)
{
    if (e.is_zero()) return true;
    if (!e.has_atoms()) return false;
    return probabilistic_equal(e, Expr(), 20).equal;
}

} // namespace

bool check_class_preservation(const PointMap& m, const Expr& f)
{
    const Symbol t = Symbol::t(), x = Symbol::x(), u = Symbol::u(), v = Symbol::v();
    if (!partial(m.T, x).is_zero() || !partial(m.T, u).is_zero() || !partial(m.X, u).is_zero()) return false;
    Expr Tt = partial(m.T, t), Xx = partial(m.X, x), Xt = partial(m.X, t), Uu = partial(m.U, u);
    if (Tt.is_zero() || Xx.is_zero() || Uu.is_zero()) return false;
    if (!(Tt - Xx * Xx).is_zero()) return false;
    Expr Ux = partial(m.U, x), Ut = partial(m.U, t);
    Expr dxU = Ux + Uu * Expr(v);
    Expr vt = dxU / Xx;
    if (m.V && !vanishes(*m.V - vt)) return false;
    Expr Xxx = partial(Xx, x);
    Expr ft = (Uu * f + Ut - Xt / Xx * dxU - partial(Ux, x) - Expr(2) * partial(Ux, u) * Expr(v) -
               partial(Uu, u) * Expr(v) * Expr(v) + Xxx / Xx * dxU) /
              Tt;
    std::array<Expr, 3> rows{ft, m.U, vt};
    std::array<Symbol, 4> cols{t, x, u, v};
    std::array<std::array<Expr, 4>, 3> jac;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) jac[r][c] = partial(rows[r], cols[c]);
    for (int skip = 0; skip < 4; ++skip) {
        std::array<int, 3> k{};
        for (int c = 0, n = 0; c < 4; ++c)
            if (c != skip) k[n++] = c;
        Expr det = jac[0][k[0]] * (jac[1][k[1]] * jac[2][k[2]] - jac[1][k[2]] * jac[2][k[1]]) -
                   jac[0][k[1]] * (jac[1][k[0]] * jac[2][k[2]] - jac[1][k[2]] * jac[2][k[0]]) +
                   jac[0][k[2]] * (jac[1][k[0]] * jac[2][k[1]] - jac[1][k[1]] * jac[2][k[0]]);
        if (!vanishes(det)) return false;
    }
    return true;
}

bool check_class_preservation(const GroupElement& g, const Expr& f) { return check_class_preservation(point_map(g), f); }

GroupElement random_element(std::uint64_t seed, Mode mode, int taylor_degree, double anchor)
{
    if (taylor_degree < 1) throw InvalidOrder("Taylor degree must be at least 1");
    if (mode == Mode::Numeric && taylor_degree < 2) throw InvalidOrder("numeric elements need Taylor degree >= 2");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1, 1), mag(0.5, 2), any(-2, 2);
    std::bernoulli_distribution sign(0.5);
    auto signed_mag = [&] { return sign(rng) ? mag(rng) : -mag(rng); };
    std::array<Rational, 4> c;
    c[1] = dyadic(signed_mag());
    c[0] = dyadic(any(rng));
    c[2] = dyadic(any(rng));
    c[3] = dyadic(any(rng));
    Coeffs coeffs(static_cast<std::size_t>(taylor_degree) + 1);
    coeffs[0] = dyadic(unit(rng));
    coeffs[1] = dyadic(signed_mag());
    for (int k = 2; k <= taylor_degree; ++k) coeffs[k] = dyadic(unit(rng));
    return GroupElement(c, TaylorPhi{dyadic(anchor), coeffs}, mode);
}

} // namespace invforge::group
