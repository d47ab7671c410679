#include "invforge/harness.hpp"

#include "invforge/errors.hpp"
#include "invforge/structure.hpp"

#include <Eigen/Dense>
#include <gmpxx.h>
#include <unsupported/Eigen/LevenbergMarquardt>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace invforge::harness {

namespace {

using JetValues = std::map<std::pair<int, int>, double>;

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

NumericPoint jet_point(double u, double v, const JetValues& jets)
{
    NumericPoint pt{{Symbol::u(), u}, {Symbol::v(), v}};
    for (const auto& [ij, x] : jets) pt[Symbol::jet(ij.first, ij.second)] = x;
    return pt;
}

Expr exact(double x) { return Expr(Rational(mpq_class(x))); }

double to_double(const Expr& e)
{
    auto r = e.as_rational();
    if (!r) throw UnsupportedForm("expected a constant");
    return r->to_double();
}

/// Signature samples keep away from the singular stratum, where the
/// signature grows like powers of 1/W.
constexpr double kSignatureMargin = 1e-3;

double rel_error(double a, double b) { return std::abs(a - b) / (1 + std::abs(a)); }

/// Concrete jets of f as expressions in u, v, cached per f for the lifetime
/// of a call.
struct JetFunctions {
    jet::JetMap jets;
    int order;

    JetFunctions(const Expr& f, int order) : jets(jet::concrete_jet(f, order)), order(order) {}

    JetValues at(double u, double v) const
    {
        NumericPoint pt{{Symbol::u(), u}, {Symbol::v(), v}};
        JetValues out;
        for (const auto& [ij, e] : jets) out[ij] = eval_numeric(e, pt);
        return out;
    }
};

/// Regular with |W| above margin times the size of its terms; margin 0 is
/// the plain regularity test.
bool regular_at(const JetValues& j, double v, double margin)
{
    double f = j.at({0, 0}), fv = j.at({0, 1}), fvv = j.at({0, 2});
    double W = 2 * f - 2 * v * fv + v * v * fvv;
    if (!std::isfinite(W) || !frame::numerically_regular(W, f, v, fv, fvv)) return false;
    return std::abs(W) >= margin * (1 + std::abs(f) + std::abs(v * fv) + std::abs(v * v * fvv));
}

RegularPoint draw_regular(const JetFunctions& jf, std::mt19937_64& rng, const Domain& d, double margin = 0)
{
    std::uniform_real_distribution<double> du(d.u_min, d.u_max), dv(d.v_min, d.v_max);
    for (int tries = 0; tries < 1000; ++tries) {
        double u = du(rng), v = dv(rng);
        try {
            if (regular_at(jf.at(u, v), v, margin)) return {u, v};
        } catch (const NumericDomain&) {
        }
    }
    throw NoRegularPoint("no regular point found after 1000 draws");
}

std::vector<std::pair<int, int>> non_phantom(int order)
{
    std::vector<std::pair<int, int>> out;
    for (int n = 2; n <= order; ++n)
        for (int j = 1; j <= n; ++j)
            if (!frame::is_phantom(n - j, j)) out.emplace_back(n - j, j);
    return out;
}

const std::array<Expr, 4>& signature_closed_forms()
{
    static const std::array<Expr, 4> forms = [] {
        Expr i11 = frame::normalized_invariant(1, 1).expr;
        return std::array<Expr, 4>{i11, frame::normalized_invariant(0, 3).expr,
                                   structure::invariant_derivative(i11, jet::Dir::U),
                                   structure::invariant_derivative(i11, jet::Dir::V)};
    }();
    return forms;
}

const std::array<std::array<Expr, 4>, 2>& signature_gradients()
{
    static const std::array<std::array<Expr, 4>, 2> grads = [] {
        std::array<std::array<Expr, 4>, 2> g;
        for (std::size_t k = 0; k < 4; ++k) {
            g[0][k] = jet::total_derivative(signature_closed_forms()[k], jet::Dir::U);
            g[1][k] = jet::total_derivative(signature_closed_forms()[k], jet::Dir::V);
        }
        return g;
    }();
    return grads;
}

Signature evaluate_signature(const JetFunctions& jf, double u, double v)
{
    NumericPoint pt = jet_point(u, v, jf.at(u, v));
    Signature s;
    for (std::size_t k = 0; k < 4; ++k) s[k] = eval_numeric(signature_closed_forms()[k], pt);
    return s;
}

double signature_norm(const Signature& s)
{
    double n = 0;
    for (double x : s) n += x * x;
    return std::sqrt(n);
}

double relative_distance(const Signature& a, const Signature& b)
{
    Signature d;
    for (std::size_t k = 0; k < 4; ++k) d[k] = a[k] - b[k];
    return signature_norm(d) / (1 + signature_norm(a));
}

/// Residual asinh(sig(u, sign e^s)) - asinh(target) over x = (u, s); asinh
/// flattens the growth of the signature near the singular stratum.
struct SignatureResidual : Eigen::DenseFunctor<double> {
    const JetFunctions& jf;
    Signature target;
    double sign;

    SignatureResidual(const JetFunctions& jf, const Signature& target, double sign)
        : Eigen::DenseFunctor<double>(2, 4), jf(jf), target(target), sign(sign)
    {
    }

    int operator()(const InputType& x, ValueType& fvec) const
    {
        double v = sign * std::exp(x[1]);
        try {
            Signature s = evaluate_signature(jf, x[0], v);
            for (int k = 0; k < 4; ++k)
                fvec[k] = std::asinh(s[static_cast<std::size_t>(k)]) - std::asinh(target[static_cast<std::size_t>(k)]);
            if (!fvec.allFinite()) return -1;
        } catch (const NumericDomain&) {
            return -1;
        }
        return 0;
    }

    int df(const InputType& x, JacobianType& fjac) const
    {
        double v = sign * std::exp(x[1]);
        NumericPoint pt;
        try {
            pt = jet_point(x[0], v, jf.at(x[0], v));
            for (int k = 0; k < 4; ++k) {
                auto kk = static_cast<std::size_t>(k);
                double scale = 1 / std::sqrt(1 + std::pow(eval_numeric(signature_closed_forms()[kk], pt), 2));
                fjac(k, 0) = scale * eval_numeric(signature_gradients()[0][kk], pt);
                fjac(k, 1) = scale * v * eval_numeric(signature_gradients()[1][kk], pt);
            }
        } catch (const NumericDomain&) {
            return -1;
        }
        return 0;
    }
};

/// Smallest relative distance from target to the signature set of jf,
/// minimized from the nearest starting points until one falls well
/// within tol.
double distance_to_signature_set(const JetFunctions& jf, const Signature& target,
                                 const std::vector<SignatureSample>& starts, double tol)
{
    const double polish = tol * 1e-3;
    std::vector<std::size_t> order(starts.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    auto compressed = [&](const Signature& s) {
        double d = 0;
        for (std::size_t k = 0; k < 4; ++k) d += std::pow(std::asinh(s[k]) - std::asinh(target[k]), 2);
        return d;
    };
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return compressed(starts[a].values) < compressed(starts[b].values); });
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < std::min<std::size_t>(20, order.size()) && !(best <= polish); ++k) {
        const auto& s = starts[order[k]];
        best = std::min(best, relative_distance(target, s.values));
        double sign = std::copysign(1.0, s.point.v);
        SignatureResidual residual(jf, target, sign);
        Eigen::LevenbergMarquardt<SignatureResidual> lm(residual);
        lm.setFtol(0);
        lm.setXtol(0);
        lm.setGtol(0);
        lm.setMaxfev(300);
        Eigen::VectorXd x(2);
        x << s.point.u, std::log(std::abs(s.point.v));
        lm.minimize(x);
        try {
            Signature reached = evaluate_signature(jf, x[0], sign * std::exp(x[1]));
            double d = relative_distance(target, reached);
            if (std::isfinite(d)) best = std::min(best, d);
        } catch (const NumericDomain&) {
        }
    }
    return best;
}

std::vector<SignatureSample> sample_signatures(const JetFunctions& jf, int n, std::uint64_t seed,
                                              const Domain& domain = {})
{
    std::vector<SignatureSample> out;
    for (int k = 0; k < n; ++k) {
        auto rng = sample_rng(seed, static_cast<std::uint64_t>(k));
        RegularPoint p = draw_regular(jf, rng, domain, kSignatureMargin);
        out.push_back({p, evaluate_signature(jf, p.u, p.v)});
    }
    return out;
}

std::vector<SignatureSample> start_pool(const JetFunctions& jf, int n, std::uint64_t seed)
{
    std::vector<SignatureSample> out;
    for (const Domain& d : {Domain{-2, 2, 0.25, 4}, Domain{-2, 2, -4, -0.25}}) {
        try {
            auto half = sample_signatures(jf, n, seed, d);
            out.insert(out.end(), half.begin(), half.end());
        } catch (const NoRegularPoint&) {
        }
        seed = ~seed;
    }
    if (out.empty()) throw NoRegularPoint("no regular starting points for the signature search");
    return out;
}

} // namespace

nlohmann::json InvarianceReport::to_json() const
{
    nlohmann::json fails = nlohmann::json::array();
    for (const auto& f : failures)
        fails.push_back({{"f", f.f},
                         {"point", {f.u, f.v}},
                         {"element", f.element},
                         {"invariant", {f.i, f.j}},
                         {"lhs", f.lhs},
                         {"rhs", f.rhs}});
    return {{"samples", samples}, {"maxRelError", max_rel_error}, {"failures", fails}};
}

std::map<std::pair<int, int>, double> numeric_jets(const Expr& f, double u, double v, int order)
{
    return JetFunctions(f, order).at(u, v);
}

RegularPoint sample_regular_point(const Expr& f, std::uint64_t seed, const Domain& domain)
{
    JetFunctions jf(f, 2);
    auto rng = sample_rng(seed, 0);
    return draw_regular(jf, rng, domain);
}

InvarianceReport invariance_test(const Expr& f, int order, int n_samples, std::uint64_t seed, double tol)
{
    if (order < 2 || order > 4) throw InvalidOrder("invariance tests cover orders 2..4");
    std::vector<Candidate> candidates;
    for (auto [i, j] : non_phantom(order)) candidates.push_back({i, j, frame::normalized_invariant(i, j).expr});
    return invariance_test(f, candidates, order, n_samples, seed, tol);
}

InvarianceReport invariance_test(const Expr& f, const std::vector<Candidate>& candidates, int order, int n_samples,
                                 std::uint64_t seed, double tol)
{
    if (order < 0) throw InvalidOrder("order must be non-negative");
    if (n_samples < 1) throw InvalidOrder("at least one sample is required");
    JetFunctions jf(f, std::max(order, 2));
    const auto formal = group::GroupElement::formal();
    const auto tilde = group::transform_jet(formal, std::max(order, 2));
    const Expr tilde_v = group::act_point(formal, Symbol::u(), Symbol::v(), jet::f(0, 0)).v;
    InvarianceReport report;
    for (int k = 0; k < n_samples; ++k) {
        auto rng = sample_rng(seed, static_cast<std::uint64_t>(k));
        RegularPoint p = draw_regular(jf, rng, Domain{});
        auto g = group::random_element(rng(), group::Mode::Numeric, order + 2, p.u);
        // jets rounded to doubles are exact dyadic points of the jet space
        Bindings before{{Symbol::u(), exact(p.u)}, {Symbol::v(), exact(p.v)}};
        for (const auto& [ij, x] : jf.at(p.u, p.v)) before.emplace(Symbol::jet(ij.first, ij.second), exact(x));
        Bindings params = g.parameter_bindings(exact(p.u), order + 2);
        Bindings both = before;
        both.insert(params.begin(), params.end());
        Bindings after{{Symbol::v(), substitute(tilde_v, both)}};
        for (const auto& [ij, e] : tilde) after.emplace(Symbol::jet(ij.first, ij.second), substitute(e, both));
        for (const auto& [i, j, inv] : candidates) {
            double lhs = to_double(substitute(inv, before)), rhs = to_double(substitute(inv, after));
            double err = rel_error(lhs, rhs);
            if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
            if (!(err <= tol)) report.failures.push_back({f.str(), p.u, p.v, g.to_json(), i, j, lhs, rhs});
            report.max_rel_error = std::max(report.max_rel_error, err);
        }
        ++report.samples;
    }
    return report;
}

int independence_rank(const std::vector<Expr>& invariants, const Expr& f, int n_points, std::uint64_t seed)
{
    std::set<Symbol> coords;
    int order = 2;
    for (const Expr& e : invariants)
        for (Symbol s : e.free_symbols()) {
            if (s.kind() == SymbolKind::Jet || s.kind() == SymbolKind::V) coords.insert(s);
            else if (s.kind() != SymbolKind::U) throw UnsupportedForm("invariants must be closed forms over the jets");
            if (s.kind() == SymbolKind::Jet) order = std::max(order, s.indices().first + s.indices().second);
        }
    std::vector<Symbol> cols(coords.begin(), coords.end());
    std::vector<std::vector<Expr>> partials;
    for (const Expr& e : invariants) {
        std::vector<Expr> row;
        for (Symbol s : cols) row.push_back(differentiate(e, s));
        partials.push_back(std::move(row));
    }
    JetFunctions jf(f, order);
    int best = 0;
    for (int k = 0; k < n_points; ++k) {
        auto rng = sample_rng(seed, static_cast<std::uint64_t>(k));
        RegularPoint p = draw_regular(jf, rng, Domain{});
        NumericPoint pt = jet_point(p.u, p.v, jf.at(p.u, p.v));
        Eigen::MatrixXd J(static_cast<Eigen::Index>(invariants.size()), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t r = 0; r < partials.size(); ++r)
            for (std::size_t c = 0; c < cols.size(); ++c)
                J(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = eval_numeric(partials[r][c], pt);
        for (Eigen::Index r = 0; r < J.rows(); ++r) {
            double n = J.row(r).norm();
            if (n > 0) J.row(r) /= n;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
        svd.setThreshold(1e-8);
        best = std::max(best, static_cast<int>(svd.rank()));
    }
    return best;
}

SignatureSample signature_at(const Expr& f, double u, double v)
{
    JetFunctions jf(f, 4);
    return {{u, v}, evaluate_signature(jf, u, v)};
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Consistent: return "consistent";
    case Verdict::Inequivalent: return "inequivalent";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

nlohmann::json EquivalenceReport::to_json() const
{
    return {{"verdict", to_string(verdict)},
            {"distance12", distance_12},
            {"distance21", distance_21},
            {"samples", samples}};
}

EquivalenceReport equivalence_necessary(const Expr& f1, const Expr& f2, int n_samples, double tol, std::uint64_t seed)
{
    if (n_samples < 1) throw InvalidOrder("at least one sample is required");
    JetFunctions j1(f1, 4), j2(f2, 4);
    auto s1 = sample_signatures(j1, n_samples, seed);
    auto s2 = sample_signatures(j2, n_samples, seed ^ 0x9e3779b97f4a7c15ULL);
    // the group changes the sign of v, so starts cover both half-planes
    const int pool = std::max(200, 4 * n_samples);
    auto p1 = start_pool(j1, pool, seed ^ 0x5851f42d4c957f2dULL);
    auto p2 = start_pool(j2, pool, seed ^ 0x14057b7ef767814fULL);
    auto direction = [&](const std::vector<SignatureSample>& from, const JetFunctions& to,
                         const std::vector<SignatureSample>& starts) {
        double worst = 0;
        for (const auto& s : from) worst = std::max(worst, distance_to_signature_set(to, s.values, starts, tol));
        return worst;
    };
    EquivalenceReport r{Verdict::Consistent, direction(s1, j2, p2), direction(s2, j1, p1), n_samples};
    if (!std::isfinite(r.distance_12) || !std::isfinite(r.distance_21))
        r.verdict = Verdict::Inconclusive;
    else if (r.distance_12 > tol || r.distance_21 > tol)
        r.verdict = Verdict::Inequivalent;
    return r;
}

Expr image_of(const Expr& f, const group::GroupElement& g)
{
    if (g.is_formal()) throw UnsupportedForm("images need a concrete group element");
    const auto& t = g.taylor();
    for (std::size_t k = 2; k < t.coeffs.size(); ++k)
        if (!t.coeffs[k].is_zero()) throw UnsupportedForm("explicit images need an affine phi");
    Expr a0(t.coeffs.at(0)), a1(t.coeffs.at(1)), anchor(t.anchor);
    Expr C1 = g.c(1), C2 = g.c(2);
    const Expr u = Symbol::u(), v = Symbol::v();
    Symbol pu = Symbol::param("image_u"), pv = Symbol::param("image_v");
    Expr renamed = substitute(f, {{Symbol::u(), Expr(pu)}, {Symbol::v(), Expr(pv)}});
    Expr pre = substitute(renamed, {{pu, anchor + (u - a0) / a1}, {pv, C1 * v / a1}});
    return a1 / (C1 * C1) * pre - C2 * v / C1;
}

const std::vector<std::string>& corpus()
{
    static const std::vector<std::string> c{"v^3", "exp(u)", "u + v^2", "exp(u) + v^3", "u^2 + u*v^3", "sin(u) + v^3"};
    return c;
}

} // namespace invforge::harness
