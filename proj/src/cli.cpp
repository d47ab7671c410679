#include "invforge/cli.hpp"

#include "invforge/errors.hpp"
#include "invforge/frame.hpp"
#include "invforge/harness.hpp"
#include "invforge/parse.hpp"
#include "invforge/structure.hpp"

#include "CLI11.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <optional>

namespace invforge::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "invforge 1.0.0";

struct Options {
    int order = 3;
    std::string format = "plain";
    std::uint64_t seed = 0;
    int samples = 100;
    double tol = 1e-9;
    double equiv_tol = 1e-6;
    std::string f, f1, f2, point, suite = "all";
    bool explicit_forms = false;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string render(const Expr& e, const std::string& format)
{
    return format == "latex" ? to_latex(e) : e.str();
}

Expr parse_f(const std::string& text, const char* flag)
{
    if (text.empty()) throw UsageError(std::string(flag) + " is required");
    return parse(text);
}

void require_order(int k)
{
    if (k < 2) throw UsageError("order must be at least 2 (there are no differential invariants below order 2)");
}

int cmd_invariants(const Options& o, std::ostream& out)
{
    require_order(o.order);
    auto basis = structure::functional_basis(o.order);
    json items = json::array();
    for (const auto& b : basis) {
        bool base = b.symbol.as_symbol() && b.symbol.as_symbol()->kind() == SymbolKind::Invariant;
        std::optional<Expr> closed;
        if (base || o.explicit_forms) closed = structure::expand_abstract(b.symbol);
        if (o.format == "json") {
            json item{{"label", b.label}, {"latex", to_latex(b.symbol)}, {"order", b.order}};
            if (closed) {
                item["expr"] = closed->str();
                item["ast"] = to_json_ast(*closed);
            }
            items.push_back(item);
        } else {
            out << render(b.symbol, o.format);
            if (closed) out << " = " << render(*closed, o.format);
            out << "\n";
        }
    }
    if (o.format == "json")
        out << json{{"schema", "invforge.invariants.v1"},
                    {"order", o.order},
                    {"count", basis.size()},
                    {"invariants", items}}
                   .dump(2)
            << "\n";
    return Pass;
}

int cmd_frame(const Options& o, std::ostream& out)
{
    require_order(o.order);
    auto fr = frame::solve_frame(std::max(2, o.order - 2));
    std::vector<std::pair<Symbol, Expr>> entries{{Symbol::group_const(1), fr.C1}, {Symbol::group_const(2), fr.C2}};
    for (int k = 0; k <= o.order; ++k) entries.emplace_back(Symbol::phi(k), fr.phi[static_cast<std::size_t>(k)]);
    if (o.format == "json") {
        json items = json::array();
        for (const auto& [s, e] : entries)
            items.push_back({{"name", s.name()}, {"latex", s.latex()}, {"expr", e.str()}, {"ast", to_json_ast(e)}});
        out << json{{"schema", "invforge.frame.v1"}, {"order", o.order}, {"entries", items}}.dump(2) << "\n";
        return Pass;
    }
    for (const auto& [s, e] : entries)
        out << (o.format == "latex" ? s.latex() : s.name()) << " = " << render(e, o.format) << "\n";
    return Pass;
}

struct CheckLine {
    std::string suite, name;
    bool passed;
    std::string detail;
};

void run_phantom(std::vector<CheckLine>& lines)
{
    for (const auto& r : structure::phantom_check(4)) lines.push_back({"phantom", r.name, r.passed, ""});
}

void run_recurrence(int order, std::vector<CheckLine>& lines)
{
    for (int n = 2; n <= std::min(order, 4); ++n)
        for (int j = 1; j <= n; ++j) {
            int i = n - j;
            if (!((i == 1 && j == 1) || n >= 3)) continue;
            auto [x, y] = structure::recurrence(i, j);
            bool ok_x = canonical_equal(structure::expand_abstract(x), frame::normalized_invariant(i + 1, j).expr);
            bool ok_y = canonical_equal(structure::expand_abstract(y), frame::normalized_invariant(i, j + 1).expr);
            std::string from = "I" + std::to_string(i) + std::to_string(j);
            lines.push_back({"recurrence", from + " -> I" + std::to_string(i + 1) + std::to_string(j), ok_x, x.str()});
            lines.push_back({"recurrence", from + " -> I" + std::to_string(i) + std::to_string(j + 1), ok_y, y.str()});
        }
}

void run_commutator(std::vector<CheckLine>& lines)
{
    auto y = structure::commutator_coeffs();
    const Expr i03 = structure::I(0, 3), half(Rational(1, 2));
    lines.push_back({"commutator", "Y1_12 = I03/2 - 2", y.Y112 == half * i03 - Expr(2), y.Y112.str()});
    lines.push_back({"commutator", "Y2_12 = I03/2", y.Y212 == half * i03, y.Y212.str()});
    std::vector<std::pair<std::string, Expr>> probes{{"u", Symbol::u()},
                                                     {"v", Symbol::v()},
                                                     {"f", jet::f(0, 0)},
                                                     {"f_v", jet::f(0, 1)},
                                                     {"I11", frame::normalized_invariant(1, 1).expr}};
    for (const auto& [name, e] : probes)
        lines.push_back({"commutator", "operator identity on " + name,
                         canonical_equal(structure::commutator_defect(e), Expr()), ""});
}

std::optional<harness::InvarianceReport> run_invariance(const Options& o, std::vector<CheckLine>& lines)
{
    Expr fn = parse_f(o.f, "--f");
    auto report = harness::invariance_test(fn, std::clamp(o.order, 2, 4), o.samples, o.seed, o.tol);
    char buf[64];
    std::snprintf(buf, sizeof buf, "maxRelError = %.3g", report.max_rel_error);
    lines.push_back({"invariance", o.f, report.max_rel_error <= o.tol, buf});
    return report;
}

int cmd_check(const Options& o, std::ostream& out)
{
    std::vector<CheckLine> lines;
    std::optional<harness::InvarianceReport> inv;
    bool all = o.suite == "all";
    if (o.suite == "invariance" && o.f.empty()) throw UsageError("--f is required for the invariance suite");
    if (all || o.suite == "phantom") run_phantom(lines);
    if (all || o.suite == "recurrence") run_recurrence(o.order, lines);
    if (all || o.suite == "commutator") run_commutator(lines);
    if (o.suite == "invariance" || (all && !o.f.empty())) inv = run_invariance(o, lines);
    bool passed = std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.passed; });
    if (o.format == "json") {
        json items = json::array();
        for (const auto& l : lines) {
            json item{{"suite", l.suite}, {"name", l.name}, {"passed", l.passed}};
            if (!l.detail.empty()) item["detail"] = l.detail;
            items.push_back(item);
        }
        json j{{"schema", "invforge.check.v1"}, {"suite", o.suite}, {"seed", o.seed}, {"passed", passed}, {"checks", items}};
        if (inv) j["invariance"] = inv->to_json();
        out << j.dump(2) << "\n";
    } else {
        for (const auto& l : lines) {
            out << (l.passed ? "[PASS] " : "[FAIL] ") << l.suite << ": " << l.name;
            if (!l.detail.empty() && (l.suite == "invariance" || !l.passed)) out << " (" << l.detail << ")";
            out << "\n";
        }
        if (all && o.f.empty()) out << "[SKIP] invariance: no --f given\n";
        out << (passed ? "all checks passed" : "some checks failed") << "\n";
    }
    return passed ? Pass : Fail;
}

std::pair<Rational, Rational> parse_point(const std::string& text)
{
    auto comma = text.find(',');
    if (comma == std::string::npos) throw UsageError("--point expects u,v");
    auto coord = [](const std::string& s) {
        auto r = parse(s).as_rational();
        if (!r) throw UsageError("point coordinates must be rational constants");
        return *r;
    };
    return {coord(text.substr(0, comma)), coord(text.substr(comma + 1))};
}

int cmd_classify(const Options& o, std::ostream& out)
{
    Expr fn = parse_f(o.f, "--f");
    if (o.point.empty()) throw UsageError("--point is required");
    auto [u, v] = parse_point(o.point);
    auto r = frame::classify(fn, u, v);
    std::string tag = frame::to_string(r.tag);
    if (o.format == "json") {
        json j{{"schema", "invforge.classify.v1"}, {"f", fn.str()}, {"point", {u.str(), v.str()}},
               {"tag", tag},  {"W", r.W.str()},  {"S", r.S.str()},
               {"exact", r.exact}};
        if (std::isfinite(r.w_value)) j["wValue"] = r.w_value;
        if (std::isfinite(r.s_value)) j["sValue"] = r.s_value;
        out << j.dump(2) << "\n";
    } else {
        out << tag << "\n";
        out << "W = " << render(r.W, o.format) << "\n";
        out << "S = " << render(r.S, o.format) << "\n";
        if (!r.exact) out << "(numeric decision)\n";
    }
    return Pass;
}

int cmd_equiv(const Options& o, std::ostream& out)
{
    Expr g1 = parse_f(o.f1, "--f1"), g2 = parse_f(o.f2, "--f2");
    json j{{"schema", "invforge.equiv.v1"}, {"f1", g1.str()}, {"f2", g2.str()}, {"seed", o.seed}, {"tol", o.equiv_tol}};
    harness::Verdict verdict;
    try {
        auto r = harness::equivalence_necessary(g1, g2, o.samples, o.equiv_tol, o.seed);
        verdict = r.verdict;
        j["verdict"] = harness::to_string(r.verdict);
        if (std::isfinite(r.distance_12)) j["distance12"] = r.distance_12;
        if (std::isfinite(r.distance_21)) j["distance21"] = r.distance_21;
        j["samples"] = r.samples;
    } catch (const NoRegularPoint& e) {
        verdict = harness::Verdict::Inconclusive;
        j["verdict"] = "inconclusive";
        j["reason"] = e.what();
    }
    if (o.format == "json") {
        out << j.dump(2) << "\n";
    } else {
        out << j["verdict"].get<std::string>() << "\n";
        if (j.contains("distance12"))
            out << "distance f1 -> f2: " << j["distance12"].get<double>() << "\n"
                << "distance f2 -> f1: " << j["distance21"].get<double>() << "\n";
        if (j.contains("reason")) out << j["reason"].get<std::string>() << "\n";
        out << "(necessary conditions only; equivalence is never asserted)\n";
    }
    switch (verdict) {
    case harness::Verdict::Consistent: return Pass;
    case harness::Verdict::Inequivalent: return Fail;
    case harness::Verdict::Inconclusive: return Degenerate;
    }
    return Degenerate;
}

int cmd_transform(const Options& o, std::ostream& out)
{
    Expr fn = parse_f(o.f, "--f");
    auto g = group::random_element(o.seed, group::Mode::Symbolic, 1);
    Expr img = harness::image_of(fn, g);
    if (o.format == "json")
        out << json{{"schema", "invforge.transform.v1"}, {"f", fn.str()}, {"seed", o.seed},
                    {"element", g.to_json()}, {"image", img.str()}, {"latex", to_latex(img)}}
                   .dump(2)
            << "\n";
    else
        out << render(img, o.format) << "\n";
    return Pass;
}

std::uint64_t default_seed()
{
    const char* env = std::getenv("INVFORGE_SEED");
    if (!env || !*env) return 0;
    std::string s(env);
    if (!std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
        throw UsageError("INVFORGE_SEED must be a non-negative integer");
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw UsageError("INVFORGE_SEED is out of range");
    }
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    try {
        o.seed = default_seed();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return Usage;
    }

    CLI::App app{"Differential invariants of u_t = u_xx + f(u, u_x) under its equivalence group.\n"
                 "Exit codes: 0 pass, 1 fail, 2 usage, 3 degenerate.",
                 "invforge"};
    app.set_version_flag("--version", kVersion);
    std::string schema_name;
    app.add_option("--schema", schema_name, "Print the versioned JSON schema of a command's output")
        ->check(CLI::IsMember(schema_names()));
    app.require_subcommand(0, 1);

    const std::vector<std::string> formats{"plain", "latex", "json"};
    auto add_format = [&](CLI::App* c) {
        c->add_option("--format", o.format, "Output format: plain, latex or json")
            ->check(CLI::IsMember(formats))
            ->capture_default_str();
    };
    auto add_seed = [&](CLI::App* c) {
        c->add_option("--seed", o.seed, "Random seed (default: INVFORGE_SEED or 0)");
    };

    auto* inv = app.add_subcommand("invariants", "Functional basis of differential invariants up to an order");
    inv->add_option("--order", o.order, "Maximal differential order (>= 2)")->capture_default_str();
    inv->add_flag("--explicit", o.explicit_forms, "Print closed forms of every invariant derivative");
    add_format(inv);

    auto* fr = app.add_subcommand("frame", "Moving frame C1, C2, phi, phi', ... up to phi^(k)");
    fr->add_option("--order", o.order, "Highest phi derivative printed (>= 2)")->capture_default_str();
    add_format(fr);

    auto* chk = app.add_subcommand("check", "Run verification suites");
    chk->add_option("--suite", o.suite, "phantom, recurrence, commutator, invariance or all")
        ->check(CLI::IsMember({"phantom", "recurrence", "commutator", "invariance", "all"}))
        ->capture_default_str();
    chk->add_option("--f", o.f, "Nonlinearity f(u, v) for the invariance suite, v = u_x");
    chk->add_option("--order", o.order, "Invariant order for recurrences (<= 4) and invariance (2..4)")
        ->capture_default_str();
    chk->add_option("--samples", o.samples, "Number of random samples")->check(CLI::PositiveNumber)->capture_default_str();
    chk->add_option("--tol", o.tol, "Relative tolerance for invariance")->capture_default_str();
    add_seed(chk);
    add_format(chk);

    auto* cls = app.add_subcommand("classify", "Stratum of f at a point: regular, singular or ultra-singular");
    cls->add_option("--f", o.f, "Nonlinearity f(u, v)");
    cls->add_option("--point", o.point, "Point u,v with rational coordinates, e.g. 1,1 or -3/7,5");
    add_format(cls);

    auto* eq = app.add_subcommand("equiv", "Necessary-condition equivalence test of two nonlinearities");
    eq->add_option("--f1", o.f1, "First nonlinearity");
    eq->add_option("--f2", o.f2, "Second nonlinearity");
    eq->add_option("--samples", o.samples, "Signature samples per equation")->check(CLI::PositiveNumber)->capture_default_str();
    eq->add_option("--tol", o.equiv_tol, "Relative signature distance tolerance")->capture_default_str();
    add_seed(eq);
    add_format(eq);

    auto* tr = app.add_subcommand("transform", "Image of f under a seeded random group element with affine phi");
    tr->add_option("--f", o.f, "Nonlinearity f(u, v)");
    add_seed(tr);
    add_format(tr);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? Pass : Usage;
    }

    if (!schema_name.empty()) {
        out << schema(schema_name);
        return Pass;
    }
    try {
        if (inv->parsed()) return cmd_invariants(o, out);
        if (fr->parsed()) return cmd_frame(o, out);
        if (chk->parsed()) return cmd_check(o, out);
        if (cls->parsed()) return cmd_classify(o, out);
        if (eq->parsed()) return cmd_equiv(o, out);
        if (tr->parsed()) return cmd_transform(o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return Usage;
    } catch (const SyntaxError& e) {
        err << "error: " << e.what() << "\n";
        return Usage;
    } catch (const NoRegularPoint& e) {
        err << "degenerate: " << e.what() << "\n";
        return Degenerate;
    } catch (const GeneratorDegenerate& e) {
        err << "degenerate: " << e.what() << "\n";
        return Degenerate;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return Fail;
    }
    out << app.help();
    return Usage;
}

} // namespace invforge::cli
