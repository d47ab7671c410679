#include "invforge/parse.hpp"

#include "internal.hpp"

namespace invforge {

namespace {

std::string wrap(const std::string& s) { return "(" + s + ")"; }

// plain ----------------------------------------------------------------------

std::string plain_power(Symbol s, std::uint32_t e)
{
    std::string base = s.name();
    if (s.kind() == SymbolKind::Atom && atom_info(s).kind == AtomKind::Pow && e > 1) base = wrap(base);
    return e == 1 ? base : base + "^" + std::to_string(e);
}

std::string plain_monomial(const Monomial& m)
{
    std::string out;
    for (std::size_t n = 0; n < m.size(); ++n) {
        if (!out.empty()) out += "*";
        out += plain_power(m.symbol(n), m.exponent(n));
    }
    return out;
}

std::string plain_factor(const Poly& p, std::uint32_t e)
{
    std::string base = poly_str(p);
    bool compound = p.size() > 1 || (p.size() == 1 && p.leading().mono.size() + (p.leading().coeff.is_one() ? 0 : 1) > 1);
    if (compound) base = wrap(base);
    return e == 1 ? base : base + "^" + std::to_string(e);
}

// latex ----------------------------------------------------------------------

std::string latex_rational(const Rational& r)
{
    if (r.is_integer()) return r.str();
    return "\\frac{" + mpz_class(r.num()).get_str() + "}{" + mpz_class(r.den()).get_str() + "}";
}

std::string latex_power(Symbol s, std::uint32_t e)
{
    std::string base = s.latex();
    if (e == 1) return base;
    bool braced = s.kind() == SymbolKind::Jet || s.kind() == SymbolKind::GroupConst ||
                  s.kind() == SymbolKind::AlgConst || s.kind() == SymbolKind::PhiDeriv ||
                  s.kind() == SymbolKind::Invariant || s.kind() == SymbolKind::InvDeriv;
    if (s.kind() == SymbolKind::Atom) base = "\\left(" + base + "\\right)";
    else if (braced) base = "{" + base + "}";
    return base + "^{" + std::to_string(e) + "}";
}

std::string latex_poly(const Poly& p)
{
    if (p.is_zero()) return "0";
    std::string out;
    const auto& terms = p.terms();
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
        Rational c = it->coeff;
        bool negative = c.sign() < 0;
        if (negative) c = -c;
        if (out.empty())
            out += negative ? "-" : "";
        else
            out += negative ? " - " : " + ";
        std::string mono;
        for (std::size_t n = 0; n < it->mono.size(); ++n) {
            if (!mono.empty()) mono += " ";
            mono += latex_power(it->mono.symbol(n), it->mono.exponent(n));
        }
        if (mono.empty())
            out += latex_rational(c);
        else if (c.is_one())
            out += mono;
        else
            out += latex_rational(c) + " " + mono;
    }
    return out;
}

std::string latex_factor(const Poly& p, std::uint32_t e)
{
    std::string base = latex_poly(p);
    if (p.size() > 1) base = "\\left(" + base + "\\right)";
    return e == 1 ? base : base + "^{" + std::to_string(e) + "}";
}

// json -----------------------------------------------------------------------

nlohmann::json json_rational(const Rational& r)
{
    return {{"op", "rat"}, {"num", mpz_class(r.num()).get_str()}, {"den", mpz_class(r.den()).get_str()}};
}

nlohmann::json json_symbol(Symbol s);

nlohmann::json json_poly(const Poly& p);

nlohmann::json json_node(const std::string& op, nlohmann::json args)
{
    if (args.size() == 1) return args[0];
    return {{"op", op}, {"args", std::move(args)}};
}

nlohmann::json json_pow(nlohmann::json base, const Rational& e)
{
    return {{"op", "pow"}, {"args", nlohmann::json::array({std::move(base), json_rational(e)})}};
}

nlohmann::json json_symbol(Symbol s)
{
    if (s.kind() != SymbolKind::Atom) return {{"op", "sym"}, {"name", s.name()}};
    AtomInfo info = atom_info(s);
    nlohmann::json arg = to_json_ast(info.arg);
    switch (info.kind) {
    case AtomKind::Exp: return {{"op", "call"}, {"name", "exp"}, {"args", nlohmann::json::array({arg})}};
    case AtomKind::Log: return {{"op", "call"}, {"name", "log"}, {"args", nlohmann::json::array({arg})}};
    case AtomKind::Sin: return {{"op", "call"}, {"name", "sin"}, {"args", nlohmann::json::array({arg})}};
    case AtomKind::Cos: return {{"op", "call"}, {"name", "cos"}, {"args", nlohmann::json::array({arg})}};
    case AtomKind::Pow: return json_pow(arg, info.exponent);
    }
    return nullptr;
}

nlohmann::json json_poly(const Poly& p)
{
    if (p.is_zero()) return json_rational(Rational());
    nlohmann::json terms = nlohmann::json::array();
    const auto& ts = p.terms();
    for (auto it = ts.rbegin(); it != ts.rend(); ++it) {
        nlohmann::json factors = nlohmann::json::array();
        if (!it->coeff.is_one() || it->mono.is_one()) factors.push_back(json_rational(it->coeff));
        for (std::size_t n = 0; n < it->mono.size(); ++n) {
            auto s = json_symbol(it->mono.symbol(n));
            std::uint32_t e = it->mono.exponent(n);
            factors.push_back(e == 1 ? s : json_pow(s, Rational(e)));
        }
        terms.push_back(json_node("mul", std::move(factors)));
    }
    return json_node("add", std::move(terms));
}

} // namespace

std::string poly_str(const Poly& p)
{
    if (p.is_zero()) return "0";
    std::string out;
    const auto& terms = p.terms();
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
        Rational c = it->coeff;
        bool negative = c.sign() < 0;
        if (negative) c = -c;
        if (out.empty())
            out += negative ? "-" : "";
        else
            out += negative ? " - " : " + ";
        std::string mono = plain_monomial(it->mono);
        if (mono.empty())
            out += c.str();
        else if (c.is_one())
            out += mono;
        else
            out += c.str() + "*" + mono;
    }
    return out;
}

std::string Expr::str() const
{
    const auto& den = denominator();
    if (den.empty()) return poly_str(numerator());
    std::string num = poly_str(numerator());
    if (numerator().size() > 1) num = wrap(num);
    std::string d;
    for (const auto& f : den) {
        if (!d.empty()) d += "*";
        d += plain_factor(f.poly, f.exp);
    }
    if (den.size() > 1) d = wrap(d);
    return num + "/" + d;
}

std::string to_latex(const Expr& e)
{
    const auto& den = e.denominator();
    if (den.empty()) return latex_poly(e.numerator());
    std::string d;
    for (const auto& f : den) {
        if (!d.empty()) d += " ";
        d += latex_factor(f.poly, f.exp);
    }
    return "\\frac{" + latex_poly(e.numerator()) + "}{" + d + "}";
}

nlohmann::json to_json_ast(const Expr& e)
{
    nlohmann::json num = json_poly(e.numerator());
    if (e.denominator().empty()) return num;
    nlohmann::json factors = nlohmann::json::array({num});
    for (const auto& f : e.denominator()) factors.push_back(json_pow(json_poly(f.poly), Rational(-static_cast<long long>(f.exp))));
    return {{"op", "mul"}, {"args", std::move(factors)}};
}

std::string print(const Expr& e, PrintStyle style)
{
    switch (style) {
    case PrintStyle::Plain: return e.str();
    case PrintStyle::Latex: return to_latex(e);
    case PrintStyle::Json: return to_json_ast(e).dump();
    }
    return e.str();
}

namespace detail {

std::string atom_display(std::uint32_t index, bool latex)
{
    AtomInfo info = atom_info(Symbol::atom(index));
    if (latex) {
        std::string arg = to_latex(info.arg);
        switch (info.kind) {
        case AtomKind::Exp: return "e^{" + arg + "}";
        case AtomKind::Log: return "\\log\\left(" + arg + "\\right)";
        case AtomKind::Sin: return "\\sin\\left(" + arg + "\\right)";
        case AtomKind::Cos: return "\\cos\\left(" + arg + "\\right)";
        case AtomKind::Pow: return "\\left(" + arg + "\\right)^{" + info.exponent.str() + "}";
        }
    }
    std::string arg = info.arg.str();
    switch (info.kind) {
    case AtomKind::Exp: return "exp(" + arg + ")";
    case AtomKind::Log: return "log(" + arg + ")";
    case AtomKind::Sin: return "sin(" + arg + ")";
    case AtomKind::Cos: return "cos(" + arg + ")";
    case AtomKind::Pow: return "(" + arg + ")^(" + info.exponent.str() + ")";
    }
    return "?";
}

} // namespace detail

} // namespace invforge
