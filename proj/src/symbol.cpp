#include "invforge/symbol.hpp"

#include "internal.hpp"

#include <cctype>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace invforge {

namespace {

constexpr int kIndexBits = 20;
constexpr std::uint64_t kIndexMask = (std::uint64_t{1} << kIndexBits) - 1;

void check_index(int i, const char* what)
{
    if (i < 0 || static_cast<std::uint64_t>(i) > kIndexMask / 2)
        throw std::out_of_range(std::string("index out of range for ") + what);
}

std::uint64_t pack_pair(int i, int j)
{
    return (static_cast<std::uint64_t>(i + j) << kIndexBits) | static_cast<std::uint64_t>(i);
}

std::pair<int, int> unpack_pair(std::uint64_t payload)
{
    int grade = static_cast<int>(payload >> kIndexBits);
    int i = static_cast<int>(payload & kIndexMask);
    return {i, grade - i};
}

struct ParamTable {
    std::shared_mutex mutex;
    std::vector<std::string> names;
    std::unordered_map<std::string, std::uint32_t> index;
};

ParamTable& params()
{
    static ParamTable table;
    return table;
}

std::string primes(int k)
{
    if (k <= 3) return std::string(static_cast<std::size_t>(k), '\'');
    return "^{(" + std::to_string(k) + ")}";
}

std::string invariant_plain(int i, int j)
{
    if (i < 10 && j < 10) return "I" + std::to_string(i) + std::to_string(j);
    return "I_" + std::to_string(i) + "_" + std::to_string(j);
}

std::string invariant_latex(int i, int j)
{
    if (i < 10 && j < 10) return "I^{" + std::to_string(i) + std::to_string(j) + "}";
    return "I^{" + std::to_string(i) + "," + std::to_string(j) + "}";
}

bool all_of(std::string_view s, char c)
{
    for (char ch : s)
        if (ch != c) return false;
    return true;
}

std::optional<int> parse_int(std::string_view s)
{
    if (s.empty() || s.size() > 6) return std::nullopt;
    int r = 0;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
        r = r * 10 + (c - '0');
    }
    return r;
}

std::optional<std::pair<int, int>> parse_invariant_name(std::string_view s)
{
    if (s.size() == 3 && s[0] == 'I' && std::isdigit(static_cast<unsigned char>(s[1])) &&
        std::isdigit(static_cast<unsigned char>(s[2])))
        return std::pair{s[1] - '0', s[2] - '0'};
    if (s.size() > 4 && s.substr(0, 2) == "I_") {
        auto rest = s.substr(2);
        auto us = rest.find('_');
        if (us == std::string_view::npos) return std::nullopt;
        auto a = parse_int(rest.substr(0, us));
        auto b = parse_int(rest.substr(us + 1));
        if (a && b) return std::pair{*a, *b};
    }
    return std::nullopt;
}

} // namespace

Symbol Symbol::jet(int i, int j)
{
    check_index(i, "jet");
    check_index(j, "jet");
    return make(SymbolKind::Jet, pack_pair(i, j));
}

Symbol Symbol::group_const(int k)
{
    if (k < 0 || k > 3) throw std::out_of_range("group constant index must be 0..3");
    return make(SymbolKind::GroupConst, static_cast<std::uint64_t>(k));
}

Symbol Symbol::phi(int k)
{
    check_index(k, "phi");
    return make(SymbolKind::PhiDeriv, static_cast<std::uint64_t>(k));
}

Symbol Symbol::alg_const(int k)
{
    if (k < 0 || k > 3) throw std::out_of_range("algebra constant index must be 0..3");
    return make(SymbolKind::AlgConst, static_cast<std::uint64_t>(k));
}

Symbol Symbol::invariant(int i, int j)
{
    check_index(i, "invariant");
    check_index(j, "invariant");
    return make(SymbolKind::Invariant, pack_pair(i, j));
}

Symbol Symbol::inv_deriv(int i, int j, std::string_view word)
{
    if (i < 0 || j < 0 || i > 31 || j > 31) throw std::out_of_range("invariant-derivative base index must be 0..31");
    if (word.empty() || word.size() > static_cast<std::size_t>(kMaxWordLength))
        throw std::out_of_range("invariant-derivative word length must be 1..24");
    std::uint64_t bits = 0;
    for (std::size_t n = 0; n < word.size(); ++n) {
        if (word[n] == 'v')
            bits |= std::uint64_t{1} << n;
        else if (word[n] != 'u')
            throw std::invalid_argument("invariant-derivative word must consist of 'u' and 'v'");
    }
    std::uint64_t payload = (static_cast<std::uint64_t>(i) << 35) | (static_cast<std::uint64_t>(j) << 30) |
                            (static_cast<std::uint64_t>(word.size()) << 24) | bits;
    return make(SymbolKind::InvDeriv, payload);
}

Symbol Symbol::param(std::string_view name)
{
    auto& table = params();
    std::string key(name);
    {
        std::shared_lock lock(table.mutex);
        auto it = table.index.find(key);
        if (it != table.index.end()) return make(SymbolKind::Param, it->second);
    }
    std::unique_lock lock(table.mutex);
    auto it = table.index.find(key);
    if (it != table.index.end()) return make(SymbolKind::Param, it->second);
    auto idx = static_cast<std::uint32_t>(table.names.size());
    table.names.push_back(key);
    table.index.emplace(key, idx);
    return make(SymbolKind::Param, idx);
}

std::pair<int, int> Symbol::indices() const
{
    switch (kind()) {
    case SymbolKind::Jet:
    case SymbolKind::Invariant:
        return unpack_pair(payload());
    case SymbolKind::InvDeriv:
        return {static_cast<int>((payload() >> 35) & 31), static_cast<int>((payload() >> 30) & 31)};
    case SymbolKind::GroupConst:
    case SymbolKind::PhiDeriv:
    case SymbolKind::AlgConst:
    case SymbolKind::Atom:
    case SymbolKind::Param:
        return {static_cast<int>(payload()), 0};
    default:
        return {0, 0};
    }
}

std::string Symbol::word() const
{
    if (kind() != SymbolKind::InvDeriv) return {};
    auto len = static_cast<std::size_t>((payload() >> 24) & 31);
    std::string w(len, 'u');
    for (std::size_t n = 0; n < len; ++n)
        if ((payload() >> n) & 1) w[n] = 'v';
    return w;
}

std::string jet_suffix(int i, int j)
{
    return std::string(static_cast<std::size_t>(i), 'u') + std::string(static_cast<std::size_t>(j), 'v');
}

std::string Symbol::name() const
{
    switch (kind()) {
    case SymbolKind::T: return "t";
    case SymbolKind::X: return "x";
    case SymbolKind::U: return "u";
    case SymbolKind::V: return "v";
    case SymbolKind::Jet: {
        auto [i, j] = indices();
        return i + j == 0 ? "f" : "f_" + jet_suffix(i, j);
    }
    case SymbolKind::GroupConst: return "C" + std::to_string(payload());
    case SymbolKind::PhiDeriv: {
        auto k = static_cast<int>(payload());
        return k == 0 ? "phi" : "phi_" + jet_suffix(k, 0);
    }
    case SymbolKind::AlgConst: return "c" + std::to_string(payload());
    case SymbolKind::Invariant: {
        auto [i, j] = indices();
        return invariant_plain(i, j);
    }
    case SymbolKind::InvDeriv: {
        auto [i, j] = indices();
        std::string out;
        for (char c : word()) out += c == 'u' ? "Du" : "Dv";
        return out + "_" + invariant_plain(i, j);
    }
    case SymbolKind::Param: {
        auto& table = params();
        std::shared_lock lock(table.mutex);
        return table.names.at(payload());
    }
    case SymbolKind::Atom: return detail::atom_display(static_cast<std::uint32_t>(payload()), false);
    }
    return "?";
}

std::string Symbol::latex() const
{
    switch (kind()) {
    case SymbolKind::T:
    case SymbolKind::X:
    case SymbolKind::U:
    case SymbolKind::V: return name();
    case SymbolKind::Jet: {
        auto [i, j] = indices();
        return i + j == 0 ? "f" : "f_{" + jet_suffix(i, j) + "}";
    }
    case SymbolKind::GroupConst: return "C_{" + std::to_string(payload()) + "}";
    case SymbolKind::PhiDeriv: return "\\varphi" + primes(static_cast<int>(payload()));
    case SymbolKind::AlgConst: return "c_{" + std::to_string(payload()) + "}";
    case SymbolKind::Invariant: {
        auto [i, j] = indices();
        return invariant_latex(i, j);
    }
    case SymbolKind::InvDeriv: {
        auto [i, j] = indices();
        std::string out;
        for (char c : word()) out += std::string("\\mathrm{D}^{\\mathrm{i}}_{") + c + "}";
        return out + " " + invariant_latex(i, j);
    }
    case SymbolKind::Param: return name();
    case SymbolKind::Atom: return detail::atom_display(static_cast<std::uint32_t>(payload()), true);
    }
    return "?";
}

std::optional<Symbol> symbol_from_name(std::string_view s)
{
    if (s == "t") return Symbol::t();
    if (s == "x") return Symbol::x();
    if (s == "u") return Symbol::u();
    if (s == "v" || s == "ux") return Symbol::v();
    if (s == "f") return Symbol::jet(0, 0);
    if (s.size() > 2 && s.substr(0, 2) == "f_") {
        auto rest = s.substr(2);
        auto split = rest.find_first_not_of('u');
        int i = static_cast<int>(split == std::string_view::npos ? rest.size() : split);
        auto tail = rest.substr(static_cast<std::size_t>(i));
        if (!all_of(tail, 'v')) return std::nullopt;
        return Symbol::jet(i, static_cast<int>(tail.size()));
    }
    if (s.size() == 2 && (s[0] == 'C' || s[0] == 'c') && s[1] >= '0' && s[1] <= '3')
        return s[0] == 'C' ? Symbol::group_const(s[1] - '0') : Symbol::alg_const(s[1] - '0');
    if (s == "phi") return Symbol::phi(0);
    if (s.size() > 4 && s.substr(0, 4) == "phi_" && all_of(s.substr(4), 'u'))
        return Symbol::phi(static_cast<int>(s.size() - 4));
    if (auto inv = parse_invariant_name(s)) return Symbol::invariant(inv->first, inv->second);
    if (s.size() > 3 && s[0] == 'D') {
        auto us = s.find('_');
        if (us == std::string_view::npos) return std::nullopt;
        auto ops = s.substr(0, us);
        auto base = parse_invariant_name(s.substr(us + 1));
        if (!base || ops.size() % 2 != 0) return std::nullopt;
        std::string word;
        for (std::size_t n = 0; n < ops.size(); n += 2) {
            if (ops[n] != 'D' || (ops[n + 1] != 'u' && ops[n + 1] != 'v')) return std::nullopt;
            word += ops[n + 1];
        }
        return Symbol::inv_deriv(base->first, base->second, word);
    }
    return std::nullopt;
}

} // namespace invforge
