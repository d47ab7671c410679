#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace invforge {

/// Symbol families, listed in the fixed global order used by every normal
/// form and printer: t, x < u < v < jets < group constants < phi-derivatives
/// < algebra constants < abstract invariants < invariant derivatives
/// < user parameters < function atoms.
enum class SymbolKind : std::uint8_t {
    T = 0,
    X,
    U,
    V,
    Jet,        ///< f_{ij}
    GroupConst, ///< C0..C3
    PhiDeriv,   ///< phi^{(k)}
    AlgConst,   ///< c0..c3
    Invariant,  ///< abstract I^{ij}
    InvDeriv,   ///< word of invariant derivatives applied to some I^{ij}
    Param,      ///< named user parameter
    Atom,       ///< exp/log/sin/cos/fractional power of an expression
};

/// Interned symbol. The key packs the kind and its indices, so two symbols
/// with equal kind and indices compare equal, and key order is the global
/// symbol order.
class Symbol {
public:
    static constexpr int kPayloadBits = 40;
    static constexpr std::uint64_t kPayloadMask = (std::uint64_t{1} << kPayloadBits) - 1;
    static constexpr int kMaxWordLength = 24;

    constexpr Symbol() = default;
    static constexpr Symbol from_key(std::uint64_t key) { return Symbol(key); }

    static constexpr Symbol t() { return make(SymbolKind::T, 0); }
    static constexpr Symbol x() { return make(SymbolKind::X, 0); }
    static constexpr Symbol u() { return make(SymbolKind::U, 0); }
    static constexpr Symbol v() { return make(SymbolKind::V, 0); }
    static Symbol jet(int i, int j);
    static Symbol group_const(int k);
    static Symbol phi(int k);
    static Symbol alg_const(int k);
    static Symbol invariant(int i, int j);
    /// `word` lists operators outermost first, e.g. "uv" is D_u(D_v(I^{ij})).
    static Symbol inv_deriv(int i, int j, std::string_view word);
    static Symbol param(std::string_view name);
    static Symbol atom(std::uint32_t index) { return make(SymbolKind::Atom, index); }

    constexpr std::uint64_t key() const { return key_; }
    constexpr SymbolKind kind() const { return static_cast<SymbolKind>(key_ >> kPayloadBits); }
    constexpr std::uint64_t payload() const { return key_ & kPayloadMask; }

    /// (i, j) for Jet, Invariant and the base of InvDeriv; k for the
    /// single-index kinds (in `first`).
    std::pair<int, int> indices() const;
    /// Operator word of an InvDeriv symbol.
    std::string word() const;

    std::string name() const;
    std::string latex() const;

    friend constexpr bool operator==(Symbol a, Symbol b) { return a.key_ == b.key_; }
    friend constexpr auto operator<=>(Symbol a, Symbol b) { return a.key_ <=> b.key_; }

private:
    constexpr explicit Symbol(std::uint64_t key) : key_(key) {}
    static constexpr Symbol make(SymbolKind kind, std::uint64_t payload)
    {
        return Symbol((static_cast<std::uint64_t>(kind) << kPayloadBits) | payload);
    }

    std::uint64_t key_ = 0;
};

/// Reverse of Symbol::name() for every kind except atoms.
std::optional<Symbol> symbol_from_name(std::string_view name);

/// Plain name of the derivative suffix: (2,1) -> "uuv".
std::string jet_suffix(int i, int j);

} // namespace invforge

template <>
struct std::hash<invforge::Symbol> {
    std::size_t operator()(invforge::Symbol s) const noexcept { return std::hash<std::uint64_t>()(s.key()); }
};
