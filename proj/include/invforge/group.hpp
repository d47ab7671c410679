#pragma once

#include "invforge/jet.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace invforge::group {

/// Formal phi: the symbols phi, phi', phi'', ... at the point u.
struct FormalPhi {};

/// phi(u) = sum a_k (u - anchor)^k with exact coefficients.
struct TaylorPhi {
    Rational anchor;
    std::vector<Rational> coeffs;

    /// phi^{(k)} as a polynomial in u.
    Expr derivative(int k) const;
    double derivative_at(int k, double u) const;
};

enum class Mode { Symbolic, Numeric };

/// Element of the equivalence group: t~ = C1^2 t + C0,
/// x~ = C1 x + C1 C2 t + C3, u~ = phi(u).
class GroupElement {
public:
    /// Formal element with symbols C0..C3 and phi^{(k)}.
    static GroupElement formal();
    static GroupElement identity();
    GroupElement(std::array<Rational, 4> c, TaylorPhi phi, Mode mode = Mode::Symbolic);

    bool is_formal() const { return std::holds_alternative<FormalPhi>(phi_); }
    Mode mode() const { return mode_; }
    /// C_k as an expression (a symbol in the formal element).
    Expr c(int k) const;
    const TaylorPhi& taylor() const;

    /// phi^{(k)} as a function of u; formal elements give phi^{(k)} symbols.
    Expr phi_derivative(int k) const;

    /// Values of C0..C3 and phi^{(k)}(u), k <= max_k, for numeric evaluation
    /// of formal expressions.
    NumericPoint numeric_parameters(double u, int max_k) const;
    /// Exact parameter bindings at u for substitution into formal expressions.
    Bindings parameter_bindings(const Expr& u, int max_k) const;

    nlohmann::json to_json() const;

private:
    GroupElement() = default;
    std::array<Expr, 4> c_;
    std::variant<FormalPhi, TaylorPhi> phi_;
    Mode mode_ = Mode::Symbolic;
};

struct PointImage {
    Expr u, v, f;
};
/// (u~, v~, f~) under the point transformation of g.
PointImage act_point(const GroupElement& g, const Expr& u, const Expr& v, const Expr& f);

struct NumericImage {
    double u, v, f;
};
NumericImage act_point(const GroupElement& g, double u, double v, double f);

/// D_u~ = a D_u + b D_v and D_v~ = c D_v.
struct ImplicitOps {
    Expr a, b, c;
    Expr apply_u(const Expr& e) const;
    Expr apply_v(const Expr& e) const;
};
ImplicitOps implicit_diff_ops(const GroupElement& g);

/// Transformed jets f~_{ij}, i+j <= max_order, over the formal jets f_{ij}
/// and the parameters of g. Formal elements are cached.
jet::JetMap transform_jet(const GroupElement& g, int max_order);
/// Transformed jets of concrete data: jets must be complete to max_order.
jet::JetMap transform_jet(const GroupElement& g, const jet::JetMap& jets, int max_order);
/// Numeric transformed jets at (u, v).
std::map<std::pair<int, int>, double> transform_jet(const GroupElement& g,
                                                    const std::map<std::pair<int, int>, double>& jets, double u,
                                                    double v, int max_order);

GroupElement compose(const GroupElement& g1, const GroupElement& g2);
/// Inverse; phi^{-1} is the series reversion truncated at the stored degree.
GroupElement inverse(const GroupElement& g);

/// Point transformation t~ = T, x~ = X, u~ = U over (t, x, u); the optional
/// v-component overrides the prolonged one.
struct PointMap {
    Expr T, X, U;
    std::optional<Expr> V;
};
PointMap point_map(const GroupElement& g);

/// True iff the map sends every equation u_t = u_xx + f(u, u_x) of the class
/// to an equation of the class, for the given f (exact).
bool check_class_preservation(const PointMap& m, const Expr& f);
bool check_class_preservation(const GroupElement& g, const Expr& f);

/// Deterministic sample: C1 in +-[1/2, 2], C0, C2, C3 in [-2, 2], phi of the
/// given degree with a1 in +-[1/2, 2] and higher coefficients in [-1, 1].
/// Values are dyadic rationals.
GroupElement random_element(std::uint64_t seed, Mode mode, int taylor_degree, double anchor = 0);

} // namespace invforge::group
