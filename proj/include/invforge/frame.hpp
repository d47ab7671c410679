#pragma once

#include "invforge/group.hpp"
#include "invforge/jet.hpp"

#include <optional>
#include <string>
#include <vector>

namespace invforge::frame {

/// W = 2f - 2v f_v + v^2 f_vv over the formal jets.
Expr relative_W();
/// S = 2 f_u - v f_uv over the formal jets.
Expr relative_S();
Expr relative_W(const jet::JetMap& jets);
Expr relative_S(const jet::JetMap& jets);

enum class Regularity { Regular, Singular, UltraSingular };
std::string to_string(Regularity r);

struct RegularityClass {
    Regularity tag;
    Expr W, S;
    double w_value, s_value;
    /// False when the tag relied on the numeric threshold.
    bool exact;
};

/// Scale-aware numeric test |W| > 1e-8 (1 + |f| + |v f_v| + |v^2 f_vv|).
bool numerically_regular(double W, double f, double v, double fv, double fvv);

/// Stratum of f at (u, v). Exact when W and S reduce to rationals there.
RegularityClass classify(const Expr& f, const Rational& u, const Rational& v);

struct Frame {
    int order = 0;
    Expr C1, C2;
    /// phi^{(k)} for k = 0..order+2.
    std::vector<Expr> phi;

    /// Bindings C1, C2, phi^{(k)} -> frame values.
    Bindings bindings() const;
};

/// Moving frame of the regular stratum, phi^{(i+2)} solved from
/// f~_{i0} = 0 for 1 <= i <= order. Cached.
Frame solve_frame(int order);

/// (W/(4v^4)) (2f_u + (f - v f_v + v^2 f_vv) f_vv), the closed form of phi'''.
Expr phi3_closed_form();

struct Invariant {
    int i = 0, j = 0;
    Expr expr;
    int order = 0;
    bool phantom = false;
};

bool is_phantom(int i, int j);

/// I^{ij} = iota(f_{ij}) over the formal jets. Cached.
const Invariant& normalized_invariant(int i, int j);

/// iota(e): u -> 0, v -> 1, f_{ij} -> I^{ij}. Throws FrameOrderTooLow if the
/// frame does not reach the order of e.
Expr invariantize(const Expr& e, const Frame& frame);
/// Same with a frame of sufficient order.
Expr invariantize(const Expr& e);

/// Replaces abstract invariant symbols I^{ij} by their closed forms.
Expr expand_invariants(const Expr& e);

} // namespace invforge::frame
