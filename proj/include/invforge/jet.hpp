#pragma once

#include "invforge/expr.hpp"

#include <map>
#include <utility>

namespace invforge::jet {

enum class Dir { U, V };

/// Formal jet coordinate f_{ij}.
inline Expr f(int i, int j) { return Expr(Symbol::jet(i, j)); }
inline Expr phi(int k) { return Expr(Symbol::phi(k)); }

/// Total derivative on J(u,v|f). D_u also advances phi^{(k)} to
/// phi^{(k+1)}, since phi is a function of u.
Expr total_derivative(const Expr& e, Dir dir);

/// Maximal i+j over the jet symbols of e, or -1 if there are none.
int order(const Expr& e);

using JetMap = std::map<std::pair<int, int>, Expr>;

/// (i,j) -> d^{i+j} f / du^i dv^j for i+j <= max_order.
JetMap concrete_jet(const Expr& f, int max_order);

/// Bindings f_{ij} -> value for every entry of the map.
Bindings jet_bindings(const JetMap& jets);

/// Numeric jets at a point (u, v); entries ordered like the map.
std::map<std::pair<int, int>, double> numeric_jet(const JetMap& jets, double u, double v);

/// General element of the equivalence algebra with free constants c0..c3
/// and formal phi^{(k)}.
struct VectorField {
    Expr tau, xi, phi, eta, theta;
};
VectorField general_field();

/// Prolongation component theta^{ij} by the closed-form sum.
Expr prolong_component(int i, int j);
/// The same component by D_u^i D_v^j (theta - phi f_10 - eta f_01)
/// + phi f_{i+1,j} + eta f_{i,j+1}.
Expr prolong_component_by_operators(int i, int j);

/// pr Q applied to a differential function of (u, v, f_{ij}).
Expr prolonged_action(const Expr& e);

} // namespace invforge::jet
