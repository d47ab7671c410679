#pragma once

#include "invforge/frame.hpp"
#include "invforge/jet.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace invforge::structure {

using jet::Dir;

/// Horizontal one-form w1 * omega^1 + w2 * omega^2.
struct OneForm {
    Expr w1, w2;

    bool is_zero() const { return w1.is_zero() && w2.is_zero(); }
    friend OneForm operator+(const OneForm& a, const OneForm& b) { return {a.w1 + b.w1, a.w2 + b.w2}; }
    friend OneForm operator-(const OneForm& a, const OneForm& b) { return {a.w1 - b.w1, a.w2 - b.w2}; }
    friend OneForm operator*(const Expr& s, const OneForm& a) { return {s * a.w1, s * a.w2}; }
    friend bool operator==(const OneForm& a, const OneForm& b) { return a.w1 == b.w1 && a.w2 == b.w2; }
};

/// omega^1, omega^2.
OneForm omega1();
OneForm omega2();

/// Coefficient of omega^1 ^ omega^2 in a ^ b.
Expr wedge(const OneForm& a, const OneForm& b);

/// Abstract normalized invariant: phantom indices give their constants,
/// the others the symbol I^{ij}.
Expr I(int i, int j);

/// Invariant differentiation on closed forms over the jets:
/// D_u^i = (2v^2/W)(D_u - v f_vv D_v / 2), D_v^i = v D_v.
Expr invariant_derivative(const Expr& e, Dir dir);

/// Invariant differentiation on the abstract algebra of symbols I^{ij} and
/// their derivative words.
Expr abstract_derivative(const Expr& e, Dir dir);

/// Closed form of an abstract expression: I^{ij} -> iota(f_{ij}) and each
/// derivative word applied operator by operator.
Expr expand_abstract(const Expr& e);

struct MaurerCartan {
    OneForm c1, c2;
    /// phi-hat^{(k)}, k = 0..max_k.
    std::vector<OneForm> phi;
};
MaurerCartan maurer_cartan_forms(int max_k);

/// iota(theta^{ij}) with the given Maurer-Cartan forms.
OneForm iota_theta(int i, int j, const MaurerCartan& mc);

struct RelationResult {
    std::string name;
    bool passed;
    OneForm residual;
};

/// Phantom recurrence relations for iota(u), iota(v), I^{00}, I^{01}, I^{02}
/// and I^{i0}, 1 <= i <= max_i.
std::vector<RelationResult> phantom_check(int max_i = 4);
std::vector<RelationResult> phantom_check(const MaurerCartan& mc, int max_i);

/// (I^{i+1,j}, I^{i,j+1}) in lower-order invariants and invariant derivatives.
std::pair<Expr, Expr> recurrence(int i, int j);

struct CommutatorCoeffs {
    Expr Y112, Y212;
};
/// Read off d_h iota(du) and d_h iota(dv).
CommutatorCoeffs commutator_coeffs();

/// [D_u^i, D_v^i] e - (Y112 D_u^i e + Y212 D_v^i e) over closed forms.
Expr commutator_defect(const Expr& e);

/// I^{03} = 2 (2 D_u I^{11} + [D_u, D_v] I^{11}) / (D_u I^{11} + D_v I^{11}).
Expr i03_from_generator();

struct GeneratorValue {
    double value, direct;
};
/// Numeric evaluation of the generator formula and of 2v^3 f_vvv/W for a
/// concrete f at (u, v). Throws GeneratorDegenerate when the denominator
/// vanishes there.
GeneratorValue i03_from_generator_at(const Expr& f, double u, double v);

struct BasisElement {
    std::string label;
    Expr symbol;
    int order;
};
/// (D_u)^i (D_v)^j I^{11}, i+j <= k-2, and (D_v)^j I^{03}, j <= k-3.
std::vector<BasisElement> functional_basis(int k);

/// I^{ij} in I^{11} and its invariant derivatives only.
Expr rewrite_in_generators(int i, int j);

/// Exact comparison of an abstract expression with a closed form at random
/// rational values of v and the jets. Points where a denominator vanishes
/// are redrawn.
bool agrees_at_random_points(const Expr& abstract, const Expr& closed, int points, std::uint64_t seed);

} // namespace invforge::structure
