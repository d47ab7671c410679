#pragma once

#include "invforge/frame.hpp"
#include "invforge/group.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace invforge::harness {

/// Sampling box for regular points.
struct Domain {
    double u_min = -1, u_max = 1, v_min = 0.5, v_max = 2;
};

struct InvarianceFailure {
    std::string f;
    double u, v;
    nlohmann::json element;
    int i, j;
    double lhs, rhs;
};

struct InvarianceReport {
    int samples = 0;
    double max_rel_error = 0;
    std::vector<InvarianceFailure> failures;

    nlohmann::json to_json() const;
};

/// Concrete jets of f evaluated at (u, v), i+j <= order.
std::map<std::pair<int, int>, double> numeric_jets(const Expr& f, double u, double v, int order);

struct RegularPoint {
    double u, v;
};
/// Rejection sampling of a regular point; NoRegularPoint after 1000 draws.
RegularPoint sample_regular_point(const Expr& f, std::uint64_t seed, const Domain& domain = {});

/// Non-phantom I^{ij}, i+j <= order, compared at corresponding points of
/// f and of its image under random group elements with Taylor degree order+2.
/// Both sides are evaluated exactly at the dyadic rounding of the sampled jets.
InvarianceReport invariance_test(const Expr& f, int order, int n_samples, std::uint64_t seed, double tol = 1e-9);

struct Candidate {
    int i, j;
    Expr expr;
};
/// Same procedure for arbitrary closed forms over the jets of order <= order.
InvarianceReport invariance_test(const Expr& f, const std::vector<Candidate>& candidates, int order, int n_samples,
                                 std::uint64_t seed, double tol = 1e-9);

/// Numeric rank (SVD threshold 1e-8 on unit-normalized rows) of the Jacobian
/// of the closed-form invariants with respect to v and the jets, maximized
/// over sampled regular points of f.
int independence_rank(const std::vector<Expr>& invariants, const Expr& f, int n_points, std::uint64_t seed);

/// (I^{11}, I^{03}, D_u^i I^{11}, D_v^i I^{11}).
using Signature = std::array<double, 4>;

struct SignatureSample {
    RegularPoint point;
    Signature values;
};
SignatureSample signature_at(const Expr& f, double u, double v);

enum class Verdict { Consistent, Inequivalent, Inconclusive };
std::string to_string(Verdict v);

struct EquivalenceReport {
    Verdict verdict;
    /// Largest relative distance from a sample of one equation to the
    /// signature set of the other, per direction.
    double distance_12, distance_21;
    int samples;

    nlohmann::json to_json() const;
};

/// Necessary-condition test: signature samples of each f must lie on the
/// signature set of the other. Never reports equivalence.
EquivalenceReport equivalence_necessary(const Expr& f1, const Expr& f2, int n_samples, double tol, std::uint64_t seed);

/// f~(u~, v~) for an element with affine phi, in the coordinates u, v.
Expr image_of(const Expr& f, const group::GroupElement& g);

/// Corpus of nonlinearities used by the numeric checks.
const std::vector<std::string>& corpus();

} // namespace invforge::harness
