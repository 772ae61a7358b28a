#pragma once

#include "summa/estimate.hpp"
#include "summa/family.hpp"

#include <span>
#include <vector>

namespace summa {

/// (Σ_j ‖x_j‖^p)^{1/p}; always exact.
NormEstimate strong_norm(const VectorFamily& fam, const Exponent& p);

/// sup over the dual unit ball of ‖(φ(x_j))_j‖_p.
///
/// Exact when the dual ball has enumerable extreme points, or through one of
/// the closed forms (p = ∞, a single member, ℓ2 with p = 2 via the Gram
/// matrix, p = 1 via sign patterns of at most `enum_cap` members).
/// Otherwise a multi-start ascent gives a lower bound. The witness is the
/// maximizing Functional. Throws std::domain_error for p < 1.
NormEstimate weak_norm(const VectorFamily& fam, const Exponent& p, const Budget& budget = {});

/// Same, with extra starting points for the ascent path (ignored by the
/// exact paths). Used by estimators that call the weak norm repeatedly on
/// slowly changing families.
NormEstimate weak_norm(const VectorFamily& fam, const Exponent& p, const Budget& budget,
                       std::span<const std::vector<double>> warm_starts);

/// ‖(φ(x_j))_j‖_p for one functional, given by its coordinates.
double weak_value_at(const VectorFamily& fam, const Exponent& p, std::span<const double> phi);

/// The exponent r with 1/r = 1/q - 1/s (∞ when s = q).
Exponent mixed_complement(const Exponent& s, const Exponent& q);

/// Upper bound on the mixed (s,q) norm: inf ‖τ‖_r ‖(x_i/τ_i)‖_{w,s} over
/// τ > 0, searched in log coordinates. Witness: FactorizationWitness.
/// Requires 1 <= q <= s; throws std::domain_error otherwise.
NormEstimate mixed_norm_primal(const VectorFamily& fam, const Exponent& s, const Exponent& q,
                               const Budget& budget = {});

/// Lower bound on the mixed (s,q) norm from Maurey's dual formula,
/// maximized over discrete measures on the dual ball. Witness:
/// DiscreteMeasure. Requires 1 <= q < s < ∞.
NormEstimate mixed_norm_dual(const VectorFamily& fam, const Exponent& s, const Exponent& q,
                             const Budget& budget = {});

/// (Σ_j (∫|φ(x_j)|^s dμ)^{q/s})^{1/q} for a discrete μ; exact evaluation.
double maurey_value(const VectorFamily& fam, const DiscreteMeasure& mu, const Exponent& s, const Exponent& q);

/// ‖τ‖_r · ‖y‖_{w,s} for a factorization (weak norm as in weak_norm).
NormEstimate factorization_value(const FactorizationWitness& w, const Exponent& s, const Exponent& q,
                                 const Budget& budget = {});

struct MixedBracket {
    NormEstimate lower;
    NormEstimate upper;
    /// (upper - lower) / upper, 0 when both vanish.
    double relative_gap() const;
};

/// Both sides of the mixed norm. For s = q or s = ∞ the lower side is the
/// weak or strong norm, where the mixed norm coincides with those.
MixedBracket mixed_norm(const VectorFamily& fam, const Exponent& s, const Exponent& q, const Budget& budget = {});

} // namespace summa
