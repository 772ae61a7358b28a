#pragma once

#include "summa/estimate.hpp"
#include "summa/spaces.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace summa {

/// A continuous n-linear map E₁×…×Eₙ → F stored as a dense row-major tensor
/// of shape N₁×…×Nₙ×N_F (codomain index last). Scalar-valued forms use a
/// one-dimensional codomain; linear maps are the arity-one case.
class MultilinearMap {
public:
    MultilinearMap(std::vector<SpaceSpec> domain, SpaceSpec codomain, std::vector<double> coeffs);

    static MultilinearMap zeros(std::vector<SpaceSpec> domain, SpaceSpec codomain);

    /// Scalar-valued form with the given coefficients T(e_{i₁},…,e_{iₙ}).
    static MultilinearMap form(std::vector<SpaceSpec> domain, std::vector<double> coeffs);

    std::size_t arity() const noexcept { return domain_.size(); }
    const std::vector<SpaceSpec>& domain() const noexcept { return domain_; }
    const SpaceSpec& codomain() const noexcept { return codomain_; }

    /// N₁,…,Nₙ,N_F.
    std::vector<std::size_t> shape() const;

    std::span<const double> coeffs() const noexcept { return coeffs_; }
    std::span<double> coeffs() noexcept { return coeffs_; }

    MultilinearMap scaled(double factor) const;

private:
    std::vector<SpaceSpec> domain_;
    SpaceSpec codomain_;
    std::vector<double> coeffs_;
};

/// T(x₁,…,xₙ). Throws std::invalid_argument on a dimension mismatch.
Vector evaluate(const MultilinearMap& t, const std::vector<Vector>& args);

/// Raw-coordinate evaluation; no checks beyond sizes.
std::vector<double> evaluate_coords(const MultilinearMap& t, std::span<const std::span<const double>> args);

/// Contracts every domain slot except `keep` against `args` (args[keep] is
/// ignored). Returns the N_keep × N_F matrix, row-major.
std::vector<double> contract_except(const MultilinearMap& t, std::span<const std::span<const double>> args,
                                    std::size_t keep);

/// sup ‖T(x₁,…,xₙ)‖ over the product of unit balls.
///
/// Exact by enumerating ball vertices (one slot is handled in closed form)
/// when enough slots have finite extreme sets within the cap. Otherwise a
/// lower bound by multi-start alternating maximization. The witness is the
/// maximizing argument list.
NormEstimate op_norm(const MultilinearMap& t, const Budget& budget = {});

/// T_a: the (n−1)-linear map with `a` inserted in `slot`. Requires n >= 2.
MultilinearMap restrict(const MultilinearMap& t, std::size_t slot, const Vector& a);

/// w ∘ T ∘ (u₁,…,uₙ) for linear maps w: F → G and uᵢ: E'ᵢ → Eᵢ.
MultilinearMap compose(const MultilinearMap& w, const MultilinearMap& t, const std::vector<MultilinearMap>& us);

/// Identity operator on a space, as an arity-one map.
MultilinearMap identity_map(const SpaceSpec& from, const SpaceSpec& to);

/// Average of the coefficients over all permutations of the domain slots.
/// Requires all domain slots to share one space.
MultilinearMap symmetrize(const MultilinearMap& t);

/// An n-homogeneous polynomial P(x) = P̌(x,…,x), held through its symmetric
/// n-linear map. The constructor symmetrizes its argument.
class HomogeneousPolynomial {
public:
    explicit HomogeneousPolynomial(const MultilinearMap& t);

    std::size_t degree() const noexcept { return sym_.arity(); }
    const SpaceSpec& space() const noexcept { return sym_.domain().front(); }
    const SpaceSpec& codomain() const noexcept { return sym_.codomain(); }
    const MultilinearMap& sym() const noexcept { return sym_; }

    Vector operator()(const Vector& x) const;

private:
    MultilinearMap sym_;
};

/// P̌(x₁,…,xₙ) recovered from values of P alone via the polarization
/// identity (1/(2ⁿ n!)) Σ_ε ε₁⋯εₙ P(Σ ε_k x_k).
Vector polarization_evaluate(const HomogeneousPolynomial& p, const std::vector<Vector>& args);

/// γP, with (γP)ˇ(x₁,…,x_{n+1}) = (1/(n+1)) Σ_k γ(x_k) P̌(x₁,…,x̂_k,…,x_{n+1}).
HomogeneousPolynomial multiply(const Functional& gamma, const HomogeneousPolynomial& p);

/// γ^k T for a linear map T, by k successive multiplications.
HomogeneousPolynomial power_multiply(const Functional& gamma, const MultilinearMap& linear, std::size_t k);

/// P_{a^k}(x) = P̌(a,…,a,x,…,x), of degree n − k. Requires k < n.
HomogeneousPolynomial fix_point(const HomogeneousPolynomial& p, const Vector& a, std::size_t k);

} // namespace summa
