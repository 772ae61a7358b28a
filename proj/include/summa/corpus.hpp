#pragma once

#include "summa/family.hpp"
#include "summa/tensors.hpp"

#include <cstdint>
#include <vector>

namespace summa {

/// Coefficients drawn i.i.d. standard normal.
MultilinearMap gaussian_tensor(const std::vector<SpaceSpec>& domain, const SpaceSpec& codomain, std::uint64_t seed);

/// Coefficients drawn i.i.d. uniform on {−1, +1}.
MultilinearMap sign_tensor(const std::vector<SpaceSpec>& domain, const SpaceSpec& codomain, std::uint64_t seed);

/// Scalar n-linear form on (ℓ_u^N)^n with coefficients
/// Π_k cas(2π j_k j_{k+1} / N), cas = cos + sin. The real counterpart of the
/// chained Fourier kernel: for n = 2 it is the Hartley matrix, whose rows
/// have ℓ2 norm √N.
MultilinearMap fourier_tensor(std::size_t n, std::size_t dim, const Exponent& u = Exponent::infinity());

/// Σ_i x_i y_i as a scalar bilinear form on ℓ_u^N × ℓ_u^N.
MultilinearMap identity_form(std::size_t dim, const Exponent& u = Exponent::infinity());

/// T_n(x₁,…,xₙ) = x₁⋯xₙ on the scalar field.
MultilinearMap product_form(std::size_t n);

/// e_1,…,e_m (m ≤ N; 0 means m = N).
VectorFamily basis_family(const SpaceSpec& space, std::size_t m = 0);

VectorFamily gaussian_family(const SpaceSpec& space, std::size_t m, std::uint64_t seed);

} // namespace summa
