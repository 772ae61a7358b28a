#pragma once

#include "summa/exponent.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace summa {

/// Largest dimension for which the 2^N sign vertices of an ℓ∞ ball are
/// enumerated.
inline constexpr std::size_t kDefaultEnumerationCap = 16;

/// The real space ℓ_u^N.
struct SpaceSpec {
    Exponent exponent;
    std::size_t dim;

    /// Throws std::invalid_argument unless u >= 1 and N >= 1.
    SpaceSpec(Exponent u, std::size_t n);

    /// ℓ_{u'}^N.
    SpaceSpec dual() const;

    friend bool operator==(const SpaceSpec&, const SpaceSpec&) = default;
};

/// The scalar field as a one-dimensional space.
SpaceSpec scalar_space();

/// (Σ|x_i|^p)^{1/p}, or max|x_i| for p = ∞. Any p > 0 is accepted.
double lp_norm(std::span<const double> x, const Exponent& p);

struct Vector {
    SpaceSpec space;
    std::vector<double> coords;

    /// Throws std::invalid_argument if coords.size() != space.dim.
    Vector(SpaceSpec s, std::vector<double> c);
    static Vector zero(SpaceSpec s) { return Vector(s, std::vector<double>(s.dim, 0.0)); }
    static Vector basis(SpaceSpec s, std::size_t i);
};

/// A linear functional acting on `space` (its predual) by the dot product.
struct Functional {
    SpaceSpec space;
    std::vector<double> coords;

    Functional(SpaceSpec s, std::vector<double> c);

    double operator()(const Vector& v) const;
};

double norm(const Vector& v);
double dual_norm(const Functional& f);

double dot(std::span<const double> a, std::span<const double> b);

/// The point y of the unit ball of ℓ_u^N maximizing ⟨g, y⟩; the maximum
/// equals ‖g‖_{u'}. Returns zeros when g = 0.
std::vector<double> ball_argmax(std::span<const double> g, const Exponent& u);

/// A functional of dual norm one with φ(v) = ‖v‖ (e₁ when v = 0).
Functional norming_functional(const Vector& v);

/// Extreme points of the unit ball of ℓ_u^N (the ball itself, not its
/// dual). With `symmetric_half`, only one of each ±pair is kept. Returns
/// nullopt when the ball has no finite extreme set or N exceeds `cap`.
std::optional<std::vector<std::vector<double>>> ball_vertices(const SpaceSpec& space, bool symmetric_half,
                                                              std::size_t cap = kDefaultEnumerationCap);

/// Extreme points of the dual unit ball of `space`: ±e_i when the dual is
/// ℓ1, the 2^N sign vectors when it is ℓ∞ (N <= cap). nullopt otherwise.
std::optional<std::vector<Functional>> extreme_points(const SpaceSpec& space,
                                                      std::size_t cap = kDefaultEnumerationCap);

/// `count` seeded Gaussian directions normalized to dual norm one.
std::vector<Functional> sample_dual_sphere(const SpaceSpec& space, std::uint64_t seed, std::size_t count);

} // namespace summa
