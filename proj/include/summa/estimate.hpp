#pragma once

#include "summa/family.hpp"
#include "summa/spaces.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace summa {

enum class EstimateKind { exact, lower_bound, upper_bound };

std::string to_string(EstimateKind k);

enum class WeakMode {
    automatic, // closed forms / enumeration when available, ascent otherwise
    ascent,    // always use multi-start ascent (for testing the ascent path)
};

/// Search budget shared by every iterative estimator. Restart i draws from a
/// stream keyed by (seed, i), so a larger restart count runs a superset of
/// the smaller count's restarts.
struct Budget {
    int restarts = 16;
    int iters = 200;
    std::uint64_t seed = 0;
    std::size_t enum_cap = kDefaultEnumerationCap;
    WeakMode weak_mode = WeakMode::automatic;
    std::size_t atoms = 0; // Maurey dual atom cap; 0 means m + 1
    int m_max = 4;
};

/// x_i = τ_i y_i.
struct FactorizationWitness {
    std::vector<double> taus;
    VectorFamily ys;
};

/// A finitely supported probability measure on the dual ball.
struct DiscreteMeasure {
    std::vector<Functional> atoms;
    std::vector<double> weights;
};

/// Test data for a summing-norm ratio. `phis` holds functionals on the
/// codomain, stored as a family over its dual.
struct SummingWitness {
    std::vector<VectorFamily> x_families;
    std::optional<VectorFamily> phis;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

using Witness =
    std::variant<std::monostate, Functional, std::vector<Vector>, FactorizationWitness, DiscreteMeasure, SummingWitness>;

struct NormEstimate {
    double value = 0.0;
    EstimateKind kind = EstimateKind::exact;
    /// False when a bound relies on an inner estimate that is itself only a
    /// bound in the wrong direction (for instance a primal factorization
    /// whose weak norm was found by ascent). Exact values are always
    /// certified.
    bool certified = true;
    Witness witness;
    Budget budget;
};

} // namespace summa
