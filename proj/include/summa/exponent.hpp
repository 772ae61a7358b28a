#pragma once

#include <compare>
#include <string>

namespace summa {

/// An extended-real summability exponent in (0, ∞].
///
/// Infinity is a distinguished state rather than an IEEE sentinel, so
/// arithmetic on it has to go through reciprocal() / is_infinite().
class Exponent {
public:
    /// Constructs a finite exponent; throws std::invalid_argument unless
    /// 0 < value < +inf.
    explicit Exponent(double value);

    static constexpr Exponent infinity() noexcept { return Exponent{}; }

    bool is_infinite() const noexcept { return infinite_; }

    /// Finite value; throws std::logic_error on infinity.
    double value() const;

    /// 1/p, with 1/∞ = 0.
    double reciprocal() const noexcept { return infinite_ ? 0.0 : 1.0 / value_; }

    /// Builds the exponent whose reciprocal is `inv` (inv = 0 gives ∞).
    static Exponent from_reciprocal(double inv);

    /// "inf" or the shortest round-trip decimal.
    std::string to_string() const;

    /// Accepts "inf", "infinity", "∞" or a decimal literal.
    static Exponent parse(const std::string& text);

    friend bool operator==(const Exponent& a, const Exponent& b) noexcept {
        return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
    }
    friend std::partial_ordering operator<=>(const Exponent& a, const Exponent& b) noexcept {
        if (a.infinite_ || b.infinite_) {
            return a.infinite_ == b.infinite_ ? std::partial_ordering::equivalent
                   : a.infinite_               ? std::partial_ordering::greater
                                               : std::partial_ordering::less;
        }
        return a.value_ <=> b.value_;
    }

private:
    constexpr Exponent() noexcept : value_(0.0), infinite_(true) {}

    double value_;
    bool infinite_;
};

/// Conjugate exponent u' with 1/u + 1/u' = 1; requires u >= 1.
Exponent dual_exponent(const Exponent& u);

} // namespace summa
