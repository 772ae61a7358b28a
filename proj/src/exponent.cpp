#include "summa/exponent.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace summa {

Exponent::Exponent(double value) : value_(value), infinite_(false) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument("exponent must be a finite positive number (use Exponent::infinity())");
    }
}

double Exponent::value() const {
    if (infinite_) {
        throw std::logic_error("value() called on an infinite exponent");
    }
    return value_;
}

Exponent Exponent::from_reciprocal(double inv) {
    if (inv < 0.0 || !std::isfinite(inv)) {
        throw std::invalid_argument("reciprocal exponent must be finite and non-negative");
    }
    return inv == 0.0 ? infinity() : Exponent(1.0 / inv);
}

std::string Exponent::to_string() const {
    if (infinite_) {
        return "inf";
    }
    std::ostringstream os;
    os.precision(std::numeric_limits<double>::max_digits10);
    os << value_;
    // Prefer the shortest representation that round-trips.
    for (int digits = 1; digits < std::numeric_limits<double>::max_digits10; ++digits) {
        std::ostringstream s;
        s.precision(digits);
        s << value_;
        if (std::stod(s.str()) == value_) {
            return s.str();
        }
    }
    return os.str();
}

Exponent Exponent::parse(const std::string& text) {
    if (text == "inf" || text == "infinity" || text == "Inf" || text == "∞") {
        return infinity();
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse exponent '" + text + "'");
    }
    if (used != text.size() || std::isinf(v)) {
        throw std::invalid_argument("cannot parse exponent '" + text + "'");
    }
    return Exponent(v);
}

Exponent dual_exponent(const Exponent& u) {
    if (u.is_infinite()) {
        return Exponent(1.0);
    }
    const double v = u.value();
    if (v < 1.0) {
        throw std::invalid_argument("dual exponent requires u >= 1");
    }
    if (v == 1.0) {
        return Exponent::infinity();
    }
    return Exponent::from_reciprocal(1.0 - 1.0 / v);
}

} // namespace summa
