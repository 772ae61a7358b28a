#include "summa/spaces.hpp"

#include "summa/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace summa {

SpaceSpec::SpaceSpec(Exponent u, std::size_t n) : exponent(u), dim(n) {
    if (!u.is_infinite() && u.value() < 1.0) {
        throw std::invalid_argument("space exponent must be >= 1, got " + u.to_string());
    }
    if (n == 0) {
        throw std::invalid_argument("space dimension must be positive");
    }
}

SpaceSpec SpaceSpec::dual() const { return SpaceSpec(dual_exponent(exponent), dim); }

SpaceSpec scalar_space() { return SpaceSpec(Exponent(2.0), 1); }

double lp_norm(std::span<const double> x, const Exponent& p) {
    double peak = 0.0;
    for (double v : x) {
        peak = std::max(peak, std::abs(v));
    }
    if (p.is_infinite() || peak == 0.0) {
        return peak;
    }
    const double e = p.value();
    double acc = 0.0;
    if (e == 1.0) {
        for (double v : x) {
            acc += std::abs(v);
        }
        return acc;
    }
    if (e == 2.0) {
        for (double v : x) {
            const double t = v / peak;
            acc += t * t;
        }
        return peak * std::sqrt(acc);
    }
    for (double v : x) {
        acc += std::pow(std::abs(v) / peak, e);
    }
    return peak * std::pow(acc, 1.0 / e);
}

Vector::Vector(SpaceSpec s, std::vector<double> c) : space(s), coords(std::move(c)) {
    if (coords.size() != space.dim) {
        throw std::invalid_argument("vector has " + std::to_string(coords.size()) + " coordinates, space has dimension " +
                                    std::to_string(space.dim));
    }
}

Vector Vector::basis(SpaceSpec s, std::size_t i) {
    if (i >= s.dim) {
        throw std::out_of_range("basis index out of range");
    }
    std::vector<double> c(s.dim, 0.0);
    c[i] = 1.0;
    return Vector(s, std::move(c));
}

Functional::Functional(SpaceSpec s, std::vector<double> c) : space(s), coords(std::move(c)) {
    if (coords.size() != space.dim) {
        throw std::invalid_argument("functional has " + std::to_string(coords.size()) +
                                    " coordinates, space has dimension " + std::to_string(space.dim));
    }
}

double Functional::operator()(const Vector& v) const {
    if (v.space.dim != space.dim) {
        throw std::invalid_argument("functional applied to a vector of the wrong dimension");
    }
    return dot(coords, v.coords);
}

double norm(const Vector& v) { return lp_norm(v.coords, v.space.exponent); }

double dual_norm(const Functional& f) { return lp_norm(f.coords, dual_exponent(f.space.exponent)); }

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

std::vector<double> ball_argmax(std::span<const double> g, const Exponent& u) {
    const std::size_t n = g.size();
    std::vector<double> y(n, 0.0);
    double peak = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(g[i]) > peak) {
            peak = std::abs(g[i]);
            arg = i;
        }
    }
    if (peak == 0.0) {
        return y;
    }
    if (u.is_infinite()) {
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = g[i] < 0.0 ? -1.0 : 1.0;
        }
        return y;
    }
    if (u.value() == 1.0) {
        y[arg] = g[arg] < 0.0 ? -1.0 : 1.0;
        return y;
    }
    const Exponent conj = dual_exponent(u);
    const double e = conj.value() - 1.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = std::copysign(std::pow(std::abs(g[i]) / peak, e), g[i]);
    }
    scale = lp_norm(y, u);
    for (double& v : y) {
        v /= scale;
    }
    return y;
}

Functional norming_functional(const Vector& v) {
    const SpaceSpec& s = v.space;
    std::vector<double> c = ball_argmax(v.coords, dual_exponent(s.exponent));
    if (std::all_of(c.begin(), c.end(), [](double t) { return t == 0.0; })) {
        c[0] = 1.0;
    }
    return Functional(s, std::move(c));
}

std::optional<std::vector<std::vector<double>>> ball_vertices(const SpaceSpec& space, bool symmetric_half,
                                                              std::size_t cap) {
    const std::size_t n = space.dim;
    std::vector<std::vector<double>> out;
    if (n == 1) {
        out.push_back({1.0});
        if (!symmetric_half) {
            out.push_back({-1.0});
        }
        return out;
    }
    const Exponent& u = space.exponent;
    if (!u.is_infinite() && u.value() == 1.0) {
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> e(n, 0.0);
            e[i] = 1.0;
            out.push_back(e);
            if (!symmetric_half) {
                e[i] = -1.0;
                out.push_back(std::move(e));
            }
        }
        return out;
    }
    if (u.is_infinite() && n <= cap) {
        const std::size_t free_bits = symmetric_half ? n - 1 : n;
        const std::uint64_t total = std::uint64_t{1} << free_bits;
        out.reserve(total);
        for (std::uint64_t mask = 0; mask < total; ++mask) {
            std::vector<double> e(n, 1.0);
            for (std::size_t b = 0; b < free_bits; ++b) {
                const std::size_t coord = symmetric_half ? b + 1 : b;
                if ((mask >> b) & 1U) {
                    e[coord] = -1.0;
                }
            }
            out.push_back(std::move(e));
        }
        return out;
    }
    return std::nullopt;
}

std::optional<std::vector<Functional>> extreme_points(const SpaceSpec& space, std::size_t cap) {
    auto verts = ball_vertices(space.dual(), false, cap);
    if (!verts) {
        return std::nullopt;
    }
    std::vector<Functional> out;
    out.reserve(verts->size());
    for (auto& v : *verts) {
        out.emplace_back(space, std::move(v));
    }
    return out;
}

std::vector<Functional> sample_dual_sphere(const SpaceSpec& space, std::uint64_t seed, std::size_t count) {
    if (count == 0) {
        throw std::invalid_argument("sample_dual_sphere needs count >= 1");
    }
    CounterRng rng = CounterRng::stream(seed, {0xd5a1U, space.dim});
    const Exponent du = dual_exponent(space.exponent);
    std::vector<Functional> out;
    out.reserve(count);
    while (out.size() < count) {
        std::vector<double> c(space.dim);
        for (double& v : c) {
            v = rng.normal();
        }
        const double nrm = lp_norm(c, du);
        if (nrm == 0.0) {
            continue;
        }
        for (double& v : c) {
            v /= nrm;
        }
        out.emplace_back(space, std::move(c));
    }
    return out;
}

} // namespace summa
