#include "summa/corpus.hpp"

#include "summa/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace summa {

namespace {

constexpr std::uint64_t kGaussianTensor = 0x6a01;
constexpr std::uint64_t kSignTensor = 0x6a02;
constexpr std::uint64_t kGaussianFamily = 0x6a03;

} // namespace

MultilinearMap gaussian_tensor(const std::vector<SpaceSpec>& domain, const SpaceSpec& codomain, std::uint64_t seed) {
    auto t = MultilinearMap::zeros(domain, codomain);
    auto rng = CounterRng::stream(seed, {kGaussianTensor});
    for (double& c : t.coeffs()) {
        c = rng.normal();
    }
    return t;
}

MultilinearMap sign_tensor(const std::vector<SpaceSpec>& domain, const SpaceSpec& codomain, std::uint64_t seed) {
    auto t = MultilinearMap::zeros(domain, codomain);
    auto rng = CounterRng::stream(seed, {kSignTensor});
    for (double& c : t.coeffs()) {
        c = rng.sign();
    }
    return t;
}

MultilinearMap fourier_tensor(std::size_t n, std::size_t dim, const Exponent& u) {
    if (n == 0 || dim == 0) {
        throw std::invalid_argument("fourier_tensor needs n >= 1 and N >= 1");
    }
    auto t = MultilinearMap::zeros(std::vector<SpaceSpec>(n, SpaceSpec(u, dim)), scalar_space());
    std::vector<std::size_t> idx(n, 0);
    for (double& c : t.coeffs()) {
        double v = 1.0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>((idx[k] * idx[k + 1]) % dim) /
                                 static_cast<double>(dim);
            v *= std::cos(angle) + std::sin(angle);
        }
        c = v;
        for (std::size_t k = n; k-- > 0;) {
            if (++idx[k] < dim) {
                break;
            }
            idx[k] = 0;
        }
    }
    return t;
}

MultilinearMap identity_form(std::size_t dim, const Exponent& u) {
    auto t = MultilinearMap::zeros({SpaceSpec(u, dim), SpaceSpec(u, dim)}, scalar_space());
    for (std::size_t i = 0; i < dim; ++i) {
        t.coeffs()[i * dim + i] = 1.0;
    }
    return t;
}

MultilinearMap product_form(std::size_t n) {
    return MultilinearMap::form(std::vector<SpaceSpec>(n, scalar_space()), {1.0});
}

VectorFamily basis_family(const SpaceSpec& space, std::size_t m) {
    if (m == 0) {
        m = space.dim;
    }
    if (m > space.dim) {
        throw std::invalid_argument("basis_family: m exceeds the dimension");
    }
    auto f = VectorFamily::zeros(space, {m});
    for (std::size_t j = 0; j < m; ++j) {
        f.member(j)[j] = 1.0;
    }
    return f;
}

VectorFamily gaussian_family(const SpaceSpec& space, std::size_t m, std::uint64_t seed) {
    auto f = VectorFamily::zeros(space, {m});
    auto rng = CounterRng::stream(seed, {kGaussianFamily});
    for (double& v : f.data()) {
        v = rng.normal();
    }
    return f;
}

} // namespace summa
