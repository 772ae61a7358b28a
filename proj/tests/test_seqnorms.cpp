#include "doctest.h"

#include "summa/rng.hpp"
#include "summa/seqnorms.hpp"

#include <cmath>
#include <stdexcept>
#include <numbers>

using namespace summa;

namespace {

const Exponent kInf = Exponent::infinity();

VectorFamily gaussian_family(const SpaceSpec& s, std::size_t m, std::uint64_t seed) {
    CounterRng rng = CounterRng::stream(seed, {s.dim, m});
    std::vector<double> data(s.dim * m);
    for (auto& v : data) {
        v = rng.normal();
    }
    return VectorFamily(s, {m}, data);
}

// Brute force over a Fibonacci lattice on the sphere of ℓ2^3.
double sphere_grid_weak(const VectorFamily& fam, const Exponent& p, int points) {
    double best = 0.0;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < points; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / points;
        const double rad = std::sqrt(1.0 - z * z);
        const double th = golden * i;
        const std::vector<double> phi{rad * std::cos(th), rad * std::sin(th), z};
        best = std::max(best, weak_value_at(fam, p, phi));
    }
    return best;
}

// max over coordinates of the column ℓp norm; the ℓ∞ closed form.
double linf_oracle(const VectorFamily& fam, const Exponent& p) {
    double best = 0.0;
    for (std::size_t i = 0; i < fam.dim(); ++i) {
        std::vector<double> col;
        for (std::size_t j = 0; j < fam.size(); ++j) {
            col.push_back(fam.member(j)[i]);
        }
        best = std::max(best, lp_norm(col, p));
    }
    return best;
}

} // namespace

TEST_CASE("strong norm") {
    const SpaceSpec s(Exponent(2), 2);
    CHECK(strong_norm(VectorFamily::from_members(s, {{3, 4}}), Exponent(1)).value == doctest::Approx(5));
    auto two = VectorFamily::from_members(s, {{1, 0}, {0, 1}});
    CHECK(strong_norm(two, Exponent(2)).value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    auto mixed = VectorFamily::from_members(s, {{1, 0}, {0, 3}});
    CHECK(strong_norm(mixed, kInf).value == 3.0);
    CHECK(strong_norm(mixed, kInf).kind == EstimateKind::exact);
}

TEST_CASE("weak norm closed forms") {
    const SpaceSpec linf(kInf, 3);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto fam = gaussian_family(linf, 4, seed);
        for (const Exponent& p : {Exponent(1), Exponent(2), Exponent(3.5)}) {
            auto w = weak_norm(fam, p);
            CHECK(w.kind == EstimateKind::exact);
            CHECK(w.value == doctest::Approx(linf_oracle(fam, p)).epsilon(1e-12));
        }
    }
    const SpaceSpec l3(Exponent(3), 4);
    auto single = VectorFamily::from_members(l3, {{1, -2, 0.5, 3}});
    CHECK(weak_norm(single, Exponent(2)).value == doctest::Approx(norm(single.vector(0))).epsilon(1e-12));
    CHECK_THROWS_AS(weak_norm(single, Exponent(0.5)), std::domain_error);
}

TEST_CASE("weak norm witness evaluates to the reported value") {
    for (double u : {1.0, 1.5, 2.0, 0.0}) {
        const SpaceSpec s(u == 0.0 ? kInf : Exponent(u), 3);
        auto fam = gaussian_family(s, 5, 3);
        for (const Exponent& p : {Exponent(1), Exponent(2), Exponent(4), kInf}) {
            auto w = weak_norm(fam, p);
            const auto& phi = std::get<Functional>(w.witness);
            CHECK(dual_norm(phi) <= 1.0 + 1e-12);
            CHECK(weak_value_at(fam, p, phi.coords) == doctest::Approx(w.value).epsilon(1e-12));
        }
    }
}

TEST_CASE("weak norm on l2^3 against a sphere grid") {
    const SpaceSpec s(Exponent(2), 3);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        auto fam = gaussian_family(s, 4, 100 + seed);
        for (const Exponent& p : {Exponent(1), Exponent(2), Exponent(3)}) {
            const double grid = sphere_grid_weak(fam, p, 200000);
            Budget b;
            b.weak_mode = WeakMode::ascent;
            const auto asc = weak_norm(fam, p, b);
            CHECK(asc.kind == EstimateKind::lower_bound);
            CHECK(asc.value >= grid - 1e-12);
            CHECK(asc.value <= grid * (1 + 1e-3));
            const auto aut = weak_norm(fam, p);
            CHECK(aut.value == doctest::Approx(asc.value).epsilon(1e-6));
        }
    }
}

TEST_CASE("ascent mode agrees with exhaustive paths") {
    for (double u : {1.0, 0.0}) {
        const SpaceSpec s(u == 0.0 ? kInf : Exponent(u), 4);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            auto fam = gaussian_family(s, 5, 40 + seed);
            for (const Exponent& p : {Exponent(1), Exponent(2), Exponent(4)}) {
                Budget b;
                b.weak_mode = WeakMode::ascent;
                b.restarts = 32;
                const auto exact = weak_norm(fam, p);
                const auto asc = weak_norm(fam, p, b);
                CHECK(exact.kind == EstimateKind::exact);
                CHECK(asc.value <= exact.value * (1 + 1e-12));
                CHECK(asc.value >= exact.value * (1 - 1e-9));
            }
        }
    }
}

TEST_CASE("p = 1 sign enumeration matches the extreme-point path") {
    // On ℓ1^N both exact paths apply; force the sign path by using ℓ1.5.
    const SpaceSpec s(Exponent(1.5), 3);
    auto fam = gaussian_family(s, 6, 8);
    const auto exact = weak_norm(fam, Exponent(1));
    CHECK(exact.kind == EstimateKind::exact);
    Budget b;
    b.weak_mode = WeakMode::ascent;
    b.restarts = 64;
    CHECK(weak_norm(fam, Exponent(1), b).value <= exact.value * (1 + 1e-12));
    // Brute force: every sign pattern.
    double best = 0.0;
    for (int mask = 0; mask < 64; ++mask) {
        std::vector<double> v(3, 0.0);
        for (int j = 0; j < 6; ++j) {
            const double e = (mask >> j) & 1 ? -1.0 : 1.0;
            for (int i = 0; i < 3; ++i) {
                v[i] += e * fam.member(j)[i];
            }
        }
        best = std::max(best, lp_norm(v, s.exponent));
    }
    CHECK(exact.value == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("mixed norm endpoints") {
    for (double u : {1.0, 2.0, 0.0}) {
        const SpaceSpec s(u == 0.0 ? kInf : Exponent(u), 4);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            auto fam = gaussian_family(s, 5, 70 + seed);
            for (const Exponent& q : {Exponent(1), Exponent(2)}) {
                CHECK(mixed_norm_primal(fam, q, q).value == doctest::Approx(weak_norm(fam, q).value).epsilon(1e-9));
                CHECK(mixed_norm_primal(fam, kInf, q).value == doctest::Approx(strong_norm(fam, q).value).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("mixed norm chain and duality gap") {
    const std::vector<std::pair<double, double>> pairs{{2, 1}, {4, 2}, {3, 1.5}};
    for (double u : {1.0, 2.0, 0.0}) {
        const SpaceSpec s(u == 0.0 ? kInf : Exponent(u), 3);
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            auto fam = gaussian_family(s, 4, 90 + seed);
            for (auto [sv, qv] : pairs) {
                const Exponent se(sv), qe(qv);
                const auto br = mixed_norm(fam, se, qe);
                const double weak = weak_norm(fam, qe).value;
                const double strong = strong_norm(fam, qe).value;
                CHECK(weak <= br.lower.value + 1e-9);
                CHECK(br.lower.value <= br.upper.value + 1e-9);
                CHECK(br.upper.value <= strong + 1e-9);
                CHECK(br.relative_gap() <= 0.05);
            }
        }
    }
}

TEST_CASE("Maurey dual on a single unit vector") {
    const SpaceSpec s(Exponent(2), 3);
    auto fam = VectorFamily::from_members(s, {{0, 1, 0}});
    const auto d = mixed_norm_dual(fam, Exponent(2), Exponent(1));
    CHECK(d.value == doctest::Approx(1.0).epsilon(1e-12));
    const auto& mu = std::get<DiscreteMeasure>(d.witness);
    double total = 0.0;
    for (double w : mu.weights) {
        total += w;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(mixed_norm_dual(fam, Exponent(2), Exponent(2)), std::domain_error);
    CHECK_THROWS_AS(mixed_norm_dual(fam, kInf, Exponent(2)), std::domain_error);
    CHECK_THROWS_AS(mixed_norm_primal(fam, Exponent(2), Exponent(3)), std::domain_error);
}

TEST_CASE("factorization witness reconstructs the family") {
    const SpaceSpec s(Exponent(1), 3);
    auto fam = gaussian_family(s, 4, 5);
    std::vector<double> data(fam.data().begin(), fam.data().end());
    data[3] = data[4] = data[5] = 0.0;
    fam = VectorFamily(s, {4}, data);
    const auto pr = mixed_norm_primal(fam, Exponent(3), Exponent(1.5));
    const auto& w = std::get<FactorizationWitness>(pr.witness);
    CHECK(w.taus[1] == 0.0);
    for (std::size_t j = 0; j < 4; ++j) {
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(w.taus[j] * w.ys.member(j)[i] == doctest::Approx(fam.member(j)[i]).epsilon(1e-10));
        }
    }
    CHECK(factorization_value(w, Exponent(3), Exponent(1.5)).value == doctest::Approx(pr.value).epsilon(1e-9));
}

TEST_CASE("homogeneity under power-of-two scaling") {
    const SpaceSpec s(Exponent(1), 3);
    auto fam = gaussian_family(s, 4, 12);
    auto big = fam.scaled(4.0);
    CHECK(weak_norm(big, Exponent(2)).value == doctest::Approx(4 * weak_norm(fam, Exponent(2)).value).epsilon(1e-12));
    CHECK(mixed_norm_primal(big, Exponent(2), Exponent(1)).value ==
          doctest::Approx(4 * mixed_norm_primal(fam, Exponent(2), Exponent(1)).value).epsilon(1e-9));
    CHECK(mixed_norm_dual(big, Exponent(2), Exponent(1)).value ==
          doctest::Approx(4 * mixed_norm_dual(fam, Exponent(2), Exponent(1)).value).epsilon(1e-9));
}

TEST_CASE("budgets are monotone") {
    const SpaceSpec s(Exponent(3), 4);
    auto fam = gaussian_family(s, 5, 21);
    double prev_weak = 0.0;
    double prev_primal = 1e300;
    for (int restarts : {1, 2, 4, 8, 16}) {
        Budget b;
        b.restarts = restarts;
        b.weak_mode = WeakMode::ascent;
        const double w = weak_norm(fam, Exponent(4), b).value;
        CHECK(w >= prev_weak);
        prev_weak = w;
        Budget pb;
        pb.restarts = restarts * 4;
        const double pr = mixed_norm_primal(fam, kInf, Exponent(2), pb).value;
        CHECK(pr <= prev_primal);
        prev_primal = pr;
    }
}
