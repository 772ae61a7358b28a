#include "doctest.h"

#include "summa/corpus.hpp"
#include "summa/laws.hpp"
#include "summa/rng.hpp"
#include "summa/seqnorms.hpp"

#include <cmath>

using namespace summa;

namespace {

const Exponent kInf = Exponent::infinity();

Exponent E(double v) { return Exponent(v); }

Budget quick() {
    Budget b;
    b.restarts = 4;
    b.iters = 80;
    return b;
}

double check_margin(const LawReport& r, const std::string& prefix) {
    for (const auto& c : r.checks) {
        if (c.name.rfind(prefix, 0) == 0) {
            return c.margin;
        }
    }
    FAIL("no check named " << prefix);
    return 0.0;
}

} // namespace

TEST_CASE("report builder only fails on certified comparisons") {
    const auto miss = [](Comparison c) {
        return LawReportBuilder("t").check("x", 2.0, 1.0, 1e-9, c).build().verdict;
    };
    CHECK(miss(Comparison::exact) == Verdict::fail);
    CHECK(miss(Comparison::sandwich) == Verdict::fail);
    CHECK(miss(Comparison::rhs_lower_bound) == Verdict::inconclusive);
    CHECK(miss(Comparison::empirical) == Verdict::inconclusive);
    const auto ok = LawReportBuilder("t").check("x", 1.0, 1.0 - 1e-10, 1e-9, Comparison::exact).build();
    CHECK(ok.verdict == Verdict::pass);
    CHECK(ok.checks[0].margin == doctest::Approx(-1e-10));
    const auto mixed = LawReportBuilder("t")
                           .check("a", 2.0, 1.0, 0.0, Comparison::empirical)
                           .check("b", 2.0, 1.0, 0.0, Comparison::exact)
                           .check("c", 0.0, 1.0, 0.0, Comparison::exact)
                           .build();
    CHECK(mixed.verdict == Verdict::fail);
}

TEST_CASE("littlewood on the identity and rank-one forms") {
    const auto id = littlewood_43(identity_form(4), true);
    CHECK(id.verdict == Verdict::pass);
    CHECK(id.metrics.at("lhs") == doctest::Approx(std::pow(4.0, 0.75)).epsilon(1e-12));
    CHECK(id.metrics.at("norm") == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(id.metrics.at("ratio") == doctest::Approx(std::pow(4.0, -0.25)).epsilon(1e-12));
    CHECK(id.checks[0].comparison == Comparison::exact);

    auto rank_one = MultilinearMap::zeros({SpaceSpec(kInf, 3), SpaceSpec(kInf, 3)}, scalar_space());
    rank_one.coeffs()[0] = 1.0;
    const auto r1 = littlewood_43(rank_one, true);
    CHECK(r1.metrics.at("ratio") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r1.verdict == Verdict::pass);
}

TEST_CASE("littlewood without enumeration never reports a violation") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto t = sign_tensor({SpaceSpec(kInf, 5), SpaceSpec(kInf, 5)}, scalar_space(), seed);
        const auto rep = littlewood_43(t, false, quick());
        CHECK(rep.verdict != Verdict::fail);
        CHECK(rep.checks[0].comparison == Comparison::rhs_lower_bound);
        const auto exact = littlewood_43(t, true);
        CHECK(exact.metrics.at("norm") >= rep.metrics.at("norm") - 1e-12);
    }
}

TEST_CASE("bohnenblust-hille on the product form with unit inputs") {
    for (std::size_t n : {2u, 3u}) {
        std::vector<VectorFamily> fams(n, basis_family(scalar_space()));
        const auto rep = bohnenblust_hille(product_form(n), fams);
        CHECK(rep.metrics.at("ratio") == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.verdict == Verdict::pass);
    }
}

TEST_CASE("bohnenblust-hille reruns reproduce exactly") {
    const SpaceSpec s(kInf, 3);
    const auto t = sign_tensor({s, s, s}, scalar_space(), 4);
    const std::vector<VectorFamily> fams{gaussian_family(s, 2, 1), gaussian_family(s, 2, 2), gaussian_family(s, 2, 3)};
    const auto a = bohnenblust_hille(t, fams);
    const auto b = bohnenblust_hille(t, fams);
    CHECK(a.metrics == b.metrics);
}

TEST_CASE("bohnenblust-hille exponent probe on fourier forms") {
    const auto rep = bh_exponent_probe(2, {4, 6, 8}, 1.1);
    CHECK(rep.metrics.at("norms_exact") == 1.0);
    CHECK(rep.metrics.at("slope_below") > rep.metrics.at("slope_at") + 0.2);
    CHECK(rep.verdict == Verdict::pass);
}

TEST_CASE("fourier form rows have l2 norm sqrt N") {
    const auto t = fourier_tensor(2, 4);
    for (std::size_t i = 0; i < 4; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < 4; ++j) {
            acc += t.coeffs()[i * 4 + j] * t.coeffs()[i * 4 + j];
        }
        CHECK(std::sqrt(acc) == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("maurey duality on a single unit vector and a basis") {
    const SpaceSpec s(E(2), 3);
    const auto one = VectorFamily::from_members(s, {{0.6, 0.8, 0.0}});
    const auto rep = maurey_duality(one, E(2), E(1));
    CHECK(rep.metrics.at("primal") == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.metrics.at("dual") == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.verdict == Verdict::pass);

    const auto basis = maurey_duality(basis_family(SpaceSpec(E(2), 4)), E(2), E(1));
    CHECK(basis.metrics.at("gap") <= 0.05);
    CHECK(basis.verdict == Verdict::pass);
}

TEST_CASE("mixing characterization: s = q reduces to the weak norm of the outputs") {
    const SpaceSpec e(kInf, 2), f(E(2), 2);
    const auto a = gaussian_tensor({e, e}, f, 3);
    const std::vector<VectorFamily> fams{gaussian_family(e, 2, 1), gaussian_family(e, 2, 2)};
    const auto rep = mixing_characterization(a, E(2), E(2), {E(1), E(1)}, fams, quick());
    CHECK(rep.metrics.at("route_b") == doctest::Approx(rep.metrics.at("route_a_lower")).epsilon(1e-6));
    CHECK(rep.verdict == Verdict::pass);
}

TEST_CASE("mixing characterization: routes agree on random bilinear maps") {
    const SpaceSpec e(kInf, 2), f(E(2), 2);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto a = gaussian_tensor({e, e}, f, seed);
        const std::vector<VectorFamily> fams{gaussian_family(e, 3, 10 + seed), gaussian_family(e, 3, 20 + seed)};
        Budget b;
        b.seed = seed;
        const auto rep = mixing_characterization(a, E(2), E(1), {E(1), E(1)}, fams, b);
        CHECK(rep.verdict == Verdict::pass);
        CHECK(rep.metrics.at("gap") <= 0.10);
    }
}

TEST_CASE("coherence transports on x1 x2 over l_inf^2") {
    const SpaceSpec e(kInf, 2);
    auto t = MultilinearMap::zeros({e, e}, scalar_space());
    t.coeffs()[1] = 1.0; // x_1 y_2, symmetrized to x_1 x_2
    const HomogeneousPolynomial p(t);
    const auto params = SummingParams::multiple_r(E(2), {E(2), E(2)}, E(2));
    const Functional gamma(e, {1.0, 0.0});
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        CounterRng rng(seed);
        const Vector a(e, {rng.normal(), rng.normal()});
        Budget b;
        b.seed = seed;
        const auto rep = coherence_compatibility(p, params, a, gamma, 1, 2, b);
        CHECK(rep.verdict == Verdict::pass);
        CHECK(rep.metrics.at("beta1") == 1.0);
        CHECK(rep.metrics.at("beta2") == 1.0);
    }
}

TEST_CASE("coherence with a = 0 and gamma = 0") {
    const SpaceSpec e(E(1), 3);
    const HomogeneousPolynomial p(gaussian_tensor({e, e, e}, scalar_space(), 2));
    const auto params = SummingParams::multiple_r(E(2), {E(2), E(2), E(2)}, E(2));
    const auto rep = coherence_compatibility(p, params, Vector(e, {0, 0, 0}), Functional(e, {0, 0, 0}), 2, 2);
    CHECK(rep.verdict == Verdict::pass);
    for (const auto& c : rep.checks) {
        CHECK(c.lhs == 0.0);
    }
}

TEST_CASE("quotient theorem with rank-one u") {
    const SpaceSpec e(kInf, 2), f(E(2), 2), g(E(3), 2);
    CounterRng rng(99);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto a = gaussian_tensor({e, e}, f, seed);
        const Functional phi0(f, {rng.normal(), rng.normal()});
        const Vector y0(g, {rng.normal(), rng.normal()});
        const std::vector<VectorFamily> fams{gaussian_family(e, 2, 100 + seed), gaussian_family(e, 2, 200 + seed)};
        auto phis = gaussian_family(f.dual(), 3, 300 + seed);
        phis = phis.scaled(1.0 / strong_norm(phis, E(2)).value);
        Budget b;
        b.seed = seed;
        b.restarts = 6;
        const auto rep = quotient_theorem(a, phi0, y0, E(2), E(1), {E(1), E(1)}, fams, phis,
                                          gaussian_family(f, 4, 400 + seed), b);
        CHECK(rep.verdict == Verdict::pass);
        CHECK(rep.metrics.at("pi_s_witness_ratio") <= 1.0 + 1e-9);
    }
}

TEST_CASE("quotient theorem with u = 0") {
    const SpaceSpec e(kInf, 2), f(E(2), 2);
    const auto a = gaussian_tensor({e, e}, f, 1);
    const std::vector<VectorFamily> fams{gaussian_family(e, 2, 1), gaussian_family(e, 2, 2)};
    const auto rep = quotient_theorem(a, Functional(f, {0, 0}), Vector(f, {1, 0}), E(2), E(1), {E(1), E(1)},
                                      fams, gaussian_family(f.dual(), 2, 3), gaussian_family(f, 3, 4), quick());
    CHECK(rep.metrics.at("lhs_forward") == 0.0);
    CHECK(rep.metrics.at("pi_s_u") == 0.0);
    CHECK(rep.verdict == Verdict::pass);
}

TEST_CASE("triviality law on the identity of l2^2") {
    const SpaceSpec s(E(2), 2);
    const auto rep = triviality_law(SummingParams::as_linear_pqr(E(1), E(4), E(4)), identity_map(s, s));
    CHECK(rep.verdict == Verdict::pass);
    CHECK(rep.metrics.at("measured_exponent") == doctest::Approx(0.5).epsilon(1e-9));
    const auto zero = triviality_law(SummingParams::as_linear_pqr(E(1), E(4), E(4)), MultilinearMap::zeros({s}, s));
    CHECK(zero.metrics.at("zero_map") == 1.0);
    CHECK(zero.verdict == Verdict::pass);
}

TEST_CASE("inclusion and endpoint laws pass on small instances") {
    const SpaceSpec s(E(2), 2);
    const auto t = gaussian_tensor({s, SpaceSpec(E(1), 2)}, SpaceSpec(kInf, 2), 5);
    Budget b = quick();
    b.m_max = 2;
    const auto inc = inclusion_law(t, SummingParams::multiple_r(E(2), {E(2), E(2)}, E(2)), b);
    CHECK(inc.verdict != Verdict::fail);
    CHECK(check_margin(inc, "ratio_r") >= -1e-9);

    for (auto space : {SpaceSpec(E(1), 3), SpaceSpec(E(2), 3), SpaceSpec(kInf, 3)}) {
        for (double q : {1.0, 2.0}) {
            const auto rep = endpoints_law(gaussian_family(space, 4, 8), E(q), E(2 * q));
            CHECK(rep.verdict != Verdict::fail);
        }
    }
}
