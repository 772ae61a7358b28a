#include "doctest.h"

#include "summa/rng.hpp"
#include "summa/seqnorms.hpp"
#include "summa/summing.hpp"

#include <cmath>
#include <stdexcept>

using namespace summa;

namespace {

const Exponent kInf = Exponent::infinity();

Exponent E(double v) { return Exponent(v); }

MultilinearMap random_map(const std::vector<SpaceSpec>& dom, const SpaceSpec& cod, std::uint64_t seed) {
    CounterRng rng(seed);
    auto m = MultilinearMap::zeros(dom, cod);
    for (double& c : m.coeffs()) {
        c = rng.normal();
    }
    return m;
}

VectorFamily random_family(const SpaceSpec& s, std::vector<std::size_t> shape, CounterRng& rng) {
    auto f = VectorFamily::zeros(s, std::move(shape));
    for (double& v : f.data()) {
        v = rng.normal();
    }
    return f;
}

Budget small_budget(int restarts = 6, int m_max = 3) {
    Budget b;
    b.restarts = restarts;
    b.m_max = m_max;
    b.iters = 60;
    return b;
}

// Every family of length m in ℓ∞^N with ‖·‖_{w,1} ≤ 1 is a convex combination
// of families whose columns are ±e_j. LHS of multiple (1;1,…,1) is convex in
// each family, so the sup is attained on those (2m)^N extreme families.
std::vector<VectorFamily> extreme_linf_families(std::size_t n, std::size_t m) {
    std::vector<VectorFamily> out;
    std::size_t count = 1;
    for (std::size_t i = 0; i < n; ++i) {
        count *= 2 * m;
    }
    for (std::size_t code = 0; code < count; ++code) {
        auto f = VectorFamily::zeros(SpaceSpec(kInf, n), {m});
        std::size_t rest = code;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t pick = rest % (2 * m);
            rest /= 2 * m;
            f.member(pick / 2)[i] = pick % 2 == 0 ? 1.0 : -1.0;
        }
        out.push_back(std::move(f));
    }
    return out;
}

double vertex_oracle_multiple_one(const MultilinearMap& t, std::size_t m_max) {
    double best = 0.0;
    const std::size_t n = t.arity();
    for (std::size_t m = 1; m <= m_max; ++m) {
        std::vector<std::vector<VectorFamily>> ext;
        for (std::size_t k = 0; k < n; ++k) {
            ext.push_back(extreme_linf_families(t.domain()[k].dim, m));
        }
        std::vector<std::size_t> pick(n, 0);
        while (true) {
            std::vector<std::span<const double>> args(n);
            double lhs = 0.0;
            std::vector<std::size_t> j(n, 0);
            while (true) {
                for (std::size_t k = 0; k < n; ++k) {
                    args[k] = ext[k][pick[k]].member(j[k]);
                }
                lhs += std::abs(evaluate_coords(t, args)[0]);
                std::size_t k = n;
                while (k-- > 0 && ++j[k] == m) {
                    j[k] = 0;
                }
                if (k == static_cast<std::size_t>(-1)) {
                    break;
                }
            }
            best = std::max(best, lhs);
            std::size_t k = n;
            while (k-- > 0 && ++pick[k] == ext[k].size()) {
                pick[k] = 0;
            }
            if (k == static_cast<std::size_t>(-1)) {
                break;
            }
        }
    }
    return best;
}

} // namespace

TEST_CASE("basis vectors on the identity of l_inf^2 give ratio 2, on l1^2 ratio 1") {
    const SpaceSpec s(kInf, 2);
    const auto id = identity_map(s, s);
    const auto x = VectorFamily::from_members(s, {{1, 0}, {0, 1}});
    const auto sides = lhs_rhs(id, SummingParams::as_linear(E(1), E(1)), {x}, std::nullopt);
    CHECK(sides.lhs == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sides.rhs == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sides.certified);
    const auto est = estimate_norm(id, SummingParams::as_linear(E(1), E(1)), small_budget());
    CHECK(est.value >= 2.0 - 1e-12);

    const SpaceSpec l1(E(1), 2);
    const auto e = VectorFamily::from_members(l1, {{1, 0}, {0, 1}});
    const auto on_l1 = lhs_rhs(identity_map(l1, l1), SummingParams::as_linear(E(1), E(1)), {e}, std::nullopt);
    CHECK(on_l1.lhs == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(on_l1.rhs == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("scalar product map has every ratio equal to one") {
    const SpaceSpec k(E(2), 1);
    const auto prod = MultilinearMap::form({k, k}, {1.0});
    CounterRng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_family(k, {3}, rng);
        const auto y = random_family(k, {4}, rng);
        const auto sides = lhs_rhs(prod, SummingParams::multiple(E(1), {E(1), E(1)}), {x, y}, std::nullopt);
        CHECK(sides.ratio() == doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto est = estimate_norm(prod, SummingParams::multiple(E(1), {E(1), E(1)}), small_budget());
    CHECK(est.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero map has summing norm zero") {
    const SpaceSpec s(E(2), 3);
    const auto z = MultilinearMap::zeros({s, s}, SpaceSpec(E(1), 2));
    for (const auto& params : {SummingParams::multiple(E(2), {E(2), E(2)}),
                               SummingParams::multiple_r(E(2), {E(2), E(2)}, E(4)),
                               SummingParams::as_multi(E(1), {E(2), E(2)}),
                               SummingParams::mixing(E(2), E(2), {E(2), E(2)})}) {
        const auto est = estimate_norm(z, params, small_budget(2, 2));
        CHECK(est.value == 0.0);
    }
}

TEST_CASE("multiple (1;1,...,1) on l_inf slots matches the vertex oracle") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto t2 = random_map({SpaceSpec(kInf, 2), SpaceSpec(kInf, 2)}, scalar_space(), seed);
        const auto t3 = random_map({SpaceSpec(kInf, 3)}, scalar_space(), 100 + seed);
        for (const auto* t : {&t2, &t3}) {
            std::vector<Exponent> ones(t->arity(), E(1));
            const double oracle = vertex_oracle_multiple_one(*t, 3);
            Budget b = small_budget(16, 3);
            b.seed = seed;
            const auto est = estimate_norm(*t, SummingParams::multiple(E(1), ones), b);
            CHECK(est.value <= oracle * (1 + 1e-12));
            CHECK(est.value == doctest::Approx(oracle).epsilon(1e-9));
            CHECK(est.certified);
        }
    }
}

TEST_CASE("witness ratio is a lower bound recomputable from the witness") {
    const auto t = random_map({SpaceSpec(E(2), 3), SpaceSpec(E(3), 2)}, SpaceSpec(E(1.5), 2), 77);
    const auto params = SummingParams::multiple_r(E(2), {E(2), E(2)}, E(3));
    const auto est = estimate_norm(t, params, small_budget(4, 2));
    const auto& w = std::get<SummingWitness>(est.witness);
    const auto sides = lhs_rhs(t, params, w.x_families, w.phis);
    CHECK(sides.ratio() == doctest::Approx(est.value).epsilon(1e-6));
    CHECK(est.kind == EstimateKind::lower_bound);
}

TEST_CASE("r = inf reproduces the kind without functionals") {
    const auto t = random_map({SpaceSpec(E(2), 2), SpaceSpec(E(1), 3)}, SpaceSpec(E(3), 2), 9);
    const auto plain = estimate_norm(t, SummingParams::multiple(E(2), {E(2), E(1)}), small_budget(4, 2));
    const auto with_r = estimate_norm(t, SummingParams::multiple_r(E(2), {E(2), E(1)}, kInf), small_budget(4, 2));
    CHECK(with_r.value == doctest::Approx(plain.value).epsilon(1e-9));

    const auto l = random_map({SpaceSpec(E(2), 3)}, SpaceSpec(E(4), 2), 10);
    const auto a = estimate_norm(l, SummingParams::as_linear(E(2), E(2)), small_budget(4, 2));
    const auto b = estimate_norm(l, SummingParams::as_linear_pqr(E(2), E(2), kInf), small_budget(4, 2));
    CHECK(b.value == doctest::Approx(a.value).epsilon(1e-9));
}

TEST_CASE("for linear maps the absolutely and multiple summing kinds coincide") {
    const auto l = random_map({SpaceSpec(E(1), 3)}, SpaceSpec(E(2), 3), 21);
    const auto a = estimate_norm(l, SummingParams::as_linear(E(2), E(1)), small_budget(4, 3));
    const auto b = estimate_norm(l, SummingParams::as_multi(E(2), {E(1)}), small_budget(4, 3));
    const auto c = estimate_norm(l, SummingParams::multiple(E(2), {E(1)}), small_budget(4, 3));
    CHECK(a.value == b.value);
    CHECK(a.value == c.value);
    const auto ar = estimate_norm(l, SummingParams::as_linear_pqr(E(2), E(2), E(2)), small_budget(4, 3));
    const auto cr = estimate_norm(l, SummingParams::multiple_r(E(2), {E(2)}, E(2)), small_budget(4, 3));
    CHECK(ar.value == cr.value);
}

TEST_CASE("summing estimate is positively homogeneous") {
    const auto t = random_map({SpaceSpec(kInf, 2), SpaceSpec(E(2), 2)}, SpaceSpec(E(2), 2), 31);
    const auto params = SummingParams::multiple(E(2), {E(2), E(2)});
    const auto a = estimate_norm(t, params, small_budget(4, 2));
    const auto b = estimate_norm(t.scaled(3.0), params, small_budget(4, 2));
    CHECK(b.value == doctest::Approx(3.0 * a.value).epsilon(1e-6));
}

TEST_CASE("inadmissible exponents are rejected with the violated relation") {
    const SpaceSpec s(E(2), 2);
    const auto t = random_map({s, s}, s, 3);
    auto constraint = [&](const SummingParams& p) {
        try {
            estimate_norm(t, p, small_budget(1, 1));
        } catch (const InadmissibleExponents& e) {
            return e.constraint();
        }
        return std::string();
    };
    CHECK(constraint(SummingParams::multiple(E(1), {E(2), E(1)})) == "q_i > p");
    CHECK(constraint(SummingParams::multiple_r(E(1), {E(2), E(4)}, E(4))) == "1/p > 1/q_i + 1/r");
    CHECK(constraint(SummingParams::as_multi(E(0.5 + 0.5), {E(4), E(4)})) == "1/p > 1/p_1 + ... + 1/p_n");
    CHECK(constraint(SummingParams::as_multi_r(E(1), {E(4), E(4)}, E(4))) == "1/p > 1/q_1 + ... + 1/q_n + 1/r");
    CHECK(constraint(SummingParams::mixing(E(2), E(3), {E(2), E(2)})) == "q > s");
    CHECK(constraint(SummingParams::mixing(E(4), E(2), {E(3), E(1)})) == "q < p_k");
    CHECK(constraint(SummingParams::multiple(kInf, {E(2), E(2)})) == "p = inf");
    CHECK_THROWS_AS(estimate_norm(t, SummingParams::as_linear(E(2), E(2))), std::invalid_argument);
    CHECK_THROWS_AS(estimate_norm(t, SummingParams::multiple(E(2), {E(2)})), std::invalid_argument);
    const auto l = random_map({s}, s, 4);
    try {
        estimate_norm(l, SummingParams::as_linear(E(1), E(2)));
        FAIL("expected InadmissibleExponents");
    } catch (const InadmissibleExponents& e) {
        CHECK(e.constraint() == "q > p");
    }
    try {
        estimate_norm(l, SummingParams::as_linear_pqr(E(1), E(4), E(4)));
        FAIL("expected InadmissibleExponents");
    } catch (const InadmissibleExponents& e) {
        CHECK(e.constraint() == "1/p > 1/q + 1/r");
    }
}

TEST_CASE("lhs_rhs validates shapes") {
    const SpaceSpec s(E(2), 2);
    const auto t = random_map({s, s}, s, 3);
    CounterRng rng(1);
    const auto x3 = random_family(s, {3}, rng);
    const auto x2 = random_family(s, {2}, rng);
    CHECK_THROWS_AS(lhs_rhs(t, SummingParams::as_multi(E(1), {E(2), E(2)}), {x3, x2}, std::nullopt),
                    std::invalid_argument);
    CHECK_NOTHROW(lhs_rhs(t, SummingParams::multiple(E(2), {E(2), E(2)}), {x3, x2}, std::nullopt));
    const auto phis_wrong = random_family(s.dual(), {5}, rng);
    CHECK_THROWS_AS(lhs_rhs(t, SummingParams::multiple_r(E(2), {E(2), E(2)}, E(2)), {x3, x2}, phis_wrong),
                    std::invalid_argument);
    const auto phis = random_family(s.dual(), {3, 2}, rng);
    CHECK_NOTHROW(lhs_rhs(t, SummingParams::multiple_r(E(2), {E(2), E(2)}, E(2)), {x3, x2}, phis));
    CHECK_THROWS_AS(lhs_rhs(t, SummingParams::multiple(E(2), {E(2), E(2)}), {x3, x2}, phis), std::invalid_argument);
}

TEST_CASE("repeated witnesses grow at the predicted rate outside the admissible range") {
    const SpaceSpec s(E(2), 2);
    const auto t = random_map({s, s}, SpaceSpec(E(1), 2), 12);
    struct Case {
        SummingParams params;
        double expected;
    };
    const std::vector<Case> cases = {
        {SummingParams::multiple(E(1), {E(2), E(4)}), 1.0 - 0.25},
        {SummingParams::multiple_r(E(1), {E(2), E(4)}, E(2)), 1.0 - 0.25 - 0.5},
        {SummingParams::as_multi(E(1), {E(4), E(4)}), 0.5},
        {SummingParams::as_multi_r(E(1), {E(4), E(4)}, E(4)), 0.25},
        {SummingParams::mixing(E(4), E(2), {E(4), E(3)}), 0.5 - 0.25},
    };
    for (const auto& c : cases) {
        const auto rep = check_triviality(c.params, t);
        CHECK_FALSE(rep.zero_map);
        CHECK(rep.predicted_exponent == doctest::Approx(c.expected).epsilon(1e-12));
        CHECK(rep.measured_exponent == doctest::Approx(c.expected).epsilon(1e-9));
        CHECK(rep.lengths.size() == 4);
    }
    const auto l = random_map({s}, s, 13);
    const auto rep = check_triviality(SummingParams::as_linear_pqr(E(1), E(4), E(4)), l);
    CHECK(rep.measured_exponent == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_THROWS_AS(check_triviality(SummingParams::multiple(E(2), {E(2), E(2)}), t), std::invalid_argument);
    const auto z = MultilinearMap::zeros({s, s}, s);
    CHECK(check_triviality(SummingParams::multiple(E(1), {E(2), E(2)}), z).zero_map);
}

TEST_CASE("restriction transport scales the ratio by the norm of the fixed vector") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        CounterRng rng = CounterRng::stream(seed, {0x7e57});
        const std::vector<SpaceSpec> dom = {SpaceSpec(E(1.5), 2), SpaceSpec(E(2), 2), SpaceSpec(kInf, 3)};
        const SpaceSpec cod(E(3), 2);
        const auto t = random_map(dom, cod, seed);
        const Vector a(dom[0], {rng.normal(), rng.normal()});
        const auto ta = restrict(t, 0, a);
        const bool with_r = seed % 2 == 1;
        const auto params = with_r ? SummingParams::multiple_r(E(2), {E(2), E(2), E(1.5)}, E(3))
                                   : SummingParams::multiple(E(2), {E(2), E(2), E(1.5)});
        const auto sub = restricted_params(params);
        const auto xa = random_family(dom[1], {2}, rng);
        const auto xb = random_family(dom[2], {3}, rng);
        std::optional<VectorFamily> phis;
        if (with_r) {
            phis = random_family(cod.dual(), {2, 3}, rng);
        }
        const auto wta = make_witness(ta, sub, {xa, xb}, phis);
        const auto wt = restriction_transport(t, params, a, wta);
        CHECK(wta.ratio == doctest::Approx(norm(a) * wt.ratio).epsilon(1e-9));
    }
}

TEST_CASE("dropping functionals never lowers the ratio") {
    const auto t = random_map({SpaceSpec(E(2), 2), SpaceSpec(E(3), 3)}, SpaceSpec(E(1.5), 3), 41);
    const auto params = SummingParams::multiple_r(E(2), {E(2), E(1.5)}, E(3));
    CounterRng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const auto w = make_witness(t, params, {random_family(t.domain()[0], {2}, rng),
                                                random_family(t.domain()[1], {3}, rng)},
                                    random_family(t.codomain().dual(), {2, 3}, rng));
        const auto plain = inclusion_transport(t, params, w);
        CHECK(plain.ratio >= w.ratio * (1 - 1e-12));
    }
    const auto est_r = estimate_norm(t, params, small_budget(4, 2));
    const auto moved = inclusion_transport(t, params, std::get<SummingWitness>(est_r.witness));
    CHECK(moved.ratio >= est_r.value * (1 - 1e-9));
}

TEST_CASE("composition transport respects the ideal inequality") {
    const SpaceSpec e1(E(1), 2), e2(E(1), 3), f(E(1), 2), g(E(2), 3);
    const SpaceSpec p1(E(2), 2), p2(E(3), 2);
    CounterRng rng(17);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto t = random_map({e1, e2}, f, seed);
        const auto w = random_map({f}, g, 1000 + seed);
        const auto u1 = random_map({p1}, e1, 2000 + seed);
        const auto u2 = random_map({p2}, e2, 3000 + seed);
        const auto s = compose(w, t, {u1, u2});
        const auto params = SummingParams::multiple_r(E(2), {E(2), E(2)}, E(2));
        const auto ws = make_witness(s, params, {random_family(p1, {2}, rng), random_family(p2, {2}, rng)},
                                     random_family(g.dual(), {2, 2}, rng));
        const auto wt = composition_transport(t, params, w, {u1, u2}, ws);
        const auto nw = op_norm(w);
        const auto n1 = op_norm(u1);
        const auto n2 = op_norm(u2);
        REQUIRE(nw.kind == EstimateKind::exact);
        REQUIRE(n1.kind == EstimateKind::exact);
        REQUIRE(n2.kind == EstimateKind::exact);
        CHECK(ws.ratio <= nw.value * n1.value * n2.value * wt.ratio * (1 + 1e-9));
    }
}
