#include "summa/laws.hpp"

#include "summa/corpus.hpp"
#include "summa/rng.hpp"
#include "summa/seqnorms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace summa {

namespace {

constexpr std::uint64_t kCoherenceStream = 0xc0e1;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string describe(const SpaceSpec& s) { return "l" + s.exponent.to_string() + "^" + std::to_string(s.dim); }

std::string describe(const MultilinearMap& t) {
    std::string out;
    for (std::size_t k = 0; k < t.arity(); ++k) {
        out += (k ? " x " : "") + describe(t.domain()[k]);
    }
    return out + " -> " + describe(t.codomain());
}

std::string describe(const SummingParams& p) {
    std::string out = to_string(p.kind) + " p=" + p.sum_exponent.to_string() + " slots=";
    for (std::size_t i = 0; i < p.slot_exponents.size(); ++i) {
        out += (i ? "," : "") + p.slot_exponents[i].to_string();
    }
    if (p.functional_exponent) {
        out += " r=" + p.functional_exponent->to_string();
    }
    if (p.mixing_exponent) {
        out += " s=" + p.mixing_exponent->to_string();
    }
    return out;
}

void describe_budget(LawReportBuilder& b, const Budget& budget) {
    b.instance("seed", std::to_string(budget.seed))
        .instance("restarts", std::to_string(budget.restarts))
        .instance("iters", std::to_string(budget.iters))
        .instance("m_max", std::to_string(budget.m_max))
        .instance("enum_cap", std::to_string(budget.enum_cap));
}

double relative_tol(double scale) { return 1e-9 * std::max(1.0, std::abs(scale)); }

/// T(x_J) over the full index box, as a box-shaped family in the codomain.
VectorFamily box_outputs(const MultilinearMap& t, const std::vector<VectorFamily>& xs) {
    std::vector<std::size_t> shape;
    for (const auto& f : xs) {
        shape.push_back(f.size());
    }
    auto out = VectorFamily::zeros(t.codomain(), shape);
    const std::size_t n = xs.size();
    std::vector<std::size_t> idx(n, 0);
    std::vector<std::span<const double>> args(n);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        for (std::size_t k = 0; k < n; ++k) {
            args[k] = xs[k].member(idx[k]);
        }
        const auto y = evaluate_coords(t, args);
        std::copy(y.begin(), y.end(), out.member(flat).begin());
        for (std::size_t k = n; k-- > 0;) {
            if (++idx[k] < shape[k]) {
                break;
            }
            idx[k] = 0;
        }
    }
    return out;
}

Comparison exact_if(bool certified) { return certified ? Comparison::exact : Comparison::rhs_lower_bound; }

VectorFamily random_family(const SpaceSpec& s, std::vector<std::size_t> shape, CounterRng& rng) {
    auto f = VectorFamily::zeros(s, std::move(shape));
    for (double& v : f.data()) {
        v = rng.normal();
    }
    return f;
}

SummingParams with_slots(const SummingParams& params, std::size_t slots) {
    SummingParams out = params;
    out.slot_exponents.assign(slots, params.slot_exponents.front());
    return out;
}

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double k = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

} // namespace

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::pass:
        return "pass";
    case Verdict::fail:
        return "fail";
    case Verdict::inconclusive:
        return "inconclusive";
    }
    return "fail";
}

std::string to_string(Comparison c) {
    switch (c) {
    case Comparison::exact:
        return "exact";
    case Comparison::sandwich:
        return "sandwich";
    case Comparison::rhs_lower_bound:
        return "rhs_lower_bound";
    case Comparison::empirical:
        return "empirical";
    }
    return "exact";
}

LawReportBuilder::LawReportBuilder(std::string law_id) { report_.law_id = std::move(law_id); }

LawReportBuilder& LawReportBuilder::instance(const std::string& key, const std::string& value) {
    report_.instance[key] = value;
    return *this;
}

LawReportBuilder& LawReportBuilder::metric(const std::string& key, double value) {
    report_.metrics[key] = value;
    return *this;
}

LawReportBuilder& LawReportBuilder::witness(const std::string& key, std::vector<double> values) {
    report_.witness[key] = std::move(values);
    return *this;
}

LawReportBuilder& LawReportBuilder::check(const std::string& name, double lhs, double rhs, double tolerance,
                                          Comparison comparison) {
    LawCheck c;
    c.name = name;
    c.lhs = lhs;
    c.rhs = rhs;
    c.tolerance = tolerance;
    c.comparison = comparison;
    c.margin = rhs - lhs;
    if (c.margin >= -tolerance) {
        c.verdict = Verdict::pass;
    } else if (comparison == Comparison::exact || comparison == Comparison::sandwich) {
        c.verdict = Verdict::fail;
    } else {
        c.verdict = Verdict::inconclusive;
    }
    if (c.verdict == Verdict::fail) {
        report_.verdict = Verdict::fail;
    } else if (c.verdict == Verdict::inconclusive && report_.verdict == Verdict::pass) {
        report_.verdict = Verdict::inconclusive;
    }
    report_.checks.push_back(std::move(c));
    return *this;
}

LawReportBuilder& LawReportBuilder::inconclusive(const std::string& reason) {
    report_.instance["inconclusive_reason"] = reason;
    if (report_.verdict == Verdict::pass) {
        report_.verdict = Verdict::inconclusive;
    }
    return *this;
}

LawReport LawReportBuilder::build() const { return report_; }

LawReport littlewood_43(const MultilinearMap& t, bool exhaustive, const Budget& budget) {
    if (t.arity() != 2 || t.codomain().dim != 1 || !t.domain()[0].exponent.is_infinite() ||
        !t.domain()[1].exponent.is_infinite()) {
        throw std::invalid_argument("littlewood_43 needs a scalar bilinear form on l_inf^N x l_inf^M");
    }
    LawReportBuilder b("littlewood43");
    b.instance("map", describe(t)).instance("mode", exhaustive ? "exhaustive" : "ascent");
    describe_budget(b, budget);

    const double lhs = lp_norm(t.coeffs(), Exponent(4.0 / 3.0));
    Budget nb = budget;
    if (!exhaustive) {
        nb.weak_mode = WeakMode::ascent;
    }
    const auto op = op_norm(t, nb);
    const bool exact = op.kind == EstimateKind::exact;
    if (exhaustive && !exact) {
        b.instance("note", "enumeration exceeds the cap; norm is a lower bound");
    }
    const double rhs = kLittlewoodConstant * op.value;
    b.metric("lhs", lhs).metric("norm", op.value).metric("ratio", op.value > 0 ? lhs / op.value : 0.0);
    b.check("sum^(3/4) <= sqrt2 * norm", lhs, rhs, relative_tol(rhs), exact_if(exact));
    const auto& args = std::get<std::vector<Vector>>(op.witness);
    b.witness("x", args[0].coords).witness("y", args[1].coords);
    return b.build();
}

LawReport bohnenblust_hille(const MultilinearMap& t, const std::vector<VectorFamily>& families, const Budget& budget) {
    const std::size_t n = t.arity();
    if (n < 2 || t.codomain().dim != 1) {
        throw std::invalid_argument("bohnenblust_hille needs a scalar form of arity >= 2");
    }
    const double pbh = 2.0 * static_cast<double>(n) / static_cast<double>(n + 1);
    LawReportBuilder b("bh");
    b.instance("map", describe(t)).instance("exponent", fmt(pbh));
    describe_budget(b, budget);
    const auto params = SummingParams::multiple(Exponent(pbh), std::vector<Exponent>(n, Exponent(1.0)));
    const auto sides = lhs_rhs(t, params, families, std::nullopt, budget);
    const auto op = op_norm(t, budget);
    b.metric("lhs", sides.lhs).metric("rhs", sides.rhs).metric("ratio", sides.ratio()).metric("norm", op.value);
    b.metric("normalized_ratio", op.value > 0 ? sides.ratio() / op.value : 0.0);
    b.metric("norm_exact", op.kind == EstimateKind::exact ? 1.0 : 0.0);
    if (!sides.certified) {
        b.instance("note", "a weak norm came from ascent; the ratio may overstate the true value");
    }
    return b.build();
}

LawReport bh_exponent_probe(std::size_t n, const std::vector<std::size_t>& dims, double p_below, const Budget& budget) {
    const double pbh = 2.0 * static_cast<double>(n) / static_cast<double>(n + 1);
    if (n < 2 || !(p_below < pbh) || p_below < 1.0 || dims.size() < 2) {
        throw std::invalid_argument("bh_exponent_probe needs n >= 2, 1 <= p_below < 2n/(n+1) and two dims");
    }
    LawReportBuilder b("bh_exponent");
    b.instance("n", std::to_string(n)).instance("p_below", fmt(p_below)).instance("family", "fourier, basis inputs");
    describe_budget(b, budget);
    std::vector<double> logs, at, below;
    bool all_exact = true;
    for (std::size_t dim : dims) {
        const auto t = fourier_tensor(n, dim);
        const auto op = op_norm(t, budget);
        all_exact = all_exact && op.kind == EstimateKind::exact;
        // Basis families of ℓ∞^N have weak 1-norm 1, so the ratio is the
        // coefficient norm.
        const double r_at = lp_norm(t.coeffs(), Exponent(pbh)) / op.value;
        const double r_below = lp_norm(t.coeffs(), Exponent(p_below)) / op.value;
        logs.push_back(std::log(static_cast<double>(dim)));
        at.push_back(std::log(r_at));
        below.push_back(std::log(r_below));
        b.metric("ratio_at_N" + std::to_string(dim), r_at).metric("ratio_below_N" + std::to_string(dim), r_below);
    }
    const double slope_at = least_squares_slope(logs, at);
    const double slope_below = least_squares_slope(logs, below);
    const double predicted = static_cast<double>(n) / p_below - static_cast<double>(n) / pbh;
    b.metric("slope_at", slope_at).metric("slope_below", slope_below).metric("predicted_gap", predicted);
    b.metric("norms_exact", all_exact ? 1.0 : 0.0);
    b.check("ratio at 2n/(n+1) bounded: slope <= 0.1", slope_at, 0.1, 0.0, Comparison::empirical);
    b.check("ratio below 2n/(n+1) outgrows: slope gap >= half the predicted", 0.5 * predicted,
            slope_below - slope_at, 0.0, Comparison::empirical);
    return b.build();
}

LawReport maurey_duality(const VectorFamily& fam, const Exponent& s, const Exponent& q, const Budget& budget) {
    LawReportBuilder b("maurey");
    b.instance("space", describe(fam.space()))
        .instance("m", std::to_string(fam.size()))
        .instance("s", s.to_string())
        .instance("q", q.to_string());
    describe_budget(b, budget);
    const auto primal = mixed_norm_primal(fam, s, q, budget);
    const auto dual = mixed_norm_dual(fam, s, q, budget);
    const double gap = primal.value > 0 ? (primal.value - dual.value) / primal.value : 0.0;
    b.metric("primal", primal.value).metric("dual", dual.value).metric("gap", gap);
    b.metric("primal_certified", primal.certified ? 1.0 : 0.0);
    b.check("dual <= primal", dual.value, primal.value, 1e-9,
            primal.certified ? Comparison::sandwich : Comparison::rhs_lower_bound);
    b.check("gap <= 5% of primal", gap, 0.05, 0.0, Comparison::empirical);
    const auto& fw = std::get<FactorizationWitness>(primal.witness);
    b.witness("taus", fw.taus);
    const auto& mu = std::get<DiscreteMeasure>(dual.witness);
    b.witness("weights", mu.weights);
    return b.build();
}

LawReport mixing_characterization(const MultilinearMap& a, const Exponent& s, const Exponent& q,
                                  const std::vector<Exponent>& ps, const std::vector<VectorFamily>& families,
                                  const Budget& budget) {
    require_admissible(SummingParams::mixing(s, q, ps), a.arity());
    if (families.size() != a.arity()) {
        throw std::invalid_argument("mixing_characterization: one family per slot");
    }
    LawReportBuilder b("mixing");
    b.instance("map", describe(a)).instance("s", s.to_string()).instance("q", q.to_string());
    describe_budget(b, budget);
    const auto outputs = box_outputs(a, families);
    const auto bracket = mixed_norm(outputs, s, q, budget);
    const auto route_b = maximize_mixing_functionals(outputs, s, q, outputs.size() + 1, budget);
    double weak_product = 1.0;
    bool weak_exact = true;
    for (std::size_t k = 0; k < families.size(); ++k) {
        const auto w = weak_norm(families[k], ps[k], budget);
        weak_exact = weak_exact && w.kind == EstimateKind::exact;
        weak_product *= w.value;
    }
    const double upper = bracket.upper.value;
    const double gap = upper > 0 ? (upper - route_b.value) / upper : 0.0;
    b.metric("route_a_upper", upper)
        .metric("route_a_lower", bracket.lower.value)
        .metric("route_b", route_b.value)
        .metric("gap", gap)
        .metric("weak_product", weak_product)
        .metric("sigma_lower", weak_product > 0 ? route_b.value / weak_product : 0.0)
        .metric("weak_exact", weak_exact ? 1.0 : 0.0);
    b.check("route (b) <= route (a) upper", route_b.value, upper, relative_tol(upper),
            bracket.upper.certified ? Comparison::sandwich : Comparison::rhs_lower_bound);
    b.check("gap <= 10%", gap, 0.10, 0.0, Comparison::empirical);
    b.witness("phis", std::vector<double>(route_b.phis.data().begin(), route_b.phis.data().end()));
    return b.build();
}

LawReport coherence_compatibility(const HomogeneousPolynomial& p, const SummingParams& params, const Vector& a,
                                  const Functional& gamma, std::size_t witnesses, std::size_t m,
                                  const Budget& budget) {
    const std::size_t n = p.degree();
    if (params.kind != SummingKind::multiple_r || params.slot_exponents.size() != n) {
        throw std::invalid_argument("coherence_compatibility needs multiple_r params for the degree of P");
    }
    if (std::adjacent_find(params.slot_exponents.begin(), params.slot_exponents.end(), std::not_equal_to<>()) !=
        params.slot_exponents.end()) {
        throw std::invalid_argument("coherence_compatibility needs equal slot exponents");
    }
    require_admissible(params, n);
    const SpaceSpec& e = p.space();
    const SpaceSpec fd = p.codomain().dual();
    if (!(a.space == e) || !(gamma.space == e)) {
        throw std::invalid_argument("a and gamma must live on the polynomial's space");
    }
    LawReportBuilder b("coherence");
    b.instance("space", describe(e))
        .instance("degree", std::to_string(n))
        .instance("params", describe(params))
        .instance("witnesses", std::to_string(witnesses))
        .instance("m", std::to_string(m));
    describe_budget(b, budget);
    const double norm_a = norm(a);
    const double norm_gamma = dual_norm(gamma);
    b.metric("beta1", 1.0).metric("beta2", 1.0).metric("norm_a", norm_a).metric("norm_gamma", norm_gamma);

    double worst1 = 0.0;
    double worst2 = 0.0;
    for (std::size_t w = 0; w < witnesses; ++w) {
        auto rng = CounterRng::stream(budget.seed, {kCoherenceStream, w});
        const std::string tag = "[" + std::to_string(w) + "] ";

        // (i) fixed point.
        if (n >= 2) {
            const auto pa = fix_point(p, a, 1);
            const auto sub = with_slots(params, n - 1);
            std::vector<VectorFamily> xs;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                xs.push_back(random_family(e, {m}, rng));
            }
            const auto phis = random_family(fd, std::vector<std::size_t>(n - 1, m), rng);
            const auto wpa = make_witness(pa.sym(), sub, xs, phis, budget);

            auto first = VectorFamily::zeros(e, {m});
            std::copy(a.coords.begin(), a.coords.end(), first.member(0).begin());
            std::vector<VectorFamily> big{first};
            big.insert(big.end(), xs.begin(), xs.end());
            std::vector<std::size_t> shape(n, m);
            auto big_phis = VectorFamily::zeros(fd, shape);
            std::copy(phis.data().begin(), phis.data().end(), big_phis.data().begin());
            const auto sides = lhs_rhs(p.sym(), params, big, big_phis, budget);
            const double bound = norm_a * sides.ratio();
            b.check(tag + "ratio(P_a) <= |a| ratio(P)", wpa.ratio, bound, relative_tol(bound),
                    exact_if(sides.certified));
            if (bound > 0) {
                worst1 = std::max(worst1, wpa.ratio / bound);
            }
        }

        // (ii) product with a functional.
        const auto gp = multiply(gamma, p);
        const std::size_t n1 = n + 1;
        const auto big_params = with_slots(params, n1);
        std::vector<VectorFamily> xs;
        for (std::size_t k = 0; k < n1; ++k) {
            xs.push_back(random_family(e, {m}, rng));
        }
        const std::vector<std::size_t> box(n1, m);
        const auto phis = random_family(fd, box, rng);
        const auto sides_gp = lhs_rhs(gp.sym(), big_params, xs, phis, budget);

        std::vector<double> gx(n1 * m);
        for (std::size_t k = 0; k < n1; ++k) {
            for (std::size_t j = 0; j < m; ++j) {
                gx[k * m + j] = dot(gamma.coords, xs[k].member(j));
            }
        }
        double lhs_sum = 0.0;
        double best_ratio = 0.0;
        bool certified = sides_gp.certified;
        for (std::size_t k = 0; k < n1; ++k) {
            const std::size_t l = k == 0 ? 1 : 0;
            // Slots of the re-blocked witness: every slot but k, in order, with
            // slot l replaced by z_{(j_k, j_l)} = γ(x^{(k)}_{j_k}) x^{(l)}_{j_l}.
            std::vector<VectorFamily> zs;
            std::vector<std::size_t> zshape;
            for (std::size_t i = 0; i < n1; ++i) {
                if (i == k) {
                    continue;
                }
                if (i == l) {
                    auto z = VectorFamily::zeros(e, {m * m});
                    for (std::size_t jk = 0; jk < m; ++jk) {
                        for (std::size_t jl = 0; jl < m; ++jl) {
                            for (std::size_t c = 0; c < e.dim; ++c) {
                                z.member(jk * m + jl)[c] = gx[k * m + jk] * xs[l].member(jl)[c];
                            }
                        }
                    }
                    zs.push_back(std::move(z));
                    zshape.push_back(m * m);
                } else {
                    zs.push_back(xs[i]);
                    zshape.push_back(m);
                }
            }
            // φ̃ at the re-blocked index equals φ_J.
            auto tphis = VectorFamily::zeros(fd, zshape);
            std::vector<std::size_t> idx(n1, 0);
            for (std::size_t flat = 0; flat < phis.size(); ++flat) {
                std::size_t target = 0;
                for (std::size_t i = 0; i < n1; ++i) {
                    if (i == k) {
                        continue;
                    }
                    const std::size_t extent = i == l ? m * m : m;
                    const std::size_t index = i == l ? idx[k] * m + idx[l] : idx[i];
                    target = target * extent + index;
                }
                std::copy(phis.member(flat).begin(), phis.member(flat).end(), tphis.member(target).begin());
                for (std::size_t i = n1; i-- > 0;) {
                    if (++idx[i] < m) {
                        break;
                    }
                    idx[i] = 0;
                }
            }
            const auto term = lhs_rhs(p.sym(), params, zs, tphis, budget);
            certified = certified && term.certified;
            lhs_sum += term.lhs;
            best_ratio = std::max(best_ratio, term.ratio());

            const double wz = weak_norm(zs[l < k ? l : l - 1], params.slot_exponents[0], budget).value;
            const double wk = weak_norm(xs[k], params.slot_exponents[0], budget).value;
            const double wl = weak_norm(xs[l], params.slot_exponents[0], budget).value;
            b.check(tag + "weak(z) <= |gamma| weak(x_k) weak(x_l), k=" + std::to_string(k), wz,
                    norm_gamma * wk * wl, relative_tol(wz), exact_if(term.certified));
        }
        const double expansion = lhs_sum / static_cast<double>(n1);
        b.check(tag + "lhs(gamma P) <= mean of re-blocked terms", sides_gp.lhs, expansion, relative_tol(expansion),
                Comparison::exact);
        const double bound = norm_gamma * best_ratio;
        b.check(tag + "ratio(gamma P) <= |gamma| max_k ratio(P)", sides_gp.ratio(), bound, relative_tol(bound),
                exact_if(certified));
        if (bound > 0) {
            worst2 = std::max(worst2, sides_gp.ratio() / bound);
        }
    }
    b.metric("max_ratio_over_bound_1", worst1).metric("max_ratio_over_bound_2", worst2);
    return b.build();
}

LawReport quotient_theorem(const MultilinearMap& a, const Functional& phi0, const Vector& y0, const Exponent& s,
                           const Exponent& q, const std::vector<Exponent>& ps,
                           const std::vector<VectorFamily>& families, const VectorFamily& phi_list,
                           const VectorFamily& test_family, const Budget& budget) {
    require_admissible(SummingParams::mixing(s, q, ps), a.arity());
    const SpaceSpec& f = a.codomain();
    if (!(phi0.space == f) || !(phi_list.space() == f.dual()) || !(test_family.space() == f)) {
        throw std::invalid_argument("quotient_theorem: phi0 must act on the codomain, the phi-list live in its dual");
    }
    LawReportBuilder b("quotient");
    b.instance("map", describe(a))
        .instance("u", "rank one into " + describe(y0.space))
        .instance("s", s.to_string())
        .instance("q", q.to_string());
    describe_budget(b, budget);

    const auto outputs = box_outputs(a, families);
    const auto primal = mixed_norm_primal(outputs, s, q, budget);
    const auto& fw = std::get<FactorizationWitness>(primal.witness);
    const Exponent r = mixed_complement(s, q);
    const double tau_norm = lp_norm(fw.taus, r);
    const auto wy = weak_norm(fw.ys, s, budget);
    const bool certified = wy.kind == EstimateKind::exact;

    // forward
    const double pi_s_u = dual_norm(phi0) * norm(y0);
    const double norm_y0 = norm(y0);
    std::vector<double> images(outputs.size());
    for (std::size_t j = 0; j < outputs.size(); ++j) {
        images[j] = std::abs(dot(phi0.coords, outputs.member(j))) * norm_y0;
    }
    const double lhs_fwd = lp_norm(images, q);
    const double bound_fwd = pi_s_u * tau_norm * wy.value;
    double weak_product = 1.0;
    for (std::size_t k = 0; k < families.size(); ++k) {
        weak_product *= weak_norm(families[k], ps[k], budget).value;
    }
    b.metric("pi_s_u", pi_s_u)
        .metric("lhs_forward", lhs_fwd)
        .metric("factorization_value", tau_norm * wy.value)
        .metric("ratio_u_after_a", weak_product > 0 ? lhs_fwd / weak_product : 0.0)
        .metric("weak_exact", certified ? 1.0 : 0.0);
    b.check("lhs(u o A) <= pi_s(u) |tau|_r |y|_{w,s}", lhs_fwd, bound_fwd, relative_tol(bound_fwd),
            exact_if(certified));

    // backward: S(y) = (φ_l(y))_l into ℓ_s^k.
    const double phi_s = strong_norm(phi_list, s).value;
    std::vector<double> inner(phi_list.size());
    std::vector<double> rows(test_family.size());
    for (std::size_t i = 0; i < test_family.size(); ++i) {
        for (std::size_t l = 0; l < inner.size(); ++l) {
            inner[l] = dot(phi_list.member(l), test_family.member(i));
        }
        rows[i] = lp_norm(inner, s);
    }
    const auto wz = weak_norm(test_family, s, budget);
    const double lhs_s = lp_norm(rows, s);
    const double ratio_s = wz.value > 0 ? lhs_s / wz.value : 0.0;
    b.metric("phi_s_norm", phi_s).metric("pi_s_witness_ratio", ratio_s);
    b.check("pi_s(S) witness ratio <= |phi|_s", ratio_s, phi_s, relative_tol(phi_s),
            exact_if(wz.kind == EstimateKind::exact));

    std::vector<double> terms(outputs.size());
    for (std::size_t j = 0; j < outputs.size(); ++j) {
        for (std::size_t l = 0; l < inner.size(); ++l) {
            inner[l] = dot(phi_list.member(l), outputs.member(j));
        }
        terms[j] = lp_norm(inner, s);
    }
    const double mixing_lhs = lp_norm(terms, q);
    const double bound_mixing = phi_s * tau_norm * wy.value;
    b.metric("mixing_lhs", mixing_lhs);
    b.check("mixing lhs <= |phi|_s |tau|_r |y|_{w,s}", mixing_lhs, bound_mixing, relative_tol(bound_mixing),
            exact_if(certified));
    b.witness("taus", fw.taus);
    return b.build();
}

LawReport triviality_law(const SummingParams& params, const MultilinearMap& t) {
    LawReportBuilder b("triviality");
    b.instance("map", describe(t)).instance("params", describe(params));
    const auto rep = check_triviality(params, t);
    b.instance("violated", rep.violated);
    b.metric("predicted_exponent", rep.predicted_exponent).metric("zero_map", rep.zero_map ? 1.0 : 0.0);
    if (rep.zero_map) {
        b.instance("note", "zero map: no divergence, it is the only member of the class");
        return b.build();
    }
    b.metric("measured_exponent", rep.measured_exponent);
    for (std::size_t i = 0; i < rep.lengths.size(); ++i) {
        b.metric("ratio_m" + std::to_string(rep.lengths[i]), rep.ratios[i]);
    }
    b.check("|measured - predicted| <= 2% of predicted", std::abs(rep.measured_exponent - rep.predicted_exponent),
            0.02 * rep.predicted_exponent, 0.0, Comparison::exact);
    b.witness("ratios", rep.ratios);
    return b.build();
}

LawReport inclusion_law(const MultilinearMap& t, const SummingParams& params_r, const Budget& budget) {
    const auto plain = drop_functionals(params_r);
    LawReportBuilder b("inclusion");
    b.instance("map", describe(t)).instance("params", describe(params_r));
    describe_budget(b, budget);
    const auto est_r = estimate_norm(t, params_r, budget);
    const auto est_plain = estimate_norm(t, plain, budget);
    const auto moved = inclusion_transport(t, params_r, std::get<SummingWitness>(est_r.witness), budget);
    b.metric("estimate_r", est_r.value).metric("estimate_plain", est_plain.value).metric("transported", moved.ratio);
    b.check("ratio_r(w) <= ratio(w without functionals)", est_r.value, moved.ratio, relative_tol(moved.ratio),
            exact_if(est_r.certified));
    b.check("estimate_r <= estimate without functionals", est_r.value, est_plain.value,
            relative_tol(est_plain.value), Comparison::empirical);
    return b.build();
}

LawReport endpoints_law(const VectorFamily& fam, const Exponent& q, const Exponent& s_mid, const Budget& budget) {
    LawReportBuilder b("endpoints");
    b.instance("space", describe(fam.space()))
        .instance("m", std::to_string(fam.size()))
        .instance("q", q.to_string())
        .instance("s", s_mid.to_string());
    describe_budget(b, budget);
    const auto weak = weak_norm(fam, q, budget);
    const auto strong = strong_norm(fam, q);
    const auto at_q = mixed_norm_primal(fam, q, q, budget);
    const auto at_inf = mixed_norm_primal(fam, Exponent::infinity(), q, budget);
    const auto primal = mixed_norm_primal(fam, s_mid, q, budget);
    const auto dual = mixed_norm_dual(fam, s_mid, q, budget);
    b.metric("weak", weak.value)
        .metric("strong", strong.value)
        .metric("mixed_qq", at_q.value)
        .metric("mixed_inf_q", at_inf.value)
        .metric("primal", primal.value)
        .metric("dual", dual.value);
    b.check("|mx(q,q) - weak|", std::abs(at_q.value - weak.value), 0.0, 1e-6, Comparison::exact);
    b.check("|mx(inf,q) - strong|", std::abs(at_inf.value - strong.value), 0.0, 1e-6, Comparison::exact);
    b.check("weak <= dual", weak.value, dual.value, 1e-9, Comparison::exact);
    b.check("dual <= primal", dual.value, primal.value, 1e-9, Comparison::sandwich);
    b.check("primal <= strong", primal.value, strong.value, 1e-9, Comparison::exact);
    return b.build();
}

} // namespace summa
