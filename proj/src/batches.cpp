#include "summa/batches.hpp"

#include "summa/corpus.hpp"
#include "summa/rng.hpp"
#include "summa/seqnorms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace summa {

namespace {

constexpr std::uint64_t kBatchStream = 0xba7c;

const Exponent kInf = Exponent::infinity();

std::uint64_t instance_seed(std::uint64_t seed, std::size_t i) {
    return CounterRng::stream(seed, {kBatchStream, static_cast<std::uint64_t>(i)})();
}

Budget instance_budget(const BatchOptions& o, std::size_t i) {
    Budget b = o.budget;
    b.seed = instance_seed(o.seed, i) ^ 0x5eed;
    return b;
}

std::vector<std::size_t> dims_or(const BatchOptions& o, std::vector<std::size_t> fallback) {
    return o.dims.empty() ? fallback : o.dims;
}

Exponent cycle_exponent(std::size_t i) {
    switch (i % 3) {
    case 0:
        return Exponent(1.0);
    case 1:
        return Exponent(2.0);
    default:
        return kInf;
    }
}

void tally(BatchResult& out, LawReport rep) {
    switch (rep.verdict) {
    case Verdict::pass:
        ++out.passed;
        break;
    case Verdict::fail:
        ++out.failed;
        break;
    case Verdict::inconclusive:
        ++out.inconclusive;
        break;
    }
    out.reports.push_back(std::move(rep));
}

double metric_max(const BatchResult& r, const std::string& key) {
    double best = 0.0;
    for (const auto& rep : r.reports) {
        if (auto it = rep.metrics.find(key); it != rep.metrics.end()) {
            best = std::max(best, it->second);
        }
    }
    return best;
}

double fraction_at_most(const BatchResult& r, const std::string& key, double bound) {
    std::size_t hit = 0, seen = 0;
    for (const auto& rep : r.reports) {
        if (auto it = rep.metrics.find(key); it != rep.metrics.end()) {
            ++seen;
            hit += it->second <= bound ? 1 : 0;
        }
    }
    return seen ? static_cast<double>(hit) / static_cast<double>(seen) : 1.0;
}

void littlewood(const BatchOptions& o, BatchResult& out) {
    const auto dims = dims_or(o, {2, 3, 4, 5, 6, 7, 8});
    Budget budget = o.budget;
    if (o.exhaustive) {
        budget.enum_cap = std::max(budget.enum_cap, *std::max_element(dims.begin(), dims.end()));
    }
    for (std::size_t i = 0; i < o.count; ++i) {
        const std::size_t n = dims[i % dims.size()];
        const SpaceSpec e(kInf, n);
        const std::uint64_t seed = instance_seed(o.seed, i);
        const auto t = i % 2 == 0 ? sign_tensor({e, e}, scalar_space(), seed)
                                  : gaussian_tensor({e, e}, scalar_space(), seed);
        auto rep = littlewood_43(t, o.exhaustive, budget);
        rep.instance["corpus"] = i % 2 == 0 ? "sign" : "gaussian";
        tally(out, std::move(rep));
    }
    double structured = 0.0;
    for (std::size_t n : dims) {
        for (int which = 0; which < 2; ++which) {
            auto rep = littlewood_43(which == 0 ? identity_form(n) : fourier_tensor(2, n), o.exhaustive, budget);
            rep.instance["corpus"] = which == 0 ? "identity" : "fourier";
            structured = std::max(structured, rep.metrics.at("ratio"));
            tally(out, std::move(rep));
        }
    }
    std::size_t exceed = 0;
    for (const auto& rep : out.reports) {
        exceed += rep.metrics.at("ratio") > kLittlewoodConstant + 1e-9 ? 1 : 0;
    }
    out.summary["max_ratio"] = metric_max(out, "ratio");
    out.summary["structured_max_ratio"] = structured;
    out.summary["exceedances"] = static_cast<double>(exceed);
}

void bh(const BatchOptions& o, BatchResult& out) {
    const std::size_t n = o.arity.value_or(3);
    if (n < 2) {
        throw std::invalid_argument("bh needs arity >= 2");
    }
    const auto dims = dims_or(o, n == 2 ? std::vector<std::size_t>{2, 3, 4, 5, 6, 7, 8}
                                        : std::vector<std::size_t>{2, 3, 4, 5, 6});
    Budget budget = o.budget;
    budget.enum_cap = std::max(budget.enum_cap, *std::max_element(dims.begin(), dims.end()));
    for (std::size_t i = 0; i < o.count; ++i) {
        const std::size_t dim = dims[i % dims.size()];
        const SpaceSpec e(kInf, dim);
        const auto t = sign_tensor(std::vector<SpaceSpec>(n, e), scalar_space(), instance_seed(o.seed, i));
        tally(out, bohnenblust_hille(t, std::vector<VectorFamily>(n, basis_family(e)), budget));
    }
    std::vector<std::size_t> probe_dims;
    for (std::size_t d : dims) {
        if (d >= 3) {
            probe_dims.push_back(d);
        }
    }
    if (probe_dims.size() >= 2) {
        const double pbh = 2.0 * static_cast<double>(n) / static_cast<double>(n + 1);
        const double below = o.p ? o.p->value() : 0.5 * (1.0 + pbh);
        auto probe = bh_exponent_probe(n, probe_dims, below, budget);
        out.summary["probe_slope_at"] = probe.metrics.at("slope_at");
        out.summary["probe_slope_below"] = probe.metrics.at("slope_below");
        tally(out, std::move(probe));
    }
    out.summary["max_normalized_ratio"] = metric_max(out, "normalized_ratio");
}

void maurey(const BatchOptions& o, BatchResult& out) {
    const std::vector<std::pair<double, double>> pairs = {{2.0, 1.0}, {4.0, 2.0}, {3.0, 1.5}};
    for (std::size_t i = 0; i < o.count; ++i) {
        const std::size_t dim = 1 + i % 5;
        const std::size_t m = 1 + (i / 5) % 5;
        const SpaceSpec space(cycle_exponent(i / 25), dim);
        const auto fam = gaussian_family(space, m, instance_seed(o.seed, i));
        const Exponent s = o.s.value_or(Exponent(pairs[i % 3].first));
        const Exponent q = o.q.value_or(Exponent(pairs[i % 3].second));
        tally(out, maurey_duality(fam, s, q, instance_budget(o, i)));
    }
    out.summary["fraction_gap_within_5pct"] = fraction_at_most(out, "gap", 0.05);
    out.summary["max_gap"] = metric_max(out, "gap");
}

void mixing(const BatchOptions& o, BatchResult& out) {
    const std::size_t n = o.arity.value_or(2);
    const auto dims = dims_or(o, {2});
    const Exponent s = o.s.value_or(Exponent(2.0));
    const Exponent q = o.q.value_or(Exponent(1.0));
    const Exponent p = o.p.value_or(Exponent(1.0));
    for (std::size_t i = 0; i < o.count; ++i) {
        const std::size_t dim = dims[i % dims.size()];
        const SpaceSpec e(kInf, dim), f(Exponent(2.0), dim);
        const std::uint64_t seed = instance_seed(o.seed, i);
        const auto a = gaussian_tensor(std::vector<SpaceSpec>(n, e), f, seed);
        std::vector<VectorFamily> fams;
        for (std::size_t k = 0; k < n; ++k) {
            fams.push_back(gaussian_family(e, 3, seed + 1 + k));
        }
        tally(out, mixing_characterization(a, s, q, std::vector<Exponent>(n, p), fams, instance_budget(o, i)));
    }
    out.summary["fraction_gap_within_10pct"] = fraction_at_most(out, "gap", 0.10);
    out.summary["max_gap"] = metric_max(out, "gap");
}

void coherence(const BatchOptions& o, BatchResult& out) {
    const auto dims = dims_or(o, {2, 3});
    const Exponent p = o.p.value_or(Exponent(2.0));
    const Exponent q = o.q.value_or(Exponent(2.0));
    const Exponent r = o.r.value_or(Exponent(2.0));
    for (std::size_t i = 0; i < o.count; ++i) {
        const std::size_t n = o.arity.value_or(2 + i % 2);
        const std::size_t dim = dims[(i / 2) % dims.size()];
        const SpaceSpec e(i % 4 < 2 ? kInf : Exponent(1.0), dim);
        const std::uint64_t seed = instance_seed(o.seed, i);
        const HomogeneousPolynomial poly(gaussian_tensor(std::vector<SpaceSpec>(n, e), scalar_space(), seed));
        auto rng = CounterRng::stream(seed, {0xa9});
        std::vector<double> a(dim), g(dim);
        for (std::size_t c = 0; c < dim; ++c) {
            a[c] = rng.normal();
            g[c] = rng.normal();
        }
        const auto params = SummingParams::multiple_r(p, std::vector<Exponent>(n, q), r);
        tally(out, coherence_compatibility(poly, params, Vector(e, a), Functional(e, g), 2, 2, instance_budget(o, i)));
    }
    out.summary["beta1"] = 1.0;
    out.summary["beta2"] = 1.0;
    out.summary["max_ratio_over_bound_1"] = metric_max(out, "max_ratio_over_bound_1");
    out.summary["max_ratio_over_bound_2"] = metric_max(out, "max_ratio_over_bound_2");
}

void quotient(const BatchOptions& o, BatchResult& out) {
    const std::size_t n = o.arity.value_or(2);
    const auto dims = dims_or(o, {2});
    const Exponent s = o.s.value_or(Exponent(2.0));
    const Exponent q = o.q.value_or(Exponent(1.0));
    const Exponent p = o.p.value_or(Exponent(1.0));
    for (std::size_t i = 0; i < o.count; ++i) {
        const std::size_t dim = dims[i % dims.size()];
        const SpaceSpec e(kInf, dim), f(Exponent(2.0), dim);
        const std::uint64_t seed = instance_seed(o.seed, i);
        const auto a = gaussian_tensor(std::vector<SpaceSpec>(n, e), f, seed);
        auto rng = CounterRng::stream(seed, {0xb1});
        std::vector<double> phi0(dim), y0(dim);
        for (std::size_t c = 0; c < dim; ++c) {
            phi0[c] = rng.normal();
            y0[c] = rng.normal();
        }
        std::vector<VectorFamily> fams;
        for (std::size_t k = 0; k < n; ++k) {
            fams.push_back(gaussian_family(e, 2, seed + 1 + k));
        }
        auto phis = gaussian_family(f.dual(), 3, seed + 11);
        phis = phis.scaled(1.0 / strong_norm(phis, s).value);
        tally(out, quotient_theorem(a, Functional(f, phi0), Vector(f, y0), s, q, std::vector<Exponent>(n, p), fams,
                                    phis, gaussian_family(f, 4, seed + 12), instance_budget(o, i)));
    }
    out.summary["max_pi_s_witness_ratio"] = metric_max(out, "pi_s_witness_ratio");
}

void triviality(const BatchOptions& o, BatchResult& out) {
    const bool given = o.p && o.q && o.r;
    if (!given && (o.p || o.q || o.r)) {
        throw std::invalid_argument("triviality needs all of --p, --q, --r or none");
    }
    const auto dims = dims_or(o, {2, 3});
    for (std::size_t i = 0; i < o.count; ++i) {
        Exponent p(1.0), q(1.0), r(1.0);
        if (given) {
            p = *o.p;
            q = *o.q;
            r = *o.r;
        } else {
            const double delta = i % 2 == 0 ? 0.1 : 0.25;
            q = Exponent(2.0 / (1.0 - delta));
            r = q;
        }
        const std::size_t dim = dims[(i / 2) % dims.size()];
        const SpaceSpec s(Exponent(2.0), dim);
        const std::uint64_t seed = instance_seed(o.seed, i);
        LawReport rep;
        if ((i / 2) % 2 == 0) {
            const auto t = i < 2 ? identity_map(s, s) : gaussian_tensor({s}, s, seed);
            rep = triviality_law(SummingParams::as_linear_pqr(p, q, r), t);
        } else {
            const auto t = gaussian_tensor({s, s}, SpaceSpec(Exponent(1.0), dim), seed);
            rep = triviality_law(SummingParams::multiple_r(p, {q, q}, r), t);
        }
        tally(out, std::move(rep));
    }
    double worst = 0.0;
    for (const auto& rep : out.reports) {
        if (rep.metrics.count("measured_exponent")) {
            const double pred = rep.metrics.at("predicted_exponent");
            worst = std::max(worst, std::abs(rep.metrics.at("measured_exponent") - pred) / pred);
        }
    }
    out.summary["max_relative_exponent_error"] = worst;
}

void inclusion(const BatchOptions& o, BatchResult& out) {
    const auto dims = dims_or(o, {2});
    const Exponent p = o.p.value_or(Exponent(2.0));
    const Exponent q = o.q.value_or(Exponent(2.0));
    const Exponent r = o.r.value_or(Exponent(2.0));
    for (std::size_t i = 0; i < o.count; ++i) {
        const std::size_t dim = dims[i % dims.size()];
        const auto t = gaussian_tensor({SpaceSpec(cycle_exponent(i), dim), SpaceSpec(cycle_exponent(i + 1), dim)},
                                       SpaceSpec(cycle_exponent(i + 2), dim), instance_seed(o.seed, i));
        tally(out, inclusion_law(t, SummingParams::multiple_r(p, {q, q}, r), instance_budget(o, i)));
    }
}

void endpoints(const BatchOptions& o, BatchResult& out) {
    for (std::size_t i = 0; i < o.count; ++i) {
        const std::size_t dim = 1 + i % 5;
        const std::size_t m = 1 + (i / 5) % 5;
        const SpaceSpec space(cycle_exponent(i / 25), dim);
        const Exponent q = o.q.value_or(Exponent(i % 2 == 0 ? 1.0 : 2.0));
        const Exponent s = o.s.value_or(Exponent(2.0 * q.value()));
        tally(out, endpoints_law(gaussian_family(space, m, instance_seed(o.seed, i)), q, s, instance_budget(o, i)));
    }
}

} // namespace

const std::vector<std::string>& law_ids() {
    static const std::vector<std::string> ids = {"littlewood43", "bh",         "maurey",
                                                 "mixing",       "coherence",  "quotient",
                                                 "triviality",   "inclusion",  "endpoints"};
    return ids;
}

BatchResult run_batch(const std::string& law_id, const BatchOptions& options) {
    static const std::map<std::string, std::function<void(const BatchOptions&, BatchResult&)>> runners = {
        {"littlewood43", littlewood}, {"bh", bh},
        {"maurey", maurey},           {"mixing", mixing},
        {"coherence", coherence},     {"quotient", quotient},
        {"triviality", triviality},   {"inclusion", inclusion},
        {"endpoints", endpoints},
    };
    const auto it = runners.find(law_id);
    if (it == runners.end()) {
        throw std::invalid_argument("unknown law id '" + law_id + "'");
    }
    BatchResult out;
    out.law_id = law_id;
    it->second(options, out);
    out.verdict = out.failed ? Verdict::fail : out.inconclusive ? Verdict::inconclusive : Verdict::pass;
    out.summary["passed"] = static_cast<double>(out.passed);
    out.summary["failed"] = static_cast<double>(out.failed);
    out.summary["inconclusive"] = static_cast<double>(out.inconclusive);
    return out;
}

} // namespace summa
