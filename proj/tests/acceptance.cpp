// One line per acceptance criterion; exit status 1 if any fails.

#include "summa/batches.hpp"
#include "summa/corpus.hpp"
#include "summa/io.hpp"
#include "summa/rng.hpp"
#include "summa/seqnorms.hpp"
#include "summa/summing.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace summa;
using nlohmann::json;

namespace {

const Exponent kInf = Exponent::infinity();

struct Outcome {
    bool pass = false;
    std::string detail;
    json payload; // serialized results, compared across reruns
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

Exponent cycle_space_exponent(std::size_t i) {
    const double u[] = {1.0, 2.0, 0.0};
    return u[i % 3] == 0.0 ? kInf : Exponent(u[i % 3]);
}

/// N ≤ 5, m ≤ 5, spaces ℓ1/ℓ2/ℓ∞.
VectorFamily endpoint_family(std::size_t i) {
    const SpaceSpec space(cycle_space_exponent(i), 1 + i % 5);
    return gaussian_family(space, 1 + (i / 3) % 5, 1000 + i);
}

double strong_oracle(const VectorFamily& fam, double q) {
    double acc = 0.0;
    for (std::size_t i = 0; i < fam.size(); ++i) {
        double nrm = 0.0;
        const auto x = fam.member(i);
        if (fam.space().exponent.is_infinite()) {
            for (double v : x) {
                nrm = std::max(nrm, std::abs(v));
            }
        } else {
            const double u = fam.space().exponent.value();
            for (double v : x) {
                nrm += std::pow(std::abs(v), u);
            }
            nrm = std::pow(nrm, 1.0 / u);
        }
        acc += std::pow(nrm, q);
    }
    return std::pow(acc, 1.0 / q);
}

Outcome endpoints_isometry() {
    Outcome out;
    out.payload = json::array();
    double worst = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
        const auto fam = endpoint_family(i);
        for (double q : {1.0, 2.0}) {
            Budget b;
            b.seed = i;
            const double weak = weak_norm(fam, Exponent(q), b).value;
            const double mx_qq = mixed_norm_primal(fam, Exponent(q), Exponent(q), b).value;
            const double mx_inf = mixed_norm_primal(fam, kInf, Exponent(q), b).value;
            const double strong = strong_oracle(fam, q);
            worst = std::max({worst, std::abs(mx_qq - weak), std::abs(mx_inf - strong)});
            out.payload.push_back({weak, mx_qq, mx_inf, strong});
        }
    }
    out.pass = worst <= 1e-6;
    out.detail = "max deviation " + sci(worst);
    return out;
}

Outcome chain() {
    Outcome out;
    out.payload = json::array();
    std::size_t violations = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
        const auto fam = endpoint_family(i);
        for (double q : {1.0, 2.0}) {
            Budget b;
            b.seed = i;
            const Exponent s(2.0 * q);
            const double weak = weak_norm(fam, Exponent(q), b).value;
            const double dual = mixed_norm_dual(fam, s, Exponent(q), b).value;
            const double primal = mixed_norm_primal(fam, s, Exponent(q), b).value;
            const double strong = strong_oracle(fam, q);
            for (double slack : {dual - weak, primal - dual, strong - primal}) {
                worst = std::min(worst, slack);
                violations += slack < -1e-9 ? 1 : 0;
            }
            out.payload.push_back({weak, dual, primal, strong});
        }
    }
    out.pass = violations == 0;
    out.detail = std::to_string(violations) + " violations, min slack " + sci(worst);
    return out;
}

Outcome maurey() {
    BatchOptions o;
    o.count = 100;
    const auto res = run_batch("maurey", o);
    std::size_t within = 0, ordered = 0;
    for (const auto& r : res.reports) {
        within += r.metrics.at("gap") <= 0.05 ? 1 : 0;
        ordered += r.metrics.at("dual") <= r.metrics.at("primal") + 1e-9 ? 1 : 0;
    }
    Outcome out;
    out.pass = within >= 95 && ordered == res.reports.size();
    out.detail = std::to_string(within) + "/100 gaps within 5%, " + std::to_string(ordered) + "/100 dual <= primal";
    out.payload = to_json(res);
    return out;
}

/// ‖T‖ of a bilinear form on ℓ∞^N × ℓ∞^N: max over signs x of Σ_j |Σ_i T_ij x_i|.
double bilinear_sup_oracle(const MultilinearMap& t) {
    const std::size_t n = t.domain()[0].dim, m = t.domain()[1].dim;
    double best = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        double total = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double col = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                col += ((mask >> i) & 1 ? -1.0 : 1.0) * t.coeffs()[i * m + j];
            }
            total += std::abs(col);
        }
        best = std::max(best, total);
    }
    return best;
}

Outcome littlewood() {
    BatchOptions o;
    o.count = 200;
    o.dims = {2, 3, 4, 5, 6, 7, 8};
    o.exhaustive = true;
    const auto res = run_batch("littlewood43", o);

    // The library's enumeration against the oracle on the structured forms
    // and on fresh random forms of every size.
    double norm_dev = 0.0;
    for (std::size_t n : o.dims) {
        const SpaceSpec e(kInf, n);
        for (const auto& t : {identity_form(n), fourier_tensor(2, n), sign_tensor({e, e}, scalar_space(), 90 + n),
                              gaussian_tensor({e, e}, scalar_space(), 90 + n)}) {
            const double lhs_coeffs = [&] {
                double acc = 0.0;
                for (double c : t.coeffs()) {
                    acc += std::pow(std::abs(c), 4.0 / 3.0);
                }
                return std::pow(acc, 0.75);
            }();
            const auto rep = littlewood_43(t, true, o.budget);
            norm_dev = std::max(norm_dev, std::abs(rep.metrics.at("norm") - bilinear_sup_oracle(t)));
            norm_dev = std::max(norm_dev, std::abs(rep.metrics.at("lhs") - lhs_coeffs));
        }
    }
    std::size_t exceed = 0, structured_fail = 0;
    double max_ratio = 0.0;
    for (const auto& r : res.reports) {
        const double ratio = r.metrics.at("ratio");
        max_ratio = std::max(max_ratio, ratio);
        const bool over = ratio > std::numbers::sqrt2 + 1e-9;
        exceed += over ? 1 : 0;
        const auto& corpus = r.instance.at("corpus");
        if ((corpus == "identity" || corpus == "fourier") && (over || r.verdict != Verdict::pass)) {
            ++structured_fail;
        }
        if (over) {
            std::printf("    exceedance: %s ratio %.12f\n", r.instance.at("map").c_str(), ratio);
        }
    }
    Outcome out;
    out.pass = exceed == 0 && structured_fail == 0 && res.failed == 0 && res.inconclusive == 0 && norm_dev <= 1e-9;
    char buf[200];
    std::snprintf(buf, sizeof buf, "%zu forms, max ratio %.9f, %zu exceedances, oracle deviation %.2e",
                  res.reports.size(), max_ratio, exceed, norm_dev);
    out.detail = buf;
    out.payload = to_json(res);
    return out;
}

/// Points on the boundary of the unit ball of ℓ_v^N, N ∈ {2, 3}, about
/// `target` of them. Polytope grids contain every vertex.
std::vector<std::array<double, 3>> boundary_grid(const Exponent& v, std::size_t n, std::size_t target) {
    std::vector<std::array<double, 3>> pts;
    const auto lin = [](std::size_t k, std::size_t i) { return -1.0 + 2.0 * static_cast<double>(i) / k; };
    if (n == 2) {
        const std::size_t k = target / 4;
        for (std::size_t i = 0; i < k; ++i) {
            const double a = static_cast<double>(i) / k;
            if (v.is_infinite()) {
                const double tt = lin(k, i);
                pts.push_back({1.0, tt, 0});
                pts.push_back({-1.0, -tt, 0});
                pts.push_back({-tt, 1.0, 0});
                pts.push_back({tt, -1.0, 0});
            } else if (v.value() == 1.0) {
                pts.push_back({1.0 - a, a, 0});
                pts.push_back({-a, 1.0 - a, 0});
                pts.push_back({-(1.0 - a), -a, 0});
                pts.push_back({a, -(1.0 - a), 0});
            } else {
                for (std::size_t q = 0; q < 4; ++q) {
                    const double th = 2.0 * std::numbers::pi * (static_cast<double>(i) * 4 + q) / (4.0 * k);
                    pts.push_back({std::cos(th), std::sin(th), 0});
                }
            }
        }
        return pts;
    }
    if (v.is_infinite()) {
        const std::size_t k = static_cast<std::size_t>(std::sqrt(target / 6.0)) - 1;
        for (std::size_t axis = 0; axis < 3; ++axis) {
            for (double side : {-1.0, 1.0}) {
                for (std::size_t i = 0; i <= k; ++i) {
                    for (std::size_t j = 0; j <= k; ++j) {
                        std::array<double, 3> p{};
                        p[axis] = side;
                        p[(axis + 1) % 3] = lin(k, i);
                        p[(axis + 2) % 3] = lin(k, j);
                        pts.push_back(p);
                    }
                }
            }
        }
    } else if (v.value() == 1.0) {
        std::size_t k = 1;
        while ((k + 2) * (k + 3) / 2 * 8 <= target) {
            ++k;
        }
        for (int sx : {-1, 1}) {
            for (int sy : {-1, 1}) {
                for (int sz : {-1, 1}) {
                    for (std::size_t a = 0; a <= k; ++a) {
                        for (std::size_t b = 0; a + b <= k; ++b) {
                            const double x = static_cast<double>(a) / k, y = static_cast<double>(b) / k;
                            pts.push_back({sx * x, sy * y, sz * (1.0 - x - y)});
                        }
                    }
                }
            }
        }
    } else {
        // Fibonacci lattice on the sphere.
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (std::size_t i = 0; i < target; ++i) {
            const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / target;
            const double rho = std::sqrt(1.0 - z * z);
            pts.push_back({rho * std::cos(golden * i), rho * std::sin(golden * i), z});
        }
    }
    return pts;
}

double grid_weak_oracle(const VectorFamily& fam, double p) {
    const auto pts = boundary_grid(dual_exponent(fam.space().exponent), fam.dim(), 1'000'000);
    double best = 0.0;
    for (const auto& phi : pts) {
        double acc = 0.0;
        for (std::size_t j = 0; j < fam.size(); ++j) {
            double d = 0.0;
            for (std::size_t c = 0; c < fam.dim(); ++c) {
                d += phi[c] * fam.member(j)[c];
            }
            acc += std::pow(std::abs(d), p);
        }
        best = std::max(best, acc);
    }
    return std::pow(best, 1.0 / p);
}

Outcome weak_oracle() {
    Outcome out;
    out.payload = json::array();
    double worst = 0.0;
    const double ps[] = {1.0, 2.0, 4.0};
    for (std::size_t i = 0; i < 50; ++i) {
        const std::size_t n = 2 + i % 2;
        const double p = ps[(i / 2) % 3];
        const SpaceSpec space(cycle_space_exponent(i / 6), n);
        const auto fam = gaussian_family(space, 3 + i % 3, 5000 + i);
        Budget b;
        b.seed = i;
        b.weak_mode = WeakMode::ascent;
        const double ascent = weak_norm(fam, Exponent(p), b).value;
        const double grid = grid_weak_oracle(fam, p);
        worst = std::max(worst, std::abs(ascent - grid));
        out.payload.push_back({ascent, grid});
    }
    out.pass = worst <= 1e-3;
    out.detail = "max |ascent - grid| " + sci(worst);
    return out;
}

Outcome triviality() {
    BatchOptions o;
    o.count = 40;
    const auto res = run_batch("triviality", o);
    double worst = 0.0;
    std::size_t mismatched = 0;
    for (std::size_t i = 0; i < res.reports.size(); ++i) {
        const auto& r = res.reports[i];
        const double delta = i % 2 == 0 ? 0.1 : 0.25;
        // 1/p - 1/q - 1/r with p = 1 and q = r = 2/(1 - delta).
        const double oracle = 1.0 - 2.0 * (1.0 - delta) / 2.0;
        mismatched += std::abs(r.metrics.at("predicted_exponent") - oracle) > 1e-12 ? 1 : 0;
        worst = std::max(worst, std::abs(r.metrics.at("measured_exponent") - oracle) / oracle);
    }
    Outcome out;
    out.pass = worst <= 0.02 && mismatched == 0 && res.failed == 0;
    out.detail = "max relative exponent error " + sci(worst);
    out.payload = to_json(res);
    return out;
}

Outcome degeneration() {
    Outcome out;
    out.payload = json::array();
    double worst = 0.0;
    for (std::size_t i = 0; i < 50; ++i) {
        const std::size_t dim = 2 + i % 2;
        const auto t = gaussian_tensor({SpaceSpec(cycle_space_exponent(i), dim), SpaceSpec(cycle_space_exponent(i + 1), dim)},
                                       SpaceSpec(cycle_space_exponent(i + 2), dim), 7000 + i);
        const Exponent p(2.0);
        const std::vector<Exponent> qs{Exponent(1.0 + i % 2), Exponent(2.0)};
        Budget b;
        b.seed = i;
        b.restarts = 4;
        b.iters = 60;
        b.m_max = 2;
        const double with_r = estimate_norm(t, SummingParams::multiple_r(p, qs, kInf), b).value;
        const double plain = estimate_norm(t, SummingParams::multiple(p, qs), b).value;
        worst = std::max(worst, std::abs(with_r - plain) / std::max(1.0, plain));
        out.payload.push_back({with_r, plain});
    }
    out.pass = worst <= 1e-9;
    out.detail = "max relative difference " + sci(worst);
    return out;
}

Outcome coherence() {
    BatchOptions o;
    o.count = 100;
    const auto res = run_batch("coherence", o);
    Outcome out;
    out.pass = res.failed == 0 && res.inconclusive == 0 && res.summary.at("beta1") == 1.0 &&
               res.summary.at("beta2") == 1.0;
    out.detail = std::to_string(res.passed) + "/100 pass, beta1 = beta2 = 1";
    out.payload = to_json(res);
    return out;
}

Outcome quotient() {
    BatchOptions o;
    o.count = 50;
    const auto res = run_batch("quotient", o);
    double worst = 0.0;
    for (const auto& r : res.reports) {
        worst = std::max(worst, r.metrics.at("pi_s_witness_ratio"));
    }
    Outcome out;
    out.pass = res.failed == 0 && res.inconclusive == 0 && worst <= 1.0 + 1e-9;
    out.detail = std::to_string(res.passed) + "/50 pass, max S-witness ratio " + sci(worst);
    out.payload = to_json(res);
    return out;
}

struct Criterion {
    std::string name;
    double time_limit_s; // 0 means none
    std::function<Outcome()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"1 endpoint isometries", 60.0, endpoints_isometry},
        {"2 weak <= dual <= primal <= strong", 0.0, chain},
        {"3 maurey duality gap", 300.0, maurey},
        {"4 littlewood 4/3", 600.0, littlewood},
        {"5 weak norm vs grid oracle", 0.0, weak_oracle},
        {"6 triviality exponent", 0.0, triviality},
        {"7 r = inf degeneration", 0.0, degeneration},
        {"8 coherence transport", 0.0, coherence},
        {"9 quotient theorem", 0.0, quotient},
    };
    int failures = 0;
    std::vector<std::string> first_payloads;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        const Outcome o = c.run();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.time_limit_s == 0.0 || secs <= c.time_limit_s;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        std::printf("[%s] criterion %s: %s (%.1f s%s)\n", pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(),
                    secs, in_time ? "" : ", over time limit");
        std::fflush(stdout);
        first_payloads.push_back(o.payload.dump());
    }

    std::size_t differing = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (criteria[i].run().payload.dump() != first_payloads[i]) {
            ++differing;
            std::printf("    rerun differs: criterion %s\n", criteria[i].name.c_str());
        }
    }
    const bool deterministic = differing == 0;
    failures += deterministic ? 0 : 1;
    std::printf("[%s] criterion 10 determinism: %zu of %zu reruns byte-identical\n", deterministic ? "PASS" : "FAIL",
                criteria.size() - differing, criteria.size());
    return failures ? 1 : 0;
}
