#include "summa/seqnorms.hpp"

#include "summa/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace summa {

namespace {

constexpr std::uint64_t kWeakStream = 0x77ea;
constexpr std::uint64_t kPrimalStream = 0x9a1;
constexpr std::uint64_t kPrimalInnerStream = 0x9a2;
constexpr int kInnerRestarts = 4;
constexpr int kInnerIters = 60;

void require_weak_exponent(const Exponent& p) {
    if (!p.is_infinite() && p.value() < 1.0) {
        throw std::domain_error("weak norm requires p >= 1, got " + p.to_string());
    }
}

bool is_one(const Exponent& e) { return !e.is_infinite() && e.value() == 1.0; }
bool is_two(const Exponent& e) { return !e.is_infinite() && e.value() == 2.0; }

std::vector<double> evaluations(const VectorFamily& fam, std::span<const double> phi) {
    std::vector<double> t(fam.size());
    for (std::size_t j = 0; j < t.size(); ++j) {
        t[j] = dot(fam.member(j), phi);
    }
    return t;
}

struct WeakOutcome {
    double value = 0.0;
    std::vector<double> phi;
};

std::vector<double> unit_first(std::size_t n) {
    std::vector<double> e(n, 0.0);
    e[0] = 1.0;
    return e;
}

std::vector<double> norming_coords(const SpaceSpec& space, std::span<const double> v) {
    return norming_functional(Vector(space, std::vector<double>(v.begin(), v.end()))).coords;
}

bool family_is_zero(const VectorFamily& fam) {
    return std::all_of(fam.data().begin(), fam.data().end(), [](double v) { return v == 0.0; });
}

/// Exhaustive or closed-form weak norm, if one applies.
std::optional<WeakOutcome> weak_exact(const VectorFamily& fam, const Exponent& p, std::size_t cap) {
    const SpaceSpec& space = fam.space();
    const std::size_t n = space.dim;
    const std::size_t m = fam.size();

    if (family_is_zero(fam)) {
        return WeakOutcome{0.0, unit_first(n)};
    }
    if (p.is_infinite() || m == 1) {
        double best = -1.0;
        std::size_t arg = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const double v = lp_norm(fam.member(j), space.exponent);
            if (v > best) {
                best = v;
                arg = j;
            }
        }
        auto phi = norming_coords(space, fam.member(arg));
        return WeakOutcome{weak_value_at(fam, p, phi), std::move(phi)};
    }
    if (space.exponent.is_infinite()) {
        // Dual ball is ℓ1: the maximum sits at some ±e_i.
        WeakOutcome best{-1.0, {}};
        std::vector<double> col(m);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                col[j] = fam.member(j)[i];
            }
            const double v = lp_norm(col, p);
            if (v > best.value) {
                best.value = v;
                best.phi.assign(n, 0.0);
                best.phi[i] = 1.0;
            }
        }
        return best;
    }
    if (auto verts = ball_vertices(space.dual(), true, cap)) {
        WeakOutcome best{-1.0, {}};
        for (auto& v : *verts) {
            const double val = weak_value_at(fam, p, v);
            if (val > best.value) {
                best.value = val;
                best.phi = std::move(v);
            }
        }
        return best;
    }
    if (is_two(space.exponent) && is_two(p)) {
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < m; ++j) {
            Eigen::Map<const Eigen::VectorXd> x(fam.member(j).data(), static_cast<Eigen::Index>(n));
            gram.noalias() += x * x.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
        const Eigen::VectorXd top = solver.eigenvectors().col(static_cast<Eigen::Index>(n) - 1);
        std::vector<double> phi(top.data(), top.data() + top.size());
        const double nrm = lp_norm(phi, Exponent(2.0));
        for (double& c : phi) {
            c /= nrm;
        }
        return WeakOutcome{weak_value_at(fam, p, phi), std::move(phi)};
    }
    if (is_one(p) && m <= cap) {
        // sup_φ Σ|φ(x_j)| = max over signs of ‖Σ ε_j x_j‖, with ε_0 fixed.
        std::vector<double> sum(fam.member(0).begin(), fam.member(0).end());
        std::vector<double> signs(m, 1.0);
        for (std::size_t j = 1; j < m; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                sum[i] += fam.member(j)[i];
            }
        }
        double best_norm = lp_norm(sum, space.exponent);
        std::vector<double> best_signs = signs;
        const std::uint64_t total = std::uint64_t{1} << (m - 1);
        for (std::uint64_t g = 1; g < total; ++g) {
            // Gray code: flip the sign of member (lowest set bit of g) + 1.
            const auto bit = static_cast<std::size_t>(std::countr_zero(g));
            const std::size_t j = bit + 1;
            signs[j] = -signs[j];
            for (std::size_t i = 0; i < n; ++i) {
                sum[i] += 2.0 * signs[j] * fam.member(j)[i];
            }
            const double v = lp_norm(sum, space.exponent);
            if (v > best_norm) {
                best_norm = v;
                best_signs = signs;
            }
        }
        std::vector<double> exact_sum(n, 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                exact_sum[i] += best_signs[j] * fam.member(j)[i];
            }
        }
        auto phi = norming_coords(space, exact_sum);
        return WeakOutcome{weak_value_at(fam, p, phi), std::move(phi)};
    }
    return std::nullopt;
}

/// One ascent run from `phi`: φ ← argmax_{B_{E*}} ⟨∇f(φ), ·⟩ with
/// f(φ) = Σ|φ(x_j)|^p. Each step does not decrease f by convexity.
WeakOutcome ascend(const VectorFamily& fam, const Exponent& p, std::vector<double> phi, int iters) {
    const Exponent dual = dual_exponent(fam.space().exponent);
    const double e = p.value();
    const std::size_t n = fam.dim();
    double val = weak_value_at(fam, p, phi);
    std::vector<double> g(n);
    for (int it = 0; it < iters; ++it) {
        const auto t = evaluations(fam, phi);
        std::fill(g.begin(), g.end(), 0.0);
        for (std::size_t j = 0; j < t.size(); ++j) {
            if (t[j] == 0.0) {
                continue;
            }
            const double w = std::copysign(e == 1.0 ? 1.0 : std::pow(std::abs(t[j]), e - 1.0), t[j]);
            const auto x = fam.member(j);
            for (std::size_t i = 0; i < n; ++i) {
                g[i] += w * x[i];
            }
        }
        auto next = ball_argmax(g, dual);
        if (std::all_of(next.begin(), next.end(), [](double c) { return c == 0.0; })) {
            break;
        }
        const double next_val = weak_value_at(fam, p, next);
        if (!(next_val > val * (1.0 + 1e-15))) {
            if (next_val > val) {
                val = next_val;
                phi = std::move(next);
            }
            break;
        }
        val = next_val;
        phi = std::move(next);
    }
    return WeakOutcome{val, std::move(phi)};
}

std::vector<double> random_dual_point(const SpaceSpec& space, CounterRng& rng) {
    const Exponent dual = dual_exponent(space.exponent);
    std::vector<double> c(space.dim);
    double nrm = 0.0;
    while (nrm == 0.0) {
        for (double& v : c) {
            v = rng.normal();
        }
        nrm = lp_norm(c, dual);
    }
    for (double& v : c) {
        v /= nrm;
    }
    return c;
}

WeakOutcome weak_ascent(const VectorFamily& fam, const Exponent& p, const Budget& budget,
                        std::span<const std::vector<double>> warm) {
    const SpaceSpec& space = fam.space();
    WeakOutcome best{-1.0, unit_first(space.dim)};
    auto consider = [&](std::vector<double> start) {
        auto r = ascend(fam, p, std::move(start), budget.iters);
        if (r.value > best.value) {
            best = std::move(r);
        }
    };
    for (const auto& w : warm) {
        if (w.size() == space.dim) {
            consider(w);
        }
    }
    for (std::size_t j = 0; j < fam.size(); ++j) {
        const auto x = fam.member(j);
        if (std::any_of(x.begin(), x.end(), [](double v) { return v != 0.0; })) {
            consider(norming_coords(space, x));
        }
    }
    for (int i = 0; i < budget.restarts; ++i) {
        CounterRng rng = CounterRng::stream(budget.seed, {kWeakStream, static_cast<std::uint64_t>(i)});
        consider(random_dual_point(space, rng));
    }
    if (best.value < 0.0) {
        best.value = weak_value_at(fam, p, best.phi);
    }
    return best;
}

WeakOutcome weak_solve(const VectorFamily& fam, const Exponent& p, const Budget& budget,
                       std::span<const std::vector<double>> warm, bool* exact) {
    require_weak_exponent(p);
    if (budget.weak_mode == WeakMode::automatic || family_is_zero(fam) || p.is_infinite()) {
        if (auto r = weak_exact(fam, p, budget.enum_cap)) {
            *exact = true;
            return *r;
        }
    }
    *exact = false;
    return weak_ascent(fam, p, budget, warm);
}

void require_mixed(const Exponent& s, const Exponent& q) {
    if (q.is_infinite()) {
        throw std::domain_error("mixed norm requires a finite q");
    }
    if (q.value() < 1.0) {
        throw std::domain_error("mixed norm requires q >= 1, got " + q.to_string());
    }
    if (q > s) {
        throw std::domain_error("mixed norm requires q <= s (violated: q > s)");
    }
}

double power_sum_norm(std::span<const double> v, const Exponent& r) { return lp_norm(v, r); }

/// Evaluates ‖τ‖_r W_s(x/τ) for the nonzero members, with τ = exp(θ)
/// normalized to ‖τ‖_r = 1.
class PrimalObjective {
public:
    PrimalObjective(const VectorFamily& nonzero, Exponent s, Exponent r, const Budget& budget)
        : fam_(nonzero), s_(s), r_(r), inner_(budget) {
        inner_.restarts = kInnerRestarts;
        inner_.iters = kInnerIters;
        inner_.seed = CounterRng::mix(budget.seed ^ kPrimalInnerStream);
    }

    std::vector<double> taus(std::span<const double> theta) const {
        const double top = *std::max_element(theta.begin(), theta.end());
        std::vector<double> tau(theta.size());
        for (std::size_t i = 0; i < tau.size(); ++i) {
            tau[i] = std::exp(theta[i] - top);
        }
        const double nrm = power_sum_norm(tau, r_);
        for (double& t : tau) {
            t /= nrm;
        }
        return tau;
    }

    VectorFamily scaled(std::span<const double> tau) const {
        VectorFamily y = fam_;
        for (std::size_t i = 0; i < tau.size(); ++i) {
            for (double& v : y.member(i)) {
                v /= tau[i];
            }
        }
        return y;
    }

    struct Eval {
        double value;
        std::vector<double> phi;
        std::vector<double> tau;
    };

    Eval operator()(std::span<const double> theta) {
        auto tau = taus(theta);
        const VectorFamily y = scaled(tau);
        bool exact = false;
        std::vector<std::vector<double>> warm;
        if (!last_phi_.empty()) {
            warm.push_back(last_phi_);
        }
        auto w = weak_solve(y, s_, inner_, warm, &exact);
        exact_ = exact_ && exact;
        last_phi_ = w.phi;
        return Eval{w.value, std::move(w.phi), std::move(tau)};
    }

    /// Re-solves the weak norm at ev.tau with the caller's full budget; the
    /// inner solver runs on a reduced one and may stop below the maximum.
    void refine(Eval& ev, const Budget& full) {
        bool exact = false;
        const std::vector<std::vector<double>> warm{ev.phi};
        auto w = weak_solve(scaled(ev.tau), s_, full, warm, &exact);
        if (w.value > ev.value) {
            ev.value = w.value;
            ev.phi = std::move(w.phi);
        }
        if (exact) {
            ev.value = w.value;
        }
    }

    /// Gradient of log F with respect to θ at an evaluated point.
    std::vector<double> gradient(const Eval& ev) const {
        const std::size_t k = ev.tau.size();
        std::vector<double> g(k, 0.0);
        if (r_.is_infinite()) {
            const double top = *std::max_element(ev.tau.begin(), ev.tau.end());
            std::size_t count = 0;
            for (double t : ev.tau) {
                count += (t >= top * (1.0 - 1e-12)) ? 1 : 0;
            }
            for (std::size_t i = 0; i < k; ++i) {
                if (ev.tau[i] >= top * (1.0 - 1e-12)) {
                    g[i] += 1.0 / static_cast<double>(count);
                }
            }
        } else {
            const double r = r_.value();
            double total = 0.0;
            for (double t : ev.tau) {
                total += std::pow(t, r);
            }
            for (std::size_t i = 0; i < k; ++i) {
                g[i] += std::pow(ev.tau[i], r) / total;
            }
        }
        std::vector<double> a(k);
        for (std::size_t i = 0; i < k; ++i) {
            a[i] = std::abs(dot(fam_.member(i), ev.phi)) / ev.tau[i];
        }
        if (s_.is_infinite()) {
            // W_∞ = max_i ‖y_i‖; its log-derivative is -1 on the maximizing member.
            std::size_t arg = 0;
            double top = -1.0;
            for (std::size_t i = 0; i < k; ++i) {
                const double v = lp_norm(fam_.member(i), fam_.space().exponent) / ev.tau[i];
                if (v > top) {
                    top = v;
                    arg = i;
                }
            }
            g[arg] -= 1.0;
        } else {
            const double s = s_.value();
            double total = 0.0;
            for (double& v : a) {
                v = std::pow(v, s);
                total += v;
            }
            if (total > 0.0) {
                for (std::size_t i = 0; i < k; ++i) {
                    g[i] -= a[i] / total;
                }
            }
        }
        return g;
    }

    bool exact() const { return exact_; }

private:
    const VectorFamily& fam_;
    Exponent s_;
    Exponent r_;
    Budget inner_;
    std::vector<double> last_phi_;
    bool exact_ = true;
};

PrimalObjective::Eval descend(PrimalObjective& f, std::vector<double> theta, int iters) {
    auto cur = f(theta);
    double step = 1.0;
    double delta = 0.5;
    for (int it = 0; it < iters; ++it) {
        const auto g = f.gradient(cur);
        double gmax = 0.0;
        for (double v : g) {
            gmax = std::max(gmax, std::abs(v));
        }
        bool improved = false;
        if (gmax > 1e-14) {
            for (double t = step; t > 1e-10; t *= 0.5) {
                std::vector<double> trial = theta;
                for (std::size_t i = 0; i < trial.size(); ++i) {
                    trial[i] -= t * g[i] / gmax;
                }
                auto ev = f(trial);
                if (ev.value < cur.value * (1.0 - 1e-15)) {
                    theta = std::move(trial);
                    cur = std::move(ev);
                    step = std::min(2.0 * t, 4.0);
                    improved = true;
                    break;
                }
            }
        }
        if (improved) {
            continue;
        }
        // Kinks stall the gradient step; fall back to a coordinate pattern search.
        while (!improved && delta > 1e-9) {
            for (std::size_t i = 0; i < theta.size() && !improved; ++i) {
                for (double dir : {1.0, -1.0}) {
                    std::vector<double> trial = theta;
                    trial[i] += dir * delta;
                    auto ev = f(trial);
                    if (ev.value < cur.value * (1.0 - 1e-15)) {
                        theta = std::move(trial);
                        cur = std::move(ev);
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) {
                delta *= 0.5;
            }
        }
        if (!improved) {
            break;
        }
    }
    return cur;
}

std::vector<std::size_t> nonzero_members(const VectorFamily& fam) {
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < fam.size(); ++j) {
        const auto x = fam.member(j);
        if (std::any_of(x.begin(), x.end(), [](double v) { return v != 0.0; })) {
            idx.push_back(j);
        }
    }
    return idx;
}

VectorFamily select_members(const VectorFamily& fam, const std::vector<std::size_t>& idx) {
    std::vector<double> data;
    data.reserve(idx.size() * fam.dim());
    for (auto j : idx) {
        const auto x = fam.member(j);
        data.insert(data.end(), x.begin(), x.end());
    }
    return VectorFamily(fam.space(), {idx.size()}, std::move(data));
}

/// Column Σ_k w_k B_kj of the Maurey functional.
std::vector<double> measure_column(const std::vector<std::vector<double>>& b, const std::vector<double>& w) {
    std::vector<double> a(b.empty() ? 0 : b[0].size(), 0.0);
    for (std::size_t k = 0; k < b.size(); ++k) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            a[j] += w[k] * b[k][j];
        }
    }
    return a;
}

double maurey_power(const std::vector<double>& a, double alpha) {
    double h = 0.0;
    for (double v : a) {
        if (v > 0.0) {
            h += std::pow(v, alpha);
        }
    }
    return h;
}

/// Euclidean projection onto the probability simplex.
std::vector<double> project_simplex(std::vector<double> v) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0;
    double theta = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        const double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) {
            theta = t;
        }
    }
    for (double& x : v) {
        x = std::max(0.0, x - theta);
    }
    return v;
}

/// Maximizes Σ_j (Σ_k w_k B_kj)^α over the simplex by projected gradient
/// ascent with backtracking; returns improved weights.
std::vector<double> optimize_weights(const std::vector<std::vector<double>>& b, std::vector<double> w, double alpha,
                                     int iters) {
    const std::size_t kk = b.size();
    if (kk == 1) {
        return {1.0};
    }
    auto a = measure_column(b, w);
    double h = maurey_power(a, alpha);
    double eta = -1.0;
    for (int it = 0; it < iters; ++it) {
        const double amax = *std::max_element(a.begin(), a.end());
        const double floor = amax * 1e-14;
        std::vector<double> grad(kk, 0.0);
        for (std::size_t k = 0; k < kk; ++k) {
            for (std::size_t j = 0; j < a.size(); ++j) {
                grad[k] += alpha * std::pow(std::max(a[j], floor), alpha - 1.0) * b[k][j];
            }
        }
        const double gmax = *std::max_element(grad.begin(), grad.end());
        if (!(gmax > 0.0)) {
            break;
        }
        if (eta < 0.0) {
            eta = 1.0 / gmax;
        }
        bool moved = false;
        for (int tries = 0; tries < 40; ++tries) {
            std::vector<double> trial(kk);
            for (std::size_t k = 0; k < kk; ++k) {
                trial[k] = w[k] + eta * grad[k];
            }
            trial = project_simplex(std::move(trial));
            auto ta = measure_column(b, trial);
            const double th = maurey_power(ta, alpha);
            if (th > h) {
                const bool tiny = th - h <= 1e-15 * h;
                w = std::move(trial);
                a = std::move(ta);
                h = th;
                eta *= 1.5;
                moved = !tiny;
                break;
            }
            eta *= 0.5;
        }
        if (!moved) {
            break;
        }
    }
    return w;
}

} // namespace

std::string to_string(EstimateKind k) {
    switch (k) {
    case EstimateKind::exact:
        return "exact";
    case EstimateKind::lower_bound:
        return "lower-bound";
    case EstimateKind::upper_bound:
        return "upper-bound";
    }
    return "exact";
}

double weak_value_at(const VectorFamily& fam, const Exponent& p, std::span<const double> phi) {
    if (phi.size() != fam.dim()) {
        throw std::invalid_argument("functional dimension does not match the family's space");
    }
    return lp_norm(evaluations(fam, phi), p);
}

NormEstimate strong_norm(const VectorFamily& fam, const Exponent& p) {
    std::vector<double> norms(fam.size());
    for (std::size_t j = 0; j < norms.size(); ++j) {
        norms[j] = lp_norm(fam.member(j), fam.space().exponent);
    }
    NormEstimate out;
    out.value = lp_norm(norms, p);
    out.kind = EstimateKind::exact;
    return out;
}

NormEstimate weak_norm(const VectorFamily& fam, const Exponent& p, const Budget& budget) {
    return weak_norm(fam, p, budget, {});
}

NormEstimate weak_norm(const VectorFamily& fam, const Exponent& p, const Budget& budget,
                       std::span<const std::vector<double>> warm_starts) {
    bool exact = false;
    auto r = weak_solve(fam, p, budget, warm_starts, &exact);
    NormEstimate out;
    out.value = r.value;
    out.kind = exact ? EstimateKind::exact : EstimateKind::lower_bound;
    out.witness = Functional(fam.space(), std::move(r.phi));
    out.budget = budget;
    return out;
}

Exponent mixed_complement(const Exponent& s, const Exponent& q) {
    const double inv = q.reciprocal() - s.reciprocal();
    if (inv < 0.0) {
        throw std::domain_error("mixed norm requires q <= s (violated: q > s)");
    }
    return Exponent::from_reciprocal(inv);
}

NormEstimate mixed_norm_primal(const VectorFamily& fam, const Exponent& s, const Exponent& q, const Budget& budget) {
    require_mixed(s, q);
    const Exponent r = mixed_complement(s, q);
    const auto idx = nonzero_members(fam);

    NormEstimate out;
    out.kind = EstimateKind::upper_bound;
    out.budget = budget;
    if (idx.empty()) {
        out.kind = EstimateKind::exact;
        out.value = 0.0;
        out.witness = FactorizationWitness{std::vector<double>(fam.size(), 0.0), VectorFamily::zeros(fam.space(), fam.shape())};
        return out;
    }
    const VectorFamily x = select_members(fam, idx);
    const std::size_t k = idx.size();
    PrimalObjective f(x, s, r, budget);

    std::vector<std::vector<double>> starts;
    starts.emplace_back(k, 0.0);
    if (!r.is_infinite()) {
        // τ_i = ‖x_i‖^{q/r}; this start alone already certifies value <= strong norm.
        const double ratio = q.value() / r.value();
        std::vector<double> th(k);
        for (std::size_t i = 0; i < k; ++i) {
            th[i] = ratio * std::log(lp_norm(x.member(i), x.space().exponent));
        }
        starts.push_back(std::move(th));
    }
    if (!s.is_infinite() && q < s && k > 1) {
        // Saddle point of Maurey's duality: τ_i ∝ a_i^{1/(r+s)}.
        const auto dual = mixed_norm_dual(x, s, q, budget);
        const auto& mu = std::get<DiscreteMeasure>(dual.witness);
        std::vector<double> a(k, 0.0);
        for (std::size_t at = 0; at < mu.atoms.size(); ++at) {
            for (std::size_t i = 0; i < k; ++i) {
                a[i] += mu.weights[at] * std::pow(std::abs(dot(mu.atoms[at].coords, x.member(i))), s.value());
            }
        }
        const double amax = *std::max_element(a.begin(), a.end());
        if (amax > 0.0) {
            std::vector<double> th(k);
            for (std::size_t i = 0; i < k; ++i) {
                th[i] = std::log(std::max(a[i], amax * 1e-24)) / (r.value() + s.value());
            }
            starts.push_back(std::move(th));
        }
    }
    const int random_starts = std::max(1, budget.restarts / 4);
    for (int i = 0; i < random_starts; ++i) {
        CounterRng rng = CounterRng::stream(budget.seed, {kPrimalStream, static_cast<std::uint64_t>(i)});
        std::vector<double> th(k);
        for (double& v : th) {
            v = rng.normal();
        }
        starts.push_back(std::move(th));
    }

    std::optional<PrimalObjective::Eval> best;
    for (const auto& st : starts) {
        auto ev = descend(f, st, budget.iters);
        if (!best || ev.value < best->value) {
            best = std::move(ev);
        }
    }

    f.refine(*best, budget);

    std::vector<double> taus(fam.size(), 0.0);
    VectorFamily ys = VectorFamily::zeros(fam.space(), fam.shape());
    for (std::size_t i = 0; i < k; ++i) {
        taus[idx[i]] = best->tau[i];
        auto src = fam.member(idx[i]);
        auto dst = ys.member(idx[i]);
        for (std::size_t c = 0; c < src.size(); ++c) {
            dst[c] = src[c] / best->tau[i];
        }
    }
    out.value = best->value;
    out.certified = f.exact();
    out.witness = FactorizationWitness{std::move(taus), std::move(ys)};
    return out;
}

double maurey_value(const VectorFamily& fam, const DiscreteMeasure& mu, const Exponent& s, const Exponent& q) {
    if (mu.atoms.size() != mu.weights.size()) {
        throw std::invalid_argument("measure has mismatched atoms and weights");
    }
    std::vector<double> outer(fam.size(), 0.0);
    for (std::size_t j = 0; j < fam.size(); ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < mu.atoms.size(); ++k) {
            acc += mu.weights[k] * std::pow(std::abs(dot(mu.atoms[k].coords, fam.member(j))), s.value());
        }
        outer[j] = std::pow(acc, 1.0 / s.value());
    }
    return lp_norm(outer, q);
}

NormEstimate mixed_norm_dual(const VectorFamily& fam, const Exponent& s, const Exponent& q, const Budget& budget) {
    require_mixed(s, q);
    if (s.is_infinite() || !(q < s)) {
        throw std::domain_error("Maurey dual requires q < s < inf");
    }
    const double sv = s.value();
    const double alpha = q.value() / sv;
    const std::size_t m = fam.size();
    const std::size_t cap = budget.atoms > 0 ? budget.atoms : m + 1;

    auto row_for = [&](std::span<const double> phi) {
        std::vector<double> row(m);
        for (std::size_t j = 0; j < m; ++j) {
            row[j] = std::pow(std::abs(dot(phi, fam.member(j))), sv);
        }
        return row;
    };

    // Point mass at the weak-q maximizer: its value is the weak q-norm.
    const auto weak = weak_norm(fam, q, budget);
    std::vector<std::vector<double>> atoms{std::get<Functional>(weak.witness).coords};
    std::vector<std::vector<double>> b{row_for(atoms[0])};
    std::vector<double> w{1.0};
    double h = maurey_power(measure_column(b, w), alpha);

    auto best_atoms = atoms;
    auto best_w = w;
    double best_h = h;

    Budget oracle = budget;
    oracle.restarts = std::max(1, budget.restarts / 2);
    const int outer = std::max(1, budget.iters / 2);
    for (int it = 0; it < outer; ++it) {
        const auto a = measure_column(b, w);
        const double amax = *std::max_element(a.begin(), a.end());
        std::vector<double> c(m, 1.0);
        if (amax > 0.0) {
            for (std::size_t j = 0; j < m; ++j) {
                c[j] = std::pow(std::max(a[j], amax * 1e-14), alpha - 1.0);
            }
        }
        // Linear oracle: argmax_φ Σ c_j |φ(x_j)|^s is a weak s-norm of (c_j^{1/s} x_j).
        VectorFamily weighted = fam;
        for (std::size_t j = 0; j < m; ++j) {
            const double f = std::pow(c[j], 1.0 / sv);
            for (double& v : weighted.member(j)) {
                v *= f;
            }
        }
        oracle.seed = CounterRng::mix(budget.seed + static_cast<std::uint64_t>(it));
        const auto orc = weak_norm(weighted, s, oracle, atoms);
        auto phi = std::get<Functional>(orc.witness).coords;
        auto row = row_for(phi);
        double lin_new = 0.0;
        double lin_cur = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            lin_new += c[j] * row[j];
            lin_cur += c[j] * a[j];
        }
        if (lin_new <= lin_cur * (1.0 + 1e-12)) {
            break;
        }
        if (std::find(atoms.begin(), atoms.end(), phi) != atoms.end()) {
            break;
        }
        atoms.push_back(std::move(phi));
        b.push_back(std::move(row));
        w.push_back(0.0);
        w = optimize_weights(b, std::move(w), alpha, 200);
        while (atoms.size() > cap) {
            const auto drop = static_cast<std::size_t>(std::min_element(w.begin(), w.end()) - w.begin());
            atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(drop));
            b.erase(b.begin() + static_cast<std::ptrdiff_t>(drop));
            w.erase(w.begin() + static_cast<std::ptrdiff_t>(drop));
            const double total = std::accumulate(w.begin(), w.end(), 0.0);
            if (total > 0.0) {
                for (double& v : w) {
                    v /= total;
                }
            } else {
                std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
            }
            w = optimize_weights(b, std::move(w), alpha, 200);
        }
        h = maurey_power(measure_column(b, w), alpha);
        if (h > best_h) {
            best_h = h;
            best_atoms = atoms;
            best_w = w;
        }
    }

    DiscreteMeasure mu;
    for (std::size_t k = 0; k < best_atoms.size(); ++k) {
        if (best_w[k] > 0.0) {
            mu.atoms.emplace_back(fam.space(), best_atoms[k]);
            mu.weights.push_back(best_w[k]);
        }
    }
    const double total = std::accumulate(mu.weights.begin(), mu.weights.end(), 0.0);
    for (double& v : mu.weights) {
        v /= total;
    }

    NormEstimate out;
    out.value = maurey_value(fam, mu, s, q);
    out.kind = EstimateKind::lower_bound;
    out.witness = std::move(mu);
    out.budget = budget;
    return out;
}

NormEstimate factorization_value(const FactorizationWitness& w, const Exponent& s, const Exponent& q,
                                 const Budget& budget) {
    if (w.taus.size() != w.ys.size()) {
        throw std::invalid_argument("factorization has mismatched taus and ys");
    }
    const Exponent r = mixed_complement(s, q);
    const auto weak = weak_norm(w.ys, s, budget);
    NormEstimate out;
    out.value = lp_norm(w.taus, r) * weak.value;
    out.kind = weak.kind;
    out.witness = w;
    out.budget = budget;
    return out;
}

double MixedBracket::relative_gap() const {
    if (upper.value <= 0.0) {
        return 0.0;
    }
    return (upper.value - lower.value) / upper.value;
}

MixedBracket mixed_norm(const VectorFamily& fam, const Exponent& s, const Exponent& q, const Budget& budget) {
    require_mixed(s, q);
    MixedBracket out;
    out.upper = mixed_norm_primal(fam, s, q, budget);
    if (s == q) {
        out.lower = weak_norm(fam, q, budget);
    } else if (s.is_infinite()) {
        out.lower = strong_norm(fam, q);
    } else {
        out.lower = mixed_norm_dual(fam, s, q, budget);
    }
    return out;
}

} // namespace summa
