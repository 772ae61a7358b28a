#include "summa/summing.hpp"

#include "summa/rng.hpp"
#include "summa/seqnorms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace summa {

namespace {

constexpr std::uint64_t kSummingStream = 0x5011;
constexpr std::uint64_t kListStream = 0x1157;
constexpr double kSlack = 1e-12;

enum class PhiMode { none, per_index, list };

PhiMode phi_mode(SummingKind k) {
    switch (k) {
    case SummingKind::as_linear_pqr:
    case SummingKind::as_multi_r:
    case SummingKind::multiple_r:
        return PhiMode::per_index;
    case SummingKind::mixing_multi:
        return PhiMode::list;
    default:
        return PhiMode::none;
    }
}

/// Index tuples J = (j_1,…,j_n) in the order the left-hand side sums over:
/// the diagonal (j,…,j) or the full box, row-major.
std::vector<std::vector<std::size_t>> index_tuples(bool box, const std::vector<std::size_t>& lengths) {
    std::vector<std::vector<std::size_t>> out;
    const std::size_t n = lengths.size();
    if (!box) {
        for (std::size_t j = 0; j < lengths.front(); ++j) {
            out.emplace_back(n, j);
        }
        return out;
    }
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        out.push_back(idx);
        std::size_t k = n;
        while (k-- > 0) {
            if (++idx[k] < lengths[k]) {
                break;
            }
            idx[k] = 0;
        }
        if (k == static_cast<std::size_t>(-1)) {
            break;
        }
    }
    return out;
}

std::vector<std::size_t> family_lengths(const std::vector<VectorFamily>& xs) {
    std::vector<std::size_t> out;
    for (const auto& f : xs) {
        out.push_back(f.size());
    }
    return out;
}

/// T(x_J) for every index tuple.
std::vector<std::vector<double>> outputs(const MultilinearMap& t, const std::vector<VectorFamily>& xs,
                                         const std::vector<std::vector<std::size_t>>& tuples) {
    std::vector<std::vector<double>> y;
    y.reserve(tuples.size());
    std::vector<std::span<const double>> args(xs.size());
    for (const auto& j : tuples) {
        for (std::size_t k = 0; k < xs.size(); ++k) {
            args[k] = xs[k].member(j[k]);
        }
        y.push_back(evaluate_coords(t, args));
    }
    return y;
}

double left_side(const SummingParams& params, PhiMode mode, const SpaceSpec& codomain,
                 const std::vector<std::vector<double>>& y, const VectorFamily* phis) {
    std::vector<double> terms(y.size());
    switch (mode) {
    case PhiMode::none:
        for (std::size_t j = 0; j < y.size(); ++j) {
            terms[j] = lp_norm(y[j], codomain.exponent);
        }
        break;
    case PhiMode::per_index:
        for (std::size_t j = 0; j < y.size(); ++j) {
            terms[j] = std::abs(dot(phis->member(j), y[j]));
        }
        break;
    case PhiMode::list: {
        std::vector<double> inner(phis->size());
        for (std::size_t j = 0; j < y.size(); ++j) {
            for (std::size_t l = 0; l < inner.size(); ++l) {
                inner[l] = dot(phis->member(l), y[j]);
            }
            terms[j] = lp_norm(inner, *params.mixing_exponent);
        }
        break;
    }
    }
    return lp_norm(terms, params.sum_exponent);
}

double phi_factor(const SummingParams& params, PhiMode mode, const VectorFamily& phis, const Budget& budget,
                  bool* certified) {
    if (mode == PhiMode::per_index) {
        const auto w = weak_norm(phis, *params.functional_exponent, budget);
        *certified = *certified && w.kind == EstimateKind::exact;
        return w.value;
    }
    return strong_norm(phis, *params.mixing_exponent).value;
}

void validate_shapes(const MultilinearMap& t, const SummingParams& params, const std::vector<VectorFamily>& xs,
                     const std::optional<VectorFamily>& phis) {
    const std::size_t n = t.arity();
    if (xs.size() != n) {
        throw std::invalid_argument("need one x-family per slot: expected " + std::to_string(n) + ", got " +
                                    std::to_string(xs.size()));
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (!(xs[k].space() == t.domain()[k])) {
            throw std::invalid_argument("x-family " + std::to_string(k) + " does not live in the slot's space");
        }
    }
    const auto lengths = family_lengths(xs);
    const bool box = is_box_kind(params.kind);
    if (!box && std::adjacent_find(lengths.begin(), lengths.end(), std::not_equal_to<>()) != lengths.end()) {
        throw std::invalid_argument("diagonal kinds need x-families of equal length");
    }
    const PhiMode mode = phi_mode(params.kind);
    if (mode == PhiMode::none) {
        if (phis) {
            throw std::invalid_argument(to_string(params.kind) + " takes no functionals");
        }
        return;
    }
    if (!phis) {
        throw std::invalid_argument(to_string(params.kind) + " needs functionals");
    }
    if (!(phis->space() == t.codomain().dual())) {
        throw std::invalid_argument("functionals must live in the dual of the codomain");
    }
    if (mode == PhiMode::per_index) {
        const std::size_t expect = box ? box_volume(lengths) : lengths.front();
        if (phis->size() != expect) {
            throw std::invalid_argument("expected " + std::to_string(expect) + " functionals, got " +
                                        std::to_string(phis->size()));
        }
    }
}

std::vector<double> norming_of(std::span<const double> y, const SpaceSpec& codomain) {
    auto phi = ball_argmax(y, dual_exponent(codomain.exponent));
    if (std::all_of(phi.begin(), phi.end(), [](double v) { return v == 0.0; })) {
        phi[0] = 1.0;
    }
    return phi;
}

/// A weak-norm ball whose unit sphere splits into one ℓ_q ball per
/// coordinate (the space's dual ball is the convex hull of ±e_i).
bool coordinate_separable(const SpaceSpec& s) { return s.exponent.is_infinite() || s.dim == 1; }

/// argmax of ⟨G, Z⟩ over families Z with weak_q(Z) ≤ 1 in a separable space.
void separable_linear_max(VectorFamily& z, const VectorFamily& g, const Exponent& q) {
    const std::size_t m = z.size();
    const std::size_t n = z.dim();
    std::vector<double> col(m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            col[j] = g.member(j)[i];
        }
        const auto best = ball_argmax(col, q);
        for (std::size_t j = 0; j < m; ++j) {
            z.member(j)[i] = best[j];
        }
    }
}

/// argmax of Σ_l ⟨G_l, φ_l⟩ over lists with ‖(‖φ_l‖)‖_s ≤ 1.
void list_linear_max(VectorFamily& phis, const VectorFamily& g, const Exponent& s, const SpaceSpec& codomain) {
    const std::size_t k = phis.size();
    std::vector<double> mags(k);
    for (std::size_t l = 0; l < k; ++l) {
        mags[l] = lp_norm(g.member(l), codomain.exponent);
    }
    const auto c = ball_argmax(mags, s);
    for (std::size_t l = 0; l < k; ++l) {
        const auto dir = ball_argmax(g.member(l), dual_exponent(codomain.exponent));
        auto dst = phis.member(l);
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] = c[l] * dir[i];
        }
    }
}

double signed_power(double t, double e) {
    if (t == 0.0) {
        return 0.0;
    }
    return std::copysign(e == 1.0 ? 1.0 : std::pow(std::abs(t), e - 1.0), t);
}

/// Gradient of log ‖Z‖_{w,q} with respect to Z, from the maximizing
/// functional (envelope theorem).
VectorFamily weak_log_gradient(const VectorFamily& z, const Exponent& q, const std::vector<double>& psi, double weak) {
    VectorFamily g = VectorFamily::zeros(z.space(), z.shape());
    if (weak <= 0.0) {
        return g;
    }
    if (q.is_infinite()) {
        std::size_t arg = 0;
        double top = -1.0;
        for (std::size_t j = 0; j < z.size(); ++j) {
            const double v = lp_norm(z.member(j), z.space().exponent);
            if (v > top) {
                top = v;
                arg = j;
            }
        }
        const auto nf = ball_argmax(z.member(arg), dual_exponent(z.space().exponent));
        for (std::size_t i = 0; i < nf.size(); ++i) {
            g.member(arg)[i] = nf[i] / top;
        }
        return g;
    }
    const double e = q.value();
    const double denom = std::pow(weak, e);
    for (std::size_t j = 0; j < z.size(); ++j) {
        const double t = dot(psi, z.member(j));
        const double w = signed_power(t, e);
        for (std::size_t i = 0; i < z.dim(); ++i) {
            g.member(j)[i] = w * psi[i] / denom;
        }
    }
    return g;
}

/// Alternating block ascent on LHS / RHS for one family length.
class BlockAscent {
public:
    BlockAscent(const MultilinearMap& t, const SummingParams& params, PhiMode mode, std::vector<std::size_t> lengths,
                const Budget& inner)
        : t_(t), params_(params), mode_(mode), lengths_(std::move(lengths)), inner_(inner),
          tuples_(index_tuples(is_box_kind(params.kind), lengths_)) {}

    std::vector<VectorFamily> xs;
    std::optional<VectorFamily> phis;

    struct Value {
        double ratio = 0.0;
        double lhs = 0.0;
        std::vector<double> weak;
        std::vector<std::vector<double>> psi;
        double phi_weak = 1.0;
        std::vector<double> phi_psi;
    };

    Value evaluate_now() {
        Value v;
        const auto y = outputs(t_, xs, tuples_);
        v.lhs = left_side(params_, mode_, t_.codomain(), y, phis ? &*phis : nullptr);
        double rhs = 1.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            std::vector<std::vector<double>> warm;
            if (k < warm_.size() && !warm_[k].empty()) {
                warm.push_back(warm_[k]);
            }
            const auto w = weak_norm(xs[k], params_.slot_exponents[k], inner_, warm);
            v.weak.push_back(w.value);
            v.psi.push_back(std::get<Functional>(w.witness).coords);
            rhs *= w.value;
        }
        warm_ = v.psi;
        if (mode_ == PhiMode::per_index) {
            const auto w = weak_norm(*phis, *params_.functional_exponent, inner_);
            v.phi_weak = w.value;
            v.phi_psi = std::get<Functional>(w.witness).coords;
            rhs *= w.value;
        } else if (mode_ == PhiMode::list) {
            v.phi_weak = strong_norm(*phis, *params_.mixing_exponent).value;
            rhs *= v.phi_weak;
        }
        v.ratio = rhs > 0.0 ? v.lhs / rhs : 0.0;
        return v;
    }

    /// ∂(LHS^e)/∂y_J, up to the constant factor e.
    std::vector<std::vector<double>> output_gradients(const std::vector<std::vector<double>>& y) const {
        const double e = params_.sum_exponent.value();
        std::vector<std::vector<double>> g(y.size());
        for (std::size_t j = 0; j < y.size(); ++j) {
            const std::size_t nf = y[j].size();
            g[j].assign(nf, 0.0);
            if (mode_ == PhiMode::none) {
                const double nrm = lp_norm(y[j], t_.codomain().exponent);
                if (nrm == 0.0) {
                    continue;
                }
                const auto nu = ball_argmax(y[j], dual_exponent(t_.codomain().exponent));
                const double scale = e == 1.0 ? 1.0 : std::pow(nrm, e - 1.0);
                for (std::size_t i = 0; i < nf; ++i) {
                    g[j][i] = scale * nu[i];
                }
            } else if (mode_ == PhiMode::per_index) {
                const auto phi = phis->member(j);
                const double w = signed_power(dot(phi, y[j]), e);
                for (std::size_t i = 0; i < nf; ++i) {
                    g[j][i] = w * phi[i];
                }
            } else {
                const double s = params_.mixing_exponent->value();
                std::vector<double> tl(phis->size());
                double sum = 0.0;
                for (std::size_t l = 0; l < tl.size(); ++l) {
                    tl[l] = dot(phis->member(l), y[j]);
                    sum += std::pow(std::abs(tl[l]), s);
                }
                if (sum == 0.0) {
                    continue;
                }
                const double a = std::pow(sum, e / s - 1.0);
                for (std::size_t l = 0; l < tl.size(); ++l) {
                    const double w = a * signed_power(tl[l], s);
                    const auto phi = phis->member(l);
                    for (std::size_t i = 0; i < nf; ++i) {
                        g[j][i] += w * phi[i];
                    }
                }
            }
        }
        return g;
    }

    /// ∂(LHS^e)/∂x^{(k)}, up to the factor e.
    VectorFamily slot_gradient(std::size_t k, const std::vector<std::vector<double>>& dy) const {
        VectorFamily g = VectorFamily::zeros(xs[k].space(), xs[k].shape());
        const std::size_t nf = t_.codomain().dim;
        const std::size_t nk = xs[k].dim();
        std::vector<std::span<const double>> args(xs.size());
        for (std::size_t j = 0; j < tuples_.size(); ++j) {
            for (std::size_t l = 0; l < xs.size(); ++l) {
                args[l] = xs[l].member(tuples_[j][l]);
            }
            const auto m = contract_except(t_, args, k);
            auto dst = g.member(tuples_[j][k]);
            for (std::size_t i = 0; i < nk; ++i) {
                double acc = 0.0;
                for (std::size_t f = 0; f < nf; ++f) {
                    acc += m[i * nf + f] * dy[j][f];
                }
                dst[i] += acc;
            }
        }
        return g;
    }

    /// ∂(LHS^e)/∂φ, up to the factor e.
    VectorFamily phi_gradient(const std::vector<std::vector<double>>& y) const {
        VectorFamily g = VectorFamily::zeros(phis->space(), phis->shape());
        const double e = params_.sum_exponent.value();
        if (mode_ == PhiMode::per_index) {
            for (std::size_t j = 0; j < y.size(); ++j) {
                const double w = signed_power(dot(phis->member(j), y[j]), e);
                for (std::size_t i = 0; i < y[j].size(); ++i) {
                    g.member(j)[i] = w * y[j][i];
                }
            }
            return g;
        }
        const double s = params_.mixing_exponent->value();
        std::vector<double> tl(phis->size());
        for (const auto& yj : y) {
            double sum = 0.0;
            for (std::size_t l = 0; l < tl.size(); ++l) {
                tl[l] = dot(phis->member(l), yj);
                sum += std::pow(std::abs(tl[l]), s);
            }
            if (sum == 0.0) {
                continue;
            }
            const double a = std::pow(sum, e / s - 1.0);
            for (std::size_t l = 0; l < tl.size(); ++l) {
                const double w = a * signed_power(tl[l], s);
                for (std::size_t i = 0; i < yj.size(); ++i) {
                    g.member(l)[i] += w * yj[i];
                }
            }
        }
        return g;
    }

    void normalize_slot(std::size_t k, double weak) {
        if (weak > 0.0) {
            xs[k] = xs[k].scaled(1.0 / weak);
        }
    }

    void normalize_phis(double factor) {
        if (factor > 0.0) {
            *phis = phis->scaled(1.0 / factor);
        }
    }

    /// Gradient step on log ratio for one block, with backtracking.
    /// `block` is a slot index, or xs.size() for the functionals.
    bool gradient_step(std::size_t block, Value& cur) {
        const bool is_phi = block == xs.size();
        const auto y = outputs(t_, xs, tuples_);
        const double lhs_pow = std::pow(cur.lhs, params_.sum_exponent.value());
        if (!(lhs_pow > 0.0)) {
            return false;
        }
        VectorFamily grad = is_phi ? phi_gradient(y) : slot_gradient(block, output_gradients(y));
        grad = grad.scaled(1.0 / lhs_pow);
        VectorFamily& z = is_phi ? *phis : xs[block];
        VectorFamily wg = is_phi ? weak_log_gradient(z, *params_.functional_exponent, cur.phi_psi, cur.phi_weak)
                                 : weak_log_gradient(z, params_.slot_exponents[block], cur.psi[block], cur.weak[block]);
        double gn = 0.0, zn = 0.0;
        for (std::size_t i = 0; i < grad.data().size(); ++i) {
            grad.data()[i] -= wg.data()[i];
            gn += grad.data()[i] * grad.data()[i];
            zn += z.data()[i] * z.data()[i];
        }
        if (!(gn > 0.0) || !(zn > 0.0)) {
            return false;
        }
        const VectorFamily saved = z;
        double step = 0.5 * std::sqrt(zn / gn);
        for (int tries = 0; tries < 30; ++tries, step *= 0.5) {
            for (std::size_t i = 0; i < z.data().size(); ++i) {
                z.data()[i] = saved.data()[i] + step * grad.data()[i];
            }
            auto next = evaluate_now();
            if (next.ratio > cur.ratio * (1.0 + 1e-15)) {
                cur = std::move(next);
                return true;
            }
        }
        z = saved;
        return false;
    }

    /// Conditional-gradient step over the block's unit ball; used where the
    /// linear maximization is available in closed form.
    bool linear_max_step(std::size_t block, Value& cur) {
        const bool is_phi = block == xs.size();
        const auto y = outputs(t_, xs, tuples_);
        VectorFamily& z = is_phi ? *phis : xs[block];
        const VectorFamily saved = z;
        if (is_phi) {
            const auto g = phi_gradient(y);
            if (mode_ == PhiMode::list) {
                list_linear_max(z, g, *params_.mixing_exponent, t_.codomain());
            } else {
                separable_linear_max(z, g, *params_.functional_exponent);
            }
        } else {
            separable_linear_max(z, slot_gradient(block, output_gradients(y)), params_.slot_exponents[block]);
        }
        auto next = evaluate_now();
        if (next.ratio > cur.ratio * (1.0 + 1e-15)) {
            cur = std::move(next);
            return true;
        }
        z = saved;
        return false;
    }

    bool step_block(std::size_t block, Value& cur) {
        const bool is_phi = block == xs.size();
        bool closed = false;
        if (is_phi) {
            closed = mode_ == PhiMode::list || coordinate_separable(phis->space());
        } else {
            closed = coordinate_separable(xs[block].space());
        }
        if (closed) {
            return linear_max_step(block, cur);
        }
        bool any = false;
        for (int i = 0; i < 3; ++i) {
            if (!gradient_step(block, cur)) {
                break;
            }
            any = true;
        }
        return any;
    }

    /// Rescales every block to unit weak norm (the ratio is unchanged).
    void normalize(Value& cur) {
        for (std::size_t k = 0; k < xs.size(); ++k) {
            normalize_slot(k, cur.weak[k]);
        }
        if (phis) {
            normalize_phis(cur.phi_weak);
        }
        cur = evaluate_now();
    }

    const std::vector<std::vector<std::size_t>>& tuples() const { return tuples_; }

private:
    const MultilinearMap& t_;
    const SummingParams& params_;
    PhiMode mode_;
    std::vector<std::size_t> lengths_;
    Budget inner_;
    std::vector<std::vector<std::size_t>> tuples_;
    std::vector<std::vector<double>> warm_;
};

Budget inner_budget(const Budget& budget) {
    Budget inner = budget;
    inner.restarts = 4;
    inner.iters = 100;
    inner.seed = CounterRng::mix(budget.seed ^ 0x1a2b3c);
    return inner;
}

VectorFamily random_family(const SpaceSpec& s, std::vector<std::size_t> shape, CounterRng& rng, bool signs) {
    auto f = VectorFamily::zeros(s, std::move(shape));
    for (double& v : f.data()) {
        v = signs ? rng.sign() : rng.normal();
    }
    return f;
}

double weak_reciprocal_sum(const std::vector<Exponent>& es) {
    double acc = 0.0;
    for (const auto& e : es) {
        acc += e.reciprocal();
    }
    return acc;
}

} // namespace

std::string to_string(SummingKind k) {
    switch (k) {
    case SummingKind::as_linear:
        return "as_linear";
    case SummingKind::as_linear_pqr:
        return "as_linear_pqr";
    case SummingKind::as_multi:
        return "as_multi";
    case SummingKind::as_multi_r:
        return "as_multi_r";
    case SummingKind::multiple:
        return "multiple";
    case SummingKind::multiple_r:
        return "multiple_r";
    case SummingKind::mixing_multi:
        return "mixing_multi";
    }
    return "as_linear";
}

SummingKind parse_summing_kind(const std::string& text) {
    std::string t = text;
    std::replace(t.begin(), t.end(), '-', '_');
    for (auto k : {SummingKind::as_linear, SummingKind::as_linear_pqr, SummingKind::as_multi, SummingKind::as_multi_r,
                   SummingKind::multiple, SummingKind::multiple_r, SummingKind::mixing_multi}) {
        if (to_string(k) == t) {
            return k;
        }
    }
    throw std::invalid_argument("unknown summing kind '" + text + "'");
}

SummingParams SummingParams::as_linear(Exponent p, Exponent q) {
    return {SummingKind::as_linear, p, {q}, std::nullopt, std::nullopt};
}
SummingParams SummingParams::as_linear_pqr(Exponent p, Exponent q, Exponent r) {
    return {SummingKind::as_linear_pqr, p, {q}, r, std::nullopt};
}
SummingParams SummingParams::as_multi(Exponent p, std::vector<Exponent> ps) {
    return {SummingKind::as_multi, p, std::move(ps), std::nullopt, std::nullopt};
}
SummingParams SummingParams::as_multi_r(Exponent p, std::vector<Exponent> qs, Exponent r) {
    return {SummingKind::as_multi_r, p, std::move(qs), r, std::nullopt};
}
SummingParams SummingParams::multiple(Exponent p, std::vector<Exponent> qs) {
    return {SummingKind::multiple, p, std::move(qs), std::nullopt, std::nullopt};
}
SummingParams SummingParams::multiple_r(Exponent p, std::vector<Exponent> qs, Exponent r) {
    return {SummingKind::multiple_r, p, std::move(qs), r, std::nullopt};
}
SummingParams SummingParams::mixing(Exponent s, Exponent q, std::vector<Exponent> ps) {
    return {SummingKind::mixing_multi, q, std::move(ps), std::nullopt, s};
}

bool is_box_kind(SummingKind k) {
    return k == SummingKind::multiple || k == SummingKind::multiple_r || k == SummingKind::mixing_multi;
}

bool has_functionals(SummingKind k) { return phi_mode(k) != PhiMode::none; }

InadmissibleExponents::InadmissibleExponents(const std::string& constraint)
    : std::domain_error("inadmissible exponents: " + constraint), constraint_(constraint) {}

std::optional<std::string> admissibility_violation(const SummingParams& params, std::size_t arity) {
    const auto kind = params.kind;
    if ((kind == SummingKind::as_linear || kind == SummingKind::as_linear_pqr) && arity != 1) {
        throw std::invalid_argument(to_string(kind) + " applies to linear maps only");
    }
    if (params.slot_exponents.size() != arity) {
        throw std::invalid_argument("expected " + std::to_string(arity) + " slot exponents, got " +
                                    std::to_string(params.slot_exponents.size()));
    }
    const PhiMode mode = phi_mode(kind);
    if (mode == PhiMode::per_index && !params.functional_exponent) {
        throw std::invalid_argument(to_string(kind) + " needs the functional exponent r");
    }
    if (mode == PhiMode::list && !params.mixing_exponent) {
        throw std::invalid_argument("mixing_multi needs the mixing exponent s");
    }
    if (params.sum_exponent.is_infinite()) {
        return std::string(kind == SummingKind::mixing_multi ? "q = inf" : "p = inf");
    }
    auto below_one = [](const Exponent& e) { return !e.is_infinite() && e.value() < 1.0; };
    bool small = below_one(params.sum_exponent);
    for (const auto& e : params.slot_exponents) {
        small = small || below_one(e);
    }
    if (params.functional_exponent) {
        small = small || below_one(*params.functional_exponent);
    }
    if (params.mixing_exponent) {
        small = small || below_one(*params.mixing_exponent);
    }
    if (small) {
        return std::string("exponent < 1");
    }

    const double inv_p = params.sum_exponent.reciprocal();
    const double inv_r = params.functional_exponent ? params.functional_exponent->reciprocal() : 0.0;
    switch (kind) {
    case SummingKind::as_linear:
        if (inv_p > params.slot_exponents[0].reciprocal() + kSlack) {
            return std::string("q > p");
        }
        break;
    case SummingKind::as_linear_pqr:
        if (inv_p > params.slot_exponents[0].reciprocal() + inv_r + kSlack) {
            return std::string("1/p > 1/q + 1/r");
        }
        break;
    case SummingKind::as_multi:
        if (inv_p > weak_reciprocal_sum(params.slot_exponents) + kSlack) {
            return std::string("1/p > 1/p_1 + ... + 1/p_n");
        }
        break;
    case SummingKind::as_multi_r:
        if (inv_p > weak_reciprocal_sum(params.slot_exponents) + inv_r + kSlack) {
            return std::string("1/p > 1/q_1 + ... + 1/q_n + 1/r");
        }
        break;
    case SummingKind::multiple:
        for (const auto& q : params.slot_exponents) {
            if (inv_p > q.reciprocal() + kSlack) {
                return std::string("q_i > p");
            }
        }
        break;
    case SummingKind::multiple_r:
        for (const auto& q : params.slot_exponents) {
            if (inv_p > q.reciprocal() + inv_r + kSlack) {
                return std::string("1/p > 1/q_i + 1/r");
            }
        }
        break;
    case SummingKind::mixing_multi: {
        const Exponent& s = *params.mixing_exponent;
        const Exponent& q = params.sum_exponent;
        if (q > s) {
            return std::string("q > s");
        }
        if (s.is_infinite()) {
            return std::string("s = inf");
        }
        for (const auto& pk : params.slot_exponents) {
            if (q < pk) {
                return std::string("q < p_k");
            }
        }
        break;
    }
    }
    return std::nullopt;
}

void require_admissible(const SummingParams& params, std::size_t arity) {
    if (auto v = admissibility_violation(params, arity)) {
        throw InadmissibleExponents(*v);
    }
}

SideValues lhs_rhs(const MultilinearMap& t, const SummingParams& params, const std::vector<VectorFamily>& x_families,
                   const std::optional<VectorFamily>& phis, const Budget& budget) {
    require_admissible(params, t.arity());
    validate_shapes(t, params, x_families, phis);
    const PhiMode mode = phi_mode(params.kind);
    const auto tuples = index_tuples(is_box_kind(params.kind), family_lengths(x_families));
    const auto y = outputs(t, x_families, tuples);
    SideValues out;
    out.lhs = left_side(params, mode, t.codomain(), y, phis ? &*phis : nullptr);
    double rhs = 1.0;
    for (std::size_t k = 0; k < x_families.size(); ++k) {
        const auto w = weak_norm(x_families[k], params.slot_exponents[k], budget);
        out.certified = out.certified && w.kind == EstimateKind::exact;
        rhs *= w.value;
    }
    if (mode != PhiMode::none) {
        rhs *= phi_factor(params, mode, *phis, budget, &out.certified);
    }
    out.rhs = rhs;
    return out;
}

SummingWitness make_witness(const MultilinearMap& t, const SummingParams& params, std::vector<VectorFamily> x_families,
                            std::optional<VectorFamily> phis, const Budget& budget) {
    const auto sides = lhs_rhs(t, params, x_families, phis, budget);
    SummingWitness w;
    w.x_families = std::move(x_families);
    w.phis = std::move(phis);
    w.lhs = sides.lhs;
    w.rhs = sides.rhs;
    w.ratio = sides.ratio();
    return w;
}

NormEstimate estimate_norm(const MultilinearMap& t, const SummingParams& params, const Budget& budget) {
    require_admissible(params, t.arity());
    const std::size_t n = t.arity();
    PhiMode mode = phi_mode(params.kind);
    // With r = ∞ the functional block is solved by norming functionals, so
    // the search runs on the functional-free objective.
    const bool closed_phi = mode == PhiMode::per_index && params.functional_exponent->is_infinite();
    const PhiMode search_mode = closed_phi ? PhiMode::none : mode;
    const Budget inner = inner_budget(budget);
    const std::size_t list_length = t.codomain().dim;

    std::optional<SummingWitness> best;
    bool certified = true;
    for (int m = 1; m <= std::max(1, budget.m_max); ++m) {
        const std::vector<std::size_t> lengths(n, static_cast<std::size_t>(m));
        for (int r = 0; r < std::max(1, budget.restarts); ++r) {
            CounterRng rng = CounterRng::stream(
                budget.seed, {kSummingStream, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(r)});
            BlockAscent asc(t, params, search_mode, lengths, inner);
            for (std::size_t k = 0; k < n; ++k) {
                asc.xs.push_back(random_family(t.domain()[k], {static_cast<std::size_t>(m)}, rng, r % 2 == 0));
            }
            if (search_mode == PhiMode::per_index) {
                const auto y = outputs(t, asc.xs, asc.tuples());
                std::vector<double> data;
                for (const auto& yj : y) {
                    const auto nu = norming_of(yj, t.codomain());
                    data.insert(data.end(), nu.begin(), nu.end());
                }
                std::vector<std::size_t> shape = is_box_kind(params.kind) ? lengths
                                                                          : std::vector<std::size_t>{lengths[0]};
                asc.phis = VectorFamily(t.codomain().dual(), shape, std::move(data));
            } else if (search_mode == PhiMode::list) {
                asc.phis = random_family(t.codomain().dual(), {list_length}, rng, false);
            }
            auto cur = asc.evaluate_now();
            asc.normalize(cur);
            for (int it = 0; it < budget.iters; ++it) {
                const double before = cur.ratio;
                if (asc.phis) {
                    asc.step_block(n, cur);
                }
                for (std::size_t k = 0; k < n; ++k) {
                    asc.step_block(k, cur);
                }
                asc.normalize(cur);
                if (!(cur.ratio > before * (1.0 + 1e-12))) {
                    break;
                }
            }
            std::optional<VectorFamily> phis = asc.phis;
            if (closed_phi) {
                const auto y = outputs(t, asc.xs, asc.tuples());
                std::vector<double> data;
                for (const auto& yj : y) {
                    const auto nu = norming_of(yj, t.codomain());
                    data.insert(data.end(), nu.begin(), nu.end());
                }
                std::vector<std::size_t> shape = is_box_kind(params.kind) ? lengths
                                                                          : std::vector<std::size_t>{lengths[0]};
                phis = VectorFamily(t.codomain().dual(), shape, std::move(data));
            }
            const auto sides = lhs_rhs(t, params, asc.xs, phis, inner);
            certified = certified && sides.certified;
            if (!best || sides.ratio() > best->ratio) {
                best = SummingWitness{asc.xs, phis, sides.lhs, sides.rhs, sides.ratio()};
            }
        }
    }
    NormEstimate out;
    out.value = best->ratio;
    out.kind = EstimateKind::lower_bound;
    out.certified = certified;
    out.witness = std::move(*best);
    out.budget = budget;
    return out;
}

namespace {

double list_objective(const VectorFamily& y, const VectorFamily& phis, const Exponent& s, const Exponent& q) {
    std::vector<double> inner(phis.size());
    std::vector<double> terms(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
        for (std::size_t l = 0; l < inner.size(); ++l) {
            inner[l] = dot(phis.member(l), y.member(j));
        }
        terms[j] = lp_norm(inner, s);
    }
    return lp_norm(terms, q);
}

VectorFamily list_gradient(const VectorFamily& y, const VectorFamily& phis, const Exponent& s, const Exponent& q) {
    VectorFamily g = VectorFamily::zeros(phis.space(), phis.shape());
    const double sv = s.value();
    const double qv = q.value();
    std::vector<double> tl(phis.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
        double sum = 0.0;
        for (std::size_t l = 0; l < tl.size(); ++l) {
            tl[l] = dot(phis.member(l), y.member(j));
            sum += std::pow(std::abs(tl[l]), sv);
        }
        if (sum == 0.0) {
            continue;
        }
        const double a = std::pow(sum, qv / sv - 1.0);
        for (std::size_t l = 0; l < tl.size(); ++l) {
            const double w = a * signed_power(tl[l], sv);
            for (std::size_t i = 0; i < y.dim(); ++i) {
                g.member(l)[i] += w * y.member(j)[i];
            }
        }
    }
    return g;
}

} // namespace

MixingFunctionals maximize_mixing_functionals(const VectorFamily& outputs, const Exponent& s, const Exponent& q,
                                              std::size_t list_length, const Budget& budget) {
    if (s.is_infinite() || q.is_infinite() || q.value() < 1.0 || q > s) {
        throw std::domain_error("maximize_mixing_functionals needs 1 <= q <= s < inf");
    }
    if (list_length == 0) {
        throw std::invalid_argument("list length must be positive");
    }
    const SpaceSpec& space = outputs.space();
    const SpaceSpec dual = space.dual();

    std::vector<VectorFamily> starts;
    {
        std::vector<std::size_t> order(outputs.size());
        std::iota(order.begin(), order.end(), 0);
        std::vector<double> norms(outputs.size());
        for (std::size_t j = 0; j < outputs.size(); ++j) {
            norms[j] = lp_norm(outputs.member(j), space.exponent);
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });
        auto f = VectorFamily::zeros(dual, {list_length});
        for (std::size_t l = 0; l < std::min(list_length, order.size()); ++l) {
            const auto nu = norming_of(outputs.member(order[l]), space);
            std::copy(nu.begin(), nu.end(), f.member(l).begin());
        }
        starts.push_back(std::move(f));
    }
    for (int r = 0; r < std::max(1, budget.restarts); ++r) {
        CounterRng rng = CounterRng::stream(budget.seed, {kListStream, static_cast<std::uint64_t>(r)});
        starts.push_back(random_family(dual, {list_length}, rng, r % 2 == 0));
    }

    std::optional<MixingFunctionals> best;
    for (auto& phis : starts) {
        const double n0 = strong_norm(phis, s).value;
        if (n0 > 0.0) {
            phis = phis.scaled(1.0 / n0);
        }
        double cur = list_objective(outputs, phis, s, q);
        for (int it = 0; it < budget.iters; ++it) {
            VectorFamily next = phis;
            list_linear_max(next, list_gradient(outputs, phis, s, q), s, space);
            const double v = list_objective(outputs, next, s, q);
            if (!(v > cur * (1.0 + 1e-15))) {
                break;
            }
            phis = std::move(next);
            cur = v;
        }
        if (!best || cur > best->value) {
            best = MixingFunctionals{cur, phis};
        }
    }
    return std::move(*best);
}

TrivialityReport check_triviality(const SummingParams& params, const MultilinearMap& t,
                                  const std::vector<std::size_t>& lengths) {
    const auto violated = admissibility_violation(params, t.arity());
    if (!violated) {
        throw std::invalid_argument("exponents are admissible; nothing to demonstrate");
    }
    const std::size_t n = t.arity();
    const double inv_p = params.sum_exponent.reciprocal();
    const double inv_r = params.functional_exponent ? params.functional_exponent->reciprocal() : 0.0;
    TrivialityReport rep;
    rep.violated = *violated;

    // Which slots carry the repeated vector, and the predicted exponent.
    std::vector<bool> repeated(n, false);
    bool repeat_phi = false;
    switch (params.kind) {
    case SummingKind::as_linear:
    case SummingKind::as_linear_pqr:
    case SummingKind::as_multi:
    case SummingKind::as_multi_r:
        std::fill(repeated.begin(), repeated.end(), true);
        repeat_phi = has_functionals(params.kind);
        rep.predicted_exponent = inv_p - weak_reciprocal_sum(params.slot_exponents) - inv_r;
        break;
    case SummingKind::multiple:
    case SummingKind::multiple_r:
    case SummingKind::mixing_multi: {
        double best = -1e300;
        for (std::size_t k = 0; k < n; ++k) {
            const double d = params.kind == SummingKind::mixing_multi
                                 ? inv_p - params.slot_exponents[k].reciprocal()
                                 : inv_p - params.slot_exponents[k].reciprocal() - inv_r;
            if (d > best) {
                best = d;
                rep.slot = k;
            }
        }
        repeated[rep.slot] = true;
        repeat_phi = params.kind == SummingKind::multiple_r;
        rep.predicted_exponent = best;
        break;
    }
    }
    if (!(rep.predicted_exponent > 0.0)) {
        throw std::invalid_argument("violation '" + rep.violated + "' does not produce divergence along repeated witnesses");
    }

    // Basis vectors at the coefficient of largest modulus.
    const auto shape = t.shape();
    std::size_t arg = 0;
    double top = 0.0;
    for (std::size_t i = 0; i < t.coeffs().size(); ++i) {
        if (std::abs(t.coeffs()[i]) > top) {
            top = std::abs(t.coeffs()[i]);
            arg = i;
        }
    }
    if (top == 0.0) {
        rep.zero_map = true;
        return rep;
    }
    std::vector<std::size_t> idx(shape.size());
    for (std::size_t i = shape.size(), rest = arg; i-- > 0;) {
        idx[i] = rest % shape[i];
        rest /= shape[i];
    }
    for (std::size_t m : lengths) {
        std::vector<VectorFamily> xs;
        std::vector<std::size_t> fam_lengths;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t len = repeated[k] ? m : 1;
            fam_lengths.push_back(len);
            auto f = VectorFamily::zeros(t.domain()[k], {len});
            for (std::size_t j = 0; j < len; ++j) {
                f.member(j)[idx[k]] = 1.0;
            }
            xs.push_back(std::move(f));
        }
        std::optional<VectorFamily> phis;
        if (has_functionals(params.kind)) {
            std::vector<std::size_t> pshape;
            if (params.kind == SummingKind::multiple_r) {
                pshape = fam_lengths;
            } else {
                pshape = {repeat_phi ? m : 1};
            }
            auto f = VectorFamily::zeros(t.codomain().dual(), pshape);
            for (std::size_t j = 0; j < f.size(); ++j) {
                f.member(j)[idx[n]] = 1.0;
            }
            phis = std::move(f);
        }
        // Evaluated directly: the admissibility gate of lhs_rhs does not apply here.
        const PhiMode mode = phi_mode(params.kind);
        const auto tuples = index_tuples(is_box_kind(params.kind), fam_lengths);
        const auto y = outputs(t, xs, tuples);
        const double lhs = left_side(params, mode, t.codomain(), y, phis ? &*phis : nullptr);
        double rhs = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            rhs *= weak_norm(xs[k], params.slot_exponents[k]).value;
        }
        if (mode != PhiMode::none) {
            bool cert = true;
            rhs *= phi_factor(params, mode, *phis, Budget{}, &cert);
        }
        rep.lengths.push_back(m);
        rep.ratios.push_back(lhs / rhs);
    }
    // Least-squares slope of log ratio against log m.
    const double k = static_cast<double>(rep.lengths.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < rep.lengths.size(); ++i) {
        const double x = std::log(static_cast<double>(rep.lengths[i]));
        const double y = std::log(rep.ratios[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    rep.measured_exponent = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    return rep;
}

SummingParams restricted_params(const SummingParams& params) {
    if (params.slot_exponents.size() < 2) {
        throw std::invalid_argument("restriction needs at least two slots");
    }
    SummingParams out = params;
    out.slot_exponents.erase(out.slot_exponents.begin());
    return out;
}

SummingWitness restriction_transport(const MultilinearMap& t, const SummingParams& params, const Vector& a,
                                     const SummingWitness& witness_ta, const Budget& budget) {
    if (!is_box_kind(params.kind)) {
        throw std::invalid_argument("restriction transport applies to box kinds only");
    }
    if (!(a.space == t.domain()[0])) {
        throw std::invalid_argument("restriction vector must live in the first slot's space");
    }
    std::vector<VectorFamily> xs;
    xs.push_back(VectorFamily(a.space, {1}, a.coords));
    for (const auto& f : witness_ta.x_families) {
        xs.push_back(f);
    }
    std::optional<VectorFamily> phis = witness_ta.phis;
    if (phis && params.kind == SummingKind::multiple_r) {
        auto shape = phis->shape();
        shape.insert(shape.begin(), 1);
        phis = VectorFamily(phis->space(), shape, std::vector<double>(phis->data().begin(), phis->data().end()));
    }
    return make_witness(t, params, std::move(xs), std::move(phis), budget);
}

SummingParams drop_functionals(const SummingParams& params) {
    SummingParams out = params;
    out.functional_exponent.reset();
    switch (params.kind) {
    case SummingKind::as_linear_pqr:
        out.kind = SummingKind::as_linear;
        break;
    case SummingKind::as_multi_r:
        out.kind = SummingKind::as_multi;
        break;
    case SummingKind::multiple_r:
        out.kind = SummingKind::multiple;
        break;
    default:
        throw std::invalid_argument(to_string(params.kind) + " has no functional exponent to drop");
    }
    return out;
}

SummingWitness inclusion_transport(const MultilinearMap& t, const SummingParams& params,
                                   const SummingWitness& witness_r, const Budget& budget) {
    const auto plain = drop_functionals(params);
    return make_witness(t, plain, witness_r.x_families, std::nullopt, budget);
}

SummingWitness composition_transport(const MultilinearMap& t, const SummingParams& params, const MultilinearMap& w,
                                     const std::vector<MultilinearMap>& us, const SummingWitness& witness_s,
                                     const Budget& budget) {
    if (us.size() != t.arity() || witness_s.x_families.size() != t.arity()) {
        throw std::invalid_argument("composition transport: arity mismatch");
    }
    std::vector<VectorFamily> xs;
    for (std::size_t k = 0; k < us.size(); ++k) {
        const auto& src = witness_s.x_families[k];
        auto dst = VectorFamily::zeros(t.domain()[k], src.shape());
        for (std::size_t j = 0; j < src.size(); ++j) {
            const auto img = evaluate_coords(us[k], std::vector<std::span<const double>>{src.member(j)});
            std::copy(img.begin(), img.end(), dst.member(j).begin());
        }
        xs.push_back(std::move(dst));
    }
    std::optional<VectorFamily> phis;
    if (witness_s.phis) {
        // φ ∘ w: coordinates Σ_g W[f, g] φ[g].
        const auto& src = *witness_s.phis;
        const std::size_t nf = w.domain()[0].dim;
        const std::size_t ng = w.codomain().dim;
        auto dst = VectorFamily::zeros(t.codomain().dual(), src.shape());
        for (std::size_t j = 0; j < src.size(); ++j) {
            for (std::size_t f = 0; f < nf; ++f) {
                double acc = 0.0;
                for (std::size_t g = 0; g < ng; ++g) {
                    acc += w.coeffs()[f * ng + g] * src.member(j)[g];
                }
                dst.member(j)[f] = acc;
            }
        }
        phis = std::move(dst);
    }
    return make_witness(t, params, std::move(xs), std::move(phis), budget);
}

} // namespace summa
