#include "summa/tensors.hpp"

#include "summa/family.hpp"
#include "summa/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace summa {

namespace {

constexpr std::uint64_t kOpNormStream = 0x0b4e;
// Upper limit on (vertex combinations × tensor size) for exhaustive op norms.
constexpr double kEnumerationWork = 1u << 28;

/// Contracts axis k of a row-major tensor with v.
std::vector<double> contract_axis(std::span<const double> data, const std::vector<std::size_t>& shape, std::size_t k,
                                  std::span<const double> v) {
    std::size_t outer = 1;
    for (std::size_t i = 0; i < k; ++i) {
        outer *= shape[i];
    }
    const std::size_t mid = shape[k];
    std::size_t inner = 1;
    for (std::size_t i = k + 1; i < shape.size(); ++i) {
        inner *= shape[i];
    }
    std::vector<double> out(outer * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t m = 0; m < mid; ++m) {
            const double c = v[m];
            if (c == 0.0) {
                continue;
            }
            const double* src = data.data() + (o * mid + m) * inner;
            double* dst = out.data() + o * inner;
            for (std::size_t i = 0; i < inner; ++i) {
                dst[i] += c * src[i];
            }
        }
    }
    return out;
}

/// Replaces axis k (extent `old_dim`) by an axis of extent `new_dim` with
/// out[.., a, ..] = Σ_b m(a, b) data[.., b, ..].
template <class F>
std::vector<double> transform_axis(std::span<const double> data, const std::vector<std::size_t>& shape, std::size_t k,
                                   std::size_t new_dim, F m) {
    std::size_t outer = 1;
    for (std::size_t i = 0; i < k; ++i) {
        outer *= shape[i];
    }
    const std::size_t old_dim = shape[k];
    std::size_t inner = 1;
    for (std::size_t i = k + 1; i < shape.size(); ++i) {
        inner *= shape[i];
    }
    std::vector<double> out(outer * new_dim * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t a = 0; a < new_dim; ++a) {
            double* dst = out.data() + (o * new_dim + a) * inner;
            for (std::size_t b = 0; b < old_dim; ++b) {
                const double c = m(a, b);
                if (c == 0.0) {
                    continue;
                }
                const double* src = data.data() + (o * old_dim + b) * inner;
                for (std::size_t i = 0; i < inner; ++i) {
                    dst[i] += c * src[i];
                }
            }
        }
    }
    return out;
}

void check_args(const MultilinearMap& t, std::span<const std::span<const double>> args) {
    if (args.size() != t.arity()) {
        throw std::invalid_argument("expected " + std::to_string(t.arity()) + " arguments, got " +
                                    std::to_string(args.size()));
    }
}

struct OpCandidate {
    double value = -1.0;
    std::vector<std::vector<double>> args;
};

double codomain_norm(const MultilinearMap& t, std::span<const double> y) { return lp_norm(y, t.codomain().exponent); }

std::vector<std::span<const double>> as_spans(const std::vector<std::vector<double>>& v) {
    return {v.begin(), v.end()};
}

/// Exhaustive op norm, or nullopt if the vertex sets are not enumerable
/// within budget.
std::optional<OpCandidate> op_norm_exact(const MultilinearMap& t, std::size_t cap) {
    const std::size_t n = t.arity();
    const bool scalar = t.codomain().dim == 1;
    std::vector<std::optional<std::vector<std::vector<double>>>> verts(n);
    for (std::size_t k = 0; k < n; ++k) {
        verts[k] = ball_vertices(t.domain()[k], true, cap);
    }
    std::optional<std::vector<std::vector<double>>> psi_verts;
    if (scalar) {
        psi_verts = std::vector<std::vector<double>>{{1.0}};
    } else {
        psi_verts = ball_vertices(t.codomain().dual(), true, cap);
    }

    // Pick the slot solved in closed form.
    std::optional<std::size_t> free_slot;
    if (psi_verts) {
        std::size_t missing = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (!verts[k]) {
                ++missing;
                free_slot = k;
            }
        }
        if (missing > 1) {
            return std::nullopt;
        }
        if (!free_slot) {
            free_slot = n - 1;
        }
    } else {
        for (std::size_t k = 0; k < n; ++k) {
            if (!verts[k]) {
                return std::nullopt;
            }
        }
    }

    double combos = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (free_slot && k == *free_slot) {
            continue;
        }
        combos *= static_cast<double>(verts[k]->size());
    }
    if (free_slot) {
        combos *= static_cast<double>(psi_verts->size());
    }
    if (combos * static_cast<double>(t.coeffs().size()) > kEnumerationWork) {
        return std::nullopt;
    }

    std::vector<std::size_t> counter(n + 1, 0);
    std::vector<std::vector<double>> args(n);
    for (std::size_t k = 0; k < n; ++k) {
        args[k].assign(t.domain()[k].dim, 0.0);
    }
    OpCandidate best;
    const std::size_t nf = t.codomain().dim;
    while (true) {
        for (std::size_t k = 0; k < n; ++k) {
            if (!free_slot || k != *free_slot) {
                args[k] = (*verts[k])[counter[k]];
            }
        }
        if (free_slot) {
            const std::size_t f = *free_slot;
            const auto& psi = (*psi_verts)[counter[n]];
            const auto spans = as_spans(args);
            const auto c = contract_except(t, spans, f);
            const std::size_t nk = t.domain()[f].dim;
            std::vector<double> v(nk, 0.0);
            for (std::size_t i = 0; i < nk; ++i) {
                for (std::size_t j = 0; j < nf; ++j) {
                    v[i] += c[i * nf + j] * psi[j];
                }
            }
            const double val = lp_norm(v, dual_exponent(t.domain()[f].exponent));
            if (val > best.value) {
                best.value = val;
                best.args = args;
                best.args[f] = ball_argmax(v, t.domain()[f].exponent);
            }
        } else {
            const auto y = evaluate_coords(t, as_spans(args));
            const double val = codomain_norm(t, y);
            if (val > best.value) {
                best.value = val;
                best.args = args;
            }
        }
        // Odometer over the enumerated slots (and ψ when present).
        std::size_t k = 0;
        for (; k <= n; ++k) {
            std::size_t extent = 1;
            if (k < n) {
                extent = (free_slot && k == *free_slot) ? 1 : verts[k]->size();
            } else {
                extent = free_slot ? psi_verts->size() : 1;
            }
            if (++counter[k] < extent) {
                break;
            }
            counter[k] = 0;
        }
        if (k > n) {
            break;
        }
    }
    // Re-evaluate at the witness so value and witness agree exactly.
    for (std::size_t k = 0; k < n; ++k) {
        if (std::all_of(best.args[k].begin(), best.args[k].end(), [](double v) { return v == 0.0; })) {
            best.args[k].assign(t.domain()[k].dim, 0.0);
            best.args[k][0] = 1.0;
        }
    }
    best.value = codomain_norm(t, evaluate_coords(t, as_spans(best.args)));
    return best;
}

std::vector<double> random_ball_point(const SpaceSpec& s, CounterRng& rng, bool signs) {
    std::vector<double> x(s.dim);
    for (double& v : x) {
        v = signs ? rng.sign() : rng.normal();
    }
    double nrm = lp_norm(x, s.exponent);
    if (nrm == 0.0) {
        x[0] = 1.0;
        nrm = lp_norm(x, s.exponent);
    }
    for (double& v : x) {
        v /= nrm;
    }
    return x;
}

OpCandidate op_norm_ascent(const MultilinearMap& t, const Budget& budget) {
    const std::size_t n = t.arity();
    const std::size_t nf = t.codomain().dim;
    const Exponent fdual = dual_exponent(t.codomain().exponent);
    OpCandidate best;
    const int restarts = std::max(1, 2 * budget.restarts);
    for (int r = 0; r < restarts; ++r) {
        CounterRng rng = CounterRng::stream(budget.seed, {kOpNormStream, static_cast<std::uint64_t>(r)});
        std::vector<std::vector<double>> x(n);
        for (std::size_t k = 0; k < n; ++k) {
            x[k] = random_ball_point(t.domain()[k], rng, r % 2 == 0);
        }
        double val = codomain_norm(t, evaluate_coords(t, as_spans(x)));
        for (int it = 0; it < budget.iters; ++it) {
            auto psi = ball_argmax(evaluate_coords(t, as_spans(x)), fdual);
            if (std::all_of(psi.begin(), psi.end(), [](double v) { return v == 0.0; })) {
                psi[0] = 1.0;
            }
            for (std::size_t k = 0; k < n; ++k) {
                const auto c = contract_except(t, as_spans(x), k);
                const std::size_t nk = t.domain()[k].dim;
                std::vector<double> v(nk, 0.0);
                for (std::size_t i = 0; i < nk; ++i) {
                    for (std::size_t j = 0; j < nf; ++j) {
                        v[i] += c[i * nf + j] * psi[j];
                    }
                }
                auto next = ball_argmax(v, t.domain()[k].exponent);
                if (std::any_of(next.begin(), next.end(), [](double e) { return e != 0.0; })) {
                    x[k] = std::move(next);
                }
            }
            const double nv = codomain_norm(t, evaluate_coords(t, as_spans(x)));
            const bool progress = nv > val * (1.0 + 1e-14);
            val = std::max(val, nv);
            if (!progress) {
                break;
            }
        }
        const double final_val = codomain_norm(t, evaluate_coords(t, as_spans(x)));
        if (final_val > best.value) {
            best.value = final_val;
            best.args = x;
        }
    }
    return best;
}

std::vector<std::size_t> unravel(std::size_t flat, const std::vector<std::size_t>& shape) {
    std::vector<std::size_t> idx(shape.size());
    for (std::size_t i = shape.size(); i-- > 0;) {
        idx[i] = flat % shape[i];
        flat /= shape[i];
    }
    return idx;
}

std::size_t ravel(const std::vector<std::size_t>& idx, const std::vector<std::size_t>& shape) {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        flat = flat * shape[i] + idx[i];
    }
    return flat;
}

void require_uniform_domain(const MultilinearMap& t) {
    if (t.arity() == 0) {
        throw std::invalid_argument("polynomial degree must be at least 1");
    }
    for (const auto& s : t.domain()) {
        if (!(s == t.domain().front())) {
            throw std::invalid_argument("polynomial requires every domain slot to use the same space");
        }
    }
}

} // namespace

MultilinearMap::MultilinearMap(std::vector<SpaceSpec> domain, SpaceSpec codomain, std::vector<double> coeffs)
    : domain_(std::move(domain)), codomain_(codomain), coeffs_(std::move(coeffs)) {
    std::size_t expected = codomain_.dim;
    for (const auto& s : domain_) {
        expected *= s.dim;
    }
    if (coeffs_.size() != expected) {
        throw std::invalid_argument("tensor has " + std::to_string(coeffs_.size()) + " coefficients, shape needs " +
                                    std::to_string(expected));
    }
}

MultilinearMap MultilinearMap::zeros(std::vector<SpaceSpec> domain, SpaceSpec codomain) {
    std::size_t size = codomain.dim;
    for (const auto& s : domain) {
        size *= s.dim;
    }
    return MultilinearMap(std::move(domain), codomain, std::vector<double>(size, 0.0));
}

MultilinearMap MultilinearMap::form(std::vector<SpaceSpec> domain, std::vector<double> coeffs) {
    return MultilinearMap(std::move(domain), scalar_space(), std::move(coeffs));
}

std::vector<std::size_t> MultilinearMap::shape() const {
    std::vector<std::size_t> s;
    s.reserve(domain_.size() + 1);
    for (const auto& d : domain_) {
        s.push_back(d.dim);
    }
    s.push_back(codomain_.dim);
    return s;
}

MultilinearMap MultilinearMap::scaled(double factor) const {
    MultilinearMap out = *this;
    for (double& c : out.coeffs_) {
        c *= factor;
    }
    return out;
}

std::vector<double> contract_except(const MultilinearMap& t, std::span<const std::span<const double>> args,
                                    std::size_t keep) {
    check_args(t, args);
    auto shape = t.shape();
    std::vector<double> data(t.coeffs().begin(), t.coeffs().end());
    for (std::size_t k = t.arity(); k-- > 0;) {
        if (k == keep) {
            continue;
        }
        if (args[k].size() != shape[k]) {
            throw std::invalid_argument("argument " + std::to_string(k) + " has the wrong dimension");
        }
        data = contract_axis(data, shape, k, args[k]);
        shape.erase(shape.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return data;
}

std::vector<double> evaluate_coords(const MultilinearMap& t, std::span<const std::span<const double>> args) {
    return contract_except(t, args, t.arity());
}

Vector evaluate(const MultilinearMap& t, const std::vector<Vector>& args) {
    if (args.size() != t.arity()) {
        throw std::invalid_argument("expected " + std::to_string(t.arity()) + " arguments, got " +
                                    std::to_string(args.size()));
    }
    std::vector<std::span<const double>> spans;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k].space.dim != t.domain()[k].dim) {
            throw std::invalid_argument("argument " + std::to_string(k) + " has dimension " +
                                        std::to_string(args[k].space.dim) + ", slot expects " +
                                        std::to_string(t.domain()[k].dim));
        }
        spans.emplace_back(args[k].coords);
    }
    return Vector(t.codomain(), evaluate_coords(t, spans));
}

NormEstimate op_norm(const MultilinearMap& t, const Budget& budget) {
    NormEstimate out;
    out.budget = budget;
    std::optional<OpCandidate> cand;
    if (budget.weak_mode == WeakMode::automatic) {
        cand = op_norm_exact(t, budget.enum_cap);
    }
    if (cand) {
        out.kind = EstimateKind::exact;
    } else {
        cand = op_norm_ascent(t, budget);
        out.kind = EstimateKind::lower_bound;
    }
    out.value = cand->value;
    std::vector<Vector> args;
    for (std::size_t k = 0; k < t.arity(); ++k) {
        args.emplace_back(t.domain()[k], cand->args[k]);
    }
    out.witness = std::move(args);
    return out;
}

MultilinearMap restrict(const MultilinearMap& t, std::size_t slot, const Vector& a) {
    if (t.arity() < 2) {
        throw std::invalid_argument("restrict needs a map of arity at least 2");
    }
    if (slot >= t.arity()) {
        throw std::out_of_range("restrict: slot out of range");
    }
    if (a.space.dim != t.domain()[slot].dim) {
        throw std::invalid_argument("restrict: vector dimension does not match the slot");
    }
    auto data = contract_axis(t.coeffs(), t.shape(), slot, a.coords);
    auto domain = t.domain();
    domain.erase(domain.begin() + static_cast<std::ptrdiff_t>(slot));
    return MultilinearMap(std::move(domain), t.codomain(), std::move(data));
}

MultilinearMap compose(const MultilinearMap& w, const MultilinearMap& t, const std::vector<MultilinearMap>& us) {
    if (w.arity() != 1 || w.domain()[0].dim != t.codomain().dim) {
        throw std::invalid_argument("compose: outer map must be linear on the codomain");
    }
    if (us.size() != t.arity()) {
        throw std::invalid_argument("compose: need one inner map per slot");
    }
    auto shape = t.shape();
    std::vector<double> data(t.coeffs().begin(), t.coeffs().end());
    std::vector<SpaceSpec> domain;
    for (std::size_t k = 0; k < us.size(); ++k) {
        const auto& u = us[k];
        if (u.arity() != 1 || u.codomain().dim != shape[k]) {
            throw std::invalid_argument("compose: inner map " + std::to_string(k) + " does not land in slot space");
        }
        const std::size_t old_dim = shape[k];
        const std::size_t new_dim = u.domain()[0].dim;
        const auto uc = u.coeffs();
        data = transform_axis(data, shape, k, new_dim, [&](std::size_t a, std::size_t b) { return uc[a * old_dim + b]; });
        shape[k] = new_dim;
        domain.push_back(u.domain()[0]);
    }
    const std::size_t ng = w.codomain().dim;
    const auto wc = w.coeffs();
    data = transform_axis(data, shape, shape.size() - 1, ng, [&](std::size_t g, std::size_t f) { return wc[f * ng + g]; });
    return MultilinearMap(std::move(domain), w.codomain(), std::move(data));
}

MultilinearMap identity_map(const SpaceSpec& from, const SpaceSpec& to) {
    if (from.dim != to.dim) {
        throw std::invalid_argument("identity_map: dimensions differ");
    }
    std::vector<double> c(from.dim * from.dim, 0.0);
    for (std::size_t i = 0; i < from.dim; ++i) {
        c[i * from.dim + i] = 1.0;
    }
    return MultilinearMap({from}, to, std::move(c));
}

MultilinearMap symmetrize(const MultilinearMap& t) {
    require_uniform_domain(t);
    const std::size_t n = t.arity();
    const auto shape = t.shape();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<std::size_t>> perms;
    do {
        perms.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double inv = 1.0 / static_cast<double>(perms.size());
    std::vector<double> out(t.coeffs().size(), 0.0);
    std::vector<std::size_t> permuted(n + 1);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        const auto idx = unravel(flat, shape);
        double acc = 0.0;
        for (const auto& p : perms) {
            for (std::size_t k = 0; k < n; ++k) {
                permuted[k] = idx[p[k]];
            }
            permuted[n] = idx[n];
            acc += t.coeffs()[ravel(permuted, shape)];
        }
        out[flat] = acc * inv;
    }
    return MultilinearMap(t.domain(), t.codomain(), std::move(out));
}

HomogeneousPolynomial::HomogeneousPolynomial(const MultilinearMap& t) : sym_(symmetrize(t)) {}

Vector HomogeneousPolynomial::operator()(const Vector& x) const {
    return evaluate(sym_, std::vector<Vector>(degree(), x));
}

Vector polarization_evaluate(const HomogeneousPolynomial& p, const std::vector<Vector>& args) {
    const std::size_t n = p.degree();
    if (args.size() != n) {
        throw std::invalid_argument("polarization needs one argument per degree");
    }
    const std::size_t dim = p.space().dim;
    std::vector<double> acc(p.codomain().dim, 0.0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<double> sum(dim, 0.0);
        double sign = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double e = ((mask >> k) & 1U) ? -1.0 : 1.0;
            sign *= e;
            for (std::size_t i = 0; i < dim; ++i) {
                sum[i] += e * args[k].coords.at(i);
            }
        }
        const Vector val = p(Vector(p.space(), std::move(sum)));
        for (std::size_t j = 0; j < acc.size(); ++j) {
            acc[j] += sign * val.coords[j];
        }
    }
    double denom = std::ldexp(1.0, static_cast<int>(n));
    for (std::size_t k = 2; k <= n; ++k) {
        denom *= static_cast<double>(k);
    }
    for (double& v : acc) {
        v /= denom;
    }
    return Vector(p.codomain(), std::move(acc));
}

HomogeneousPolynomial multiply(const Functional& gamma, const HomogeneousPolynomial& p) {
    if (gamma.space.dim != p.space().dim) {
        throw std::invalid_argument("multiply: functional and polynomial act on different spaces");
    }
    const std::size_t n = p.degree();
    const std::size_t dim = p.space().dim;
    std::vector<SpaceSpec> domain(n + 1, p.space());
    auto shape_out = std::vector<std::size_t>(n + 1, dim);
    shape_out.push_back(p.codomain().dim);
    const auto shape_in = p.sym().shape();
    std::vector<double> out(box_volume(shape_out), 0.0);
    std::vector<std::size_t> sub(n + 1);
    const double inv = 1.0 / static_cast<double>(n + 1);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        const auto idx = unravel(flat, shape_out);
        double acc = 0.0;
        for (std::size_t k = 0; k <= n; ++k) {
            const double g = gamma.coords[idx[k]];
            if (g == 0.0) {
                continue;
            }
            std::size_t pos = 0;
            for (std::size_t l = 0; l <= n; ++l) {
                if (l != k) {
                    sub[pos++] = idx[l];
                }
            }
            sub[n] = idx[n + 1];
            acc += g * p.sym().coeffs()[ravel(sub, shape_in)];
        }
        out[flat] = acc * inv;
    }
    return HomogeneousPolynomial(MultilinearMap(std::move(domain), p.codomain(), std::move(out)));
}

HomogeneousPolynomial power_multiply(const Functional& gamma, const MultilinearMap& linear, std::size_t k) {
    if (linear.arity() != 1) {
        throw std::invalid_argument("power_multiply expects a linear map");
    }
    HomogeneousPolynomial p(linear);
    for (std::size_t i = 0; i < k; ++i) {
        p = multiply(gamma, p);
    }
    return p;
}

HomogeneousPolynomial fix_point(const HomogeneousPolynomial& p, const Vector& a, std::size_t k) {
    if (k >= p.degree()) {
        throw std::invalid_argument("fix_point requires k < degree");
    }
    if (a.space.dim != p.space().dim) {
        throw std::invalid_argument("fix_point: vector dimension does not match the polynomial");
    }
    MultilinearMap t = p.sym();
    for (std::size_t i = 0; i < k; ++i) {
        t = restrict(t, 0, a);
    }
    return HomogeneousPolynomial(t);
}

} // namespace summa
