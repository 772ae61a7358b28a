#pragma once

#include "summa/estimate.hpp"
#include "summa/family.hpp"
#include "summa/tensors.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace summa {

enum class SummingKind {
    as_linear,     // (Σ‖u(x_j)‖^p)^{1/p} ≤ C ‖x‖_{w,q}
    as_linear_pqr, // (Σ|φ_j(u(x_j))|^p)^{1/p} ≤ C ‖φ‖_{w,r} ‖x‖_{w,q}
    as_multi,      // diagonal sum, slot exponents p_1..p_n
    as_multi_r,    // diagonal sum with functionals, slot exponents q_1..q_n
    multiple,      // full index box, slot exponents q_1..q_n
    multiple_r,    // full index box with box-indexed functionals
    mixing_multi,  // (Σ_J (Σ_l |φ_l(A(x_J))|^s)^{q/s})^{1/q} ≤ σ Π‖x^{(k)}‖_{w,p_k} ‖φ‖_s
};

std::string to_string(SummingKind k);
/// Accepts the names above, with '-' or '_' as separator.
SummingKind parse_summing_kind(const std::string& text);

/// Exponents of a summing norm, named by role:
///  - sum_exponent: p, the outer exponent of the left-hand side (q for mixing_multi);
///  - slot_exponents: one weak exponent per domain slot (q_i, p_k);
///  - functional_exponent: r, for the kinds that test against functionals;
///  - mixing_exponent: s, for mixing_multi.
struct SummingParams {
    SummingKind kind;
    Exponent sum_exponent;
    std::vector<Exponent> slot_exponents;
    std::optional<Exponent> functional_exponent;
    std::optional<Exponent> mixing_exponent;

    static SummingParams as_linear(Exponent p, Exponent q);
    static SummingParams as_linear_pqr(Exponent p, Exponent q, Exponent r);
    static SummingParams as_multi(Exponent p, std::vector<Exponent> ps);
    static SummingParams as_multi_r(Exponent p, std::vector<Exponent> qs, Exponent r);
    static SummingParams multiple(Exponent p, std::vector<Exponent> qs);
    static SummingParams multiple_r(Exponent p, std::vector<Exponent> qs, Exponent r);
    static SummingParams mixing(Exponent s, Exponent q, std::vector<Exponent> ps);
};

/// True for kinds that sum over the full index box m₁×…×mₙ.
bool is_box_kind(SummingKind k);
/// True for kinds whose witness carries functionals.
bool has_functionals(SummingKind k);

/// Thrown for exponent tuples outside a kind's admissible range. `constraint`
/// holds the violated relation, e.g. "1/p > 1/q_i + 1/r".
class InadmissibleExponents : public std::domain_error {
public:
    explicit InadmissibleExponents(const std::string& constraint);
    const std::string& constraint() const noexcept { return constraint_; }

private:
    std::string constraint_;
};

/// The violated relation, or nullopt if the exponents are admissible for a
/// map of the given arity. Throws std::invalid_argument on structural
/// problems (wrong number of slot exponents, missing r or s, p < 1).
std::optional<std::string> admissibility_violation(const SummingParams& params, std::size_t arity);

void require_admissible(const SummingParams& params, std::size_t arity);

struct SideValues {
    double lhs = 0.0;
    double rhs = 0.0;
    /// False if a weak norm on the right was only found by ascent.
    bool certified = true;
    double ratio() const { return rhs > 0.0 ? lhs / rhs : 0.0; }
};

/// Both sides of the kind's defining inequality on explicit test data.
/// x_families holds one family per slot; diagonal kinds need equal lengths.
/// phis holds codomain functionals as a family over the dual of the
/// codomain: box-shaped for multiple_r, length m for the diagonal kinds, any
/// length for mixing_multi. Throws InadmissibleExponents or
/// std::invalid_argument on shape mismatch.
SideValues lhs_rhs(const MultilinearMap& t, const SummingParams& params, const std::vector<VectorFamily>& x_families,
                   const std::optional<VectorFamily>& phis, const Budget& budget = {});

/// lhs_rhs packaged as a witness.
SummingWitness make_witness(const MultilinearMap& t, const SummingParams& params, std::vector<VectorFamily> x_families,
                            std::optional<VectorFamily> phis, const Budget& budget = {});

/// Lower bound on the summing norm: the best ratio found by alternating block
/// ascent over test families of length 1..m_max, multi-start. The witness is
/// a SummingWitness. Throws InadmissibleExponents.
NormEstimate estimate_norm(const MultilinearMap& t, const SummingParams& params, const Budget& budget = {});

struct MixingFunctionals {
    double value = 0.0;
    VectorFamily phis; // over the dual of the outputs' space, ‖φ‖_s = 1
};

/// sup (Σ_J (Σ_l |φ_l(y_J)|^s)^{q/s})^{1/q} over lists (φ_l) of the given
/// length with ‖(‖φ_l‖)‖_s ≤ 1. A lower bound found by conditional-gradient
/// ascent from the norming functionals of the largest outputs plus seeded
/// random starts. Requires 1 <= q <= s < ∞.
MixingFunctionals maximize_mixing_functionals(const VectorFamily& outputs, const Exponent& s, const Exponent& q,
                                              std::size_t list_length, const Budget& budget = {});

struct TrivialityReport {
    bool zero_map = false;
    std::string violated;        // the violated relation
    double predicted_exponent = 0.0;
    std::vector<std::size_t> lengths;
    std::vector<double> ratios;
    double measured_exponent = 0.0; // least-squares slope of log ratio against log m
    std::size_t slot = 0;           // slot whose family is repeated
};

/// For exponents outside the admissible range, evaluates the ratio along
/// repeated-vector witnesses of growing length and fits its growth exponent.
/// Throws std::invalid_argument if the exponents are admissible.
TrivialityReport check_triviality(const SummingParams& params, const MultilinearMap& t,
                                  const std::vector<std::size_t>& lengths = {2, 4, 8, 16});

/// Parameters of T_a = T(a, ·): the first slot exponent is dropped.
SummingParams restricted_params(const SummingParams& params);

/// Embeds a witness for T_a = restrict(T, 0, a) into one for T by prepending
/// the length-one family (a). The ratio for T_a is exactly ‖a‖ times the
/// ratio for T. Box kinds only.
SummingWitness restriction_transport(const MultilinearMap& t, const SummingParams& params, const Vector& a,
                                     const SummingWitness& witness_ta, const Budget& budget = {});

/// The kind without functionals: as_linear_pqr → as_linear, as_multi_r →
/// as_multi, multiple_r → multiple.
SummingParams drop_functionals(const SummingParams& params);

/// Keeps the x-families of a witness for a kind with functionals. Since
/// |φ_J(y)| ≤ ‖φ‖_{w,r}‖y‖, the resulting ratio is at least the original.
SummingWitness inclusion_transport(const MultilinearMap& t, const SummingParams& params,
                                   const SummingWitness& witness_r, const Budget& budget = {});

/// Maps a witness for S = w ∘ T ∘ (u₁,…,uₙ) to a witness for T by pushing the
/// x-families through the uᵢ and pulling functionals back through w.
/// ratio_S ≤ ‖w‖ Π‖uᵢ‖ ratio_T on the transported data.
SummingWitness composition_transport(const MultilinearMap& t, const SummingParams& params, const MultilinearMap& w,
                                     const std::vector<MultilinearMap>& us, const SummingWitness& witness_s,
                                     const Budget& budget = {});

} // namespace summa
