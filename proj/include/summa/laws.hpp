#pragma once

#include "summa/estimate.hpp"
#include "summa/summing.hpp"
#include "summa/tensors.hpp"

#include <map>
#include <string>
#include <vector>

namespace summa {

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);

/// What the two sides of a check `lhs ≤ rhs + tolerance` are, which decides
/// whether a miss is a certified failure.
enum class Comparison {
    exact,           // both sides exact evaluations (transported witnesses included)
    sandwich,        // a lower bound against an upper bound of the same quantity
    rhs_lower_bound, // rhs only bounds the true right side from below
    empirical,       // a quality target rather than a theorem
};

std::string to_string(Comparison c);

struct LawCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double tolerance = 0.0;
    Comparison comparison = Comparison::exact;
    double margin = 0.0; // rhs − lhs
    Verdict verdict = Verdict::pass;
};

struct LawReport {
    std::string law_id;
    std::map<std::string, std::string> instance;
    std::vector<LawCheck> checks;
    std::map<std::string, double> metrics;
    std::map<std::string, std::vector<double>> witness;
    Verdict verdict = Verdict::pass;
};

/// Assembles a LawReport. A check passes when margin ≥ −tolerance; a miss is
/// a failure only for exact and sandwich comparisons, and inconclusive
/// otherwise. The report verdict is fail if any check failed, else
/// inconclusive if any check was, else pass.
class LawReportBuilder {
public:
    explicit LawReportBuilder(std::string law_id);

    LawReportBuilder& instance(const std::string& key, const std::string& value);
    LawReportBuilder& metric(const std::string& key, double value);
    LawReportBuilder& witness(const std::string& key, std::vector<double> values);
    LawReportBuilder& check(const std::string& name, double lhs, double rhs, double tolerance, Comparison comparison);
    /// Marks the report inconclusive without a numeric check.
    LawReportBuilder& inconclusive(const std::string& reason);

    LawReport build() const;

private:
    LawReport report_;
};

/// Real constant in (Σ|T(e_i,e_j)|^{4/3})^{3/4} ≤ √2 ‖T‖.
inline constexpr double kLittlewoodConstant = 1.4142135623730951;

/// Littlewood's 4/3 inequality for a scalar bilinear form on ℓ∞^N × ℓ∞^M.
/// ‖T‖ is exact by sign enumeration when `exhaustive` and the enumeration
/// fits budget.enum_cap; otherwise a lower bound by alternating ascent, and
/// a miss is inconclusive.
LawReport littlewood_43(const MultilinearMap& t, bool exhaustive, const Budget& budget = {});

/// Records the Bohnenblust–Hille ratio (Σ_J |T(x_J)|^{2n/(n+1)})^{(n+1)/2n} /
/// Π‖x^{(k)}‖_{w,1} for a scalar n-form, n ≥ 2, together with ‖T‖. No bound
/// is asserted.
LawReport bohnenblust_hille(const MultilinearMap& t, const std::vector<VectorFamily>& families,
                            const Budget& budget = {});

/// Exponent structure of Bohnenblust–Hille on the Fourier forms with basis
/// inputs over ℓ∞^N, N ∈ dims: the normalized ratio at 2n/(n+1) stays
/// bounded while at p_below < 2n/(n+1) it outgrows it by about
/// N^{n/p_below − (n+1)/2}. Small N are dominated by the extremal N = 2
/// case, so dims should start at 3 or 4.
LawReport bh_exponent_probe(std::size_t n, const std::vector<std::size_t>& dims, double p_below,
                            const Budget& budget = {});

/// Primal factorization against Maurey's dual formula: dual ≤ primal
/// (certified) and the relative gap within 5% (empirical). 1 ≤ q < s < ∞.
LawReport maurey_duality(const VectorFamily& fam, const Exponent& s, const Exponent& q, const Budget& budget = {});

/// Two routes to the mixing quantity on the same inputs: (a) the mixed (s,q)
/// bracket of the outputs A(x_J) over the index box, and (b) the functional
/// (Σ_J (Σ_l |φ_l(A(x_J))|^s)^{q/s})^{1/q} maximized over φ-lists with
/// ‖φ‖_s ≤ 1. Checks (b) ≤ (a) upper and the gap within 10%.
LawReport mixing_characterization(const MultilinearMap& a, const Exponent& s, const Exponent& q,
                                  const std::vector<Exponent>& ps, const std::vector<VectorFamily>& families,
                                  const Budget& budget = {});

/// Witness transport for the multiple (p;q;r) ideal of polynomials. `params`
/// is multiple_r for the degree of P, all slot exponents equal.
///  (i) a witness for P_a becomes one for P by prepending (a, 0, …, 0);
///      ratio(P_a) ≤ ‖a‖ ratio(P).
///  (ii) a witness for γP is split by the symmetrized expansion into n + 1
///      terms, each re-blocked into a witness for P̌ with a merged family
///      γ(x^{(k)}_{j}) x^{(l)}_{j'} of length m²; ratio(γP) ≤ ‖γ‖ max_k ratio(P).
/// `witnesses` random witnesses of length m are drawn from budget.seed.
LawReport coherence_compatibility(const HomogeneousPolynomial& p, const SummingParams& params, const Vector& a,
                                  const Functional& gamma, std::size_t witnesses = 4, std::size_t m = 2,
                                  const Budget& budget = {});

/// Quotient theorem on one instance, with u(y) = φ₀(y) y₀ and
/// π_s(u) = ‖φ₀‖‖y₀‖.
///  forward: (Σ_J ‖u(A(x_J))‖^q)^{1/q} ≤ π_s(u) ‖τ‖_r ‖(y_J)‖_{w,s} for the
///           factorization A(x_J) = τ_J y_J found for the outputs.
///  backward: for S(y) = (φ_l(y))_l, (Σ_i ‖S(z_i)‖_s^s)^{1/s} ≤ ‖φ‖_s ‖z‖_{w,s}
///           on the test family z, and the mixing left side
///           (Σ_J (Σ_l |φ_l(A(x_J))|^s)^{q/s})^{1/q} is at most
///           ‖φ‖_s ‖τ‖_r ‖(y_J)‖_{w,s}.
LawReport quotient_theorem(const MultilinearMap& a, const Functional& phi0, const Vector& y0, const Exponent& s,
                           const Exponent& q, const std::vector<Exponent>& ps,
                           const std::vector<VectorFamily>& families, const VectorFamily& phi_list,
                           const VectorFamily& test_family, const Budget& budget = {});

/// Divergence along repeated witnesses outside the admissible range:
/// measured exponent within 2% of the predicted one.
LawReport triviality_law(const SummingParams& params, const MultilinearMap& t);

/// For a kind with functionals: the estimate's witness, with the
/// functionals dropped, certifies the kind without functionals at a ratio at
/// least as large.
LawReport inclusion_law(const MultilinearMap& t, const SummingParams& params_r, const Budget& budget = {});

/// mx(q,q) = weak q, mx(∞,q) = strong q, and weak ≤ dual ≤ primal ≤ strong
/// at (s_mid, q).
LawReport endpoints_law(const VectorFamily& fam, const Exponent& q, const Exponent& s_mid, const Budget& budget = {});

} // namespace summa
