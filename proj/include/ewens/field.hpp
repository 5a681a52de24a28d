#pragma once

#include "ewens/hamiltonian.hpp"
#include "ewens/partition.hpp"
#include "ewens/rational.hpp"
#include "ewens/tree.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace ewens {

// Inverse temperature entering exp{-beta H}. Sign is unrestricted; beta = -1
// with unit fields recovers the plain Ewens law. Integer values route the
// field machinery through exact rational arithmetic.
struct InverseTemperature {
    Rational value;

    explicit InverseTemperature(Rational v) : value(std::move(v)) {}
    explicit InverseTemperature(long long v) : value(v) {}

    bool is_integer() const { return denominator(value) == 1; }
    long long as_integer() const;
    double as_double() const { return to_double(value); }
};

enum class FieldMode { finite_alphabet, explicit_tail };

// Boundary fields stored multiplicatively: g_{t,x} = exp(h_{t,x}) > 0 per
// (spin, vertex). In explicit-tail mode a vertex additionally carries the
// aggregate mass G_x of all spins without an explicit entry, standing in for
// the countably many unused spin values.
struct FieldTable {
    FieldMode mode = FieldMode::finite_alphabet;
    bool default_one = false;  // absent entries read as g = 1
    std::map<std::pair<int, TreeAddress>, Rational> entries;
    std::map<TreeAddress, Rational> tail_mass;

    static FieldTable uniform();  // g identically 1

    Rational g(int spin, const TreeAddress& x) const;  // throws MissingEntryError
    Rational tail(const TreeAddress& x) const;         // explicit-tail mode only
    void set(int spin, const TreeAddress& x, Rational value);  // requires value > 0
    void set_tail(const TreeAddress& x, Rational mass);  // mass >= 0; switches to explicit_tail
};

inline constexpr double k_consistency_tolerance = 1e-10;

struct EnumerationBudget {
    std::uint64_t max_states = 10'000'000;
};

// Unnormalized finite-dimensional weight
//   (exp H_Lambda)^{-beta} * prod_{x in boundary} g_{sigma(x),x}.
// Boundary vertices must lie in the region and carry spins. Exact overload
// requires integer beta.
Rational field_weight(const SpinConfiguration& sigma, const MutationRate& theta,
                      const InverseTemperature& beta, const FieldTable& fields,
                      const std::set<TreeAddress>& boundary);
double field_weight_real(const SpinConfiguration& sigma, const MutationRate& theta,
                         const InverseTemperature& beta, const FieldTable& fields,
                         const std::set<TreeAddress>& boundary);

// Z_Lambda by exhaustive summation of field_weight over all q^{|Lambda|}
// configurations with spins in {0..q-1}.
Rational region_partition_function(const TreeRegion& region, const MutationRate& theta,
                                   const InverseTemperature& beta, const FieldTable& fields,
                                   unsigned q, const std::set<TreeAddress>& boundary = {},
                                   EnumerationBudget budget = {});
double region_partition_function_real(const TreeRegion& region, const MutationRate& theta,
                                      const InverseTemperature& beta, const FieldTable& fields,
                                      unsigned q, const std::set<TreeAddress>& boundary = {},
                                      EnumerationBudget budget = {});

// Closed-form normalizer ratio Z_{n+1}/Z_n = (n + theta)/(n + 1).
Rational esf_ratio(unsigned region_size, const MutationRate& theta);

// Which Z_Delta/Z_Lambda enters the multiplicative kernel: the exhaustive
// finite-alphabet sum, or the closed-form ESF ratio.
enum class ZConvention { enumeration, esf_closed_form };

// One-step kernel P_{Delta,Lambda} = (Z_Lambda/Z_Delta) * factor^{-beta}
//                                    * g_{sigma(v),v} / g_{sigma(u),u}.
Rational multiplicative_kernel(const GrowthStep& step, const SpinConfiguration& sigma_delta,
                               const MutationRate& theta, const InverseTemperature& beta,
                               const FieldTable& fields, unsigned q, ZConvention convention,
                               EnumerationBudget budget = {});

// Right side of the one-step consistency equation for a fixed sigma_Lambda:
// fresh spins contribute (theta/(b_1+1))^{-beta} g_{s,v}/g_{sigma(u),u},
// spins present with multiplicity i0 contribute
// (i0 b_{i0}/((i0+1)(b_{i0+1}+1)))^{-beta} g_{s,v}/g_{sigma(u),u}.
// In explicit-tail mode the fresh sum collapses to the tail mass G_v.
Rational consistency_rhs(const SpinConfiguration& sigma_lambda, const GrowthStep& step,
                         const MutationRate& theta, const InverseTemperature& beta,
                         const FieldTable& fields, unsigned q);
double consistency_rhs_real(const SpinConfiguration& sigma_lambda, const GrowthStep& step,
                            const MutationRate& theta, const InverseTemperature& beta,
                            const FieldTable& fields, unsigned q);

// Exact value when the computation ran in rational arithmetic, plus a double
// view for reporting either way.
struct ScalarValue {
    double approx = 0.0;
    std::optional<Rational> exact;

    static ScalarValue of(const Rational& r) { return ScalarValue{to_double(r), r}; }
    static ScalarValue of(double d) { return ScalarValue{d, std::nullopt}; }
};

struct ConfigScalar {
    std::vector<int> config;  // spins of sigma_Lambda in vertex order
    ScalarValue value;
};

enum class Verdict { consistent, inconsistent, unresolved };

struct SolverStats {
    bool converged = false;
    unsigned iterations = 0;
    double spread = 0.0;
};

struct ConsistencyReport {
    GrowthStep step;
    Rational theta;
    Rational beta;
    unsigned q = 0;
    FieldMode mode = FieldMode::finite_alphabet;
    std::vector<ConfigScalar> rhs_values;        // consistency equation right sides
    std::vector<ConfigScalar> residuals;         // marginalization residuals
    ScalarValue max_abs_residual;
    ScalarValue z_ratio_enumeration;             // Z_Delta/Z_Lambda, exhaustive
    ScalarValue z_ratio_esf;                     // (|Lambda|+theta)/(|Lambda|+1)
    Verdict verdict = Verdict::inconsistent;
    std::optional<SolverStats> solver;
};

// Brute-force consistency audit: for every sigma_Lambda in {0..q-1}^Lambda,
//   residual = sum_s P_Delta(sigma_Lambda v s) - P_Lambda(sigma_Lambda),
// each P normalized by its own exhaustive partition function, with the field
// factors taken at the anchor (for Lambda) and the added vertex (for Delta).
ConsistencyReport marginal_check(const GrowthStep& step, const MutationRate& theta,
                                 const InverseTemperature& beta, const FieldTable& fields,
                                 unsigned q, EnumerationBudget budget = {});

struct SolveOptions {
    double damping = 0.5;
    double tolerance = 1e-12;   // max relative spread of the rhs values
    unsigned max_iterations = 10'000;
    EnumerationBudget budget = {};
};

struct SolveResult {
    FieldTable fields;
    ConsistencyReport report;
    SolverStats stats;
};

// Damped multiplicative fixed point on the log-fields at the added vertex,
// driving the consistency right side to a common value across all
// sigma_Lambda. Non-convergence is reported, not thrown; the consistency
// equation is one constraint per configuration against q unknowns, so an
// exact solution need not exist.
SolveResult solve_boundary_field(const GrowthStep& step, const MutationRate& theta,
                                 const InverseTemperature& beta, unsigned q,
                                 const FieldTable& fixed_fields, SolveOptions options = {});

// Sweeps all q^{|region|} spin assignments in vertex order; fn receives the
// value vector. Used by the enumeration machinery and the test suites.
void for_each_configuration(const TreeRegion& region, unsigned q,
                            const std::function<void(const std::vector<int>&)>& fn,
                            EnumerationBudget budget = {});

}  // namespace ewens
