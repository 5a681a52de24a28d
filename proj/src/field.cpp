#include "ewens/field.hpp"

#include "ewens/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>

namespace ewens {
namespace {

// Scalar policy: the same formulas run over exact rationals (integer beta)
// or doubles (general beta).
struct ExactOps {
    using Scalar = Rational;
    static Scalar pow_neg_beta(const Rational& base, const InverseTemperature& beta) {
        return pow_rational(base, -beta.as_integer());
    }
    static Scalar from(const Rational& r) { return r; }
    static double view(const Scalar& s) { return to_double(s); }
    static Scalar abs_value(const Scalar& s) { return s < 0 ? Scalar(-s) : s; }
};

struct RealOps {
    using Scalar = double;
    static Scalar pow_neg_beta(const Rational& base, const InverseTemperature& beta) {
        return std::pow(to_double(base), -beta.as_double());
    }
    static Scalar from(const Rational& r) { return to_double(r); }
    static double view(Scalar s) { return s; }
    static Scalar abs_value(Scalar s) { return std::fabs(s); }
};

ScalarValue make_scalar(const Rational& r) { return ScalarValue::of(r); }
ScalarValue make_scalar(double d) { return ScalarValue::of(d); }

Occupancy occupancy_of_values(const std::vector<int>& values) {
    std::map<int, unsigned> freq;
    for (int v : values) ++freq[v];
    Occupancy occ;
    occ.size = values.size();
    occ.counts.assign(values.size(), 0);
    for (const auto& [spin, count] : freq) ++occ.counts[count - 1];
    return occ;
}

std::map<int, unsigned> spin_frequencies(const std::vector<int>& values) {
    std::map<int, unsigned> freq;
    for (int v : values) ++freq[v];
    return freq;
}

// Distinct occupancies are few (partitions of the region size), so the exact
// weights are memoized per enumeration sweep.
using WeightCache = std::map<std::vector<unsigned>, Rational>;

const Rational& cached_weight(const std::vector<int>& values, const MutationRate& theta,
                              WeightCache& cache) {
    Occupancy occ = occupancy_of_values(values);
    auto [it, inserted] = cache.try_emplace(occ.counts);
    if (inserted) it->second = ewens_weight(occ, theta);
    return it->second;
}

std::uint64_t checked_state_count(unsigned q, std::size_t vertex_count, std::uint64_t cap) {
    std::uint64_t states = 1;
    for (std::size_t i = 0; i < vertex_count; ++i) {
        if (q != 0 && states > cap / q) {
            throw ResourceError("configuration count " + std::to_string(q) + "^" +
                                std::to_string(vertex_count) + " exceeds the enumeration budget of " +
                                std::to_string(cap) + " states");
        }
        states *= q;
    }
    if (states > cap) {
        throw ResourceError("configuration count exceeds the enumeration budget of " +
                            std::to_string(cap) + " states");
    }
    return states;
}

void require_alphabet(unsigned q) {
    if (q == 0) throw DomainError("alphabet size must be positive");
}

void require_base_region(const SpinConfiguration& sigma, const GrowthStep& step) {
    if (sigma.region.k != step.base.k || sigma.region.vertices != step.base.vertices) {
        throw StructureError("configuration does not live on the step's base region");
    }
}

template <class Ops>
typename Ops::Scalar field_weight_impl(const SpinConfiguration& sigma, const MutationRate& theta,
                                       const InverseTemperature& beta, const FieldTable& fields,
                                       const std::set<TreeAddress>& boundary) {
    for (const auto& x : boundary) {
        if (!sigma.region.contains(x)) {
            throw StructureError("boundary vertex " + x.str() + " lies outside the region");
        }
    }
    typename Ops::Scalar out = Ops::pow_neg_beta(ewens_weight(sigma, theta), beta);
    for (const auto& x : boundary) out = out * Ops::from(fields.g(sigma.spin_at(x), x));
    return out;
}

template <class Ops>
typename Ops::Scalar partition_function_impl(const TreeRegion& region, const MutationRate& theta,
                                             const InverseTemperature& beta,
                                             const FieldTable& fields, unsigned q,
                                             const std::set<TreeAddress>& boundary,
                                             EnumerationBudget budget) {
    require_alphabet(q);
    std::vector<TreeAddress> verts(region.vertices.begin(), region.vertices.end());
    std::vector<std::size_t> boundary_idx;
    for (const auto& x : boundary) {
        auto it = std::find(verts.begin(), verts.end(), x);
        if (it == verts.end()) {
            throw StructureError("boundary vertex " + x.str() + " lies outside the region");
        }
        boundary_idx.push_back(static_cast<std::size_t>(it - verts.begin()));
    }
    WeightCache cache;
    typename Ops::Scalar total{};
    for_each_configuration(
        region, q,
        [&](const std::vector<int>& values) {
            typename Ops::Scalar term = Ops::pow_neg_beta(cached_weight(values, theta, cache), beta);
            for (std::size_t idx : boundary_idx) {
                term = term * Ops::from(fields.g(values[idx], verts[idx]));
            }
            total = total + term;
        },
        budget);
    return total;
}

template <class Ops>
typename Ops::Scalar consistency_rhs_impl(const SpinConfiguration& sigma_lambda,
                                          const GrowthStep& step, const MutationRate& theta,
                                          const InverseTemperature& beta, const FieldTable& fields,
                                          unsigned q) {
    require_base_region(sigma_lambda, step);
    const Occupancy occ = occupancy(sigma_lambda);
    const std::map<int, unsigned> freq = spin_frequencies(sigma_lambda.values());
    const typename Ops::Scalar g_u =
        Ops::from(fields.g(sigma_lambda.spin_at(step.anchor), step.anchor));
    typename Ops::Scalar total{};
    if (fields.mode == FieldMode::finite_alphabet) {
        require_alphabet(q);
        for (unsigned s = 0; s < q; ++s) {
            auto it = freq.find(static_cast<int>(s));
            const unsigned m = it == freq.end() ? 0 : it->second;
            const Rational factor = increment_factor(occ, m, theta).factor;
            total = total + Ops::pow_neg_beta(factor, beta) *
                                Ops::from(fields.g(static_cast<int>(s), step.added)) / g_u;
        }
    } else {
        // Spins present in sigma contribute individually; the countably many
        // fresh spins share one factor, so their fields aggregate into the
        // explicit entries at v not used by sigma plus the tail mass G_v.
        for (const auto& [spin, m] : freq) {
            const Rational factor = increment_factor(occ, m, theta).factor;
            total = total +
                    Ops::pow_neg_beta(factor, beta) * Ops::from(fields.g(spin, step.added)) / g_u;
        }
        Rational fresh_fields = fields.tail(step.added);
        for (const auto& [key, value] : fields.entries) {
            if (key.second == step.added && freq.find(key.first) == freq.end()) {
                fresh_fields += value;
            }
        }
        const Rational fresh_factor = increment_factor(occ, 0, theta).factor;
        total = total + Ops::pow_neg_beta(fresh_factor, beta) * Ops::from(fresh_fields) / g_u;
    }
    return total;
}

template <class Ops>
ConsistencyReport marginal_check_impl(const GrowthStep& step, const MutationRate& theta,
                                      const InverseTemperature& beta, const FieldTable& fields,
                                      unsigned q, EnumerationBudget budget) {
    require_alphabet(q);
    using Scalar = typename Ops::Scalar;
    const TreeRegion& lambda = step.base;
    TreeRegion delta = lambda;
    delta.insert(step.added);
    checked_state_count(q, delta.size(), budget.max_states);

    std::vector<TreeAddress> verts(lambda.vertices.begin(), lambda.vertices.end());
    const std::size_t anchor_idx = static_cast<std::size_t>(
        std::find(verts.begin(), verts.end(), step.anchor) - verts.begin());

    WeightCache cache;
    std::vector<std::vector<int>> configs;
    std::vector<Scalar> lambda_weights;
    std::vector<Scalar> delta_sums;
    for_each_configuration(
        lambda, q,
        [&](const std::vector<int>& values) {
            Scalar w_lambda = Ops::pow_neg_beta(cached_weight(values, theta, cache), beta) *
                              Ops::from(fields.g(values[anchor_idx], step.anchor));
            Scalar over_added{};
            std::vector<int> extended = values;
            extended.push_back(0);
            for (unsigned s = 0; s < q; ++s) {
                extended.back() = static_cast<int>(s);
                over_added = over_added +
                             Ops::pow_neg_beta(cached_weight(extended, theta, cache), beta) *
                                 Ops::from(fields.g(static_cast<int>(s), step.added));
            }
            configs.push_back(values);
            lambda_weights.push_back(std::move(w_lambda));
            delta_sums.push_back(std::move(over_added));
        },
        budget);

    Scalar z_lambda{};
    Scalar z_delta{};
    for (std::size_t c = 0; c < configs.size(); ++c) {
        z_lambda = z_lambda + lambda_weights[c];
        z_delta = z_delta + delta_sums[c];
    }

    ConsistencyReport report;
    report.step = step;
    report.theta = theta.value;
    report.beta = beta.value;
    report.q = q;
    report.mode = fields.mode;
    report.z_ratio_enumeration = make_scalar(z_delta / z_lambda);
    report.z_ratio_esf = ScalarValue::of(esf_ratio(static_cast<unsigned>(lambda.size()), theta));

    Scalar max_abs{};
    for (std::size_t c = 0; c < configs.size(); ++c) {
        Scalar residual = delta_sums[c] / z_delta - lambda_weights[c] / z_lambda;
        Scalar magnitude = Ops::abs_value(residual);
        if (magnitude > max_abs) max_abs = magnitude;
        SpinConfiguration sigma = SpinConfiguration::from_values(lambda, configs[c]);
        Scalar rhs = consistency_rhs_impl<Ops>(sigma, step, theta, beta, fields, q);
        report.rhs_values.push_back({configs[c], make_scalar(rhs)});
        report.residuals.push_back({configs[c], make_scalar(residual)});
    }
    report.max_abs_residual = make_scalar(max_abs);
    report.verdict = Ops::view(max_abs) <= k_consistency_tolerance ? Verdict::consistent
                                                                   : Verdict::inconsistent;
    return report;
}

}  // namespace

long long InverseTemperature::as_integer() const {
    if (!is_integer()) {
        throw DomainError("inverse temperature " + format_rational(value) +
                          " is not an integer; the exact path requires integer beta");
    }
    const Int num = numerator(value);
    if (num > (std::numeric_limits<long long>::max)() ||
        num < (std::numeric_limits<long long>::min)()) {
        throw DomainError("inverse temperature magnitude is too large");
    }
    return num.convert_to<long long>();
}

FieldTable FieldTable::uniform() {
    FieldTable table;
    table.default_one = true;
    return table;
}

Rational FieldTable::g(int spin, const TreeAddress& x) const {
    auto it = entries.find({spin, x});
    if (it != entries.end()) {
        if (it->second <= 0) {
            throw DomainError("field entry for spin " + std::to_string(spin) + " at " + x.str() +
                              " must be positive");
        }
        return it->second;
    }
    if (default_one) return Rational(1);
    throw MissingEntryError("no field entry for spin " + std::to_string(spin) + " at vertex " +
                            x.str());
}

Rational FieldTable::tail(const TreeAddress& x) const {
    if (mode != FieldMode::explicit_tail) {
        throw DomainError("tail mass is only defined in explicit-tail mode");
    }
    auto it = tail_mass.find(x);
    if (it == tail_mass.end()) {
        throw MissingEntryError("no tail mass recorded at vertex " + x.str());
    }
    if (it->second < 0) {
        throw DomainError("tail mass at " + x.str() + " must be nonnegative");
    }
    return it->second;
}

void FieldTable::set(int spin, const TreeAddress& x, Rational value) {
    if (value <= 0) {
        throw DomainError("field entry for spin " + std::to_string(spin) + " at " + x.str() +
                          " must be positive");
    }
    entries[{spin, x}] = std::move(value);
}

void FieldTable::set_tail(const TreeAddress& x, Rational mass) {
    if (mass < 0) {
        throw DomainError("tail mass at " + x.str() + " must be nonnegative");
    }
    mode = FieldMode::explicit_tail;
    tail_mass[x] = std::move(mass);
}

Rational field_weight(const SpinConfiguration& sigma, const MutationRate& theta,
                      const InverseTemperature& beta, const FieldTable& fields,
                      const std::set<TreeAddress>& boundary) {
    return field_weight_impl<ExactOps>(sigma, theta, beta, fields, boundary);
}

double field_weight_real(const SpinConfiguration& sigma, const MutationRate& theta,
                         const InverseTemperature& beta, const FieldTable& fields,
                         const std::set<TreeAddress>& boundary) {
    return field_weight_impl<RealOps>(sigma, theta, beta, fields, boundary);
}

Rational region_partition_function(const TreeRegion& region, const MutationRate& theta,
                                   const InverseTemperature& beta, const FieldTable& fields,
                                   unsigned q, const std::set<TreeAddress>& boundary,
                                   EnumerationBudget budget) {
    return partition_function_impl<ExactOps>(region, theta, beta, fields, q, boundary, budget);
}

double region_partition_function_real(const TreeRegion& region, const MutationRate& theta,
                                      const InverseTemperature& beta, const FieldTable& fields,
                                      unsigned q, const std::set<TreeAddress>& boundary,
                                      EnumerationBudget budget) {
    return partition_function_impl<RealOps>(region, theta, beta, fields, q, boundary, budget);
}

Rational esf_ratio(unsigned region_size, const MutationRate& theta) {
    return (Rational(region_size) + theta.value) / Rational(region_size + 1);
}

Rational multiplicative_kernel(const GrowthStep& step, const SpinConfiguration& sigma_delta,
                               const MutationRate& theta, const InverseTemperature& beta,
                               const FieldTable& fields, unsigned q, ZConvention convention,
                               EnumerationBudget budget) {
    TreeRegion delta = step.base;
    delta.insert(step.added);
    if (sigma_delta.region.k != delta.k || sigma_delta.region.vertices != delta.vertices) {
        throw StructureError("configuration does not live on the step's grown region");
    }
    const SpinConfiguration sigma_lambda = restrict_configuration(sigma_delta, step.base);
    const int added_spin = sigma_delta.spin_at(step.added);

    Rational z_ratio;  // Z_Lambda / Z_Delta
    if (convention == ZConvention::enumeration) {
        const Rational z_lambda =
            region_partition_function(step.base, theta, beta, fields, q, {step.anchor}, budget);
        const Rational z_delta =
            region_partition_function(delta, theta, beta, fields, q, {step.added}, budget);
        z_ratio = z_lambda / z_delta;
    } else {
        z_ratio = Rational(1) / esf_ratio(static_cast<unsigned>(step.base.size()), theta);
    }

    const IncrementFactor inc = increment_factor(sigma_lambda, added_spin, theta);
    return z_ratio * pow_rational(inc.factor, -beta.as_integer()) *
           fields.g(added_spin, step.added) /
           fields.g(sigma_lambda.spin_at(step.anchor), step.anchor);
}

Rational consistency_rhs(const SpinConfiguration& sigma_lambda, const GrowthStep& step,
                         const MutationRate& theta, const InverseTemperature& beta,
                         const FieldTable& fields, unsigned q) {
    return consistency_rhs_impl<ExactOps>(sigma_lambda, step, theta, beta, fields, q);
}

double consistency_rhs_real(const SpinConfiguration& sigma_lambda, const GrowthStep& step,
                            const MutationRate& theta, const InverseTemperature& beta,
                            const FieldTable& fields, unsigned q) {
    return consistency_rhs_impl<RealOps>(sigma_lambda, step, theta, beta, fields, q);
}

ConsistencyReport marginal_check(const GrowthStep& step, const MutationRate& theta,
                                 const InverseTemperature& beta, const FieldTable& fields,
                                 unsigned q, EnumerationBudget budget) {
    if (fields.mode != FieldMode::finite_alphabet) {
        throw DomainError("the marginalization audit requires a finite alphabet");
    }
    if (beta.is_integer()) {
        return marginal_check_impl<ExactOps>(step, theta, beta, fields, q, budget);
    }
    return marginal_check_impl<RealOps>(step, theta, beta, fields, q, budget);
}

SolveResult solve_boundary_field(const GrowthStep& step, const MutationRate& theta,
                                 const InverseTemperature& beta, unsigned q,
                                 const FieldTable& fixed_fields, SolveOptions options) {
    require_alphabet(q);
    if (fixed_fields.mode != FieldMode::finite_alphabet) {
        throw DomainError("the boundary-field solver requires a finite alphabet");
    }
    checked_state_count(q, step.base.size() + 1, options.budget.max_states);

    // Per configuration sigma_Lambda the consistency right side is a linear
    // form sum_s row[s] * g_s in the unknown fields at the added vertex.
    const double beta_d = beta.as_double();
    std::vector<TreeAddress> verts(step.base.vertices.begin(), step.base.vertices.end());
    const std::size_t anchor_idx = static_cast<std::size_t>(
        std::find(verts.begin(), verts.end(), step.anchor) - verts.begin());
    std::vector<std::vector<double>> rows;
    for_each_configuration(
        step.base, q,
        [&](const std::vector<int>& values) {
            const Occupancy occ = occupancy_of_values(values);
            const std::map<int, unsigned> freq = spin_frequencies(values);
            const double g_u =
                to_double(fixed_fields.g(values[anchor_idx], step.anchor));
            std::vector<double> row(q);
            for (unsigned s = 0; s < q; ++s) {
                auto it = freq.find(static_cast<int>(s));
                const unsigned m = it == freq.end() ? 0 : it->second;
                const Rational factor = increment_factor(occ, m, theta).factor;
                row[s] = std::pow(to_double(factor), -beta_d) / g_u;
            }
            rows.push_back(std::move(row));
        },
        options.budget);

    std::vector<double> log_g(q, 0.0);
    for (unsigned s = 0; s < q; ++s) {
        auto it = fixed_fields.entries.find({static_cast<int>(s), step.added});
        if (it != fixed_fields.entries.end()) log_g[s] = std::log(to_double(it->second));
    }

    // Damped multiplicative updates: each spin's field moves toward the value
    // that would pull its weighted right sides onto the geometric mean.
    SolverStats stats;
    std::vector<double> g(q), rhs(rows.size());
    for (unsigned iter = 0;; ++iter) {
        for (unsigned s = 0; s < q; ++s) g[s] = std::exp(log_g[s]);
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        double mean_log = 0.0;
        for (std::size_t c = 0; c < rows.size(); ++c) {
            double r = 0.0;
            for (unsigned s = 0; s < q; ++s) r += rows[c][s] * g[s];
            rhs[c] = r;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
            mean_log += std::log(r);
        }
        mean_log /= static_cast<double>(rows.size());
        stats.iterations = iter;
        stats.spread = hi > 0 ? (hi - lo) / hi : 0.0;
        if (stats.spread <= options.tolerance) {
            stats.converged = true;
            break;
        }
        if (iter >= options.max_iterations) break;

        const double target = std::exp(mean_log);
        double shift = 0.0;
        for (unsigned s = 0; s < q; ++s) {
            double pulled = 0.0;
            double mass = 0.0;
            for (std::size_t c = 0; c < rows.size(); ++c) {
                const double weight = rows[c][s] * g[s] / rhs[c];
                pulled += weight * (target / rhs[c]);
                mass += weight;
            }
            log_g[s] += options.damping * std::log(pulled / mass);
            shift += log_g[s];
        }
        shift /= static_cast<double>(q);
        for (unsigned s = 0; s < q; ++s) log_g[s] -= shift;  // fix the gauge
    }

    SolveResult result;
    result.fields = fixed_fields;
    for (unsigned s = 0; s < q; ++s) {
        // cpp_rational embeds the solved double exactly, so the audit below
        // sees precisely the table we report.
        result.fields.set(static_cast<int>(s), step.added, Rational(std::exp(log_g[s])));
    }
    result.stats = stats;
    result.report = marginal_check(step, theta, beta, result.fields, q, options.budget);
    result.report.solver = stats;
    if (!stats.converged) result.report.verdict = Verdict::unresolved;
    return result;
}

void for_each_configuration(const TreeRegion& region, unsigned q,
                            const std::function<void(const std::vector<int>&)>& fn,
                            EnumerationBudget budget) {
    require_alphabet(q);
    checked_state_count(q, region.size(), budget.max_states);
    std::vector<int> values(region.size(), 0);
    for (;;) {
        fn(values);
        std::size_t pos = values.size();
        for (;;) {
            if (pos == 0) return;
            --pos;
            if (++values[pos] < static_cast<int>(q)) break;
            values[pos] = 0;
        }
    }
}

}  // namespace ewens
