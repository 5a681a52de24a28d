#include "ewens/verify.hpp"

#include "ewens/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <utility>

namespace ewens {
namespace {

constexpr std::size_t k_max_recorded_failures = 8;

// Accumulates one suite's results; failures keep a short expected/actual note.
class SuiteRun {
  public:
    explicit SuiteRun(std::string name) : report_{} { report_.suite = std::move(name); }

    void check(bool ok, const std::string& name, const std::string& detail) {
        ++report_.checks;
        if (ok) return;
        ++report_.failures;
        if (report_.failed.size() < k_max_recorded_failures) {
            report_.failed.push_back({name, detail});
        }
    }

    template <class T>
    void check_equal(const T& actual, const T& expected, const std::string& name) {
        if (actual == expected) {
            check(true, name, "");
            return;
        }
        std::ostringstream detail;
        detail << "expected " << printable(expected) << ", got " << printable(actual);
        check(false, name, detail.str());
    }

    SuiteReport finish(double seconds) {
        report_.seconds = seconds;
        return std::move(report_);
    }

  private:
    static std::string printable(const Rational& value) { return format_rational(value); }
    static std::string printable(double value) { return format_decimal(value); }
    template <class T>
    static std::string printable(const T& value) {
        std::ostringstream out;
        out << value;
        return out.str();
    }

    SuiteReport report_;
};

struct Depth {
    unsigned esf_n_max;          // normalization sweep
    unsigned oracle_n_max;       // permutation census comparison
    unsigned region_size_max;    // increment and consistency sweeps
    unsigned alphabet_max;       // spin alphabet in exhaustive sweeps
    unsigned ball_radius;        // tree-structure sweeps
    unsigned ratio_n_max;        // closed-form normalizer ratio sweep
    unsigned crp_samples;        // goodness-of-fit sample count
    unsigned consistency_size;   // base-region cap for the field identity
    unsigned summability_n_max;  // divergence scan depth
};

Depth depth_for(VerifyLevel level) {
    if (level == VerifyLevel::quick) {
        return Depth{8, 5, 3, 3, 2, 10, 20'000, 3, 2'000};
    }
    return Depth{12, 7, 5, 5, 3, 20, 100'000, 4, 20'000};
}

std::vector<Rational> theta_grid(VerifyLevel level) {
    if (level == VerifyLevel::quick) return {Rational(1, 2), Rational(1), Rational(2)};
    return {Rational(1, 2), Rational(1), Rational(2), Rational(7, 3)};
}

// A path region of the requested size on the 3-regular tree: root, 0, 0.0, ...
TreeRegion path_region(std::size_t size) {
    TreeRegion region(2);
    TreeAddress v;
    region.insert(v);
    for (std::size_t i = 1; i < size; ++i) {
        v = v.child(0);
        region.insert(v);
    }
    return region;
}

// Deterministic rational in [1/16, 16] built from the generator.
Rational random_field_value(std::mt19937_64& rng) {
    const unsigned p = static_cast<unsigned>(rng() % 16) + 1;
    const unsigned q = static_cast<unsigned>(rng() % 16) + 1;
    return Rational(p, q);
}

std::string config_label(const std::vector<int>& values) {
    std::string out;
    for (int v : values) out += static_cast<char>('0' + v);
    return out;
}

void run_partition_normalization(SuiteRun& suite, const Depth& depth, VerifyLevel level) {
    for (const Rational& t : theta_grid(level)) {
        MutationRate theta{t};
        for (unsigned n = 1; n <= depth.esf_n_max; ++n) {
            Rational total = 0;
            bool positive = true;
            for (const AlleleCounts& a : enumerate_partitions(n)) {
                const Rational p = esf_probability(a, theta).value;
                if (p <= 0) positive = false;
                total += p;
            }
            const std::string label =
                "n=" + std::to_string(n) + " theta=" + format_rational(t);
            suite.check_equal(total, Rational(1), "normalization " + label);
            suite.check(positive, "positivity " + label, "a partition received weight <= 0");
        }
    }
}

void run_partition_oracle(SuiteRun& suite, const Depth& depth) {
    // The sampling formula at theta reweights the uniform cycle-type census
    // by theta^{#groups} / (normalizer * n!divided out already).
    const std::vector<Rational> thetas = {Rational(1), Rational(2), Rational(1, 2)};
    for (unsigned n = 1; n <= depth.oracle_n_max; ++n) {
        const auto census = permutation_cycle_oracle(n);
        for (const Rational& t : thetas) {
            MutationRate theta{t};
            const Rational normalizer = esf_normalizer(n, theta);
            for (const auto& [a, uniform_probability] : census) {
                unsigned groups = 0;
                for (unsigned c : a.counts) groups += c;
                const Rational expected =
                    uniform_probability * pow_rational(t, groups) / normalizer;
                const Rational actual = esf_probability(a, theta).value;
                std::ostringstream name;
                name << "census n=" << n << " theta=" << format_rational(t) << " parts=";
                for (unsigned p : a.parts()) name << p << ".";
                suite.check_equal(actual, expected, name.str());
            }
        }
    }
}

void run_partition_sampler(SuiteRun& suite, const Depth& depth) {
    struct Instance {
        unsigned n;
        Rational theta;
        std::uint64_t seed_base;
    };
    const std::vector<Instance> instances = {
        {4, Rational(2), 0x00E5F00Dull},
        {6, Rational(1), 0x10E5F00Dull},
    };
    for (const auto& inst : instances) {
        MutationRate theta{inst.theta};
        const auto partitions = enumerate_partitions(inst.n);
        std::map<std::vector<unsigned>, std::size_t> index;
        for (std::size_t i = 0; i < partitions.size(); ++i) index[partitions[i].counts] = i;
        std::vector<unsigned long long> observed(partitions.size(), 0);
        for (unsigned long long s = 0; s < depth.crp_samples; ++s) {
            const CrpSample sample = crp_sample(inst.n, theta, inst.seed_base + s);
            ++observed[index.at(sample.counts.counts)];
        }
        double statistic = 0;
        for (std::size_t i = 0; i < partitions.size(); ++i) {
            const double expected =
                to_double(esf_probability(partitions[i], theta).value) *
                static_cast<double>(depth.crp_samples);
            const double diff = static_cast<double>(observed[i]) - expected;
            statistic += diff * diff / expected;
        }
        const double p = chi_square_p_value(statistic, static_cast<unsigned>(partitions.size()) - 1);
        std::ostringstream name;
        name << "sampler fit n=" << inst.n << " theta=" << format_rational(inst.theta)
             << " samples=" << depth.crp_samples;
        std::ostringstream detail;
        detail << "chi-square p-value " << format_decimal(p) << " below 0.001 (statistic "
               << format_decimal(statistic) << ")";
        suite.check(p >= 0.001, name.str(), detail.str());
    }
}

void run_tree_structure(SuiteRun& suite, const Depth& depth) {
    // Ball sizes against the closed-form vertex count.
    for (unsigned k = 1; k <= 3; ++k) {
        for (unsigned r = 0; r <= depth.ball_radius + 2; ++r) {
            const TreeRegion ball = build_ball(k, r);
            unsigned long long expected = 1;
            if (k == 1) {
                expected = 1 + 2ull * r;
            } else {
                unsigned long long shell = k + 1;  // vertices at distance exactly 1
                for (unsigned d = 1; d <= r; ++d) {
                    expected += shell;
                    shell *= k;
                }
            }
            suite.check_equal(static_cast<unsigned long long>(ball.size()), expected,
                              "ball size k=" + std::to_string(k) + " r=" + std::to_string(r));
        }
    }

    // Every outer-boundary vertex of a connected region has exactly one
    // neighbor inside, so the growth anchor is well defined.
    const TreeRegion ball = build_ball(2, depth.ball_radius);
    const auto regions = connected_subregions(ball, depth.region_size_max + 1);
    for (const auto& region : regions) {
        for (const TreeAddress& v : outer_boundary(region)) {
            unsigned inside = 0;
            for (const TreeAddress& w : region.neighbors(v)) {
                if (region.contains(w)) ++inside;
            }
            std::string name = "anchor uniqueness |L|=" + std::to_string(region.size()) +
                               " v=" + v.str();
            suite.check_equal(static_cast<unsigned long long>(inside), 1ull, name);
            if (inside == 1) {
                const GrowthStep step = growth_step(region, v);
                suite.check(region.adjacent(step.anchor, v), "anchor adjacency v=" + v.str(),
                            "growth step returned a non-adjacent anchor");
            }
        }
    }

    // One-vertex boundary update identity.
    for (const auto& region : regions) {
        for (const TreeAddress& v : outer_boundary(region)) {
            TreeRegion grown = region;
            grown.insert(v);
            std::set<TreeAddress> expected = outer_boundary(region);
            expected.erase(v);
            for (const TreeAddress& w : region.neighbors(v)) {
                if (!grown.contains(w)) expected.insert(w);
            }
            suite.check(outer_boundary(grown) == expected,
                        "boundary update |L|=" + std::to_string(region.size()) + " v=" + v.str(),
                        "grown boundary does not match the one-step update");
        }
    }
}

void run_weight_identities(SuiteRun& suite, const Depth& depth, VerifyLevel level) {
    // The multiplicative weight, normalized per region size, must reproduce
    // the sampling formula of the induced partition.
    for (const Rational& t : theta_grid(level)) {
        MutationRate theta{t};
        for (unsigned size = 1; size <= depth.region_size_max; ++size) {
            const TreeRegion region = path_region(size);
            const Rational normalizer = esf_normalizer(size, theta);
            for_each_configuration(region, std::min(depth.alphabet_max, size + 1u),
                                   [&](const std::vector<int>& values) {
                                       SpinConfiguration sigma =
                                           SpinConfiguration::from_values(region, values);
                                       std::vector<unsigned> parts;
                                       std::map<int, unsigned> freq;
                                       for (int v : values) ++freq[v];
                                       for (const auto& [spin, count] : freq) {
                                           parts.push_back(count);
                                       }
                                       const AlleleCounts a = AlleleCounts::from_parts(parts);
                                       const Rational expected =
                                           esf_probability(a, theta).value * normalizer;
                                       suite.check_equal(
                                           ewens_weight(sigma, theta), expected,
                                           "weight " + config_label(values) +
                                               " theta=" + format_rational(t));
                                   });
        }
    }
}

void run_increment_consistency(SuiteRun& suite, const Depth& depth, VerifyLevel level,
                               const VerifyHooks& hooks) {
    // Exhaustive sweep: extending any configuration by one spin multiplies its
    // weight by exactly the one-vertex increment factor.
    for (const Rational& t : theta_grid(level)) {
        MutationRate theta{t};
        for (unsigned size = 1; size <= depth.region_size_max; ++size) {
            const TreeRegion region = path_region(size);
            const TreeRegion grown = path_region(size + 1);
            for_each_configuration(region, depth.alphabet_max, [&](const std::vector<int>& values) {
                SpinConfiguration sigma = SpinConfiguration::from_values(region, values);
                const Rational base_weight = ewens_weight(sigma, theta);
                const Occupancy occ = occupancy(sigma);
                for (unsigned s = 0; s < depth.alphabet_max; ++s) {
                    std::vector<int> extended = values;
                    extended.push_back(static_cast<int>(s));
                    SpinConfiguration sigma_ext =
                        SpinConfiguration::from_values(grown, extended);
                    const Rational expected = ewens_weight(sigma_ext, theta) / base_weight;
                    const IncrementFactor inc =
                        hooks.increment(occ, multiplicity(sigma, static_cast<int>(s)), theta);
                    suite.check_equal(inc.factor, expected,
                                      "increment " + config_label(values) + "+" +
                                          std::to_string(s) + " theta=" + format_rational(t));
                }
            });
        }
    }
}

void run_ratio_identity(SuiteRun& suite, const Depth& depth, VerifyLevel level) {
    for (const Rational& t : theta_grid(level)) {
        MutationRate theta{t};
        for (unsigned n = 1; n <= depth.ratio_n_max; ++n) {
            const Rational expected = esf_normalizer(n + 1, theta) / esf_normalizer(n, theta);
            suite.check_equal(esf_ratio(n, theta), expected,
                              "normalizer ratio n=" + std::to_string(n) +
                                  " theta=" + format_rational(t));
        }
    }
}

void run_summability(SuiteRun& suite, const Depth& depth) {
    const std::vector<std::pair<Rational, double>> instances = {
        {Rational(1, 2), 10.0}, {Rational(1), 100.0}, {Rational(10), 100.0}};
    for (const auto& [t, bound] : instances) {
        MutationRate theta{t};
        const SummabilityReport report = summability_scan(theta, bound, depth.summability_n_max);
        const std::string label =
            "theta=" + format_rational(t) + " bound=" + format_decimal(bound);
        suite.check(report.crossing.has_value(), "crossing found " + label,
                    "no n with t_n above the bound within the scan");
        if (report.crossing) {
            suite.check(potential_sup_term(*report.crossing, theta) > bound,
                        "crossing exceeds bound " + label, "t at the crossing is not above");
            suite.check(*report.crossing <= report.stirling_index,
                        "crossing within Stirling bound " + label,
                        "closed-form index is below the observed crossing");
        }
        suite.check(report.divergent, "divergence flag " + label,
                    "crossing found but report not flagged divergent");

        // Beyond the index where theta^n/n! drops below 1, t_n increases.
        const double log_theta = log_rational(t);
        unsigned start = 1;
        while (start < 400 && static_cast<double>(start) * log_theta -
                                      std::lgamma(static_cast<double>(start) + 1) >
                                  0.0) {
            ++start;
        }
        bool monotone = true;
        for (unsigned n = start; n < start + 200; ++n) {
            if (potential_sup_term(n + 1, theta) < potential_sup_term(n, theta)) {
                monotone = false;
                break;
            }
        }
        suite.check(monotone, "eventual monotonicity " + label,
                    "t decreased beyond the sign-change index");
    }
}

void run_field_consistency(SuiteRun& suite, const Depth& depth, VerifyLevel level) {
    // Central identity: summing the grown region's normalized-free weight over
    // the added spin, relative to the base weight, equals the closed-form
    // right side assembled from increment factors and boundary fields.
    const std::vector<Rational> betas = {Rational(-1), Rational(0), Rational(1)};
    const std::vector<Rational> thetas = {Rational(1), Rational(1, 2)};
    const TreeRegion ball = build_ball(2, 2);
    const auto regions = connected_subregions(ball, depth.consistency_size);
    std::mt19937_64 rng(0xF1E1D5ull);
    unsigned instance = 0;
    for (const auto& region : regions) {
        const auto boundary = outer_boundary(region);
        if (boundary.empty()) continue;
        // Two boundary picks bound the sweep while covering distinct anchors.
        std::vector<TreeAddress> picks{*boundary.begin()};
        if (boundary.size() > 1) picks.push_back(*boundary.rbegin());
        for (const TreeAddress& v : picks) {
            const GrowthStep step = growth_step(region, v);
            TreeRegion delta = region;
            delta.insert(v);
            for (unsigned q = 2; q <= 3; ++q) {
                for (const Rational& b : betas) {
                    for (const Rational& t : thetas) {
                        ++instance;
                        if (level == VerifyLevel::quick && (instance % 3) != 0) continue;
                        MutationRate theta{t};
                        InverseTemperature beta{b};
                        FieldTable fields;
                        fields.default_one = false;
                        for (unsigned s = 0; s < q; ++s) {
                            fields.set(static_cast<int>(s), step.anchor,
                                       random_field_value(rng));
                            fields.set(static_cast<int>(s), step.added,
                                       random_field_value(rng));
                        }
                        for_each_configuration(
                            region, q, [&](const std::vector<int>& values) {
                                SpinConfiguration sigma =
                                    SpinConfiguration::from_values(region, values);
                                const Rational base = field_weight(sigma, theta, beta, fields,
                                                                   {step.anchor});
                                Rational total = 0;
                                for (unsigned s = 0; s < q; ++s) {
                                    SpinConfiguration ext = extend_configuration(
                                        sigma, step.added, static_cast<int>(s));
                                    total += field_weight(ext, theta, beta, fields,
                                                          {step.added});
                                }
                                const Rational expected =
                                    consistency_rhs(sigma, step, theta, beta, fields, q);
                                std::ostringstream name;
                                name << "one-step identity |L|=" << region.size() << " v="
                                     << v.str() << " q=" << q << " beta=" << format_rational(b)
                                     << " theta=" << format_rational(t) << " sigma="
                                     << config_label(values);
                                suite.check_equal(Rational(total / base), expected, name.str());
                            });
                    }
                }
            }
        }
    }
}

void run_field_audit(SuiteRun& suite, VerifyLevel level) {
    // The exhaustive marginalization audit and the solver, on pinned
    // instances with known outcomes.
    MutationRate theta1{Rational(1)};
    InverseTemperature beta_m1{Rational(-1)};
    const TreeRegion pair(2, {TreeAddress{}, TreeAddress{{0}}});
    const GrowthStep step = growth_step(pair, TreeAddress{{1}});

    const ConsistencyReport audit = marginal_check(step, theta1, beta_m1, FieldTable::uniform(), 2);
    suite.check(audit.verdict == Verdict::inconsistent, "unit fields detected inconsistent",
                "two-spin unit-field instance was not flagged");
    suite.check_equal(*audit.max_abs_residual.exact, Rational(1, 44),
                      "pinned residual two-spin unit fields");
    suite.check_equal(*audit.z_ratio_enumeration.exact, Rational(11, 6),
                      "pinned enumeration normalizer ratio");
    suite.check_equal(*audit.z_ratio_esf.exact, Rational(1), "pinned closed-form ratio");

    // Solvable instance: one vertex, unequal anchored fields.
    const TreeRegion single(2, {TreeAddress{}});
    const GrowthStep step1 = growth_step(single, TreeAddress{{0}});
    FieldTable anchored = FieldTable::uniform();
    anchored.set(0, TreeAddress{}, Rational(1));
    anchored.set(1, TreeAddress{}, Rational(2));
    const SolveResult solved =
        solve_boundary_field(step1, MutationRate{Rational(3)}, beta_m1, 2, anchored);
    suite.check(solved.stats.converged, "solver converges on solvable instance",
                "expected convergence, spread " + format_decimal(solved.stats.spread));
    suite.check(solved.report.verdict == Verdict::consistent,
                "solved table passes the audit",
                "max residual " + format_decimal(solved.report.max_abs_residual.approx));

    // beta = 0 washes the weight out entirely; uniform fields already solve it.
    const SolveResult flat = solve_boundary_field(step, theta1, InverseTemperature{Rational(0)}, 3,
                                                  FieldTable::uniform());
    suite.check(flat.stats.converged && flat.stats.iterations == 0,
                "weightless instance converges immediately",
                "iterations " + std::to_string(flat.stats.iterations));

    // Pinned unsolvable instance: the two right sides are linearly dependent
    // with mismatched coefficients, so the solver must report unresolved.
    const SolveResult stuck =
        solve_boundary_field(step, MutationRate{Rational(2)}, beta_m1, 3, FieldTable::uniform());
    suite.check(stuck.report.verdict == Verdict::unresolved, "contradictory instance unresolved",
                "expected unresolved, got converged=" + std::to_string(stuck.stats.converged));

    if (level == VerifyLevel::full) {
        // Kernel cross-check: under the enumeration convention the one-step
        // kernel is exactly the ratio of the two normalized probabilities.
        FieldTable fields = FieldTable::uniform();
        fields.set(0, step.added, Rational(3, 2));
        fields.set(1, step.added, Rational(5, 7));
        TreeRegion delta = pair;
        delta.insert(step.added);
        const Rational z_lambda =
            region_partition_function(pair, theta1, beta_m1, fields, 2, {step.anchor});
        const Rational z_delta =
            region_partition_function(delta, theta1, beta_m1, fields, 2, {step.added});
        for_each_configuration(delta, 2, [&](const std::vector<int>& values) {
            SpinConfiguration sigma_delta = SpinConfiguration::from_values(delta, values);
            const SpinConfiguration sigma_lambda = restrict_configuration(sigma_delta, pair);
            const Rational expected =
                (field_weight(sigma_delta, theta1, beta_m1, fields, {step.added}) / z_delta) /
                (field_weight(sigma_lambda, theta1, beta_m1, fields, {step.anchor}) / z_lambda);
            const Rational actual = multiplicative_kernel(step, sigma_delta, theta1, beta_m1,
                                                          fields, 2, ZConvention::enumeration);
            suite.check_equal(actual, expected, "kernel ratio sigma=" + config_label(values));
        });
    }
}

}  // namespace

VerifyHooks VerifyHooks::standard() {
    VerifyHooks hooks;
    hooks.increment = [](const Occupancy& occ, unsigned m, const MutationRate& theta) {
        return increment_factor(occ, m, theta);
    };
    return hooks;
}

VerifyHooks VerifyHooks::inverted_increment() {
    VerifyHooks hooks;
    hooks.increment = [](const Occupancy& occ, unsigned m, const MutationRate& theta) {
        IncrementFactor inc = increment_factor(occ, m, theta);
        if (inc.kind == IncrementCase::repeat) {
            inc.factor = Rational(1) / inc.factor;
        }
        return inc;
    };
    return hooks;
}

double chi_square_p_value(double statistic, unsigned dof) {
    if (dof == 0) throw DomainError("chi-square needs at least one degree of freedom");
    if (statistic <= 0) return 1.0;
    return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

VerificationReport run_verification(VerifyLevel level, const VerifyHooks& hooks) {
    const Depth depth = depth_for(level);
    VerificationReport report;
    report.level = level;

    const auto run = [&](const std::string& name, auto&& body) {
        SuiteRun suite(name);
        const auto start = std::chrono::steady_clock::now();
        body(suite);
        const auto stop = std::chrono::steady_clock::now();
        report.suites.push_back(
            suite.finish(std::chrono::duration<double>(stop - start).count()));
    };

    run("partition.normalization",
        [&](SuiteRun& s) { run_partition_normalization(s, depth, level); });
    run("partition.census", [&](SuiteRun& s) { run_partition_oracle(s, depth); });
    run("partition.sampler", [&](SuiteRun& s) { run_partition_sampler(s, depth); });
    run("tree.structure", [&](SuiteRun& s) { run_tree_structure(s, depth); });
    run("hamiltonian.weight", [&](SuiteRun& s) { run_weight_identities(s, depth, level); });
    run("hamiltonian.increment",
        [&](SuiteRun& s) { run_increment_consistency(s, depth, level, hooks); });
    run("hamiltonian.summability", [&](SuiteRun& s) { run_summability(s, depth); });
    run("field.ratio", [&](SuiteRun& s) { run_ratio_identity(s, depth, level); });
    run("field.consistency", [&](SuiteRun& s) { run_field_consistency(s, depth, level); });
    run("field.audit", [&](SuiteRun& s) { run_field_audit(s, level); });

    for (const SuiteReport& suite : report.suites) {
        report.total_checks += suite.checks;
        report.total_failures += suite.failures;
    }
    return report;
}

}  // namespace ewens
