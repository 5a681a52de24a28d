#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ewens/errors.hpp"
#include "ewens/field.hpp"
#include "ewens/hamiltonian.hpp"
#include "ewens/partition.hpp"

#include <cmath>
#include <map>
#include <vector>

using namespace ewens;

namespace {

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

SpinConfiguration config_of(const std::vector<int>& values) {
    return SpinConfiguration::from_values(path_region(values.size()), values);
}

AlleleCounts induced_partition(const std::vector<int>& values) {
    std::map<int, unsigned> freq;
    for (int v : values) ++freq[v];
    std::vector<unsigned> parts;
    for (const auto& [spin, count] : freq) parts.push_back(count);
    return AlleleCounts::from_parts(parts);
}

}  // namespace

TEST_CASE("occupancy counts group sizes") {
    const Occupancy occ = occupancy(config_of({4, 4, 9, 4, 7}));
    CHECK(occ.size == 5);
    CHECK(occ.at(1) == 2);  // spins 9 and 7
    CHECK(occ.at(2) == 0);
    CHECK(occ.at(3) == 1);  // spin 4
    CHECK(occ.at(4) == 0);
    CHECK(occ.at(17) == 0);  // out of range reads as zero
}

TEST_CASE("weight of pinned configurations") {
    MutationRate one{Rational(1)};
    // Two vertices, same spin: (theta/2)/1! = 1/2. Distinct: theta^2/2! = 1/2.
    CHECK(ewens_weight(config_of({5, 5}), one) == Rational(1, 2));
    CHECK(ewens_weight(config_of({5, 6}), one) == Rational(1, 2));

    MutationRate two{Rational(2)};
    // (a,a,b): b_1 = 1, b_2 = 1 -> (2/1)^1/1! * (2/2)^1/1! = 2.
    CHECK(ewens_weight(config_of({0, 0, 1}), two) == Rational(2));
    // Three distinct spins: (2/1)^3/3! = 4/3.
    CHECK(ewens_weight(config_of({0, 1, 2}), two) == Rational(4, 3));

    // The weight sees only the occupancy, not which spins are used.
    CHECK(ewens_weight(config_of({8, 8, 3}), two) == ewens_weight(config_of({1, 1, 2}), two));
}

TEST_CASE("weight reproduces the sampling formula times the normalizer") {
    for (const Rational& t : {Rational(1, 2), Rational(1), Rational(3)}) {
        MutationRate theta{t};
        for (unsigned size = 1; size <= 6; ++size) {
            const TreeRegion region = path_region(size);
            const Rational normalizer = esf_normalizer(size, theta);
            for_each_configuration(region, 3, [&](const std::vector<int>& values) {
                const SpinConfiguration sigma = SpinConfiguration::from_values(region, values);
                const Rational expected =
                    esf_probability(induced_partition(values), theta).value * normalizer;
                CHECK(ewens_weight(sigma, theta) == expected);
                CHECK(config_probability(sigma, theta) ==
                      esf_probability(induced_partition(values), theta).value);
            });
        }
    }
}

TEST_CASE("log view matches the exact weight") {
    MutationRate theta{Rational(7, 3)};
    const SpinConfiguration sigma = config_of({0, 0, 1, 2, 2, 2});
    CHECK(hamiltonian_value(sigma, theta) ==
          doctest::Approx(std::log(to_double(ewens_weight(sigma, theta)))).epsilon(1e-12));
}

TEST_CASE("probability needs a nonempty region") {
    SpinConfiguration empty;
    CHECK_THROWS_AS(config_probability(empty, MutationRate{Rational(1)}), DomainError);
}

TEST_CASE("increment factor: pinned cases") {
    MutationRate one{Rational(1)};
    MutationRate three{Rational(3)};

    // Fresh spin into (0,0): b_1 = 0 -> theta/(0+1).
    const IncrementFactor fresh = increment_factor(config_of({0, 0}), 7, three);
    CHECK(fresh.kind == IncrementCase::fresh);
    CHECK(fresh.factor == Rational(3));

    // Repeating the pair spin: i0 = 2, b_2 = 1, b_3 = 0 -> 2*1/(3*1) = 2/3.
    const IncrementFactor rep = increment_factor(config_of({0, 0}), 0, one);
    CHECK(rep.kind == IncrementCase::repeat);
    CHECK(rep.i0 == 2);
    CHECK(rep.factor == Rational(2, 3));

    // Joining a singleton while another singleton exists: i0 = 1, b_1 = 2,
    // b_2 = 0 -> 1*2/(2*1) = 1.
    const IncrementFactor join = increment_factor(config_of({0, 1}), 0, one);
    CHECK(join.factor == Rational(1));

    // Inconsistent request: multiplicity 2 claimed but no pair exists.
    Occupancy occ;
    occ.size = 2;
    occ.counts = {2, 0};
    CHECK_THROWS_AS(increment_factor(occ, 2, one), ConstraintError);
}

TEST_CASE("increment factor equals the exact weight ratio, exhaustively") {
    for (const Rational& t : {Rational(1, 2), Rational(1), Rational(3)}) {
        MutationRate theta{t};
        for (unsigned size = 1; size <= 5; ++size) {
            const TreeRegion region = path_region(size);
            const TreeRegion grown = path_region(size + 1);
            for_each_configuration(region, 5, [&](const std::vector<int>& values) {
                const SpinConfiguration sigma = SpinConfiguration::from_values(region, values);
                const Rational base = ewens_weight(sigma, theta);
                for (int s = 0; s < 5; ++s) {
                    std::vector<int> extended = values;
                    extended.push_back(s);
                    const Rational ratio =
                        ewens_weight(SpinConfiguration::from_values(grown, extended), theta) /
                        base;
                    const IncrementFactor inc = increment_factor(sigma, s, theta);
                    CHECK(inc.factor == ratio);
                    CHECK(inc.i0 == multiplicity(sigma, s));
                    CHECK((inc.kind == IncrementCase::fresh) == (multiplicity(sigma, s) == 0));
                }
            });
        }
    }
}

TEST_CASE("multiplicity counts occurrences") {
    const SpinConfiguration sigma = config_of({2, 2, 5, 2});
    CHECK(multiplicity(sigma, 2) == 3);
    CHECK(multiplicity(sigma, 5) == 1);
    CHECK(multiplicity(sigma, 0) == 0);
}

TEST_CASE("sup-norm terms of the potential") {
    MutationRate one{Rational(1)};
    CHECK(potential_sup_term(1, one) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(potential_sup_term(2, one) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    // ln(100!) to machine precision via the exact integer.
    CHECK(potential_sup_term(100, one) == doctest::Approx(363.73937555556349).epsilon(1e-13));

    MutationRate half{Rational(1, 2)};
    CHECK(potential_sup_term(1, half) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    MutationRate ten{Rational(10)};
    CHECK(potential_sup_term(2, ten) ==
          doctest::Approx(2 * std::log(10.0) - std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("divergence scan finds the first crossing") {
    MutationRate one{Rational(1)};
    const SummabilityReport report = summability_scan(one, 100.0, 500);
    REQUIRE(report.crossing.has_value());
    CHECK(*report.crossing == 38);
    CHECK(report.divergent);
    CHECK(potential_sup_term(38, one) > 100.0);
    CHECK(potential_sup_term(37, one) <= 100.0);
    CHECK(*report.crossing <= report.stirling_index);
    CHECK(stirling_crossing_index(one, 100.0) == report.stirling_index);

    // Small pinned crossings.
    CHECK(*summability_scan(one, 0.5, 50).crossing == 2);  // t_2 = ln 2
    CHECK(*summability_scan(MutationRate{Rational(10)}, 0.1, 50).crossing == 1);
    CHECK(*summability_scan(MutationRate{Rational(1, 2)}, 0.5, 50).crossing == 1);

    // An unreachable bound within a shallow scan: no crossing, not divergent.
    const SummabilityReport shallow = summability_scan(one, 1'000'000.0, 64);
    CHECK_FALSE(shallow.crossing.has_value());
    CHECK_FALSE(shallow.divergent);
    CHECK(shallow.n_max == 64);
    CHECK_FALSE(shallow.probes.empty());
}

TEST_CASE("terms dip before the sign change, then grow") {
    MutationRate ten{Rational(10)};
    // theta = 10: t_n falls from n = 10 to n = 11 ...
    CHECK(potential_sup_term(11, ten) < potential_sup_term(10, ten));
    // ... so monotonicity only holds beyond the index where theta^n/n!
    // drops under 1 (n = 25 for theta = 10).
    const double log_theta = std::log(10.0);
    CHECK(25 * log_theta - std::lgamma(26.0) < 0.0);
    CHECK(24 * log_theta - std::lgamma(25.0) > 0.0);
    for (unsigned n = 25; n < 200; ++n) {
        CHECK(potential_sup_term(n + 1, ten) >= potential_sup_term(n, ten));
    }
}
