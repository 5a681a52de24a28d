#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ewens/errors.hpp"
#include "ewens/partition.hpp"
#include "ewens/verify.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <vector>

using namespace ewens;

namespace {

// Independent partition counter: coin-style DP over part sizes.
unsigned long long partition_count(unsigned n) {
    std::vector<unsigned long long> ways(n + 1, 0);
    ways[0] = 1;
    for (unsigned part = 1; part <= n; ++part) {
        for (unsigned total = part; total <= n; ++total) {
            ways[total] += ways[total - part];
        }
    }
    return ways[n];
}

const std::vector<Rational> k_theta_grid = {Rational(1, 2), Rational(1), Rational(2),
                                            Rational(7, 3)};

}  // namespace

TEST_CASE("mutation rate must be positive") {
    CHECK_THROWS_AS(MutationRate{Rational(0)}, DomainError);
    CHECK_THROWS_AS(MutationRate{Rational(-1, 2)}, DomainError);
    CHECK_NOTHROW(MutationRate{Rational(7, 3)});
}

TEST_CASE("allele counts validate the weighted-sum constraint") {
    CHECK_NOTHROW(AlleleCounts(3, {1, 1, 0}));
    CHECK_THROWS_AS(AlleleCounts(3, {1, 0, 0}), ConstraintError);
    CHECK_THROWS_AS(AlleleCounts(3, {1, 1}), ConstraintError);
    CHECK_THROWS_AS(AlleleCounts(0, {}), DomainError);

    const AlleleCounts a = AlleleCounts::from_parts({3, 1, 1});
    CHECK(a.n == 5);
    CHECK(a.counts == std::vector<unsigned>{2, 0, 1, 0, 0});
    CHECK(a.parts() == std::vector<unsigned>{3, 1, 1});
    CHECK(a.at(1) == 2);
    CHECK(a.at(3) == 1);
    CHECK(a.at(5) == 0);
}

TEST_CASE("partition enumeration matches an independent counter") {
    for (unsigned n = 1; n <= 12; ++n) {
        const auto partitions = enumerate_partitions(n);
        CHECK(partitions.size() == partition_count(n));
        std::set<std::vector<unsigned>> seen;
        for (const auto& a : partitions) {
            CHECK(a.n == n);
            unsigned long long weighted = 0;
            for (unsigned j = 1; j <= n; ++j) weighted += 1ull * j * a.at(j);
            CHECK(weighted == n);
            CHECK(seen.insert(a.counts).second);  // no duplicates
        }
    }
    CHECK(enumerate_partitions(12).size() == 77);
    CHECK_THROWS_AS(enumerate_partitions(0), DomainError);
}

TEST_CASE("partitions arrive in descending-parts order") {
    const auto partitions = enumerate_partitions(4);
    std::vector<std::vector<unsigned>> parts;
    for (const auto& a : partitions) parts.push_back(a.parts());
    const std::vector<std::vector<unsigned>> expected = {
        {4}, {3, 1}, {2, 2}, {2, 1, 1}, {1, 1, 1, 1}};
    CHECK(parts == expected);
}

TEST_CASE("normalizer is the rising factorial over n!") {
    MutationRate one{Rational(1)};
    for (unsigned n = 1; n <= 10; ++n) {
        CHECK(esf_normalizer(n, one) == Rational(1));
    }
    CHECK(esf_normalizer(4, MutationRate{Rational(7, 3)}) == Rational(1820, 243));
    CHECK(esf_normalizer(3, MutationRate{Rational(1, 2)}) == Rational(5, 16));
    CHECK_THROWS_AS(esf_normalizer(0, one), DomainError);
}

TEST_CASE("three-element table at rate one") {
    MutationRate theta{Rational(1)};
    std::map<std::vector<unsigned>, Rational> table;
    for (const auto& a : enumerate_partitions(3)) {
        table[a.parts()] = esf_probability(a, theta).value;
    }
    CHECK(table.at({3}) == Rational(1, 3));
    CHECK(table.at({2, 1}) == Rational(1, 2));
    CHECK(table.at({1, 1, 1}) == Rational(1, 6));
}

TEST_CASE("probabilities normalize exactly across rates") {
    for (const Rational& t : k_theta_grid) {
        MutationRate theta{t};
        for (unsigned n = 1; n <= 12; ++n) {
            Rational total = 0;
            for (const auto& a : enumerate_partitions(n)) {
                const Rational p = esf_probability(a, theta).value;
                CHECK(p > 0);
                total += p;
            }
            CHECK(total == Rational(1));
        }
    }
}

TEST_CASE("cycle-type census of the symmetric group") {
    // Frozen n = 4 census: 4-cycles 6, 3+1 8, 2+2 3, 2+1+1 6, identity 1.
    const auto census = permutation_cycle_oracle(4);
    std::map<std::vector<unsigned>, Rational> by_parts;
    for (const auto& [a, p] : census) by_parts[a.parts()] = p;
    CHECK(by_parts.at({4}) == Rational(6, 24));
    CHECK(by_parts.at({3, 1}) == Rational(8, 24));
    CHECK(by_parts.at({2, 2}) == Rational(3, 24));
    CHECK(by_parts.at({2, 1, 1}) == Rational(6, 24));
    CHECK(by_parts.at({1, 1, 1, 1}) == Rational(1, 24));

    CHECK_THROWS_AS(permutation_cycle_oracle(9), ResourceError);
    CHECK_THROWS_AS(permutation_cycle_oracle(0), DomainError);
}

TEST_CASE("rate-one probabilities equal cycle-type frequencies") {
    MutationRate one{Rational(1)};
    for (unsigned n = 1; n <= 6; ++n) {
        const auto census = permutation_cycle_oracle(n);
        CHECK(census.size() == enumerate_partitions(n).size());
        for (const auto& [a, frequency] : census) {
            CHECK(esf_probability(a, one).value == frequency);
        }
    }
}

TEST_CASE("general rates reweight the census by groups") {
    // P(a; theta) = census(a) * theta^{#groups} / normalizer(n, theta).
    for (const Rational& t : {Rational(2), Rational(1, 2), Rational(7, 3)}) {
        MutationRate theta{t};
        for (unsigned n = 1; n <= 6; ++n) {
            const Rational normalizer = esf_normalizer(n, theta);
            for (const auto& [a, frequency] : permutation_cycle_oracle(n)) {
                unsigned groups = 0;
                for (unsigned c : a.counts) groups += c;
                const Rational expected = frequency * pow_rational(t, groups) / normalizer;
                CHECK(esf_probability(a, theta).value == expected);
            }
        }
    }
}

TEST_CASE("sampler is deterministic per seed and internally consistent") {
    MutationRate theta{Rational(2)};
    const CrpSample a = crp_sample(6, theta, 12345);
    const CrpSample b = crp_sample(6, theta, 12345);
    CHECK(a.labels == b.labels);
    CHECK(a.counts.counts == b.counts.counts);
    CHECK(a.labels.size() == 6);
    CHECK(a.labels[0] == 0);  // first item always opens group 0

    // Labels are issued consecutively and the counts match the label tally.
    std::map<unsigned, unsigned> sizes;
    unsigned max_label = 0;
    for (unsigned label : a.labels) {
        ++sizes[label];
        max_label = std::max(max_label, label);
    }
    CHECK(sizes.size() == max_label + 1);
    std::vector<unsigned> counts(6, 0);
    for (const auto& [label, size] : sizes) ++counts[size - 1];
    CHECK(a.counts.counts == counts);

    CHECK(crp_sample(6, theta, 1).labels != crp_sample(6, theta, 2).labels);
    CHECK_THROWS_AS(crp_sample(0, theta, 1), DomainError);
}

TEST_CASE("sampler matches the exact law at goodness-of-fit level") {
    MutationRate theta{Rational(1)};
    const unsigned n = 5;
    const unsigned long long samples = 20'000;
    const auto partitions = enumerate_partitions(n);
    std::map<std::vector<unsigned>, std::size_t> index;
    for (std::size_t i = 0; i < partitions.size(); ++i) index[partitions[i].counts] = i;
    std::vector<unsigned long long> observed(partitions.size(), 0);
    for (unsigned long long seed = 0; seed < samples; ++seed) {
        ++observed[index.at(crp_sample(n, theta, 0xABCDEFull + seed).counts.counts)];
    }
    double statistic = 0;
    for (std::size_t i = 0; i < partitions.size(); ++i) {
        const double expected =
            to_double(esf_probability(partitions[i], theta).value) * double(samples);
        const double diff = double(observed[i]) - expected;
        statistic += diff * diff / expected;
    }
    const double p = chi_square_p_value(statistic, unsigned(partitions.size()) - 1);
    CHECK(p >= 0.001);
}
