#pragma once

#include "ewens/rational.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <vector>

namespace ewens {

// Scaled mutation rate theta > 0, kept exact so normalization identities can
// be checked with zero tolerance.
struct MutationRate {
    Rational value;

    explicit MutationRate(Rational v);
    explicit MutationRate(long long v) : MutationRate(Rational(v)) {}

    double as_double() const { return to_double(value); }
};

// Multiplicity vector (a_1, ..., a_n): a_j distinct alleles appear exactly j
// times, with sum j*a_j = n enforced at construction.
struct AlleleCounts {
    unsigned n = 0;
    std::vector<unsigned> counts;  // counts[j-1] = a_j, size n

    AlleleCounts(unsigned n, std::vector<unsigned> counts);

    // Builds the multiplicity vector of a partition given as parts,
    // e.g. {2,1} -> a = (1,1,0) for n = 3.
    static AlleleCounts from_parts(const std::vector<unsigned>& parts);

    // Parts in descending order, e.g. (1,1,0) -> {2,1}.
    std::vector<unsigned> parts() const;

    unsigned at(unsigned j) const { return (j >= 1 && j <= n) ? counts[j - 1] : 0; }

    auto operator<=>(const AlleleCounts&) const = default;
};

struct EsfProbability {
    Rational value;  // in [0, 1]
};

// All multiplicity vectors with sum j*a_j = n, each exactly once, ordered
// lexicographically descending on the reversed tuple (a_n, ..., a_1). This
// matches the usual parts enumeration n; n-1+1; ...; 1+1+...+1.
std::vector<AlleleCounts> enumerate_partitions(unsigned n);

// Z_n(theta) = theta (theta+1) ... (theta+n-1) / n!
Rational esf_normalizer(unsigned n, const MutationRate& theta);

// P(a; theta) = (1/Z_n) prod_j (theta/j)^{a_j} / a_j!
EsfProbability esf_probability(const AlleleCounts& a, const MutationRate& theta);

struct CrpSample {
    std::vector<unsigned> labels;  // group label per item, labels issued in order of creation
    AlleleCounts counts;
};

// Sequential Chinese restaurant sampler: item i+1 joins an existing group of
// size m with probability m/(i+theta) and opens a new group with probability
// theta/(i+theta). Deterministic for a fixed seed.
CrpSample crp_sample(unsigned n, const MutationRate& theta, std::uint64_t seed);

// Cycle-type law of a uniform permutation of n elements, by exhaustive
// enumeration of all n! permutations; equals the ESF at theta = 1.
// Bounded at n <= 8.
std::map<AlleleCounts, Rational> permutation_cycle_oracle(unsigned n);

}  // namespace ewens
