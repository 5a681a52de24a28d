#include "ewens/partition.hpp"

#include "ewens/errors.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace ewens {

MutationRate::MutationRate(Rational v) : value(std::move(v)) {
    if (value <= 0) throw DomainError("mutation rate must be positive, got " + format_rational(value));
}

AlleleCounts::AlleleCounts(unsigned n_, std::vector<unsigned> counts_) : n(n_), counts(std::move(counts_)) {
    if (n == 0) throw DomainError("allele counts need n >= 1");
    if (counts.size() != n)
        throw ConstraintError("allele counts vector must have length n");
    unsigned long long weighted = 0;
    for (unsigned j = 1; j <= n; ++j) weighted += (unsigned long long)j * counts[j - 1];
    if (weighted != n)
        throw ConstraintError("allele counts must satisfy sum j*a_j = n");
}

AlleleCounts AlleleCounts::from_parts(const std::vector<unsigned>& parts) {
    unsigned n = std::accumulate(parts.begin(), parts.end(), 0u);
    if (n == 0) throw DomainError("empty partition");
    std::vector<unsigned> counts(n, 0);
    for (unsigned p : parts) {
        if (p == 0 || p > n) throw ConstraintError("invalid part size");
        ++counts[p - 1];
    }
    return AlleleCounts(n, std::move(counts));
}

std::vector<unsigned> AlleleCounts::parts() const {
    std::vector<unsigned> out;
    for (unsigned j = n; j >= 1; --j)
        for (unsigned c = 0; c < counts[j - 1]; ++c) out.push_back(j);
    return out;
}

namespace {

void emit_partitions(unsigned remaining, unsigned max_part, std::vector<unsigned>& parts,
                     unsigned n, std::vector<AlleleCounts>& out) {
    if (remaining == 0) {
        std::vector<unsigned> counts(n, 0);
        for (unsigned p : parts) ++counts[p - 1];
        out.emplace_back(n, std::move(counts));
        return;
    }
    for (unsigned p = std::min(remaining, max_part); p >= 1; --p) {
        parts.push_back(p);
        emit_partitions(remaining - p, p, parts, n, out);
        parts.pop_back();
    }
}

}  // namespace

std::vector<AlleleCounts> enumerate_partitions(unsigned n) {
    if (n == 0) throw DomainError("partitions are enumerated for n >= 1 only");
    std::vector<AlleleCounts> out;
    std::vector<unsigned> parts;
    emit_partitions(n, n, parts, n, out);
    return out;
}

Rational esf_normalizer(unsigned n, const MutationRate& theta) {
    if (n == 0) throw DomainError("normalizer Z_n is defined for n >= 1 only");
    Rational rising = 1;
    for (unsigned i = 0; i < n; ++i) rising *= theta.value + i;
    return rising / Rational(factorial(n));
}

EsfProbability esf_probability(const AlleleCounts& a, const MutationRate& theta) {
    Rational w = 1;
    for (unsigned j = 1; j <= a.n; ++j) {
        unsigned aj = a.counts[j - 1];
        if (aj == 0) continue;
        w *= pow_rational(theta.value / j, aj);
        w /= Rational(factorial(aj));
    }
    return EsfProbability{w / esf_normalizer(a.n, theta)};
}

namespace {

// Platform-stable uniform in [0, 1): top 53 bits of the generator output.
double next_unit(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

CrpSample crp_sample(unsigned n, const MutationRate& theta, std::uint64_t seed) {
    if (n == 0) throw DomainError("sampler needs n >= 1");
    double th = theta.as_double();
    std::mt19937_64 rng(seed);
    std::vector<unsigned> labels;
    std::vector<unsigned> group_sizes;
    labels.reserve(n);
    for (unsigned i = 0; i < n; ++i) {
        double u = next_unit(rng) * (double(i) + th);
        unsigned label = (unsigned)group_sizes.size();
        double acc = 0;
        for (unsigned g = 0; g < group_sizes.size(); ++g) {
            acc += double(group_sizes[g]);
            if (u < acc) {
                label = g;
                break;
            }
        }
        if (label == group_sizes.size())
            group_sizes.push_back(1);
        else
            ++group_sizes[label];
        labels.push_back(label);
    }
    std::vector<unsigned> counts(n, 0);
    for (unsigned size : group_sizes) ++counts[size - 1];
    return CrpSample{std::move(labels), AlleleCounts(n, std::move(counts))};
}

std::map<AlleleCounts, Rational> permutation_cycle_oracle(unsigned n) {
    if (n == 0) throw DomainError("cycle oracle needs n >= 1");
    if (n > 8) throw ResourceError("cycle oracle enumerates n! permutations; capped at n = 8");
    std::vector<unsigned> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    std::map<AlleleCounts, Rational> tally;
    Rational total = Rational(factorial(n));
    do {
        std::vector<unsigned> counts(n, 0);
        std::vector<bool> seen(n, false);
        for (unsigned start = 0; start < n; ++start) {
            if (seen[start]) continue;
            unsigned len = 0;
            for (unsigned v = start; !seen[v]; v = perm[v]) {
                seen[v] = true;
                ++len;
            }
            ++counts[len - 1];
        }
        tally[AlleleCounts(n, std::move(counts))] += Rational(1) / total;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return tally;
}

}  // namespace ewens
