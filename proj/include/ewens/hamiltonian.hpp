#pragma once

#include "ewens/partition.hpp"
#include "ewens/rational.hpp"
#include "ewens/tree.hpp"

#include <optional>
#include <vector>

namespace ewens {

// Occupancy spectrum of a configuration: counts[j-1] = number of distinct
// spin values appearing exactly j times. sum j*b_j equals the region size.
struct Occupancy {
    std::size_t size = 0;
    std::vector<unsigned> counts;  // b_1 .. b_size

    unsigned at(std::size_t j) const { return (j >= 1 && j <= counts.size()) ? counts[j - 1] : 0; }
};

Occupancy occupancy(const SpinConfiguration& sigma);

// Multiplicative Boltzmann weight exp{H_Lambda} = prod_j (theta/j)^{b_j} / b_j!,
// carried exactly. Depends on sigma only through its occupancy.
Rational ewens_weight(const Occupancy& occ, const MutationRate& theta);
Rational ewens_weight(const SpinConfiguration& sigma, const MutationRate& theta);

// H_Lambda itself, as a derived double-precision view of the exact weight.
double hamiltonian_value(const SpinConfiguration& sigma, const MutationRate& theta);

// exp{H}/Z_{|Lambda|}; equals the ESF probability of the induced partition.
Rational config_probability(const SpinConfiguration& sigma, const MutationRate& theta);

enum class IncrementCase { fresh, repeat };

// Multiplicative one-vertex increment: extending sigma by a spin s multiplies
// the weight by `factor`. Fresh spins give theta/(b_1+1); a spin already
// present i0 times gives i0*b_{i0} / ((i0+1)(b_{i0+1}+1)).
struct IncrementFactor {
    Rational factor;
    IncrementCase kind = IncrementCase::fresh;
    unsigned i0 = 0;  // multiplicity of the added spin in sigma (repeat case)
};

// Core form, driven by the occupancy and the added spin's multiplicity.
IncrementFactor increment_factor(const Occupancy& occ, unsigned multiplicity_of_spin,
                                 const MutationRate& theta);
IncrementFactor increment_factor(const SpinConfiguration& sigma, int s, const MutationRate& theta);

// Occurrence count of spin s in sigma (the i0 entering the repeat case).
unsigned multiplicity(const SpinConfiguration& sigma, int s);

// Per-region sup-norm of the Ewens potential: t_n = |n ln theta - ln n!|,
// attained at j = 1, b_1 = n. Computed through lgamma.
double potential_sup_term(unsigned n, const MutationRate& theta);

// Smallest n with n (ln n - 1 - ln theta) > bound; at that index t_n > bound
// is guaranteed by the Stirling lower bound ln n! >= n ln n - n.
unsigned stirling_crossing_index(const MutationRate& theta, double bound);

struct SummabilityReport {
    Rational theta;
    double bound = 0;
    unsigned n_max = 0;
    std::vector<std::pair<unsigned, double>> probes;  // sampled (n, t_n)
    std::optional<unsigned> crossing;                 // first n with t_n > bound
    unsigned stirling_index = 0;                      // guaranteed crossing bound
    bool divergent = false;
};

// Scans t_n for n = 1..n_max and reports the first threshold crossing; a
// crossing certifies that the potential's sup-norm series cannot converge.
SummabilityReport summability_scan(const MutationRate& theta, double bound, unsigned n_max);

}  // namespace ewens
