#include "ewens/hamiltonian.hpp"

#include "ewens/errors.hpp"

#include <cmath>
#include <map>

namespace ewens {

Occupancy occupancy(const SpinConfiguration& sigma) {
    std::map<int, unsigned> freq;
    for (const auto& [v, s] : sigma.spins) {
        (void)v;
        ++freq[s];
    }
    Occupancy occ;
    occ.size = sigma.size();
    occ.counts.assign(occ.size, 0);
    for (const auto& [s, m] : freq) {
        (void)s;
        ++occ.counts[m - 1];
    }
    return occ;
}

Rational ewens_weight(const Occupancy& occ, const MutationRate& theta) {
    Rational w = 1;
    for (std::size_t j = 1; j <= occ.counts.size(); ++j) {
        unsigned bj = occ.counts[j - 1];
        if (bj == 0) continue;
        w *= pow_rational(theta.value / (unsigned long long)j, bj);
        w /= Rational(factorial(bj));
    }
    return w;
}

Rational ewens_weight(const SpinConfiguration& sigma, const MutationRate& theta) {
    return ewens_weight(occupancy(sigma), theta);
}

double hamiltonian_value(const SpinConfiguration& sigma, const MutationRate& theta) {
    return log_rational(ewens_weight(sigma, theta));
}

Rational config_probability(const SpinConfiguration& sigma, const MutationRate& theta) {
    if (sigma.size() == 0) throw DomainError("configuration probability needs a nonempty region");
    return ewens_weight(sigma, theta) / esf_normalizer((unsigned)sigma.size(), theta);
}

IncrementFactor increment_factor(const Occupancy& occ, unsigned m, const MutationRate& theta) {
    if (m == 0) {
        Rational factor = theta.value / Rational(occ.at(1) + 1);
        return IncrementFactor{factor, IncrementCase::fresh, 0};
    }
    unsigned b_m = occ.at(m);
    if (b_m == 0)
        throw ConstraintError("occupancy has no value of multiplicity " + std::to_string(m));
    Rational factor = Rational((unsigned long long)m * b_m) /
                      Rational((unsigned long long)(m + 1) * (occ.at(m + 1) + 1));
    return IncrementFactor{factor, IncrementCase::repeat, m};
}

IncrementFactor increment_factor(const SpinConfiguration& sigma, int s, const MutationRate& theta) {
    return increment_factor(occupancy(sigma), multiplicity(sigma, s), theta);
}

unsigned multiplicity(const SpinConfiguration& sigma, int s) {
    unsigned m = 0;
    for (const auto& [v, spin] : sigma.spins) {
        (void)v;
        if (spin == s) ++m;
    }
    return m;
}

double potential_sup_term(unsigned n, const MutationRate& theta) {
    if (n == 0) throw DomainError("sup-norm term is defined for n >= 1");
    double log_theta = log_rational(theta.value);
    return std::fabs(double(n) * log_theta - std::lgamma(double(n) + 1.0));
}

unsigned stirling_crossing_index(const MutationRate& theta, double bound) {
    if (bound <= 0) throw DomainError("bound must be positive");
    double log_theta = log_rational(theta.value);
    for (unsigned n = 1;; ++n) {
        double lower = double(n) * (std::log(double(n)) - 1.0 - log_theta);
        if (lower > bound) return n;
        if (n > 100'000'000u) throw ResourceError("no Stirling crossing below 1e8");
    }
}

SummabilityReport summability_scan(const MutationRate& theta, double bound, unsigned n_max) {
    if (bound <= 0) throw DomainError("bound must be positive");
    if (n_max == 0) throw DomainError("scan needs n_max >= 1");
    SummabilityReport report;
    report.theta = theta.value;
    report.bound = bound;
    report.n_max = n_max;
    report.stirling_index = stirling_crossing_index(theta, bound);
    unsigned stride = 1;
    for (unsigned n = 1; n <= n_max; ++n) {
        double t = potential_sup_term(n, theta);
        if (n == stride || t > bound || n == n_max) {
            report.probes.emplace_back(n, t);
            if (n == stride) stride *= 2;
        }
        if (t > bound) {
            report.crossing = n;
            report.divergent = true;
            break;
        }
    }
    return report;
}

}  // namespace ewens
