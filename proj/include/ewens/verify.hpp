#pragma once

#include "ewens/field.hpp"
#include "ewens/hamiltonian.hpp"
#include "ewens/partition.hpp"
#include "ewens/tree.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ewens {

// quick caps every sweep so the whole battery stays well under a minute;
// full runs the depths used by the acceptance gate.
enum class VerifyLevel { quick, full };

struct CheckFailure {
    std::string name;    // instance that failed
    std::string detail;  // expected vs actual
};

struct SuiteReport {
    std::string suite;
    unsigned checks = 0;
    unsigned failures = 0;
    double seconds = 0.0;
    std::vector<CheckFailure> failed;  // first few failures, for diagnosis
};

struct VerificationReport {
    VerifyLevel level = VerifyLevel::quick;
    std::vector<SuiteReport> suites;
    unsigned total_checks = 0;
    unsigned total_failures = 0;

    bool passed() const { return total_failures == 0; }
};

// The one-vertex increment used by the increment-consistency suite is drawn
// through this hook, so a deliberately broken variant can be injected to
// demonstrate that the battery actually detects a wrong factor.
struct VerifyHooks {
    std::function<IncrementFactor(const Occupancy&, unsigned, const MutationRate&)> increment;

    static VerifyHooks standard();
    static VerifyHooks inverted_increment();  // reciprocal factor for repeats
};

VerificationReport run_verification(VerifyLevel level,
                                    const VerifyHooks& hooks = VerifyHooks::standard());

// Upper tail of the chi-square distribution with `dof` degrees of freedom;
// the goodness-of-fit p-value for the sampler checks.
double chi_square_p_value(double statistic, unsigned dof);

}  // namespace ewens
