#include "ewens/json_io.hpp"

#include "ewens/errors.hpp"

#include <string>
#include <utility>

namespace ewens {

Rational rational_from_json(const nlohmann::json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number_unsigned()) return Rational(j.get<unsigned long long>());
    throw DomainError("expected a rational as \"p/q\" string or integer, got " + j.dump());
}

nlohmann::json rational_to_json(const Rational& value) { return format_rational(value); }

void to_json(nlohmann::json& j, const ScalarValue& value) {
    j = nlohmann::json{{"decimal", value.approx}};
    if (value.exact) j["exact"] = format_rational(*value.exact);
}

void from_json(const nlohmann::json& j, ScalarValue& value) {
    if (j.contains("exact")) {
        value = ScalarValue::of(parse_rational(j.at("exact").get<std::string>()));
    } else {
        value = ScalarValue::of(j.at("decimal").get<double>());
    }
}

void to_json(nlohmann::json& j, const TreeAddress& address) { j = address.path; }

void from_json(const nlohmann::json& j, TreeAddress& address) {
    address.path = j.get<std::vector<std::uint32_t>>();
}

void to_json(nlohmann::json& j, const TreeRegion& region) {
    j = nlohmann::json{{"k", region.k}, {"vertices", region.vertices}};
}

void from_json(const nlohmann::json& j, TreeRegion& region) {
    TreeRegion parsed(j.at("k").get<unsigned>());
    for (const auto& entry : j.at("vertices")) parsed.insert(entry.get<TreeAddress>());
    region = std::move(parsed);
}

void to_json(nlohmann::json& j, const SpinConfiguration& sigma) {
    nlohmann::json spins = nlohmann::json::array();
    for (const auto& [vertex, spin] : sigma.spins) {
        spins.push_back(nlohmann::json{{"vertex", vertex}, {"spin", spin}});
    }
    j = nlohmann::json{{"region", sigma.region}, {"spins", std::move(spins)}};
}

void from_json(const nlohmann::json& j, SpinConfiguration& sigma) {
    TreeRegion region = j.at("region").get<TreeRegion>();
    std::map<TreeAddress, int> spins;
    for (const auto& entry : j.at("spins")) {
        spins[entry.at("vertex").get<TreeAddress>()] = entry.at("spin").get<int>();
    }
    sigma = SpinConfiguration(std::move(region), std::move(spins));
}

void to_json(nlohmann::json& j, const GrowthStep& step) {
    j = nlohmann::json{{"base", step.base}, {"added", step.added}, {"anchor", step.anchor}};
}

void from_json(const nlohmann::json& j, GrowthStep& step) {
    step.base = j.at("base").get<TreeRegion>();
    step.added = j.at("added").get<TreeAddress>();
    step.anchor = j.at("anchor").get<TreeAddress>();
}

void to_json(nlohmann::json& j, const FieldTable& table) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [key, value] : table.entries) {
        entries.push_back(nlohmann::json{
            {"spin", key.first}, {"vertex", key.second}, {"g", rational_to_json(value)}});
    }
    j = nlohmann::json{{"mode", table.mode},
                       {"default_one", table.default_one},
                       {"entries", std::move(entries)}};
    if (table.mode == FieldMode::explicit_tail) {
        nlohmann::json tail = nlohmann::json::array();
        for (const auto& [vertex, mass] : table.tail_mass) {
            tail.push_back(nlohmann::json{{"vertex", vertex}, {"mass", rational_to_json(mass)}});
        }
        j["tail"] = std::move(tail);
    }
}

void from_json(const nlohmann::json& j, FieldTable& table) {
    FieldTable parsed;
    parsed.mode = j.value("mode", FieldMode::finite_alphabet);
    parsed.default_one = j.value("default_one", false);
    if (j.contains("entries")) {
        for (const auto& entry : j.at("entries")) {
            parsed.set(entry.at("spin").get<int>(), entry.at("vertex").get<TreeAddress>(),
                       rational_from_json(entry.at("g")));
        }
    }
    if (j.contains("tail")) {
        for (const auto& entry : j.at("tail")) {
            parsed.set_tail(entry.at("vertex").get<TreeAddress>(),
                            rational_from_json(entry.at("mass")));
        }
    }
    // set_tail flips the mode; restore an explicit declaration if one came in.
    if (j.contains("mode")) parsed.mode = j.at("mode").get<FieldMode>();
    table = std::move(parsed);
}

void to_json(nlohmann::json& j, const AlleleCounts& counts) {
    j = nlohmann::json{{"n", counts.n}, {"counts", counts.counts}, {"parts", counts.parts()}};
}

AlleleCounts allele_counts_from_json(const nlohmann::json& j) {
    return AlleleCounts(j.at("n").get<unsigned>(), j.at("counts").get<std::vector<unsigned>>());
}

void to_json(nlohmann::json& j, const CrpSample& sample) {
    j = nlohmann::json{{"labels", sample.labels}, {"counts", sample.counts}};
}

namespace {

nlohmann::json config_scalars_to_json(const std::vector<ConfigScalar>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : rows) {
        out.push_back(nlohmann::json{{"config", row.config}, {"value", row.value}});
    }
    return out;
}

}  // namespace

void to_json(nlohmann::json& j, const ConsistencyReport& report) {
    j = nlohmann::json{
        {"step", report.step},
        {"theta", rational_to_json(report.theta)},
        {"beta", rational_to_json(report.beta)},
        {"q", report.q},
        {"mode", report.mode},
        {"rhs", config_scalars_to_json(report.rhs_values)},
        {"residuals", config_scalars_to_json(report.residuals)},
        {"max_abs_residual", report.max_abs_residual},
        {"z_ratio",
         nlohmann::json{{"enumeration", report.z_ratio_enumeration},
                        {"esf_closed_form", report.z_ratio_esf}}},
        {"verdict", report.verdict},
    };
    if (report.solver) {
        j["solver"] = nlohmann::json{{"converged", report.solver->converged},
                                     {"iterations", report.solver->iterations},
                                     {"spread", report.solver->spread}};
    }
}

void to_json(nlohmann::json& j, const SummabilityReport& report) {
    nlohmann::json probes = nlohmann::json::array();
    for (const auto& [n, t] : report.probes) {
        probes.push_back(nlohmann::json{{"n", n}, {"t", t}});
    }
    j = nlohmann::json{
        {"theta", rational_to_json(report.theta)},
        {"bound", report.bound},
        {"n_max", report.n_max},
        {"probes", std::move(probes)},
        {"crossing", report.crossing ? nlohmann::json(*report.crossing) : nlohmann::json()},
        {"stirling_index", report.stirling_index},
        {"divergent", report.divergent},
    };
}

void to_json(nlohmann::json& j, const VerificationReport& report) {
    nlohmann::json suites = nlohmann::json::array();
    for (const auto& suite : report.suites) {
        nlohmann::json failed = nlohmann::json::array();
        for (const auto& failure : suite.failed) {
            failed.push_back(nlohmann::json{{"name", failure.name}, {"detail", failure.detail}});
        }
        suites.push_back(nlohmann::json{{"suite", suite.suite},
                                        {"checks", suite.checks},
                                        {"failures", suite.failures},
                                        {"seconds", suite.seconds},
                                        {"failed", std::move(failed)}});
    }
    j = nlohmann::json{
        {"level", report.level},
        {"passed", report.passed()},
        {"total_checks", report.total_checks},
        {"total_failures", report.total_failures},
        {"suites", std::move(suites)},
    };
}

}  // namespace ewens
