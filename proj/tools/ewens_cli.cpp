#include "ewens/errors.hpp"
#include "ewens/field.hpp"
#include "ewens/hamiltonian.hpp"
#include "ewens/json_io.hpp"
#include "ewens/partition.hpp"
#include "ewens/rational.hpp"
#include "ewens/tree.hpp"
#include "ewens/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace ewens;

// ---------------------------------------------------------------- parsing

TreeAddress parse_address(const std::string& text) {
    if (text.empty() || text == "root") return TreeAddress{};
    TreeAddress address;
    std::stringstream in(text);
    std::string token;
    while (std::getline(in, token, '.')) {
        if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
            throw DomainError("bad vertex address '" + text +
                              "'; expected 'root' or dot-separated indices like 0.1.0");
        }
        address.path.push_back(static_cast<std::uint32_t>(std::stoul(token)));
    }
    return address;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open file '" + path + "'");
    nlohmann::json j;
    in >> j;
    return j;
}

// "ball:k,r" for a radius-r ball on the (k+1)-regular tree, otherwise a path
// to a JSON region file.
TreeRegion parse_region(const std::string& text) {
    if (text.rfind("ball:", 0) == 0) {
        const std::string params = text.substr(5);
        const auto comma = params.find(',');
        if (comma == std::string::npos) {
            throw DomainError("bad region '" + text + "'; expected ball:k,r");
        }
        try {
            const unsigned k = static_cast<unsigned>(std::stoul(params.substr(0, comma)));
            const unsigned r = static_cast<unsigned>(std::stoul(params.substr(comma + 1)));
            return build_ball(k, r);
        } catch (const std::logic_error&) {
            throw DomainError("bad region '" + text + "'; expected ball:k,r");
        }
    }
    return load_json_file(text).get<TreeRegion>();
}

FieldTable parse_fields(const std::string& text) {
    if (text == "uniform") return FieldTable::uniform();
    return load_json_file(text).get<FieldTable>();
}

// ----------------------------------------------------------------- output

struct OutputTarget {
    std::ofstream file;
    std::ostream* stream = &std::cout;

    explicit OutputTarget(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw DomainError("cannot open output file '" + path + "'");
        stream = &file;
    }
};

void emit_json(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << "\n"; }

std::string join_unsigned(const std::vector<unsigned>& values, char sep) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += sep;
        out += std::to_string(values[i]);
    }
    return out;
}

std::string join_config(const std::vector<int>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += '-';
        out += std::to_string(values[i]);
    }
    return out;
}

std::string scalar_exact(const ScalarValue& value) {
    return value.exact ? format_rational(*value.exact) : "";
}

// ----------------------------------------------------------- subcommands

int run_esf(std::ostream& out, const std::string& format, unsigned n, const Rational& theta_value) {
    MutationRate theta{theta_value};
    const auto partitions = enumerate_partitions(n);
    if (format == "csv") {
        out << "parts,exact,decimal\n";
        for (const auto& a : partitions) {
            const Rational p = esf_probability(a, theta).value;
            std::string parts;
            for (unsigned part : a.parts()) {
                if (!parts.empty()) parts += '+';
                parts += std::to_string(part);
            }
            out << parts << "," << format_rational(p) << "," << format_decimal(to_double(p))
                << "\n";
        }
        return 0;
    }
    nlohmann::json rows = nlohmann::json::array();
    Rational total = 0;
    for (const auto& a : partitions) {
        const Rational p = esf_probability(a, theta).value;
        total += p;
        rows.push_back(nlohmann::json{{"counts", a.counts},
                                      {"parts", a.parts()},
                                      {"probability", ScalarValue::of(p)}});
    }
    emit_json(out, nlohmann::json{{"n", n},
                                  {"theta", rational_to_json(theta_value)},
                                  {"normalizer", rational_to_json(esf_normalizer(n, theta))},
                                  {"total", ScalarValue::of(total)},
                                  {"rows", rows}});
    return 0;
}

int run_sample(std::ostream& out, const std::string& format, unsigned n,
               const Rational& theta_value, std::uint64_t seed, unsigned count) {
    MutationRate theta{theta_value};
    if (format == "csv") {
        out << "seed,labels,counts\n";
        for (unsigned i = 0; i < count; ++i) {
            const CrpSample sample = crp_sample(n, theta, seed + i);
            out << (seed + i) << "," << join_unsigned(sample.labels, ' ') << ","
                << join_unsigned(sample.counts.counts, ' ') << "\n";
        }
        return 0;
    }
    nlohmann::json rows = nlohmann::json::array();
    for (unsigned i = 0; i < count; ++i) {
        nlohmann::json row = crp_sample(n, theta, seed + i);
        row["seed"] = seed + i;
        rows.push_back(std::move(row));
    }
    emit_json(out, nlohmann::json{{"n", n},
                                  {"theta", rational_to_json(theta_value)},
                                  {"rows", rows}});
    return 0;
}

int run_summability(std::ostream& out, const std::string& format, const Rational& theta_value,
                    double bound, unsigned n_max) {
    MutationRate theta{theta_value};
    const SummabilityReport report = summability_scan(theta, bound, n_max);
    if (format == "csv") {
        out << "n,t\n";
        for (const auto& [n, t] : report.probes) {
            out << n << "," << format_decimal(t) << "\n";
        }
        return 0;
    }
    emit_json(out, report);
    return 0;
}

void emit_consistency_csv(std::ostream& out, const ConsistencyReport& report) {
    out << "# verdict=" << nlohmann::json(report.verdict).get<std::string>() << "\n";
    out << "# max_abs_residual=" << format_decimal(report.max_abs_residual.approx) << "\n";
    out << "# z_ratio_enumeration=" << format_decimal(report.z_ratio_enumeration.approx) << "\n";
    out << "# z_ratio_esf=" << format_decimal(report.z_ratio_esf.approx) << "\n";
    out << "config,rhs_exact,rhs_decimal,residual_exact,residual_decimal\n";
    for (std::size_t i = 0; i < report.rhs_values.size(); ++i) {
        const auto& rhs = report.rhs_values[i];
        const auto& residual = report.residuals[i];
        out << join_config(rhs.config) << "," << scalar_exact(rhs.value) << ","
            << format_decimal(rhs.value.approx) << "," << scalar_exact(residual.value) << ","
            << format_decimal(residual.value.approx) << "\n";
    }
}

int run_consistency(std::ostream& out, const std::string& format, const TreeRegion& region,
                    const TreeAddress& added, const Rational& theta_value,
                    const Rational& beta_value, unsigned q, const FieldTable& fields, bool solve,
                    std::uint64_t budget) {
    MutationRate theta{theta_value};
    InverseTemperature beta{beta_value};
    const GrowthStep step = growth_step(region, added);
    EnumerationBudget enumeration{budget};
    if (!solve) {
        const ConsistencyReport report = marginal_check(step, theta, beta, fields, q, enumeration);
        if (format == "csv") {
            emit_consistency_csv(out, report);
        } else {
            emit_json(out, report);
        }
        return 0;
    }
    SolveOptions options;
    options.budget = enumeration;
    const SolveResult result = solve_boundary_field(step, theta, beta, q, fields, options);
    if (format == "csv") {
        out << "# converged=" << (result.stats.converged ? "true" : "false")
            << " iterations=" << result.stats.iterations
            << " spread=" << format_decimal(result.stats.spread) << "\n";
        out << "# verdict=" << nlohmann::json(result.report.verdict).get<std::string>()
            << " max_abs_residual=" << format_decimal(result.report.max_abs_residual.approx)
            << "\n";
        out << "spin,vertex,g\n";
        for (unsigned s = 0; s < q; ++s) {
            out << s << "," << added.str() << ","
                << format_decimal(to_double(result.fields.g(static_cast<int>(s), added))) << "\n";
        }
        return 0;
    }
    emit_json(out, nlohmann::json{{"fields", result.fields}, {"report", result.report}});
    return 0;
}

int run_verify(std::ostream& out, const std::string& format, VerifyLevel level, bool inverted) {
    const VerifyHooks hooks =
        inverted ? VerifyHooks::inverted_increment() : VerifyHooks::standard();
    const VerificationReport report = run_verification(level, hooks);
    if (format == "csv") {
        out << "suite,checks,failures\n";
        for (const auto& suite : report.suites) {
            out << suite.suite << "," << suite.checks << "," << suite.failures << "\n";
        }
    } else {
        emit_json(out, report);
    }
    return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multivariate Ewens measures on regular trees: exact tables, samplers,\n"
                 "divergence scans, and boundary-field consistency audits."};
    app.require_subcommand(1);
    app.fallthrough();  // let --format / --output appear after the subcommand too

    std::string format = "json";
    std::string output_path;
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app.add_option("--output", output_path, "Write output to a file instead of stdout");

    unsigned esf_n = 0;
    std::string esf_theta = "1";
    CLI::App* esf = app.add_subcommand("esf", "Exact allele-partition probability table");
    esf->add_option("--n", esf_n, "Sample size")->required();
    esf->add_option("--theta", esf_theta, "Mutation rate, e.g. 2 or 7/3")
        ->capture_default_str();

    unsigned sample_n = 0;
    std::string sample_theta = "1";
    std::uint64_t sample_seed = 1;
    unsigned sample_count = 1;
    CLI::App* sample = app.add_subcommand("sample", "Sequential CRP sampler (one draw per seed)");
    sample->add_option("--n", sample_n, "Sample size")->required();
    sample->add_option("--theta", sample_theta, "Mutation rate")->capture_default_str();
    sample->add_option("--seed", sample_seed, "First seed")->capture_default_str();
    sample->add_option("--count", sample_count, "Number of consecutive seeds")
        ->capture_default_str();

    std::string summ_theta = "1";
    double summ_bound = 100.0;
    unsigned summ_n_max = 10'000;
    CLI::App* summ =
        app.add_subcommand("summability", "Scan the potential sup-norm terms for divergence");
    summ->add_option("--theta", summ_theta, "Mutation rate")->capture_default_str();
    summ->add_option("--bound", summ_bound, "Threshold the terms must stay under")
        ->capture_default_str();
    summ->add_option("--n-max", summ_n_max, "Scan depth")->capture_default_str();

    std::string cons_region = "ball:2,1";
    std::string cons_add;
    std::string cons_theta = "1";
    std::string cons_beta = "-1";
    unsigned cons_q = 2;
    std::string cons_fields = "uniform";
    bool cons_solve = false;
    std::uint64_t cons_budget = EnumerationBudget{}.max_states;
    CLI::App* cons = app.add_subcommand(
        "consistency", "Audit or solve the one-step boundary-field consistency condition");
    cons->add_option("--region", cons_region, "Base region: ball:k,r or a JSON region file")
        ->capture_default_str();
    cons->add_option("--add", cons_add, "Vertex to grow by, e.g. 0.1.0")->required();
    cons->add_option("--theta", cons_theta, "Mutation rate")->capture_default_str();
    cons->add_option("--beta", cons_beta, "Inverse temperature (integer values run exactly)")
        ->capture_default_str();
    cons->add_option("--q", cons_q, "Spin alphabet size")->capture_default_str();
    cons->add_option("--fields", cons_fields, "Field table: 'uniform' or a JSON file")
        ->capture_default_str();
    cons->add_flag("--solve", cons_solve, "Solve for the added vertex's fields first");
    cons->add_option("--budget", cons_budget, "Enumeration budget in configurations")
        ->capture_default_str();

    std::string verify_level = "quick";
    bool verify_inverted = false;
    CLI::App* verify = app.add_subcommand("verify", "Run the self-verification battery");
    verify->add_option("--level", verify_level, "Sweep depth")
        ->check(CLI::IsMember({"quick", "full"}))
        ->capture_default_str();
    verify->add_flag(
        "--inject-inverted-increment", verify_inverted,
        "Test hook: run the battery against a deliberately wrong repeat-increment factor");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        OutputTarget target(output_path);
        std::ostream& out = *target.stream;
        if (esf->parsed()) {
            return run_esf(out, format, esf_n, parse_rational(esf_theta));
        }
        if (sample->parsed()) {
            return run_sample(out, format, sample_n, parse_rational(sample_theta), sample_seed,
                              sample_count);
        }
        if (summ->parsed()) {
            return run_summability(out, format, parse_rational(summ_theta), summ_bound,
                                   summ_n_max);
        }
        if (cons->parsed()) {
            return run_consistency(out, format, parse_region(cons_region),
                                   parse_address(cons_add), parse_rational(cons_theta),
                                   parse_rational(cons_beta), cons_q, parse_fields(cons_fields),
                                   cons_solve, cons_budget);
        }
        if (verify->parsed()) {
            return run_verify(out, format,
                              verify_level == "full" ? VerifyLevel::full : VerifyLevel::quick,
                              verify_inverted);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
