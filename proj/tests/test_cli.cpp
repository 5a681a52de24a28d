#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "schema_check.hpp"

#include <json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

// End-to-end tests driving the installed command-line binary through a shell.

namespace {

using nlohmann::json;

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string command = std::string(EWENS_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE_MESSAGE(pipe != nullptr, "failed to launch ", command);
    RunResult result;
    std::array<char, 4096> buffer{};
    std::size_t got = 0;
    while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
        result.out.append(buffer.data(), got);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

json load_schema(const std::string& name) {
    const std::string path = std::string(EWENS_SCHEMA_DIR) + "/" + name;
    std::ifstream in(path);
    REQUIRE_MESSAGE(in.good(), "missing schema file ", path);
    return json::parse(in);
}

void check_valid(const std::string& schema_name, const json& value) {
    std::string error;
    const bool ok = schema_check::validate(load_schema(schema_name), value, error);
    CHECK_MESSAGE(ok, schema_name, ": ", error);
}

std::string temp_path(const std::string& name) {
    return std::string("/tmp/ewens_cli_test_") + name;
}

}  // namespace

TEST_CASE("esf table: exact, normalized, schema-conformant") {
    const RunResult run = run_cli("esf --n 4 --theta 7/3");
    REQUIRE(run.exit_code == 0);
    const json table = json::parse(run.out);
    check_valid("esf_table.schema.json", table);
    CHECK(table.at("n") == 4);
    CHECK(table.at("theta") == "7/3");
    CHECK(table.at("total").at("exact") == "1");
    CHECK(table.at("rows").size() == 5);  // p(4) partitions
}

TEST_CASE("usage and domain errors exit with code 2") {
    CHECK(run_cli("esf --n 4 --bogus-flag").exit_code == 2);
    CHECK(run_cli("esf").exit_code == 2);                     // missing --n
    CHECK(run_cli("esf --n 4 --theta abc").exit_code == 2);   // malformed rational
    CHECK(run_cli("esf --n 4 --theta 0").exit_code == 2);     // theta must be positive
    CHECK(run_cli("esf --n 0").exit_code == 2);               // empty sample
    CHECK(run_cli("nonsense").exit_code == 2);                // unknown subcommand
    CHECK(run_cli("").exit_code == 2);                        // subcommand required
    // Vertex 0.0 is not adjacent to the single-root base region.
    CHECK(run_cli("consistency --region ball:2,0 --add 0.0 --q 2").exit_code == 2);
    CHECK(run_cli("consistency --region ball:2,1 --add 0 --q 2").exit_code == 2);  // already present
}

TEST_CASE("help exits zero") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("esf --help").exit_code == 0);
}

TEST_CASE("output is byte-deterministic across runs") {
    for (const std::string& args : {
             std::string("esf --n 5 --theta 2"),
             std::string("sample --n 6 --seed 42 --count 3"),
             std::string("summability --theta 10 --bound 100 --n-max 200"),
             std::string("consistency --add 1 --region ball:2,0 --q 2"),
             std::string("esf --n 5 --theta 2 --format csv"),
         }) {
        const RunResult first = run_cli(args);
        const RunResult second = run_cli(args);
        CHECK(first.exit_code == 0);
        CHECK_MESSAGE(first.out == second.out, "nondeterministic output for: ", args);
    }
}

TEST_CASE("sampler output labels every item") {
    const RunResult run = run_cli("sample --n 6 --theta 1/2 --seed 9 --count 2");
    REQUIRE(run.exit_code == 0);
    const json out = json::parse(run.out);
    check_valid("sample_output.schema.json", out);
    REQUIRE(out.at("rows").size() == 2);
    CHECK(out.at("rows")[0].at("seed") == 9);
    CHECK(out.at("rows")[1].at("seed") == 10);
    for (const auto& row : out.at("rows")) {
        CHECK(row.at("labels").size() == 6);
        const auto& counts = row.at("counts");
        CHECK(counts.at("n") == 6);
        unsigned total = 0;
        unsigned j = 0;
        for (const auto& b : counts.at("counts")) {
            total += b.get<unsigned>() * ++j;
        }
        CHECK(total == 6);
    }
}

TEST_CASE("summability scan pins the first threshold crossing") {
    const RunResult run = run_cli("summability --theta 1 --bound 100 --n-max 500");
    REQUIRE(run.exit_code == 0);
    const json report = json::parse(run.out);
    check_valid("summability_report.schema.json", report);
    CHECK(report.at("crossing") == 38);
    CHECK(report.at("divergent") == true);
    CHECK(report.at("stirling_index").get<unsigned>() >= 38);

    const RunResult shallow = run_cli("summability --theta 1 --bound 1e9 --n-max 50");
    REQUIRE(shallow.exit_code == 0);
    const json quiet = json::parse(shallow.out);
    CHECK(quiet.at("crossing").is_null());
    CHECK(quiet.at("divergent") == false);
}

TEST_CASE("consistency audit reports the pinned exact residual") {
    const RunResult run = run_cli("consistency --region ball:2,0 --add 0 --q 2");
    // ball:2,0 is the single root vertex; defaults theta=1, beta=-1.
    REQUIRE(run.exit_code == 0);
    const json report = json::parse(run.out);
    check_valid("consistency_report.schema.json", report);
    CHECK(report.at("verdict") == "consistent");
    CHECK(report.at("max_abs_residual").at("exact") == "0");

    // Two-vertex base: the audit detects the finite-q inconsistency exactly.
    std::ofstream region_file(temp_path("region.json"));
    region_file << R"({"k": 2, "vertices": [[], [0]]})";
    region_file.close();
    const RunResult pair_run =
        run_cli("consistency --region " + temp_path("region.json") + " --add 1 --q 2");
    REQUIRE(pair_run.exit_code == 0);
    const json pair_report = json::parse(pair_run.out);
    check_valid("consistency_report.schema.json", pair_report);
    CHECK(pair_report.at("verdict") == "inconsistent");
    CHECK(pair_report.at("max_abs_residual").at("exact") == "1/44");
    CHECK(pair_report.at("z_ratio").at("enumeration").at("exact") == "11/6");
    CHECK(pair_report.at("z_ratio").at("esf_closed_form").at("exact") == "1");
}

TEST_CASE("solved fields pass the audit end to end") {
    std::ofstream fields_file(temp_path("fields.json"));
    fields_file << R"({"mode": "finite_alphabet", "default_one": true, "entries": [)"
                << R"({"spin": 0, "vertex": [], "g": "1"},)"
                << R"({"spin": 1, "vertex": [], "g": "2"}]})";
    fields_file.close();
    const RunResult run = run_cli("consistency --region ball:2,0 --add 0 --theta 3 --q 2 --fields " +
                                  temp_path("fields.json") + " --solve");
    REQUIRE(run.exit_code == 0);
    const json out = json::parse(run.out);
    check_valid("field_table.schema.json", out.at("fields"));
    const json& report = out.at("report");
    check_valid("consistency_report.schema.json", report);
    CHECK(report.at("verdict") == "consistent");
    REQUIRE(report.contains("solver"));
    CHECK(report.at("solver").at("converged") == true);
    CHECK(report.at("max_abs_residual").at("decimal").get<double>() <= 1e-10);
}

TEST_CASE("csv forms carry headers and verdict comments") {
    const RunResult esf = run_cli("esf --n 4 --format csv");
    REQUIRE(esf.exit_code == 0);
    CHECK(esf.out.rfind("parts,exact,decimal\n", 0) == 0);

    const RunResult sample = run_cli("sample --n 4 --format csv");
    REQUIRE(sample.exit_code == 0);
    CHECK(sample.out.rfind("seed,labels,counts\n", 0) == 0);

    const RunResult cons = run_cli("consistency --region ball:2,0 --add 0 --q 2 --format csv");
    REQUIRE(cons.exit_code == 0);
    CHECK(cons.out.find("# verdict=consistent") != std::string::npos);
    CHECK(cons.out.find("config,rhs_exact,rhs_decimal,residual_exact,residual_decimal") !=
          std::string::npos);

    const RunResult summ = run_cli("summability --n-max 20 --format csv");
    REQUIRE(summ.exit_code == 0);
    CHECK(summ.out.rfind("n,t\n", 0) == 0);
}

TEST_CASE("verification battery: clean pass, poisoned fail") {
    const RunResult clean = run_cli("verify --level quick");
    CHECK(clean.exit_code == 0);
    const json report = json::parse(clean.out);
    check_valid("verification_report.schema.json", report);
    CHECK(report.at("passed") == true);

    const RunResult poisoned = run_cli("verify --level quick --inject-inverted-increment");
    CHECK(poisoned.exit_code == 1);
    const json bad = json::parse(poisoned.out);
    check_valid("verification_report.schema.json", bad);
    CHECK(bad.at("passed") == false);
    bool found = false;
    for (const auto& suite : bad.at("suites")) {
        if (suite.at("suite") == "hamiltonian.increment") {
            found = true;
            CHECK(suite.at("failures").get<unsigned>() > 0);
        } else {
            CHECK(suite.at("failures") == 0);
        }
    }
    CHECK(found);

    const RunResult csv = run_cli("verify --level quick --inject-inverted-increment --format csv");
    CHECK(csv.exit_code == 1);
    CHECK(csv.out.find("hamiltonian.increment") != std::string::npos);
}

TEST_CASE("--output writes the report to a file") {
    const std::string path = temp_path("esf_out.json");
    std::remove(path.c_str());
    const RunResult run = run_cli("esf --n 3 --output " + path);
    REQUIRE(run.exit_code == 0);
    CHECK(run.out.empty());
    std::ifstream in(path);
    REQUIRE(in.good());
    const json table = json::parse(in);
    CHECK(table.at("n") == 3);
    CHECK(table.at("total").at("exact") == "1");
    std::remove(path.c_str());
}
