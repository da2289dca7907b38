#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args) {
    const std::string out_path = "cli_stdout.tmp";
    const std::string cmd = std::string(NISS_CLI_PATH) + " " + args + " > " + out_path + " 2> cli_stderr.tmp";
    const int raw = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WEXITSTATUS(raw);
    r.out = slurp(out_path);
    std::remove(out_path.c_str());
    std::remove("cli_stderr.tmp");
    return r;
}

std::string fixture(const std::string& name) { return std::string(NISS_FIXTURE_DIR) + "/" + name; }
std::string golden(const std::string& name) { return slurp(std::string(NISS_GOLDEN_DIR) + "/" + name); }

} // namespace

TEST_CASE("fourier command") {
    const std::string args = "fourier --p 0.5 --table " + fixture("table_quadrant.json");
    const CliResult r = run_cli(args);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out == golden("fourier_quadrant.json"));
    const CliResult again = run_cli(args);
    CHECK(again.out == r.out); // byte-identical rerun

    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["coefficients"][0]["value"].get<double>() == -0.5);
    CHECK(doc["coefficients"][3]["value"].get<double>() == 0.5);

    const CliResult csv = run_cli(args + " --format csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.out == golden("fourier_quadrant.csv"));

    SECTION("the analysis parameter can come from a source") {
        const CliResult via_src =
            run_cli("fourier --dsbs 0.3 --table " + fixture("table_quadrant.json"));
        REQUIRE(via_src.exit_code == 0);
        CHECK(nlohmann::json::parse(via_src.out)["p"].get<double>() == 0.5);
    }
}

TEST_CASE("ortho command") {
    const std::string args = "ortho --pmf " + fixture("pmf_product_d2_p03.json");
    const CliResult r = run_cli(args);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out == golden("ortho_product.json"));
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["residual_max"].get<double>() <= 1e-10);
    CHECK(doc["nontrivial"].get<int>() == 4);

    const CliResult corr = run_cli("ortho --pmf " + fixture("pmf_correlated_d2.json"));
    REQUIRE(corr.exit_code == 0);
    CHECK(nlohmann::json::parse(corr.out)["residual_max"].get<double>() <= 1e-8);
}

TEST_CASE("round command") {
    const std::string args =
        "round --dsbs 0.1 --family-f " + fixture("family_det_d1_k2.json") + " --exact";
    const CliResult r = run_cli(args);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out == golden("round_det_exact.json"));
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["preservation"]["max_cross_error"].get<double>() == 0.0);
    CHECK(doc["q"][1][1].get<double>() == 0.45); // (1-eps)/2 for the identity pair

    SECTION("Monte Carlo runs are reproducible for a fixed seed") {
        const std::string mc_args =
            "round --dsbs 0.1 --family-f " + fixture("family_det_d1_k2.json") + " --mc 5000 --seed 9";
        const CliResult a = run_cli(mc_args);
        const CliResult b = run_cli(mc_args);
        REQUIRE(a.exit_code == 0);
        CHECK(a.out == b.out);
    }
    SECTION("a family violating the mass condition exits 3 and names the point") {
        const CliResult bad =
            run_cli("round --dsbs 0.1 --family-f " + fixture("family_bad_mass.json") + " --exact");
        CHECK(bad.exit_code == 3);
    }
}

TEST_CASE("bound command") {
    const CliResult r = run_cli("bound --dsbs 0.1 --qu 0.5,0.5 --qv 0.5,0.5 --grid 1");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out == golden("bound_uniform.json"));
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["reports"][0]["theta_plus"].get<double>() == 0.8);

    SECTION("rho=0 collapses the interval") {
        const CliResult flat = run_cli("bound --dsbs 0.5 --qu 0.5,0.5 --qv 0.3,0.7 --grid 1");
        REQUIRE(flat.exit_code == 0);
        const auto d = nlohmann::json::parse(flat.out);
        CHECK(d["reports"][0]["theta_plus"] == d["reports"][0]["theta_minus"]);
    }
    SECTION("with a full target the score and feasibility flag appear") {
        const CliResult t = run_cli("bound --dsbs 0.2 --target " + fixture("target_uniform_diag.json") +
                                    " --lambda " + fixture("lambda_22.json"));
        REQUIRE(t.exit_code == 0);
        const auto d = nlohmann::json::parse(t.out);
        CHECK(d["reports"][0]["score"].get<double>() == 1.0);
        CHECK_FALSE(d["reports"][0]["feasible"].get<bool>()); // e=1 needs rho=1
    }
}

TEST_CASE("scan command") {
    const std::string args = "scan --dsbs 0.1 --d 1 --ku 2 --kv 2 --grid 1";
    const CliResult r = run_cli(args);
    REQUIRE(r.exit_code == 0); // blocklength-1 scans are clean
    CHECK(r.out == golden("scan_dsbs01_d1.json"));
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["records"].size() == 16);
    CHECK(doc["violations"].empty());

    const CliResult again = run_cli(args);
    CHECK(again.out == r.out);

    SECTION("csv table") {
        const CliResult csv = run_cli(args + " --format csv");
        REQUIRE(csv.exit_code == 0);
        CHECK(csv.out == golden("scan_dsbs01_d1.csv"));
    }
    SECTION("blocklength-2 violations flip the exit code") {
        const CliResult v = run_cli("scan --dsbs 0.1 --d 2 --ku 2 --kv 2 --grid 1");
        CHECK(v.exit_code == 1);
        const auto d = nlohmann::json::parse(v.out);
        CHECK(d["violations"].size() == 4);
        const CliResult vcsv = run_cli("scan --dsbs 0.1 --d 2 --ku 2 --kv 2 --grid 1 --format csv");
        CHECK(vcsv.out.find("\nrecord,lambda,side,margin\n") != std::string::npos);
    }
    SECTION("the pair cap exits 4") {
        const CliResult capped = run_cli("scan --dsbs 0.1 --d 4 --ku 2 --kv 2 --grid 1");
        CHECK(capped.exit_code == 4);
    }
}

TEST_CASE("verify command") {
    const CliResult r = run_cli("verify --dsbs 0.25 --d 2 --ku 2 --kv 2 --pairs 40 --grid 1");
    REQUIRE(r.exit_code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["formula"]["ok"].get<bool>());
    CHECK(doc["formula"]["max_discrepancy"].get<double>() <= 1e-9);
}

TEST_CASE("parse and validation exit codes") {
    CHECK(run_cli("fourier --p 0.5 --table " + fixture("malformed.json")).exit_code == 2);
    CHECK(run_cli("scan --d 1 --ku 2 --kv 2").exit_code == 2); // no source given
    CHECK(run_cli("bound --source " + fixture("source_bad_sum.json") + " --qu 0.5,0.5 --qv 0.5,0.5")
              .exit_code == 3);
    CHECK(run_cli("fourier --p 1.5 --table " + fixture("table_quadrant.json")).exit_code == 3);
    CHECK(run_cli("nonsense").exit_code == 2);
}
