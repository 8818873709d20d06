#include <doctest.h>

#include <cstdio>
#include <sys/wait.h>
#include <unistd.h>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code;
    std::string stdout_text;
};

std::string bin_path() {
    const char* p = std::getenv("BDSID_BIN");
    return p ? p : "";
}

std::string params_dir() {
    const char* p = std::getenv("BDSID_PARAMS_DIR");
    return p ? p : "";
}

std::string tmp_path(const std::string& suffix) {
    static int counter = 0;
    return "/tmp/bdsid_test_" + std::to_string(getpid()) + "_" +
           std::to_string(counter++) + suffix;
}

RunResult run(const std::string& args) {
    std::string out_file = tmp_path(".out");
    std::string cmd = bin_path() + " " + args + " > " + out_file + " 2>/dev/null";
    int status = std::system(cmd.c_str());
    std::ifstream f(out_file);
    std::stringstream ss;
    ss << f.rdbuf();
    std::remove(out_file.c_str());
    int code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    return {code, ss.str()};
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("identify worked example") {
    REQUIRE_FALSE(bin_path().empty());
    RunResult r = run("identify --coeffs 0.4,0.3,0.2,0.1");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.stdout_text);
    CHECK(j.at("schema_version") == 1);
    CHECK(j.at("m")[0].get<double>() == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(j.at("m")[1].get<double>() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(j.at("m")[2].get<double>() == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(j.at("recovered")[0].get<double>() == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(j.at("residual_trace_distance").get<double>() < 1e-10);

    RunResult mixed = run("identify --coeffs 0.25,0.25,0.25,0.25");
    REQUIRE(mixed.exit_code == 0);
    json jm = json::parse(mixed.stdout_text);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(jm.at("m")[i].get<double>()) < 1e-14);

    RunResult pure = run("identify --coeffs 1,0,0,0");
    REQUIRE(pure.exit_code == 0);
    json jp = json::parse(pure.stdout_text);
    CHECK(jp.at("recovered")[0].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("identify rejects non-simplex input with exit code 2") {
    CHECK(run("identify --coeffs 0.5,0.5,0.5,0.5").exit_code == 2);
    CHECK(run("identify --coeffs 1.5,-0.5,0,0").exit_code == 2);
}

TEST_CASE("sample accuracy and byte-level determinism") {
    RunResult a = run("sample --coeffs 0.4,0.3,0.2,0.1 --shots 100000 --seed 42");
    REQUIRE(a.exit_code == 0);
    json j = json::parse(a.stdout_text);
    for (int i = 0; i < 4; ++i) {
        double err = std::abs(j.at("c_hat")[i].get<double>() - 0.1 * (4 - i));
        CHECK(err < 0.01);
    }
    CHECK(j.at("shots_used").at("step1") == 100000);

    RunResult b = run("sample --coeffs 0.4,0.3,0.2,0.1 --shots 100000 --seed 42");
    CHECK(a.stdout_text == b.stdout_text);

    RunResult exact = run("sample --coeffs 0,0,1,0 --shots 1 --seed 0");
    json je = json::parse(exact.stdout_text);
    CHECK(je.at("m_hat")[0].get<double>() == 1.0);
    CHECK(je.at("m_hat")[1].get<double>() == -1.0);
}

TEST_CASE("verify passes on a fresh build") {
    RunResult r = run("verify");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.stdout_text);
    CHECK(j.at("all_pass") == true);
    for (const auto& check : j.at("checks")) {
        CHECK(check.at("pass") == true);
        CHECK(check.at("max_error").get<double>() < 1e-10);
    }
}

TEST_CASE("qed-sim validates its grid") {
    std::string params = params_dir() + "/fig2a.json";
    RunResult r = run("qed-sim --params " + params + " --step 1 --t-max 0 --n-samples 3 "
                      "--out /tmp/bdsid_cli_reject.csv");
    CHECK(r.exit_code == 2);
    RunResult missing = run("qed-sim --params /nonexistent.json --step 1 "
                            "--out /tmp/bdsid_cli_reject.csv");
    CHECK(missing.exit_code == 2);
}

TEST_CASE("qed-sim on a zero-coupling configuration is constant") {
    std::string config_path = tmp_path(".json");
    {
        std::ofstream f(config_path);
        f << R"({"g_a": 1.0, "omega_ra": 0.0, "delta_a": 102.0, "delta_b0": 122.0,
                 "Delta_a": 120.0, "Delta_b0": 100.0, "delta_1": 0.0, "n_ph": 2})";
    }
    std::string csv_path = tmp_path(".csv");
    RunResult r = run("qed-sim --params " + config_path +
                      " --step 1 --t-max 2 --n-samples 5 --dt 0.01 --out " + csv_path);
    REQUIRE(r.exit_code == 0);

    std::ifstream csv(csv_path);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,full,effective");
    int rows = 0;
    std::string line;
    while (std::getline(csv, line)) {
        ++rows;
        double t, full, eff;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &full, &eff) == 3);
        CHECK(full == doctest::Approx(-1.0).epsilon(1e-8));
        CHECK(eff == doctest::Approx(-1.0).epsilon(1e-12));
    }
    CHECK(rows == 5);

    std::string side = csv_path.substr(0, csv_path.size() - 4) + ".json";
    std::ifstream sf(side);
    REQUIRE(sf.good());
    json sidecar = json::parse(sf);
    CHECK(sidecar.at("max_deviation").get<double>() < 1e-9);
    CHECK(sidecar.contains("lambda"));
    CHECK(sidecar.contains("delta1_tuned"));
    CHECK(sidecar.contains("omega_b"));
    CHECK(sidecar.contains("leakage"));
    std::remove(config_path.c_str());
    std::remove(csv_path.c_str());
    std::remove(side.c_str());
}

TEST_CASE("qed-sim exits 3 on a numerical abort") {
    // drives this strong push the effective field outside the tuning bracket
    std::string config_path = tmp_path(".json");
    {
        std::ofstream f(config_path);
        f << R"({"g_a": 1.0, "omega_ra": 50.0, "delta_a": 10.0, "delta_b0": 14.0,
                 "Delta_a": 16.0, "Delta_b0": 6.0, "delta_1": 0.0, "n_ph": 2})";
    }
    RunResult r = run("qed-sim --params " + config_path +
                      " --step 1 --t-max 5 --n-samples 4 --dt 0.05 --out " +
                      tmp_path(".csv"));
    CHECK(r.exit_code == 3);
    std::remove(config_path.c_str());
}

TEST_CASE("qed-fidelity effective-only reports unit fidelity") {
    std::string params = params_dir() + "/fig2a.json";
    RunResult r = run("qed-fidelity --params " + params + " --step 1 --effective-only");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.stdout_text);
    CHECK(j.at("fidelity").get<double>() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(j.at("leakage").get<double>() == 0.0);
    CHECK(j.at("warning_high_leakage") == false);
    CHECK(j.at("gate_time").get<double>() > 0.0);
}

TEST_SUITE_END();
