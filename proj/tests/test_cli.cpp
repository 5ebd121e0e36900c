#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "excised/analytic.hpp"
#include "excised/ensemble.hpp"
#include "excised/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = excised::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "excised_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

const std::string kConfig = std::string(EXCISED_CONFIG_DIR) + "/e11.cfg";

}  // namespace

TEST_CASE("exit codes") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({}).code == 2);
    CHECK(run({"sample", "--n", "2", "--count", "5", "--bogus"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"cutoff", "--config", "/nonexistent.cfg"}).code == 2);
    CHECK(run({"density", "--n", "2"}).code == 2);
    CHECK(run({"density", "--n", "2", "--cutoff", "0.1", "--method", "simpson"}).code == 2);
    CHECK(run({"density", "--n", "2", "--cutoff", "0.1", "--out", "/nonexistent/dir/x.csv"}).code == 2);
    CHECK(run({"density", "--n", "2", "--cutoff", "100"}).code == 1);
    CHECK(run({"sample", "--n", "1", "--count", "5", "--cutoff", "-1"}).code == 1);
    const auto r = run({"moments", "--n", "2", "--s", "-0.7"});
    CHECK(r.code == 1);
    CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("sample is reproducible and independent of workers") {
    const auto a = scratch("a.csv"), b = scratch("b.csv"), c = scratch("c.csv");
    const auto ja = scratch("a.json"), jb = scratch("b.json"), jc = scratch("c.json");
    const std::vector<std::string> base = {"sample", "--n", "2", "--count", "3000", "--cutoff", "0.1", "--seed", "7"};
    auto with = [&](const fs::path& csv, const fs::path& js, const std::string& workers) {
        auto v = base;
        v.insert(v.end(), {"--out", csv.string(), "--summary", js.string(), "--workers", workers});
        return run(v).code;
    };
    REQUIRE(with(a, ja, "1") == 0);
    REQUIRE(with(b, jb, "1") == 0);
    REQUIRE(with(c, jc, "3") == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(ja) == slurp(jb));
    CHECK(slurp(a) == slurp(c));
    const auto j = nlohmann::json::parse(slurp(ja));
    CHECK(j["seed"] == 7);
    CHECK(j["version"] == excised::io::kVersion);
    CHECK(j["parameters"]["n"] == 2);
    CHECK(j["accepted"] == 3000);
    CHECK(j["phases_below_theta_inf"] == 0);
    CHECK(slurp(a).rfind("bin_left,bin_right,density\n", 0) == 0);
}

TEST_CASE("log cutoff wins over linear cutoff") {
    const auto both =
        run({"density", "--n", "2", "--cutoff", "0.5", "--cutoff-log", "-2.302585092994046", "--grid", "9"});
    const auto log_only = run({"density", "--n", "2", "--cutoff-log", "-2.302585092994046", "--grid", "9"});
    const auto lin_only = run({"density", "--n", "2", "--cutoff", "0.5", "--grid", "9"});
    REQUIRE(both.code == 0);
    CHECK(both.out == log_only.out);
    CHECK(both.out != lin_only.out);
}

TEST_CASE("density CSV matches the library") {
    const auto r = run({"density", "--n", "2", "--cutoff", "0.1", "--grid", "11", "--scale", "mean-density"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "theta,r1,scaled_theta,scaled_r1");
    const excised::analytic::ExcisedDensity dens(2, std::log(0.1));
    const auto thetas = excised::analytic::theta_grid(11);
    for (double t : thetas) {
        REQUIRE(std::getline(in, line));
        double v[4];
        char comma;
        std::istringstream row(line);
        row >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3];
        CHECK(v[0] == t);
        CHECK(v[1] == doctest::Approx(dens(t)).epsilon(1e-12));
        CHECK(v[2] == doctest::Approx(2 * t / M_PI));
        CHECK(v[3] == doctest::Approx(v[1] * M_PI / 2));
    }
}

TEST_CASE("cutoff reproduces the calibration") {
    const auto r = run({"cutoff", "--config", kConfig, "--x", "400000", "--observed", "0.2834620"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    const auto& rep = j["report"];
    CHECK(std::abs(rep["N_std"].get<double>() - 12.26) < 5e-3);
    CHECK(std::abs(rep["N_eff"].get<double>() - 2.14) < 5e-3);
    CHECK(std::abs(rep["c_std"].get<double>() - 2.188) < 5e-4);
    CHECK(std::abs(rep["c_eff"].get<double>() - 0.5916) < 5e-5);
    CHECK(std::abs(rep["abs_cutoff_std"].get<double>() - 0.005424) < 5e-7);
    CHECK(std::abs(rep["abs_cutoff_eff"].get<double>() - 0.001466) < 5e-7);
    CHECK(std::abs(j["delta_from_observed"].get<double>() - 0.185116) < 5e-7);
    // X_bound from the config when --x is absent
    CHECK(run({"cutoff", "--config", kConfig}).out == run({"cutoff", "--config", kConfig, "--x", "400000"}).out);
}

TEST_CASE("compare equals the library distance") {
    const auto a = scratch("va.csv"), b = scratch("vb.csv");
    std::vector<double> va, vb;
    {
        std::ofstream fa(a), fb(b);
        fa << "value\n";
        for (int i = 0; i < 200; ++i) {
            va.push_back(std::fmod(0.37 * i, 3.0));
            vb.push_back(std::fmod(0.53 * i + 0.2, 3.1));
            fa << excised::io::format_double(va.back()) << "\n";
            fb << excised::io::format_double(vb.back()) << "\n";
        }
    }
    const auto r = run({"compare", "--a", a.string(), "--b", b.string(), "--bins", "30", "--lo", "0", "--hi", "3.1"});
    REQUIRE(r.code == 0);
    const auto edges = excised::ensemble::uniform_edges(0, 3.1, 30);
    const double expected = excised::ensemble::cdf_distance(excised::ensemble::histogram_of(va, edges),
                                                            excised::ensemble::histogram_of(vb, edges));
    CHECK(nlohmann::json::parse(r.out)["distance"].get<double>() == expected);
}

TEST_CASE("first-eigenvalue cdf ends at one") {
    const auto r = run({"first-eigenvalue", "--n", "3", "--count", "500", "--mode", "cdf", "--bins", "5"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("bin_left,bin_right,cdf\n") == 0);
    CHECK(r.out.substr(r.out.size() - 2) == "1\n");
}

TEST_CASE("moments and ap-count") {
    const auto m = run({"moments", "--n", "2", "--s", "1", "--mc-count", "20000", "--seed", "5"});
    REQUIRE(m.code == 0);
    const auto j = nlohmann::json::parse(m.out);
    const auto& row = j["moments"][0];
    CHECK(std::abs(row["exact"].get<double>() - 2.0) < 1e-12);
    CHECK(std::abs(row["monte_carlo"].get<double>() - 2.0) < 4 * row["stderr"].get<double>());
    CHECK(j["seed"] == 5);

    const auto csv = scratch("ap.csv");
    const auto a = run({"ap-count", "--config", kConfig, "--p-max", "200", "--s", "0", "--out", csv.string()});
    REQUIRE(a.code == 0);
    const auto s = nlohmann::json::parse(a.out);
    CHECK(s["primes"] == 46);
    CHECK(s["hasse_bound_holds"] == true);
    CHECK(s["euler_product"]["value"] == 1.0);
    CHECK(slurp(csv).rfind("p,a_p,lambda_p\n2,-2,", 0) == 0);
    CHECK(run({"ap-count", "--p-max", "10"}).code == 2);
}
