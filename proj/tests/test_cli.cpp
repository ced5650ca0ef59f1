#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_config.hpp"
#include "cli_run.hpp"
#include "fpp/errors.hpp"

using namespace fpp;
using namespace fpp::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("fpp_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("config parsing") {
    SUBCASE("minimal document fills defaults") {
        const ExperimentConfig c = parse_config("", "mu");
        CHECK(c.law == "exp:rate=1");
        CHECK(c.d == 1);
        CHECK(c.samples == 1000);
        CHECK(c.workers == 1);
    }
    SUBCASE("values, comments and blank lines") {
        const std::string text =
            "# comment\n"
            "law = gamma:shape=2,rate=1\n"
            "\n"
            "ns = 8,16,32\n"
            "samples = 50   # trailing comment\n";
        const ExperimentConfig c = parse_config(text, "mu");
        CHECK(c.law == "gamma:shape=2,rate=1");
        CHECK(c.ns == std::vector<std::int64_t>{8, 16, 32});
        CHECK(c.samples == 50);
    }
    SUBCASE("odd n is rejected naming the key") {
        ExperimentConfig c = parse_config("n = 9\nsamples = 4", "simulate");
        CHECK_THROWS_WITH_AS(validate(c), "key 'n': must be even, got 9", ConfigError);
    }
    SUBCASE("unknown keys fail with the line number") {
        try {
            parse_config("law = exp:rate=1\nbogus = 3\n", "mu");
            FAIL("expected ConfigError");
        } catch (const ConfigError& err) {
            CHECK(std::string(err.what()).find("line 2") != std::string::npos);
            CHECK(std::string(err.what()).find("bogus") != std::string::npos);
        }
    }
    SUBCASE("keys outside the subcommand schema fail") {
        CHECK_THROWS_AS(parse_config("grid_min = 0.5\n", "mu"), ConfigError);
    }
    SUBCASE("malformed law specs fail eagerly") {
        CHECK_THROWS_AS(parse_config("law = exp:rate=-1\n", "mu"), ConfigError);
    }
    SUBCASE("dyadic range resolution") {
        const ExperimentConfig c =
            parse_config("n_min = 8\nn_max = 64\ndyadic = true\n", "mu");
        CHECK(resolve_ns(c) == std::vector<std::int64_t>{8, 16, 32, 64});
    }
}

TEST_CASE("mu run under the constant law") {
    const fs::path dir = temp_dir("mu_const");
    ExperimentConfig c = parse_config(
        "law = const:value=1\nns = 4,8,16\nsamples = 8\nseed = 3\n", "mu");
    c.out = dir.string();
    const RunManifest manifest = run(c);
    CHECK(manifest.subcommand == "mu");
    CHECK(manifest.outputs.size() == 2);

    const std::string series = slurp(dir / "series.csv");
    CHECK(series.find("4,4,0,8") != std::string::npos);
    CHECK(series.find("8,8,0,8") != std::string::npos);
    CHECK(series.find("16,16,0,8") != std::string::npos);
    const std::string mu = slurp(dir / "mu.json");
    CHECK(mu.find("\"mu_hat\": 1.0") != std::string::npos);
    CHECK(fs::exists(dir / "run_manifest.json"));
}

TEST_CASE("rerun reproduces identical digests across worker counts") {
    ExperimentConfig base = parse_config(
        "law = exp:rate=1\nns = 8,16\nsamples = 60\nseed = 12\n", "mu");

    const fs::path dir1 = temp_dir("repro1");
    base.out = dir1.string();
    base.workers = 1;
    const RunManifest m1 = run(base);

    const fs::path dir2 = temp_dir("repro2");
    base.out = dir2.string();
    base.workers = 2;
    const RunManifest m2 = run(base);

    REQUIRE(m1.outputs.size() == m2.outputs.size());
    for (std::size_t i = 0; i < m1.outputs.size(); ++i) {
        CHECK(m1.outputs[i].file == m2.outputs[i].file);
        CHECK(m1.outputs[i].digest == m2.outputs[i].digest);
        CHECK(slurp(dir1 / m1.outputs[i].file) == slurp(dir2 / m2.outputs[i].file));
    }
}

TEST_CASE("simulate writes a result with a parsable geodesic") {
    const fs::path dir = temp_dir("simulate");
    ExperimentConfig c =
        parse_config("law = exp:rate=1\nn = 12\nemit_front = true\n", "simulate");
    c.out = dir.string();
    run(c);
    const std::string result = slurp(dir / "result.json");
    CHECK(result.find("\"geodesic\"") != std::string::npos);
    const std::string front = slurp(dir / "front.csv");
    CHECK(front.rfind("layer,x1,value", 0) == 0);
}

TEST_CASE("simulate evaluates a loaded path against the field") {
    const fs::path dir = temp_dir("simulate_path");
    ExperimentConfig c = parse_config(
        "law = exp:rate=1\nn = 4\npath = 0 0; 1+ 1+ 1- 1-\n", "simulate");
    c.out = dir.string();
    run(c);
    const std::string result = slurp(dir / "result.json");
    CHECK(result.find("\"given_path\"") != std::string::npos);
    CHECK(result.find("\"excess\"") != std::string::npos);
    // A malformed path is a config error.
    ExperimentConfig bad = parse_config("law = exp:rate=1\nn = 4\npath = 0 0; 9+\n",
                                        "simulate");
    bad.out = (dir / "bad").string();
    CHECK_THROWS_AS(run(bad), ConfigError);
}

TEST_CASE("oracle-check reports exact matches") {
    const fs::path dir = temp_dir("oracle");
    ExperimentConfig c = parse_config(
        "law = exp:rate=1\nm_max = 6\nfields = 10\nseed = 21\n", "oracle-check");
    c.out = dir.string();
    run(c);
    const std::string report = slurp(dir / "oracle_check.json");
    CHECK(report.find("\"exact\": true") != std::string::npos);
}

TEST_CASE("nearly-gamma run emits scan, condition and moment") {
    const fs::path dir = temp_dir("ngamma");
    ExperimentConfig c = parse_config(
        "law = exp:rate=1\ngrid_min = 0.01\ngrid_max = 50\ngrid_count = 200\n"
        "A_max = 10\nexp_t = 0.5\n",
        "nearly-gamma");
    c.out = dir.string();
    run(c);
    const std::string report = slurp(dir / "nearly_gamma.json");
    CHECK(report.find("\"pass\": true") != std::string::npos);
    CHECK(report.find("condition-(ii)") != std::string::npos);
    CHECK(report.find("\"finite\": true") != std::string::npos);
}

TEST_CASE("binary end-to-end") {
    const char* bin = std::getenv("FPP_BIN");
    if (bin == nullptr) {
        MESSAGE("FPP_BIN not set; skipping binary test");
        return;
    }
    const fs::path dir = temp_dir("binary");
    const fs::path cfg = dir / "mu.cfg";
    {
        std::ofstream os(cfg);
        os << "law = const:value=1\nns = 4,8\nsamples = 4\nout = " << (dir / "out1").string()
           << "\n";
    }
    std::string cmd = std::string(bin) + " mu --config " + cfg.string() + " >/dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(dir / "out1" / "series.csv"));

    // Re-run into a second directory; data files must be byte-identical.
    std::string cmd2 = std::string(bin) + " mu --config " + cfg.string() + " --out " +
                       (dir / "out2").string() + " >/dev/null 2>&1";
    CHECK(std::system(cmd2.c_str()) == 0);
    CHECK(slurp(dir / "out1" / "series.csv") == slurp(dir / "out2" / "series.csv"));
    CHECK(slurp(dir / "out1" / "mu.json") == slurp(dir / "out2" / "mu.json"));

    // Config errors exit with code 2.
    const fs::path bad = dir / "bad.cfg";
    {
        std::ofstream os(bad);
        os << "ns = 3,5\n";
    }
    const int rc = std::system((std::string(bin) + " mu --config " + bad.string() +
                                " >/dev/null 2>&1")
                                   .c_str());
    CHECK(WEXITSTATUS(rc) == 2);
}

TEST_SUITE_END();
