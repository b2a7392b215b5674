#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "peuler/config.hpp"
#include "peuler/run.hpp"

using namespace peuler;

namespace {

std::map<std::string, std::string> base_map() {
    return parse_config_text(R"(
mode = fixed-point
problem.gamma = 1.4
problem.K = 0.2
problem.L = 1.3
problem.M = 2.5
scheme.Nx = 10
forcing.term.0 = 0.2 1.0 0.3 1 0.0 sin
boundary.rho_b = 2.48832e-05
boundary.m_b = 4.727808e-05
init.kind = steady
fixed_point.apply_shift = false
)");
}

std::string source_dir() { return PEULER_SOURCE_DIR; }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("config: flat text parsing with comments") {
    const auto kv = parse_config_text("a.b = 1 # comment\n\n# full comment\nc = hello\n");
    CHECK(kv.at("a.b") == "1");
    CHECK(kv.at("c") == "hello");
    CHECK_THROWS_AS(parse_config_text("not a key value line\n"), ConfigError);
}

TEST_CASE("config: hypothesis violations are named") {
    {
        auto kv = base_map();
        kv["problem.M"] = "1.0"; // M < L
        try {
            config_from_map(kv);
            FAIL("expected rejection");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("condition-M") != std::string::npos);
        }
    }
    {
        auto kv = base_map();
        kv["problem.K"] = "0.1"; // forcing amplitude 0.2 exceeds K
        try {
            config_from_map(kv);
            FAIL("expected rejection");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("condition-X") != std::string::npos);
        }
    }
    {
        auto kv = base_map();
        kv["boundary.m_b"] = "1e-05"; // z_b far below L
        try {
            config_from_map(kv);
            FAIL("expected rejection");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("condition-BC") != std::string::npos);
        }
    }
    {
        auto kv = base_map();
        kv["init.kind"] = "constant";
        kv["init.rho"] = "2.48832e-05";
        kv["init.m"] = "1e-04"; // v too large: w(u0) above M + Kx
        try {
            config_from_map(kv);
            FAIL("expected rejection");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("condition-IC") != std::string::npos);
        }
    }
}

TEST_CASE("config: shipped sample and trivial configs validate") {
    const RunConfig sample = load_config(source_dir() + "/configs/sample.cfg");
    CHECK(sample.problem.gamma == doctest::Approx(1.4));
    CHECK(sample.problem.K == doctest::Approx(0.2));
    CHECK(sample.scheme.Nx == 50);
    CHECK(sample.forcing.terms.size() == 1);
    CHECK_FALSE(sample.fixed_point.apply_shift);

    const RunConfig trivial = load_config(source_dir() + "/configs/trivial.cfg");
    CHECK(trivial.problem.K == 0.0);
    CHECK(trivial.forcing.terms.empty());
    CHECK(trivial.init_kind == RunConfig::InitKind::Constant);
}

TEST_CASE("config: JSON form parses to the same dotted keys") {
    const auto kv = parse_config_text(R"json({
      "mode": "evolve",
      "problem": {"gamma": 1.4, "K": 0.2, "L": 1.3, "M": 2.5},
      "scheme": {"Nx": 10},
      "forcing": {"term": [{"0": "unused"}]},
      "study": {"Nx": [25, 50, 100]}
    })json");
    CHECK(kv.at("mode") == "evolve");
    CHECK(kv.at("problem.gamma") == "1.4");
    CHECK(kv.at("study.Nx") == "25 50 100");
}

TEST_CASE("config: environment overrides replace file values") {
    auto kv = base_map();
    setenv("PEULER_SCHEME_NX", "14", 1);
    const RunConfig cfg = config_from_map(kv);
    unsetenv("PEULER_SCHEME_NX");
    CHECK(cfg.scheme.Nx == 14);
}

TEST_CASE("config: initial data evaluators") {
    auto kv = base_map();
    RunConfig cfg = config_from_map(kv);
    const auto steady = cfg.initial_data();
    const Invariants iv0 = to_invariants(steady(0.0), cfg.problem);
    CHECK(iv0.z == doctest::Approx(1.3).epsilon(1e-9));
    const Invariants iv1 = to_invariants(steady(1.0), cfg.problem);
    CHECK(iv1.z == doctest::Approx(1.1).epsilon(1e-9));

    // table interpolation
    const auto dir = std::filesystem::temp_directory_path() / "peuler_cfg_test";
    std::filesystem::create_directories(dir);
    const auto table_path = (dir / "init.csv").string();
    {
        std::ofstream out(table_path);
        out << "x,rho,m\n0.0, 2.4e-05, 4.56e-05\n1.0, 2.6e-05, 4.94e-05\n";
    }
    kv["init.kind"] = "table";
    kv["init.file"] = table_path;
    RunConfig tcfg = config_from_map(kv);
    const auto table = tcfg.initial_data();
    CHECK(table(0.5).rho == doctest::Approx(2.5e-05).epsilon(1e-12));
    CHECK(table(-1.0).rho == doctest::Approx(2.4e-05).epsilon(1e-12));
}

TEST_CASE("run: determinism and verify load-back on a small fixed-point run") {
    auto kv = base_map();
    kv["scheme.Nx"] = "10";
    kv["seed"] = "7";
    const auto dir = std::filesystem::temp_directory_path() / "peuler_run_test";
    std::filesystem::remove_all(dir);

    RunConfig cfg = config_from_map(kv);
    cfg.out_dir = (dir / "a").string();
    REQUIRE(run(cfg) == kExitOk);
    cfg.out_dir = (dir / "b").string();
    REQUIRE(run(cfg) == kExitOk);

    for (const char* name : {"run_summary.json", "fixed_point_lattice.csv",
                             "residual_history.csv"}) {
        CHECK(slurp((dir / "a" / name).string()) == slurp((dir / "b" / name).string()));
    }

    // verify mode on the just-written lattice reproduces the embedded report
    RunConfig vcfg = config_from_map(kv);
    vcfg.mode = "verify";
    vcfg.out_dir = (dir / "a").string();
    REQUIRE(run(vcfg) == kExitOk);
    const std::string summary = slurp((dir / "a" / "run_summary.json").string());
    const std::string standalone = slurp((dir / "a" / "verification.json").string());
    // the embedded object must appear verbatim inside the summary
    std::string body = standalone;
    while (!body.empty() && (body.back() == '\n' || body.back() == ' ')) body.pop_back();
    std::string indented;
    for (char c : body) {
        indented += c;
        if (c == '\n') indented += "  ";
    }
    CHECK(summary.find(indented) != std::string::npos);
}

TEST_CASE("run: unknown mode is a config error") {
    auto kv = base_map();
    RunConfig cfg = config_from_map(kv);
    cfg.mode = "dance";
    CHECK_THROWS_AS(run(cfg), ConfigError);
}
