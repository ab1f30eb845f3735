#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using monoquad::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("monoquad_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path path(const std::string& name) const { return dir_ / name; }

    fs::path dir_;
};

const std::string kLhs4 = R"({"kind":"stratified","boundaries":[0,0.25,0.5,0.75,1],"allocation":[1,1,1,1]})";

}  // namespace

TEST_F(CliTest, WorstCaseExamples) {
    auto r = invoke({"worst-case", "--estimator", kLhs4, "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["worst_case"].get<double>(), 0.015625);
    EXPECT_TRUE(j["verified"].get<bool>());
    EXPECT_EQ(j["witness"]["x0"].get<double>(), 0.125);

    r = invoke({"worst-case", "--estimator", R"({"kind":"simple_mc","n":1})", "--format", "json"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out)["worst_case"].get<double>(), 0.25);

    r = invoke({"worst-case", "--estimator", R"({"kind":"control_variate","n":2})"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("0.04166666666667"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("verified"), std::string::npos);

    r = invoke({"worst-case", "--estimator", R"({"kind":"trapezoid","n":3})", "--format", "json"});
    ASSERT_EQ(r.code, 0);
    j = json::parse(r.out);
    EXPECT_EQ(j["worst_case"].get<double>(), 0.125);
    EXPECT_EQ(j["squared_error"].get<double>(), 1.0 / 64.0);
}

TEST_F(CliTest, WorstCaseErrors) {
    EXPECT_EQ(invoke({"worst-case", "--estimator", "{not json"}).code, 2);
    EXPECT_EQ(invoke({"worst-case", "--estimator", R"({"kind":"nope","n":2})"}).code, 2);
    EXPECT_EQ(invoke({"worst-case", "--estimator", R"({"kind":"simple_mc","n":0})"}).code, 3);
    EXPECT_EQ(invoke({"worst-case"}).code, 2);
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"frobnicate"}).code, 2);
    EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST_F(CliTest, RatiosMatchGoldenFile) {
    const auto r = invoke({"ratios", "--n-max", "10"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, slurp(fs::path(MONOQUAD_TEST_DATA_DIR) / "ratios_n10.csv"));
    EXPECT_NE(r.out.find("\r\n1,0.1767766952966,0.03125,0.25,0.08333333333333,0.25,0.08333333333333,2.666666666667,"),
              std::string::npos);
}

TEST_F(CliTest, SimulateFromConfigFileWithOverrides) {
    const auto config = path("config.json");
    std::ofstream(config) << R"({"estimator":{"kind":"trapezoid","n":3},"function":{"kind":"unit_step","x0":0.6},
                                 "replications":5,"seed":3})";
    auto r = invoke({"simulate", config.string(), "--replications", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["schema"], 1);
    EXPECT_EQ(j["replications"], 1);
    EXPECT_EQ(j["config"]["seed"], 3);
    EXPECT_EQ(j["empirical_variance"].get<double>(), 0.0);

    r = invoke({"simulate", config.string(), "--estimator", R"({"kind":"simple_mc","n":2})", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, 7), "schema,");
    EXPECT_NE(r.out.find("simple_mc"), std::string::npos);
}

TEST_F(CliTest, SimulateErrors) {
    const std::string f = R"({"kind":"unit_step","x0":0.5})";
    EXPECT_EQ(invoke({"simulate", "--estimator", R"({"kind":"magic","n":2})", "--function", f}).code, 2);
    EXPECT_EQ(
        invoke({"simulate", "--estimator", R"({"kind":"simple_mc","n":2})", "--function", f, "--replications", "0"})
            .code,
        3);
    EXPECT_EQ(invoke({"simulate", "--function", f}).code, 2);
    EXPECT_EQ(invoke({"simulate", path("missing.json").string()}).code, 2);
}

TEST_F(CliTest, SimulateOutputIndependentOfJobs) {
    const std::vector<std::string> base{"simulate",     "--estimator", R"({"kind":"control_variate","n":10})",
                                        "--function",   R"({"kind":"preset","id":"logistic"})",
                                        "--replications", "50000",     "--seed", "42"};
    auto one = base;
    one.insert(one.begin(), {"--jobs", "1"});
    auto four = base;
    four.insert(four.begin(), {"--jobs", "4"});
    const auto a = invoke(one);
    const auto b = invoke(four);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, BruteForce) {
    auto r = invoke({"brute-force", "--estimator", R"({"kind":"control_variate","n":1})", "--m", "4", "--g", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_NEAR(j["maximum"].get<double>(), 1.0 / 12.0, 1e-15);
    EXPECT_FALSE(j["witness_unit_step_x0"].is_null());
    EXPECT_EQ(j["search"], "exhaustive");

    r = invoke({"brute-force", "--estimator", R"({"kind":"simple_mc","n":1})", "--m", "1", "--g", "1"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(json::parse(r.out)["candidates"], 2);

    r = invoke({"brute-force", "--estimator", R"({"kind":"simple_mc","n":1})", "--m", "8", "--g", "8", "--cap", "1000"});
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.err.find("12870"), std::string::npos) << r.err;

    r = invoke({"brute-force", "--estimator", R"({"kind":"simple_mc","n":1})", "--m", "8", "--g", "8", "--cap", "1000",
                "--heuristic"});
    ASSERT_EQ(r.code, 0);
    j = json::parse(r.out);
    EXPECT_EQ(j["search"], "coordinate_ascent (heuristic)");
    EXPECT_DOUBLE_EQ(j["maximum"].get<double>(), 0.25);
}

TEST_F(CliTest, LowerBound) {
    auto r = invoke({"lower-bound", "--estimator", R"({"kind":"simple_mc","n":1})", "--p", "1", "--replications",
                     "100000"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["bound"].get<double>(), 0.125);
    EXPECT_EQ(j["integral_gap"].get<double>(), 0.5);
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_GE(j["max_lp_error"].get<double>(), 0.125 - 4.0 * j["max_lp_standard_error"].get<double>());

    r = invoke({"lower-bound", "--estimator", kLhs4, "--p", "2", "--replications", "20000"});
    ASSERT_EQ(r.code, 0) << r.err;
    j = json::parse(r.out);
    EXPECT_NEAR(j["bound"].get<double>(), std::pow(2.0, -2.5) / 4.0, 1e-15);
    EXPECT_EQ(j["integral_gap"].get<double>(), 0.125);
    EXPECT_TRUE(j["pass"].get<bool>());
}

TEST_F(CliTest, ManifestReplayIsByteIdentical) {
    const auto out = path("report.json");
    auto r = invoke({"simulate", "--estimator", R"({"kind":"simple_mc","n":3})", "--function",
                     R"({"kind":"preset","id":"sqrt"})", "--replications", "1000", "--seed", "8", "--out",
                     out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    const auto manifest_path = path("report.json.manifest.json");
    ASSERT_TRUE(fs::exists(manifest_path));
    const auto manifest = json::parse(slurp(manifest_path));
    EXPECT_EQ(manifest["command"], "simulate");
    EXPECT_EQ(manifest["tool"], "monoquad");
    EXPECT_EQ(manifest["seed"], 8);
    EXPECT_TRUE(manifest.contains("wall_time_seconds"));

    const auto replayed = path("replayed.json");
    r = invoke({"replay", manifest_path.string(), "--out", replayed.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(out), slurp(replayed));

    for (const std::vector<std::string>& cmd :
         {std::vector<std::string>{"ratios", "--n-max", "7"},
          std::vector<std::string>{"worst-case", "--estimator", kLhs4},
          std::vector<std::string>{"brute-force", "--estimator", kLhs4, "--m", "4", "--g", "2"},
          std::vector<std::string>{"lower-bound", "--estimator", kLhs4, "--replications", "500"}}) {
        auto args = cmd;
        args.insert(args.end(), {"--out", path("a.out").string(), "--manifest", path("a.manifest").string()});
        ASSERT_EQ(invoke(args).code, 0) << cmd.front();
        ASSERT_EQ(invoke({"replay", path("a.manifest").string(), "--out", path("b.out").string()}).code, 0);
        EXPECT_EQ(slurp(path("a.out")), slurp(path("b.out"))) << cmd.front();
    }
}

TEST_F(CliTest, BinaryExitCodesAndJobsEnvironment) {
    const std::string exe = MONOQUAD_CLI_PATH;
    auto status = [](const std::string& cmd) {
        const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    EXPECT_EQ(status(exe + " ratios --n-max 3"), 0);
    EXPECT_EQ(status(exe + " worst-case --estimator '{bad'"), 2);
    EXPECT_EQ(status(exe + R"( worst-case --estimator '{"kind":"simple_mc","n":0}')"), 3);
    EXPECT_EQ(status(exe + R"( brute-force --estimator '{"kind":"simple_mc","n":1}' --m 8 --g 8 --cap 10)"), 4);

    const auto manifest = path("env.manifest");
    EXPECT_EQ(status("MONOQUAD_JOBS=3 " + exe +
                     R"( simulate --estimator '{"kind":"simple_mc","n":2}' --function '{"kind":"unit_step","x0":0.5}')"
                     " --replications 100 --manifest " +
                     manifest.string()),
              0);
    EXPECT_EQ(json::parse(slurp(manifest))["jobs"], 3);
}
