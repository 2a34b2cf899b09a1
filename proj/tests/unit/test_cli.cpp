#include "berwald/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace berwald;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("berwald_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

int config_error_line(const std::string& text) {
    try {
        cli::parse_config(text);
    } catch (const cli::ConfigError& e) {
        return e.line();
    }
    return -1;
}

std::string last_row(const std::string& csv) {
    std::string t = csv.substr(0, csv.find_last_not_of('\n') + 1);
    return t.substr(t.rfind('\n') + 1);
}

int shell(const std::string& args) {
    int rc = std::system((std::string(BERWALD_CLI) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(ShortSpecs, Parse) {
    EXPECT_NEAR(cli::parse_body("square").volume(), 1.0, 1e-14);
    EXPECT_EQ(cli::parse_body("simplex:3").dim(), 3);
    EXPECT_THROW(cli::parse_body("blob"), cli::ConfigError);
    EXPECT_THROW(cli::parse_body("cube:x"), cli::ConfigError);
    EXPECT_TRUE(cli::parse_measure("gaussian", 2).is_gaussian());
    EXPECT_EQ(cli::parse_measure("cauchy:2.5", 3).param(), 2.5);
    EXPECT_THROW(cli::parse_measure("cauchy", 2), cli::ConfigError);
    EXPECT_EQ(*cli::parse_descriptor("power:0.5", 2).exponent(), 0.5);
    EXPECT_TRUE(cli::parse_descriptor("ehrhard", 2).is_ehrhard());
    EXPECT_THROW(cli::parse_descriptor("log:2", 2), cli::ConfigError);
    cli::FunctionSpec f = cli::parse_function("roof:triangle@3");
    EXPECT_EQ(f.body, "triangle");
    EXPECT_EQ(f.height, 3.0);
    EXPECT_EQ(cli::parse_list("2,1,-0.5").size(), 3u);
}

TEST(ConfigSchema, ErrorsCarryLines) {
    EXPECT_EQ(config_error_line("experiments: [{op: body_info, body: square}]\n"), 1);
    EXPECT_EQ(config_error_line("schema_version: 7\nexperiments: [{op: body_info, body: square}]\n"), 1);
    EXPECT_EQ(config_error_line("schema_version: 1\nexperiments:\n  - op: body_info\n    body: blob\n"), 4);
    EXPECT_EQ(config_error_line("schema_version: 1\nexperiments:\n  - op: body_info\n    bodyy: square\n"), 4);
    EXPECT_EQ(config_error_line("schema_version: 1\nexperiments:\n  - op: frobnicate\n"), 3);
    EXPECT_EQ(config_error_line("schema_version: 1\nglobal:\n  tolerance: abc\nexperiments: [{op: body_info, body: square}]\n"),
              3);
}

TEST(ConfigSchema, DomainsCheckedBeforeRunning) {
    const std::string head = "schema_version: 1\nexperiments:\n";
    // Q-type descriptor in an F chain.
    EXPECT_GT(config_error_line(head + "  - {op: chain_F, body: square, measure: gaussian, descriptor: ehrhard}\n"), 0);
    // Cauchy measures are not log-concave.
    EXPECT_GT(config_error_line(head + "  - {op: chain_log, body: square, measure: \"cauchy:3\"}\n"), 0);
    EXPECT_GT(config_error_line(head + "  - {op: chain_symmetric, body: square, measure: gaussian}\n"), 0);
    EXPECT_GT(config_error_line(head + "  - {op: moments, measure: gaussian, direction: [1, 0]}\n"), 0);
    EXPECT_GT(config_error_line(head + "  - {op: radial_mean, body: square, measure: gaussian, direction: [1, 0, 0]}\n"), 0);
    EXPECT_GT(config_error_line(head + "  - {op: body_info, body: square, output: a}\n  - {op: body_info, body: square, output: a}\n"), 0);
}

TEST(ConfigSchema, InlineAndNamedEntries) {
    cli::SceneConfig cfg = cli::parse_config(R"(schema_version: 1
bodies:
  tri: {vertices: [[0, 0], [1, 0], [0, 1]]}
  box:
    halfspaces:
      - {normal: [1, 0], offset: 1}
      - {normal: [-1, 0], offset: 1}
      - {normal: [0, 1], offset: 1}
      - {normal: [0, -1], offset: 1}
measures:
  g: {kind: gaussian, sigma: 2}
experiments:
  - {op: body_info, body: tri}
  - {op: body_info, body: box, measure: g}
  - {op: rs_zhang, body: {kind: simplex, dim: 2}, output: rz}
)");
    EXPECT_NEAR(cfg.bodies.at("box").volume(), 4.0, 1e-12);
    EXPECT_EQ(cfg.measures.at("g"), "gaussian:2");
    ASSERT_EQ(cfg.experiments.size(), 4u);
    EXPECT_EQ(cfg.experiments[2].output, "rz_rs");
    EXPECT_EQ(cfg.experiments[3].op, "zhang");
}

TEST(Run, SquareChainConfig) {
    fs::path out = scratch("square");
    cli::Overrides ov;
    ov.out_dir = out.string();
    std::ostringstream so, se;
    EXPECT_EQ(cli::run_file(CONFIG_DIR "/square_chain.cfg", ov, so, se), 0) << se.str();
    std::string csv = slurp(out / "square_chain.csv");
    EXPECT_EQ(csv.rfind("# claim=reverse_chain_F\n", 0), 0u);
    std::stringstream ss(csv);
    std::string line;
    std::getline(ss, line);
    std::getline(ss, line);
    std::getline(ss, line);
    std::vector<double> v = cli::parse_list(line);
    ASSERT_EQ(v.size(), 6u);
    EXPECT_NEAR(v[2], 1.0, 1e-12);
    EXPECT_NEAR(v[3], std::sqrt(2.0), 1e-9);
    EXPECT_NEAR(v[4], 1.5, 1e-9);
    EXPECT_NEAR(v[5], 2.0, 1e-12);
}

TEST(Run, SimplexConfigAllEquality) {
    cli::SceneConfig cfg = cli::load_config(CONFIG_DIR "/simplex_equality.cfg");
    cli::Overrides ov;
    ov.out_dir = scratch("simplex").string();
    cli::RunSummary s = cli::run(cfg, ov);
    EXPECT_EQ(s.exit_code, 0);
    for (const auto& r : s.results)
        if (r.certifies) {
            EXPECT_TRUE(r.pass) << r.name;
            EXPECT_TRUE(r.equality) << r.name;
        }
}

TEST(Run, ByteIdenticalCsv) {
    const std::string text = R"(schema_version: 1
global: {seed: 7, directions: {scheme: seeded, count: 12}}
experiments:
  - {op: chain_log, body: square, measure: gaussian, p_grid: [2, 1], output: c}
  - {op: berwald_curve, function: "random:square@3", measure: gaussian, descriptors: [log, ehrhard], output: b}
)";
    cli::SceneConfig cfg = cli::parse_config(text);
    cli::Overrides a, b;
    a.out_dir = scratch("rep_a").string();
    b.out_dir = scratch("rep_b").string();
    cli::run(cfg, a);
    cli::run(cfg, b);
    for (const char* f : {"c.csv", "b.csv"}) {
        std::string x = slurp(fs::path(a.out_dir) / f);
        EXPECT_FALSE(x.empty());
        EXPECT_EQ(x, slurp(fs::path(b.out_dir) / f)) << f;
    }
}

TEST(Run, JsonFormat) {
    cli::SceneConfig cfg = cli::parse_config(
        "schema_version: 1\nexperiments:\n  - {op: zhang, body: triangle, output: z}\n  - {op: body_info, body: "
        "square, output: i}\n");
    cli::Overrides ov;
    ov.out_dir = scratch("json").string();
    ov.format = "json";
    EXPECT_EQ(cli::run(cfg, ov).exit_code, 0);
    auto z = nlohmann::json::parse(slurp(fs::path(ov.out_dir) / "z.json"));
    EXPECT_EQ(z["claim"], "zhang");
    EXPECT_TRUE(z["equality"].get<bool>());
    auto i = nlohmann::json::parse(slurp(fs::path(ov.out_dir) / "i.json"));
    EXPECT_EQ(i["meta"][0], "claim=body_info");
    EXPECT_EQ(i["columns"][0], "quantity");
}

TEST(Run, FailedCertificationExitsOne) {
    // A negative tolerance demands margins the strict square chain does not have.
    cli::SceneConfig cfg = cli::parse_config(
        "schema_version: 1\nexperiments:\n  - {op: chain_F, body: square, p_grid: [2, 1], direction: [1, 0]}\n");
    cli::Overrides ov;
    ov.out_dir = scratch("fail").string();
    ov.tol = -0.5;
    EXPECT_EQ(cli::run(cfg, ov).exit_code, 1);
    ov.tol = 1e-6;
    EXPECT_EQ(cli::run(cfg, ov).exit_code, 0);
}

TEST(Executable, ExitCodesAndExamples) {
    EXPECT_EQ(shell("run /nonexistent/missing.cfg"), 2);
    EXPECT_EQ(shell("radial-mean --body square --bogus"), 2);
    EXPECT_EQ(shell("radial-mean --body blob --p 1"), 2);
    EXPECT_EQ(shell("body-info --body triangle"), 0);
    fs::path out = scratch("exe");
    EXPECT_EQ(shell("radial-mean --body square --measure lebesgue --p 1 --dir 1,0 --out-dir " + out.string()), 0);
    std::string csv = slurp(out / "radial_mean.csv");
    EXPECT_NEAR(cli::parse_list(last_row(csv))[3], 0.5, 1e-12);
    EXPECT_EQ(shell("projection-body --body square --measure gaussian --dir 1,0 --out-dir " + out.string()), 0);
    csv = slurp(out / "projection_body.csv");
    EXPECT_NEAR(cli::parse_list(last_row(csv))[2], 0.13617, 1e-5);
    EXPECT_EQ(shell("berwald-curve --f roof:triangle --measure lebesgue --desc power:0.5 --out-dir " + out.string()), 0);
    std::stringstream ss(slurp(out / "berwald_curve.csv"));
    std::string line;
    std::getline(ss, line);
    std::getline(ss, line);
    int rows = 0;
    while (std::getline(ss, line)) {
        EXPECT_NEAR(cli::parse_list(line.substr(line.find(',') + 1))[1], 1.0, 1e-6);
        ++rows;
    }
    EXPECT_GT(rows, 3);
}
