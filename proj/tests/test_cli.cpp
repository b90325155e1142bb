#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "gaborframe/cli.hpp"

using namespace gabor;

namespace {

std::string temp_path(const std::string& name) { return ::testing::TempDir() + name; }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

cli::RunConfig config(const std::string& command, const std::string& out) {
    cli::RunConfig c;
    c.command = command;
    c.out = out;
    return c;
}

int run_quiet(const cli::RunConfig& c) {
    std::ostringstream err;
    return cli::run(c, err);
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(GABORFRAME_BIN) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(CliSpecs, Windows) {
    EXPECT_EQ(cli::parse_window("hermite:2").hermite_index(), (std::vector<int>{2}));
    EXPECT_EQ(cli::parse_window("hermite:1,2").dim(), 2);
    EXPECT_EQ(cli::parse_window("gaussian").kind(), WindowKind::gaussian);
    EXPECT_EQ(cli::parse_window("gaussian:2").dim(), 2);
    EXPECT_THROW(cli::parse_window("hermite"), InvalidArgument);
    EXPECT_THROW(cli::parse_window("hermite:x"), InvalidArgument);
    EXPECT_THROW(cli::parse_window("hermite:1x"), InvalidArgument);
    EXPECT_THROW(cli::parse_window("boxcar"), InvalidArgument);
    EXPECT_THROW(cli::parse_window("sampled:/nonexistent.csv"), InvalidArgument);
}

TEST(CliSpecs, Lattices) {
    EXPECT_NEAR(cli::parse_lattice("square", 0.5, 1).volume(), 0.5, 1e-15);
    EXPECT_NEAR(cli::parse_lattice("square", std::nullopt, 2).volume(), 0.25, 1e-15);
    EXPECT_NEAR(cli::parse_lattice("hexagonal", 0.5, 1).volume(), 0.5, 1e-15);
    EXPECT_THROW(cli::parse_lattice("hexagonal", 0.5, 2), InvalidArgument);
    EXPECT_THROW(cli::parse_lattice("square", -1.0, 1), InvalidArgument);
    EXPECT_THROW(cli::parse_lattice("triangle", 0.5, 1), InvalidArgument);

    const std::string json = temp_path("m.json");
    std::ofstream(json) << R"({"M": [[0.7071067811865476, 0], [0, 0.7071067811865476]]})";
    EXPECT_NEAR(cli::parse_lattice("matrix:" + json, std::nullopt, 1).volume(), 0.5, 1e-15);
    EXPECT_THROW(cli::parse_lattice("matrix:" + json, 0.5, 1), InvalidArgument);
    const std::string txt = temp_path("m.txt");
    std::ofstream(txt) << "1 0.5\n0, 2\n";
    EXPECT_NEAR(cli::parse_lattice("matrix:" + txt, std::nullopt, 1).volume(), 2.0, 1e-15);
    const std::string ragged = temp_path("r.txt");
    std::ofstream(ragged) << "1 0.5\n0\n";
    EXPECT_THROW(cli::parse_lattice("matrix:" + ragged, std::nullopt, 1), InvalidArgument);
    std::remove(json.c_str());
    std::remove(txt.c_str());
    std::remove(ragged.c_str());
}

TEST(CliRun, VerifyHermiteOne) {
    const std::string out = temp_path("verify.json");
    auto c = config("verify", out);
    c.window = "hermite:1";
    c.volume = 0.5;
    EXPECT_EQ(run_quiet(c), cli::kOk);
    const auto j = nlohmann::json::parse(slurp(out));
    EXPECT_TRUE(j["hypotheses_met"].get<bool>());
    EXPECT_EQ(j["conclusion"], "not_a_frame");
    EXPECT_LE(j["lower_A"].get<double>(), 1e-6 * j["upper_B"].get<double>());
    std::remove(out.c_str());
}

TEST(CliRun, BoundsBothMethodsIsArray) {
    const std::string out = temp_path("both.json");
    auto c = config("bounds", out);
    c.window = "hermite:0";
    c.method = "both";
    c.section_radius = 12.0;
    EXPECT_EQ(run_quiet(c), cli::kOk);
    const auto j = nlohmann::json::parse(slurp(out));
    ASSERT_TRUE(j.is_array());
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[0]["method"], "janssen_series");
    EXPECT_EQ(j[1]["method"], "gram_finite_section");
    EXPECT_NEAR(j[0]["A"].get<double>(), j[1]["A"].get<double>(), 1e-3);
    std::remove(out.c_str());
}

TEST(CliRun, BoundsCsv) {
    const std::string out = temp_path("bounds.csv");
    auto c = config("bounds", out);
    c.format = "csv";
    EXPECT_EQ(run_quiet(c), cli::kOk);
    const auto text = slurp(out);
    EXPECT_EQ(text.substr(0, text.find('\n')), "method,A,B,converged,grid_res,truncation_radius");
    std::remove(out.c_str());
}

TEST(CliRun, Deterministic) {
    const std::string a = temp_path("det_a.json"), b = temp_path("det_b.json");
    auto c = config("bounds", a);
    c.window = "hermite:2";
    c.lattice = "hexagonal";
    c.volume = 0.5;
    EXPECT_EQ(run_quiet(c), cli::kOk);
    c.out = b;
    EXPECT_EQ(run_quiet(c), cli::kOk);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(slurp(a).find("time"), std::string::npos);
    std::remove(a.c_str());
    std::remove(b.c_str());
}

TEST(CliRun, ScanCsv) {
    const std::string out = temp_path("scan.csv");
    auto c = config("scan", out);
    c.tau_count = 2;
    c.h_count = 2;
    c.grid_res = 32;
    EXPECT_EQ(run_quiet(c), cli::kOk);
    std::istringstream in(slurp(out));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "s,tau,h,A,B,converged");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 4);
    std::remove(out.c_str());
}

TEST(CliRun, ExitStatuses) {
    auto bad = config("bounds", "");
    bad.window = "nope";
    EXPECT_EQ(run_quiet(bad), cli::kInvalidConfig);
    auto odd = config("bounds", "");
    odd.volume = 1.0;
    EXPECT_EQ(run_quiet(odd), cli::kInvalidConfig);
    auto method = config("bounds", "");
    method.method = "magic";
    EXPECT_EQ(run_quiet(method), cli::kInvalidConfig);
    auto unknown = config("frobnicate", "");
    EXPECT_EQ(run_quiet(unknown), cli::kInvalidConfig);

    // A Gram section this small cannot settle its extrapolation: partial artifact, status 3.
    const std::string out = temp_path("partial.json");
    auto gram = config("bounds", out);
    gram.window = "hermite:2";
    gram.method = "gram";
    gram.section_radius = 6.0;
    EXPECT_EQ(run_quiet(gram), cli::kNotConverged);
    EXPECT_FALSE(nlohmann::json::parse(slurp(out))["converged"].get<bool>());
    std::remove(out.c_str());
}

TEST(CliRun, VerifyReportsGateFailureAsSuccess) {
    const std::string out = temp_path("verify_even.json");
    auto c = config("verify", out);
    c.window = "hermite:0";
    EXPECT_EQ(run_quiet(c), cli::kOk);
    EXPECT_FALSE(nlohmann::json::parse(slurp(out))["hypotheses_met"].get<bool>());
    std::remove(out.c_str());
}

TEST(CliBinary, ConfigFileAndFlagPrecedence) {
    const std::string cfg = temp_path("run.ini");
    const std::string out = temp_path("bin.json");
    std::ofstream(cfg) << "window=hermite:1\ngrid-res=32\nout=" << out << "\n";
    EXPECT_EQ(run_binary("bounds --config " + cfg), 0);
    auto j = nlohmann::json::parse(slurp(out));
    EXPECT_LE(j["A"].get<double>(), 1e-6);
    EXPECT_EQ(run_binary("bounds --config " + cfg + " --window hermite:0"), 0);
    j = nlohmann::json::parse(slurp(out));
    EXPECT_GT(j["A"].get<double>(), 1.6);
    std::remove(cfg.c_str());
    std::remove(out.c_str());
}

TEST(CliBinary, ParseErrorsAreInvalidConfig) {
    EXPECT_EQ(run_binary(""), 2);
    EXPECT_EQ(run_binary("bounds --grid-res notanint"), 2);
    EXPECT_EQ(run_binary("bounds --lattice square --volume 1"), 2);
}
