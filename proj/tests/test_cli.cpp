#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "hlx/hlx.hpp"

using namespace hlx;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + HLX_CLI_PATH + std::string(" ") + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct Csv {
    std::vector<std::string> header;  ///< `#` lines
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string cell(std::size_t row, const std::string& col) const {
        const auto it = std::find(columns.begin(), columns.end(), col);
        if (it == columns.end()) throw std::runtime_error("no column " + col);
        return rows.at(row).at(std::size_t(it - columns.begin()));
    }
    double value(std::size_t row, const std::string& col) const { return std::stod(cell(row, col)); }
    bool has_header(const std::string& line) const {
        return std::find(header.begin(), header.end(), "# " + line) != header.end();
    }
};

std::vector<std::string> split(const std::string& s, char d) {
    std::vector<std::string> out;
    std::string tok;
    std::stringstream ss(s);
    while (std::getline(ss, tok, d)) out.push_back(tok);
    if (!s.empty() && s.back() == d) out.emplace_back();
    return out;
}

Csv parse(const std::string& text) {
    Csv c;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.rfind("#", 0) == 0) {
            c.header.push_back(line);
        } else if (c.columns.empty()) {
            c.columns = split(line, ',');
        } else {
            c.rows.push_back(split(line, ','));
        }
    }
    return c;
}

std::string body(const std::string& text) {
    std::stringstream ss(text), out;
    std::string line;
    while (std::getline(ss, line))
        if (line.rfind("#", 0) != 0) out << line << "\n";
    return out.str();
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("hlx_cli_test_" + name)).string();
}

}  // namespace

TEST(Cli, SingularEvalClassical) {
    const auto r = run("singular-eval --chi1 1.1 --chi2 1.1 --m 4");
    ASSERT_EQ(r.code, 0);
    const auto c = parse(r.out);
    ASSERT_EQ(c.rows.size(), 1u);
    EXPECT_NEAR(c.value(0, "re"), 1.32032363, 1e-8);
    EXPECT_EQ(c.cell(0, "bounds_ok"), "1");
    EXPECT_TRUE(c.has_header("subcommand = singular-eval"));
    EXPECT_TRUE(c.has_header("variant = goldbach"));
    EXPECT_TRUE(c.has_header("constants_version = 1"));
}

TEST(Cli, GoldbachMatchesEnumeration) {
    const auto r = run("goldbach --x 1000 --m 100 --x1 0");
    ASSERT_EQ(r.code, 0);
    const auto c = parse(r.out);
    ASSERT_EQ(c.rows.size(), 1u);
    double R = 0;
    for (int p = 2; p < 100; ++p)
        if (is_prime(u64(p)) && is_prime(u64(100 - p))) R += std::log(double(p)) * std::log(double(100 - p));
    EXPECT_NEAR(c.value(0, "R"), R, 1e-9 * R);
    // the default window (X^0.9, X] is above m / 2
    const auto d = parse(run("goldbach --x 1000 --m 100").out);
    EXPECT_EQ(d.value(0, "R"), 0);
    EXPECT_TRUE(d.has_header("x1-epsilon = 0.1"));
}

TEST(Cli, TwinRange) {
    const auto r = run("twin --x 2000 --x1 10 --m-range 2:20:2");
    ASSERT_EQ(r.code, 0);
    const auto c = parse(r.out);
    ASSERT_EQ(c.rows.size(), 10u);
    double R = 0;
    for (int p = 11; p + 2 <= 2000; ++p)
        if (is_prime(u64(p)) && is_prime(u64(p + 2))) R += std::log(double(p)) * std::log(double(p + 2));
    EXPECT_NEAR(c.value(0, "Rprime"), R, 1e-9 * R);
    EXPECT_GT(c.value(0, "ratio"), 0.7);
    EXPECT_LT(c.value(0, "ratio"), 1.3);
}

TEST(Cli, CircleRunFullCircle) {
    const auto r = run("circle-run --x 20000 --x1-epsilon 0.5 --full-circle --m-range 10000:10100:4");
    ASSERT_EQ(r.code, 0);
    const auto c = parse(r.out);
    ASSERT_EQ(c.rows.size(), 26u);
    for (std::size_t i = 0; i < c.rows.size(); ++i) {
        const double R = c.value(i, "R");
        EXPECT_NEAR(c.value(i, "R1"), R, 1e-8 * std::max(1.0, R));
        EXPECT_EQ(c.value(i, "R2"), 0);
    }
}

TEST(Cli, CircleRunSplits) {
    const auto r = run("circle-run --x 20000 --p 20 --x1-epsilon 0.3 --m-range 10000:20000:2 --samples 15 --seed 4");
    ASSERT_EQ(r.code, 0);
    const auto c = parse(r.out);
    ASSERT_EQ(c.rows.size(), 15u);
    for (std::size_t i = 0; i < c.rows.size(); ++i) {
        const double R = c.value(i, "R");
        EXPECT_NEAR(c.value(i, "R1") + c.value(i, "R2"), R, 1e-8 * R);
        EXPECT_EQ(c.cell(i, "n_terms"), "1");
    }
    EXPECT_TRUE(c.has_header("P_used = 20"));
    EXPECT_TRUE(c.has_header("N = 65536"));
}

TEST(Cli, Determinism) {
    const std::string args = "circle-run --x 30000 --p 30 --x1-epsilon 0.3 --samples 10";
    const auto a = run(args), b = run(args), c = run("--threads 3 " + args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(body(a.out), body(c.out));
    const auto s1 = run("singular-scan --lcm-max 15 --m-max 12"), s2 = run("--threads 4 singular-scan --lcm-max 15 --m-max 12");
    ASSERT_EQ(s1.code, 0);
    EXPECT_EQ(body(s1.out), body(s2.out));
    EXPECT_GT(parse(s1.out).rows.size(), 100u);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("no-such-command").code, 2);
    EXPECT_EQ(run("goldbach --x 1000 --bogus 1").code, 2);
    EXPECT_EQ(run("goldbach --m 10").code, 2);                     // --x missing
    EXPECT_EQ(run("goldbach --x 1000").code, 2);                   // no m
    EXPECT_EQ(run("goldbach --x 1000 --m-range 9:3").code, 2);
    EXPECT_EQ(run("singular-eval --chi1 4.2 --chi2 1.1 --m 4").code, 2);
    EXPECT_EQ(run("singular-eval --chi1 8.7 --chi2 1.1 --m 4").code, 2);  // conductor 4
    EXPECT_EQ(run("dh-bound --delta 0.5").code, 2);
    EXPECT_EQ(run("circle-run --x 10000 --p 200").code, 2);           // P above sqrt X
    EXPECT_EQ(run("gauss-verify --q-max 20 --tol -1").code, 1);       // every check fails
    EXPECT_EQ(run("--constants /nonexistent/file.conf characters --q 3").code, 1);
    EXPECT_EQ(run("--help").code, 0);
    EXPECT_EQ(run("circle-run --help").code, 0);
}

TEST(Cli, ZerosRoundTrip) {
    const std::string path = temp_path("zeros.txt");
    const auto r = run("zeros-compute --q 3 --index 2 --height 40 --out " + path);
    ASSERT_EQ(r.code, 0);
    const auto c = parse(r.out);
    const auto t = load_zeros(path);
    ASSERT_EQ(t.records().size(), c.rows.size());
    EXPECT_NEAR(t.records()[0].gamma, 8.0397371556815, 1e-9);
    EXPECT_DOUBLE_EQ(t.coverage(3, 2), 40);
    // 3.2 is real, so its own zeros suffice; the file lacks zeta zeros
    const auto v = run("zeros-verify --x 1000 --chi 3.2 --height 40 --zeros-file " + path);
    EXPECT_EQ(v.code, 0);
    EXPECT_EQ(parse(v.out).cell(0, "ok"), "1");
    EXPECT_EQ(run("zeros-verify --x 1000 --chi 1.1 --height 40 --zeros-file " + path).code, 1);
    std::filesystem::remove(path);
}

TEST(Cli, JsonMirrorAndConstantsOverride) {
    const std::string conf = temp_path("constants.conf"), json = temp_path("report.json"), csv = temp_path("report.csv");
    {
        std::ofstream f(conf);
        f << "version = test-7\nexplicit_formula_C = 3\n";
    }
    const auto r = run("--json " + json + " dh-bound --delta 0.02 --gamma 1 --q1 3 --q2 4 --out " + csv,
                       "HLX_CONSTANTS=" + conf);
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(csv);
    std::stringstream text;
    text << in.rdbuf();
    const auto c = parse(text.str());
    EXPECT_TRUE(c.has_header("constants_version = test-7"));
    std::ifstream jin(json);
    const auto j = nlohmann::json::parse(jin);
    EXPECT_EQ(j["config"]["constants_version"], "test-7");
    ASSERT_EQ(j["rows"].size(), 1u);
    EXPECT_EQ(j["rows"][0][7].get<std::string>(), c.cell(0, "bound"));
    EXPECT_NEAR(std::stod(c.cell(0, "bound")), dh_lower_bound(0.02, 1, 3, 4, 1, 0.01).bound, 1e-12);
    for (const auto& p : {conf, json, csv}) std::filesystem::remove(p);
}

TEST(Cli, DiagnosticsReport) {
    const auto r = run("diagnostics --x 20000 --p 20 --x1-epsilon 0.3");
    ASSERT_EQ(r.code, 0);
    const auto c = parse(r.out);
    for (std::size_t i = 0; i < c.rows.size(); ++i) {
        if (!c.rows[i][3].empty()) {
            EXPECT_EQ(c.rows[i][3], "1") << c.rows[i][0];
        }
    }
    EXPECT_TRUE(c.has_header("eps = 0.1"));
}
