#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

using json = nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(PSPIN_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::vector<std::string> fields_of(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') { out.push_back(cur); cur.clear(); }
        else cur += c;
    }
    out.push_back(cur);
    return out;
}

} // namespace

TEST_CASE("critical-point: csv shape and values") {
    const auto r = run_cli("critical-point --p 5");
    REQUIRE(r.exit_code == 0);
    const auto ls = lines_of(r.out);
    REQUIRE(ls.size() == 2);
    CHECK(ls[0] == "p,m_star,lambda_star,s_star,resid1,resid2,resid3");
    const auto f = fields_of(ls[1]);
    REQUIRE(f.size() == 7);
    CHECK(std::stod(f[1]) == 0.5);
    CHECK(std::stod(f[2]) == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
    CHECK(std::stod(f[3]) == doctest::Approx(0.41809052).epsilon(1e-7));
}

TEST_CASE("exit codes: invalid arguments vs numerical failure") {
    CHECK(run_cli("critical-point --p 3").exit_code == 2);   // no critical point
    CHECK(run_cli("critical-point --p 4").exit_code == 2);   // even p
    CHECK(run_cli("critical-point").exit_code == 2);         // missing required
    CHECK(run_cli("no-such-command").exit_code == 2);        // parse error
    CHECK(run_cli("spectrum --p 3 --n 10 --k 1").exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("alpha-curve --help").exit_code == 0);
    // Unreachable validation tolerance: computation completes, check fails.
    CHECK(run_cli("validate --p 3 --n 6 --s-steps 1 --tol 1e-30").exit_code == 3);
}

TEST_CASE("byte-identical reruns") {
    for (const char* cmd :
         {"critical-point --p 7", "gap-scaling --self-test",
          "spectrum --p 3 --n 12 --s-steps 4 --k 3",
          "alpha-curve --p 5 --lambda 0.9 --format json"}) {
        const auto a = run_cli(cmd);
        const auto b = run_cli(cmd);
        REQUIRE(a.exit_code == 0);
        CHECK(a.exit_code == b.exit_code);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("json envelope validates against the shipped schema") {
    const auto r = run_cli("alpha-curve --p 5 --lambda-min 0.2 --lambda-max 1 "
                           "--lambda-steps 3 --format json");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.out);

    std::ifstream sf(PSPIN_SCHEMA_PATH);
    REQUIRE(sf.good());
    const json schema = json::parse(sf);

    // Structural validation against the schema document itself.
    for (const auto& req : schema.at("required"))
        CHECK(doc.contains(req.get<std::string>()));
    const auto& props = schema.at("properties");
    for (const auto& [key, value] : doc.items())
        CHECK(props.contains(key));
    CHECK(doc.at("schema") == "pspin-output-1");
    bool command_allowed = false;
    for (const auto& c : props.at("command").at("enum"))
        if (c == doc.at("command")) command_allowed = true;
    CHECK(command_allowed);
    REQUIRE(doc.at("columns").is_array());
    for (const auto& c : doc.at("columns")) CHECK(c.is_string());
    REQUIRE(doc.at("rows").is_array());
    for (const auto& row : doc.at("rows")) {
        REQUIRE(row.is_array());
        CHECK(row.size() == doc.at("columns").size());
        for (const auto& cell : row)
            CHECK((cell.is_number() || cell.is_string() || cell.is_null()));
    }

    // The lambda=0.2 row has no transition: status none, null numerics.
    const auto& first = doc.at("rows").at(0);
    CHECK(first.at(0).get<double>() == doctest::Approx(0.2));
    CHECK(first.at(1).is_null());
    CHECK(first.back() == "none");
}

TEST_CASE("gap-scaling self-test recovers the synthetic decay rate") {
    const auto r = run_cli("gap-scaling --self-test");
    REQUIRE(r.exit_code == 0);
    const auto ls = lines_of(r.out);
    REQUIRE(ls.size() == 11);  // header + N = 10..100
    CHECK(ls[0] ==
          "n,s_min,gap_min,fit_slope,fit_intercept,fit_r2,alpha,slope_ratio");
    const auto f = fields_of(ls[1]);
    REQUIRE(f.size() == 8);
    CHECK(std::stod(f[3]) == doctest::Approx(-0.3).epsilon(1e-12));
    CHECK(std::stod(f[5]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::stod(f[7]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectrum: grid size, per-spin energies, extensive gap") {
    const auto r = run_cli("spectrum --p 3 --n 10 --k 3 --s-steps 3");
    REQUIRE(r.exit_code == 0);
    const auto ls = lines_of(r.out);
    REQUIRE(ls.size() == 4);
    CHECK(ls[0] == "s,e0,e1,e2,gap");
    const auto f0 = fields_of(ls[1]);  // s = 0
    CHECK(std::stod(f0[1]) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::stod(f0[4]) == doctest::Approx(2.0).epsilon(1e-12));
    const auto f2 = fields_of(ls[3]);  // s = 1 (lambda = 1 default): e0 = -1
    CHECK(std::stod(f2[1]) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("validate passes at default tolerance") {
    const auto r = run_cli("validate --p 3 --n 8 --s-steps 3");
    REQUIRE(r.exit_code == 0);
    const auto ls = lines_of(r.out);
    REQUIRE(ls.size() == 4);
    CHECK(ls[0] == "p,lambda,s,n,eig_rel_dev,proj_abs_dev,gap");
    for (size_t i = 1; i < ls.size(); ++i) {
        const auto f = fields_of(ls[i]);
        CHECK(std::stod(f[4]) <= 1e-10);
        CHECK(std::stod(f[5]) <= 1e-12);
    }
}

TEST_CASE("--out writes the same bytes stdout would carry") {
    const std::string path = "/tmp/pspin_test_out.csv";
    std::remove(path.c_str());
    const auto direct = run_cli("spectrum --p 5 --n 8 --s-steps 3 --k 2");
    const auto redirected =
        run_cli("spectrum --p 5 --n 8 --s-steps 3 --k 2 --out " + path);
    REQUIRE(redirected.exit_code == 0);
    CHECK(redirected.out.empty());
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream body;
    body << in.rdbuf();
    CHECK(body.str() == direct.out);
    std::remove(path.c_str());
}

TEST_CASE("phase-diagram emits ordered sections down to the terminus") {
    const auto r = run_cli("phase-diagram --p 5 --lambda-min 0.25 --lambda-max 1 "
                           "--lambda-steps 20");
    REQUIRE(r.exit_code == 0);
    const auto ls = lines_of(r.out);
    REQUIRE(ls.size() >= 4);
    CHECK(ls[0] == "line,lambda,s,m1,m2,e_c");
    int idx_first = -1, idx_cp = -1, idx_meet = -1, idx_second = -1;
    for (int i = 1; i < static_cast<int>(ls.size()); ++i) {
        const auto f = fields_of(ls[i]);
        if (f[0] == "first_order" && idx_first < 0) idx_first = i;
        if (f[0] == "critical_point") idx_cp = i;
        if (f[0] == "meeting") idx_meet = i;
        if (f[0] == "second_order" && idx_second < 0) idx_second = i;
    }
    REQUIRE(idx_first > 0);
    REQUIRE(idx_cp > 0);
    REQUIRE(idx_meet > 0);
    REQUIRE(idx_second > 0);
    CHECK(idx_first < idx_cp);
    CHECK(idx_cp < idx_meet);
    CHECK(idx_meet < idx_second);
    // Terminus row carries the closed-form coordinates.
    const auto f = fields_of(ls[idx_cp]);
    CHECK(std::stod(f[1]) == doctest::Approx(2.0 / 7.0).epsilon(1e-3));
    CHECK(std::stod(f[2]) == doctest::Approx(0.41809052).epsilon(1e-3));
}

TEST_CASE("alpha-curve csv marks uncovered lambda with status none") {
    const auto r = run_cli("alpha-curve --p 5 --lambda-min 0.2 --lambda-max 1 "
                           "--lambda-steps 3");
    REQUIRE(r.exit_code == 0);
    const auto ls = lines_of(r.out);
    REQUIRE(ls.size() == 4);
    CHECK(ls[0] == "lambda,s_c,alpha,m1,m2,e_c,quad_error,status");
    const auto none_row = fields_of(ls[1]);
    CHECK(none_row[1].empty());
    CHECK(none_row.back() == "none");
    const auto ok_row = fields_of(ls[3]);
    CHECK(ok_row.back() == "ok");
    CHECK(std::stod(ok_row[2]) == doctest::Approx(0.18577204587).epsilon(1e-7));
}
