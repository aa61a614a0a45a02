// End-to-end CLI checks: exit codes, output shapes, and the
// parse-then-reserialize fixpoint on emitted files.
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

const std::string kDir = "cli_test_tmp";

int run(const std::string& args, const std::string& out_file = "",
        const std::string& err_file = "") {
    std::string cmd = std::string(SPECGAP_CLI_PATH) + " " + args;
    if (!out_file.empty()) cmd += " --out " + out_file;
    cmd += err_file.empty() ? " 2>/dev/null" : " 2>" + err_file;
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void shell(const std::string& cmd) {
    int rc = std::system(cmd.c_str());
    (void)rc;
}

struct Workspace {
    Workspace() {
        shell("rm -rf " + kDir + " && mkdir -p " + kDir);
        std::ofstream m(kDir + "/m.json");
        m << R"({"atoms":[{"freq":0.3,"mass":0.5}]})";
        std::ofstream u(kDir + "/u.json");
        u << R"({"density":[{"from":0.25,"to":0.5,"height":1.0}]})";
    }
    ~Workspace() { shell("rm -rf " + kDir); }
};

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("cli: estimate csv matches the arc-length oracle") {
    Workspace ws;
    std::string out = kDir + "/est.csv";
    REQUIRE(run("estimate --measure " + kDir +
                    "/m.json --L 1 --trials 100000 --seed 6 --format csv",
                out) == 0);
    auto rows = lines_of(slurp(out));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] ==
          "L,step,trials,seed,successes,p_hat,ci_lo,ci_hi,stderr");
    // p_hat column: oracle gives 1/2 - 0.3 = 0.2
    std::stringstream ss(rows[1]);
    std::string cell;
    for (int i = 0; i <= 5; ++i) std::getline(ss, cell, ',');
    double p_hat = std::stod(cell);
    CHECK(std::abs(p_hat - 0.2) <= 0.01);
}

TEST_CASE("cli: validation failures exit 2 and name the reason") {
    Workspace ws;
    std::string err = kDir + "/err.txt";
    CHECK(run("certify --measure " + kDir + "/m.json --delta 0.4 --L 368",
              "", err) == 2);
    CHECK(slurp(err).find("gap_radius") != std::string::npos);
    CHECK(run("estimate --measure " + kDir + "/missing.json --L 1") == 2);
    CHECK(run("estimate --measure " + kDir + "/m.json --L 1 --format svg") ==
          2);
    CHECK(run("lower --L 2 --R 0.1") == 2); // --C missing
    CHECK(run("bogus") == 2);
}

TEST_CASE("cli: sweep csv has one row per L plus the fit row") {
    Workspace ws;
    std::string out = kDir + "/sweep.csv";
    REQUIRE(run("sweep --measure " + kDir +
                    "/u.json --Ls 0.4,0.8,1.2 --trials 5000 --seed 3 "
                    "--step 0.01 --format csv",
                out) == 0);
    auto rows = lines_of(slurp(out));
    REQUIRE(rows.size() == 5); // header + 3 data + fit
    CHECK(rows[0] == "L,p_hat,stderr,upper_bound,lower_bound_log10");
    CHECK(rows[4].rfind("fit,", 0) == 0);
}

TEST_CASE("cli: json outputs are reserialization fixpoints") {
    Workspace ws;
    std::vector<std::string> cmds = {
        "estimate --measure " + kDir + "/m.json --L 1 --trials 5000 --seed 2",
        "certify --measure " + kDir + "/m.json --L 368",
        "lower --C 1 --L 2 --R 0.2",
        "rho --measure " + kDir + "/m.json --n 4",
        "report --measure " + kDir + "/m.json --L 1 --trials 5000 --seed 2 "
            "--n 3",
    };
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        std::string out = kDir + "/fix_" + std::to_string(i) + ".json";
        CAPTURE(cmds[i]);
        REQUIRE(run(cmds[i] + " --format json", out) == 0);
        std::string text = slurp(out);
        REQUIRE(!text.empty());
        CHECK(text.back() == '\n');
        text.pop_back();
        CHECK(nlohmann::json::parse(text).dump() == text);
    }
}

TEST_CASE("cli: discrete flag restricts bands to integer support") {
    Workspace ws;
    std::string out = kDir + "/disc.json";
    REQUIRE(run("certify --measure " + kDir +
                    "/m.json --delta 0.2499999 --L 368 --discrete",
                out) == 2); // not a negative power of two
    REQUIRE(run("certify --measure " + kDir +
                    "/u.json --delta 0.25 --L 368 --discrete",
                out) == 0);
    auto j = nlohmann::json::parse(slurp(out));
    CHECK(j.at("discrete") == true);
    for (const auto& p : j.at("nu_total").at("positions")) {
        double v = p.get<double>();
        CHECK(std::abs(v - std::round(v)) <= 1e-9);
    }
}

TEST_CASE("cli: sample csv reparses to the same values") {
    Workspace ws;
    std::string out = kDir + "/path.csv";
    REQUIRE(run("sample --measure " + kDir +
                    "/m.json --L 0.2 --step 0.05 --seed 12 --format csv",
                out) == 0);
    auto rows = lines_of(slurp(out));
    REQUIRE(rows.size() == 6); // header + 5 grid points
    CHECK(rows[0] == "x,f");
    // shortest-round-trip formatting: reparse and reformat reproduces bytes
    for (std::size_t i = 1; i < rows.size(); ++i) {
        auto comma = rows[i].find(',');
        double x = std::stod(rows[i].substr(0, comma));
        double f = std::stod(rows[i].substr(comma + 1));
        CHECK(nlohmann::json(x).dump() + "," + nlohmann::json(f).dump() ==
              rows[i]);
    }
}
