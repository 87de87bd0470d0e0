#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "json.hpp"

using nlohmann::json;
using Catch::Approx;

namespace {

struct CliResult {
    int exit_code;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(CARLEMAN_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

json run_json(const std::string& args) {
    auto r = run_cli(args);
    REQUIRE(r.exit_code == 0);
    return json::parse(r.out);
}

}  // namespace

TEST_CASE("cli iterate") {
    SECTION("second iterate of exp") {
        auto rec = run_json("iterate exp --alpha 2 --order 2");
        REQUIRE(rec["schema_version"] == 1);
        REQUIRE(rec["kind"] == "iterate");
        REQUIRE(rec["spec"] == "exp");
        REQUIRE(rec["convention"] == "taylor");
        REQUIRE(rec["coefficients"].size() == 3);
        REQUIRE(rec["coefficients"][0].get<double>() == Approx(2.5).epsilon(1e-14));
        REQUIRE(rec["coefficients"][1].get<double>() == Approx(2.0).epsilon(1e-14));
        REQUIRE(rec["coefficients"][2].get<double>() == Approx(3.0).epsilon(1e-14));
        REQUIRE(rec["eigenvalues"].size() == 3);
        REQUIRE(rec["eigenvalues"][0]["re"].get<double>() ==
                Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-12));
        REQUIRE(rec["eigenvalues"][2]["re"].get<double>() ==
                Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
        REQUIRE(rec["diagnostics"]["path"] == "integer-power");
    }
    SECTION("inverse of an affine map evaluated at a point") {
        auto rec = run_json("iterate affine:1,2 --alpha -1 --order 3 --at 7");
        REQUIRE(rec["values"].size() == 1);
        REQUIRE(rec["values"][0][0].get<double>() == Approx(7.0));
        REQUIRE(rec["values"][0][1].get<double>() == Approx(3.0).epsilon(1e-12));
    }
    SECTION("fractional iterate emits spectral diagnostics") {
        auto rec = run_json("iterate exp --alpha 0.5 --order 4");
        REQUIRE(rec["diagnostics"]["path"] == "carleman");
        REQUIRE(rec["diagnostics"]["gap"].get<double>() > 0.0);
        REQUIRE(rec["diagnostics"]["max_imag"].get<double>() < 1e-9);
    }
    SECTION("degenerate multiplier exits 3") {
        REQUIRE(run_cli("iterate smoluchowski --alpha 0.5 --order 6").exit_code == 3);
    }
    SECTION("zero multiplier exits 4") {
        REQUIRE(run_cli("iterate poly:0,0,1 --alpha 0.5 --order 3").exit_code == 4);
        REQUIRE(run_cli("iterate poly:0,0,1 --alpha -1 --order 3").exit_code == 4);
    }
    SECTION("unknown head exits 2") {
        REQUIRE(run_cli("iterate gauss --alpha 1 --order 3").exit_code == 2);
        REQUIRE(run_cli("iterate affine:1,2x --alpha 1 --order 3").exit_code == 2);
    }
    SECTION("default gap tolerance trips at order ten, explicit tolerance clears it") {
        REQUIRE(run_cli("iterate exp --alpha 0.5 --order 10").exit_code == 3);
        REQUIRE(run_cli("iterate exp --alpha 0.5 --order 10 --degeneracy-tol 1e-9").exit_code ==
                0);
    }
}

TEST_CASE("cli csv and json carry identical numbers") {
    auto rec = run_json("iterate exp --alpha 0.5 --order 4");
    auto csv = run_cli("iterate exp --alpha 0.5 --order 4 --format csv");
    REQUIRE(csv.exit_code == 0);
    std::istringstream lines(csv.out);
    std::string line;
    int seen = 0;
    while (std::getline(lines, line)) {
        if (line.rfind("coefficient,", 0) != 0) continue;
        const auto second = line.find(',', 12);
        const int k = std::stoi(line.substr(12, second - 12));
        const double v = std::strtod(line.c_str() + second + 1, nullptr);
        REQUIRE(v == rec["coefficients"][static_cast<std::size_t>(k)].get<double>());
        ++seen;
    }
    REQUIRE(seen == 5);
}

TEST_CASE("cli matrix") {
    SECTION("order-2 carleman matrix of exp") {
        auto rec = run_json("matrix exp --order 2 --kind carleman");
        REQUIRE(rec["kind"] == "matrix");
        REQUIRE(rec["matrix_kind"] == "carleman");
        const double expect[3][3] = {{1, 1, 0.5}, {0, 1, 1}, {0, 1, 2}};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                REQUIRE(rec["entries"][i][j].get<double>() == Approx(expect[i][j]).margin(1e-14));
    }
    SECTION("bell matrix of the logistic map") {
        auto rec = run_json("matrix logistic --order 3 --kind bell");
        REQUIRE(rec["entries"].size() == 3);
        const double diag[] = {4.0, 16.0, 64.0};
        for (int i = 0; i < 3; ++i) {
            REQUIRE(rec["entries"][i][i].get<double>() == Approx(diag[i]).epsilon(1e-12));
            for (int j = i + 1; j < 3; ++j)
                REQUIRE(rec["entries"][i][j].get<double>() == 0.0);
        }
    }
    SECTION("bell matrix of exp exits 5") {
        REQUIRE(run_cli("matrix exp --order 2 --kind bell").exit_code == 5);
    }
}

TEST_CASE("cli tetrate") {
    SECTION("order-2 tower values") {
        auto rec = run_json("tetrate --base e --height 1 --tower --order 2");
        REQUIRE(rec["values"][0][1].get<double>() == Approx(7.41281).epsilon(1e-4));
        auto rec2 = run_json("tetrate --base e --height 2.718281828459045 --tower --order 2");
        REQUIRE(rec2["values"][0][1].get<double>() == Approx(37.5795).epsilon(1e-3));
    }
    SECTION("numeric base") {
        auto rec = run_json("tetrate --base 1.4142135623730951 --height 3 --x 1 --order 16");
        REQUIRE(rec["values"][0][1].get<double>() == Approx(1.7608395558800285).epsilon(1e-10));
        REQUIRE(rec["spec"].get<std::string>().rfind("exp_base:", 0) == 0);
    }
    SECTION("fractional height") {
        auto rec = run_json("tetrate --base 2 --height 0.5 --x 1 --order 8");
        const double v = rec["values"][0][1].get<double>();
        REQUIRE(v > 1.0);
        REQUIRE(v < 2.0);
        REQUIRE(rec["diagnostics"]["path"] == "carleman");
    }
    SECTION("bad bases exit 2") {
        REQUIRE(run_cli("tetrate --base 1 --height 1 --order 4").exit_code == 2);
        REQUIRE(run_cli("tetrate --base 0 --height 1 --order 4").exit_code == 2);
        REQUIRE(run_cli("tetrate --base -3 --height 1 --order 4").exit_code == 2);
        REQUIRE(run_cli("tetrate --base abc --height 1 --order 4").exit_code == 2);
    }
    SECTION("x and tower are mutually exclusive") {
        REQUIRE(run_cli("tetrate --base e --height 1 --x 2 --tower --order 4").exit_code == 2);
    }
}

TEST_CASE("cli verify") {
    auto r = run_cli("verify");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("RESULT: 9 passed, 1 expected failure(s), 0 unexpected failure(s)") !=
            std::string::npos);
    REQUIRE(r.out.find("FAIL (expected)") != std::string::npos);
    REQUIRE(r.out.find("10  PASS") != std::string::npos);
}

TEST_CASE("cli convergence") {
    SECTION("error column crosses one percent at order seven") {
        auto rec = run_json("convergence exp --alpha 1 --at 2.718281828459045 --orders 2..8");
        REQUIRE(rec["entries"].size() == 7);
        REQUIRE(rec["reference"]["provenance"] == "exact e^x");
        REQUIRE(rec["reference"]["value"].get<double>() ==
                Approx(std::exp(std::exp(1.0))).epsilon(1e-14));
        REQUIRE(rec["entries"][4]["error"].get<double>() > 0.01);
        REQUIRE(rec["entries"][5]["error"].get<double>() <= 0.01);
        REQUIRE(rec["entries"][0]["difference"].is_null());
        REQUIRE(rec["entries"][1]["difference"].get<double>() > 0.0);
    }
    SECTION("single row range") {
        auto rec = run_json("convergence exp --alpha 1 --at 1 --orders 5..5");
        REQUIRE(rec["entries"].size() == 1);
        REQUIRE(rec["entries"][0]["N"] == 5);
    }
    SECTION("fractional alpha reports differences only") {
        auto rec = run_json("convergence exp --alpha 0.5 --at 1 --orders 3..5");
        REQUIRE(rec["reference"]["value"].is_null());
        REQUIRE(rec["reference"]["provenance"].get<std::string>().find("no external reference") !=
                std::string::npos);
        for (const auto& e : rec["entries"]) REQUIRE(e["error"].is_null());
    }
    SECTION("csv table shape") {
        auto r = run_cli("convergence exp --alpha 1 --at 1 --orders 2..4 --format csv");
        REQUIRE(r.exit_code == 0);
        REQUIRE(r.out.rfind("N,ok,value,error,difference,note\n", 0) == 0);
    }
    SECTION("non-exp spec exits 2") {
        REQUIRE(run_cli("convergence logistic --alpha 1 --at 1 --orders 2..4").exit_code == 2);
    }
    SECTION("bad ranges exit 2") {
        REQUIRE(run_cli("convergence exp --alpha 1 --at 1 --orders 9..7").exit_code == 2);
        REQUIRE(run_cli("convergence exp --alpha 1 --at 1 --orders seven").exit_code == 2);
    }
}

TEST_CASE("cli output controls") {
    SECTION("digits flag truncates floating output") {
        auto r = run_cli("iterate exp --alpha 2 --order 2 --digits 5");
        REQUIRE(r.exit_code == 0);
        REQUIRE(r.out.find("2.618033988749894") == std::string::npos);
        REQUIRE(r.out.find("2.618") != std::string::npos);
    }
    SECTION("out flag writes the file and keeps stdout clean") {
        const char* path = "/tmp/carleman_cli_out_test.json";
        std::remove(path);
        auto r = run_cli(std::string("iterate exp --alpha 2 --order 2 --out ") + path);
        REQUIRE(r.exit_code == 0);
        REQUIRE(r.out.empty());
        std::ifstream f(path);
        REQUIRE(f.good());
        json rec = json::parse(f);
        REQUIRE(rec["coefficients"][0].get<double>() == Approx(2.5));
        std::remove(path);
    }
    SECTION("usage errors exit 2, help exits 0") {
        REQUIRE(run_cli("").exit_code == 2);
        REQUIRE(run_cli("iterate").exit_code == 2);
        REQUIRE(run_cli("--help").exit_code == 0);
        REQUIRE(run_cli("iterate exp --alpha 1 --order 0").exit_code == 2);
    }
}
