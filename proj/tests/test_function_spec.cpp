#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "carleman/function_spec.hpp"

using carleman::FunctionSpec;
using carleman::parse_function_spec;
using carleman::render_function_spec;
using carleman::SpecParseError;
using Catch::Approx;

TEST_CASE("parse bare heads") {
    for (const char* name : {"exp", "logistic", "smoluchowski", "xe^x"}) {
        auto fs = parse_function_spec(name);
        REQUIRE(fs.head == name);
        REQUIRE(fs.params.empty());
    }
}

TEST_CASE("parse parameterized heads") {
    SECTION("exp_base") {
        auto fs = parse_function_spec("exp_base:2.5");
        REQUIRE(fs.head == "exp_base");
        REQUIRE(fs.params == std::vector<double>{2.5});
    }
    SECTION("affine") {
        auto fs = parse_function_spec("affine:1,2");
        REQUIRE(fs.params == std::vector<double>{1.0, 2.0});
    }
    SECTION("scientific notation and signs") {
        auto fs = parse_function_spec("affine:-1.5e-3,2E2");
        REQUIRE(fs.params[0] == Approx(-1.5e-3));
        REQUIRE(fs.params[1] == Approx(200.0));
    }
    SECTION("poly takes any number of coefficients") {
        auto fs = parse_function_spec("poly:0,1,0.5,-0.25");
        REQUIRE(fs.params.size() == 4);
        REQUIRE(fs.params[3] == Approx(-0.25));
    }
}

TEST_CASE("render round trip") {
    for (const char* text : {"exp", "logistic", "xe^x", "exp_base:2.5", "affine:1,2",
                             "affine:-1.5,0.25", "poly:0,1,0.5", "smoluchowski"}) {
        auto once = parse_function_spec(text);
        auto rendered = render_function_spec(once);
        auto twice = parse_function_spec(rendered);
        REQUIRE(once == twice);
        REQUIRE(render_function_spec(twice) == rendered);
    }
}

TEST_CASE("render keeps full precision") {
    FunctionSpec fs{"exp_base", {2.718281828459045}};
    auto back = parse_function_spec(render_function_spec(fs));
    REQUIRE(back.params[0] == 2.718281828459045);
}

TEST_CASE("series_from_spec") {
    SECTION("matches the catalog") {
        auto fs = parse_function_spec("exp");
        auto g = carleman::series_from_spec(fs, 5);
        auto named = carleman::named_series("exp", 5);
        for (int k = 0; k <= 5; ++k) REQUIRE(g.taylor(k) == named.taylor(k));
    }
    SECTION("affine parameters flow through") {
        auto g = carleman::series_from_spec(parse_function_spec("affine:1,2"), 3);
        REQUIRE(g.taylor(0) == 1.0);
        REQUIRE(g.taylor(1) == 2.0);
        REQUIRE(g.taylor(2) == 0.0);
    }
    SECTION("poly coefficients are monomial") {
        auto g = carleman::series_from_spec(parse_function_spec("poly:0,0,1"), 4);
        REQUIRE(g.monomial(2) == 1.0);
        REQUIRE(g.taylor(2) == 2.0);
        REQUIRE(g.monomial(4) == 0.0);
    }
    SECTION("poly longer than the order truncates") {
        auto g = carleman::series_from_spec(parse_function_spec("poly:1,1,1,1,1,1"), 2);
        REQUIRE(g.order() == 2);
        REQUIRE(g.monomial(2) == 1.0);
    }
    SECTION("domain errors propagate") {
        REQUIRE_THROWS_AS(carleman::series_from_spec(parse_function_spec("exp_base:-1"), 4),
                          carleman::BaseOutOfRange);
    }
}

TEST_CASE("parse errors carry positions") {
    auto position_of = [](const std::string& text) {
        try {
            parse_function_spec(text);
        } catch (const SpecParseError& e) {
            return e.position;
        }
        return static_cast<std::size_t>(-1);
    };
    SECTION("unknown head") {
        REQUIRE(position_of("gauss") == 0);
        REQUIRE(position_of("") == 0);
        REQUIRE(position_of(":1,2") == 0);
    }
    SECTION("parameter list shape") {
        REQUIRE(position_of("exp:1") == 3);        // at the colon
        REQUIRE(position_of("affine") == 6);       // missing list
        REQUIRE(position_of("affine:1") == 6);     // wrong arity, at the colon
        REQUIRE(position_of("affine:1,2,3") == 6);
        REQUIRE(position_of("poly:") == 5);        // empty parameter
        REQUIRE(position_of("affine:1,,2") == 9);
    }
    SECTION("number shape") {
        REQUIRE(position_of("exp_base:abc") == 9);
        REQUIRE(position_of("affine:1,2x") == 10);  // at the stray character
    }
    SECTION("message mentions the position") {
        try {
            parse_function_spec("affine:1,2x");
            FAIL("expected SpecParseError");
        } catch (const SpecParseError& e) {
            REQUIRE(std::string(e.what()).find("(at position 10)") != std::string::npos);
        }
    }
}
