#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "anofam/scenario.hpp"
#include "fixtures.hpp"

using namespace anofam;
using namespace fixtures;

namespace {

const char* kMinimal = "name = t\nlambda = 0.4\n";

std::string messageOf(const std::string& text) {
    try {
        (void)parseScenario(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("minimal scenario gets every default") {
    const Scenario s = parseScenario(kMinimal);
    CHECK(s.name == "t");
    CHECK(s.lambda == 0.4);
    CHECK(s.window == 8);
    CHECK(s.grid == 128);
    CHECK(s.splitDepth == 30);
    CHECK(s.seed == 42);
    CHECK(s.metricLaw == "constant");
    CHECK(s.parallel);
    CHECK(s.linearPart[0][0] == 2);
    CHECK(s.decayHorizon == 20);
    CHECK(s.fixedPointTol == 1e-10);
}

TEST_CASE("comments, blank lines and explicit keys parse") {
    const Scenario s = parseScenario(
        "# header comment\n"
        "\n"
        "name = demo\n"
        "lambda = 0.45   # inline comment\n"
        "map.epsilon = 0.05\n"
        "perturbation.1.amplitude = 1.0\n"
        "perturbation.1.freq1 = 1\n"
        "perturbation.1.freq2 = 0\n"
        "perturbation.1.target = 0\n"
        "perturbation.1.phase = 0.5\n"
        "grid = 200\n"
        "parallel = 0\n"
        "seed = 99\n");
    CHECK(s.name == "demo");
    CHECK(s.lambda == 0.45);
    CHECK(s.epsilon == 0.05);
    REQUIRE(s.perturbations.size() == 1);
    CHECK(s.perturbations[0].amplitude == 1.0);
    CHECK(s.perturbations[0].freq[0] == 1);
    CHECK(s.perturbations[0].phase == 0.5);
    CHECK(s.grid == 200);
    CHECK_FALSE(s.parallel);
    CHECK(s.seed == 99);
}

TEST_CASE("errors carry the offending line") {
    const std::string unknown = messageOf("name = t\nlambda = 0.4\nbogus = 1\n");
    CHECK(unknown.find("line 3") != std::string::npos);
    CHECK(unknown.find("bogus") != std::string::npos);

    const std::string dup = messageOf("name = t\nlambda = 0.4\nlambda = 0.5\n");
    CHECK(dup.find("line 3") != std::string::npos);
    CHECK(dup.find("duplicate") != std::string::npos);

    const std::string badNum = messageOf("name = t\nlambda = abc\n");
    CHECK(badNum.find("line 2") != std::string::npos);

    const std::string noEq = messageOf("name = t\nlambda = 0.4\njust words\n");
    CHECK(noEq.find("line 3") != std::string::npos);
    CHECK(noEq.find("key = value") != std::string::npos);

    // comment-only and blank lines still count toward line numbers
    const std::string shifted = messageOf("# one\n\n# three\nbogus = 1\n");
    CHECK(shifted.find("line 4") != std::string::npos);
}

TEST_CASE("validation of required keys and ranges") {
    CHECK_THROWS_AS((void)parseScenario("lambda = 0.4\n"), ValidationError);
    CHECK_THROWS_AS((void)parseScenario("name = t\n"), ValidationError);
    CHECK_THROWS_AS((void)parseScenario("name = t\nlambda = 1.5\n"), ValidationError);
    CHECK_THROWS_AS((void)parseScenario("name = t\nlambda = 0.4\nwindow = 1\n"),
                    ValidationError);
    CHECK_THROWS_AS((void)parseScenario("name = t\nlambda = 0.4\ngrid = 15\n"),
                    ValidationError);
    CHECK_THROWS_AS((void)parseScenario("name = t\nlambda = 0.4\ngrid = 14\n"),
                    ValidationError);
    CHECK_THROWS_AS((void)parseScenario("name = t\nlambda = 0.4\nmetric.law = weird\n"),
                    ValidationError);
    CHECK_THROWS_AS((void)parseScenario("name = t\nlambda = 0.4\nc = 0.5\n"),
                    ValidationError);
    // perturbation indices must be contiguous from 1
    CHECK_THROWS_AS(
        (void)parseScenario("name = t\nlambda = 0.4\nperturbation.2.amplitude = 1\n"),
        ValidationError);
    // an over-scaled perturbation breaks the invertibility margin
    CHECK_THROWS_AS((void)parseScenario("name = t\nlambda = 0.4\nmap.epsilon = 0.5\n"
                                        "perturbation.1.amplitude = 2\n"
                                        "perturbation.1.freq1 = 1\n"),
                    ValidationError);
    // a non-hyperbolic linear part is rejected by the eigen-based metric laws
    CHECK_THROWS_AS((void)scenarioMetric(
                        parseScenario("name = t\nlambda = 0.4\nmap.a11 = 0\nmap.a12 = 1\n"
                                      "map.a21 = -1\nmap.a22 = 0\nmetric.law = example24\n"),
                        0),
                    ValidationError);
}

TEST_CASE("metric laws produce the prescribed tensors") {
    SUBCASE("constant law returns the configured tensor") {
        const Scenario s = parseScenario(
            "name = t\nlambda = 0.4\nmetric.g11 = 2\nmetric.g12 = 0.5\nmetric.g22 = 3\n");
        const MetricTensor g = scenarioMetric(s, 4);
        CHECK(g.g.a == 2.0);
        CHECK(g.g.b == 0.5);
        CHECK(g.g.d == 3.0);
        CHECK(g.componentIndex == 4);
    }

    SUBCASE("example23: eigen axes scale by a^i, b^i for i >= 0, flat before") {
        const Scenario s = parseScenario(
            "name = t\nlambda = 0.38196601125010515\nmetric.law = example23\n"
            "metric.a = 0.35\nmetric.b = 0.35\n");
        const MetricTensor g2 = scenarioMetric(s, 2);
        // a^2 on the stable eigen direction
        CHECK(g2.norm(catEs()) == doctest::Approx(0.1225).epsilon(1e-12));
        CHECK(g2.norm(catEu()) == doctest::Approx(0.1225).epsilon(1e-12));
        const MetricTensor gm = scenarioMetric(s, -3);
        CHECK(gm.g.a == 1.0);
        CHECK(gm.g.b == 0.0);
        CHECK(gm.g.d == 1.0);
    }

    SUBCASE("example24: correlation zeta between the eigen directions") {
        const Scenario s = parseScenario(
            "name = t\nlambda = 0.38196601125010515\nmetric.law = example24\n"
            "metric.zeta = 0.25\n");
        const MetricTensor g = scenarioMetric(s, 0);
        CHECK(g.norm(catEs()) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(g.norm(catEu()) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(g.inner(catEs(), catEu()) == doctest::Approx(0.25).epsilon(1e-12));
    }

    SUBCASE("zeta ramp approaches 1 away from the center") {
        const Scenario s = parseScenario(
            "name = t\nlambda = 0.4\nmetric.law = example24\nmetric.zeta = 0.25\n"
            "metric.zeta_law = ramp\n");
        CHECK(scenarioZeta(s, 0) == 0.25);
        CHECK(scenarioZeta(s, 5) == doctest::Approx(0.875).epsilon(1e-15));
        CHECK(scenarioZeta(s, -5) == doctest::Approx(0.875).epsilon(1e-15));
        CHECK(scenarioZeta(s, 8) == doctest::Approx(1.0 - 0.75 / 9.0).epsilon(1e-15));
    }
}

TEST_CASE("materialized family covers every command horizon") {
    const Scenario s = parseScenario(kMinimal);
    const NsdsFamily fam = materializeFamily(s);
    // window + depth + margin dominates the default horizons
    CHECK(fam.window == 46);
    CHECK(fam.metricAt(3).g.a == 1.0);
    const auto chain = fam.stepAt(0);
    REQUIRE(chain.size() == 1);
    CHECK(chain[0].map.linearPart[0][0] == 2);
}

TEST_CASE("pipeline params mirror the scenario") {
    const Scenario s = parseScenario(
        "name = t\nlambda = 0.45\nwindow = 6\ngrid = 64\ndepth = 18\n"
        "free.gamma = 0.7\nmax_sweeps = 50\nparallel = 0\n");
    const PipelineParams p = pipelineParams(s);
    CHECK(p.window == 6);
    CHECK(p.gridDensity == 64);
    CHECK(p.splitDepth == 18);
    CHECK(p.gamma == 0.7);
    CHECK(p.maxSweeps == 50);
    CHECK(p.lambda == 0.45);
    CHECK(p.exec == Exec::serial);
    CHECK(pipelineParams(parseScenario(kMinimal)).exec == Exec::parallel);
}

TEST_CASE("resolved entries are sorted, complete and reproducible") {
    const Scenario s = parseScenario(
        "name = demo\nlambda = 0.45\nmap.epsilon = 0.05\n"
        "perturbation.1.amplitude = 1.0\nperturbation.1.freq1 = 1\n");
    const auto a = resolvedEntries(s);
    const auto b = resolvedEntries(s);
    CHECK(a == b);
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1].first < a[i].first);

    auto find = [&](const std::string& key) -> std::string {
        for (const auto& [k, v] : a)
            if (k == key) return v;
        return "<missing>";
    };
    CHECK(find("name") == "demo");
    CHECK(find("lambda") == "0.45000000000000001");
    CHECK(find("map.epsilon") == "0.050000000000000003");
    CHECK(find("perturbation.1.freq1") == "1");
    CHECK(find("window") == "8");
    CHECK(find("parallel") == "1");
    // full shape: 18 perturbation-free keys never disappear
    CHECK(a.size() >= 40);
}
