#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "anofam/scenario.hpp"
#include "anofam/splitting.hpp"
#include "fixtures.hpp"

using namespace anofam;
using namespace fixtures;

namespace {

std::vector<SplittingFrame> sampleFrames(const NsdsFamily& fam, int i, int count, int depth) {
    std::vector<SplittingFrame> frames;
    Rng rng(11);
    for (int s = 0; s < count; ++s)
        frames.push_back(estimateSplitting(
            fam, i, TorusPoint(i, rng.nextDouble(), rng.nextDouble()), depth));
    return frames;
}

}  // namespace

TEST_CASE("cat-map splitting matches the eigenbasis") {
    const NsdsFamily fam = catFamily(46);
    const SplittingFrame f = estimateSplitting(fam, 0, TorusPoint(0, 0.2, 0.3), 20);

    CHECK(f.eS.x == doctest::Approx(catEs().x).epsilon(1e-12));
    CHECK(f.eS.y == doctest::Approx(catEs().y).epsilon(1e-12));
    CHECK(f.eU.x == doctest::Approx(catEu().x).epsilon(1e-12));
    CHECK(f.eU.y == doctest::Approx(catEu().y).epsilon(1e-12));

    // symmetric matrix: eigenvectors orthogonal, one-step rates are the
    // eigenvalue itself on both sides
    CHECK(f.theta == doctest::Approx(1.5707963267948966).epsilon(1e-12));
    CHECK(f.muLocal == doctest::Approx(kLambda).epsilon(1e-12));
    CHECK(f.kappaLocal == doctest::Approx(kLambda).epsilon(1e-12));
    CHECK(f.residual <= 1e-10);

    CHECK_THROWS_AS(
        (void)estimateSplitting(fam, 1, TorusPoint(0, 0.2, 0.3), 20), DomainError);
}

TEST_CASE("splitting frames exist away from component zero") {
    const NsdsFamily fam = perturbedFamily(46);
    const SplittingFrame f = estimateSplitting(fam, 5, TorusPoint(5, 0.7, 0.1), 18);
    CHECK(f.residual <= 1e-5);
    CHECK(f.muLocal < 1.0);
    CHECK(f.kappaLocal < 1.0);
    // unit vectors in the flat metric
    CHECK(norm2(f.eS) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm2(f.eU) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("certificate passes the cat map and fails the identity") {
    const NsdsFamily fam = catFamily(46);
    const auto frames = sampleFrames(fam, 0, 5, 20);
    const AnosovCertificate ok = verifyAnosov(fam, frames, 1.0, kLambda, 10);
    CHECK(ok.passes());
    CHECK(ok.maxViolation <= 1e-9);
    CHECK(ok.samplesChecked == 5);

    // identity map: every direction keeps norm 1, violation is 1 - lambda
    const NsdsFamily id = identityFamily(10);
    const auto idFrames = sampleFrames(id, 0, 3, 5);
    const AnosovCertificate bad = verifyAnosov(id, idFrames, 1.0, kLambda, 1);
    CHECK_FALSE(bad.passes());
    CHECK(bad.maxViolation == doctest::Approx(0.61803398874989490).epsilon(1e-12));
}

TEST_CASE("certificate flags an understated contraction rate") {
    const NsdsFamily fam = catFamily(46);
    const auto frames = sampleFrames(fam, 0, 3, 20);
    const AnosovCertificate tight = verifyAnosov(fam, frames, 1.0, 0.35, 1);
    CHECK_FALSE(tight.passes());
    // one-step norm is exactly lambda, declared bound 0.35
    CHECK(tight.maxViolation == doctest::Approx(kLambda - 0.35).epsilon(1e-10));
}

TEST_CASE("serial and parallel certificates agree bitwise") {
    const NsdsFamily fam = perturbedFamily(46);
    const auto frames = sampleFrames(fam, 0, 8, 18);
    const AnosovCertificate a = verifyAnosov(fam, frames, 1.0, 0.45, 8, Exec::serial);
    const AnosovCertificate b = verifyAnosov(fam, frames, 1.0, 0.45, 8, Exec::parallel);
    CHECK(a.maxViolation == b.maxViolation);
}

TEST_CASE("angles follow the metric correlation") {
    // flat metric: orthogonal eigenbasis
    {
        const NsdsFamily fam = catFamily(46);
        std::map<int, std::vector<SplittingFrame>> at;
        at[0] = sampleFrames(fam, 0, 3, 20);
        const AngleSequence seq = anglesSequence(at);
        REQUIRE(seq.indices.size() == 1);
        CHECK(seq.cosTheta[0] == doctest::Approx(0.0).epsilon(1e-12));
    }
    // correlated tensor [[1,z],[z,1]] in the eigenbasis: cos theta = z
    {
        const Scenario s = parseScenario(
            "name = t\nlambda = 0.38196601125010515\nmetric.law = example24\n"
            "metric.zeta = 0.25\n");
        const NsdsFamily fam = materializeFamily(s);
        const SplittingFrame f = estimateSplitting(fam, 0, TorusPoint(0, 0.2, 0.3), 20);
        CHECK(f.cosTheta() == doctest::Approx(0.25).epsilon(1e-12));
    }
    // ramp law: zeta_5 = 1 - 0.75/6
    {
        const Scenario s = parseScenario(
            "name = t\nlambda = 0.38196601125010515\nmetric.law = example24\n"
            "metric.zeta = 0.25\nmetric.zeta_law = ramp\n");
        const NsdsFamily fam = materializeFamily(s);
        const TorusPoint p = compose(fam, 0, 5, TorusPoint(0, 0.2, 0.3));
        const SplittingFrame f = estimateSplitting(fam, 5, p, 20);
        CHECK(f.cosTheta() == doctest::Approx(0.875).epsilon(1e-12));
    }
}

TEST_CASE("property of the angles applies the margin") {
    const double quarterPi = 0.78539816339744828;
    auto r1 = propertyOfAngles({1.5707963267948966, quarterPi}, 1e-6);
    CHECK(r1.first);
    CHECK(r1.second == doctest::Approx(std::cos(quarterPi)).epsilon(1e-14));

    const double nearFlat = std::acos(0.95);
    CHECK_FALSE(propertyOfAngles({nearFlat}, 0.1).first);
    CHECK(propertyOfAngles({nearFlat}, 0.01).first);

    CHECK_THROWS_AS((void)propertyOfAngles({}, 1e-6), ValidationError);
}

TEST_CASE("adapted metric has the closed-form sums on the cat map") {
    const NsdsFamily fam = catFamily(60);
    const TorusPoint p(0, 0.2, 0.3);
    const double zeta = 0.5 * (1.0 - kLambda);
    const int depth = 40;
    const AdaptedMetric am = adaptedMetric(fam, p, kLambda, zeta, depth, -2, 2, 20);

    // geometric series with ratio (lambda/(lambda+zeta))^2 = (2l/(1+l))^2
    const double ratio = std::pow(2.0 * kLambda / (1.0 + kLambda), 2);
    double sum = 0.0, term = 1.0;
    for (int k = 0; k <= depth; ++k, term *= ratio) sum += term;

    for (int n = -2; n <= 2; ++n) {
        const MetricTensor& star = am.starAt(n);
        const double nS = star.norm(catEs());
        const double nU = star.norm(catEu());
        CHECK(nS * nS == doctest::Approx(sum).epsilon(1e-9));
        CHECK(nU * nU == doctest::Approx(sum).epsilon(1e-9));
        // the splitting is star-orthogonal by construction
        CHECK(std::fabs(star.inner(catEs(), catEu())) <= 1e-9);
        // (1 - cos theta) ((1-l)/(1+l))^2 = 1/5 exactly for the cat map
        CHECK(am.deltaAt(n) == doctest::Approx(0.2).epsilon(1e-12));
    }
}

TEST_CASE("adapted metric equivalence bounds hold by sampling") {
    const NsdsFamily fam = catFamily(60);
    const AdaptedMetric am =
        adaptedMetric(fam, TorusPoint(0, 0.2, 0.3), kLambda, 0.5 * (1.0 - kLambda), 40,
                      -3, 3, 20);
    const auto samples = checkMetricEquivalence(am, fam, 32, 5);
    REQUIRE(samples.size() == 7);
    for (const auto& e : samples) {
        CHECK(e.lowerHolds);
        CHECK(e.upperHolds);
        CHECK(e.deltaBound == doctest::Approx(0.2).epsilon(1e-12));
    }
}

TEST_CASE("adapted metric rejects invalid parameters") {
    const NsdsFamily fam = catFamily(60);
    const TorusPoint p(0, 0.2, 0.3);
    // zeta must stay below 1 - lambda
    CHECK_THROWS_AS((void)adaptedMetric(fam, p, kLambda, 0.7, 40, -2, 2, 20),
                    ValidationError);
    // window too small to hold frames of at least depth 12 near the edge
    const NsdsFamily narrow = catFamily(20);
    CHECK_THROWS_AS((void)adaptedMetric(narrow, p, kLambda, 0.3, 40, -15, 15, 20),
                    DepthInsufficientError);
}
