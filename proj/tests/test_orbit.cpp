#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "anofam/orbit.hpp"
#include "anofam/scenario.hpp"
#include "fixtures.hpp"

using namespace anofam;
using namespace fixtures;

namespace {

const TorusPoint basePoint(0, 0.2, 0.3);
const EpsilonSeq epsHalf = [](int) { return 0.45; };
const EpsilonSeq epsInf = [](int) { return std::numeric_limits<double>::infinity(); };

TorusPoint offsetAlong(const TorusPoint& p, const Vec2& dir, double t) {
    return TorusPoint(p.component, p.coords + dir * t);
}

}  // namespace

TEST_CASE("coincident pair underflows and is a member by convention") {
    const NsdsFamily fam = catFamily(46);
    const DecayReport r = decayReport(fam, basePoint, basePoint, epsHalf, 10);
    CHECK(r.forwardUnderflow);
    CHECK(r.backwardUnderflow);
    CHECK(r.memberStable);
    CHECK(r.memberUnstable);
    CHECK(r.forwardLogDistances.empty());

    CHECK_THROWS_AS(
        (void)decayReport(fam, basePoint, TorusPoint(1, 0.2, 0.3), epsHalf, 10), DomainError);
    CHECK_THROWS_AS((void)decayReport(fam, basePoint, basePoint, epsHalf, 0),
                    ValidationError);
}

TEST_CASE("stable displacement decays at the eigenrate") {
    const NsdsFamily fam = catFamily(46);
    const TorusPoint q = offsetAlong(basePoint, catEs(), 0.001);
    const DecayReport r = decayReport(fam, basePoint, q, epsHalf, 16);

    // closed-form distance 0.001 * lambda^n, slope log lambda = -0.9624
    CHECK(r.thetaEstimate == doctest::Approx(std::log(kLambda)).epsilon(0.05));
    CHECK(r.ballRespectedForward);
    CHECK(r.memberStable);

    // the same displacement grows backward at 1/lambda and leaves the ball
    CHECK_FALSE(r.ballRespectedBackward);
    CHECK_FALSE(r.memberUnstable);
    CHECK(r.omegaEstimate > 0.3);
}

TEST_CASE("unstable displacement mirrors the stable one") {
    const NsdsFamily fam = catFamily(46);
    const TorusPoint q = offsetAlong(basePoint, catEu(), 0.001);
    const DecayReport r = decayReport(fam, basePoint, q, epsHalf, 16);

    CHECK(r.omegaEstimate == doctest::Approx(std::log(kLambda)).epsilon(0.05));
    CHECK(r.ballRespectedBackward);
    CHECK(r.memberUnstable);
    CHECK_FALSE(r.memberStable);

    // forward ball failure within ceil(log(0.45/0.001)/log 2.618) = 7 steps
    CHECK_FALSE(r.ballRespectedForward);
    int firstEscape = 0;
    for (std::size_t n = 0; n < r.forwardLogDistances.size(); ++n)
        if (r.forwardLogDistances[n] > std::log(0.45)) {
            firstEscape = int(n) + 1;
            break;
        }
    CHECK(firstEscape == 7);
}

TEST_CASE("slope estimates are invariant under metric rescaling") {
    const NsdsFamily flat = catFamily(46);
    const NsdsFamily scaled = NsdsFamily::constant(catMap(), Mat2::diag(4.0, 4.0), 46);
    const TorusPoint q = offsetAlong(basePoint, catEs(), 0.001);
    const DecayReport a = decayReport(flat, basePoint, q, epsInf, 14);
    const DecayReport b = decayReport(scaled, basePoint, q, epsInf, 14);
    CHECK(a.thetaEstimate == doctest::Approx(b.thetaEstimate).epsilon(1e-12));
    CHECK(a.omegaEstimate == doctest::Approx(b.omegaEstimate).epsilon(1e-12));
    // distances themselves shift by exactly log 2
    CHECK(b.initialLogDistance - a.initialLogDistance ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("enlarging the ball never removes membership") {
    const NsdsFamily fam = catFamily(46);
    const EpsilonSeq tight = [](int) { return 0.002; };
    Rng rng(3);
    for (int s = 0; s < 6; ++s) {
        const Vec2 dir = s % 2 == 0 ? catEs() : catEu();
        const TorusPoint q = offsetAlong(basePoint, dir, 0.001 * (1.0 + rng.nextDouble()));
        const DecayReport small = decayReport(fam, basePoint, q, tight, 12);
        const DecayReport large = decayReport(fam, basePoint, q, epsHalf, 12);
        if (small.memberStable) CHECK(large.memberStable);
        if (small.memberUnstable) CHECK(large.memberUnstable);
    }
}

TEST_CASE("manifold points are members of the local unstable set") {
    const NsdsFamily fam = catFamily(46);
    PipelineParams params;
    params.lambda = kLambda;
    params.exec = Exec::serial;
    const ManifoldResult res = unstableManifold(fam, basePoint, params);
    const double lambdaTilde = 0.25 * (3.0 + kLambda);

    const SubsetReport rep = manifoldSubsetCheck(fam, res.clouds.at(0), basePoint, epsHalf,
                                                 12, lambdaTilde, 20, 9);
    CHECK(rep.allMember);
    CHECK(rep.slopesWithinBound);
    CHECK(rep.maxBackwardSlope <= std::log(lambdaTilde));
    CHECK(rep.passed == 20);

    // control: displace the cloud 10 grid spacings along the stable direction
    std::vector<ManifoldPoint> displaced = res.clouds.at(0);
    const double spacing = res.graphs.graphs.at(0).spacing();
    for (auto& mp : displaced) {
        const Vec2 z = Vec2{mp.x, mp.y} + catEs() * (10.0 * spacing);
        mp.x = wrap01(z.x);
        mp.y = wrap01(z.y);
    }
    const SubsetReport bad = manifoldSubsetCheck(fam, displaced, basePoint, epsHalf, 12,
                                                 lambdaTilde, 20, 9);
    CHECK_FALSE(bad.allMember);
    CHECK(bad.passed == 0);
}

TEST_CASE("coincidence quantities in closed form") {
    std::map<int, double> theta;
    RateTable rates;
    rates.alpha = 0.8;
    AdaptedMetric adapted;
    for (int n = -32; n <= 32; ++n) {
        theta[n] = 1.0;
        RateRow row;
        row.tau = 0.8;
        row.varsigma = 0.8;
        rates.rows.emplace(n, row);
        adapted.delta.emplace(n, 0.3);
    }

    // (log(0.15) - n log 0.8)/n = 0.2231 - 1.8971/n, minimized at the tail start
    auto closedForm = [](int n) {
        return (std::log(0.15) - double(n) * std::log(0.8)) / double(n);
    };

    const CoincidenceReport r16 = coincidenceQuantities(theta, rates, adapted, 16);
    CHECK(r16.ThetaAngle == 1.0);
    CHECK(r16.OmegaAngle == 1.0);
    CHECK(r16.ThetaTilde == doctest::Approx(closedForm(8)).epsilon(1e-12));
    CHECK(r16.OmegaTilde == doctest::Approx(r16.ThetaTilde).epsilon(1e-12));
    CHECK_FALSE(r16.ccccSatisfied);  // closedForm(8) = -0.014 < 0

    const CoincidenceReport r32 = coincidenceQuantities(theta, rates, adapted, 32);
    CHECK(r32.ThetaTilde == doctest::Approx(closedForm(16)).epsilon(1e-12));
    CHECK(r32.ccccSatisfied);  // closedForm(16) = +0.105

    CHECK_THROWS_AS((void)coincidenceQuantities(theta, rates, adapted, 1), ValidationError);
}

TEST_CASE("coincidence holds on the cat map with a long enough window") {
    const NsdsFamily fam = catFamily(60);
    PipelineParams params;
    params.lambda = kLambda;
    params.window = 24;
    params.exec = Exec::serial;
    const PipelinePrep prep = preparePipeline(fam, basePoint, params);

    std::map<int, double> theta;
    for (const auto& [n, f] : prep.frames) theta[n] = f.theta;
    const AdaptedMetric adapted = adaptedMetric(fam, basePoint, kLambda, prep.zeta, 40,
                                                -24, 24, params.splitDepth, 1e-6);

    const CoincidenceReport rep = coincidenceQuantities(theta, prep.rates, adapted, 24);
    CHECK(rep.ThetaAngle == doctest::Approx(1.5707963267948966).epsilon(1e-9));
    CHECK(rep.OmegaAngle == doctest::Approx(1.5707963267948966).epsilon(1e-9));
    // Delta = 0.2 and tau = 0.81726 give (log 0.1 + n log tau^{-1})/n, min at n=12
    const double tau = 0.8172560023684432;
    const double expected = (std::log(0.1) - 12.0 * std::log(tau)) / 12.0;
    CHECK(rep.ThetaTilde == doctest::Approx(expected).epsilon(1e-6));
    CHECK(rep.ccccSatisfied);
}

TEST_CASE("expansivity probe distinguishes the shrinking-metric family") {
    // metric scale a^i with a(3+sqrt5)/2 < 1: both directions decay
    const Scenario s = parseScenario(
        "name = t\nlambda = 0.38196601125010515\nmetric.law = example23\n"
        "metric.a = 0.35\nmetric.b = 0.35\n");
    const NsdsFamily shrinking = materializeFamily(s);
    const auto witness = expansivityProbe(shrinking, 8, 18, 42, 10, 0.01);
    REQUIRE(witness.has_value());
    CHECK(witness->forwardSlope < -1e-3);
    CHECK(witness->backwardSlope < -1e-3);

    // the flat cat family is expansive: no witness
    const auto none = expansivityProbe(catFamily(46), 8, 18, 42, 12, 0.01);
    CHECK_FALSE(none.has_value());

    CHECK_THROWS_AS((void)expansivityProbe(catFamily(46), 1, 10, 42, 12, 0.0),
                    ValidationError);
}

TEST_CASE("metric equivalence nesting") {
    const NsdsFamily fam = catFamily(40);

    SUBCASE("identical metrics nest trivially") {
        const NestingReport rep = metricEquivalenceNesting(
            fam, [&](int n) { return fam.metricAt(n); }, basePoint, epsHalf, 10, 1.0, 1.0,
            20, 13);
        CHECK(rep.minRatio == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.maxRatio == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.epsPrime.at(0) == doctest::Approx(0.45).epsilon(1e-12));
        CHECK(rep.implicationHolds);
    }

    SUBCASE("uniform rescaling g' = 4g") {
        const NestingReport rep = metricEquivalenceNesting(
            fam, [](int n) { return MetricTensor(Mat2::diag(4.0, 4.0), n); }, basePoint,
            epsHalf, 10, 0.5, 0.5, 20, 13);
        CHECK(rep.minRatio == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(rep.epsPrime.at(0) == doctest::Approx(0.9).epsilon(1e-12));
        CHECK(rep.implicationHolds);
    }

    SUBCASE("shrinking-scale metric is not uniformly equivalent to the flat one") {
        const Scenario s = parseScenario(
            "name = t\nlambda = 0.38196601125010515\nmetric.law = example23\n"
            "metric.a = 0.35\nmetric.b = 0.35\n");
        const NsdsFamily shrinking = materializeFamily(s);
        CHECK_THROWS_AS((void)metricEquivalenceNesting(
                            shrinking, [](int n) { return MetricTensor(Mat2::identity(), n); },
                            basePoint, epsHalf, 10, 0.5, 2.0, 20, 13),
                        NotUniformlyEquivalentError);
    }

    CHECK_THROWS_AS((void)metricEquivalenceNesting(
                        fam, [&](int n) { return fam.metricAt(n); }, basePoint, epsHalf,
                        10, 0.0, 1.0, 20, 13),
                    ValidationError);
}

TEST_CASE("membership verdicts stabilize along converging base points") {
    const NsdsFamily fam = catFamily(46);
    const TorusPoint limitQ = offsetAlong(basePoint, catEs(), 0.001);
    const bool limitVerdict = decayReport(fam, basePoint, limitQ, epsHalf, 12).memberStable;
    for (int m = 1; m <= 6; ++m) {
        const TorusPoint pm = offsetAlong(basePoint, Vec2{0.3, 0.2}, std::pow(2.0, -m) * 0.01);
        const TorusPoint qm = offsetAlong(pm, catEs(), 0.001);
        const DecayReport r = decayReport(fam, pm, qm, epsHalf, 12);
        CHECK(r.memberStable == limitVerdict);
    }
    CHECK(limitVerdict);
}
