#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "anofam/family.hpp"
#include "anofam/graph_transform.hpp"
#include "anofam/kernels.hpp"
#include "anofam/splitting.hpp"

namespace anofam {

using EpsilonSeq = std::function<double(int)>;

// Finite-window stand-in for the asymptotic separation exponents of a pair
// of orbits, together with the ball conditions defining the local sets.
struct DecayReport {
    TorusPoint p{0, 0.0, 0.0}, q{0, 0.0, 0.0};
    int horizon = 0;
    std::vector<double> forwardLogDistances;   // entry k is log d at n = k+1
    std::vector<double> backwardLogDistances;  // entry k is log d at n = -(k+1)
    bool forwardUnderflow = false;   // trace truncated below 1e-14
    bool backwardUnderflow = false;
    double initialLogDistance = 0.0;
    double thetaEstimate = 0.0;  // max of (1/n) log(d_n / d_0) over the forward tail
    double omegaEstimate = 0.0;  // same over the backward tail
    bool ballRespectedForward = false;
    bool ballRespectedBackward = false;
    bool memberStable = false;    // q in N^s(p): forward ball + theta < 0
    bool memberUnstable = false;  // q in N^u(p): backward ball + omega < 0
};

struct SubsetReport {
    int total = 0;
    int passed = 0;
    std::vector<int> failingSamples;
    double maxBackwardSlope = 0.0;
    double slopeBound = 0.0;  // log(lambdaTilde)
    bool allMember = false;
    bool slopesWithinBound = false;
};

struct CoincidenceReport {
    double OmegaAngle = 0.0;  // tail max of theta_n, n -> -infinity
    double ThetaAngle = 0.0;  // tail max of theta_n, n -> +infinity
    double OmegaTilde = 0.0;  // tail min of (1/n) log((Delta_{-n}/2) prod varsigma^{-1})
    double ThetaTilde = 0.0;  // tail min of (1/n) log((Delta_n/2) prod tau^{-1})
    bool ccccSatisfied = false;
};

struct ExpansivityWitness {
    TorusPoint x{0, 0.0, 0.0}, y{0, 0.0, 0.0};
    std::vector<double> forwardLogDistances;
    std::vector<double> backwardLogDistances;
    double forwardSlope = 0.0;
    double backwardSlope = 0.0;
};

struct NestingReport {
    double k = 0.0, K = 0.0;       // declared equivalence constants
    double minRatio = 0.0, maxRatio = 0.0;  // sampled |v| / |v|'
    std::map<int, double> epsPrime;
    int samplesChecked = 0;
    bool implicationHolds = false;
};

// --- operations -----------------------------------------------------------

// Both directional log-distance traces for the pair (p, q) up to the horizon,
// tail-slope estimates over n in [N/2, N], and ball-membership verdicts.
DecayReport decayReport(const NsdsFamily& family, const TorusPoint& p, const TorusPoint& q,
                        const EpsilonSeq& epsilon, int horizon);

// Every sampled cloud point is tested for N^u membership; the backward slope
// is additionally compared against log(lambdaTilde). Failures are data.
SubsetReport manifoldSubsetCheck(const NsdsFamily& family,
                                 const std::vector<ManifoldPoint>& cloud, const TorusPoint& p,
                                 const EpsilonSeq& epsilon, int horizon, double lambdaTilde,
                                 int sampleCount, std::uint64_t seed,
                                 Exec exec = Exec::serial);

// The four finite-window coincidence quantities and the combined condition.
CoincidenceReport coincidenceQuantities(const std::map<int, double>& theta,
                                        const RateTable& rates, const AdaptedMetric& adapted,
                                        int horizon, double tolerance = 1e-8);

// Searches for a pair (x, y) with y on the unstable line of x whose distances
// decay in BOTH time directions: a numerical witness of expansivity failure.
std::optional<ExpansivityWitness> expansivityProbe(const NsdsFamily& family, int sampleCount,
                                                   int horizon, std::uint64_t seed,
                                                   int splitDepth = 15,
                                                   double offset = 0.01);

// Verifies the declared equivalence constants by sampling, constructs eps'
// as half the metric-B diameter of the metric-A epsilon ball, and checks that
// N^s membership under A implies membership under B with eps'.
NestingReport metricEquivalenceNesting(const NsdsFamily& family,
                                       const std::function<MetricTensor(int)>& metricB,
                                       const TorusPoint& p, const EpsilonSeq& epsilon,
                                       int horizon, double k, double K, int sampleCount,
                                       std::uint64_t seed);

}  // namespace anofam
