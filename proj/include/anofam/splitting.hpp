#pragma once

#include <map>
#include <vector>

#include "anofam/family.hpp"
#include "anofam/kernels.hpp"

namespace anofam {

// Per-point hyperbolic data: unit spanning vectors of E^s and E^u, the
// angle between them (as subspaces, in (0, pi/2]), and the one-step rates.
struct SplittingFrame {
    TorusPoint point;
    Vec2 eS, eU;          // unit in the component metric
    double theta = 0.0;   // arccos |<eS,eU>_g|
    double muLocal = 0.0;     // |F_n v|/|v| on E^s
    double kappaLocal = 0.0;  // |F_n^{-1} w|/|w| on E^u at the image
    double residual = 0.0;    // pushforward collinearity (sine of angle)

    double cosTheta() const { return std::cos(theta); }
};

struct AnosovCertificate {
    double c = 1.0;
    double lambda = 0.0;
    int samplesChecked = 0;
    double maxViolation = 0.0;
    int windowUsed = 0;

    // small positive allowance: equality cases land within rounding of zero
    bool passes() const { return maxViolation <= 1e-9; }
};

// Truncated Mather-type metric: E^s orthogonal to E^u, weighted forward /
// backward sums along the cocycle, plus the Delta_n equivalence constants.
struct AdaptedMetric {
    double zeta = 0.0;
    int truncationDepth = 0;
    std::map<int, MetricTensor> star;
    std::map<int, double> delta;
    std::map<int, SplittingFrame> frame;  // frame the tensor was built from

    const MetricTensor& starAt(int n) const { return star.at(n); }
    double deltaAt(int n) const { return delta.at(n); }
};

struct EquivalenceSample {
    int index;
    double minRatio;  // min |v| / |v|_*
    double maxRatio;
    double deltaBound;  // Delta_n
    bool lowerHolds;    // Delta_n |v|_* <= |v|
    bool upperHolds;    // |v| <= 2 |v|_*
};

struct AngleSequence {
    std::vector<int> indices;
    std::vector<double> theta;
    std::vector<double> cosTheta;
};

// --- operations -----------------------------------------------------------

// Finite-depth power iteration on the derivative cocycle. eU is the
// normalized image of a generic seed under D(f_{i-depth}^{depth}); eS the
// backward analogue. Throws InsufficientDepthError if the pushforward
// collinearity residual exceeds `residualTol`.
SplittingFrame estimateSplitting(const NsdsFamily& family, int i, const TorusPoint& p,
                                 int depth, double residualTol = 1e-5);

// Checks both decay inequalities of the Anosov condition for 1 <= n <= horizon
// at every frame. Failures are data (maxViolation > 0), not errors.
AnosovCertificate verifyAnosov(const NsdsFamily& family,
                               const std::vector<SplittingFrame>& frames, double c,
                               double lambda, int horizon, Exec exec = Exec::serial);

// theta_i = min over the sampled frames of each component.
AngleSequence anglesSequence(const std::map<int, std::vector<SplittingFrame>>& framesAt);

// (true, mu) with mu = max_i cos(theta_i) when mu < 1 - margin.
std::pair<bool, double> propertyOfAngles(const std::vector<double>& thetas,
                                         double margin = 1e-6);

// Builds the truncated adapted metric along the orbit of `base` for indices
// [lo, hi]. `lambda` must come from a passing certificate; zeta in (0, 1-lambda).
AdaptedMetric adaptedMetric(const NsdsFamily& family, const TorusPoint& base, double lambda,
                            double zeta, int truncationDepth, int lo, int hi,
                            int splitDepth = 25, double tailTol = 1e-9);

// Samples tangent vectors and measures the two-sided norm-equivalence bound;
// failures are reported, not thrown.
std::vector<EquivalenceSample> checkMetricEquivalence(const AdaptedMetric& metric,
                                                      const NsdsFamily& family,
                                                      int samplesPerIndex,
                                                      std::uint64_t seed);

}  // namespace anofam
