#pragma once

#include <map>
#include <optional>
#include <vector>

#include "anofam/family.hpp"
#include "anofam/kernels.hpp"
#include "anofam/splitting.hpp"

namespace anofam {

// One charted step of the family along the anchor orbit: the flat-torus
// exponential chart at f^n(p) in frame coordinates (stable coordinate v,
// unstable coordinate w), split into the diagonal linearization (Fs, Fu)
// and the remainder (a_n, b_n).
struct ChartedStep {
    int index = 0;
    double Fs = 0.0;  // derivative restricted to E^s (frame coordinate)
    double Fu = 0.0;  // derivative restricted to E^u
    double delta = 0.0;    // domain radius actually certified
    double cap = 0.0;      // chart cap min{eps_n, eps_{n+1}/max{L_n,1}}
    double epsNext = 0.0;  // injectivity radius at the target component

    TorusPoint anchor, anchorNext;
    Mat2 frame, frameInv;          // columns (eS, eU) at n and its inverse
    Mat2 frameNext, frameNextInv;  // same at n+1
    MetricTensor metricNext;
    std::vector<MapAtom> chain;    // the step f_n
    MetricTensor metric;           // domain metric (atom inversion residuals)

    // Charted map f~_n in frame coordinates.
    std::array<double, 2> chartImage(double v, double w) const;
    // Remainder (a_n, b_n) = f~_n - diag(Fs, Fu).
    std::array<double, 2> remainder(double v, double w) const;

    double mu() const { return std::fabs(Fs); }
    double kappa() const { return 1.0 / std::fabs(Fu); }
};

// Per-index contraction bookkeeping plus the global free parameters.
struct RateRow {
    double mu = 0.0, kappa = 0.0;
    double sigma = 0.0;              // filled by the scheduler
    double omega = 0.0, tau = 0.0;   // unstable side
    double varpi = 0.0, varsigma = 0.0;  // stable side (mu and kappa swapped)
};

struct RateTable {
    double alpha = 0.0;        // (lambda^{-1} - 1) / 2
    double gamma = 0.0;        // contraction constant, in (lambda^2, 1)
    double lambdaTilde = 0.0;  // in ((1+lambda)/2, 1)
    double lambda = 0.0;
    std::map<int, RateRow> rows;

    const RateRow& at(int n) const { return rows.at(n); }
};

struct DeltaSchedule {
    std::map<int, double> deltaAt;
    std::map<int, double> capAt;
    bool certified = false;
    int violatingIndex = 0;
};

// Discretized alpha-Lipschitz graph phi_n : [-radius, radius] -> E^s,
// piecewise linear on an equispaced grid with phi(0) = 0.
struct LipschitzGraph {
    int index = 0;
    double radius = 0.0;
    std::vector<double> values;  // M+1 samples, M even

    static LipschitzGraph zero(int index, double radius, int gridM);

    int gridM() const { return int(values.size()) - 1; }
    double abscissa(int j) const {
        return -radius + (2.0 * radius * j) / double(gridM());
    }
    double spacing() const { return 2.0 * radius / double(gridM()); }
    double eval(double w) const;  // clamped piecewise-linear interpolation
    double maxChordSlope() const;
    double supNorm() const;
    void validate(double alpha) const;  // throws ContractViolationError
};

struct GraphFamily {
    std::map<int, LipschitzGraph> graphs;
    double metricValue = 0.0;           // last d_Gamma step distance
    std::vector<double> distanceTrace;  // per-sweep step distances
};

// Manifold extraction result for one side.
struct ManifoldPoint {
    int index;
    double w;    // unstable-frame abscissa
    double phi;  // stable-frame ordinate
    double x, y;  // torus coordinates
};

struct ManifoldProperties {
    std::map<int, double> tangencySlope;       // central-difference slope at 0
    std::map<int, double> invarianceResidual;  // one-sided set distance
    double worstContractionExcess = 0.0;  // max over samples of lhs/rhs - 1
    bool contractionBoundHolds = false;
};

struct ManifoldResult {
    GraphFamily graphs;
    std::map<int, std::vector<ManifoldPoint>> clouds;
    ManifoldProperties properties;
    RateTable rates;
    DeltaSchedule schedule;
    std::map<int, TorusPoint> anchors;
    std::map<int, SplittingFrame> frames;
};

struct PipelineParams {
    int window = 8;                // fixed-point indices [-N, N]
    int gridDensity = 128;         // M (grid intervals per graph)
    double fixedPointTol = 1e-10;
    int maxSweeps = 200;
    double splittingResidualTol = 1e-5;
    int splitDepth = 30;
    double gamma = 0.0;        // 0 -> default (lambda^2+1)/2
    double lambdaTilde = 0.0;  // 0 -> default (3+lambda)/4
    double zeta = 0.0;         // 0 -> default (1-lambda)/2
    double safety = 1.25;      // sigma finite-difference safety factor
    int sigmaGrid = 24;
    double c = 1.0;
    double lambda = 0.0;  // certified contraction rate, required
    Exec exec = Exec::serial;
};

// --- operations -----------------------------------------------------------

ChartedStep buildChartedStep(const NsdsFamily& family, const TorusPoint& anchor,
                             const SplittingFrame& frameHere, const SplittingFrame& frameNext,
                             int n, double delta, double epsNext);

// sup over a gridDensity x gridDensity lattice in the (v,w) ball of radius
// `delta` of the finite-difference Jacobian norms of the remainder, times
// the declared safety factor.
double estimateSigma(const ChartedStep& step, double delta, int gridDensity,
                     double safety = 1.25, Exec exec = Exec::serial);

RateTable rateTable(const std::map<int, ChartedStep>& steps, double lambda, double gamma,
                    double lambdaTilde);

// Largest delta_n below the chart caps with sigma_n(delta_n) < omega_n, then
// a sweep enforcing the growth recurrence toward positive indices.
DeltaSchedule scheduleDeltas(std::map<int, ChartedStep>& steps, RateTable& rates,
                             int gridDensity, double safety, Exec exec = Exec::serial);

LipschitzGraph graphTransformStep(const LipschitzGraph& phi, const ChartedStep& step,
                                  const RateTable& rates, double deltaNext, int gridNext,
                                  Exec exec = Exec::serial);

// One application of the operator: graph at -window reset to zero, every
// other index rebuilt from its predecessor.
GraphFamily applyGraphTransform(const std::map<int, ChartedStep>& steps,
                                const DeltaSchedule& schedule, const RateTable& rates,
                                int window, int gridDensity, const GraphFamily& in,
                                Exec exec = Exec::serial);

GraphFamily fixedPoint(const std::map<int, ChartedStep>& steps, const DeltaSchedule& schedule,
                       const RateTable& rates, int window, int gridDensity, double tol,
                       int maxSweeps, Exec exec = Exec::serial,
                       const GraphFamily* initial = nullptr);

// d_Gamma distance between two graph families on identical grids.
double graphDistance(const GraphFamily& a, const GraphFamily& b);

// Index-reflected inverse family g_i = f_{-i-1}^{-1} (components M'_i = M_{-i}).
NsdsFamily reflectInverse(const NsdsFamily& family);

// Everything up to (and including) the certified schedule: anchor orbit,
// frames, charted steps, rates. Shared by the manifold pipeline and the
// coincidence quantities.
struct PipelinePrep {
    std::map<int, TorusPoint> anchors;
    std::map<int, SplittingFrame> frames;
    std::map<int, ChartedStep> steps;
    RateTable rates;
    DeltaSchedule schedule;
    double gamma = 0.0, lambdaTilde = 0.0, zeta = 0.0;  // resolved values
};

PipelinePrep preparePipeline(const NsdsFamily& family, const TorusPoint& p,
                             const PipelineParams& params);

// Full unstable-manifold pipeline at p in M_0. `adapted` supplies the Delta_n
// constants for the contraction-bound check (built internally when null).
ManifoldResult unstableManifold(const NsdsFamily& family, const TorusPoint& p,
                                const PipelineParams& params,
                                const AdaptedMetric* adapted = nullptr);

// Stable side: the unstable pipeline applied to the reflected inverse family,
// results mapped back to original indices.
ManifoldResult stableManifold(const NsdsFamily& family, const TorusPoint& p,
                              const PipelineParams& params,
                              const AdaptedMetric* adapted = nullptr);

}  // namespace anofam
