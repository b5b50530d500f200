#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anofam/family.hpp"
#include "anofam/graph_transform.hpp"

namespace anofam {

// Fully resolved run configuration. Parsed from a flat key=value file with
// dotted section names; every field has a concrete value after parsing
// (defaults applied), so a dump of this struct is the provenance record.
struct Scenario {
    std::string name;

    // map: z -> A z + epsilon * P(z) (mod 1), same map on every component
    std::array<std::array<int, 2>, 2> linearPart = {{{2, 1}, {1, 1}}};
    std::vector<PerturbationTerm> perturbations;
    double epsilon = 0.0;

    // metric law across components
    std::string metricLaw = "constant";  // constant | example23 | example24
    Mat2 metricG = Mat2::identity();     // constant law tensor
    double metricA = 0.9, metricB = 0.9;  // example23 scales
    double metricZeta = 0.25;             // example24 base angle parameter
    std::string zetaLaw = "constant";     // constant | ramp (zeta_i -> 1)

    // certified hyperbolicity constants
    double c = 1.0;
    double lambda = 0.0;  // required

    // pipeline knobs
    int window = 8;
    int grid = 128;
    int splitDepth = 30;
    double fixedPointTol = 1e-10;
    double splittingResidualTol = 1e-5;
    double gamma = 0.0;        // 0 -> module default
    double lambdaTilde = 0.0;  // 0 -> module default
    double zeta = 0.0;         // 0 -> module default
    double safety = 1.25;
    int sigmaGrid = 24;
    int maxSweeps = 200;
    bool parallel = true;

    std::uint64_t seed = 42;
    Vec2 base;  // base point on M_0

    // command-specific knobs
    double decayOffset = 0.001;
    int decayCount = 3;
    int decayHorizon = 20;
    int probeSamples = 8;
    int probeHorizon = 20;
    double probeOffset = 0.01;
    int probeDepth = 12;
    int verifySamples = 5;
    int verifyHorizon = 10;
    int membershipSamples = 50;
};

// Parses the key=value text; unknown or duplicate keys and malformed values
// raise ValidationError with a line-anchored message.
Scenario parseScenario(const std::string& text);
Scenario loadScenario(const std::string& path);

// Metric tensor prescribed by the scenario's law at component i.
MetricTensor scenarioMetric(const Scenario& s, int i);
// The zeta_i sequence of the example24 law.
double scenarioZeta(const Scenario& s, int i);

// Family over an internal window wide enough for the pipeline's splitting
// depth on top of the requested analysis window.
NsdsFamily materializeFamily(const Scenario& s);

PipelineParams pipelineParams(const Scenario& s);

// Canonical sorted key=value lines of every resolved field.
std::vector<std::pair<std::string, std::string>> resolvedEntries(const Scenario& s);

}  // namespace anofam
