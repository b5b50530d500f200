// Compares the serial reference kernels against the OpenMP paths on the two
// hot loops: remainder-Jacobian sampling (sigma) and one graph-transform
// sweep. Also asserts the results agree bitwise.

#include <chrono>
#include <cstdio>
#include <string>

#include "anofam/graph_transform.hpp"
#include "anofam/scenario.hpp"

using namespace anofam;

namespace {

template <class F>
double timeIt(F&& fn, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

Scenario perturbedScenario() {
    Scenario s;
    s.name = "bench";
    s.linearPart = {{{2, 1}, {1, 1}}};
    s.epsilon = 0.05;
    PerturbationTerm t;
    t.amplitude = 1.0;
    t.freq = {1, 0};
    t.target = 0;
    s.perturbations.push_back(t);
    s.lambda = 0.45;
    // the backward orbit loses accuracy too fast for the default depth
    s.splitDepth = 18;
    s.window = 6;
    s.grid = 256;
    s.base = {0.2, 0.3};
    return s;
}

}  // namespace

int main() {
    const Scenario sc = perturbedScenario();
    const NsdsFamily family = materializeFamily(sc);
    PipelineParams params = pipelineParams(sc);

    params.exec = Exec::serial;
    const PipelinePrep prep = preparePipeline(family, TorusPoint(0, sc.base), params);
    const ChartedStep& step = prep.steps.at(0);
    const double delta = prep.schedule.deltaAt.at(0);

    const int sigmaGrid = 96;
    double sigmaSerial = 0.0, sigmaParallel = 0.0;
    const double tSigmaSerial = timeIt(
        [&] { sigmaSerial = estimateSigma(step, delta, sigmaGrid, 1.25, Exec::serial); }, 3);
    const double tSigmaParallel = timeIt(
        [&] { sigmaParallel = estimateSigma(step, delta, sigmaGrid, 1.25, Exec::parallel); },
        3);

    GraphFamily zero;
    for (int n = -sc.window; n <= sc.window; ++n)
        zero.graphs.emplace(n, LipschitzGraph::zero(n, prep.schedule.deltaAt.at(n), sc.grid));
    GraphFamily sweepSerial, sweepParallel;
    const double tSweepSerial = timeIt(
        [&] {
            sweepSerial = applyGraphTransform(prep.steps, prep.schedule, prep.rates,
                                              sc.window, sc.grid, zero, Exec::serial);
        },
        3);
    const double tSweepParallel = timeIt(
        [&] {
            sweepParallel = applyGraphTransform(prep.steps, prep.schedule, prep.rates,
                                                sc.window, sc.grid, zero, Exec::parallel);
        },
        3);

    bool identical = sigmaSerial == sigmaParallel;
    for (const auto& [n, g] : sweepSerial.graphs)
        for (int j = 0; j <= g.gridM(); ++j)
            identical = identical && g.values[j] == sweepParallel.graphs.at(n).values[j];

    std::printf("kernel            serial [s]   parallel [s]   speedup\n");
    std::printf("sigma estimate    %10.4f   %12.4f   %7.2fx\n", tSigmaSerial, tSigmaParallel,
                tSigmaSerial / tSigmaParallel);
    std::printf("transform sweep   %10.4f   %12.4f   %7.2fx\n", tSweepSerial, tSweepParallel,
                tSweepSerial / tSweepParallel);
    std::printf("bitwise identical results: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
