// Command-line front end: scenario ingestion, command dispatch, and report
// serialization (JSON + CSV + SVG). All numeric output is formatted with
// %.17g so reruns are byte-identical.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "anofam/orbit.hpp"
#include "anofam/scenario.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace anofam;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void writeFile(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << content;
}

json scenarioJson(const Scenario& s) {
    json j = json::object();
    for (const auto& [k, v] : resolvedEntries(s)) j[k] = v;
    return j;
}

json traceJson(const std::vector<double>& t) {
    json a = json::array();
    for (double v : t) a.push_back(fmt(v));
    return a;
}

std::string traceCsv(const std::vector<double>& logDistances, int sign) {
    std::string csv = "n,log_distance\n";
    for (std::size_t k = 0; k < logDistances.size(); ++k)
        csv += std::to_string(sign * int(k + 1)) + "," + fmt(logDistances[k]) + "\n";
    return csv;
}

std::string cloudCsv(const std::map<int, std::vector<ManifoldPoint>>& clouds) {
    std::string csv = "n,w,phi,x,y\n";
    for (const auto& [n, cloud] : clouds)
        for (const auto& p : cloud)
            csv += std::to_string(n) + "," + fmt(p.w) + "," + fmt(p.phi) + "," + fmt(p.x) +
                   "," + fmt(p.y) + "\n";
    return csv;
}

// One polyline per component; clouds unwrapped to a continuous lift so the
// curve does not jump across the fundamental-domain seam.
std::string cloudSvg(const std::map<int, std::vector<ManifoldPoint>>& clouds) {
    std::string svg =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\">\n";
    for (const auto& [n, cloud] : clouds) {
        if (cloud.empty()) continue;
        svg += "<polyline data-component=\"" + std::to_string(n) +
               "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
        double px = cloud.front().x, py = cloud.front().y;
        double ox = 0.0, oy = 0.0;
        for (std::size_t k = 0; k < cloud.size(); ++k) {
            double x = cloud[k].x + ox, y = cloud[k].y + oy;
            if (k > 0) {
                if (x - px > 0.5) { ox -= 1.0; x -= 1.0; }
                if (px - x > 0.5) { ox += 1.0; x += 1.0; }
                if (y - py > 0.5) { oy -= 1.0; y -= 1.0; }
                if (py - y > 0.5) { oy += 1.0; y += 1.0; }
            }
            px = x;
            py = y;
            svg += fmt(1000.0 * x) + "," + fmt(1000.0 * (1.0 - y)) + " ";
        }
        svg += "\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

json ratesJson(const RateTable& t) {
    json j;
    j["alpha"] = fmt(t.alpha);
    j["gamma"] = fmt(t.gamma);
    j["lambda"] = fmt(t.lambda);
    j["lambda_tilde"] = fmt(t.lambdaTilde);
    json rows = json::array();
    for (const auto& [n, r] : t.rows) {
        json row;
        row["n"] = n;
        row["mu"] = fmt(r.mu);
        row["kappa"] = fmt(r.kappa);
        row["sigma"] = fmt(r.sigma);
        row["omega"] = fmt(r.omega);
        row["tau"] = fmt(r.tau);
        row["varpi"] = fmt(r.varpi);
        row["varsigma"] = fmt(r.varsigma);
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j;
}

json scheduleJson(const DeltaSchedule& s) {
    json j;
    j["certified"] = s.certified;
    j["violating_index"] = s.violatingIndex;
    json rows = json::array();
    for (const auto& [n, d] : s.deltaAt) {
        json row;
        row["n"] = n;
        row["delta"] = fmt(d);
        row["cap"] = fmt(s.capAt.at(n));
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j;
}

json decayJson(const DecayReport& r) {
    json j;
    j["p"] = {fmt(r.p.coords.x), fmt(r.p.coords.y)};
    j["q"] = {fmt(r.q.coords.x), fmt(r.q.coords.y)};
    j["horizon"] = r.horizon;
    j["theta_estimate"] = fmt(r.thetaEstimate);
    j["omega_estimate"] = fmt(r.omegaEstimate);
    j["forward_underflow"] = r.forwardUnderflow;
    j["backward_underflow"] = r.backwardUnderflow;
    j["ball_respected_forward"] = r.ballRespectedForward;
    j["ball_respected_backward"] = r.ballRespectedBackward;
    j["member_stable"] = r.memberStable;
    j["member_unstable"] = r.memberUnstable;
    j["forward_log_distances"] = traceJson(r.forwardLogDistances);
    j["backward_log_distances"] = traceJson(r.backwardLogDistances);
    return j;
}

EpsilonSeq injectivityEpsilon(const NsdsFamily& family) {
    return [&family](int i) { return injectivityRadius(family.metricAt(i)); };
}

int runVerify(const Scenario& sc, const NsdsFamily& family, const fs::path& out) {
    const int N = sc.window;
    Rng rng(sc.seed);
    std::vector<SplittingFrame> frames;
    std::map<int, std::vector<SplittingFrame>> byComponent;
    for (int i = -N; i <= N; ++i)
        for (int k = 0; k < sc.verifySamples; ++k) {
            const TorusPoint p(i, rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0));
            const SplittingFrame f =
                estimateSplitting(family, i, p, sc.splitDepth, sc.splittingResidualTol);
            frames.push_back(f);
            byComponent[i].push_back(f);
        }
    const AnosovCertificate cert =
        verifyAnosov(family, frames, sc.c, sc.lambda, sc.verifyHorizon,
                     sc.parallel ? Exec::parallel : Exec::serial);
    const AngleSequence angles = anglesSequence(byComponent);
    const auto [anglesOk, mu] = propertyOfAngles(angles.theta);

    json j;
    j["scenario"] = scenarioJson(sc);
    j["certificate"] = {{"c", fmt(cert.c)},
                        {"lambda", fmt(cert.lambda)},
                        {"samples_checked", cert.samplesChecked},
                        {"horizon", cert.windowUsed},
                        {"max_violation", fmt(cert.maxViolation)},
                        {"passes", cert.passes()}};
    json ang = json::array();
    for (std::size_t k = 0; k < angles.indices.size(); ++k)
        ang.push_back({{"n", angles.indices[k]},
                       {"theta", fmt(angles.theta[k])},
                       {"cos_theta", fmt(angles.cosTheta[k])}});
    j["angles"] = ang;
    j["property_of_angles"] = {{"holds", anglesOk}, {"mu", fmt(mu)}};
    writeFile(out / "verify.json", j.dump(2) + "\n");
    return 0;
}

int runSchedule(const Scenario& sc, const NsdsFamily& family, const fs::path& out) {
    const PipelinePrep prep =
        preparePipeline(family, TorusPoint(0, sc.base), pipelineParams(sc));
    json j;
    j["scenario"] = scenarioJson(sc);
    j["rates"] = ratesJson(prep.rates);
    j["schedule"] = scheduleJson(prep.schedule);
    writeFile(out / "schedule.json", j.dump(2) + "\n");
    return 0;
}

int runManifold(const Scenario& sc, const NsdsFamily& family, const fs::path& out,
                const std::string& side) {
    const TorusPoint base(0, sc.base);
    const PipelineParams params = pipelineParams(sc);
    const ManifoldResult res = side == "u" ? unstableManifold(family, base, params)
                                           : stableManifold(family, base, params);
    json j;
    j["scenario"] = scenarioJson(sc);
    j["side"] = side;
    j["rates"] = ratesJson(res.rates);
    j["schedule"] = scheduleJson(res.schedule);
    j["fixed_point"] = {{"sweeps", int(res.graphs.distanceTrace.size())},
                        {"final_distance", fmt(res.graphs.metricValue)},
                        {"distance_trace", traceJson(res.graphs.distanceTrace)}};
    json props;
    json tang = json::array();
    for (const auto& [n, v] : res.properties.tangencySlope)
        tang.push_back({{"n", n}, {"slope", fmt(v)}});
    props["tangency_slope"] = tang;
    json inv = json::array();
    for (const auto& [n, v] : res.properties.invarianceResidual)
        inv.push_back({{"n", n}, {"residual", fmt(v)}});
    props["invariance_residual"] = inv;
    props["worst_contraction_excess"] = fmt(res.properties.worstContractionExcess);
    props["contraction_bound_holds"] = res.properties.contractionBoundHolds;
    j["properties"] = props;
    writeFile(out / ("manifold_" + side + ".json"), j.dump(2) + "\n");
    writeFile(out / ("manifold_" + side + ".csv"), cloudCsv(res.clouds));
    writeFile(out / ("manifold_" + side + ".svg"), cloudSvg(res.clouds));
    return 0;
}

int runDecay(const Scenario& sc, const NsdsFamily& family, const fs::path& out) {
    const TorusPoint base(0, sc.base);
    const SplittingFrame f = estimateSplitting(family, 0, base, sc.splitDepth,
                                               sc.splittingResidualTol);
    const EpsilonSeq eps = injectivityEpsilon(family);
    json reports = json::array();
    for (int k = 0; k < sc.decayCount; ++k) {
        const Vec2 dir = (k % 2 == 0) ? f.eS : f.eU;
        const double mag = sc.decayOffset * (1.0 + k / 2);
        const TorusPoint q(0, base.coords + dir * mag);
        const DecayReport r = decayReport(family, base, q, eps, sc.decayHorizon);
        json jr = decayJson(r);
        jr["pair"] = k;
        jr["direction"] = (k % 2 == 0) ? "eS" : "eU";
        reports.push_back(jr);
        writeFile(out / ("decay_" + std::to_string(k) + "_fwd.csv"),
                  traceCsv(r.forwardLogDistances, +1));
        writeFile(out / ("decay_" + std::to_string(k) + "_bwd.csv"),
                  traceCsv(r.backwardLogDistances, -1));
    }
    json j;
    j["scenario"] = scenarioJson(sc);
    j["reports"] = reports;
    writeFile(out / "decay.json", j.dump(2) + "\n");
    return 0;
}

int runCoincidence(const Scenario& sc, const NsdsFamily& family, const fs::path& out) {
    const TorusPoint base(0, sc.base);
    const PipelineParams params = pipelineParams(sc);
    const PipelinePrep prep = preparePipeline(family, base, params);
    std::map<int, double> theta;
    for (const auto& [n, f] : prep.frames) theta[n] = f.theta;
    const AdaptedMetric adapted = adaptedMetric(family, base, sc.lambda, prep.zeta, 40,
                                                -sc.window, sc.window, sc.splitDepth, 1e-6);
    const CoincidenceReport rep =
        coincidenceQuantities(theta, prep.rates, adapted, sc.window);
    json j;
    j["scenario"] = scenarioJson(sc);
    j["coincidence"] = {{"omega_angle", fmt(rep.OmegaAngle)},
                        {"theta_angle", fmt(rep.ThetaAngle)},
                        {"omega_tilde", fmt(rep.OmegaTilde)},
                        {"theta_tilde", fmt(rep.ThetaTilde)},
                        {"cccc_satisfied", rep.ccccSatisfied}};
    writeFile(out / "coincidence.json", j.dump(2) + "\n");
    return 0;
}

int runProbe(const Scenario& sc, const NsdsFamily& family, const fs::path& out) {
    const auto witness = expansivityProbe(family, sc.probeSamples, sc.probeHorizon, sc.seed,
                                          sc.probeDepth, sc.probeOffset);
    json j;
    j["scenario"] = scenarioJson(sc);
    j["witness_found"] = witness.has_value();
    if (witness) {
        j["witness"] = {{"x", {fmt(witness->x.coords.x), fmt(witness->x.coords.y)}},
                        {"y", {fmt(witness->y.coords.x), fmt(witness->y.coords.y)}},
                        {"forward_slope", fmt(witness->forwardSlope)},
                        {"backward_slope", fmt(witness->backwardSlope)},
                        {"forward_log_distances", traceJson(witness->forwardLogDistances)},
                        {"backward_log_distances", traceJson(witness->backwardLogDistances)}};
        writeFile(out / "probe_fwd.csv", traceCsv(witness->forwardLogDistances, +1));
        writeFile(out / "probe_bwd.csv", traceCsv(witness->backwardLogDistances, -1));
    }
    writeFile(out / "probe.json", j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anosov-family toolbox: hyperbolicity certificates, delta schedules, "
                 "local stable/unstable manifolds, and orbit-separation diagnostics"};
    std::string scenarioPath, outDir, command, side = "u";
    bool quiet = false;
    app.add_option("--scenario", scenarioPath, "scenario file")->required();
    app.add_option("--out", outDir, "output directory")->required();
    app.add_option("--command", command, "one of: verify, schedule, manifold, decay, "
                                         "coincidence, probe-expansivity")
        ->required();
    app.add_option("--side", side, "manifold side: u or s");
    app.add_flag("--quiet", quiet, "suppress progress output");
    CLI11_PARSE(app, argc, argv);

    try {
        if (side != "u" && side != "s") throw ValidationError("--side must be u or s");
        const Scenario sc = loadScenario(scenarioPath);
        const NsdsFamily family = materializeFamily(sc);
        fs::create_directories(outDir);
        const fs::path out(outDir);
        if (!quiet)
            std::cout << "scenario '" << sc.name << "': running " << command << "\n";

        int rc;
        if (command == "verify")
            rc = runVerify(sc, family, out);
        else if (command == "schedule")
            rc = runSchedule(sc, family, out);
        else if (command == "manifold")
            rc = runManifold(sc, family, out, side);
        else if (command == "decay")
            rc = runDecay(sc, family, out);
        else if (command == "coincidence")
            rc = runCoincidence(sc, family, out);
        else if (command == "probe-expansivity")
            rc = runProbe(sc, family, out);
        else
            throw ValidationError("unknown command: " + command);
        if (!quiet && rc == 0) std::cout << "done\n";
        return rc;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const WindowExceededError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NotUniformlyEquivalentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ScheduleInfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const HyperbolicityMarginError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const CapViolationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const CoverageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const InsufficientDepthError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const InversionFailureError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 5;
    }
}
