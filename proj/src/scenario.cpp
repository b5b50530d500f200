#include "anofam/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace anofam {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ValidationError("line " + std::to_string(line) + ": " + msg);
}

double parseDouble(int line, const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        fail(line, "invalid number for " + key + ": '" + v + "'");
    }
    if (pos != v.size()) fail(line, "trailing characters in " + key + ": '" + v + "'");
    return d;
}

long long parseInt(int line, const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long long d = 0;
    try {
        d = std::stoll(v, &pos);
    } catch (const std::exception&) {
        fail(line, "invalid integer for " + key + ": '" + v + "'");
    }
    if (pos != v.size()) fail(line, "trailing characters in " + key + ": '" + v + "'");
    return d;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// real eigenpairs of the linear part, contracting direction first
void eigenDirections(const Mat2& A, Vec2& es, Vec2& eu) {
    const double tr = A.a + A.d, det = A.det();
    const double disc = tr * tr - 4.0 * det;
    if (disc <= 0.0)
        throw ValidationError("metric law requires a hyperbolic linear part "
                              "(real distinct eigenvalues)");
    const double sq = std::sqrt(disc);
    const double e1 = 0.5 * (tr - sq), e2 = 0.5 * (tr + sq);
    auto vecFor = [&](double e) {
        const Vec2 v1{A.b, e - A.a};
        const Vec2 v2{e - A.d, A.c};
        Vec2 v = norm2(v1) >= norm2(v2) ? v1 : v2;
        if (std::fabs(v.x) > 1e-12 ? v.x < 0 : v.y < 0) v = -v;
        return v * (1.0 / norm2(v));
    };
    const double small = std::fabs(e1) <= std::fabs(e2) ? e1 : e2;
    const double big = std::fabs(e1) <= std::fabs(e2) ? e2 : e1;
    if (std::fabs(small) >= 1.0 || std::fabs(big) <= 1.0)
        throw ValidationError("metric law requires |eigenvalues| on both sides of 1");
    es = vecFor(small);
    eu = vecFor(big);
}

}  // namespace

Scenario parseScenario(const std::string& text) {
    Scenario s;
    bool haveName = false, haveLambda = false;
    std::set<std::string> seen;
    std::map<int, PerturbationTerm> terms;

    std::istringstream in(text);
    std::string raw;
    int lineNo = 0;
    while (std::getline(in, raw)) {
        ++lineNo;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(lineNo, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) fail(lineNo, "empty key");
        if (!seen.insert(key).second) fail(lineNo, "duplicate key " + key);

        if (key.rfind("perturbation.", 0) == 0) {
            const auto rest = key.substr(13);
            const auto dot = rest.find('.');
            if (dot == std::string::npos) fail(lineNo, "malformed key " + key);
            const int idx = int(parseInt(lineNo, key, rest.substr(0, dot)));
            if (idx < 1) fail(lineNo, "perturbation index must be >= 1");
            const std::string field = rest.substr(dot + 1);
            PerturbationTerm& t = terms[idx];
            if (field == "amplitude")
                t.amplitude = parseDouble(lineNo, key, val);
            else if (field == "freq1")
                t.freq[0] = int(parseInt(lineNo, key, val));
            else if (field == "freq2")
                t.freq[1] = int(parseInt(lineNo, key, val));
            else if (field == "target")
                t.target = int(parseInt(lineNo, key, val));
            else if (field == "phase")
                t.phase = parseDouble(lineNo, key, val);
            else
                fail(lineNo, "unknown key " + key);
            continue;
        }

        if (key == "name") {
            s.name = val;
            haveName = true;
        } else if (key == "map.a11")
            s.linearPart[0][0] = int(parseInt(lineNo, key, val));
        else if (key == "map.a12")
            s.linearPart[0][1] = int(parseInt(lineNo, key, val));
        else if (key == "map.a21")
            s.linearPart[1][0] = int(parseInt(lineNo, key, val));
        else if (key == "map.a22")
            s.linearPart[1][1] = int(parseInt(lineNo, key, val));
        else if (key == "map.epsilon")
            s.epsilon = parseDouble(lineNo, key, val);
        else if (key == "metric.law")
            s.metricLaw = val;
        else if (key == "metric.g11")
            s.metricG.a = parseDouble(lineNo, key, val);
        else if (key == "metric.g12")
            s.metricG.b = s.metricG.c = parseDouble(lineNo, key, val);
        else if (key == "metric.g22")
            s.metricG.d = parseDouble(lineNo, key, val);
        else if (key == "metric.a")
            s.metricA = parseDouble(lineNo, key, val);
        else if (key == "metric.b")
            s.metricB = parseDouble(lineNo, key, val);
        else if (key == "metric.zeta")
            s.metricZeta = parseDouble(lineNo, key, val);
        else if (key == "metric.zeta_law")
            s.zetaLaw = val;
        else if (key == "c")
            s.c = parseDouble(lineNo, key, val);
        else if (key == "lambda") {
            s.lambda = parseDouble(lineNo, key, val);
            haveLambda = true;
        } else if (key == "window")
            s.window = int(parseInt(lineNo, key, val));
        else if (key == "grid")
            s.grid = int(parseInt(lineNo, key, val));
        else if (key == "depth")
            s.splitDepth = int(parseInt(lineNo, key, val));
        else if (key == "tol.fixed_point")
            s.fixedPointTol = parseDouble(lineNo, key, val);
        else if (key == "tol.splitting_residual")
            s.splittingResidualTol = parseDouble(lineNo, key, val);
        else if (key == "free.gamma")
            s.gamma = parseDouble(lineNo, key, val);
        else if (key == "free.lambda_tilde")
            s.lambdaTilde = parseDouble(lineNo, key, val);
        else if (key == "free.zeta")
            s.zeta = parseDouble(lineNo, key, val);
        else if (key == "free.safety")
            s.safety = parseDouble(lineNo, key, val);
        else if (key == "sigma_grid")
            s.sigmaGrid = int(parseInt(lineNo, key, val));
        else if (key == "max_sweeps")
            s.maxSweeps = int(parseInt(lineNo, key, val));
        else if (key == "parallel")
            s.parallel = parseInt(lineNo, key, val) != 0;
        else if (key == "seed")
            s.seed = std::uint64_t(parseInt(lineNo, key, val));
        else if (key == "base.x")
            s.base.x = parseDouble(lineNo, key, val);
        else if (key == "base.y")
            s.base.y = parseDouble(lineNo, key, val);
        else if (key == "decay.offset")
            s.decayOffset = parseDouble(lineNo, key, val);
        else if (key == "decay.count")
            s.decayCount = int(parseInt(lineNo, key, val));
        else if (key == "decay.horizon")
            s.decayHorizon = int(parseInt(lineNo, key, val));
        else if (key == "probe.samples")
            s.probeSamples = int(parseInt(lineNo, key, val));
        else if (key == "probe.horizon")
            s.probeHorizon = int(parseInt(lineNo, key, val));
        else if (key == "probe.offset")
            s.probeOffset = parseDouble(lineNo, key, val);
        else if (key == "probe.depth")
            s.probeDepth = int(parseInt(lineNo, key, val));
        else if (key == "verify.samples")
            s.verifySamples = int(parseInt(lineNo, key, val));
        else if (key == "verify.horizon")
            s.verifyHorizon = int(parseInt(lineNo, key, val));
        else if (key == "membership.samples")
            s.membershipSamples = int(parseInt(lineNo, key, val));
        else
            fail(lineNo, "unknown key " + key);
    }

    int expected = 1;
    for (const auto& [idx, t] : terms) {
        if (idx != expected++)
            throw ValidationError("perturbation indices must be contiguous from 1");
        s.perturbations.push_back(t);
    }

    if (!haveName) throw ValidationError("missing required key 'name'");
    if (!haveLambda) throw ValidationError("missing required key 'lambda'");
    if (s.lambda <= 0.0 || s.lambda >= 1.0)
        throw ValidationError("lambda must lie in (0, 1)");
    if (s.c < 1.0) throw ValidationError("c must be >= 1");
    if (s.window < 2) throw ValidationError("window must be >= 2");
    if (s.grid < 16 || s.grid % 2 != 0)
        throw ValidationError("grid must be an even integer >= 16");
    if (s.splitDepth < 2) throw ValidationError("depth must be >= 2");
    if (s.fixedPointTol <= 0.0 || s.splittingResidualTol <= 0.0 || s.safety <= 0.0)
        throw ValidationError("tolerances and safety must be positive");
    if (s.metricLaw != "constant" && s.metricLaw != "example23" && s.metricLaw != "example24")
        throw ValidationError("metric.law must be constant, example23 or example24");
    if (s.zetaLaw != "constant" && s.zetaLaw != "ramp")
        throw ValidationError("metric.zeta_law must be constant or ramp");
    if (s.metricA <= 0.0 || s.metricB <= 0.0)
        throw ValidationError("metric.a and metric.b must be positive");
    if (s.metricZeta < 0.0 || s.metricZeta >= 1.0)
        throw ValidationError("metric.zeta must lie in [0, 1)");
    if (s.decayCount < 1 || s.decayHorizon < 2 || s.probeSamples < 1 || s.probeHorizon < 2 ||
        s.probeDepth < 2 || s.verifySamples < 1 || s.verifyHorizon < 1 ||
        s.membershipSamples < 1)
        throw ValidationError("command sample counts and horizons must be positive");
    if (s.decayOffset <= 0.0 || s.probeOffset <= 0.0)
        throw ValidationError("pair offsets must be positive");
    // constructing the map validates |det| = 1 and the perturbation margin
    (void)TorusMap(s.linearPart, s.perturbations, s.epsilon);
    // constructing the constant tensor validates symmetry and positivity
    if (s.metricLaw == "constant") (void)MetricTensor(s.metricG, 0);
    return s;
}

Scenario loadScenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parseScenario(buf.str());
}

double scenarioZeta(const Scenario& s, int i) {
    if (s.zetaLaw == "ramp") return 1.0 - (1.0 - s.metricZeta) / (1.0 + std::abs(i));
    return s.metricZeta;
}

MetricTensor scenarioMetric(const Scenario& s, int i) {
    if (s.metricLaw == "constant") return MetricTensor(s.metricG, i);
    const TorusMap map(s.linearPart, {}, 0.0);
    Vec2 es, eu;
    eigenDirections(map.linear(), es, eu);
    const Mat2 vinv = Mat2::fromColumns(es, eu).inverse();
    if (s.metricLaw == "example23") {
        if (i < 0) return MetricTensor(Mat2::identity(), i);
        const Mat2 d = Mat2::diag(std::pow(s.metricA, 2.0 * i), std::pow(s.metricB, 2.0 * i));
        return MetricTensor(vinv.transpose() * d * vinv, i);
    }
    const double z = scenarioZeta(s, i);
    const Mat2 b(1.0, z, z, 1.0);
    return MetricTensor(vinv.transpose() * b * vinv, i);
}

NsdsFamily materializeFamily(const Scenario& s) {
    const int window =
        std::max({s.window + s.splitDepth + 8, s.decayHorizon + 2,
                  s.probeHorizon + s.probeDepth + 2, s.verifyHorizon + s.splitDepth + 2});
    const TorusMap map(s.linearPart, s.perturbations, s.epsilon);
    const Scenario copy = s;
    return NsdsFamily::fromMaps([map](int) { return map; },
                                [copy](int i) { return scenarioMetric(copy, i); }, window);
}

PipelineParams pipelineParams(const Scenario& s) {
    PipelineParams p;
    p.window = s.window;
    p.gridDensity = s.grid;
    p.fixedPointTol = s.fixedPointTol;
    p.maxSweeps = s.maxSweeps;
    p.splittingResidualTol = s.splittingResidualTol;
    p.splitDepth = s.splitDepth;
    p.gamma = s.gamma;
    p.lambdaTilde = s.lambdaTilde;
    p.zeta = s.zeta;
    p.safety = s.safety;
    p.sigmaGrid = s.sigmaGrid;
    p.c = s.c;
    p.lambda = s.lambda;
    p.exec = s.parallel ? Exec::parallel : Exec::serial;
    return p;
}

std::vector<std::pair<std::string, std::string>> resolvedEntries(const Scenario& s) {
    std::vector<std::pair<std::string, std::string>> e;
    e.emplace_back("name", s.name);
    e.emplace_back("map.a11", std::to_string(s.linearPart[0][0]));
    e.emplace_back("map.a12", std::to_string(s.linearPart[0][1]));
    e.emplace_back("map.a21", std::to_string(s.linearPart[1][0]));
    e.emplace_back("map.a22", std::to_string(s.linearPart[1][1]));
    e.emplace_back("map.epsilon", fmt(s.epsilon));
    for (std::size_t k = 0; k < s.perturbations.size(); ++k) {
        const std::string pre = "perturbation." + std::to_string(k + 1) + ".";
        const PerturbationTerm& t = s.perturbations[k];
        e.emplace_back(pre + "amplitude", fmt(t.amplitude));
        e.emplace_back(pre + "freq1", std::to_string(t.freq[0]));
        e.emplace_back(pre + "freq2", std::to_string(t.freq[1]));
        e.emplace_back(pre + "target", std::to_string(t.target));
        e.emplace_back(pre + "phase", fmt(t.phase));
    }
    e.emplace_back("metric.law", s.metricLaw);
    e.emplace_back("metric.g11", fmt(s.metricG.a));
    e.emplace_back("metric.g12", fmt(s.metricG.b));
    e.emplace_back("metric.g22", fmt(s.metricG.d));
    e.emplace_back("metric.a", fmt(s.metricA));
    e.emplace_back("metric.b", fmt(s.metricB));
    e.emplace_back("metric.zeta", fmt(s.metricZeta));
    e.emplace_back("metric.zeta_law", s.zetaLaw);
    e.emplace_back("c", fmt(s.c));
    e.emplace_back("lambda", fmt(s.lambda));
    e.emplace_back("window", std::to_string(s.window));
    e.emplace_back("grid", std::to_string(s.grid));
    e.emplace_back("depth", std::to_string(s.splitDepth));
    e.emplace_back("tol.fixed_point", fmt(s.fixedPointTol));
    e.emplace_back("tol.splitting_residual", fmt(s.splittingResidualTol));
    e.emplace_back("free.gamma", fmt(s.gamma));
    e.emplace_back("free.lambda_tilde", fmt(s.lambdaTilde));
    e.emplace_back("free.zeta", fmt(s.zeta));
    e.emplace_back("free.safety", fmt(s.safety));
    e.emplace_back("sigma_grid", std::to_string(s.sigmaGrid));
    e.emplace_back("max_sweeps", std::to_string(s.maxSweeps));
    e.emplace_back("parallel", s.parallel ? "1" : "0");
    e.emplace_back("seed", std::to_string(s.seed));
    e.emplace_back("base.x", fmt(s.base.x));
    e.emplace_back("base.y", fmt(s.base.y));
    e.emplace_back("decay.offset", fmt(s.decayOffset));
    e.emplace_back("decay.count", std::to_string(s.decayCount));
    e.emplace_back("decay.horizon", std::to_string(s.decayHorizon));
    e.emplace_back("probe.samples", std::to_string(s.probeSamples));
    e.emplace_back("probe.horizon", std::to_string(s.probeHorizon));
    e.emplace_back("probe.offset", fmt(s.probeOffset));
    e.emplace_back("probe.depth", std::to_string(s.probeDepth));
    e.emplace_back("verify.samples", std::to_string(s.verifySamples));
    e.emplace_back("verify.horizon", std::to_string(s.verifyHorizon));
    e.emplace_back("membership.samples", std::to_string(s.membershipSamples));
    std::sort(e.begin(), e.end());
    return e;
}

}  // namespace anofam
