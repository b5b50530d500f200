#include "anofam/graph_transform.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

namespace anofam {

namespace {

TorusPoint applyChain(const std::vector<MapAtom>& chain, const MetricTensor& metric,
                      const TorusPoint& start) {
    TorusPoint cur = start;
    for (const auto& atom : chain) {
        if (!atom.inverted)
            cur = TorusPoint(cur.component, atom.map.applyLift(cur.coords));
        else
            cur = inverseMap(atom.map, metric, cur);
    }
    return cur;
}

}  // namespace

std::array<double, 2> ChartedStep::chartImage(double v, double w) const {
    const Vec2 z = anchor.coords + frame * Vec2{v, w};
    const TorusPoint image = applyChain(chain, metric, TorusPoint(anchor.component, z));
    const Vec2 lift = nearestLift(metricNext, image.coords - anchorNext.coords);
    const Vec2 fc = frameNextInv * lift;
    return {fc.x, fc.y};
}

std::array<double, 2> ChartedStep::remainder(double v, double w) const {
    const auto im = chartImage(v, w);
    return {im[0] - Fs * v, im[1] - Fu * w};
}

ChartedStep buildChartedStep(const NsdsFamily& family, const TorusPoint& anchor,
                             const SplittingFrame& frameHere, const SplittingFrame& frameNext,
                             int n, double delta, double epsNext) {
    ChartedStep s;
    s.index = n;
    s.anchor = anchor;
    s.anchorNext = applyStep(family, n, anchor);
    s.frame = Mat2::fromColumns(frameHere.eS, frameHere.eU);
    s.frameInv = s.frame.inverse();
    s.frameNext = Mat2::fromColumns(frameNext.eS, frameNext.eU);
    s.frameNextInv = s.frameNext.inverse();
    s.metric = family.metricAt(n);
    s.metricNext = family.metricAt(n + 1);
    s.chain = family.stepAt(n);
    s.delta = delta;
    s.cap = delta;
    s.epsNext = epsNext;

    const Mat2 jf = s.frameNextInv * stepJacobian(family, n, anchor) * s.frame;
    s.Fs = jf.a;
    s.Fu = jf.d;

    // containment: every charted point of the domain box must land inside the
    // target injectivity ball
    const int K = 16;
    for (int i = 0; i <= K; ++i)
        for (int j = 0; j <= K; ++j) {
            const double v = -delta + 2.0 * delta * i / K;
            const double w = -delta + 2.0 * delta * j / K;
            const auto im = s.chartImage(v, w);
            const Vec2 liftVec = s.frameNext * Vec2{im[0], im[1]};
            if (s.metricNext.norm(liftVec) >= epsNext)
                throw CapViolationError("chart image escapes target ball at n=" +
                                            std::to_string(n),
                                        n);
        }
    return s;
}

double estimateSigma(const ChartedStep& step, double delta, int gridDensity, double safety,
                     Exec exec) {
    const double h = std::max(1e-8, delta * 1e-4);
    const std::int64_t side = gridDensity + 1;
    const double raw = parMax(exec, side * side, [&](std::int64_t idx) {
        const std::int64_t i = idx / side, j = idx % side;
        const double v = -delta + 2.0 * delta * double(i) / gridDensity;
        const double w = -delta + 2.0 * delta * double(j) / gridDensity;
        const auto pv = step.remainder(v + h, w);
        const auto mv = step.remainder(v - h, w);
        const auto pw = step.remainder(v, w + h);
        const auto mw = step.remainder(v, w - h);
        const double dav = (pv[0] - mv[0]) / (2 * h), daw = (pw[0] - mw[0]) / (2 * h);
        const double dbv = (pv[1] - mv[1]) / (2 * h), dbw = (pw[1] - mw[1]) / (2 * h);
        return std::max(std::hypot(dav, daw), std::hypot(dbv, dbw));
    });
    return raw * safety;
}

RateTable rateTable(const std::map<int, ChartedStep>& steps, double lambda, double gamma,
                    double lambdaTilde) {
    if (lambda <= 0.0 || lambda >= 1.0) throw ValidationError("rateTable: lambda not in (0,1)");
    if (gamma <= lambda * lambda || gamma >= 1.0)
        throw ValidationError("rateTable: gamma not in (lambda^2, 1)");
    if (lambdaTilde <= 0.5 * (1.0 + lambda) || lambdaTilde >= 1.0)
        throw ValidationError("rateTable: lambdaTilde not in ((1+lambda)/2, 1)");

    RateTable t;
    t.lambda = lambda;
    t.gamma = gamma;
    t.lambdaTilde = lambdaTilde;
    t.alpha = 0.5 * (1.0 / lambda - 1.0);
    const double a = t.alpha;

    for (const auto& [n, s] : steps) {
        RateRow r;
        r.mu = s.mu();
        r.kappa = s.kappa();
        const double kinv = 1.0 / r.kappa;
        r.omega = std::min({(kinv - r.mu) * a / ((1 + a) * (1 + a)),
                            (gamma * kinv - r.mu) / ((1 + a) * (1 + gamma)),
                            (2 * lambda * lambdaTilde * kinv - 1 - lambda) / (1 + lambda)});
        if (r.omega <= 0.0)
            throw HyperbolicityMarginError(
                "omega <= 0 at n=" + std::to_string(n) + " (family too weakly hyperbolic)", n);
        r.tau = (1 + a) / (kinv - r.omega * (1 + a));

        const double minv = 1.0 / r.mu;
        r.varpi = std::min({(minv - r.kappa) * a / ((1 + a) * (1 + a)),
                            (gamma * minv - r.kappa) / ((1 + a) * (1 + gamma)),
                            (2 * lambda * lambdaTilde * minv - 1 - lambda) / (1 + lambda)});
        r.varsigma = (1 + a) / (minv - r.varpi * (1 + a));
        t.rows.emplace(n, r);
    }
    return t;
}

DeltaSchedule scheduleDeltas(std::map<int, ChartedStep>& steps, RateTable& rates,
                             int gridDensity, double safety, Exec exec) {
    DeltaSchedule sched;
    if (steps.empty()) throw ValidationError("scheduleDeltas: no steps");
    const int lo = steps.begin()->first;
    const int hi = steps.rbegin()->first;  // steps cover [lo, hi]; deltas [lo, hi+1]

    // per-index feasibility: largest delta <= cap with sigma(delta) < omega
    for (auto& [n, s] : steps) {
        const double omega = rates.rows.at(n).omega;
        double delta = s.cap;
        double sigma = estimateSigma(s, delta, gridDensity, safety, exec);
        if (sigma >= omega) {
            double l = 0.0, h = s.cap;
            for (int it = 0; it < 40; ++it) {
                const double mid = 0.5 * (l + h);
                if (estimateSigma(s, mid, gridDensity, safety, exec) < omega)
                    l = mid;
                else
                    h = mid;
            }
            delta = l * 0.999;
            if (delta < 1e-12)
                throw ScheduleInfeasibleError(
                    "no feasible delta at n=" + std::to_string(n), n);
            sigma = estimateSigma(s, delta, gridDensity, safety, exec);
        }
        sched.deltaAt[n] = delta;
        sched.capAt[n] = s.cap;
        rates.rows.at(n).sigma = sigma;
    }
    // trailing index has no step of its own; cap only
    sched.deltaAt[hi + 1] = steps.at(hi).epsNext > 0 ? std::min(steps.at(hi).epsNext,
                                                                sched.deltaAt[hi])
                                                     : sched.deltaAt[hi];
    sched.capAt[hi + 1] = sched.deltaAt[hi + 1];

    // growth recurrence: delta_n <= ((kappa^{-1}+alpha*mu)/(1+alpha)) * delta_{n-1}
    for (int n = lo + 1; n <= hi + 1; ++n) {
        const RateRow& prev = rates.rows.at(n - 1);
        const double factor = (1.0 / prev.kappa + rates.alpha * prev.mu) / (1.0 + rates.alpha);
        sched.deltaAt[n] = std::min(sched.deltaAt[n], factor * sched.deltaAt[n - 1]);
    }

    // certify
    sched.certified = true;
    for (auto& [n, s] : steps) {
        s.delta = sched.deltaAt[n];
        const RateRow& r = rates.rows.at(n);
        if (sched.deltaAt[n] <= 0.0 || r.sigma >= r.omega || r.tau >= rates.lambdaTilde) {
            sched.certified = false;
            sched.violatingIndex = n;
            break;
        }
    }
    return sched;
}

LipschitzGraph LipschitzGraph::zero(int index, double radius, int gridM) {
    if (gridM < 2 || gridM % 2 != 0)
        throw ValidationError("LipschitzGraph: grid density must be even and >= 2");
    LipschitzGraph g;
    g.index = index;
    g.radius = radius;
    g.values.assign(gridM + 1, 0.0);
    return g;
}

double LipschitzGraph::eval(double w) const {
    const int m = gridM();
    const double t = (w + radius) / (2.0 * radius) * m;
    if (t <= 0.0) return values.front();
    if (t >= m) return values.back();
    const int j = int(t);
    const double f = t - j;
    return values[j] * (1.0 - f) + values[j + 1] * f;
}

double LipschitzGraph::maxChordSlope() const {
    const double h = spacing();
    double worst = 0.0;
    for (std::size_t j = 0; j + 1 < values.size(); ++j)
        worst = std::max(worst, std::fabs(values[j + 1] - values[j]) / h);
    return worst;
}

double LipschitzGraph::supNorm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::fabs(v));
    return m;
}

void LipschitzGraph::validate(double alpha) const {
    if (values[gridM() / 2] != 0.0)
        throw ContractViolationError("graph does not vanish at the anchor");
    if (maxChordSlope() > alpha * (1.0 + 1e-9) + 1e-12)
        throw ContractViolationError("graph exceeds the Lipschitz bound");
    if (supNorm() > radius * (1.0 + 1e-12))
        throw ContractViolationError("graph escapes the stable ball");
}

LipschitzGraph graphTransformStep(const LipschitzGraph& phi, const ChartedStep& step,
                                  const RateTable& rates, double deltaNext, int gridNext,
                                  Exec exec) {
    const RateRow& row = rates.at(step.index);
    const double alpha = rates.alpha;
    const double delta = phi.radius;

    auto r = [&](double w) {
        return step.Fu * w + step.remainder(phi.eval(w), w)[1];
    };

    // expansion on grid chords
    const double bound = (1.0 / row.kappa - row.omega * (1.0 + alpha)) * (1.0 - 1e-9);
    {
        double prev = r(phi.abscissa(0));
        for (int j = 1; j <= phi.gridM(); ++j) {
            const double cur = r(phi.abscissa(j));
            if (std::fabs(cur - prev) < bound * phi.spacing())
                throw ContractViolationError("r_n expansion bound violated at n=" +
                                             std::to_string(step.index));
            prev = cur;
        }
    }

    const double rLo = r(-delta), rHi = r(delta);
    const double lo = std::min(rLo, rHi), hi = std::max(rLo, rHi);
    const double covTol = 1e-12 * (1.0 + deltaNext);
    if (lo > -deltaNext + covTol || hi < deltaNext - covTol)
        throw CoverageError("B^u(delta_{n+1}) not covered by r_n at n=" +
                                std::to_string(step.index),
                            step.index);

    const bool increasing = rHi > rLo;
    LipschitzGraph psi = LipschitzGraph::zero(step.index + 1, deltaNext, gridNext);

    parFor(exec, gridNext + 1, [&](std::int64_t k) {
        const double x = psi.abscissa(int(k));
        // bisection; r is strictly monotone on [-delta, delta]
        double a = -delta, b = delta;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (a + b);
            const double val = r(mid);
            if ((val < x) == increasing)
                a = mid;
            else
                b = mid;
        }
        const double w = 0.5 * (a + b);
        const double pv = phi.eval(w);
        psi.values[k] = step.Fs * pv + step.remainder(pv, w)[0];
    });

    // the center must vanish: r(0)=0 and phi(0)=0 force it up to rounding
    const int center = gridNext / 2;
    if (std::fabs(psi.values[center]) > 1e-10)
        throw ContractViolationError("transformed graph does not vanish at 0");
    psi.values[center] = 0.0;
    psi.validate(alpha);
    return psi;
}

GraphFamily applyGraphTransform(const std::map<int, ChartedStep>& steps,
                                const DeltaSchedule& schedule, const RateTable& rates,
                                int window, int gridDensity, const GraphFamily& in,
                                Exec exec) {
    GraphFamily out;
    out.graphs.emplace(-window, LipschitzGraph::zero(-window, schedule.deltaAt.at(-window),
                                                     gridDensity));
    std::vector<int> idx;
    for (int n = -window; n < window; ++n) idx.push_back(n);

    std::vector<LipschitzGraph> produced(idx.size());
    std::vector<std::exception_ptr> errors(idx.size());
    parFor(exec, std::int64_t(idx.size()), [&](std::int64_t t) {
        try {
            const int n = idx[t];
            produced[t] = graphTransformStep(in.graphs.at(n), steps.at(n), rates,
                                             schedule.deltaAt.at(n + 1), gridDensity,
                                             Exec::serial);
        } catch (...) {
            errors[t] = std::current_exception();
        }
    });
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    for (std::size_t t = 0; t < idx.size(); ++t)
        out.graphs.emplace(idx[t] + 1, std::move(produced[t]));
    return out;
}

double graphDistance(const GraphFamily& a, const GraphFamily& b) {
    double worst = 0.0;
    for (const auto& [n, ga] : a.graphs) {
        const auto it = b.graphs.find(n);
        if (it == b.graphs.end()) continue;
        const LipschitzGraph& gb = it->second;
        for (int j = 0; j <= ga.gridM(); ++j) {
            const double x = ga.abscissa(j);
            if (x == 0.0) continue;
            worst = std::max(worst, std::fabs(ga.values[j] - gb.values[j]) / std::fabs(x));
        }
    }
    return worst;
}

GraphFamily fixedPoint(const std::map<int, ChartedStep>& steps, const DeltaSchedule& schedule,
                       const RateTable& rates, int window, int gridDensity, double tol,
                       int maxSweeps, Exec exec, const GraphFamily* initial) {
    GraphFamily cur;
    if (initial) {
        cur = *initial;
    } else {
        for (int n = -window; n <= window; ++n)
            cur.graphs.emplace(n, LipschitzGraph::zero(n, schedule.deltaAt.at(n), gridDensity));
    }
    std::vector<double> trace;
    for (int sweep = 0; sweep < maxSweeps; ++sweep) {
        GraphFamily next = applyGraphTransform(steps, schedule, rates, window, gridDensity,
                                               cur, exec);
        const double d = graphDistance(cur, next);
        trace.push_back(d);
        cur = std::move(next);
        if (d <= tol) {
            cur.metricValue = d;
            cur.distanceTrace = std::move(trace);
            return cur;
        }
    }
    throw NonConvergenceError("fixedPoint: no convergence after " +
                                  std::to_string(maxSweeps) + " sweeps",
                              std::move(trace));
}

NsdsFamily reflectInverse(const NsdsFamily& family) {
    NsdsFamily out;
    const NsdsFamily base = family;
    out.window = family.window;
    out.stepAt = [base](int i) {
        auto chain = base.stepAt(-i - 1);
        std::reverse(chain.begin(), chain.end());
        for (auto& atom : chain) atom.inverted = !atom.inverted;
        return chain;
    };
    out.metricAt = [base](int i) {
        MetricTensor m = base.metricAt(-i);
        m.componentIndex = i;
        return m;
    };
    return out;
}

namespace {

double resolveOr(double value, double fallback) { return value > 0.0 ? value : fallback; }

// metric operator norm of the step derivative, sampled over the torus
double stepNormBound(const NsdsFamily& family, int n, int grid = 24) {
    const MetricTensor g = family.metricAt(n);
    const MetricTensor gn = family.metricAt(n + 1);
    const Mat2 gInv = g.g.inverse();
    double worst = 0.0;
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            const TorusPoint p(n, double(i) / grid, double(j) / grid);
            const Mat2 jm = stepJacobian(family, n, p);
            const Mat2 m = gInv * jm.transpose() * gn.g * jm;
            worst = std::max(worst, symmetricEigenvalues(m)[1]);
        }
    return std::sqrt(worst) * 1.05;
}

double pointToCloudDistance(const MetricTensor& g, const TorusPoint& q,
                            const std::vector<ManifoldPoint>& cloud) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < cloud.size(); ++j) {
        const Vec2 a = nearestLift(g, Vec2{cloud[j].x, cloud[j].y} - q.coords);
        Vec2 ab = Vec2{cloud[j + 1].x - cloud[j].x, cloud[j + 1].y - cloud[j].y};
        ab = Vec2{ab.x - std::round(ab.x), ab.y - std::round(ab.y)};  // short segment lift
        const double denom = g.inner(ab, ab);
        double t = denom > 0 ? -g.inner(a, ab) / denom : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const Vec2 closest = a + ab * t;
        best = std::min(best, g.norm(closest));
    }
    return best;
}

}  // namespace

PipelinePrep preparePipeline(const NsdsFamily& family, const TorusPoint& p,
                             const PipelineParams& params) {
    if (p.component != 0) throw DomainError("preparePipeline: base point must lie on M_0");
    if (params.lambda <= 0.0 || params.lambda >= 1.0)
        throw ValidationError("preparePipeline: certified lambda required");
    const int N = params.window;
    if (family.window < N + params.splitDepth + 1)
        throw ValidationError("preparePipeline: family window too small for depth");

    PipelinePrep prep;
    const double lambda = params.lambda;
    prep.gamma = resolveOr(params.gamma, 0.5 * (lambda * lambda + 1.0));
    prep.lambdaTilde = resolveOr(params.lambdaTilde, 0.25 * (3.0 + lambda));
    prep.zeta = resolveOr(params.zeta, 0.5 * (1.0 - lambda));

    // anchor orbit and frames
    for (int n = -N; n <= N; ++n) {
        const TorusPoint a = compose(family, 0, n, p);
        prep.anchors.emplace(n, a);
        prep.frames.emplace(n, estimateSplitting(family, n, a, params.splitDepth,
                                                 params.splittingResidualTol));
    }

    // charted steps at the chart caps; the (v,w) box of radius delta has
    // corners of metric norm s*delta, so the ball caps are divided by s
    for (int n = -N; n < N; ++n) {
        const double epsHere = injectivityRadius(family.metricAt(n));
        const double epsNext = injectivityRadius(family.metricAt(n + 1));
        const double L = stepNormBound(family, n);
        const MetricTensor g = family.metricAt(n);
        const Mat2 W = Mat2::fromColumns(prep.frames.at(n).eS, prep.frames.at(n).eU);
        const double corner =
            std::max(g.norm(W * Vec2{1.0, 1.0}), g.norm(W * Vec2{1.0, -1.0}));
        const double cap =
            0.95 * std::min(epsHere, epsNext / std::max(L, 1.0)) / corner;
        prep.steps.emplace(n, buildChartedStep(family, prep.anchors.at(n), prep.frames.at(n),
                                               prep.frames.at(n + 1), n, cap, epsNext));
    }

    prep.rates = rateTable(prep.steps, lambda, prep.gamma, prep.lambdaTilde);
    prep.schedule = scheduleDeltas(prep.steps, prep.rates, params.sigmaGrid, params.safety,
                                   params.exec);
    return prep;
}

ManifoldResult unstableManifold(const NsdsFamily& family, const TorusPoint& p,
                                const PipelineParams& params, const AdaptedMetric* adapted) {
    const int N = params.window;
    PipelinePrep prep = preparePipeline(family, p, params);
    const double lambda = params.lambda;
    const double zeta = prep.zeta;

    ManifoldResult res;
    res.anchors = std::move(prep.anchors);
    res.frames = std::move(prep.frames);
    res.rates = std::move(prep.rates);
    res.schedule = std::move(prep.schedule);
    const std::map<int, ChartedStep>& steps = prep.steps;

    if (!res.schedule.certified)
        throw ScheduleInfeasibleError("schedule certification failed at n=" +
                                          std::to_string(res.schedule.violatingIndex),
                                      res.schedule.violatingIndex);

    res.graphs = fixedPoint(steps, res.schedule, res.rates, N, params.gridDensity,
                            params.fixedPointTol, params.maxSweeps, params.exec);

    // point clouds
    for (int n = -N; n <= N; ++n) {
        const LipschitzGraph& g = res.graphs.graphs.at(n);
        const Mat2 W = Mat2::fromColumns(res.frames.at(n).eS, res.frames.at(n).eU);
        std::vector<ManifoldPoint> cloud;
        cloud.reserve(g.gridM() + 1);
        for (int j = 0; j <= g.gridM(); ++j) {
            const double w = g.abscissa(j);
            const double v = g.values[j];
            const Vec2 z = res.anchors.at(n).coords + W * Vec2{v, w};
            cloud.push_back({n, w, v, wrap01(z.x), wrap01(z.y)});
        }
        res.clouds.emplace(n, std::move(cloud));
    }

    // Theorem-style property report
    for (int n = -N; n <= N; ++n) {
        const LipschitzGraph& g = res.graphs.graphs.at(n);
        const int c = g.gridM() / 2;
        res.properties.tangencySlope[n] =
            std::fabs(g.values[c + 1] - g.values[c - 1]) / (2.0 * g.spacing());
    }
    for (int n = -N + 1; n <= N; ++n) {
        const MetricTensor gPrev = family.metricAt(n - 1);
        double worst = 0.0;
        for (const auto& mp : res.clouds.at(n)) {
            const TorusPoint q(n, mp.x, mp.y);
            const TorusPoint back = invertStep(family, n - 1, q);
            worst = std::max(worst, pointToCloudDistance(gPrev, back, res.clouds.at(n - 1)));
        }
        res.properties.invarianceResidual[n] = worst;
    }

    // backward contraction bound with the adapted-metric constants
    AdaptedMetric localAdapted;
    const AdaptedMetric* am = adapted;
    if (!am) {
        localAdapted = adaptedMetric(family, p, lambda, zeta, 40, -N, N,
                                     params.splitDepth, 1e-6);
        am = &localAdapted;
    }
    double worstExcess = -std::numeric_limits<double>::infinity();
    for (int n = -N; n < N; ++n) {
        const auto& cloud = res.clouds.at(n + 1);
        const int stride = std::max(1, int(cloud.size()) / 8);
        for (std::size_t ji = 0; ji < cloud.size(); ji += stride) {
            const TorusPoint q(n + 1, cloud[ji].x, cloud[ji].y);
            const double d0 = distance(family.metricAt(n + 1), q, res.anchors.at(n + 1));
            if (d0 < 1e-13) continue;
            TorusPoint qc = q;
            TorusPoint pc = res.anchors.at(n + 1);
            double tauProd = 1.0;
            for (int k = 0; k <= 7 && n - k >= -N; ++k) {
                qc = invertStep(family, n - k, qc);
                pc = res.anchors.at(n - k);
                tauProd *= res.rates.at(n - k).tau;
                const double lhs = distance(family.metricAt(n - k), qc, pc);
                const double rhs = (2.0 / am->deltaAt(n + 1)) * tauProd * d0;
                worstExcess = std::max(worstExcess, lhs / rhs - 1.0);
            }
        }
    }
    res.properties.worstContractionExcess = worstExcess;
    res.properties.contractionBoundHolds = worstExcess <= 1e-6;

    return res;
}

ManifoldResult stableManifold(const NsdsFamily& family, const TorusPoint& p,
                              const PipelineParams& params, const AdaptedMetric* adapted) {
    const NsdsFamily reflected = reflectInverse(family);
    ManifoldResult r = unstableManifold(reflected, p, params, adapted);

    // map reflected indices back to original components (m -> -m)
    ManifoldResult out;
    out.rates = r.rates;
    out.schedule = r.schedule;
    out.graphs.metricValue = r.graphs.metricValue;
    out.graphs.distanceTrace = r.graphs.distanceTrace;
    out.properties.worstContractionExcess = r.properties.worstContractionExcess;
    out.properties.contractionBoundHolds = r.properties.contractionBoundHolds;
    for (auto& [m, g] : r.graphs.graphs) {
        LipschitzGraph gg = g;
        gg.index = -m;
        out.graphs.graphs.emplace(-m, std::move(gg));
    }
    for (auto& [m, cloud] : r.clouds) {
        for (auto& mp : cloud) mp.index = -m;
        out.clouds.emplace(-m, std::move(cloud));
    }
    for (auto& [m, a] : r.anchors) out.anchors.emplace(-m, TorusPoint(-m, a.coords));
    for (auto& [m, f] : r.frames) {
        SplittingFrame ff = f;
        ff.point = TorusPoint(-m, f.point.coords);
        std::swap(ff.eS, ff.eU);  // reflected unstable direction is the stable one
        out.frames.emplace(-m, ff);
    }
    for (auto& [m, t] : r.properties.tangencySlope) out.properties.tangencySlope[-m] = t;
    for (auto& [m, t] : r.properties.invarianceResidual)
        out.properties.invarianceResidual[-m] = t;
    return out;
}

}  // namespace anofam
