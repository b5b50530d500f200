#include "anofam/splitting.hpp"

#include <algorithm>
#include <cmath>

namespace anofam {

namespace {

Vec2 powerIterationSeed(const Mat2& product) {
    const Vec2 seed{std::sqrt(0.5), std::sqrt(0.5)};
    // seed useless if it is (numerically) an eigendirection of the product
    const Vec2 im = product * seed;
    const double sine = std::fabs(cross(im, seed)) / (norm2(im) * norm2(seed));
    if (sine < 1e-12) {
        const Vec2 alt{1.0, 1.0 + 0x1.0p-20};
        return alt * (1.0 / norm2(alt));
    }
    return seed;
}

Vec2 signNormalized(const Vec2& v) {
    if (std::fabs(v.x) > 1e-12) return v.x < 0 ? -v : v;
    return v.y < 0 ? -v : v;
}

double sineBetween(const MetricTensor& g, const Vec2& u, const Vec2& v) {
    const double c = g.inner(u, v) / (g.norm(u) * g.norm(v));
    return std::sqrt(std::max(0.0, 1.0 - c * c));
}

// directions only, no residual recursion
void rawDirections(const NsdsFamily& family, int i, const TorusPoint& p, int depth, Vec2& eS,
                   Vec2& eU) {
    const MetricTensor g = family.metricAt(i);

    const TorusPoint pBack = compose(family, i, -depth, p);
    const Mat2 fwd = derivativeCocycle(family, i - depth, depth, pBack);
    eU = signNormalized(g.normalized(fwd * powerIterationSeed(fwd)));

    const TorusPoint pFwd = compose(family, i, depth, p);
    const Mat2 bwd = derivativeCocycle(family, i + depth, -depth, pFwd);
    eS = signNormalized(g.normalized(bwd * powerIterationSeed(bwd)));
}

}  // namespace

SplittingFrame estimateSplitting(const NsdsFamily& family, int i, const TorusPoint& p,
                                 int depth, double residualTol) {
    if (p.component != i) throw DomainError("estimateSplitting: point not on component i");
    SplittingFrame f;
    f.point = p;
    rawDirections(family, i, p, depth, f.eS, f.eU);

    const MetricTensor g = family.metricAt(i);
    const MetricTensor gNext = family.metricAt(i + 1);
    const double c = std::fabs(g.inner(f.eS, f.eU));
    f.theta = std::acos(std::clamp(c, 0.0, 1.0));

    const Mat2 j = stepJacobian(family, i, p);
    f.muLocal = gNext.norm(j * f.eS);
    f.kappaLocal = 1.0 / gNext.norm(j * f.eU);

    // collinearity against the frame one step forward
    Vec2 eSNext, eUNext;
    const TorusPoint pNext = applyStep(family, i, p);
    rawDirections(family, i + 1, pNext, depth, eSNext, eUNext);
    const double rs = sineBetween(gNext, j * f.eS, eSNext);
    const double ru = sineBetween(gNext, j * f.eU, eUNext);
    f.residual = std::max(rs, ru);
    if (f.residual > residualTol)
        throw InsufficientDepthError("estimateSplitting: collinearity residual " +
                                         std::to_string(f.residual) + " above tolerance",
                                     f.residual);
    return f;
}

AnosovCertificate verifyAnosov(const NsdsFamily& family,
                               const std::vector<SplittingFrame>& frames, double c,
                               double lambda, int horizon, Exec exec) {
    AnosovCertificate cert;
    cert.c = c;
    cert.lambda = lambda;
    cert.samplesChecked = int(frames.size());
    cert.windowUsed = horizon;
    cert.maxViolation = parMax(exec, std::int64_t(frames.size()), [&](std::int64_t s) {
        const SplittingFrame& f = frames[s];
        const int i = f.point.component;
        double worst = -std::numeric_limits<double>::infinity();
        // forward decay on E^s
        {
            TorusPoint cur = f.point;
            Mat2 coc = Mat2::identity();
            for (int n = 1; n <= horizon && i + n <= family.window; ++n) {
                coc = stepJacobian(family, i + n - 1, cur) * coc;
                cur = applyStep(family, i + n - 1, cur);
                const double nrm = family.metricAt(i + n).norm(coc * f.eS);
                worst = std::max(worst, nrm - c * std::pow(lambda, n));
            }
        }
        // backward decay on E^u
        {
            TorusPoint cur = f.point;
            Mat2 coc = Mat2::identity();
            for (int n = 1; n <= horizon && i - n >= -family.window; ++n) {
                const TorusPoint pre = invertStep(family, i - n, cur);
                coc = stepJacobian(family, i - n, pre).inverse() * coc;
                cur = pre;
                const double nrm = family.metricAt(i - n).norm(coc * f.eU);
                worst = std::max(worst, nrm - c * std::pow(lambda, n));
            }
        }
        return worst;
    });
    return cert;
}

AngleSequence anglesSequence(const std::map<int, std::vector<SplittingFrame>>& framesAt) {
    AngleSequence seq;
    for (const auto& [i, frames] : framesAt) {
        double thetaMin = std::numeric_limits<double>::infinity();
        for (const auto& f : frames) thetaMin = std::min(thetaMin, f.theta);
        seq.indices.push_back(i);
        seq.theta.push_back(thetaMin);
        seq.cosTheta.push_back(std::cos(thetaMin));
    }
    return seq;
}

std::pair<bool, double> propertyOfAngles(const std::vector<double>& thetas, double margin) {
    if (thetas.empty()) throw ValidationError("propertyOfAngles: empty sequence");
    double mu = -std::numeric_limits<double>::infinity();
    for (double t : thetas) mu = std::max(mu, std::cos(t));
    return {mu < 1.0 - margin, mu};
}

AdaptedMetric adaptedMetric(const NsdsFamily& family, const TorusPoint& base, double lambda,
                            double zeta, int truncationDepth, int lo, int hi, int splitDepth,
                            double tailTol) {
    if (zeta <= 0.0 || zeta >= 1.0 - lambda)
        throw ValidationError("adaptedMetric: zeta must lie in (0, 1-lambda)");
    AdaptedMetric out;
    out.zeta = zeta;
    out.truncationDepth = truncationDepth;
    const double wgt = 1.0 / ((lambda + zeta) * (lambda + zeta));
    const double tailRatio = wgt * lambda * lambda;  // ((lambda/(lambda+zeta))^2)

    // The cocycle norms along the splitting factor into per-step rates,
    // |Df^k e_s| = mu_n ... mu_{n+k-1}, so the weighted sums are accumulated
    // as products of frame rates. Multiplying matrices directly instead
    // would drown the contracting component in rounding noise amplified by
    // the expanding one. Frames are cached along the orbit; the per-index
    // splitting depth shrinks near the window edge and the sum stops once
    // fewer than 12 steps of depth remain (the residual of a shallower
    // power iteration would not pass the collinearity tolerance).
    std::map<int, SplittingFrame> cache;
    const auto frameAt = [&](int i) -> const SplittingFrame* {
        const auto it = cache.find(i);
        if (it != cache.end()) return &it->second;
        const int depth =
            std::min(splitDepth, std::min(family.window + i, family.window - i - 1));
        if (depth < 12) return nullptr;
        const TorusPoint anchor = compose(family, 0, i, base);
        return &cache.emplace(i, estimateSplitting(family, i, anchor, depth)).first->second;
    };

    for (int n = lo; n <= hi; ++n) {
        const SplittingFrame* fp = frameAt(n);
        if (!fp)
            throw DepthInsufficientError("adaptedMetric: window too small at n=" +
                                         std::to_string(n));
        const SplittingFrame f = *fp;

        double sumS = 0.0, sumU = 0.0, lastS = 0.0, lastU = 0.0;
        {
            double term = 1.0;
            for (int k = 0;; ++k) {
                lastS = term;
                sumS += term;
                if (k == truncationDepth) break;
                const SplittingFrame* g = frameAt(n + k);
                if (!g) break;
                term *= g->muLocal * g->muLocal * wgt;
            }
        }
        {
            double term = 1.0;
            for (int k = 0;; ++k) {
                lastU = term;
                sumU += term;
                if (k == truncationDepth) break;
                const SplittingFrame* g = frameAt(n - k - 1);
                if (!g) break;
                term *= g->kappaLocal * g->kappaLocal * wgt;
            }
        }
        const double tail =
            std::max(lastS / sumS, lastU / sumU) * tailRatio / (1.0 - tailRatio);
        if (tail > tailTol)
            throw DepthInsufficientError("adaptedMetric: truncation tail " +
                                         std::to_string(tail) + " above tolerance at n=" +
                                         std::to_string(n));

        const Mat2 w = Mat2::fromColumns(f.eS, f.eU);
        const Mat2 winv = w.inverse();
        const Mat2 star = winv.transpose() * Mat2::diag(sumS, sumU) * winv;
        out.star.emplace(n, MetricTensor(star, n));
        out.delta.emplace(n, (1.0 - std::cos(f.theta)) *
                                 std::pow(zeta / (lambda + zeta), 2));
        out.frame.emplace(n, f);
    }
    return out;
}

std::vector<EquivalenceSample> checkMetricEquivalence(const AdaptedMetric& metric,
                                                      const NsdsFamily& family,
                                                      int samplesPerIndex,
                                                      std::uint64_t seed) {
    std::vector<EquivalenceSample> out;
    Rng rng(seed);
    for (const auto& [n, star] : metric.star) {
        const MetricTensor g = family.metricAt(n);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int s = 0; s < samplesPerIndex; ++s) {
            const double phi = rng.uniform(0.0, 6.283185307179586);
            const Vec2 v{std::cos(phi), std::sin(phi)};
            const double ratio = g.norm(v) / star.norm(v);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        EquivalenceSample e;
        e.index = n;
        e.minRatio = lo;
        e.maxRatio = hi;
        e.deltaBound = metric.delta.at(n);
        e.lowerHolds = lo >= e.deltaBound;
        e.upperHolds = hi <= 2.0;
        out.push_back(e);
    }
    return out;
}

}  // namespace anofam
