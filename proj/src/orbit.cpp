#include "anofam/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

namespace anofam {

namespace {

constexpr double kUnderflow = 1e-14;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// max over the tail half [N/2, N] of (1/n) log(d_n / d_0); normalizing by the
// initial separation makes the estimate invariant under uniform rescaling of
// the metric and removes the offset bias of the finite window. -inf when the
// trace is empty.
double tailSlope(const std::vector<double>& logDistances, double logD0, int horizon) {
    const int lo = std::max(1, horizon / 2);
    double best = kNegInf;
    for (int n = lo; n <= int(logDistances.size()); ++n)
        best = std::max(best, (logDistances[n - 1] - logD0) / n);
    return best;
}

}  // namespace

DecayReport decayReport(const NsdsFamily& family, const TorusPoint& p, const TorusPoint& q,
                        const EpsilonSeq& epsilon, int horizon) {
    if (p.component != q.component) throw DomainError("decayReport: pair on different components");
    if (horizon < 1) throw ValidationError("decayReport: horizon must be >= 1");
    DecayReport r;
    r.p = p;
    r.q = q;
    r.horizon = horizon;
    r.ballRespectedForward = r.ballRespectedBackward = true;

    const int i = p.component;
    const double d0 = distance(family.metricAt(i), p, q);
    if (d0 < kUnderflow) {
        // q is numerically p: both orbits coincide, membership is vacuous
        r.forwardUnderflow = r.backwardUnderflow = true;
        r.thetaEstimate = r.omegaEstimate = kNegInf;
        r.memberStable = r.memberUnstable = true;
        return r;
    }
    r.initialLogDistance = std::log(d0);
    if (d0 > epsilon(i)) r.ballRespectedForward = r.ballRespectedBackward = false;
    {
        TorusPoint pc = p, qc = q;
        for (int n = 1; n <= horizon; ++n) {
            pc = applyStep(family, i + n - 1, pc);
            qc = applyStep(family, i + n - 1, qc);
            const double d = distance(family.metricAt(i + n), pc, qc);
            if (d < kUnderflow) {
                r.forwardUnderflow = true;
                break;
            }
            r.forwardLogDistances.push_back(std::log(d));
            if (d > epsilon(i + n)) r.ballRespectedForward = false;
        }
    }
    {
        TorusPoint pc = p, qc = q;
        for (int n = 1; n <= horizon; ++n) {
            pc = invertStep(family, i - n, pc);
            qc = invertStep(family, i - n, qc);
            const double d = distance(family.metricAt(i - n), pc, qc);
            if (d < kUnderflow) {
                r.backwardUnderflow = true;
                break;
            }
            r.backwardLogDistances.push_back(std::log(d));
            if (d > epsilon(i - n)) r.ballRespectedBackward = false;
        }
    }
    r.thetaEstimate = tailSlope(r.forwardLogDistances, r.initialLogDistance, horizon);
    r.omegaEstimate = tailSlope(r.backwardLogDistances, r.initialLogDistance, horizon);
    r.memberStable = r.ballRespectedForward && r.thetaEstimate < 0.0;
    r.memberUnstable = r.ballRespectedBackward && r.omegaEstimate < 0.0;
    return r;
}

SubsetReport manifoldSubsetCheck(const NsdsFamily& family,
                                 const std::vector<ManifoldPoint>& cloud, const TorusPoint& p,
                                 const EpsilonSeq& epsilon, int horizon, double lambdaTilde,
                                 int sampleCount, std::uint64_t seed, Exec exec) {
    if (cloud.empty()) throw ValidationError("manifoldSubsetCheck: empty cloud");
    SubsetReport rep;
    rep.total = sampleCount;
    rep.slopeBound = std::log(lambdaTilde);

    Rng rng(seed);
    std::vector<std::size_t> picks(sampleCount);
    for (auto& s : picks) s = std::size_t(rng.nextU64() % cloud.size());

    std::vector<char> member(sampleCount, 0);
    std::vector<double> slope(sampleCount, kNegInf);
    std::vector<std::exception_ptr> errors(sampleCount);
    parFor(exec, sampleCount, [&](std::int64_t s) {
        try {
            const ManifoldPoint& mp = cloud[picks[s]];
            const TorusPoint q(p.component, mp.x, mp.y);
            const DecayReport d = decayReport(family, p, q, epsilon, horizon);
            member[s] = d.memberUnstable ? 1 : 0;
            slope[s] = d.omegaEstimate;
        } catch (...) {
            errors[s] = std::current_exception();
        }
    });
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    rep.maxBackwardSlope = kNegInf;
    for (int s = 0; s < sampleCount; ++s) {
        if (member[s])
            ++rep.passed;
        else
            rep.failingSamples.push_back(s);
        rep.maxBackwardSlope = std::max(rep.maxBackwardSlope, slope[s]);
    }
    rep.allMember = rep.passed == rep.total;
    rep.slopesWithinBound = rep.maxBackwardSlope <= rep.slopeBound + 1e-9;
    return rep;
}

CoincidenceReport coincidenceQuantities(const std::map<int, double>& theta,
                                        const RateTable& rates, const AdaptedMetric& adapted,
                                        int horizon, double tolerance) {
    if (horizon < 2) throw ValidationError("coincidenceQuantities: horizon must be >= 2");
    CoincidenceReport rep;
    const int lo = std::max(1, horizon / 2);

    rep.OmegaAngle = rep.ThetaAngle = kNegInf;
    for (int n = lo; n <= horizon; ++n) {
        rep.ThetaAngle = std::max(rep.ThetaAngle, theta.at(n));
        rep.OmegaAngle = std::max(rep.OmegaAngle, theta.at(-n));
    }

    rep.OmegaTilde = rep.ThetaTilde = std::numeric_limits<double>::infinity();
    double logTau = 0.0, logVarsigma = 0.0;
    for (int n = 1; n <= horizon; ++n) {
        logTau += std::log(rates.at(n - 1).tau);
        logVarsigma += std::log(rates.at(-n + 1).varsigma);
        if (n < lo) continue;
        rep.ThetaTilde = std::min(rep.ThetaTilde,
                                  (std::log(0.5 * adapted.deltaAt(n)) - logTau) / n);
        rep.OmegaTilde = std::min(rep.OmegaTilde,
                                  (std::log(0.5 * adapted.deltaAt(-n)) - logVarsigma) / n);
    }

    rep.ccccSatisfied = std::min(rep.OmegaTilde, rep.ThetaTilde) >= -tolerance &&
                        std::min(rep.OmegaAngle, rep.ThetaAngle) > 0.0;
    return rep;
}

std::optional<ExpansivityWitness> expansivityProbe(const NsdsFamily& family, int sampleCount,
                                                   int horizon, std::uint64_t seed,
                                                   int splitDepth, double offset) {
    if (offset <= 0.0) throw ValidationError("expansivityProbe: offset must be positive");
    Rng rng(seed);
    const auto inf = [](int) { return std::numeric_limits<double>::infinity(); };
    for (int s = 0; s < sampleCount; ++s) {
        const TorusPoint x(0, rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0));
        SplittingFrame f;
        try {
            f = estimateSplitting(family, 0, x, splitDepth);
        } catch (const InsufficientDepthError&) {
            continue;
        }
        const TorusPoint y(0, x.coords + f.eU * offset);
        const DecayReport d = decayReport(family, x, y, inf, horizon);
        const double d0 = distance(family.metricAt(0), x, y);
        // a negative tail slope alone is not decay: a saturated wrapped
        // distance also drifts slightly negative in (1/n) log d. Require the
        // separation to actually fall below its initial value.
        const auto decays = [&](const std::vector<double>& logD, bool underflow) {
            if (underflow) return true;
            if (logD.empty()) return false;
            double tailMax = -std::numeric_limits<double>::infinity();
            for (int n = std::max(1, horizon / 2); n <= int(logD.size()); ++n)
                tailMax = std::max(tailMax, logD[n - 1]);
            return tailMax < std::log(d0) && logD.back() < std::log(0.5 * d0);
        };
        const bool forwardDecays =
            decays(d.forwardLogDistances, d.forwardUnderflow) &&
            (d.forwardUnderflow || d.thetaEstimate < -1e-3);
        const bool backwardDecays =
            decays(d.backwardLogDistances, d.backwardUnderflow) &&
            (d.backwardUnderflow || d.omegaEstimate < -1e-3);
        if (forwardDecays && backwardDecays) {
            ExpansivityWitness w;
            w.x = x;
            w.y = y;
            w.forwardLogDistances = d.forwardLogDistances;
            w.backwardLogDistances = d.backwardLogDistances;
            w.forwardSlope = d.thetaEstimate;
            w.backwardSlope = d.omegaEstimate;
            return w;
        }
    }
    return std::nullopt;
}

NestingReport metricEquivalenceNesting(const NsdsFamily& family,
                                       const std::function<MetricTensor(int)>& metricB,
                                       const TorusPoint& p, const EpsilonSeq& epsilon,
                                       int horizon, double k, double K, int sampleCount,
                                       std::uint64_t seed) {
    if (k <= 0.0 || K < k) throw ValidationError("metricEquivalenceNesting: need 0 < k <= K");
    NestingReport rep;
    rep.k = k;
    rep.K = K;
    rep.minRatio = std::numeric_limits<double>::infinity();
    rep.maxRatio = 0.0;

    Rng rng(seed);
    std::map<int, double> maxBOverA;
    for (int n = -horizon; n <= horizon; ++n) {
        const MetricTensor a = family.metricAt(n);
        const MetricTensor b = metricB(n);
        double worstBA = 0.0;
        for (int s = 0; s < 64; ++s) {
            const double phi = rng.uniform(0.0, 6.283185307179586);
            const Vec2 v{std::cos(phi), std::sin(phi)};
            const double na = a.norm(v), nb = b.norm(v);
            const double ratio = na / nb;
            rep.minRatio = std::min(rep.minRatio, ratio);
            rep.maxRatio = std::max(rep.maxRatio, ratio);
            if (ratio < k * (1.0 - 1e-9) || ratio > K * (1.0 + 1e-9))
                throw NotUniformlyEquivalentError(
                    "sampled norm ratio " + std::to_string(ratio) +
                    " escapes [k, K] at n=" + std::to_string(n));
            worstBA = std::max(worstBA, nb / na);
        }
        maxBOverA[n] = worstBA;
        // half the B-diameter of the A-ball of radius epsilon(n)
        rep.epsPrime[n] = epsilon(n) * worstBA;
    }

    NsdsFamily famB = family;
    famB.metricAt = [metricB](int n) {
        MetricTensor m = metricB(n);
        m.componentIndex = n;
        return m;
    };
    const EpsilonSeq epsPrime = [rep](int n) { return rep.epsPrime.at(n); };

    rep.implicationHolds = true;
    const double scale = 0.05 * epsilon(p.component);
    for (int s = 0; s < sampleCount; ++s) {
        const Vec2 d{rng.uniform(-scale, scale), rng.uniform(-scale, scale)};
        const TorusPoint q(p.component, p.coords + d);
        const DecayReport repA = decayReport(family, p, q, epsilon, horizon);
        const DecayReport repB = decayReport(famB, p, q, epsPrime, horizon);
        ++rep.samplesChecked;
        if (repA.memberStable && !repB.memberStable) rep.implicationHolds = false;
    }
    return rep;
}

}  // namespace anofam
