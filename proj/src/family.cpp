#include "anofam/family.hpp"

#include <cmath>
#include <string>

namespace anofam {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

MetricTensor::MetricTensor(const Mat2& tensor, int comp) : g(tensor), componentIndex(comp) {
    if (std::fabs(g.b - g.c) > 1e-14 * (1.0 + g.maxAbs()))
        throw ValidationError("metric tensor not symmetric");
    g.b = g.c = 0.5 * (g.b + g.c);
    const auto ev = symmetricEigenvalues(g);
    if (ev[0] <= 0.0) throw ValidationError("metric tensor not positive-definite");
}

TorusMap::TorusMap(std::array<std::array<int, 2>, 2> A, std::vector<PerturbationTerm> terms,
                   double eps)
    : linearPart(A), perturbations(std::move(terms)), epsilon(eps) {
    const int det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
    if (det != 1 && det != -1) throw ValidationError("linear part must have |det| = 1");
    for (const auto& t : perturbations)
        if (t.target != 0 && t.target != 1)
            throw ValidationError("perturbation target coordinate must be 0 or 1");
    // invertibility margin: the perturbation gradient must stay below the
    // smallest singular value of A
    const double bound = std::fabs(epsilon) * perturbationGradBound();
    const double smin = singularValues(linear())[0];
    if (bound >= smin)
        throw ValidationError("perturbation too large: eps*|DP| = " + std::to_string(bound) +
                              " >= sigma_min(A) = " + std::to_string(smin));
}

Vec2 TorusMap::applyLift(const Vec2& x) const {
    Vec2 y = linear() * x;
    for (const auto& t : perturbations) {
        const double arg = kTwoPi * (t.freq[0] * x.x + t.freq[1] * x.y) + t.phase;
        const double v = epsilon * t.amplitude * std::sin(arg);
        if (t.target == 0)
            y.x += v;
        else
            y.y += v;
    }
    return y;
}

Mat2 TorusMap::jacobian(const Vec2& x) const {
    Mat2 j = linear();
    for (const auto& t : perturbations) {
        const double arg = kTwoPi * (t.freq[0] * x.x + t.freq[1] * x.y) + t.phase;
        const double s = epsilon * t.amplitude * kTwoPi * std::cos(arg);
        if (t.target == 0) {
            j.a += s * t.freq[0];
            j.b += s * t.freq[1];
        } else {
            j.c += s * t.freq[0];
            j.d += s * t.freq[1];
        }
    }
    return j;
}

double TorusMap::perturbationGradBound() const {
    double b = 0.0;
    for (const auto& t : perturbations)
        b += std::fabs(t.amplitude) * kTwoPi *
             std::sqrt(double(t.freq[0] * t.freq[0] + t.freq[1] * t.freq[1]));
    return b;
}

NsdsFamily NsdsFamily::fromMaps(std::function<TorusMap(int)> mapAt,
                                std::function<MetricTensor(int)> metricAt, int window) {
    NsdsFamily fam;
    fam.stepAt = [mapAt](int i) { return std::vector<MapAtom>{{mapAt(i), false}}; };
    fam.metricAt = std::move(metricAt);
    fam.window = window;
    return fam;
}

NsdsFamily NsdsFamily::constant(const TorusMap& map, const Mat2& metric, int window) {
    return fromMaps([map](int) { return map; },
                    [metric](int i) { return MetricTensor(metric, i); }, window);
}

Vec2 nearestLift(const MetricTensor& metric, const Vec2& delta) {
    Vec2 best = delta;
    double bestNorm = metric.inner(delta, delta);
    int bestKx = 2, bestKy = 2;
    for (int kx = -1; kx <= 1; ++kx)
        for (int ky = -1; ky <= 1; ++ky) {
            const Vec2 cand{delta.x + kx, delta.y + ky};
            const double n = metric.inner(cand, cand);
            if (n < bestNorm ||
                (n == bestNorm && (kx < bestKx || (kx == bestKx && ky < bestKy)))) {
                bestNorm = n;
                best = cand;
                bestKx = kx;
                bestKy = ky;
            }
        }
    return best;
}

double distance(const MetricTensor& metric, const TorusPoint& p, const TorusPoint& q) {
    if (p.component != q.component || p.component != metric.componentIndex)
        throw DomainError("distance: component mismatch");
    const Vec2 lift = nearestLift(metric, q.coords - p.coords);
    return metric.norm(lift);
}

double injectivityRadius(const MetricTensor& metric) {
    const auto ev = symmetricEigenvalues(metric.g);
    // any lattice vector shorter than the best axis vector satisfies
    // sqrt(lmin)*|k| <= axis norm, bounding the search box
    const double axis = std::min(std::sqrt(metric.g.a), std::sqrt(metric.g.d));
    const int K = std::max(1, int(std::ceil(axis / std::sqrt(ev[0]))));
    double best = axis;
    for (int kx = -K; kx <= K; ++kx)
        for (int ky = -K; ky <= K; ++ky) {
            if (kx == 0 && ky == 0) continue;
            best = std::min(best, metric.norm(Vec2(kx, ky)));
        }
    return 0.5 * best;
}

TorusPoint inverseMap(const TorusMap& map, const MetricTensor& metricDomain,
                      const TorusPoint& q) {
    const Mat2 ainv = map.linear().inverse();
    Vec2 x = ainv * q.coords;  // seed
    // choose the target lift nearest to the seed's image
    Vec2 y = q.coords;
    {
        const Vec2 im = map.applyLift(x);
        y.x += std::round(im.x - y.x);
        y.y += std::round(im.y - y.y);
    }
    for (int iter = 0; iter < 60; ++iter) {
        const Vec2 r = map.applyLift(x) - y;
        x = x - map.jacobian(x).inverse() * r;
        if (std::fabs(r.x) + std::fabs(r.y) < 1e-15) break;
    }
    const TorusPoint check(q.component, map.applyLift(x));
    const Vec2 lift = nearestLift(metricDomain, check.coords - q.coords);
    if (metricDomain.norm(lift) > 1e-12)
        throw InversionFailureError("inverse_map: Newton residual above 1e-12");
    return TorusPoint(q.component, x);
}

namespace {

TorusPoint applyAtom(const MapAtom& atom, const MetricTensor& domainMetric,
                     const TorusPoint& p) {
    if (!atom.inverted) return TorusPoint(p.component, atom.map.applyLift(p.coords));
    return inverseMap(atom.map, domainMetric, p);
}

}  // namespace

TorusPoint applyStep(const NsdsFamily& family, int i, const TorusPoint& p) {
    if (p.component != i) throw DomainError("applyStep: point not on component i");
    family.checkIndex(i);
    family.checkIndex(i + 1);
    TorusPoint cur = p;
    const auto chain = family.stepAt(i);
    for (const auto& atom : chain) cur = applyAtom(atom, family.metricAt(i), cur);
    return TorusPoint(i + 1, cur.coords);
}

TorusPoint invertStep(const NsdsFamily& family, int i, const TorusPoint& q) {
    if (q.component != i + 1) throw DomainError("invertStep: point not on component i+1");
    family.checkIndex(i);
    family.checkIndex(i + 1);
    TorusPoint cur = q;
    const auto chain = family.stepAt(i);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        MapAtom inv = *it;
        inv.inverted = !inv.inverted;
        cur = applyAtom(inv, family.metricAt(i), cur);
    }
    return TorusPoint(i, cur.coords);
}

Mat2 stepJacobian(const NsdsFamily& family, int i, const TorusPoint& p) {
    if (p.component != i) throw DomainError("stepJacobian: point not on component i");
    family.checkIndex(i);
    family.checkIndex(i + 1);
    Mat2 j = Mat2::identity();
    TorusPoint cur = p;
    for (const auto& atom : family.stepAt(i)) {
        if (!atom.inverted) {
            j = atom.map.jacobian(cur.coords) * j;
            cur = TorusPoint(cur.component, atom.map.applyLift(cur.coords));
        } else {
            const TorusPoint pre = inverseMap(atom.map, family.metricAt(i), cur);
            j = atom.map.jacobian(pre.coords).inverse() * j;
            cur = pre;
        }
    }
    return j;
}

TorusPoint compose(const NsdsFamily& family, int i, int n, const TorusPoint& p) {
    if (p.component != i) throw DomainError("compose: point not on component i");
    family.checkIndex(i);
    family.checkIndex(i + n);
    TorusPoint cur = p;
    if (n >= 0) {
        for (int k = 0; k < n; ++k) cur = applyStep(family, i + k, cur);
    } else {
        for (int k = 0; k < -n; ++k) cur = invertStep(family, i - k - 1, cur);
    }
    return cur;
}

Mat2 derivativeCocycle(const NsdsFamily& family, int i, int n, const TorusPoint& p) {
    if (p.component != i) throw DomainError("derivativeCocycle: point not on component i");
    family.checkIndex(i);
    family.checkIndex(i + n);
    Mat2 j = Mat2::identity();
    TorusPoint cur = p;
    if (n >= 0) {
        for (int k = 0; k < n; ++k) {
            j = stepJacobian(family, i + k, cur) * j;
            cur = applyStep(family, i + k, cur);
        }
    } else {
        for (int k = 0; k < -n; ++k) {
            const TorusPoint pre = invertStep(family, i - k - 1, cur);
            j = stepJacobian(family, i - k - 1, pre).inverse() * j;
            cur = pre;
        }
    }
    return j;
}

NsdsFamily gathering(const NsdsFamily& family, int length) {
    if (length < 1) throw ValidationError("gathering length must be >= 1");
    if (length > family.window)
        throw WindowExceededError("gathering length exceeds family window");
    if (length == 1) return family;
    NsdsFamily out;
    const NsdsFamily base = family;
    out.window = family.window / length;
    out.stepAt = [base, length](int i) {
        std::vector<MapAtom> chain;
        for (int k = 0; k < length; ++k) {
            auto sub = base.stepAt(length * i + k);
            for (auto& atom : sub) {
                // collapse consecutive pure-linear forward atoms
                if (!chain.empty() && !chain.back().inverted && chain.back().map.isLinear() &&
                    !atom.inverted && atom.map.isLinear()) {
                    const auto& A = atom.map.linearPart;
                    const auto& B = chain.back().map.linearPart;
                    std::array<std::array<int, 2>, 2> prod{};
                    for (int r = 0; r < 2; ++r)
                        for (int c = 0; c < 2; ++c)
                            prod[r][c] = A[r][0] * B[0][c] + A[r][1] * B[1][c];
                    chain.back().map = TorusMap(prod, {}, 0.0);
                } else {
                    chain.push_back(std::move(atom));
                }
            }
        }
        return chain;
    };
    out.metricAt = [base, length](int i) {
        MetricTensor m = base.metricAt(length * i);
        m.componentIndex = i;
        return m;
    };
    return out;
}

int minimalGatheringLength(double c, double lambda) {
    if (lambda <= 0.0 || lambda >= 1.0) throw ValidationError("lambda must be in (0,1)");
    int n = 1;
    while (c * std::pow(lambda, n) > lambda && n < 10000) ++n;
    return n;
}

}  // namespace anofam
