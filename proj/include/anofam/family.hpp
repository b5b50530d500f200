#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "anofam/errors.hpp"
#include "anofam/linalg.hpp"

namespace anofam {

// Reduce a real number into the fundamental domain [0, 1).
inline double wrap01(double x) {
    double r = x - std::floor(x);
    if (r >= 1.0) r = 0.0;  // guard against floor(1-eps) rounding
    return r;
}

// A point on the flat 2-torus of component `component`, coords in [0,1)^2.
struct TorusPoint {
    int component = 0;
    Vec2 coords;

    TorusPoint() = default;
    TorusPoint(int comp, double x, double y) : component(comp), coords(wrap01(x), wrap01(y)) {}
    TorusPoint(int comp, const Vec2& v) : component(comp), coords(wrap01(v.x), wrap01(v.y)) {}
};

// Constant symmetric positive-definite metric tensor on one component.
struct MetricTensor {
    Mat2 g = Mat2::identity();
    int componentIndex = 0;

    MetricTensor() = default;
    MetricTensor(const Mat2& tensor, int comp);

    double inner(const Vec2& u, const Vec2& v) const { return dot(u, g * v); }
    double norm(const Vec2& v) const { return std::sqrt(inner(v, v)); }
    Vec2 normalized(const Vec2& v) const { return v * (1.0 / norm(v)); }
};

// One trigonometric perturbation term: adds
//   amplitude * sin(2*pi*(k . x) + phase)
// to coordinate `target` of the image.
struct PerturbationTerm {
    double amplitude = 0.0;
    std::array<int, 2> freq = {0, 0};
    int target = 0;  // 0 or 1
    double phase = 0.0;
};

// Torus diffeomorphism z -> A z + epsilon * P(z) (mod 1), with A an integer
// matrix of determinant +-1 and P a finite ZZ^2-periodic trigonometric sum.
struct TorusMap {
    std::array<std::array<int, 2>, 2> linearPart = {{{1, 0}, {0, 1}}};
    std::vector<PerturbationTerm> perturbations;
    double epsilon = 0.0;

    TorusMap() = default;
    TorusMap(std::array<std::array<int, 2>, 2> A, std::vector<PerturbationTerm> terms,
             double eps);

    Mat2 linear() const {
        return Mat2(linearPart[0][0], linearPart[0][1], linearPart[1][0], linearPart[1][1]);
    }
    bool isLinear() const { return epsilon == 0.0 || perturbations.empty(); }

    // Evaluate on a lift (no mod-1 reduction); periodic in the perturbation.
    Vec2 applyLift(const Vec2& x) const;
    Mat2 jacobian(const Vec2& x) const;

    // sup over the torus of the Euclidean operator norm of D(P); analytic
    // bound sum |amp| * 2*pi * |k|.
    double perturbationGradBound() const;
};

// One step of a family: a chain of maps applied left to right, each possibly
// inverted. Composition of steps (gathering, reflected-inverse families)
// concatenates chains instead of requiring a closed-form composite.
struct MapAtom {
    TorusMap map;
    bool inverted = false;
};

// Two-sided family f = (f_i) on a window [-N, N] of components, each a flat
// 2-torus with its own constant metric. stepAt(i) yields the chain realizing
// f_i : M_i -> M_{i+1}; generators must be deterministic.
struct NsdsFamily {
    std::function<std::vector<MapAtom>(int)> stepAt;
    std::function<MetricTensor(int)> metricAt;
    int window = 0;

    static NsdsFamily fromMaps(std::function<TorusMap(int)> mapAt,
                               std::function<MetricTensor(int)> metricAt, int window);
    // Constant family: the same map and metric on every component.
    static NsdsFamily constant(const TorusMap& map, const Mat2& metric, int window);

    void checkIndex(int i) const {
        if (i < -window || i > window)
            throw WindowExceededError("index " + std::to_string(i) +
                                      " outside window [-" + std::to_string(window) + ", " +
                                      std::to_string(window) + "]");
    }
};

// --- family-core operations ---------------------------------------------

// Nearest lift of the displacement q - p under metric g: the representative
// minimizing the g-norm over integer translates in {-1,0,1}^2, ties toward
// the lexicographically smaller lattice vector.
Vec2 nearestLift(const MetricTensor& metric, const Vec2& delta);

// Riemannian distance on the flat torus.
double distance(const MetricTensor& metric, const TorusPoint& p, const TorusPoint& q);

// Half the g-norm of the shortest nonzero lattice vector.
double injectivityRadius(const MetricTensor& metric);

// Newton inversion of a single map; residual measured in the domain metric.
TorusPoint inverseMap(const TorusMap& map, const MetricTensor& metricDomain,
                      const TorusPoint& q);

// Apply one step of the family (p on component i -> component i+1).
TorusPoint applyStep(const NsdsFamily& family, int i, const TorusPoint& p);
// Invert one step (q on component i+1 -> component i).
TorusPoint invertStep(const NsdsFamily& family, int i, const TorusPoint& q);
// Derivative of one step at p (coordinate basis).
Mat2 stepJacobian(const NsdsFamily& family, int i, const TorusPoint& p);

// n-th composition f_i^n(p); n may be negative (inverse branch).
TorusPoint compose(const NsdsFamily& family, int i, int n, const TorusPoint& p);

// Chain-rule product D(f_i^n)_p; identity for n = 0.
Mat2 derivativeCocycle(const NsdsFamily& family, int i, int n, const TorusPoint& p);

// Gathering: block-composed family g_i = f_{length*i}^{length}, metrics
// resampled at multiples of `length`; window shrinks to N/length.
// Consecutive linear atoms collapse to their matrix product.
NsdsFamily gathering(const NsdsFamily& family, int length);

// Least n with c * lambda^n <= lambda (strict-Anosov gathering length).
int minimalGatheringLength(double c, double lambda);

}  // namespace anofam
