#pragma once

// Shared fixtures: the cat map A = [[2,1],[1,1]], its closed-form spectral
// data, and a perturbed variant used by the nonlinear tests.

#include <cmath>

#include "anofam/family.hpp"
#include "anofam/scenario.hpp"

namespace fixtures {

using namespace anofam;

// contracting eigenvalue (3 - sqrt 5) / 2 and its reciprocal
inline constexpr double kLambda = 0.38196601125010515;
inline constexpr double kLambdaInv = 2.6180339887498949;

// unit eigenvectors, first nonzero coordinate positive
inline Vec2 catEs() { return {0.52573111211913359, -0.85065080835203993}; }
inline Vec2 catEu() { return {0.85065080835203993, 0.52573111211913359}; }

inline TorusMap catMap() { return TorusMap({{{2, 1}, {1, 1}}}, {}, 0.0); }

inline NsdsFamily catFamily(int window = 46) {
    return NsdsFamily::constant(catMap(), Mat2::identity(), window);
}

inline TorusMap perturbedMap(double eps = 0.05) {
    PerturbationTerm t;
    t.amplitude = 1.0;
    t.freq = {1, 0};
    t.target = 0;
    t.phase = 0.0;
    return TorusMap({{{2, 1}, {1, 1}}}, {t}, eps);
}

inline NsdsFamily perturbedFamily(int window = 46, double eps = 0.05) {
    return NsdsFamily::constant(perturbedMap(eps), Mat2::identity(), window);
}

inline NsdsFamily identityFamily(int window = 10) {
    return NsdsFamily::constant(TorusMap({{{1, 0}, {0, 1}}}, {}, 0.0), Mat2::identity(),
                                window);
}

}  // namespace fixtures
