#pragma once
#include <algorithm>
#include <cmath>
#include <numbers>

#include "capdrop/equilibrium.hpp"

namespace capdrop::testing {

inline constexpr double kPi = std::numbers::pi;

inline PhysicalParams flat_params() {
    PhysicalParams p;
    p.volume = kPi;
    return p;
}

// g = 0, [[gamma]] = -sigma/2, volume of the unit-radius arc
inline PhysicalParams cap_params() {
    PhysicalParams p;
    p.gamma_jump = -0.5;
    const double c = 0.5;
    p.volume = 2.0 * (kPi - std::acos(c) + c * std::sqrt(1.0 - c * c));
    return p;
}

inline PhysicalParams g1_params() {
    PhysicalParams p;
    p.g = 1.0;
    p.gamma_jump = -0.3;
    p.volume = kPi;
    return p;
}

inline SurfaceProfile constant(const AngularGrid& g, double r) { return SurfaceProfile(g, Field(g.size(), r)); }

inline double sup_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

inline double sup_abs(const Field& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

// shooting solutions are cheap; cache the ones used by several cases
inline const EquilibriumSolution& g1_shot(int n) {
    static const EquilibriumSolution s400 = shoot_symmetric(g1_params(), 400);
    static const EquilibriumSolution s800 = shoot_symmetric(g1_params(), 800);
    return n == 800 ? s800 : s400;
}

}  // namespace capdrop::testing
