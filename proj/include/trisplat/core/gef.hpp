#pragma once

#include <cmath>

#include "trisplat/core/math.hpp"

// Generalized exponential falloff over triangle eccentricity, and the
// integral identities it satisfies. gamma >= 1 everywhere.

namespace trisplat {

// Eccentricity from barycentric coordinates: 0 at the centroid, 1 on the
// triangle boundary, > 1 outside.
inline double eccentricity(double a1, double a2, double a3) {
    double amin = a1 < a2 ? (a1 < a3 ? a1 : a3) : (a2 < a3 ? a2 : a3);
    double e = 1.0 - 3.0 * amin;
    return e > 0.0 ? e : 0.0;
}

// Falloff weight exp(-e^(2*gamma) / 2); equals 1 at the centroid and decays
// to an indicator of the triangle as gamma grows.
inline double gef_weight(double ecc, double gamma) {
    double t = ts_pow_pos(ecc, 2.0 * gamma);
    return ts_exp(-0.5 * t);
}

// Per-pixel opacity before the blend clamp.
inline double gef_opacity(double a1, double a2, double a3, double opacity, double gamma) {
    return opacity * gef_weight(eccentricity(a1, a2, a3), gamma);
}

// Integral of the falloff opacity over the whole plane for a triangle of
// area S: S * O * 2^(1/gamma) * Gamma(1/gamma) / gamma.
inline double opacity_integral(double area, double opacity, double gamma) {
    double inv_g = 1.0 / gamma;
    return area * opacity * std::pow(2.0, inv_g) * std::tgamma(inv_g) / gamma;
}

// Linear factor applied to the barycenter-to-vertex offsets so the opacity
// integral is gamma-invariant: sqrt(gamma / (2^(1/gamma) * Gamma(1/gamma))).
// Monotonically increasing in gamma, -> 1 as gamma -> inf.
inline double scale_compensation_factor(double gamma) {
    double inv_g = 1.0 / gamma;
    return std::sqrt(gamma / (std::pow(2.0, inv_g) * std::tgamma(inv_g)));
}

// Largest eccentricity whose falloff opacity can still reach `cutoff` for a
// primitive of opacity O: e = (2 ln(O / cutoff))^(1 / (2*gamma)).
// Returns 0 if the primitive can never reach the cutoff.
inline double eccentricity_reach(double opacity, double gamma, double cutoff) {
    if (!(opacity > cutoff)) return 0.0;
    double t = 2.0 * std::log(opacity / cutoff);
    return std::pow(t, 1.0 / (2.0 * gamma));
}

}  // namespace trisplat
