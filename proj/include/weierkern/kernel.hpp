#pragma once

#include "weierkern/curve.hpp"

namespace weierkern {

// Coefficient of (dx1)^weight at a point, always in the affine chart; contour
// and surface integrators apply chart transformations themselves.
struct DifferentialValue {
    Complex coeff;
    int weight = 1;
};

enum class KernelVariant { Symmetric, Compact, BranchedCover, Genus4 };

KernelVariant parse_variant(const std::string& name); // "sym", "compact", "cover", "g4"
std::string variant_name(KernelVariant v);

// N^1 = f(y1,y2,x3) g(x1,y2,x3) - f(x1,y2,x3) g(y1,y2,x3), and the two
// cyclic companions; i is 1-based.
Complex kernel_numerator(const SpaceCurve& curve, int i, const Triple& x, const Triple& y);

// Kernel coefficient K(x, y) against dx1. Both points must lie on the curve.
// Pairs sharing one or two coordinates are evaluated through divided
// difference limits; full coincidence throws math_domain.
DifferentialValue kernel_eval(const SpaceCurve& curve, KernelVariant variant,
                              const Triple& x, const Triple& y);

// nu_{y,y'} = K(., y) - K(., y'), third kind: residue +1 at y, -1 at y'.
DifferentialValue third_kind(const SpaceCurve& curve, KernelVariant variant,
                             const Triple& x, const Triple& y, const Triple& yp);

// K2(x, y) = K_g4(x, y)/J^1(x), a (1,0)-form of weight 2 in x.
DifferentialValue quadratic_kernel(const SpaceCurve& curve, const Triple& x, const Triple& y);

// P with K_g4(x,y) = P(x,y)/(J^1(x) (x1 - y1)) dx1, as a polynomial in x for
// fixed y on the curve.
MultiPoly genus4_p_poly(const SpaceCurve& curve, const Triple& y);

// Large-y1 coefficients: K_g4(x, y) ~ sum_i omega_i(x) A_i(y) with
// omega_i = (1, x1, x2, x3) dx1 / J^1.
std::array<Complex, 4> asymptotic_coeffs(const Genus4View& view, const Triple& y);

// Weierstrass kernel of a plane curve f(x1, x2) = 0:
// K = f(y1, x2) dx1 / ((x2 - y2) f^{(0,1)}(x1, x2) (x1 - y1)).
DifferentialValue plane_weierstrass(const PlaneCurve& curve,
                                    Complex x1, Complex x2, Complex y1, Complex y2);

// tau(x, x') on y^2 = P(x): -(y y' + R(x, x')) / (2 (x - x')^2 y y') dx,
// with sheet signs picking the y branches.
DifferentialValue hyperelliptic_tau(const HyperellipticCurve& curve,
                                    Complex x, int sheet_x, Complex xp, int sheet_xp);

} // namespace weierkern
