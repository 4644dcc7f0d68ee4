#pragma once

#include "weierkern/curve.hpp"
#include "weierkern/kernel.hpp"

#include <functional>

namespace weierkern {

// Coefficient of the form against dx1 at a curve point, affine chart.
using FormFn = std::function<DifferentialValue(const CurvePoint&)>;

struct ContourSpec {
    Complex center;
    double radius = 1e-2;
    int nodes = 64;
    Chart chart = Chart::Affine; // Infinity: circle in t with x1 = 1/t
    Triple anchor{};             // sheet selector, continued onto the circle
    int max_turns = 12;
    double tol = 1e-8;
};

// (1/2 pi i) of the form around the circle, following the anchored sheet
// until the lift closes (up to max_turns). Node-doubled; throws convergence
// if the doubled estimate moves by more than 10 * tol.
Complex contour_residue(const SpaceCurve& curve, const FormFn& form, const ContourSpec& spec);

// Laurent coefficient c_k of the form's dx1 coefficient about the center in
// the chart coordinate; requires the lift to close after one turn.
Complex laurent_coeff(const SpaceCurve& curve, const FormFn& form, const ContourSpec& spec,
                      int k);

// Largest j in 1..6 with |c_{-j}| >= tol * max|F| on the contour, 0 if all
// vanish; throws convergence if c_{-7} is also above threshold.
int pole_order(const SpaceCurve& curve, const FormFn& form, const ContourSpec& spec);

// Plain single-valued complex-plane versions, for integrands off the curve.
Complex contour_residue_plain(const std::function<Complex(Complex)>& fn,
                              Complex center, double radius, int nodes = 64);
Complex laurent_coeff_plain(const std::function<Complex(Complex)>& fn,
                            Complex center, double radius, int k, int nodes = 64);

} // namespace weierkern
