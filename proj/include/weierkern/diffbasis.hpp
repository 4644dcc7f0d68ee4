#pragma once

#include "weierkern/kernel.hpp"

#include <vector>

namespace weierkern {

// Holomorphic form numerator / (J^1)^weight against (dx1)^weight.
struct BasisElement {
    MultiPoly numerator;
    int weight;
};

// weight 1: numerators 1, x1, x2, x3 (the four holomorphic 1-forms);
// weight 2: 1, x1, x2, x3, x1^2, x2^2, x3^2, x1*x2, x1*x3 (nine quadratic
// forms; x2*x3 is omitted since it equals x1 on the family g = x2 x3 - x1).
std::vector<BasisElement> holomorphic_basis(const SpaceCurve& curve, int weight);

DifferentialValue basis_eval(const SpaceCurve& curve, const BasisElement& elem,
                             const Triple& x);

} // namespace weierkern
