#pragma once

#include "weierkern/curve.hpp"

#include <string>
#include <vector>

namespace weierkern {

struct CheckResult {
    std::string name;
    bool passed;
    std::string detail;
};

// Seeded invariant suite over a space curve: kernel residues, variant
// agreement, near-coincidence limits, basis holomorphy, determinant
// structure. Cheap enough for routine use; surface integrals are exercised
// separately.
std::vector<CheckResult> selftest(const SpaceCurve& curve, unsigned seed);

} // namespace weierkern
