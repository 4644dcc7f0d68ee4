#pragma once

#include "weierkern/localanalysis.hpp"

#include <utility>
#include <vector>

namespace weierkern {

struct GridConfig {
    int base_cells = 16;        // polar cells per direction on each unit-disc chart
    int max_depth = 8;
    double target_rel_error = 1e-4;
    double exclusion_radius = 3e-3; // disk removed around each singular base point
};

struct QuadratureResult {
    Complex value;
    double est_error;
    long cells;
    bool converged;
};

// Base points to excise, per chart coordinate (affine x1, infinity t = 1/x1).
struct SingularitySet {
    std::vector<Complex> affine;
    std::vector<Complex> infinity;
};

// (i/2) int a_i wedge conj(b_j) over the surface for each requested (i, j)
// pair, summing all sheets. The surface is covered by the two unit discs
// |x1| <= 1 and |t| <= 1; every form is evaluated once per node.
std::vector<QuadratureResult> surface_integral_multi(
    const SpaceCurve& curve,
    const std::vector<FormFn>& forms_a,
    const std::vector<FormFn>& forms_b,
    const std::vector<std::pair<int, int>>& pairs,
    const SingularitySet& exclusions,
    const GridConfig& config = {});

QuadratureResult surface_integral(const SpaceCurve& curve,
                                  const FormFn& a, const FormFn& b,
                                  const SingularitySet& exclusions,
                                  const GridConfig& config = {});

struct McConfig {
    long samples = 4'000'000;
    double epsilon = 1e-3; // width of the Gaussian surface delta
    unsigned seed = 1;
    int strata = 64; // fixed independent streams, summed in index order
};

// Same pairing by importance-sampled Monte Carlo with a Gaussian concentrated
// on the curve; exact for the J^1 weight cancellation of weight-1 forms.
QuadratureResult mc_surface_integral(const SpaceCurve& curve,
                                     const FormFn& a, const FormFn& b,
                                     const McConfig& config = {});

} // namespace weierkern
