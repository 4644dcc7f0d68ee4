#pragma once

#include "weierkern/poly.hpp"

#include <vector>

namespace weierkern {

Complex horner(const std::vector<Complex>& coeffs, Complex z);
Complex horner_derivative(const std::vector<Complex>& coeffs, Complex z);

// Divided difference [h(a) - h(b)]/(a - b) of the polynomial with ascending
// coefficients c, computed without dividing; continuous at a == b where it
// equals h'(a).
Complex divided_difference(const std::vector<Complex>& c, Complex a, Complex b);

// All roots of the dense univariate polynomial with ascending coefficients.
// Leading coefficients below lead_tol relative to the largest magnitude are
// stripped first; companion-matrix eigenvalues are Newton-polished where the
// derivative allows. Throws on the zero polynomial.
std::vector<Complex> univariate_roots(const std::vector<Complex>& coeffs,
                                      double lead_tol = 1e-12);

struct Cluster {
    Complex center;
    int multiplicity;
};

// Single-linkage grouping of points closer than tol; centers are cluster
// means, deterministic order by (argument, magnitude) of the center.
std::vector<Cluster> cluster_points(const std::vector<Complex>& pts, double tol);

} // namespace weierkern
