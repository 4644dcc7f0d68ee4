#pragma once

#include "weierkern/quadrature.hpp"

namespace weierkern {

struct CorrelatorResult {
    Complex det;
    double condition; // singular value ratio of the assembled matrix
    int size;
};

// Determinant correlator of n (b, c) insertion pairs for weight lambda.
// lambda = 2: rows are the n + 9 b-points, columns the n kernel columns
// K2(p, q_beta) followed by the nine weight-2 basis forms at p.
// lambda = 1: rows are the n + 3 b-points, columns the n - 1 third-kind
// columns nu_{q_j, q_n}(p) followed by the four weight-1 basis forms.
CorrelatorResult bc_correlator(const SpaceCurve& curve, int lambda,
                               const std::vector<Triple>& b_points,
                               const std::vector<Triple>& c_points);

// Relative determinant shift under adding sum_i c_i * phi_i(p) * A_i(q) to
// every kernel column, which lies in the span of the basis columns.
double spurious_invariance_delta(const SpaceCurve& curve, int lambda,
                                 const std::vector<Triple>& b_points,
                                 const std::vector<Triple>& c_points,
                                 const std::array<Complex, 4>& shift);

struct GreenResult {
    Complex raw_det;          // 5x5 determinant
    Complex gram_det;         // 4x4 inner product block
    Complex normalized;       // raw_det / gram_det
    std::array<double, 4> period_residuals; // |(i/2) int G wedge conj(omega_k)|
    Complex residue_ratio;    // residue of G at q over residue at q'
    double condition;
};

// Green function of the scalar field as a 5x5 determinant: first row
// [nu_{q,q'}(p), omega_1..4(p)], remaining rows the pairings of nu and
// omega_j against conj(omega_i).
GreenResult green_function(const SpaceCurve& curve, const Triple& p,
                           const Triple& q, const Triple& qp,
                           const GridConfig& config = {});

} // namespace weierkern
