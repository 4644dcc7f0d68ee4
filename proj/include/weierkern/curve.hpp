#pragma once

#include "weierkern/poly.hpp"

#include <array>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace weierkern {

using Triple = std::array<Complex, 3>;

enum class Chart { Affine, Infinity };

struct CurvePoint {
    Triple x;
    double residual; // max(|f|, |g|) at x
};

struct FiberResult {
    std::vector<CurvePoint> points;
    bool degenerate; // multiple roots merged or fewer points than expected
};

struct BranchPoint {
    Complex x1;
    int multiplicity; // sheet collisions above x1, counted as sum of (cluster size - 1)
};

struct InfinityPoint {
    std::array<Complex, 4> xi; // homogeneous [x1:x2:x3:xi0], largest entry scaled to 1
    int multiplicity;
};

struct SmoothnessReport {
    bool passed;
    int samples;
    double worst_ratio;                  // smallest sigma_min/sigma_max seen
    std::optional<std::array<Complex, 4>> worst_point;
};

struct PathSpec {
    Chart chart = Chart::Affine;
    std::vector<Complex> waypoints; // base coordinates, straight segments between
    double max_step = 0.05;
};

// Genus of a smooth complete intersection of degrees (dF, dG) in projective
// 3-space: 2g - 2 = dF*dG*(dF + dG - 4).
int genus_complete_intersection(int deg_f, int deg_g);

class SpaceCurve {
public:
    // f, g are 3-variable polynomials in x1, x2, x3.
    SpaceCurve(MultiPoly f, MultiPoly g, double tolerance = 1e-9);

    const MultiPoly& f() const { return f_; }
    const MultiPoly& g() const { return g_; }
    int deg_f() const { return deg_f_; }
    int deg_g() const { return deg_g_; }
    double tolerance() const { return tol_; }
    int genus() const;

    // Largest coefficient magnitude over f and g, used to scale residual tests.
    double coeff_scale() const { return scale_; }
    double on_curve_tol() const;

    // J^i = eps^{ikl} df/dx_k dg/dx_l with eps^{123} = 1.
    Triple jacobian_vector(const Triple& x) const;
    Complex j1(const Triple& x) const;

    std::array<Complex, 2> evaluate(const Triple& x) const; // {f(x), g(x)}
    double residual(const Triple& x) const;

    // Newton-polishes (x2, x3) at fixed x1 onto f = g = 0 and checks the
    // residual; throws if the iteration stalls off the curve.
    CurvePoint make_point(const Triple& approx) const;

    // All points of the curve above x1 = a (chart Infinity: above 1/t = a,
    // i.e. t = a is the base coordinate on the second chart).
    FiberResult fiber(Complex a, Chart chart = Chart::Affine) const;

    // Analytic continuation of a fiber point along a base path; predictor
    // steps use the implicit-function derivative, corrector is 2x2 Newton.
    CurvePoint continue_point(const CurvePoint& start, const PathSpec& path) const;

    std::vector<BranchPoint> branch_points() const;
    std::vector<InfinityPoint> points_at_infinity() const;

    // Samples random points on the homogenized curve and checks the 2x4
    // Jacobian has two singular values with ratio at least min_ratio.
    SmoothnessReport smoothness_check(int samples = 200, unsigned seed = 7,
                                      double min_ratio = 1e-7) const;

private:
    MultiPoly f_, g_;
    MultiPoly fx_[3], gx_[3]; // first partials
    MultiPoly eliminant_;     // res_{x2}(f, g), univariate family in (x1, x3)
    int deg_f_, deg_g_;
    double tol_;
    double scale_;

    // terms grouped by the exponent pair on (x2, x3) with the x1 dependence
    // kept as ascending scalar coefficients; fixing x1 in a fiber computation
    // then needs only Horner evaluations, no polynomial construction
    struct FixedTerm {
        int e2, e3;
        std::vector<Complex> cx1;
    };
    std::vector<FixedTerm> fparts_, gparts_;
    std::vector<std::vector<Complex>> elim_cols_; // x1 coefficients of each x3 power
};

class PlaneCurve {
public:
    // f is a 2-variable polynomial in x1, x2.
    PlaneCurve(MultiPoly f, double tolerance = 1e-9);

    const MultiPoly& f() const { return f_; }
    double tolerance() const { return tol_; }
    double coeff_scale() const { return scale_; }
    double on_curve_tol() const;

    std::vector<Complex> fiber(Complex x1) const; // x2 values with f(x1, x2) = 0
    bool smooth_at(Complex x1, Complex x2) const; // gradient does not vanish

private:
    MultiPoly f_;
    MultiPoly f1_, f2_;
    double tol_;
    double scale_;
};

// y^2 = P(x) with P given through the symmetric coefficient array A of length
// 2g + 3: R(x, x') = sum_k A_{2k} (x x')^k + (1/2) A_{2k+1} (x + x')(x x')^k,
// so that R(x, x) = P(x).
class HyperellipticCurve {
public:
    explicit HyperellipticCurve(std::vector<double> a);

    const std::vector<double>& a() const { return a_; }
    int genus() const;

    Complex p(Complex x) const;            // P(x) = R(x, x)
    Complex r(Complex x, Complex xp) const;
    Complex y(Complex x, int sheet) const; // sheet in {+1, -1} picks the root branch

private:
    std::vector<double> a_;
};

// Coefficient table of the genus-4 family: g = x2*x3 - x1 and
// f = x3^3 + h1(x1,x2) x3^2 + h2(x1,x2) x3 + h3(x1,x2) with
// h_i = sum a^{(i)}_{kl} x1^k x2^l over k + l <= 3.
struct Genus4View {
    MultiPoly h[3]; // h1, h2, h3 as 3-variable polynomials constant in x3
    Complex coeff(int i, int k, int l) const; // a^{(i)}_{kl}, i in 1..3
};

// Builds f for the genus-4 family from (i, k, l, value) coefficient entries.
MultiPoly genus4_f(const std::vector<std::tuple<int, int, int, Complex>>& entries);
MultiPoly genus4_g();

// Recognizes the family shape above; empty if f or g does not match.
std::optional<Genus4View> genus4_view(const SpaceCurve& curve);

} // namespace weierkern
