#include "weierkern/kernel.hpp"

#include "weierkern/errors.hpp"
#include "weierkern/rootfind.hpp"

#include <algorithm>
#include <cmath>

namespace weierkern {

namespace {

Complex ev(const MultiPoly& h, Complex a, Complex b, Complex c) {
    return h.eval({a, b, c});
}

// ascending coefficients of h along one slot with the other two fixed;
// slot order of the fixed pair follows increasing variable index
std::vector<Complex> slot_coeffs(const MultiPoly& h, int freeslot, Complex lo, Complex hi) {
    int lo_slot = freeslot == 0 ? 1 : 0;
    int hi_slot = freeslot == 2 ? 1 : 2;
    MultiPoly s = h.substitute(lo_slot, lo).substitute(hi_slot, hi);
    std::vector<Complex> c = s.univariate_coeffs(freeslot);
    if (c.empty()) c.push_back(0.0);
    return c;
}

struct PairGeometry {
    Triple x, y;
    Triple d;        // x - y componentwise
    double near_tol; // below this a difference counts as a coincidence
    double exact_tol; // below this residual-over-difference terms are dropped
};

// residual-ratio term r/d, dropped when d is below the exact threshold
Complex over(Complex r, Complex d, const PairGeometry& geo) {
    if (std::abs(d) < geo.exact_tol) return 0.0;
    return r / d;
}

} // namespace

KernelVariant parse_variant(const std::string& name) {
    if (name == "sym") return KernelVariant::Symmetric;
    if (name == "compact") return KernelVariant::Compact;
    if (name == "cover") return KernelVariant::BranchedCover;
    if (name == "g4") return KernelVariant::Genus4;
    throw_usage("unknown kernel variant '" + name + "'");
}

std::string variant_name(KernelVariant v) {
    switch (v) {
        case KernelVariant::Symmetric: return "sym";
        case KernelVariant::Compact: return "compact";
        case KernelVariant::BranchedCover: return "cover";
        case KernelVariant::Genus4: return "g4";
    }
    return "?";
}

Complex kernel_numerator(const SpaceCurve& curve, int i, const Triple& x, const Triple& y) {
    const MultiPoly& f = curve.f();
    const MultiPoly& g = curve.g();
    switch (i) {
        case 1:
            return ev(f, y[0], y[1], x[2]) * ev(g, x[0], y[1], x[2]) -
                   ev(f, x[0], y[1], x[2]) * ev(g, y[0], y[1], x[2]);
        case 2:
            return ev(f, x[0], y[1], y[2]) * ev(g, x[0], x[1], y[2]) -
                   ev(f, x[0], x[1], y[2]) * ev(g, x[0], y[1], y[2]);
        case 3:
            return ev(f, y[0], x[1], y[2]) * ev(g, y[0], x[1], x[2]) -
                   ev(f, y[0], x[1], x[2]) * ev(g, y[0], x[1], y[2]);
        default:
            throw_usage("numerator index must be 1, 2 or 3");
    }
}

namespace {

// N^1 over the product of the d_i with i in小 set, written through divided
// differences so every coincident difference has a finite limit built in.
// Slot 1 is the swap slot of N^1; slots 2 and 3 enter through substitution.
class N1Eval {
public:
    N1Eval(const SpaceCurve& curve, const PairGeometry& geo)
        : f_(curve.f()), g_(curve.g()), geo_(geo) {}

    Complex plain() const {
        const Triple &x = geo_.x, &y = geo_.y;
        return ev(f_, y[0], y[1], x[2]) * ev(g_, x[0], y[1], x[2]) -
               ev(f_, x[0], y[1], x[2]) * ev(g_, y[0], y[1], x[2]);
    }

    // N^1 / d1 by the swap identity v(y1) u(x1) - v(x1) u(y1)
    Complex over1(const MultiPoly& f, const MultiPoly& g) const {
        const Triple &x = geo_.x, &y = geo_.y;
        auto u = slot_coeffs(g, 0, y[1], x[2]);
        auto v = slot_coeffs(f, 0, y[1], x[2]);
        return horner(v, y[0]) * divided_difference(u, x[0], y[0]) -
               divided_difference(v, x[0], y[0]) * horner(u, y[0]);
    }
    Complex over1() const { return over1(f_, g_); }

    Complex over2() const {
        const Triple &x = geo_.x, &y = geo_.y;
        Complex dd_g = divided_difference(slot_coeffs(g_, 1, x[0], x[2]), y[1], x[1]);
        Complex dd_f = divided_difference(slot_coeffs(f_, 1, x[0], x[2]), y[1], x[1]);
        Complex gx = over(ev(g_, x[0], x[1], x[2]), geo_.d[1], geo_);
        Complex fx = over(ev(f_, x[0], x[1], x[2]), geo_.d[1], geo_);
        return ev(f_, y[0], y[1], x[2]) * (gx - dd_g) - (fx - dd_f) * ev(g_, y[0], y[1], x[2]);
    }

    Complex over3() const {
        const Triple &x = geo_.x, &y = geo_.y;
        Complex dd_f = divided_difference(slot_coeffs(f_, 2, y[0], y[1]), x[2], y[2]);
        Complex dd_g = divided_difference(slot_coeffs(g_, 2, y[0], y[1]), x[2], y[2]);
        Complex fy = over(ev(f_, y[0], y[1], y[2]), geo_.d[2], geo_);
        Complex gy = over(ev(g_, y[0], y[1], y[2]), geo_.d[2], geo_);
        return (fy + dd_f) * ev(g_, x[0], y[1], x[2]) - ev(f_, x[0], y[1], x[2]) * (gy + dd_g);
    }

    Complex over23() const {
        const Triple &x = geo_.x, &y = geo_.y;
        Complex p = divided_difference(slot_coeffs(f_, 2, y[0], y[1]), x[2], y[2]);
        Complex s = divided_difference(slot_coeffs(g_, 2, y[0], y[1]), x[2], y[2]);
        Complex q = divided_difference(slot_coeffs(g_, 1, x[0], x[2]), y[1], x[1]);
        Complex r = divided_difference(slot_coeffs(f_, 1, x[0], x[2]), y[1], x[1]);
        Complex fy = over(ev(f_, y[0], y[1], y[2]), geo_.d[2], geo_);
        Complex gy = over(ev(g_, y[0], y[1], y[2]), geo_.d[2], geo_);
        Complex fx = over(ev(f_, x[0], x[1], x[2]), geo_.d[1], geo_);
        Complex gx = over(ev(g_, x[0], x[1], x[2]), geo_.d[1], geo_);
        return (fy + p) * (gx - q) - (fx - r) * (gy + s);
    }

    // N^1 / (d1 d2); the d2 -> 0 limit differentiates the swap factors in x2
    Complex over12() const {
        if (std::abs(geo_.d[1]) >= geo_.exact_tol) return over1() / geo_.d[1];
        return -(over1(f_.partial(1), g_) + over1(f_, g_.partial(1)));
    }

    Complex over13() const {
        if (std::abs(geo_.d[2]) >= geo_.exact_tol) return over1() / geo_.d[2];
        return over1(f_.partial(2), g_) + over1(f_, g_.partial(2));
    }

private:
    const MultiPoly& f_;
    const MultiPoly& g_;
    const PairGeometry& geo_;
};

// N^2: swap slot 2, substitution slots 1 (factors degenerate to f(y), g(y))
// and 3 (factors degenerate to f(x), g(x)).
class N2Eval {
public:
    N2Eval(const SpaceCurve& curve, const PairGeometry& geo)
        : f_(curve.f()), g_(curve.g()), geo_(geo) {}

    Complex plain() const {
        const Triple &x = geo_.x, &y = geo_.y;
        return ev(f_, x[0], y[1], y[2]) * ev(g_, x[0], x[1], y[2]) -
               ev(f_, x[0], x[1], y[2]) * ev(g_, x[0], y[1], y[2]);
    }

    Complex over2(const MultiPoly& f, const MultiPoly& g) const {
        const Triple &x = geo_.x, &y = geo_.y;
        auto u = slot_coeffs(g, 1, x[0], y[2]);
        auto v = slot_coeffs(f, 1, x[0], y[2]);
        return horner(v, y[1]) * divided_difference(u, x[1], y[1]) -
               divided_difference(v, x[1], y[1]) * horner(u, y[1]);
    }
    Complex over2() const { return over2(f_, g_); }

    Complex over1() const {
        const Triple &x = geo_.x, &y = geo_.y;
        Complex dd_f = divided_difference(slot_coeffs(f_, 0, y[1], y[2]), x[0], y[0]);
        Complex dd_g = divided_difference(slot_coeffs(g_, 0, y[1], y[2]), x[0], y[0]);
        Complex fy = over(ev(f_, y[0], y[1], y[2]), geo_.d[0], geo_);
        Complex gy = over(ev(g_, y[0], y[1], y[2]), geo_.d[0], geo_);
        return (fy + dd_f) * ev(g_, x[0], x[1], y[2]) - ev(f_, x[0], x[1], y[2]) * (gy + dd_g);
    }

    Complex over3() const {
        const Triple &x = geo_.x, &y = geo_.y;
        Complex dd_g = divided_difference(slot_coeffs(g_, 2, x[0], x[1]), y[2], x[2]);
        Complex dd_f = divided_difference(slot_coeffs(f_, 2, x[0], x[1]), y[2], x[2]);
        Complex gx = over(ev(g_, x[0], x[1], x[2]), geo_.d[2], geo_);
        Complex fx = over(ev(f_, x[0], x[1], x[2]), geo_.d[2], geo_);
        return ev(f_, x[0], y[1], y[2]) * (gx - dd_g) - (fx - dd_f) * ev(g_, x[0], y[1], y[2]);
    }

    Complex over13() const {
        const Triple &x = geo_.x, &y = geo_.y;
        Complex p = divided_difference(slot_coeffs(f_, 0, y[1], y[2]), x[0], y[0]);
        Complex s = divided_difference(slot_coeffs(g_, 0, y[1], y[2]), x[0], y[0]);
        Complex q = divided_difference(slot_coeffs(g_, 2, x[0], x[1]), y[2], x[2]);
        Complex r = divided_difference(slot_coeffs(f_, 2, x[0], x[1]), y[2], x[2]);
        Complex fy = ev(f_, y[0], y[1], y[2]), gy = ev(g_, y[0], y[1], y[2]);
        Complex fx = ev(f_, x[0], x[1], x[2]), gx = ev(g_, x[0], x[1], x[2]);
        Complex cross = 0.0;
        if (std::abs(geo_.d[0]) >= geo_.exact_tol && std::abs(geo_.d[2]) >= geo_.exact_tol)
            cross = (fy * gx - fx * gy) / (geo_.d[0] * geo_.d[2]);
        Complex t1 = 0.0;
        if (std::abs(geo_.d[2]) >= geo_.exact_tol)
            t1 = (p * gx - fx * s) / geo_.d[2];
        Complex t2 = 0.0;
        if (std::abs(geo_.d[0]) >= geo_.exact_tol)
            t2 = -(fy * q - r * gy) / geo_.d[0];
        return cross + t1 + t2 - (p * q - r * s);
    }

    Complex over12() const {
        if (std::abs(geo_.d[0]) >= geo_.exact_tol) return over2() / geo_.d[0];
        return over2(f_.partial(0), g_) + over2(f_, g_.partial(0));
    }

    Complex over23() const {
        if (std::abs(geo_.d[2]) >= geo_.exact_tol) return over2() / geo_.d[2];
        return -(over2(f_.partial(2), g_) + over2(f_, g_.partial(2)));
    }

private:
    const MultiPoly& f_;
    const MultiPoly& g_;
    const PairGeometry& geo_;
};

// N^3: swap slot 3, substitution slots 1 (factors degenerate to f(x), g(x))
// and 2 (factors degenerate to f(y), g(y)).
class N3Eval {
public:
    N3Eval(const SpaceCurve& curve, const PairGeometry& geo)
        : f_(curve.f()), g_(curve.g()), geo_(geo) {}

    Complex plain() const {
        const Triple &x = geo_.x, &y = geo_.y;
        return ev(f_, y[0], x[1], y[2]) * ev(g_, y[0], x[1], x[2]) -
               ev(f_, y[0], x[1], x[2]) * ev(g_, y[0], x[1], y[2]);
    }

    Complex over3(const MultiPoly& f, const MultiPoly& g) const {
        const Triple &x = geo_.x, &y = geo_.y;
        auto u = slot_coeffs(g, 2, y[0], x[1]);
        auto v = slot_coeffs(f, 2, y[0], x[1]);
        return horner(v, y[2]) * divided_difference(u, x[2], y[2]) -
               divided_difference(v, x[2], y[2]) * horner(u, y[2]);
    }
    Complex over3() const { return over3(f_, g_); }

    Complex over1() const {
        const Triple &x = geo_.x, &y = geo_.y;
        Complex dd_g = divided_difference(slot_coeffs(g_, 0, x[1], x[2]), y[0], x[0]);
        Complex dd_f = divided_difference(slot_coeffs(f_, 0, x[1], x[2]), y[0], x[0]);
        Complex gx = over(ev(g_, x[0], x[1], x[2]), geo_.d[0], geo_);
        Complex fx = over(ev(f_, x[0], x[1], x[2]), geo_.d[0], geo_);
        return ev(f_, y[0], x[1], y[2]) * (gx - dd_g) - (fx - dd_f) * ev(g_, y[0], x[1], y[2]);
    }

    Complex over2() const {
        const Triple &x = geo_.x, &y = geo_.y;
        Complex dd_f = divided_difference(slot_coeffs(f_, 1, y[0], y[2]), x[1], y[1]);
        Complex dd_g = divided_difference(slot_coeffs(g_, 1, y[0], y[2]), x[1], y[1]);
        Complex fy = over(ev(f_, y[0], y[1], y[2]), geo_.d[1], geo_);
        Complex gy = over(ev(g_, y[0], y[1], y[2]), geo_.d[1], geo_);
        return (fy + dd_f) * ev(g_, y[0], x[1], x[2]) - ev(f_, y[0], x[1], x[2]) * (gy + dd_g);
    }

    Complex over12() const {
        const Triple &x = geo_.x, &y = geo_.y;
        Complex p = divided_difference(slot_coeffs(f_, 1, y[0], y[2]), x[1], y[1]);
        Complex s = divided_difference(slot_coeffs(g_, 1, y[0], y[2]), x[1], y[1]);
        Complex q = divided_difference(slot_coeffs(g_, 0, x[1], x[2]), y[0], x[0]);
        Complex r = divided_difference(slot_coeffs(f_, 0, x[1], x[2]), y[0], x[0]);
        Complex fy = ev(f_, y[0], y[1], y[2]), gy = ev(g_, y[0], y[1], y[2]);
        Complex fx = ev(f_, x[0], x[1], x[2]), gx = ev(g_, x[0], x[1], x[2]);
        Complex cross = 0.0;
        if (std::abs(geo_.d[0]) >= geo_.exact_tol && std::abs(geo_.d[1]) >= geo_.exact_tol)
            cross = (fy * gx - fx * gy) / (geo_.d[0] * geo_.d[1]);
        Complex t1 = 0.0;
        if (std::abs(geo_.d[0]) >= geo_.exact_tol)
            t1 = (p * gx - fx * s) / geo_.d[0];
        Complex t2 = 0.0;
        if (std::abs(geo_.d[1]) >= geo_.exact_tol)
            t2 = -(fy * q - r * gy) / geo_.d[1];
        return cross + t1 + t2 - (p * q - r * s);
    }

    Complex over13() const {
        if (std::abs(geo_.d[0]) >= geo_.exact_tol) return over3() / geo_.d[0];
        return -(over3(f_.partial(0), g_) + over3(f_, g_.partial(0)));
    }

    Complex over23() const {
        if (std::abs(geo_.d[1]) >= geo_.exact_tol) return over3() / geo_.d[1];
        return over3(f_.partial(1), g_) + over3(f_, g_.partial(1));
    }

private:
    const MultiPoly& f_;
    const MultiPoly& g_;
    const PairGeometry& geo_;
};

template <class Eval>
Complex numerator_over_smalls(const Eval& n, const std::array<bool, 3>& small) {
    int count = int(small[0]) + int(small[1]) + int(small[2]);
    if (count == 0) return n.plain();
    if (count == 1) {
        if (small[0]) return n.over1();
        if (small[1]) return n.over2();
        return n.over3();
    }
    if (small[0] && small[1]) return n.over12();
    if (small[0] && small[2]) return n.over13();
    return n.over23();
}

PairGeometry make_geometry(const SpaceCurve& curve, const Triple& x, const Triple& y) {
    PairGeometry geo;
    geo.x = x;
    geo.y = y;
    double s = 1.0;
    for (int i = 0; i < 3; ++i) {
        geo.d[size_t(i)] = x[size_t(i)] - y[size_t(i)];
        s = std::max({s, std::abs(x[size_t(i)]), std::abs(y[size_t(i)])});
    }
    geo.near_tol = 1e-7 * s;
    geo.exact_tol = 1e-8 * s;
    (void)curve;
    return geo;
}

void require_on_curve(const SpaceCurve& curve, const Triple& p, const char* which) {
    double s = 1.0 + std::max({std::abs(p[0]), std::abs(p[1]), std::abs(p[2])});
    double growth = std::pow(s, std::max(curve.deg_f(), curve.deg_g()));
    if (curve.residual(p) > 1e-6 * curve.coeff_scale() * growth)
        throw_domain(std::string(which) + " point does not lie on the curve");
}

Complex guarded_j1(const SpaceCurve& curve, const Triple& x) {
    Complex j = curve.j1(x);
    double s = 1.0 + std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
    double jscale = curve.coeff_scale() * curve.coeff_scale() *
                    std::pow(s, std::max(curve.deg_f() + curve.deg_g() - 2, 0));
    if (std::abs(j) < 1e-12 * jscale)
        throw_domain("projection jacobian vanishes at x (branch point)");
    return j;
}

Complex remaining_denominator(const PairGeometry& geo, const std::array<bool, 3>& small) {
    Complex prod = 1.0;
    for (int i = 0; i < 3; ++i)
        if (!small[size_t(i)]) prod *= geo.d[size_t(i)];
    return prod;
}

Complex genus4_coeff(const SpaceCurve& curve, const PairGeometry& geo) {
    const MultiPoly& f = curve.f();
    const Triple &x = geo.x, &y = geo.y;
    Complex j = guarded_j1(curve, x);

    if (std::abs(geo.d[0]) < geo.near_tol) {
        // same base point on another sheet: limit along the curve
        MultiPoly p = genus4_p_poly(curve, y);
        Triple jvec = curve.jacobian_vector(x);
        Complex num = p.partial(0).eval({x[0], x[1], x[2]}) * jvec[0] +
                      p.partial(1).eval({x[0], x[1], x[2]}) * jvec[1] +
                      p.partial(2).eval({x[0], x[1], x[2]}) * jvec[2];
        if (std::abs(geo.d[0]) >= geo.exact_tol)
            return p.eval({x[0], x[1], x[2]}) / (j * geo.d[0]);
        return num / (j * j);
    }

    Complex dd2 = divided_difference(slot_coeffs(f, 1, x[0], x[2]), y[1], x[1]);
    Complex dd3 = divided_difference(slot_coeffs(f, 2, y[0], y[1]), x[2], y[2]);
    Complex pval = y[1] * dd2 - x[2] * dd3;
    pval -= x[2] * over(ev(f, y[0], y[1], y[2]), geo.d[2], geo);
    pval -= y[1] * over(ev(f, x[0], x[1], x[2]), geo.d[1], geo);
    return pval / (j * geo.d[0]);
}

Complex cover_coeff(const SpaceCurve& curve, const PairGeometry& geo) {
    const MultiPoly& f = curve.f();
    const MultiPoly& g = curve.g();
    if (f.degree_in(2) != 0 || g.degree_in(0) != 0)
        throw_usage("cover variant needs f(x1, x2) and g(x2, x3)");
    const Triple &x = geo.x, &y = geo.y;

    Complex f2 = f.partial(1).eval({x[0], x[1], x[2]});
    Complex g3 = g.partial(2).eval({x[0], x[1], x[2]});
    double s = 1.0 + std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
    double jscale = curve.coeff_scale() * curve.coeff_scale() *
                    std::pow(s, std::max(curve.deg_f() + curve.deg_g() - 2, 0));
    if (std::abs(f2 * g3) < 1e-12 * jscale)
        throw_domain("projection jacobian vanishes at x (branch point)");

    std::array<bool, 3> small{};
    for (int i = 0; i < 3; ++i) small[size_t(i)] = std::abs(geo.d[size_t(i)]) < geo.near_tol;

    if (small[0] && small[1]) {
        // same plane point of f: the g factor collapses the kernel
        Complex f1 = f.partial(0).eval({x[0], x[1], x[2]});
        Complex g2 = g.partial(1).eval({x[0], x[1], x[2]});
        return f1 * g2 / (f2 * g3 * geo.d[2]);
    }
    if (small[1] && small[2]) {
        // same point of the g curve: plain Cauchy pole in the base
        return 1.0 / geo.d[0];
    }

    // factor A = f(x1, y2) over its small slots
    Complex afac;
    if (small[0]) {
        Complex dd = divided_difference(slot_coeffs(f, 0, y[1], 0.0), x[0], y[0]);
        afac = over(ev(f, y[0], y[1], 0.0), geo.d[0], geo) + dd;
    } else if (small[1]) {
        Complex dd = divided_difference(slot_coeffs(f, 1, x[0], 0.0), y[1], x[1]);
        afac = over(ev(f, x[0], x[1], 0.0), geo.d[1], geo) - dd;
    } else {
        afac = ev(f, x[0], y[1], 0.0);
    }

    // factor B = g(y2, x3) over its small slot
    Complex bfac;
    if (small[2]) {
        Complex dd = divided_difference(slot_coeffs(g, 2, 0.0, y[1]), x[2], y[2]);
        bfac = over(ev(g, 0.0, y[1], y[2]), geo.d[2], geo) + dd;
    } else {
        bfac = ev(g, 0.0, y[1], x[2]);
    }

    Complex denom = f2 * g3;
    for (int i = 0; i < 3; ++i)
        if (!small[size_t(i)]) denom *= geo.d[size_t(i)];
    return -afac * bfac / denom;
}

} // namespace

MultiPoly genus4_p_poly(const SpaceCurve& curve, const Triple& y) {
    const MultiPoly& f = curve.f();

    // [f(x1, y2, x3) - f(x)] / (y2 - x2), exact as a polynomial in x
    auto layers2 = f.coeffs_in(1);
    MultiPoly dq2(3);
    for (size_t k = 1; k < layers2.size(); ++k) {
        MultiPoly inner(3);
        for (size_t j = 0; j < k; ++j) {
            Exponents e{0, int(j), 0, 0};
            inner.set_coeff(e, inner.coeff(e) + std::pow(y[1], double(k - 1 - j)));
        }
        dq2 = dq2 + layers2[k] * inner;
    }

    // [f(y1, y2, x3) - f(y)] / (x3 - y3), exact as a polynomial in x3
    std::vector<Complex> c3 = f.substitute(0, y[0]).substitute(1, y[1]).univariate_coeffs(2);
    MultiPoly dq3(3);
    for (size_t k = 1; k < c3.size(); ++k)
        for (size_t j = 0; j < k; ++j) {
            Exponents e{0, 0, int(j), 0};
            dq3.set_coeff(e, dq3.coeff(e) + c3[k] * std::pow(y[2], double(k - 1 - j)));
        }

    return dq2 * MultiPoly::constant(3, y[1]) - MultiPoly::variable(3, 2) * dq3;
}

DifferentialValue kernel_eval(const SpaceCurve& curve, KernelVariant variant,
                              const Triple& x, const Triple& y) {
    require_on_curve(curve, x, "x");
    require_on_curve(curve, y, "y");
    PairGeometry geo = make_geometry(curve, x, y);

    std::array<bool, 3> small{};
    int count = 0;
    for (int i = 0; i < 3; ++i) {
        small[size_t(i)] = std::abs(geo.d[size_t(i)]) < geo.near_tol;
        count += int(small[size_t(i)]);
    }
    if (count == 3)
        throw_domain("kernel pole: coincident evaluation points");

    switch (variant) {
        case KernelVariant::Genus4: {
            if (!genus4_view(curve))
                throw_usage("g4 variant needs the canonical family shape");
            return {genus4_coeff(curve, geo), 1};
        }
        case KernelVariant::BranchedCover:
            return {cover_coeff(curve, geo), 1};
        case KernelVariant::Compact: {
            Complex j = guarded_j1(curve, x);
            N1Eval n1(curve, geo);
            Complex num = numerator_over_smalls(n1, small);
            return {num / (j * remaining_denominator(geo, small)), 1};
        }
        case KernelVariant::Symmetric: {
            Complex j = guarded_j1(curve, x);
            N1Eval n1(curve, geo);
            N2Eval n2(curve, geo);
            N3Eval n3(curve, geo);
            Complex num = numerator_over_smalls(n1, small) +
                          numerator_over_smalls(n2, small) +
                          numerator_over_smalls(n3, small);
            return {num / (3.0 * j * remaining_denominator(geo, small)), 1};
        }
    }
    throw_usage("unknown kernel variant");
}

DifferentialValue third_kind(const SpaceCurve& curve, KernelVariant variant,
                             const Triple& x, const Triple& y, const Triple& yp) {
    DifferentialValue a = kernel_eval(curve, variant, x, y);
    DifferentialValue b = kernel_eval(curve, variant, x, yp);
    return {a.coeff - b.coeff, 1};
}

DifferentialValue quadratic_kernel(const SpaceCurve& curve, const Triple& x, const Triple& y) {
    DifferentialValue k = kernel_eval(curve, KernelVariant::Genus4, x, y);
    return {k.coeff / guarded_j1(curve, x), 2};
}

std::array<Complex, 4> asymptotic_coeffs(const Genus4View& view, const Triple& y) {
    if (std::abs(y[0]) < 1e-12)
        throw_domain("asymptotic coefficients need y1 away from zero");
    Complex a03 = view.coeff(3, 0, 3);
    Complex a02_3 = view.coeff(3, 0, 2);
    Complex a12 = view.coeff(3, 1, 2);
    Complex a02_2 = view.coeff(2, 0, 2);
    Complex h1v = view.h[0].eval({y[0], y[1], 0.0});
    Complex h2v = view.h[1].eval({y[0], y[1], 0.0});
    Complex y1 = y[0], y2 = y[1], y3 = y[2];

    std::array<Complex, 4> a;
    a[0] = -(a03 * y2 * y2 * y2 + a02_3 * y2 * y2) / y1;
    a[1] = -a03 * y2 * y2 * y2 / (y1 * y1) - a12 * y2 * y2 / y1;
    a[2] = -a03 * y2 * y2 / y1;
    a[3] = (-a02_2 * y2 * y2 + 7.0 * y3 * y3 + 3.0 * y3 * h1v + h2v) / y1;
    return a;
}

DifferentialValue plane_weierstrass(const PlaneCurve& curve,
                                    Complex x1, Complex x2, Complex y1, Complex y2) {
    const MultiPoly& f = curve.f();
    double s = std::max({1.0, std::abs(x1), std::abs(x2), std::abs(y1), std::abs(y2)});
    double near_tol = 1e-7 * s;
    double exact_tol = 1e-8 * s;
    Complex d1 = x1 - y1, d2 = x2 - y2;
    if (std::abs(d1) < near_tol && std::abs(d2) < near_tol)
        throw_domain("kernel pole: coincident evaluation points");

    Complex f01 = f.partial(1).eval({x1, x2});
    if (std::abs(f01) < 1e-12 * curve.coeff_scale() *
                            std::pow(1.0 + std::abs(x1) + std::abs(x2), 4))
        throw_domain("projection derivative vanishes at x (branch point)");

    Complex num;
    Complex denom = f01;
    if (std::abs(d1) < near_tol) {
        std::vector<Complex> c = f.substitute(1, x2).univariate_coeffs(0);
        if (c.empty()) c.push_back(0.0);
        Complex dd = divided_difference(c, y1, x1);
        Complex fx = std::abs(d1) >= exact_tol ? f.eval({x1, x2}) / d1 : 0.0;
        num = fx - dd;
        denom *= d2;
    } else if (std::abs(d2) < near_tol) {
        std::vector<Complex> c = f.substitute(0, y1).univariate_coeffs(1);
        if (c.empty()) c.push_back(0.0);
        Complex dd = divided_difference(c, x2, y2);
        Complex fy = std::abs(d2) >= exact_tol ? f.eval({y1, y2}) / d2 : 0.0;
        num = fy + dd;
        denom *= d1;
    } else {
        num = f.eval({y1, x2});
        denom *= d1 * d2;
    }
    return {num / denom, 1};
}

DifferentialValue hyperelliptic_tau(const HyperellipticCurve& curve,
                                    Complex x, int sheet_x, Complex xp, int sheet_xp) {
    if (std::abs(x - xp) < 1e-10 * (1.0 + std::abs(x)))
        throw_domain("tau pole: coincident base points");
    Complex yx = curve.y(x, sheet_x);
    Complex yxp = curve.y(xp, sheet_xp);
    Complex prod = yx * yxp;
    if (std::abs(prod) < 1e-12)
        throw_domain("tau undefined at a branch point of the double cover");
    Complex rv = curve.r(x, xp);
    Complex d = x - xp;
    return {-(prod + rv) / (2.0 * d * d * prod), 1};
}

} // namespace weierkern
