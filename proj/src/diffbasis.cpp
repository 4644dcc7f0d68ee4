#include "weierkern/diffbasis.hpp"

#include "weierkern/errors.hpp"

namespace weierkern {

std::vector<BasisElement> holomorphic_basis(const SpaceCurve& curve, int weight) {
    int lo = std::min(curve.deg_f(), curve.deg_g());
    int hi = std::max(curve.deg_f(), curve.deg_g());
    if (lo != 2 || hi != 3)
        throw_usage("holomorphic basis is provided for degree (3, 2) intersections");

    auto mono = [](int e1, int e2, int e3) {
        MultiPoly m(3);
        m.set_coeff({e1, e2, e3, 0}, 1.0);
        return m;
    };

    std::vector<BasisElement> out;
    if (weight == 1) {
        out.push_back({mono(0, 0, 0), 1});
        out.push_back({mono(1, 0, 0), 1});
        out.push_back({mono(0, 1, 0), 1});
        out.push_back({mono(0, 0, 1), 1});
    } else if (weight == 2) {
        out.push_back({mono(0, 0, 0), 2});
        out.push_back({mono(1, 0, 0), 2});
        out.push_back({mono(0, 1, 0), 2});
        out.push_back({mono(0, 0, 1), 2});
        out.push_back({mono(2, 0, 0), 2});
        out.push_back({mono(0, 2, 0), 2});
        out.push_back({mono(0, 0, 2), 2});
        out.push_back({mono(1, 1, 0), 2});
        out.push_back({mono(1, 0, 1), 2});
    } else {
        throw_usage("basis weight must be 1 or 2");
    }
    return out;
}

DifferentialValue basis_eval(const SpaceCurve& curve, const BasisElement& elem,
                             const Triple& x) {
    Complex j = curve.j1(x);
    double s = 1.0 + std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
    double jscale = curve.coeff_scale() * curve.coeff_scale() *
                    std::pow(s, std::max(curve.deg_f() + curve.deg_g() - 2, 0));
    if (std::abs(j) < 1e-12 * jscale)
        throw_domain("projection jacobian vanishes at the evaluation point");
    Complex num = elem.numerator.eval(x.data(), 3);
    Complex jw = j;
    for (int i = 1; i < elem.weight; ++i) jw *= j;
    return {num / jw, elem.weight};
}

} // namespace weierkern
