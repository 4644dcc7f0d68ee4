#include "weierkern/localanalysis.hpp"

#include "weierkern/errors.hpp"

#include <cmath>

namespace weierkern {

namespace {

struct Walk {
    std::vector<Complex> values; // chart-coordinate integrand per node
    std::vector<double> thetas;  // angles mod 2 pi
    int nodes2;                  // doubled node count per turn
    int turns;
    double max_abs;
};

// continues the anchored sheet around the circle, evaluating the form at
// doubled node density; runs extra turns until the lift closes
Walk walk_contour(const SpaceCurve& curve, const FormFn& form, const ContourSpec& spec) {
    if (spec.nodes < 8)
        throw_usage("contour needs at least 8 nodes");
    if (spec.radius <= 0.0)
        throw_usage("contour radius must be positive");

    const int n2 = 2 * spec.nodes;
    auto base = [&](double theta) { return spec.center + std::polar(spec.radius, theta); };

    CurvePoint anchor = curve.make_point(spec.anchor);
    Complex anchor_base = spec.chart == Chart::Affine ? anchor.x[0] : 1.0 / anchor.x[0];

    PathSpec to_start;
    to_start.chart = spec.chart;
    to_start.waypoints = {anchor_base, base(0.0)};
    to_start.max_step = std::max(spec.radius / 4.0, std::abs(base(0.0) - anchor_base) / 16.0);
    CurvePoint current = curve.continue_point(anchor, to_start);
    CurvePoint start = current;

    Walk walk;
    walk.nodes2 = n2;
    walk.turns = 0;
    walk.max_abs = 0.0;

    const double dtheta = 2.0 * M_PI / double(n2);
    for (int turn = 0; turn < spec.max_turns; ++turn) {
        for (int j = 0; j < n2; ++j) {
            double theta = dtheta * double(j);
            DifferentialValue dv = form(current);
            Complex val = dv.coeff;
            if (spec.chart == Chart::Infinity) {
                Complex t = base(theta);
                Complex factor = -1.0 / (t * t);
                for (int w = 0; w < dv.weight; ++w) val *= factor;
            }
            walk.values.push_back(val);
            walk.thetas.push_back(theta);
            walk.max_abs = std::max(walk.max_abs, std::abs(val));

            PathSpec hop;
            hop.chart = spec.chart;
            hop.waypoints = {base(theta), base(theta + dtheta)};
            hop.max_step = spec.radius;
            current = curve.continue_point(current, hop);
        }
        walk.turns = turn + 1;
        double size = 1.0 + std::abs(start.x[1]) + std::abs(start.x[2]);
        double dist = std::abs(current.x[1] - start.x[1]) + std::abs(current.x[2] - start.x[2]);
        if (dist <= 1e-6 * size) return walk;
    }
    throw_convergence("contour lift does not close within the turn budget");
}

// trapezoid value of (1/2 pi i) contour of F (z - center)^{-k-1} dz over the
// walk; skip = 2 drops to the undoubled node set
Complex walk_moment(const Walk& walk, double radius, int k, int skip) {
    Complex acc = 0.0;
    for (size_t j = 0; j < walk.values.size(); j += size_t(skip)) {
        double th = walk.thetas[j];
        acc += walk.values[j] * std::polar(1.0, -double(k) * th);
    }
    // dz contributes i r e^{i theta} d theta, the pole power r^{-k-1}
    // e^{-i(k+1) theta}; the divisor is nodes per turn, never the turn count
    return acc * std::pow(radius, -double(k)) * double(skip) / double(walk.nodes2);
}

} // namespace

Complex contour_residue(const SpaceCurve& curve, const FormFn& form, const ContourSpec& spec) {
    Walk walk = walk_contour(curve, form, spec);
    Complex full = walk_moment(walk, spec.radius, -1, 1);
    Complex half = walk_moment(walk, spec.radius, -1, 2);
    if (std::abs(full - half) > 10.0 * spec.tol * (1.0 + std::abs(full)))
        throw_convergence("contour residue did not settle under node doubling");
    return full;
}

Complex laurent_coeff(const SpaceCurve& curve, const FormFn& form, const ContourSpec& spec,
                      int k) {
    Walk walk = walk_contour(curve, form, spec);
    if (walk.turns != 1)
        throw_domain("laurent coefficients need a single-sheeted loop");
    Complex full = walk_moment(walk, spec.radius, k, 1);
    Complex half = walk_moment(walk, spec.radius, k, 2);
    if (std::abs(full - half) > 10.0 * spec.tol * (1.0 + std::abs(full)))
        throw_convergence("laurent coefficient did not settle under node doubling");
    return full;
}

int pole_order(const SpaceCurve& curve, const FormFn& form, const ContourSpec& spec) {
    Walk walk = walk_contour(curve, form, spec);
    if (walk.turns != 1)
        throw_domain("pole order needs a single-sheeted loop");
    double floor_val = spec.tol * std::max(walk.max_abs, 1e-300);
    int order = 0;
    for (int j = 1; j <= 7; ++j) {
        Complex ck = walk_moment(walk, spec.radius, -j, 1);
        if (std::abs(ck) >= floor_val) {
            if (j == 7)
                throw_convergence("pole order exceeds the resolvable range");
            order = j;
        }
    }
    return order;
}

Complex contour_residue_plain(const std::function<Complex(Complex)>& fn,
                              Complex center, double radius, int nodes) {
    auto moment = [&](int n) {
        Complex acc = 0.0;
        for (int j = 0; j < n; ++j) {
            double th = 2.0 * M_PI * double(j) / double(n);
            acc += fn(center + std::polar(radius, th)) * std::polar(1.0, th);
        }
        return acc * radius / double(n);
    };
    Complex full = moment(2 * nodes);
    Complex half = moment(nodes);
    if (std::abs(full - half) > 1e-7 * (1.0 + std::abs(full)))
        throw_convergence("plain contour residue did not settle under node doubling");
    return full;
}

Complex laurent_coeff_plain(const std::function<Complex(Complex)>& fn,
                            Complex center, double radius, int k, int nodes) {
    auto moment = [&](int n) {
        Complex acc = 0.0;
        for (int j = 0; j < n; ++j) {
            double th = 2.0 * M_PI * double(j) / double(n);
            acc += fn(center + std::polar(radius, th)) * std::polar(1.0, -double(k) * th);
        }
        return acc * std::pow(radius, -double(k)) / double(n);
    };
    Complex full = moment(2 * nodes);
    Complex half = moment(nodes);
    if (std::abs(full - half) > 1e-7 * (1.0 + std::abs(full)))
        throw_convergence("plain laurent coefficient did not settle under node doubling");
    return full;
}

} // namespace weierkern
