#include "weierkern/curve.hpp"

#include "weierkern/errors.hpp"
#include "weierkern/rootfind.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>

namespace weierkern {

namespace {

double triple_norm(const Triple& x) {
    return std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])});
}

// residual scaled against coefficient size and coordinate growth
double relative_residual(double raw, double coeff_scale, const Triple& x, int deg) {
    double growth = std::pow(1.0 + triple_norm(x), deg);
    return raw / (coeff_scale * growth);
}

struct PairCluster {
    Complex x2, x3;
    int count;
};

std::vector<PairCluster> cluster_pairs(const std::vector<std::array<Complex, 2>>& pts,
                                       double tol) {
    std::vector<PairCluster> out;
    std::vector<bool> used(pts.size(), false);
    for (size_t i = 0; i < pts.size(); ++i) {
        if (used[i]) continue;
        Complex s2 = pts[i][0], s3 = pts[i][1];
        int cnt = 1;
        used[i] = true;
        bool grew = true;
        while (grew) {
            grew = false;
            for (size_t j = 0; j < pts.size(); ++j) {
                if (used[j]) continue;
                double d = std::max(std::abs(pts[j][0] - s2 / double(cnt)),
                                    std::abs(pts[j][1] - s3 / double(cnt)));
                if (d <= tol) {
                    s2 += pts[j][0];
                    s3 += pts[j][1];
                    cnt++;
                    used[j] = true;
                    grew = true;
                }
            }
        }
        out.push_back({s2 / double(cnt), s3 / double(cnt), cnt});
    }
    return out;
}

} // namespace

int genus_complete_intersection(int deg_f, int deg_g) {
    if (deg_f < 1 || deg_g < 1)
        throw_domain("degrees must be positive");
    int twice_gm1 = deg_f * deg_g * (deg_f + deg_g - 4);
    if (twice_gm1 % 2 != 0)
        throw_domain("degree pair gives non-integral genus");
    return twice_gm1 / 2 + 1;
}

SpaceCurve::SpaceCurve(MultiPoly f, MultiPoly g, double tolerance)
    : f_(std::move(f)), g_(std::move(g)), tol_(tolerance) {
    if (f_.nvars() != 3 || g_.nvars() != 3)
        throw_usage("space curve needs two polynomials in x1, x2, x3");
    if (f_.is_zero() || g_.is_zero())
        throw_usage("space curve polynomials must be nonzero");
    if (tol_ <= 0.0 || tol_ >= 1.0)
        throw_usage("tolerance must lie in (0, 1)");
    deg_f_ = f_.total_degree();
    deg_g_ = g_.total_degree();
    scale_ = std::max(f_.coeff_scale(), g_.coeff_scale());
    for (int v = 0; v < 3; ++v) {
        fx_[v] = f_.partial(v);
        gx_[v] = g_.partial(v);
    }
    if (f_.degree_in(1) > 0 && g_.degree_in(1) > 0) {
        eliminant_ = resultant(f_, g_, 1);
        eliminant_ = eliminant_.drop_small(1e-12 * eliminant_.coeff_scale());
    } else {
        eliminant_ = MultiPoly(3); // chain-shaped curves skip the eliminant
    }

    auto group_terms = [](const MultiPoly& h) {
        std::vector<FixedTerm> out;
        for (const auto& [e, c] : h.terms()) {
            auto it = std::find_if(out.begin(), out.end(), [&](const FixedTerm& t) {
                return t.e2 == e[1] && t.e3 == e[2];
            });
            if (it == out.end()) {
                out.push_back({e[1], e[2], {}});
                it = std::prev(out.end());
            }
            if (int(it->cx1.size()) <= e[0])
                it->cx1.resize(size_t(e[0]) + 1, Complex(0.0));
            it->cx1[size_t(e[0])] += c;
        }
        return out;
    };
    fparts_ = group_terms(f_);
    gparts_ = group_terms(g_);
    if (!eliminant_.is_zero())
        for (const MultiPoly& col : eliminant_.coeffs_in(2))
            elim_cols_.push_back(col.univariate_coeffs(0));
}

int SpaceCurve::genus() const { return genus_complete_intersection(deg_f_, deg_g_); }

double SpaceCurve::on_curve_tol() const { return std::max(tol_, 1e-12) * 100.0; }

Triple SpaceCurve::jacobian_vector(const Triple& x) const {
    const Complex* p = x.data();
    Complex f1 = fx_[0].eval(p, 3), f2 = fx_[1].eval(p, 3), f3 = fx_[2].eval(p, 3);
    Complex g1 = gx_[0].eval(p, 3), g2 = gx_[1].eval(p, 3), g3 = gx_[2].eval(p, 3);
    return {f2 * g3 - f3 * g2, f3 * g1 - f1 * g3, f1 * g2 - f2 * g1};
}

Complex SpaceCurve::j1(const Triple& x) const {
    const Complex* p = x.data();
    return fx_[1].eval(p, 3) * gx_[2].eval(p, 3) - fx_[2].eval(p, 3) * gx_[1].eval(p, 3);
}

std::array<Complex, 2> SpaceCurve::evaluate(const Triple& x) const {
    return {f_.eval(x.data(), 3), g_.eval(x.data(), 3)};
}

double SpaceCurve::residual(const Triple& x) const {
    auto v = evaluate(x);
    return std::max(std::abs(v[0]), std::abs(v[1]));
}

CurvePoint SpaceCurve::make_point(const Triple& approx) const {
    Triple x = approx;
    for (int it = 0; it < 30; ++it) {
        const Complex* p = x.data();
        Complex fv = f_.eval(p, 3), gv = g_.eval(p, 3);
        Complex a = fx_[1].eval(p, 3), b = fx_[2].eval(p, 3);
        Complex c = gx_[1].eval(p, 3), d = gx_[2].eval(p, 3);
        Complex det = a * d - b * c;
        if (std::abs(det) < 1e-14 * scale_) break;
        Complex d2 = (d * fv - b * gv) / det;
        Complex d3 = (a * gv - c * fv) / det;
        x[1] -= d2;
        x[2] -= d3;
        if (std::max(std::abs(d2), std::abs(d3)) < 1e-15 * (1.0 + triple_norm(x))) break;
    }
    double raw = residual(x);
    double rel = relative_residual(raw, scale_, x, std::max(deg_f_, deg_g_));
    if (rel > on_curve_tol())
        throw_domain("point does not polish onto the curve");
    return {x, raw};
}

FiberResult SpaceCurve::fiber(Complex a, Chart chart) const {
    Complex x1val;
    if (chart == Chart::Affine) {
        x1val = a;
    } else {
        if (std::abs(a) < 1e-300)
            throw_domain("fiber at the infinity chart origin is the divisor at infinity");
        x1val = 1.0 / a;
    }

    // the defining polynomials with x1 fixed, kept as scalar term lists
    struct Slice {
        std::vector<int> e2, e3;
        std::vector<Complex> val;
        int deg2 = 0, deg3 = 0, total = -1;
    };
    auto slice_at = [&](const std::vector<FixedTerm>& parts) {
        Slice s;
        for (const FixedTerm& t : parts) {
            Complex v = horner(t.cx1, x1val);
            if (v == Complex(0.0)) continue;
            s.e2.push_back(t.e2);
            s.e3.push_back(t.e3);
            s.val.push_back(v);
            s.deg2 = std::max(s.deg2, t.e2);
            s.deg3 = std::max(s.deg3, t.e3);
            s.total = std::max(s.total, t.e2 + t.e3);
        }
        return s;
    };
    Slice fa = slice_at(fparts_);
    Slice ga = slice_at(gparts_);
    if (fa.val.empty() || ga.val.empty())
        throw_domain("fiber polynomial vanishes identically");

    const int expected = std::max(fa.total, 0) * std::max(ga.total, 0);
    std::vector<std::array<Complex, 2>> candidates;
    bool degenerate = false;

    auto univar_deg = [](const Slice& h) {
        // -1 if h involves both remaining variables
        if (h.deg2 > 0 && h.deg3 > 0) return -1;
        return h.deg2 > 0 ? 1 : 2;
    };
    auto slice_coeffs = [](const Slice& s, int var) {
        // ascending coefficients in var; the other variable is absent
        int deg = var == 1 ? s.deg2 : s.deg3;
        std::vector<Complex> out(size_t(deg) + 1, Complex(0.0));
        for (size_t i = 0; i < s.val.size(); ++i)
            out[size_t(var == 1 ? s.e2[i] : s.e3[i])] += s.val[i];
        return out;
    };

    auto back_substitute = [&](int solved_var, Complex val) {
        // roots of the other polynomial family at this value
        int other_var = solved_var == 1 ? 2 : 1;
        auto coeffs_of = [&](const Slice& s) {
            int deg = other_var == 1 ? s.deg2 : s.deg3;
            std::vector<Complex> out(size_t(deg) + 1, Complex(0.0));
            for (size_t i = 0; i < s.val.size(); ++i) {
                int eo = other_var == 1 ? s.e2[i] : s.e3[i];
                int es = other_var == 1 ? s.e3[i] : s.e2[i];
                Complex pw = 1.0;
                for (int j = 0; j < es; ++j) pw *= val;
                out[size_t(eo)] += s.val[i] * pw;
            }
            return out;
        };
        auto has_positive_degree = [](const std::vector<Complex>& v) {
            for (size_t k = 1; k < v.size(); ++k)
                if (v[k] != Complex(0.0)) return true;
            return false;
        };
        auto max_abs = [](const std::vector<Complex>& v) {
            double m = 0.0;
            for (const Complex& c : v) m = std::max(m, std::abs(c));
            return m;
        };
        std::vector<Complex> fc = coeffs_of(fa), gc = coeffs_of(ga);
        const std::vector<Complex>* primary = nullptr;
        const std::vector<Complex>* filter = nullptr;
        if (has_positive_degree(gc)) {
            primary = &gc;
            filter = &fc;
        } else if (has_positive_degree(fc)) {
            primary = &fc;
            filter = &gc;
        } else {
            degenerate = true;
            return;
        }
        std::vector<Complex> rts;
        try {
            rts = univariate_roots(*primary);
        } catch (const Error&) {
            degenerate = true;
            return;
        }
        double filt_scale = std::max(1e-300, std::max(max_abs(fc), max_abs(gc)));
        for (Complex r : rts) {
            Complex chk = horner(*filter, r);
            double growth = std::pow(1.0 + std::abs(r) + std::abs(val),
                                     std::max(deg_f_, deg_g_));
            if (std::abs(chk) <= 1e-6 * filt_scale * growth) {
                if (other_var == 1)
                    candidates.push_back({r, val});
                else
                    candidates.push_back({val, r});
            }
        }
    };

    int fu = univar_deg(fa), gu = univar_deg(ga);
    if (fu > 0) {
        // fa depends on a single variable: solve it, then the companion
        for (Complex r : univariate_roots(slice_coeffs(fa, fu)))
            back_substitute(fu, r);
    } else if (gu > 0) {
        for (Complex r : univariate_roots(slice_coeffs(ga, gu)))
            back_substitute(gu, r);
    } else {
        // both genuinely bivariate: eliminate x2 through the cached resultant
        std::vector<Complex> ec;
        if (!elim_cols_.empty()) {
            ec.resize(elim_cols_.size());
            double esc = 1e-300;
            for (size_t k = 0; k < ec.size(); ++k) {
                ec[k] = horner(elim_cols_[k], x1val);
                esc = std::max(esc, std::abs(ec[k]));
            }
            for (Complex& v : ec)
                if (std::abs(v) <= 1e-12 * esc) v = 0.0;
            while (!ec.empty() && ec.back() == Complex(0.0)) ec.pop_back();
        }
        if (ec.size() <= 1) {
            // the family eliminant degenerates at this base value
            MultiPoly ea = resultant(f_.substitute(0, x1val), g_.substitute(0, x1val), 1);
            ea = ea.drop_small(1e-12 * std::max(ea.coeff_scale(), 1e-300));
            if (ea.is_zero() || ea.degree_in(2) <= 0)
                throw_domain("fiber eliminant degenerates at this base point");
            ec = ea.univariate_coeffs(2);
        }
        for (Complex r : univariate_roots(ec))
            back_substitute(2, r);
    }

    // polish every candidate at fixed x1
    std::vector<std::array<Complex, 2>> polished;
    for (auto& cand : candidates) {
        Complex x2 = cand[0], x3 = cand[1];
        Complex p[3] = {x1val, x2, x3};
        for (int it = 0; it < 25; ++it) {
            p[1] = x2;
            p[2] = x3;
            Complex fv = f_.eval(p, 3), gv = g_.eval(p, 3);
            Complex m11 = fx_[1].eval(p, 3), m12 = fx_[2].eval(p, 3);
            Complex m21 = gx_[1].eval(p, 3), m22 = gx_[2].eval(p, 3);
            Complex det = m11 * m22 - m12 * m21;
            if (std::abs(det) < 1e-13 * scale_) break;
            Complex d2 = (m22 * fv - m12 * gv) / det;
            Complex d3 = (m11 * gv - m21 * fv) / det;
            x2 -= d2;
            x3 -= d3;
            if (std::max(std::abs(d2), std::abs(d3)) <
                1e-15 * (1.0 + std::abs(x2) + std::abs(x3)))
                break;
        }
        Triple x{x1val, x2, x3};
        double rel = relative_residual(residual(x), scale_, x, std::max(deg_f_, deg_g_));
        if (rel <= 1e-6)
            polished.push_back({x2, x3});
    }

    double sz = 1.0;
    for (auto& pp : polished) sz = std::max({sz, std::abs(pp[0]), std::abs(pp[1])});
    auto clusters = cluster_pairs(polished, 1e-7 * sz);

    FiberResult result;
    result.degenerate = degenerate;
    for (auto& cl : clusters) {
        if (cl.count > 1) result.degenerate = true;
        Triple x{x1val, cl.x2, cl.x3};
        result.points.push_back({x, residual(x)});
    }
    if (int(result.points.size()) < expected) result.degenerate = true;

    std::sort(result.points.begin(), result.points.end(),
              [](const CurvePoint& a, const CurvePoint& b) {
                  double aa = std::arg(a.x[2]), ab = std::arg(b.x[2]);
                  if (std::abs(aa - ab) > 1e-9) return aa < ab;
                  double ma = std::abs(a.x[2]), mb = std::abs(b.x[2]);
                  if (std::abs(ma - mb) > 1e-9 * (1.0 + ma)) return ma < mb;
                  double a2 = std::arg(a.x[1]), b2 = std::arg(b.x[1]);
                  if (std::abs(a2 - b2) > 1e-9) return a2 < b2;
                  return std::abs(a.x[1]) < std::abs(b.x[1]);
              });
    return result;
}

CurvePoint SpaceCurve::continue_point(const CurvePoint& start, const PathSpec& path) const {
    if (path.waypoints.size() < 2)
        throw_usage("path needs at least two waypoints");
    if (path.max_step <= 0.0)
        throw_usage("path max_step must be positive");

    auto base_to_x1 = [&](Complex b) {
        if (path.chart == Chart::Affine) return b;
        if (std::abs(b) < 1e-300)
            throw_domain("path through the infinity chart origin");
        return 1.0 / b;
    };

    Complex x2 = start.x[1], x3 = start.x[2];
    {
        double d0 = std::abs(start.x[0] - base_to_x1(path.waypoints.front()));
        if (d0 > 1e-6 * (1.0 + std::abs(start.x[0])))
            throw_usage("start point does not sit over the first waypoint");
    }

    for (size_t seg = 0; seg + 1 < path.waypoints.size(); ++seg) {
        Complex b0 = path.waypoints[seg];
        Complex b1 = path.waypoints[seg + 1];
        double seglen = std::abs(b1 - b0);
        if (seglen == 0.0) continue;
        double t = 0.0;
        double h = std::min(path.max_step / seglen, 1.0);
        while (t < 1.0) {
            double tn = std::min(1.0, t + h);
            Complex bcur = b0 + (b1 - b0) * t;
            Complex bnew = b0 + (b1 - b0) * tn;
            Complex x1cur = base_to_x1(bcur);
            Complex x1new = base_to_x1(bnew);

            // Euler predictor from the implicit function derivative
            std::vector<Complex> p{x1cur, x2, x3};
            Complex m11 = fx_[1].eval(p), m12 = fx_[2].eval(p);
            Complex m21 = gx_[1].eval(p), m22 = gx_[2].eval(p);
            Complex f1 = fx_[0].eval(p), g1 = gx_[0].eval(p);
            Complex det = m11 * m22 - m12 * m21;
            Complex px2 = x2, px3 = x3;
            if (std::abs(det) > 1e-13 * scale_) {
                Complex dx1 = x1new - x1cur;
                px2 = x2 - (m22 * f1 - m12 * g1) / det * dx1;
                px3 = x3 - (m11 * g1 - m21 * f1) / det * dx1;
            }

            // Newton corrector at the new base point
            bool ok = false;
            Complex c2 = px2, c3 = px3;
            for (int it = 0; it < 20; ++it) {
                std::vector<Complex> q{x1new, c2, c3};
                Complex fv = f_.eval(q), gv = g_.eval(q);
                Complex a = fx_[1].eval(q), b = fx_[2].eval(q);
                Complex c = gx_[1].eval(q), d = gx_[2].eval(q);
                Complex dj = a * d - b * c;
                if (std::abs(dj) < 1e-13 * scale_) break;
                Complex d2 = (d * fv - b * gv) / dj;
                Complex d3 = (a * gv - c * fv) / dj;
                c2 -= d2;
                c3 -= d3;
                if (std::max(std::abs(d2), std::abs(d3)) <
                    1e-14 * (1.0 + std::abs(c2) + std::abs(c3))) {
                    ok = true;
                    break;
                }
            }
            if (ok) {
                Triple xq{x1new, c2, c3};
                double rel = relative_residual(residual(xq), scale_, xq,
                                               std::max(deg_f_, deg_g_));
                // reject corrector jumps onto another sheet
                double move = std::abs(c2 - px2) + std::abs(c3 - px3);
                double pred = std::abs(px2 - x2) + std::abs(px3 - x3);
                if (rel > 1e-9 || move > 4.0 * (pred + 1e-3 * (1.0 + std::abs(c2) + std::abs(c3))))
                    ok = false;
            }
            if (ok) {
                x2 = c2;
                x3 = c3;
                t = tn;
                h = std::min(h * 1.5, std::min(path.max_step / seglen, 1.0));
            } else {
                h *= 0.5;
                if (h * seglen < 1e-12)
                    throw_convergence("path tracking step underflow near a branch point");
            }
        }
    }

    Complex x1end = base_to_x1(path.waypoints.back());
    Triple xe{x1end, x2, x3};
    return {xe, residual(xe)};
}

std::vector<BranchPoint> SpaceCurve::branch_points() const {
    MultiPoly jpoly = fx_[1] * gx_[2] - fx_[2] * gx_[1];
    if (jpoly.is_zero())
        throw_domain("projection jacobian vanishes identically");

    MultiPoly r1 = (f_.degree_in(1) > 0 && g_.degree_in(1) > 0)
                       ? eliminant_
                       : MultiPoly(3);
    if (r1.is_zero()) {
        // chain shapes: eliminate whichever variable both still carry
        if (f_.degree_in(2) > 0 && g_.degree_in(2) > 0)
            r1 = resultant(f_, g_, 2);
        else
            r1 = f_.degree_in(1) > 0 || f_.degree_in(2) > 0 ? f_ : g_;
    }

    // eliminate x2 between the curve pair and the jacobian, then x3
    auto eliminate_pair = [](const MultiPoly& p, const MultiPoly& q, int var) {
        if (p.degree_in(var) > 0 && q.degree_in(var) > 0) {
            MultiPoly r = resultant(p, q, var);
            return r.drop_small(1e-12 * std::max(r.coeff_scale(), 1e-300));
        }
        return p.degree_in(var) > 0 ? q : p;
    };

    MultiPoly r2 = eliminate_pair(f_, jpoly, 1);
    MultiPoly r2b = eliminate_pair(g_, r2, 1);
    MultiPoly rfinal = eliminate_pair(r1, r2b, 2);
    rfinal = rfinal.drop_small(1e-10 * std::max(rfinal.coeff_scale(), 1e-300));
    if (rfinal.is_zero())
        throw_domain("branch locus eliminant vanishes identically");
    if (rfinal.degree_in(0) <= 0)
        return {};

    std::vector<Complex> roots = univariate_roots(rfinal.univariate_coeffs(0));
    std::vector<Cluster> clusters = cluster_points(roots, 1e-6 * (1.0 + [&] {
                                                       double m = 0.0;
                                                       for (Complex r : roots)
                                                           m = std::max(m, std::abs(r));
                                                       return m;
                                                   }()));

    std::vector<BranchPoint> found;
    for (const Cluster& cl : clusters) {
        FiberResult fib;
        try {
            fib = fiber(cl.center);
        } catch (const Error&) {
            continue;
        }
        // candidates: fiber points where the sheets come close to colliding.
        // Eliminant roots of high multiplicity carry O(eps^(1/3)) error, so
        // the gate stays loose and the Newton residual does the real test.
        bool genuine = false;
        Complex polished_x1 = cl.center;
        for (const CurvePoint& pt : fib.points) {
            Complex jv = j1(pt.x);
            double jscale = scale_ * std::pow(1.0 + triple_norm(pt.x),
                                              std::max(deg_f_ + deg_g_ - 2, 1));
            if (std::abs(jv) > 3e-1 * jscale) continue;
            // 3x3 Newton on (f, g, J1) in all coordinates
            Triple z = pt.x;
            bool conv = false;
            for (int it = 0; it < 40; ++it) {
                std::vector<Complex> p{z[0], z[1], z[2]};
                Eigen::Matrix3cd jm;
                Eigen::Vector3cd rhs;
                rhs(0) = f_.eval(p);
                rhs(1) = g_.eval(p);
                rhs(2) = jpoly.eval(p);
                for (int v = 0; v < 3; ++v) {
                    jm(0, v) = fx_[v].eval(p);
                    jm(1, v) = gx_[v].eval(p);
                    jm(2, v) = jpoly.partial(v).eval(p);
                }
                Eigen::Vector3cd step = jm.fullPivLu().solve(rhs);
                if (!step.allFinite()) break;
                for (int v = 0; v < 3; ++v) z[size_t(v)] -= step(v);
                double sn = std::max({std::abs(step(0)), std::abs(step(1)), std::abs(step(2))});
                if (sn < 1e-14 * (1.0 + triple_norm(z))) {
                    conv = true;
                    break;
                }
            }
            if (!conv) continue;
            std::vector<Complex> pz{z[0], z[1], z[2]};
            double resid = std::max({std::abs(f_.eval(pz)), std::abs(g_.eval(pz)),
                                     std::abs(jpoly.eval(pz))});
            double growth = std::pow(1.0 + triple_norm(z), deg_f_ + deg_g_);
            if (resid <= 1e-7 * scale_ * scale_ * growth &&
                std::abs(z[0] - cl.center) < 1e-2 * (1.0 + std::abs(cl.center))) {
                genuine = true;
                polished_x1 = z[0];
            }
        }
        if (!genuine) continue;

        // multiplicity: sheet collisions above the branch value
        FiberResult at;
        try {
            at = fiber(polished_x1);
        } catch (const Error&) {
            at = fib;
        }
        std::vector<std::array<Complex, 2>> pairs;
        double sz = 1.0;
        for (const CurvePoint& pt : at.points) {
            pairs.push_back({pt.x[1], pt.x[2]});
            sz = std::max({sz, std::abs(pt.x[1]), std::abs(pt.x[2])});
        }
        int mult = 0;
        for (const PairCluster& pc : cluster_pairs(pairs, 1e-4 * sz))
            mult += pc.count - 1;
        int expected = std::max(f_.substitute(0, polished_x1).total_degree(), 0) *
                       std::max(g_.substitute(0, polished_x1).total_degree(), 0);
        if (int(pairs.size()) < expected)
            mult += expected - int(pairs.size());
        if (mult <= 0) mult = 1;
        found.push_back({polished_x1, mult});
    }

    // merge branch values that polished to the same place
    std::sort(found.begin(), found.end(), [](const BranchPoint& a, const BranchPoint& b) {
        if (std::abs(a.x1.real() - b.x1.real()) > 1e-10) return a.x1.real() < b.x1.real();
        return a.x1.imag() < b.x1.imag();
    });
    std::vector<BranchPoint> merged;
    for (const BranchPoint& bp : found) {
        if (!merged.empty() &&
            std::abs(merged.back().x1 - bp.x1) < 1e-7 * (1.0 + std::abs(bp.x1)))
            continue;
        merged.push_back(bp);
    }
    return merged;
}

namespace {

// composes a 3-variable polynomial with xi_i = L[i][0] u + L[i][1] v + L[i][2]
MultiPoly compose_linear(const MultiPoly& h, const std::array<std::array<Complex, 3>, 3>& l) {
    MultiPoly lin[3];
    for (int i = 0; i < 3; ++i) {
        MultiPoly li(3);
        li.set_coeff({1, 0, 0, 0}, l[size_t(i)][0]);
        li.set_coeff({0, 1, 0, 0}, l[size_t(i)][1]);
        li.set_coeff({0, 0, 0, 0}, l[size_t(i)][2]);
        lin[i] = li;
    }
    MultiPoly acc(3);
    for (const auto& term : h.terms()) {
        MultiPoly mono = MultiPoly::constant(3, term.second);
        for (int v = 0; v < 3; ++v)
            if (term.first[size_t(v)] > 0) mono = mono * lin[v].pow(term.first[size_t(v)]);
        acc = acc + mono;
    }
    return acc;
}

// top-degree part of a 3-variable polynomial (its behavior at infinity)
MultiPoly top_form(const MultiPoly& h) {
    int d = h.total_degree();
    MultiPoly out(3);
    for (const auto& term : h.terms()) {
        int td = term.first[0] + term.first[1] + term.first[2];
        if (td == d) out.set_coeff(term.first, term.second);
    }
    return out;
}

} // namespace

std::vector<InfinityPoint> SpaceCurve::points_at_infinity() const {
    MultiPoly f0 = top_form(f_);
    MultiPoly g0 = top_form(g_);
    const int target = deg_f_ * deg_g_;

    // two fixed generic projective frames; the second is the fallback when an
    // intersection point lands on the first frame's patch line
    const std::array<std::array<std::array<Complex, 3>, 3>, 2> frames = {{
        {{{{{0.7132, 0.0821}, {-0.3124, 0.2911}, {0.4421, -0.1212}}},
          {{{0.1412, -0.5223}, {0.6021, 0.1733}, {0.3811, 0.2914}}},
          {{{0.4913, 0.2217}, {0.2101, -0.4812}, {-0.5913, 0.1604}}}}},
        {{{{{-0.2417, 0.5113}, {0.6612, -0.1021}, {0.2317, 0.3912}}},
          {{{0.5811, 0.2213}, {-0.1419, 0.4516}, {0.5212, -0.2111}}},
          {{{0.3312, -0.4411}, {0.3914, 0.2812}, {-0.1913, 0.5514}}}}},
    }};

    for (const auto& frame : frames) {
        Eigen::Matrix3cd a;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) a(i, j) = frame[size_t(i)][size_t(j)];
        Eigen::Matrix3cd ainv = a.inverse();
        // xi = ainv * (u, v, 1)
        std::array<std::array<Complex, 3>, 3> l;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) l[size_t(i)][size_t(j)] = ainv(i, j);

        MultiPoly ft = compose_linear(f0, l);
        MultiPoly gt = compose_linear(g0, l);
        if (ft.degree_in(1) <= 0 || gt.degree_in(1) <= 0) continue;
        MultiPoly ru = resultant(ft, gt, 1);
        ru = ru.drop_small(1e-10 * std::max(ru.coeff_scale(), 1e-300));
        if (ru.is_zero() || ru.degree_in(0) != target) continue;

        std::vector<Complex> uroots = univariate_roots(ru.univariate_coeffs(0));
        double um = 1.0;
        for (Complex r : uroots) um = std::max(um, std::abs(r));
        std::vector<Cluster> uclusters = cluster_points(uroots, 1e-5 * um);

        std::vector<InfinityPoint> out;
        int total = 0;
        bool bad = false;
        for (const Cluster& uc : uclusters) {
            MultiPoly fu = ft.substitute(0, uc.center);
            MultiPoly gu = gt.substitute(0, uc.center);
            const MultiPoly* solver = fu.degree_in(1) > 0 ? &fu : &gu;
            const MultiPoly* check = solver == &fu ? &gu : &fu;
            if (solver->degree_in(1) <= 0) {
                bad = true;
                break;
            }
            std::vector<Complex> vroots = univariate_roots(solver->univariate_coeffs(1));
            Complex best = 0.0;
            double bestval = 1e300;
            for (Complex v : vroots) {
                double cv = check->is_zero()
                                ? 0.0
                                : std::abs(check->eval({0.0, v, 0.0}));
                if (cv < bestval) {
                    bestval = cv;
                    best = v;
                }
            }
            double cs = std::max({fu.coeff_scale(), gu.coeff_scale(), 1e-300});
            if (bestval > 1e-4 * cs * std::pow(1.0 + std::abs(best), deg_f_ + deg_g_)) {
                bad = true;
                break;
            }
            Complex u = uc.center, v = best;
            if (uc.multiplicity == 1) {
                // Newton in (u, v) on the transformed pair
                for (int it = 0; it < 25; ++it) {
                    Complex fv = ft.eval({u, v, 0.0}), gv = gt.eval({u, v, 0.0});
                    Complex j11 = ft.partial(0).eval({u, v, 0.0});
                    Complex j12 = ft.partial(1).eval({u, v, 0.0});
                    Complex j21 = gt.partial(0).eval({u, v, 0.0});
                    Complex j22 = gt.partial(1).eval({u, v, 0.0});
                    Complex det = j11 * j22 - j12 * j21;
                    if (std::abs(det) < 1e-14) break;
                    Complex du = (j22 * fv - j12 * gv) / det;
                    Complex dv = (j11 * gv - j21 * fv) / det;
                    u -= du;
                    v -= dv;
                    if (std::max(std::abs(du), std::abs(dv)) < 1e-15 * (1.0 + std::abs(u) + std::abs(v)))
                        break;
                }
            }
            Eigen::Vector3cd uv1;
            uv1 << u, v, 1.0;
            Eigen::Vector3cd xi = ainv * uv1;
            int big = 0;
            for (int i = 1; i < 3; ++i)
                if (std::abs(xi(i)) > std::abs(xi(big))) big = i;
            Complex norm = xi(big);
            InfinityPoint ip;
            ip.xi = {xi(0) / norm, xi(1) / norm, xi(2) / norm, 0.0};
            ip.multiplicity = uc.multiplicity;
            out.push_back(ip);
            total += uc.multiplicity;
        }
        if (!bad && total == target) {
            std::sort(out.begin(), out.end(), [](const InfinityPoint& p, const InfinityPoint& q) {
                for (int i = 0; i < 3; ++i) {
                    double ap = std::arg(p.xi[size_t(i)]), aq = std::arg(q.xi[size_t(i)]);
                    if (std::abs(ap - aq) > 1e-9) return ap < aq;
                    double mp = std::abs(p.xi[size_t(i)]), mq = std::abs(q.xi[size_t(i)]);
                    if (std::abs(mp - mq) > 1e-9) return mp < mq;
                }
                return false;
            });
            return out;
        }
    }
    throw_convergence("points at infinity did not total the degree product in any frame");
}

SmoothnessReport SpaceCurve::smoothness_check(int samples, unsigned seed,
                                              double min_ratio) const {
    MultiPoly fh = f_.homogenize();
    MultiPoly gh = g_.homogenize();
    MultiPoly fhp[4], ghp[4];
    for (int v = 0; v < 4; ++v) {
        fhp[v] = fh.partial(v);
        ghp[v] = gh.partial(v);
    }

    SmoothnessReport report;
    report.passed = true;
    report.samples = 0;
    report.worst_ratio = 1.0;
    report.worst_point = std::nullopt;

    auto test_homog = [&](const std::array<Complex, 4>& xi) {
        double nrm = 0.0;
        for (const Complex& c : xi) nrm = std::max(nrm, std::abs(c));
        if (nrm == 0.0) return;
        std::array<Complex, 4> z;
        for (int i = 0; i < 4; ++i) z[size_t(i)] = xi[size_t(i)] / nrm;
        std::vector<Complex> p{z[0], z[1], z[2], z[3]};
        Eigen::MatrixXcd jac(2, 4);
        for (int v = 0; v < 4; ++v) {
            jac(0, v) = fhp[v].eval(p);
            jac(1, v) = ghp[v].eval(p);
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(jac);
        double smax = svd.singularValues()(0);
        double smin = svd.singularValues()(1);
        double ratio = smax > 0.0 ? smin / smax : 0.0;
        report.samples++;
        if (ratio < report.worst_ratio) {
            report.worst_ratio = ratio;
            report.worst_point = z;
        }
        if (ratio < min_ratio) report.passed = false;
    };

    // the delicate places first: sheet collisions and the divisor at infinity
    try {
        for (const BranchPoint& bp : branch_points()) {
            FiberResult fib = fiber(bp.x1);
            for (const CurvePoint& pt : fib.points)
                test_homog({pt.x[0], pt.x[1], pt.x[2], 1.0});
        }
    } catch (const Error&) {
        report.passed = false;
    }
    try {
        for (const InfinityPoint& ip : points_at_infinity())
            test_homog(ip.xi);
    } catch (const Error&) {
        report.passed = false;
    }

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int attempts = 0;
    while (report.samples < samples && attempts < samples * 4) {
        attempts++;
        double radius = (attempts % 3 == 0) ? 5.0 : 1.5;
        double r = radius * std::sqrt(unit(rng));
        double th = 2.0 * M_PI * unit(rng);
        Complex a = std::polar(r, th);
        try {
            FiberResult fib = fiber(a);
            for (const CurvePoint& pt : fib.points) {
                if (report.samples >= samples) break;
                test_homog({pt.x[0], pt.x[1], pt.x[2], 1.0});
            }
        } catch (const Error&) {
            continue;
        }
    }
    return report;
}

PlaneCurve::PlaneCurve(MultiPoly f, double tolerance) : f_(std::move(f)), tol_(tolerance) {
    if (f_.nvars() != 2)
        throw_usage("plane curve needs a polynomial in x1, x2");
    if (f_.is_zero() || f_.degree_in(1) <= 0)
        throw_usage("plane curve polynomial must depend on x2");
    if (tol_ <= 0.0 || tol_ >= 1.0)
        throw_usage("tolerance must lie in (0, 1)");
    f1_ = f_.partial(0);
    f2_ = f_.partial(1);
    scale_ = f_.coeff_scale();
}

double PlaneCurve::on_curve_tol() const { return std::max(tol_, 1e-12) * 100.0; }

std::vector<Complex> PlaneCurve::fiber(Complex x1) const {
    MultiPoly fa = f_.substitute(0, x1);
    if (fa.degree_in(1) <= 0)
        throw_domain("plane fiber degenerates at this base point");
    std::vector<Complex> roots = univariate_roots(fa.univariate_coeffs(1));
    for (Complex& r : roots) {
        for (int it = 0; it < 10; ++it) {
            Complex fv = f_.eval({x1, r});
            Complex dv = f2_.eval({x1, r});
            if (std::abs(dv) < 1e-14 * scale_) break;
            Complex step = fv / dv;
            r -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(r))) break;
        }
    }
    return roots;
}

bool PlaneCurve::smooth_at(Complex x1, Complex x2) const {
    double g1 = std::abs(f1_.eval({x1, x2}));
    double g2 = std::abs(f2_.eval({x1, x2}));
    return std::max(g1, g2) > 1e-8 * scale_;
}

HyperellipticCurve::HyperellipticCurve(std::vector<double> a) : a_(std::move(a)) {
    if (a_.size() < 5 || a_.size() % 2 == 0)
        throw_usage("coefficient array must have odd length 2g + 3");
}

int HyperellipticCurve::genus() const { return (int(a_.size()) - 3) / 2; }

Complex HyperellipticCurve::p(Complex x) const {
    Complex acc = 0.0;
    Complex xp = 1.0;
    for (double c : a_) {
        acc += c * xp;
        xp *= x;
    }
    return acc;
}

Complex HyperellipticCurve::r(Complex x, Complex xp) const {
    Complex acc = 0.0;
    Complex prod = x * xp;
    Complex prod_pow = 1.0;
    for (size_t j = 0; j < a_.size(); ++j) {
        if (j % 2 == 0) {
            acc += a_[j] * prod_pow;
            prod_pow *= prod; // advance (x x')^k on even indices
        } else {
            acc += 0.5 * a_[j] * (x + xp) * prod_pow;
        }
    }
    return acc;
}

Complex HyperellipticCurve::y(Complex x, int sheet) const {
    if (sheet != 1 && sheet != -1)
        throw_usage("sheet must be +1 or -1");
    return double(sheet) * std::sqrt(p(x));
}

Complex Genus4View::coeff(int i, int k, int l) const {
    if (i < 1 || i > 3 || k < 0 || l < 0)
        throw_usage("coefficient index out of range");
    return h[size_t(i - 1)].coeff({k, l, 0, 0});
}

MultiPoly genus4_f(const std::vector<std::tuple<int, int, int, Complex>>& entries) {
    MultiPoly f(3);
    f.set_coeff({0, 0, 3, 0}, 1.0);
    for (const auto& [i, k, l, value] : entries) {
        if (i < 1 || i > 3 || k < 0 || l < 0 || k + l > 3)
            throw_usage("family coefficient index out of range");
        Exponents e{k, l, 3 - i, 0};
        f.set_coeff(e, f.coeff(e) + value);
    }
    return f;
}

MultiPoly genus4_g() {
    MultiPoly g(3);
    g.set_coeff({0, 1, 1, 0}, 1.0);
    g.set_coeff({1, 0, 0, 0}, -1.0);
    return g;
}

std::optional<Genus4View> genus4_view(const SpaceCurve& curve) {
    if (!(curve.g() == genus4_g())) return std::nullopt;
    const MultiPoly& f = curve.f();
    if (f.degree_in(2) != 3 || f.total_degree() != 3) return std::nullopt;
    auto layers = f.coeffs_in(2);
    if (!(layers[3] == MultiPoly::constant(3, 1.0))) return std::nullopt;
    Genus4View view;
    view.h[0] = layers[2];
    view.h[1] = layers[1];
    view.h[2] = layers[0];
    for (const MultiPoly& hi : view.h)
        if (hi.degree_in(2) > 0) return std::nullopt;
    return view;
}

} // namespace weierkern
