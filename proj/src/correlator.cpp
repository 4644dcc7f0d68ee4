#include "weierkern/correlator.hpp"

#include "weierkern/diffbasis.hpp"
#include "weierkern/errors.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace weierkern {

namespace {

KernelVariant pick_variant(const SpaceCurve& curve) {
    return genus4_view(curve) ? KernelVariant::Genus4 : KernelVariant::Compact;
}

std::vector<Triple> polish_all(const SpaceCurve& curve, const std::vector<Triple>& pts) {
    std::vector<Triple> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(curve.make_point(p).x);
    return out;
}

double condition_of(const Eigen::MatrixXcd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    double smin = svd.singularValues().minCoeff();
    double smax = svd.singularValues().maxCoeff();
    return smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
}

// kernel-column entry plus the optional spurious shift in the basis span
Eigen::MatrixXcd correlator_matrix(const SpaceCurve& curve, int lambda,
                                   const std::vector<Triple>& b_points,
                                   const std::vector<Triple>& c_points,
                                   const std::array<Complex, 4>* shift) {
    const int n = int(c_points.size());
    const int extra = lambda == 2 ? 9 : 4;
    const int ncols = lambda == 2 ? n + 9 : n + 3;
    if (int(b_points.size()) != ncols)
        throw_usage("weight " + std::to_string(lambda) + " needs " + std::to_string(ncols) +
                    " b points for " + std::to_string(n) + " c points");
    if (lambda == 1 && n < 1) throw_usage("weight 1 needs at least one c point");

    std::vector<Triple> bp = polish_all(curve, b_points);
    std::vector<Triple> cp = polish_all(curve, c_points);
    std::vector<BasisElement> basis = holomorphic_basis(curve, lambda);
    KernelVariant variant = pick_variant(curve);

    std::optional<Genus4View> view;
    std::vector<std::array<Complex, 4>> asym;
    if (shift != nullptr) {
        view = genus4_view(curve);
        if (!view) throw_usage("the spurious shift needs the cubic family form");
        for (const auto& c : cp) asym.push_back(asymptotic_coeffs(*view, c));
    }

    const int kernel_cols = lambda == 2 ? n : n - 1;
    Eigen::MatrixXcd m(ncols, ncols);
    for (int alpha = 0; alpha < ncols; ++alpha) {
        const Triple& p = bp[size_t(alpha)];
        for (int beta = 0; beta < kernel_cols; ++beta) {
            Complex entry;
            if (lambda == 2) {
                entry = quadratic_kernel(curve, p, cp[size_t(beta)]).coeff;
                if (shift != nullptr)
                    for (int i = 0; i < 4; ++i)
                        entry += (*shift)[size_t(i)] *
                                 basis_eval(curve, basis[size_t(i)], p).coeff *
                                 asym[size_t(beta)][size_t(i)];
            } else {
                entry = third_kind(curve, variant, p, cp[size_t(beta)], cp[size_t(n - 1)]).coeff;
                if (shift != nullptr)
                    for (int i = 0; i < 4; ++i)
                        entry += (*shift)[size_t(i)] *
                                 basis_eval(curve, basis[size_t(i)], p).coeff *
                                 (asym[size_t(beta)][size_t(i)] - asym[size_t(n - 1)][size_t(i)]);
            }
            m(alpha, beta) = entry;
        }
        for (int j = 0; j < extra; ++j)
            m(alpha, kernel_cols + j) = basis_eval(curve, basis[size_t(j)], p).coeff;
    }
    return m;
}

} // namespace

CorrelatorResult bc_correlator(const SpaceCurve& curve, int lambda,
                               const std::vector<Triple>& b_points,
                               const std::vector<Triple>& c_points) {
    if (lambda != 1 && lambda != 2) throw_usage("lambda must be 1 or 2");
    Eigen::MatrixXcd m = correlator_matrix(curve, lambda, b_points, c_points, nullptr);
    CorrelatorResult out;
    out.det = Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant();
    out.condition = condition_of(m);
    out.size = int(m.rows());
    return out;
}

double spurious_invariance_delta(const SpaceCurve& curve, int lambda,
                                 const std::vector<Triple>& b_points,
                                 const std::vector<Triple>& c_points,
                                 const std::array<Complex, 4>& shift) {
    if (lambda != 1 && lambda != 2) throw_usage("lambda must be 1 or 2");
    Eigen::MatrixXcd m0 = correlator_matrix(curve, lambda, b_points, c_points, nullptr);
    Eigen::MatrixXcd m1 = correlator_matrix(curve, lambda, b_points, c_points, &shift);
    Complex d0 = Eigen::PartialPivLU<Eigen::MatrixXcd>(m0).determinant();
    Complex d1 = Eigen::PartialPivLU<Eigen::MatrixXcd>(m1).determinant();
    return std::abs(d1 - d0) / std::max(std::abs(d0), 1e-300);
}

GreenResult green_function(const SpaceCurve& curve, const Triple& p, const Triple& q,
                           const Triple& qp, const GridConfig& config) {
    Triple pp = curve.make_point(p).x;
    Triple qq = curve.make_point(q).x;
    Triple qq2 = curve.make_point(qp).x;
    KernelVariant variant = pick_variant(curve);

    std::vector<BasisElement> basis = holomorphic_basis(curve, 1);
    FormFn nu = [&curve, variant, qq, qq2](const CurvePoint& x) {
        return third_kind(curve, variant, x.x, qq, qq2);
    };
    std::vector<FormFn> omega;
    for (int j = 0; j < 4; ++j)
        omega.push_back([&curve, &basis, j](const CurvePoint& x) {
            return basis_eval(curve, basis[size_t(j)], x.x);
        });

    SingularitySet excl;
    for (const auto& bp : curve.branch_points()) excl.affine.push_back(bp.x1);
    excl.affine.push_back(qq[0]);
    excl.affine.push_back(qq2[0]);

    std::vector<FormFn> forms_a{nu, omega[0], omega[1], omega[2], omega[3]};
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < 4; ++i) pairs.emplace_back(0, i);
    for (int j = 1; j <= 4; ++j)
        for (int i = 0; i < 4; ++i) pairs.emplace_back(j, i);
    std::vector<QuadratureResult> ints =
        surface_integral_multi(curve, forms_a, omega, pairs, excl, config);

    Eigen::Vector4cd pnu;
    Eigen::Matrix4cd gram;
    for (int i = 0; i < 4; ++i) pnu(i) = ints[size_t(i)].value;
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) gram(i, j) = ints[size_t(4 + 4 * j + i)].value;

    Eigen::MatrixXcd m(5, 5);
    m(0, 0) = nu(CurvePoint{pp, curve.residual(pp)}).coeff;
    for (int j = 0; j < 4; ++j)
        m(0, j + 1) = omega[size_t(j)](CurvePoint{pp, curve.residual(pp)}).coeff;
    for (int i = 0; i < 4; ++i) {
        m(i + 1, 0) = pnu(i);
        for (int j = 0; j < 4; ++j) m(i + 1, j + 1) = gram(i, j);
    }

    GreenResult out;
    out.raw_det = Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant();
    out.gram_det = gram.determinant();
    out.normalized = out.raw_det / out.gram_det;
    out.condition = condition_of(m);

    // periods vanish for nu + sum c_j omega_j; re-integrate the assembled form
    Eigen::Vector4cd coef = gram.partialPivLu().solve(-pnu);
    FormFn assembled = [&](const CurvePoint& x) {
        DifferentialValue v = nu(x);
        for (int j = 0; j < 4; ++j) v.coeff += coef(j) * omega[size_t(j)](x).coeff;
        return v;
    };
    std::vector<FormFn> fa2{assembled};
    std::vector<std::pair<int, int>> pairs2;
    for (int i = 0; i < 4; ++i) pairs2.emplace_back(0, i);
    std::vector<QuadratureResult> redo =
        surface_integral_multi(curve, fa2, omega, pairs2, excl, config);
    for (int i = 0; i < 4; ++i) out.period_residuals[size_t(i)] = std::abs(redo[size_t(i)].value);

    ContourSpec at_q;
    at_q.center = qq[0];
    at_q.anchor = qq;
    ContourSpec at_qp;
    at_qp.center = qq2[0];
    at_qp.anchor = qq2;
    Complex res_q = contour_residue(curve, assembled, at_q);
    Complex res_qp = contour_residue(curve, assembled, at_qp);
    out.residue_ratio = res_q / res_qp;
    return out;
}

} // namespace weierkern
