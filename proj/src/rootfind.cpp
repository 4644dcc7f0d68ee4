#include "weierkern/rootfind.hpp"

#include "weierkern/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace weierkern {

Complex horner(const std::vector<Complex>& coeffs, Complex z) {
    Complex acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        acc = acc * z + *it;
    return acc;
}

Complex horner_derivative(const std::vector<Complex>& coeffs, Complex z) {
    Complex acc = 0.0;
    for (int k = int(coeffs.size()) - 1; k >= 1; --k)
        acc = acc * z + double(k) * coeffs[size_t(k)];
    return acc;
}

Complex divided_difference(const std::vector<Complex>& c, Complex a, Complex b) {
    // sum_k c_k sum_{j=0}^{k-1} a^j b^{k-1-j}, the quotient of h(t) - h(b)
    // by (t - b) evaluated at a
    Complex total = 0.0;
    for (int k = int(c.size()) - 1; k >= 1; --k) {
        Complex inner = 0.0;
        Complex apow = 1.0;
        for (int j = 0; j < k; ++j) {
            Complex bpow = 1.0;
            for (int m = 0; m < k - 1 - j; ++m) bpow *= b;
            inner += apow * bpow;
            apow *= a;
        }
        total += c[size_t(k)] * inner;
    }
    return total;
}

namespace {

// Roots of the dense polynomial q, degree >= 1, nonzero leading coefficient.
// Closed forms handle degrees one and two; higher degrees go through the
// companion matrix.
std::vector<Complex> dense_roots(const std::vector<Complex>& q) {
    const int d = int(q.size()) - 1;
    if (d == 1)
        return {-q[0] / q[1]};
    if (d == 2) {
        Complex disc = std::sqrt(q[1] * q[1] - 4.0 * q[2] * q[0]);
        // pick the half of -b -+ sqrt(disc) that avoids cancellation
        Complex t = std::real(std::conj(q[1]) * disc) >= 0.0 ? -(q[1] + disc)
                                                             : -(q[1] - disc);
        t *= 0.5;
        if (std::abs(t) == 0.0) return {Complex(0.0), Complex(0.0)};
        return {t / q[2], q[0] / t};
    }
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) companion(i, d - 1) = -q[size_t(i)] / q.back();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw_convergence("companion matrix eigensolve failed");
    std::vector<Complex> out(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) out[size_t(i)] = solver.eigenvalues()(i);
    return out;
}

} // namespace

std::vector<Complex> univariate_roots(const std::vector<Complex>& coeffs, double lead_tol) {
    double scale = 0.0;
    for (const Complex& c : coeffs) scale = std::max(scale, std::abs(c));
    if (scale == 0.0)
        throw_domain("root finding on the zero polynomial");

    std::vector<Complex> c = coeffs;
    while (!c.empty() && std::abs(c.back()) <= lead_tol * scale)
        c.pop_back();
    if (c.size() <= 1)
        return {};

    const int n = int(c.size()) - 1;

    // structural sparsity: coefficients at roundoff level act as zeros for
    // the initial guesses while the Newton polish still runs on the full
    // polynomial, so the guesses only need to land in the right basins
    const double ztol = 1e-14 * scale;
    int low = 0;
    while (low < n && std::abs(c[size_t(low)]) <= ztol) ++low;
    int stride = 0;
    for (int k = low; k <= n; ++k)
        if (std::abs(c[size_t(k)]) > ztol) stride = std::gcd(stride, k - low);
    if (stride == 0) stride = 1;

    std::vector<Complex> guesses;
    guesses.reserve(size_t(n));
    for (int i = 0; i < low; ++i) guesses.push_back(0.0);
    if (low < n) {
        // c(z) ~ z^low * q(z^stride); each root of q fans out into its
        // stride-th roots
        const int d = (n - low) / stride;
        std::vector<Complex> q(size_t(d) + 1);
        for (int k = 0; k <= d; ++k) q[size_t(k)] = c[size_t(low + k * stride)];
        for (Complex w : dense_roots(q)) {
            if (stride == 1) {
                guesses.push_back(w);
                continue;
            }
            double r = std::pow(std::abs(w), 1.0 / stride);
            double th = std::arg(w) / stride;
            for (int j = 0; j < stride; ++j)
                guesses.push_back(std::polar(r, th + 2.0 * M_PI * j / stride));
        }
    }

    std::vector<Complex> roots;
    roots.reserve(guesses.size());
    for (Complex z : guesses) {
        // Newton refinement; multiple roots leave the step ineffective, keep
        // the guess then
        for (int it = 0; it < 12; ++it) {
            Complex p = horner(c, z);
            Complex dp = horner_derivative(c, z);
            if (std::abs(dp) < 1e-14 * scale) break;
            Complex step = p / dp;
            if (!std::isfinite(std::abs(step))) break;
            z -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
        }
        roots.push_back(z);
    }
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        double aa = std::arg(a), ab = std::arg(b);
        if (std::abs(aa - ab) > 1e-12) return aa < ab;
        if (std::abs(std::abs(a) - std::abs(b)) > 1e-14) return std::abs(a) < std::abs(b);
        return false;
    });
    return roots;
}

std::vector<Cluster> cluster_points(const std::vector<Complex>& pts, double tol) {
    const size_t n = pts.size();
    std::vector<int> label(n, -1);
    int groups = 0;
    for (size_t i = 0; i < n; ++i) {
        if (label[i] >= 0) continue;
        label[i] = groups++;
        // grow the group transitively
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t j = 0; j < n; ++j) {
                if (label[j] >= 0) continue;
                for (size_t k = 0; k < n; ++k) {
                    if (label[k] == label[i] && std::abs(pts[j] - pts[k]) <= tol) {
                        label[j] = label[i];
                        changed = true;
                        break;
                    }
                }
            }
        }
    }
    std::vector<Cluster> out(static_cast<size_t>(groups));
    std::vector<int> counts(size_t(groups), 0);
    for (auto& cl : out) cl.center = 0.0;
    for (size_t i = 0; i < n; ++i) {
        out[size_t(label[i])].center += pts[i];
        counts[size_t(label[i])]++;
    }
    for (int gidx = 0; gidx < groups; ++gidx) {
        out[size_t(gidx)].center /= double(counts[size_t(gidx)]);
        out[size_t(gidx)].multiplicity = counts[size_t(gidx)];
    }
    std::sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) {
        double aa = std::arg(a.center), ab = std::arg(b.center);
        if (std::abs(aa - ab) > 1e-12) return aa < ab;
        return std::abs(a.center) < std::abs(b.center);
    });
    return out;
}

} // namespace weierkern
