#pragma once

#include <array>
#include <complex>
#include <map>
#include <string>
#include <vector>

namespace weierkern {

using Complex = std::complex<double>;

// Exponent tuple; slots beyond nvars stay zero.
using Exponents = std::array<int, 4>;

// Orders monomials by descending total degree, ties broken so that a larger
// exponent on an earlier variable comes first. Map iteration in this order is
// the canonical term order used by printing and evaluation.
struct GradedLexDesc {
    bool operator()(const Exponents& a, const Exponents& b) const {
        int da = a[0] + a[1] + a[2] + a[3];
        int db = b[0] + b[1] + b[2] + b[3];
        if (da != db) return da > db;
        for (int k = 0; k < 4; ++k)
            if (a[k] != b[k]) return a[k] > b[k];
        return false;
    }
};

// Sparse multivariate polynomial with complex double coefficients.
// Stored coefficients are never exactly zero and never non-finite; -0.0
// components are normalized to +0.0 so printing is sign-stable.
class MultiPoly {
public:
    using TermMap = std::map<Exponents, Complex, GradedLexDesc>;

    explicit MultiPoly(int nvars = 1);

    static MultiPoly constant(int nvars, Complex c);
    static MultiPoly variable(int nvars, int index);

    // Parses the expression grammar: variables from `variables`, decimal
    // literals with optional `i` suffix, operators + - * ^ (tightest last),
    // parentheses, explicit * only, whitespace insignificant.
    static MultiPoly parse(const std::string& text,
                           const std::vector<std::string>& variables);

    int nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // -1 for the zero polynomial.
    int total_degree() const;
    int degree_in(int var) const;

    // Largest coefficient magnitude; 0 for the zero polynomial.
    double coeff_scale() const;

    Complex coeff(const Exponents& e) const;
    void set_coeff(const Exponents& e, Complex c);

    bool operator==(const MultiPoly& o) const {
        return nvars_ == o.nvars_ && terms_ == o.terms_;
    }

    MultiPoly operator-() const;
    MultiPoly operator+(const MultiPoly& o) const;
    MultiPoly operator-(const MultiPoly& o) const;
    MultiPoly operator*(const MultiPoly& o) const;
    MultiPoly operator*(Complex c) const;
    MultiPoly pow(int k) const;

    MultiPoly partial(int var) const;

    Complex eval(const std::vector<Complex>& point) const;
    // Same evaluation from a raw pointer; power tables stay on the stack for
    // degrees within the construction bound, so no allocation happens.
    Complex eval(const Complex* point, int arity) const;

    MultiPoly substitute(int var, const MultiPoly& q) const;
    MultiPoly substitute(int var, Complex value) const;

    // Coefficients of var^k, ascending in k, with var zeroed out of each.
    std::vector<MultiPoly> coeffs_in(int var) const;

    // Ascending scalar coefficients; requires no other variable to appear.
    std::vector<Complex> univariate_coeffs(int var) const;

    // 3-variable polynomial to its 4-variable homogenization; slot 3 carries
    // the balancing power.
    MultiPoly homogenize() const;

    // Copy without terms of magnitude <= abs_tol. Not applied by arithmetic;
    // callers invoke it deliberately before e.g. root finding.
    MultiPoly drop_small(double abs_tol) const;

    // Canonical form: terms in map order, shortest round-trip decimals,
    // parseable back to the identical polynomial.
    std::string print(const std::vector<std::string>& names) const;

private:
    int nvars_;
    TermMap terms_;

    void add_term(const Exponents& e, Complex c);
    void check_internal_degree() const;
};

// Sylvester determinant eliminating `var`, with q's coefficient rows placed
// first; evaluated at roots-of-unity samples of the remaining variables and
// interpolated back, so each sample is one pivoted scalar determinant.
// Vanishes at the projection of every common root of (p, q).
MultiPoly resultant(const MultiPoly& p, const MultiPoly& q, int var);

// Quotient num/den when den divides num up to roundoff; residual terms below
// 1e-10 of the running scale are discarded, anything larger is an error.
MultiPoly divide_exact(const MultiPoly& num, const MultiPoly& den);

// Shortest decimal string that strtod-round-trips to exactly v.
std::string format_double(double v);

} // namespace weierkern
