#include "weierkern/poly.hpp"
#include "weierkern/errors.hpp"

#include <Eigen/Dense>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace weierkern {

namespace {

// Hard ceiling for intermediate results (products and resultants exceed the
// public construction bound by a wide margin).
constexpr int kInternalDegreeCap = 1024;
constexpr int kPublicDegreeCap = 64;
constexpr double kPi = 3.14159265358979323846;

Complex normalize(Complex c) {
    double re = c.real(), im = c.imag();
    if (re == 0.0) re = 0.0;
    if (im == 0.0) im = 0.0;
    return {re, im};
}

int term_degree(const Exponents& e) { return e[0] + e[1] + e[2] + e[3]; }

} // namespace

MultiPoly::MultiPoly(int nvars) : nvars_(nvars) {
    if (nvars < 1 || nvars > 4)
        throw_usage("polynomial arity must be between 1 and 4");
}

MultiPoly MultiPoly::constant(int nvars, Complex c) {
    MultiPoly p(nvars);
    p.add_term({0, 0, 0, 0}, c);
    return p;
}

MultiPoly MultiPoly::variable(int nvars, int index) {
    if (index < 0 || index >= nvars)
        throw_usage("variable index out of range");
    MultiPoly p(nvars);
    Exponents e{0, 0, 0, 0};
    e[index] = 1;
    p.add_term(e, 1.0);
    return p;
}

void MultiPoly::add_term(const Exponents& e, Complex c) {
    for (int k = nvars_; k < 4; ++k)
        if (e[k] != 0)
            throw_usage("exponent set beyond polynomial arity");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw_domain("non-finite polynomial coefficient");
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        if (c != 0.0) terms_.emplace(e, normalize(c));
        return;
    }
    Complex s = it->second + c;
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw_domain("non-finite polynomial coefficient");
    if (s == 0.0)
        terms_.erase(it);
    else
        it->second = normalize(s);
}

void MultiPoly::check_internal_degree() const {
    if (!terms_.empty() && term_degree(terms_.begin()->first) > kInternalDegreeCap)
        throw_domain("polynomial degree exceeds internal cap");
}

int MultiPoly::total_degree() const {
    if (terms_.empty()) return -1;
    return term_degree(terms_.begin()->first);
}

int MultiPoly::degree_in(int var) const {
    if (var < 0 || var >= nvars_)
        throw_usage("variable index out of range");
    int d = -1;
    for (const auto& [e, c] : terms_) {
        (void)c;
        if (e[var] > d) d = e[var];
    }
    return d;
}

double MultiPoly::coeff_scale() const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) {
        (void)e;
        s = std::max(s, std::abs(c));
    }
    return s;
}

Complex MultiPoly::coeff(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Complex(0.0) : it->second;
}

void MultiPoly::set_coeff(const Exponents& e, Complex c) {
    terms_.erase(e);
    if (c != 0.0) add_term(e, c);
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly r(nvars_);
    for (const auto& [e, c] : terms_)
        r.terms_.emplace(e, normalize(-c));
    return r;
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
    if (nvars_ != o.nvars_) throw_usage("polynomial arity mismatch");
    MultiPoly r = *this;
    for (const auto& [e, c] : o.terms_)
        r.add_term(e, c);
    return r;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const {
    if (nvars_ != o.nvars_) throw_usage("polynomial arity mismatch");
    MultiPoly r = *this;
    for (const auto& [e, c] : o.terms_)
        r.add_term(e, -c);
    return r;
}

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
    if (nvars_ != o.nvars_) throw_usage("polynomial arity mismatch");
    MultiPoly r(nvars_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            Exponents e{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]};
            r.add_term(e, ca * cb);
        }
    }
    r.check_internal_degree();
    return r;
}

MultiPoly MultiPoly::operator*(Complex c) const {
    MultiPoly r(nvars_);
    if (c == 0.0) return r;
    for (const auto& [e, tc] : terms_)
        r.add_term(e, tc * c);
    return r;
}

MultiPoly MultiPoly::pow(int k) const {
    if (k < 0) throw_usage("negative polynomial power");
    MultiPoly r = constant(nvars_, 1.0);
    for (int i = 0; i < k; ++i)
        r = r * (*this);
    return r;
}

MultiPoly MultiPoly::partial(int var) const {
    if (var < 0 || var >= nvars_)
        throw_usage("variable index out of range");
    MultiPoly r(nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponents d = e;
        d[var] -= 1;
        r.add_term(d, c * double(e[var]));
    }
    return r;
}

Complex MultiPoly::eval(const std::vector<Complex>& point) const {
    return eval(point.data(), (int)point.size());
}

Complex MultiPoly::eval(const Complex* point, int arity) const {
    if (arity != nvars_)
        throw_usage("evaluation point arity mismatch");
    std::array<int, 4> maxe{0, 0, 0, 0};
    for (const auto& [e, c] : terms_) {
        (void)c;
        for (int k = 0; k < nvars_; ++k)
            maxe[k] = std::max(maxe[k], e[k]);
    }
    // stack power tables cover every publicly constructible degree; the heap
    // path only triggers for oversized internal products
    constexpr int kStackPow = kPublicDegreeCap;
    Complex buf[4][kStackPow + 1];
    std::array<std::vector<Complex>, 4> spill;
    std::array<Complex*, 4> pows{};
    for (int k = 0; k < nvars_; ++k) {
        Complex* table;
        if (maxe[k] <= kStackPow) {
            table = buf[k];
        } else {
            spill[k].resize(size_t(maxe[k]) + 1);
            table = spill[k].data();
        }
        table[0] = 1.0;
        for (int j = 1; j <= maxe[k]; ++j)
            table[j] = table[j - 1] * point[k];
        pows[k] = table;
    }
    Complex s = 0.0;
    for (const auto& [e, c] : terms_) {
        Complex m = c;
        for (int k = 0; k < nvars_; ++k)
            m *= pows[k][e[k]];
        s += m;
    }
    return s;
}

std::vector<MultiPoly> MultiPoly::coeffs_in(int var) const {
    if (var < 0 || var >= nvars_)
        throw_usage("variable index out of range");
    int d = degree_in(var);
    std::vector<MultiPoly> out(std::max(d + 1, 1), MultiPoly(nvars_));
    for (const auto& [e, c] : terms_) {
        Exponents r = e;
        int k = r[var];
        r[var] = 0;
        out[k].add_term(r, c);
    }
    return out;
}

std::vector<Complex> MultiPoly::univariate_coeffs(int var) const {
    if (var < 0 || var >= nvars_)
        throw_usage("variable index out of range");
    for (const auto& [e, c] : terms_) {
        (void)c;
        for (int k = 0; k < nvars_; ++k)
            if (k != var && e[k] != 0)
                throw_usage("polynomial is not univariate in the requested variable");
    }
    int d = degree_in(var);
    std::vector<Complex> out(std::max(d + 1, 1), Complex(0.0));
    for (const auto& [e, c] : terms_)
        out[e[var]] = c;
    return out;
}

MultiPoly MultiPoly::substitute(int var, const MultiPoly& q) const {
    if (var < 0 || var >= nvars_)
        throw_usage("variable index out of range");
    if (q.nvars_ != nvars_)
        throw_usage("polynomial arity mismatch");
    auto cs = coeffs_in(var);
    MultiPoly r = cs.back();
    for (int k = (int)cs.size() - 2; k >= 0; --k)
        r = r * q + cs[(size_t)k];
    return r;
}

MultiPoly MultiPoly::substitute(int var, Complex value) const {
    return substitute(var, constant(nvars_, value));
}

MultiPoly MultiPoly::homogenize() const {
    if (nvars_ != 3)
        throw_usage("homogenization requires a 3-variable polynomial");
    MultiPoly r(4);
    int d = total_degree();
    if (d < 0) return r;
    if (d > kPublicDegreeCap)
        throw_usage("polynomial degree exceeds construction bound");
    for (const auto& [e, c] : terms_) {
        Exponents h = e;
        h[3] = d - term_degree(e);
        r.add_term(h, c);
    }
    return r;
}

MultiPoly MultiPoly::drop_small(double abs_tol) const {
    MultiPoly r(nvars_);
    for (const auto& [e, c] : terms_)
        if (std::abs(c) > abs_tol)
            r.terms_.emplace(e, c);
    return r;
}

// ---------------------------------------------------------------------------
// Printing

std::string format_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string MultiPoly::print(const std::vector<std::string>& names) const {
    if ((int)names.size() != nvars_)
        throw_usage("variable name list arity mismatch");
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        std::string mono;
        for (int k = 0; k < nvars_; ++k) {
            if (e[k] == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += names[(size_t)k];
            if (e[k] > 1) mono += "^" + std::to_string(e[k]);
        }
        double re = c.real(), im = c.imag();
        int sign = +1;
        std::string body;
        if (im == 0.0) {
            sign = re < 0 ? -1 : +1;
            double a = std::fabs(re);
            if (mono.empty())
                body = format_double(a);
            else if (a == 1.0)
                body = mono;
            else
                body = format_double(a) + "*" + mono;
        } else if (re == 0.0) {
            sign = im < 0 ? -1 : +1;
            body = format_double(std::fabs(im)) + "i";
            if (!mono.empty()) body += "*" + mono;
        } else {
            body = "(" + format_double(re) + (im < 0 ? "-" : "+") +
                   format_double(std::fabs(im)) + "i)";
            if (!mono.empty()) body += "*" + mono;
        }
        if (first) {
            if (sign < 0) out += "-";
            out += body;
            first = false;
        } else {
            out += sign < 0 ? " - " : " + ";
            out += body;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
    enum Kind { Number, Name, Plus, Minus, Star, Caret, LParen, RParen, End };
    Kind kind;
    Complex value{0.0};
    std::string text;
    std::size_t offset = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& s) : s_(s) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;
    Token tok_;

    void advance() {
        while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_]))
            ++pos_;
        tok_ = Token{};
        tok_.offset = pos_;
        if (pos_ >= s_.size()) {
            tok_.kind = Token::End;
            return;
        }
        char c = s_[pos_];
        switch (c) {
            case '+': tok_.kind = Token::Plus;   ++pos_; return;
            case '-': tok_.kind = Token::Minus;  ++pos_; return;
            case '*': tok_.kind = Token::Star;   ++pos_; return;
            case '^': tok_.kind = Token::Caret;  ++pos_; return;
            case '(': tok_.kind = Token::LParen; ++pos_; return;
            case ')': tok_.kind = Token::RParen; ++pos_; return;
            default: break;
        }
        if (std::isdigit((unsigned char)c) || c == '.') {
            lex_number();
            return;
        }
        if (std::isalpha((unsigned char)c)) {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum((unsigned char)s_[pos_]) || s_[pos_] == '_'))
                ++pos_;
            tok_.kind = Token::Name;
            tok_.text = s_.substr(start, pos_ - start);
            return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    void lex_number() {
        std::size_t start = pos_;
        bool saw_digit = false;
        while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) {
            ++pos_;
            saw_digit = true;
        }
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) {
                ++pos_;
                saw_digit = true;
            }
        }
        if (!saw_digit)
            throw ParseError("malformed number", start);
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t mark = pos_ + 1;
            if (mark < s_.size() && (s_[mark] == '+' || s_[mark] == '-')) ++mark;
            if (mark < s_.size() && std::isdigit((unsigned char)s_[mark])) {
                pos_ = mark;
                while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_]))
                    ++pos_;
            }
        }
        std::string lexeme = s_.substr(start, pos_ - start);
        double v = std::strtod(lexeme.c_str(), nullptr);
        bool imaginary = pos_ < s_.size() && s_[pos_] == 'i';
        if (imaginary) ++pos_;
        tok_.kind = Token::Number;
        tok_.text = lexeme;
        tok_.value = imaginary ? Complex(0.0, v) : Complex(v, 0.0);
    }
};

class Parser {
public:
    Parser(const std::string& text, const std::vector<std::string>& variables)
        : lex_(text), vars_(variables) {}

    MultiPoly run() {
        MultiPoly p = expr();
        if (lex_.peek().kind != Token::End)
            throw ParseError("trailing input after expression", lex_.peek().offset);
        return p;
    }

private:
    Lexer lex_;
    const std::vector<std::string>& vars_;

    int nvars() const { return (int)vars_.size(); }

    MultiPoly expr() {
        int sign = +1;
        if (lex_.peek().kind == Token::Plus) {
            lex_.take();
        } else if (lex_.peek().kind == Token::Minus) {
            lex_.take();
            sign = -1;
        }
        MultiPoly acc = term();
        if (sign < 0) acc = -acc;
        for (;;) {
            Token::Kind k = lex_.peek().kind;
            if (k == Token::Plus) {
                lex_.take();
                acc = acc + term();
            } else if (k == Token::Minus) {
                lex_.take();
                acc = acc - term();
            } else {
                return acc;
            }
        }
    }

    MultiPoly term() {
        MultiPoly acc = factor();
        while (lex_.peek().kind == Token::Star) {
            lex_.take();
            acc = acc * factor();
        }
        return acc;
    }

    MultiPoly factor() {
        MultiPoly base = primary();
        if (lex_.peek().kind != Token::Caret)
            return base;
        lex_.take();
        Token t = lex_.peek();
        if (t.kind != Token::Number)
            throw ParseError("expected exponent after '^'", t.offset);
        lex_.take();
        bool integral = !t.text.empty() && t.value.imag() == 0.0;
        for (char c : t.text)
            if (!std::isdigit((unsigned char)c)) integral = false;
        if (!integral)
            throw ParseError("exponent is not a nonnegative integer", t.offset);
        return base.pow((int)t.value.real());
    }

    MultiPoly primary() {
        Token t = lex_.peek();
        if (t.kind == Token::Number) {
            lex_.take();
            return MultiPoly::constant(nvars(), t.value);
        }
        if (t.kind == Token::Name) {
            lex_.take();
            for (int k = 0; k < nvars(); ++k)
                if (vars_[(size_t)k] == t.text)
                    return MultiPoly::variable(nvars(), k);
            throw ParseError("unknown variable '" + t.text + "'", t.offset);
        }
        if (t.kind == Token::LParen) {
            lex_.take();
            MultiPoly p = expr();
            if (lex_.peek().kind != Token::RParen)
                throw ParseError("expected ')'", lex_.peek().offset);
            lex_.take();
            return p;
        }
        throw ParseError("expected number, variable, or '('", t.offset);
    }
};

} // namespace

MultiPoly MultiPoly::parse(const std::string& text,
                           const std::vector<std::string>& variables) {
    if (variables.empty() || variables.size() > 4)
        throw_usage("variable list must name 1 to 4 variables");
    Parser parser(text, variables);
    MultiPoly p = parser.run();
    if (p.total_degree() > kPublicDegreeCap)
        throw_usage("total degree exceeds 64");
    return p;
}

// ---------------------------------------------------------------------------
// Exact division and resultants

MultiPoly divide_exact(const MultiPoly& num, const MultiPoly& den) {
    if (den.is_zero())
        throw_domain("division by zero polynomial");
    if (num.is_zero())
        return MultiPoly(num.nvars());
    if (num.nvars() != den.nvars())
        throw_usage("polynomial arity mismatch");
    const double tol = 1e-10 * num.coeff_scale();
    const auto& dlead = *den.terms().begin();
    MultiPoly q(num.nvars());
    MultiPoly r = num;
    while (!r.is_zero()) {
        auto lead = *r.terms().begin();
        if (std::abs(lead.second) <= tol) {
            r.set_coeff(lead.first, 0.0);
            continue;
        }
        Exponents e;
        bool divisible = true;
        for (int k = 0; k < 4; ++k) {
            e[k] = lead.first[k] - dlead.first[k];
            if (e[k] < 0) divisible = false;
        }
        if (!divisible)
            throw_domain("inexact polynomial division");
        MultiPoly t(num.nvars());
        t.set_coeff(e, lead.second / dlead.second);
        q = q + t;
        r = r - t * den;
        // the leading term cancels by construction; force it structurally so
        // roundoff residue cannot stall the loop
        r.set_coeff(lead.first, 0.0);
    }
    return q;
}

MultiPoly resultant(const MultiPoly& p, const MultiPoly& q, int var) {
    if (p.nvars() != q.nvars())
        throw_usage("polynomial arity mismatch");
    if (p.is_zero() || q.is_zero())
        return MultiPoly(p.nvars());
    const int m = p.degree_in(var);
    const int n = q.degree_in(var);
    if (m <= 0 && n <= 0)
        throw_domain("resultant: both arguments constant in the elimination variable");
    const int nv = p.nvars();
    const int N = m + n;
    auto pasc = p.coeffs_in(var);
    auto qasc = q.coeffs_in(var);

    // Degree bound per surviving variable: every expansion term of the
    // determinant multiplies m entries from q's rows and n from p's.
    std::array<long, 4> dims{};
    std::vector<int> active;
    long samples = 1;
    for (int j = 0; j < nv; ++j) {
        if (j == var) continue;
        int dp = 0, dq = 0;
        for (const MultiPoly& c : pasc) dp = std::max(dp, c.degree_in(j));
        for (const MultiPoly& c : qasc) dq = std::max(dq, c.degree_in(j));
        long b = (long)n * dp + (long)m * dq;
        if (b > 0) {
            dims[active.size()] = b + 1;
            active.push_back(j);
            samples *= b + 1;
            if (samples > 400000)
                throw_domain("resultant exceeds supported size");
        }
    }

    // One scalar Sylvester determinant per tensor sample point; nodes are
    // roots of unity so coefficient recovery is an exact inverse DFT.
    std::vector<Complex> dets((size_t)samples);
    std::vector<Complex> point((size_t)nv, Complex(0.0));
    Eigen::MatrixXcd M(N, N);
    double maxdet = 0.0;
    for (long s = 0; s < samples; ++s) {
        long rem = s;
        for (int t = (int)active.size() - 1; t >= 0; --t) {
            long k = rem % dims[(size_t)t];
            rem /= dims[(size_t)t];
            point[(size_t)active[(size_t)t]] =
                std::polar(1.0, 2.0 * kPi * (double)k / (double)dims[(size_t)t]);
        }
        M.setZero();
        for (int r = 0; r < m; ++r)
            for (int j = 0; j <= n; ++j)
                M(r, r + j) = qasc[(size_t)(n - j)].eval(point);
        for (int r = 0; r < n; ++r)
            for (int j = 0; j <= m; ++j)
                M(m + r, r + j) = pasc[(size_t)(m - j)].eval(point);
        Complex d = N == 1 ? M(0, 0) : M.partialPivLu().determinant();
        if (!std::isfinite(std::abs(d)))
            throw_convergence("resultant determinant overflow");
        dets[(size_t)s] = d;
        maxdet = std::max(maxdet, std::abs(d));
    }

    // Separable inverse DFT, one axis at a time over the flattened grid.
    for (size_t t = 0; t < active.size(); ++t) {
        long L = dims[t];
        long stride = 1;
        for (size_t u = t + 1; u < active.size(); ++u) stride *= dims[u];
        std::vector<Complex> line((size_t)L);
        for (long base = 0; base < samples; base += L * stride)
            for (long i = 0; i < stride; ++i) {
                for (long k = 0; k < L; ++k)
                    line[(size_t)k] = dets[(size_t)(base + i + k * stride)];
                for (long e = 0; e < L; ++e) {
                    Complex acc(0.0);
                    for (long k = 0; k < L; ++k)
                        acc += line[(size_t)k] *
                               std::polar(1.0, -2.0 * kPi * (double)(e * k) / (double)L);
                    dets[(size_t)(base + i + e * stride)] = acc / (double)L;
                }
            }
    }

    // DFT noise sits at machine precision of the largest sampled determinant.
    const double floor = 1e-11 * maxdet;
    MultiPoly out(nv);
    for (long s = 0; s < samples; ++s) {
        if (std::abs(dets[(size_t)s]) <= floor) continue;
        Exponents e{0, 0, 0, 0};
        long rem = s;
        for (int t = (int)active.size() - 1; t >= 0; --t) {
            e[(size_t)active[(size_t)t]] = (int)(rem % dims[(size_t)t]);
            rem /= dims[(size_t)t];
        }
        out.set_coeff(e, dets[(size_t)s]);
    }
    return out;
}

} // namespace weierkern
