// Exact multivariate polynomials in the mode variables x1..xn whose
// coefficients are ScalarExpr values over the outcome variables s1..sm,
// together with the symmetric-tensor view and a text parser.
// Monomial order is graded lexicographic throughout, so iteration order --
// and therefore every serialized artifact -- is deterministic.
#pragma once

#include <cctype>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "cvqc/scalar_expr.hpp"

namespace cvqc {

using Mono = std::vector<int>;

inline int mono_degree(const Mono& m) { return std::accumulate(m.begin(), m.end(), 0); }

struct MonoGradedLex {
    bool operator()(const Mono& a, const Mono& b) const {
        int da = mono_degree(a), db = mono_degree(b);
        if (da != db) return da < db;
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
};

class Poly {
  public:
    using Terms = std::map<Mono, ScalarExpr, MonoGradedLex>;

    Poly() : n_(0) {}
    explicit Poly(int n) : n_(n) {}

    static Poly zero(int n) { return Poly(n); }
    static Poly constant(int n, ScalarExpr c) {
        Poly p(n);
        p.add_term(Mono(n, 0), std::move(c));
        return p;
    }
    static Poly constant(int n, i64 c) { return constant(n, ScalarExpr::constant(c)); }
    // x_{i+1} as a polynomial on n modes
    static Poly x(int n, int i) {
        Poly p(n);
        Mono m(n, 0);
        m.at(i) = 1;
        p.add_term(m, ScalarExpr::constant(1));
        return p;
    }
    static Poly monomial(int n, Mono m, ScalarExpr c) {
        Poly p(n);
        p.add_term(std::move(m), std::move(c));
        return p;
    }

    int modes() const { return n_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    int degree() const {
        if (terms_.empty()) return 0;
        return mono_degree(terms_.rbegin()->first);
    }

    bool is_homogeneous() const {
        if (terms_.empty()) return true;
        int d = degree();
        for (auto& [m, c] : terms_)
            if (mono_degree(m) != d) return false;
        return true;
    }

    ScalarExpr coeff(const Mono& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? ScalarExpr::constant(0) : it->second;
    }

    void add_term(Mono m, ScalarExpr c) {
        if (int(m.size()) != n_) throw std::invalid_argument("poly: monomial arity mismatch");
        if (c.is_zero()) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(std::move(m), std::move(c));
            return;
        }
        ScalarExpr s = it->second + c;
        if (s.is_zero_exact())
            terms_.erase(it);
        else
            it->second = std::move(s);
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        if (a.n_ != b.n_) throw std::invalid_argument("poly: mode count mismatch in add");
        Poly out = a;
        for (auto& [m, c] : b.terms_) out.add_term(m, c);
        return out;
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + b.scaled(ScalarExpr::constant(-1)); }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.n_ != b.n_) throw std::invalid_argument("poly: mode count mismatch in mul");
        Poly out(a.n_);
        for (auto& [ma, ca] : a.terms_)
            for (auto& [mb, cb] : b.terms_) {
                Mono m(a.n_);
                for (int i = 0; i < a.n_; ++i) m[i] = ma[i] + mb[i];
                out.add_term(std::move(m), ca * cb);
            }
        return out;
    }
    Poly operator-() const { return scaled(ScalarExpr::constant(-1)); }

    Poly scaled(const ScalarExpr& c) const {
        Poly out(n_);
        if (c.is_zero()) return out;
        for (auto& [m, v] : terms_) out.add_term(m, v * c);
        return out;
    }

    Poly pow(int e) const {
        Poly acc = constant(n_, 1);
        for (int i = 0; i < e; ++i) acc = acc * *this;
        return acc;
    }

    std::vector<Poly> grad() const {
        std::vector<Poly> out;
        out.reserve(n_);
        for (int i = 0; i < n_; ++i) {
            Poly d(n_);
            for (auto& [m, c] : terms_) {
                if (m[i] == 0) continue;
                Mono mm = m;
                mm[i] -= 1;
                d.add_term(std::move(mm), c * ScalarExpr::constant(m[i]));
            }
            out.push_back(std::move(d));
        }
        return out;
    }

    // f(Mx + b): rows of M correspond to this polynomial's variables, columns
    // to the target variables.
    Poly substitute_affine(const std::vector<std::vector<ScalarExpr>>& M,
                           const std::vector<ScalarExpr>& b) const {
        if (int(M.size()) != n_ || int(b.size()) != n_)
            throw std::invalid_argument("substitute_affine: row count must match poly modes");
        int m = n_ == 0 ? 0 : int(M[0].size());
        for (auto& row : M)
            if (int(row.size()) != m) throw std::invalid_argument("substitute_affine: ragged matrix");
        // linear replacement polynomials, one per original variable
        std::vector<Poly> lin;
        lin.reserve(n_);
        for (int i = 0; i < n_; ++i) {
            Poly L(m);
            for (int j = 0; j < m; ++j) {
                Mono mm(m, 0);
                mm[j] = 1;
                L.add_term(std::move(mm), M[i][j]);
            }
            L.add_term(Mono(m, 0), b[i]);
            lin.push_back(std::move(L));
        }
        // cache powers per variable up to its max exponent
        std::vector<int> maxe(n_, 0);
        for (auto& [mo, c] : terms_)
            for (int i = 0; i < n_; ++i) maxe[i] = std::max(maxe[i], mo[i]);
        std::vector<std::vector<Poly>> pw(n_);
        for (int i = 0; i < n_; ++i) {
            pw[i].push_back(constant(m, 1));
            for (int e = 1; e <= maxe[i]; ++e) pw[i].push_back(pw[i][e - 1] * lin[i]);
        }
        Poly out(m);
        for (auto& [mo, c] : terms_) {
            Poly t = constant(m, c);
            for (int i = 0; i < n_; ++i)
                if (mo[i]) t = t * pw[i][mo[i]];
            out = out + t;
        }
        return out;
    }

    // f on n modes, g on m modes -> f(x1..xn) + g(x_{n+1}..x_{n+m})
    static Poly direct_sum(const Poly& f, const Poly& g) {
        Poly out(f.n_ + g.n_);
        for (auto& [m, c] : f.terms_) {
            Mono mm = m;
            mm.resize(f.n_ + g.n_, 0);
            out.add_term(std::move(mm), c);
        }
        for (auto& [m, c] : g.terms_) {
            Mono mm(f.n_ + g.n_, 0);
            std::copy(m.begin(), m.end(), mm.begin() + f.n_);
            out.add_term(std::move(mm), c);
        }
        return out;
    }

    // Shift variables right by `offset` inside a space of `total` modes.
    Poly embedded(int total, int offset) const {
        Poly out(total);
        for (auto& [m, c] : terms_) {
            Mono mm(total, 0);
            std::copy(m.begin(), m.end(), mm.begin() + offset);
            out.add_term(std::move(mm), c);
        }
        return out;
    }

    Poly homogeneous_part(int k) const {
        Poly out(n_);
        for (auto& [m, c] : terms_)
            if (mono_degree(m) == k) out.add_term(m, c);
        return out;
    }

    Poly truncated_above(int k) const {
        Poly out(n_);
        for (auto& [m, c] : terms_)
            if (mono_degree(m) <= k) out.add_term(m, c);
        return out;
    }

    // Directional derivative (v . grad) f, v given over this poly's modes.
    Poly dir_deriv(const std::vector<ScalarExpr>& v) const {
        if (int(v.size()) != n_) throw std::invalid_argument("dir_deriv: vector arity");
        Poly out(n_);
        auto g = grad();
        for (int i = 0; i < n_; ++i) out = out + g[i].scaled(v[i]);
        return out;
    }

    // Tensor contraction: the polynomial of F v^{(x)j} where F is the
    // symmetric tensor of this (homogeneous) polynomial.
    Poly contract(const std::vector<ScalarExpr>& v, int j) const {
        if (!is_homogeneous()) throw std::invalid_argument("contract: polynomial not homogeneous");
        int k = degree();
        if (j > k) throw std::invalid_argument("contract: order exceeded");
        Poly out = *this;
        for (int t = 0; t < j; ++t) out = out.dir_deriv(v);
        return out.scaled(ScalarExpr::constant(Rational(factorial(k - j), factorial(k))));
    }

    // Substitute scalar expressions for the mode variables.
    ScalarExpr eval_scalar(const std::vector<ScalarExpr>& xs) const {
        if (int(xs.size()) != n_) throw std::invalid_argument("eval: point arity");
        std::vector<ScalarExpr> terms;
        for (auto& [m, c] : terms_) {
            std::vector<ScalarExpr> fac{c};
            for (int i = 0; i < n_; ++i)
                if (m[i]) fac.push_back(ScalarExpr::pow(xs[i], Rational(m[i])));
            terms.push_back(ScalarExpr::prod(std::move(fac)));
        }
        return ScalarExpr::sum(std::move(terms));
    }

    ScalarExpr eval_rational_point(const std::vector<Rational>& xs) const {
        std::vector<ScalarExpr> p;
        p.reserve(xs.size());
        for (auto& r : xs) p.push_back(ScalarExpr::constant(r));
        return eval_scalar(p);
    }

    // Numeric coefficients at a (real) outcome sample; principal branch.
    std::map<Mono, std::complex<long double>, MonoGradedLex>
    coeffs_complex(const std::vector<long double>& s) const {
        std::map<Mono, std::complex<long double>, MonoGradedLex> out;
        for (auto& [m, c] : terms_) out[m] = c.eval_complex(s);
        return out;
    }

    bool coeffs_depend_on_s() const {
        for (auto& [m, c] : terms_)
            if (c.depends_on_vars()) return true;
        return false;
    }

    int max_s_var() const {
        int mx = -1;
        for (auto& [m, c] : terms_) mx = std::max(mx, c.max_var());
        return mx;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            auto& [m, c] = *it;
            std::string cs = c.str();
            bool neg = cs.size() > 1 && cs[0] == '-' && c.is_const();
            if (!first) out += neg ? " - " : " + ";
            else if (neg) out += "-";
            if (neg) cs = cs.substr(1);
            bool trivial_coeff = c.is_const() && (cs == "1");
            bool wrap = !c.is_const();
            std::string mono;
            for (int i = 0; i < n_; ++i) {
                if (!m[i]) continue;
                if (!mono.empty()) mono += "*";
                mono += "x" + std::to_string(i + 1);
                if (m[i] > 1) mono += "^" + std::to_string(m[i]);
            }
            if (mono.empty())
                out += wrap ? "(" + cs + ")" : cs;
            else if (trivial_coeff)
                out += mono;
            else
                out += (wrap ? "(" + cs + ")" : cs) + "*" + mono;
            first = false;
        }
        return out;
    }

  private:
    int n_;
    Terms terms_;
};

// Symmetric tensor of a fixed order over n modes; canonical storage keyed by
// the sorted index tuple, entries are the tensor values themselves (the
// multinomial bookkeeping against polynomial coefficients lives here and
// nowhere else).
class SymTensor {
  public:
    SymTensor(int order, int dim) : order_(order), dim_(dim) {}

    int order() const { return order_; }
    int dim() const { return dim_; }

    static SymTensor from_poly(const Poly& f) {
        if (!f.is_homogeneous()) throw std::invalid_argument("SymTensor: polynomial not homogeneous");
        int k = f.degree();
        SymTensor t(k, f.modes());
        for (auto& [m, c] : f.terms()) {
            std::vector<int> idx;
            for (int i = 0; i < f.modes(); ++i)
                for (int e = 0; e < m[i]; ++e) idx.push_back(i);
            t.table_[idx] = c * ScalarExpr::constant(Rational(1, multinomial(m)));
        }
        return t;
    }

    Poly to_poly() const {
        Poly p(dim_);
        for (auto& [idx, v] : table_) {
            Mono m(dim_, 0);
            for (int i : idx) m[i] += 1;
            p.add_term(std::move(m), v * ScalarExpr::constant(multinomial(m)));
        }
        return p;
    }

    // Accessor symmetrizes: any index order returns the canonical entry.
    ScalarExpr entry(std::vector<int> idx) const {
        if (int(idx.size()) != order_) throw std::invalid_argument("SymTensor: index arity");
        std::sort(idx.begin(), idx.end());
        auto it = table_.find(idx);
        return it == table_.end() ? ScalarExpr::constant(0) : it->second;
    }

    void set_entry(std::vector<int> idx, ScalarExpr v) {
        std::sort(idx.begin(), idx.end());
        if (v.is_zero())
            table_.erase(idx);
        else
            table_[idx] = std::move(v);
    }

    const std::map<std::vector<int>, ScalarExpr>& table() const { return table_; }

  private:
    int order_;
    int dim_;
    std::map<std::vector<int>, ScalarExpr> table_;
};

// ---- polynomial text front end ----
//
// Terms like `3/2*x1^2*x2 - x3^4 + s1*x1`; `p` variables are only accepted
// where the operator-algebra front end asks for them.

namespace parse_detail {

struct Token {
    enum Type { Num, Sym, Op, End } type;
    Rational num;
    char sym_kind = 0; // 'x', 's', 'p'
    int sym_index = 0; // 1-based as written
    char op = 0;
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : t_(text) {}

    Token next() {
        while (p_ < t_.size() && std::isspace((unsigned char)t_[p_])) ++p_;
        if (p_ >= t_.size()) return {Token::End, Rational(0), 0, 0, 0};
        char c = t_[p_];
        if (std::isdigit((unsigned char)c)) {
            std::size_t start = p_;
            while (p_ < t_.size() && std::isdigit((unsigned char)t_[p_])) ++p_;
            i64 num = std::stoll(t_.substr(start, p_ - start));
            if (p_ < t_.size() && t_[p_] == '/') {
                std::size_t save = p_;
                ++p_;
                std::size_t dstart = p_;
                while (p_ < t_.size() && std::isdigit((unsigned char)t_[p_])) ++p_;
                if (dstart == p_) { p_ = save; return {Token::Num, Rational(num), 0, 0, 0}; }
                i64 den = std::stoll(t_.substr(dstart, p_ - dstart));
                return {Token::Num, Rational(num, den), 0, 0, 0};
            }
            return {Token::Num, Rational(num), 0, 0, 0};
        }
        if (c == 'x' || c == 's' || c == 'p') {
            std::size_t start = p_ + 1;
            std::size_t q = start;
            while (q < t_.size() && std::isdigit((unsigned char)t_[q])) ++q;
            if (q == start) throw std::invalid_argument(std::string("expected index after '") + c + "'");
            int idx = std::stoi(t_.substr(start, q - start));
            p_ = q;
            return {Token::Sym, Rational(0), c, idx, 0};
        }
        if (c == '+' || c == '-' || c == '*' || c == '^' || c == '(' || c == ')') {
            ++p_;
            return {Token::Op, Rational(0), 0, 0, c};
        }
        throw std::invalid_argument(std::string("unexpected character '") + c + "' in polynomial");
    }

  private:
    const std::string& t_;
    std::size_t p_ = 0;
};

} // namespace parse_detail

// Parser producing an exact Poly; s-symbols become coefficient variables,
// p-symbols are rejected here (quadrature gates are x-only).
class PolyParser {
  public:
    explicit PolyParser(const std::string& text) : lex_(text) { advance(); }

    // nmodes < 0 infers the mode count from the largest x index.
    static Poly parse(const std::string& text, int nmodes = -1) {
        PolyParser p(text);
        ParsedExpr e = p.parse_expr();
        p.expect_end();
        int n = nmodes >= 0 ? nmodes : p.max_x_;
        if (nmodes >= 0 && p.max_x_ > nmodes)
            throw std::invalid_argument("polynomial uses more modes than declared");
        return e.to_poly(n);
    }

  private:
    // parse into (coefficient-free) structure first so the mode count can be
    // decided after the walk
    struct ParsedExpr {
        // list of (scalar, x-exponent map)
        struct Term {
            ScalarExpr c = ScalarExpr::constant(1);
            std::map<int, int> xexp; // 0-based var -> exponent
        };
        std::vector<Term> terms;

        static ParsedExpr constant(ScalarExpr c) {
            ParsedExpr e;
            e.terms.push_back({std::move(c), {}});
            return e;
        }
        static ParsedExpr xvar(int idx0) {
            ParsedExpr e;
            Term t;
            t.xexp[idx0] = 1;
            e.terms.push_back(std::move(t));
            return e;
        }
        ParsedExpr operator+(const ParsedExpr& o) const {
            ParsedExpr e = *this;
            e.terms.insert(e.terms.end(), o.terms.begin(), o.terms.end());
            return e;
        }
        ParsedExpr operator*(const ParsedExpr& o) const {
            ParsedExpr e;
            for (auto& a : terms)
                for (auto& b : o.terms) {
                    Term t;
                    t.c = a.c * b.c;
                    t.xexp = a.xexp;
                    for (auto& [v, ex] : b.xexp) t.xexp[v] += ex;
                    e.terms.push_back(std::move(t));
                }
            return e;
        }
        ParsedExpr negated() const {
            ParsedExpr e = *this;
            for (auto& t : e.terms) t.c = -t.c;
            return e;
        }
        ParsedExpr powed(int k) const {
            ParsedExpr acc = constant(ScalarExpr::constant(1));
            for (int i = 0; i < k; ++i) acc = acc * *this;
            return acc;
        }
        Poly to_poly(int n) const {
            Poly p(n);
            for (auto& t : terms) {
                Mono m(n, 0);
                for (auto& [v, ex] : t.xexp) m.at(v) = m.at(v) + ex;
                p.add_term(std::move(m), t.c);
            }
            return p;
        }
    };

    using Token = parse_detail::Token;

    void advance() { tok_ = lex_.next(); }
    bool is_op(char c) const { return tok_.type == Token::Op && tok_.op == c; }
    void expect_end() const {
        if (tok_.type != Token::End) throw std::invalid_argument("trailing input in polynomial");
    }

    ParsedExpr parse_expr() {
        bool neg = false;
        if (is_op('+')) advance();
        else if (is_op('-')) { neg = true; advance(); }
        ParsedExpr acc = parse_term();
        if (neg) acc = acc.negated();
        while (is_op('+') || is_op('-')) {
            bool minus = tok_.op == '-';
            advance();
            ParsedExpr t = parse_term();
            acc = acc + (minus ? t.negated() : t);
        }
        return acc;
    }

    ParsedExpr parse_term() {
        ParsedExpr acc = parse_factor();
        while (is_op('*') || tok_.type == Token::Sym || tok_.type == Token::Num || is_op('(')) {
            if (is_op('*')) advance();
            acc = acc * parse_factor();
        }
        return acc;
    }

    ParsedExpr parse_factor() {
        ParsedExpr base = parse_primary();
        if (is_op('^')) {
            advance();
            if (tok_.type != Token::Num || !tok_.num.is_integer() || tok_.num.sign() < 0)
                throw std::invalid_argument("exponent must be a nonnegative integer");
            int k = int(tok_.num.num());
            advance();
            return base.powed(k);
        }
        return base;
    }

    ParsedExpr parse_primary() {
        if (tok_.type == Token::Num) {
            ScalarExpr c = ScalarExpr::constant(tok_.num);
            advance();
            return ParsedExpr::constant(std::move(c));
        }
        if (tok_.type == Token::Sym) {
            char k = tok_.sym_kind;
            int idx = tok_.sym_index;
            advance();
            if (idx < 1) throw std::invalid_argument("symbol indices start at 1");
            if (k == 'x') {
                max_x_ = std::max(max_x_, idx);
                return ParsedExpr::xvar(idx - 1);
            }
            if (k == 's') return ParsedExpr::constant(ScalarExpr::var(idx - 1));
            throw std::invalid_argument("p variables are not allowed in a quadrature-gate polynomial");
        }
        if (is_op('(')) {
            advance();
            ParsedExpr e = parse_expr();
            if (!is_op(')')) throw std::invalid_argument("missing ')'");
            advance();
            return e;
        }
        throw std::invalid_argument("malformed polynomial");
    }

    parse_detail::Lexer lex_;
    Token tok_{Token::End, Rational(0), 0, 0, 0};
    int max_x_ = 0;
};

inline Poly parse_poly(const std::string& text, int nmodes = -1) {
    return PolyParser::parse(text, nmodes);
}

// Numeric polynomial (double coefficients).  The diamond/physical frame is
// evaluated only at numeric outcomes, which is where this type lives.
class NumPoly {
  public:
    NumPoly() : n_(0) {}
    explicit NumPoly(int n) : n_(n) {}

    static NumPoly constant(int n, double c) {
        NumPoly p(n);
        p.add_term(Mono(n, 0), c);
        return p;
    }

    int modes() const { return n_; }
    const std::map<Mono, double, MonoGradedLex>& terms() const { return terms_; }

    void add_term(Mono m, double c) {
        if (int(m.size()) != n_) throw std::invalid_argument("numpoly: arity");
        auto it = terms_.find(m);
        if (it == terms_.end()) terms_.emplace(std::move(m), c);
        else it->second += c;
    }

    friend NumPoly operator+(const NumPoly& a, const NumPoly& b) {
        NumPoly out = a;
        for (auto& [m, c] : b.terms_) out.add_term(m, c);
        return out;
    }
    friend NumPoly operator*(const NumPoly& a, const NumPoly& b) {
        NumPoly out(a.n_);
        for (auto& [ma, ca] : a.terms_)
            for (auto& [mb, cb] : b.terms_) {
                Mono m(a.n_);
                for (int i = 0; i < a.n_; ++i) m[i] = ma[i] + mb[i];
                out.add_term(std::move(m), ca * cb);
            }
        return out;
    }
    NumPoly scaled(double c) const {
        NumPoly out(n_);
        for (auto& [m, v] : terms_) out.add_term(m, v * c);
        return out;
    }

    static NumPoly from_exact(const Poly& p, const std::vector<long double>& s) {
        NumPoly out(p.modes());
        for (auto& [m, c] : p.terms()) out.add_term(m, double(c.eval_real(s)));
        return out;
    }

    // f(Mx + b) with numeric M (rows = this poly's modes), b offsets.
    NumPoly substitute_affine(const std::vector<std::vector<double>>& M,
                              const std::vector<double>& b) const {
        int m = n_ == 0 ? 0 : int(M.at(0).size());
        std::vector<NumPoly> lin;
        for (int i = 0; i < n_; ++i) {
            NumPoly L(m);
            for (int j = 0; j < m; ++j) {
                Mono mm(m, 0);
                mm[j] = 1;
                L.add_term(std::move(mm), M.at(i).at(j));
            }
            L.add_term(Mono(m, 0), b.at(i));
            lin.push_back(std::move(L));
        }
        std::vector<int> maxe(n_, 0);
        for (auto& [mo, c] : terms_)
            for (int i = 0; i < n_; ++i) maxe[i] = std::max(maxe[i], mo[i]);
        std::vector<std::vector<NumPoly>> pw(n_);
        for (int i = 0; i < n_; ++i) {
            pw[i].push_back(constant(m, 1.0));
            for (int e = 1; e <= maxe[i]; ++e) pw[i].push_back(pw[i][e - 1] * lin[i]);
        }
        NumPoly out(m);
        for (auto& [mo, c] : terms_) {
            NumPoly t = constant(m, c);
            for (int i = 0; i < n_; ++i)
                if (mo[i]) t = t * pw[i][mo[i]];
            out = out + t;
        }
        return out;
    }

    std::vector<NumPoly> grad() const {
        std::vector<NumPoly> out;
        for (int i = 0; i < n_; ++i) {
            NumPoly d(n_);
            for (auto& [m, c] : terms_) {
                if (m[i] == 0) continue;
                Mono mm = m;
                mm[i] -= 1;
                d.add_term(std::move(mm), c * m[i]);
            }
            out.push_back(std::move(d));
        }
        return out;
    }

    double eval(const std::vector<double>& x) const {
        double acc = 0;
        for (auto& [m, c] : terms_) {
            double t = c;
            for (int i = 0; i < n_; ++i)
                for (int e = 0; e < m[i]; ++e) t *= x[i];
            acc += t;
        }
        return acc;
    }

    double max_coeff_above_degree(int k) const {
        double m = 0;
        for (auto& [mo, c] : terms_)
            if (mono_degree(mo) > k) m = std::max(m, std::abs(c));
        return m;
    }
    double max_coeff() const {
        double m = 0;
        for (auto& [mo, c] : terms_) m = std::max(m, std::abs(c));
        return m;
    }

  private:
    int n_;
    std::map<Mono, double, MonoGradedLex> terms_;
};

} // namespace cvqc
