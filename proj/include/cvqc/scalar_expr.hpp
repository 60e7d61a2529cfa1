// Symbolic expressions over the measurement-outcome variables s1, s2, ...
// with exact rational coefficients.  Nodes: constant, variable, sum, product
// and rational power.  Outcomes are assumed strictly positive, which is what
// makes fractional powers legitimate; powers of sign-indefinite subtrees are
// kept unsimplified and flagged by the sign-scan helpers.
//
// Equality strategy: expressions without fractional powers expand to an exact
// Laurent normal form; everything else is compared by sampling at positive
// rational points (no canonical form exists once fractional powers appear).
#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvqc/rational.hpp"
#include "cvqc/rng.hpp"

namespace cvqc {

// Laurent monomial over s-variables: sorted (var, exponent) pairs, exponents
// nonzero integers.
using LaurentMono = std::vector<std::pair<int, int>>;
using LaurentPoly = std::map<LaurentMono, Rational>;

struct SampleConfig {
    std::uint64_t seed = 0;
    int trials = 20;
    long double rel_tol = 1e-12L;
};

class ScalarExpr {
    enum class Kind { Const, Var, Sum, Prod, Pow };

    struct Node {
        Kind kind;
        Rational value;                   // Const; Pow exponent
        int var = -1;                     // Var
        std::vector<ScalarExpr> children; // Sum terms / Prod factors / Pow base at [0]
        std::string key;                  // canonical form, doubles as ordering key
    };

    std::shared_ptr<const Node> n_;

    explicit ScalarExpr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

    static ScalarExpr make(Kind k, Rational v, int var, std::vector<ScalarExpr> ch) {
        auto node = std::make_shared<Node>();
        node->kind = k;
        node->value = v;
        node->var = var;
        node->children = std::move(ch);
        node->key = build_key(*node);
        return ScalarExpr(std::move(node));
    }

    static std::string build_key(const Node& n) {
        switch (n.kind) {
            case Kind::Const: return "c" + n.value.str();
            case Kind::Var: return "s" + std::to_string(n.var);
            case Kind::Sum: {
                std::string k = "(+";
                for (auto& c : n.children) { k += " "; k += c.key(); }
                return k + ")";
            }
            case Kind::Prod: {
                std::string k = "(*";
                for (auto& c : n.children) { k += " "; k += c.key(); }
                return k + ")";
            }
            case Kind::Pow:
                return "(^ " + n.children[0].key() + " " + n.value.str() + ")";
        }
        return {};
    }

  public:
    ScalarExpr() : ScalarExpr(constant(Rational(0))) {}

    static ScalarExpr constant(const Rational& c) { return make(Kind::Const, c, -1, {}); }
    static ScalarExpr constant(i64 c) { return constant(Rational(c)); }
    // 0-based index: var(0) prints as s1.
    static ScalarExpr var(int idx) { return make(Kind::Var, Rational(0), idx, {}); }

    const std::string& key() const { return n_->key; }

    bool is_const() const { return n_->kind == Kind::Const; }
    bool is_zero() const { return is_const() && n_->value.is_zero(); }
    bool is_one() const { return is_const() && n_->value.is_one(); }
    const Rational& const_value() const {
        if (!is_const()) throw std::logic_error("ScalarExpr: not a constant");
        return n_->value;
    }
    std::optional<Rational> as_const() const {
        if (is_const()) return n_->value;
        return std::nullopt;
    }

    friend bool operator==(const ScalarExpr& a, const ScalarExpr& b) {
        return a.n_ == b.n_ || a.key() == b.key();
    }
    friend bool operator!=(const ScalarExpr& a, const ScalarExpr& b) { return !(a == b); }
    friend bool operator<(const ScalarExpr& a, const ScalarExpr& b) { return a.key() < b.key(); }

    // ---- canonicalizing constructors ----

    static ScalarExpr sum(std::vector<ScalarExpr> terms) {
        Rational c(0);
        std::map<std::string, std::pair<Rational, ScalarExpr>> groups;
        std::vector<ScalarExpr> flat;
        for (auto& t : terms) flatten_sum(t, flat);
        for (auto& t : flat) {
            if (t.is_const()) { c += t.const_value(); continue; }
            auto [coeff, core] = t.split_coeff();
            auto it = groups.find(core.key());
            if (it == groups.end())
                groups.emplace(core.key(), std::make_pair(coeff, core));
            else
                it->second.first += coeff;
        }
        std::vector<ScalarExpr> out;
        for (auto& [k, pr] : groups) {
            (void)k;
            if (pr.first.is_zero()) continue;
            out.push_back(pr.first.is_one() ? pr.second
                                            : prod({constant(pr.first), pr.second}));
        }
        if (out.empty()) return constant(c);
        if (!c.is_zero()) out.insert(out.begin(), constant(c));
        if (out.size() == 1) return out[0];
        return make(Kind::Sum, Rational(0), -1, std::move(out));
    }

    static ScalarExpr prod(std::vector<ScalarExpr> factors) {
        Rational c(1);
        std::map<std::string, std::pair<ScalarExpr, Rational>> bases; // base, exponent
        std::vector<ScalarExpr> flat;
        for (auto& f : factors) flatten_prod(f, flat);
        for (auto& f : flat) {
            if (f.is_const()) {
                c *= f.const_value();
                continue;
            }
            ScalarExpr base = f;
            Rational e(1);
            if (f.n_->kind == Kind::Pow) {
                base = f.n_->children[0];
                e = f.n_->value;
            }
            auto it = bases.find(base.key());
            if (it == bases.end())
                bases.emplace(base.key(), std::make_pair(base, e));
            else
                it->second.second += e;
        }
        if (c.is_zero()) return constant(0);
        std::vector<ScalarExpr> out;
        for (auto& [k, pr] : bases) {
            (void)k;
            ScalarExpr f = pow(pr.first, pr.second);
            if (f.is_one()) continue;
            if (f.is_const()) { c *= f.const_value(); continue; }
            out.push_back(f);
        }
        if (c.is_zero()) return constant(0);
        if (out.empty()) return constant(c);
        if (!c.is_one()) out.insert(out.begin(), constant(c));
        if (out.size() == 1) return out[0];
        return make(Kind::Prod, Rational(0), -1, std::move(out));
    }

    static ScalarExpr pow(const ScalarExpr& b, const Rational& e) {
        if (e.is_zero()) return constant(1);
        if (e.is_one()) return b;
        if (b.is_const()) {
            const Rational& c = b.const_value();
            if (c.is_one()) return constant(1);
            if (c.is_zero()) {
                if (e.sign() > 0) return constant(0);
                throw std::domain_error("ScalarExpr: 0 to a negative power");
            }
            if (e.is_integer()) return constant(c.pow(e.num()));
            // fractional power of a positive constant folds when the root is
            // exact (e.g. (1/6)^(1/2) stays symbolic, 4^(1/2) becomes 2)
            if (c.sign() > 0) {
                if (auto r = exact_root(c, e)) return constant(*r);
            }
            return make(Kind::Pow, e, -1, {b});
        }
        if (b.n_->kind == Kind::Pow)
            return pow(b.n_->children[0], b.n_->value * e);
        if (b.n_->kind == Kind::Prod) {
            // integer powers always distribute; fractional powers distribute
            // only across provably positive factors, anything sign-indefinite
            // stays under the root
            std::vector<ScalarExpr> outside, inside;
            for (auto& f : b.n_->children) {
                if (e.is_integer() || f.provably_positive())
                    outside.push_back(pow(f, e));
                else
                    inside.push_back(f);
            }
            if (inside.empty()) return prod(std::move(outside));
            if (!outside.empty()) {
                outside.push_back(make(Kind::Pow, e, -1, {prod(std::move(inside))}));
                return prod(std::move(outside));
            }
        }
        if (b.n_->kind == Kind::Sum && e.is_integer() && e.sign() > 0 && e.num() <= 4) {
            // small integer powers of sums expand; keeps zero detection exact
            ScalarExpr acc = constant(1);
            for (i64 i = 0; i < e.num(); ++i) acc = acc * b;
            return acc;
        }
        return make(Kind::Pow, e, -1, {b});
    }

    friend ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) { return sum({a, b}); }
    friend ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) {
        return sum({a, prod({constant(-1), b})});
    }
    friend ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) { return prod({a, b}); }
    ScalarExpr operator-() const { return prod({constant(-1), *this}); }

    // ---- structure queries ----

    bool provably_positive() const {
        switch (n_->kind) {
            case Kind::Const: return n_->value.sign() > 0;
            case Kind::Var: return true; // outcomes assumed positive
            case Kind::Sum: {
                for (auto& c : n_->children)
                    if (!c.provably_positive()) return false;
                return !n_->children.empty();
            }
            case Kind::Prod: {
                for (auto& c : n_->children)
                    if (!c.provably_positive()) return false;
                return true;
            }
            case Kind::Pow: return n_->children[0].provably_positive();
        }
        return false;
    }

    bool has_fractional_pow() const {
        if (n_->kind == Kind::Pow && !n_->value.is_integer()) return true;
        for (auto& c : n_->children)
            if (c.has_fractional_pow()) return true;
        return false;
    }

    // An even root applied to something not provably positive: the sign
    // problem in structural form (outcomes still assumed positive).
    bool has_even_root_of_indefinite() const {
        if (n_->kind == Kind::Pow) {
            const Rational& e = n_->value;
            if (!e.is_integer() && (e.den() % 2 == 0) && !n_->children[0].provably_positive())
                return true;
        }
        for (auto& c : n_->children)
            if (c.has_even_root_of_indefinite()) return true;
        return false;
    }

    // Same scan, but with outcome variables counted as sign-indefinite; this
    // is the question the duplicate sign mode asks (does the recipe stay real
    // for outcomes of either sign).
    bool has_even_root_unsigned() const {
        if (n_->kind == Kind::Pow) {
            const Rational& e = n_->value;
            if (!e.is_integer() && (e.den() % 2 == 0)) {
                const ScalarExpr& b = n_->children[0];
                if (!(b.is_const() && b.const_value().sign() > 0)) return true;
            }
        }
        for (auto& c : n_->children)
            if (c.has_even_root_unsigned()) return true;
        return false;
    }

    void collect_vars(std::vector<int>& vars) const {
        if (n_->kind == Kind::Var) vars.push_back(n_->var);
        for (auto& c : n_->children) c.collect_vars(vars);
    }
    int max_var() const {
        std::vector<int> v;
        collect_vars(v);
        int m = -1;
        for (int x : v) m = std::max(m, x);
        return m;
    }
    bool depends_on_vars() const { return max_var() >= 0; }

    // ---- exact normal form ----

    std::optional<LaurentPoly> to_laurent(std::size_t term_limit = 50000) const {
        switch (n_->kind) {
            case Kind::Const: {
                LaurentPoly p;
                if (!n_->value.is_zero()) p[{}] = n_->value;
                return p;
            }
            case Kind::Var: {
                LaurentPoly p;
                p[{{n_->var, 1}}] = Rational(1);
                return p;
            }
            case Kind::Sum: {
                LaurentPoly acc;
                for (auto& c : n_->children) {
                    auto q = c.to_laurent(term_limit);
                    if (!q) return std::nullopt;
                    for (auto& [m, v] : *q) {
                        auto it = acc.find(m);
                        if (it == acc.end())
                            acc.emplace(m, v);
                        else {
                            it->second += v;
                            if (it->second.is_zero()) acc.erase(it);
                        }
                    }
                    if (acc.size() > term_limit) return std::nullopt;
                }
                return acc;
            }
            case Kind::Prod: {
                LaurentPoly acc;
                acc[{}] = Rational(1);
                for (auto& c : n_->children) {
                    auto q = c.to_laurent(term_limit);
                    if (!q) return std::nullopt;
                    acc = laurent_mul(acc, *q);
                    if (acc.size() > term_limit) return std::nullopt;
                }
                return acc;
            }
            case Kind::Pow: {
                if (!n_->value.is_integer()) return std::nullopt;
                auto base = n_->children[0].to_laurent(term_limit);
                if (!base) return std::nullopt;
                i64 e = n_->value.num();
                if (e < 0) {
                    if (base->size() != 1) return std::nullopt; // true rational function
                    auto [m, v] = *base->begin();
                    LaurentMono mm;
                    for (auto [var, ex] : m) mm.push_back({var, int(e) * ex});
                    LaurentPoly p;
                    p[mm] = v.pow(e);
                    return p;
                }
                LaurentPoly acc;
                acc[{}] = Rational(1);
                for (i64 i = 0; i < e; ++i) {
                    acc = laurent_mul(acc, *base);
                    if (acc.size() > term_limit) return std::nullopt;
                }
                return acc;
            }
        }
        return std::nullopt;
    }

    bool is_zero_exact() const {
        if (is_zero()) return true;
        if (auto lp = to_laurent()) return lp->empty();
        return false;
    }

    // ---- evaluation ----

    // Exact evaluation at rational points; fails (nullopt) when a genuinely
    // fractional power shows up.
    std::optional<Rational> eval_rational(const std::vector<Rational>& s) const {
        switch (n_->kind) {
            case Kind::Const: return n_->value;
            case Kind::Var:
                if (n_->var >= int(s.size())) throw std::out_of_range("ScalarExpr: unbound s variable");
                return s[n_->var];
            case Kind::Sum: {
                Rational acc(0);
                for (auto& c : n_->children) {
                    auto v = c.eval_rational(s);
                    if (!v) return std::nullopt;
                    acc += *v;
                }
                return acc;
            }
            case Kind::Prod: {
                Rational acc(1);
                for (auto& c : n_->children) {
                    auto v = c.eval_rational(s);
                    if (!v) return std::nullopt;
                    acc *= *v;
                }
                return acc;
            }
            case Kind::Pow: {
                auto v = n_->children[0].eval_rational(s);
                if (!v) return std::nullopt;
                if (n_->value.is_integer()) return v->pow(n_->value.num());
                if (v->sign() > 0)
                    if (auto r = exact_root(*v, n_->value)) return r;
                return std::nullopt;
            }
        }
        return std::nullopt;
    }

    // Real evaluation with signed odd roots; throws on even roots of
    // non-positive values (the documented error path).
    long double eval_real(const std::vector<long double>& s) const {
        switch (n_->kind) {
            case Kind::Const: return n_->value.to_long_double();
            case Kind::Var:
                if (n_->var >= int(s.size())) throw std::out_of_range("ScalarExpr: unbound s variable");
                return s[n_->var];
            case Kind::Sum: {
                long double acc = 0;
                for (auto& c : n_->children) acc += c.eval_real(s);
                return acc;
            }
            case Kind::Prod: {
                long double acc = 1;
                for (auto& c : n_->children) acc *= c.eval_real(s);
                return acc;
            }
            case Kind::Pow: {
                long double b = n_->children[0].eval_real(s);
                const Rational& e = n_->value;
                if (e.is_integer()) {
                    if (b == 0.0L && e.sign() < 0)
                        throw std::domain_error("ScalarExpr: 0 to a negative power");
                    long double r = powl(fabsl(b), (long double)e.num());
                    if (b < 0 && (e.num() & 1)) r = -r;
                    return r;
                }
                if (b > 0) return powl(b, e.to_long_double());
                if (b == 0.0L) {
                    if (e.sign() > 0) return 0.0L;
                    throw std::domain_error("ScalarExpr: 0 to a negative power");
                }
                if (e.den() % 2 == 1) {
                    long double r = powl(-b, e.to_long_double());
                    return (e.num() & 1) ? -r : r;
                }
                throw std::domain_error("ScalarExpr: even root of a negative value");
            }
        }
        return 0;
    }

    // Principal-branch complex evaluation.  Used by chain certification so
    // that sign-problem configurations still verify the algebra.
    std::complex<long double> eval_complex(const std::vector<long double>& s) const {
        using C = std::complex<long double>;
        switch (n_->kind) {
            case Kind::Const: return C(n_->value.to_long_double(), 0);
            case Kind::Var:
                if (n_->var >= int(s.size())) throw std::out_of_range("ScalarExpr: unbound s variable");
                return C(s[n_->var], 0);
            case Kind::Sum: {
                C acc(0, 0);
                for (auto& c : n_->children) acc += c.eval_complex(s);
                return acc;
            }
            case Kind::Prod: {
                C acc(1, 0);
                for (auto& c : n_->children) acc *= c.eval_complex(s);
                return acc;
            }
            case Kind::Pow: {
                C b = n_->children[0].eval_complex(s);
                const Rational& e = n_->value;
                if (e.is_integer()) {
                    C acc(1, 0);
                    i64 k = e.num() < 0 ? -e.num() : e.num();
                    for (i64 i = 0; i < k; ++i) acc *= b;
                    return e.num() < 0 ? C(1, 0) / acc : acc;
                }
                return std::pow(b, C(e.to_long_double(), 0));
            }
        }
        return {};
    }

    // ---- sampled identity testing ----

    static std::vector<long double> sample_point(Rng& rng, int nvars) {
        std::vector<long double> s(nvars);
        for (auto& v : s) v = rng.positive_rational().to_long_double();
        return s;
    }

    bool sampled_zero(const SampleConfig& cfg = {}) const {
        int nv = max_var() + 1;
        Rng rng(cfg.seed);
        long double peak = 0;
        std::vector<long double> vals;
        for (int t = 0; t < cfg.trials; ++t) {
            auto pt = sample_point(rng, nv);
            auto v = eval_complex(pt);
            vals.push_back(std::abs(v));
            peak = std::max(peak, std::abs(v));
        }
        long double scale = sampled_scale(cfg);
        for (auto v : vals)
            if (v > cfg.rel_tol * std::max(scale, 1.0L)) return false;
        return true;
    }

    // Magnitude scale of the expression over the sampled points (used for
    // relative comparisons of coefficients).
    long double sampled_scale(const SampleConfig& cfg = {}) const {
        int nv = max_var() + 1;
        Rng rng(cfg.seed + 1);
        long double m = 0;
        for (int t = 0; t < cfg.trials; ++t) {
            auto pt = sample_point(rng, nv);
            m = std::max(m, std::abs(eval_complex(pt)));
        }
        return m;
    }

    static bool equal(const ScalarExpr& a, const ScalarExpr& b, const SampleConfig& cfg = {}) {
        if (a == b) return true;
        ScalarExpr d = a - b;
        if (auto lp = d.to_laurent()) return lp->empty();
        return d.sampled_zero(cfg);
    }

    // ---- printing ----

    std::string str() const {
        switch (n_->kind) {
            case Kind::Const: return n_->value.str();
            case Kind::Var: return "s" + std::to_string(n_->var + 1);
            case Kind::Sum: {
                std::string out;
                for (std::size_t i = 0; i < n_->children.size(); ++i) {
                    std::string t = n_->children[i].str();
                    if (i && t[0] != '-') out += "+";
                    out += t;
                }
                return out;
            }
            case Kind::Prod: {
                std::string out;
                for (std::size_t i = 0; i < n_->children.size(); ++i) {
                    if (i) out += "*";
                    const auto& c = n_->children[i];
                    bool paren = c.n_->kind == Kind::Sum;
                    // leading -1 collapses to a sign
                    if (i == 0 && c.is_const() && c.const_value() == Rational(-1) &&
                        n_->children.size() > 1) {
                        out = "-";
                        continue;
                    }
                    if (out == "-" && !paren) { out += c.str(); continue; }
                    out += paren ? "(" + c.str() + ")" : c.str();
                }
                return out;
            }
            case Kind::Pow: {
                const auto& b = n_->children[0];
                bool paren = b.n_->kind == Kind::Sum || b.n_->kind == Kind::Prod ||
                             (b.is_const() && !b.const_value().is_integer());
                std::string bs = paren ? "(" + b.str() + ")" : b.str();
                std::string es = n_->value.is_integer() ? n_->value.str()
                                                        : "(" + n_->value.str() + ")";
                return bs + "^" + es;
            }
        }
        return {};
    }

    // Portable prefix form used in circuit files: (+ ...), (* ...),
    // (^ base p/q), (s k), rationals verbatim.
    std::string prefix() const {
        switch (n_->kind) {
            case Kind::Const: return n_->value.str();
            case Kind::Var: return "(s " + std::to_string(n_->var + 1) + ")";
            case Kind::Sum: {
                std::string out = "(+";
                for (auto& c : n_->children) out += " " + c.prefix();
                return out + ")";
            }
            case Kind::Prod: {
                std::string out = "(*";
                for (auto& c : n_->children) out += " " + c.prefix();
                return out + ")";
            }
            case Kind::Pow:
                return "(^ " + n_->children[0].prefix() + " " + n_->value.str() + ")";
        }
        return {};
    }

    // Split off the leading rational factor: e = c * rest with rest carrying
    // no explicit constant multiplier.
    std::pair<Rational, ScalarExpr> split_constant() const {
        if (is_const()) return {const_value(), constant(1)};
        return split_coeff();
    }

    static ScalarExpr parse_prefix(const std::string& text) {
        std::size_t pos = 0;
        ScalarExpr e = parse_prefix_at(text, pos);
        skip_ws(text, pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters in expression");
        return e;
    }

  private:
    std::pair<Rational, ScalarExpr> split_coeff() const {
        if (n_->kind == Kind::Prod && !n_->children.empty() && n_->children[0].is_const()) {
            std::vector<ScalarExpr> rest(n_->children.begin() + 1, n_->children.end());
            Rational c = n_->children[0].const_value();
            if (rest.size() == 1) return {c, rest[0]};
            return {c, make(Kind::Prod, Rational(0), -1, std::move(rest))};
        }
        return {Rational(1), *this};
    }

    static void flatten_sum(const ScalarExpr& e, std::vector<ScalarExpr>& out) {
        if (e.n_->kind == Kind::Sum)
            for (auto& c : e.n_->children) flatten_sum(c, out);
        else
            out.push_back(e);
    }
    static void flatten_prod(const ScalarExpr& e, std::vector<ScalarExpr>& out) {
        if (e.n_->kind == Kind::Prod)
            for (auto& c : e.n_->children) flatten_prod(c, out);
        else
            out.push_back(e);
    }

    static LaurentPoly laurent_mul(const LaurentPoly& a, const LaurentPoly& b) {
        LaurentPoly out;
        for (auto& [ma, va] : a)
            for (auto& [mb, vb] : b) {
                LaurentMono m;
                std::size_t i = 0, j = 0;
                while (i < ma.size() || j < mb.size()) {
                    if (j == mb.size() || (i < ma.size() && ma[i].first < mb[j].first))
                        m.push_back(ma[i++]);
                    else if (i == ma.size() || mb[j].first < ma[i].first)
                        m.push_back(mb[j++]);
                    else {
                        int e = ma[i].second + mb[j].second;
                        if (e != 0) m.push_back({ma[i].first, e});
                        ++i, ++j;
                    }
                }
                Rational v = va * vb;
                auto it = out.find(m);
                if (it == out.end())
                    out.emplace(std::move(m), v);
                else {
                    it->second += v;
                    if (it->second.is_zero()) out.erase(it);
                }
            }
        return out;
    }

    // c^(p/q) for positive rational c when numerator and denominator are both
    // perfect q-th powers.
    static std::optional<Rational> exact_root(const Rational& c, const Rational& e) {
        auto iroot = [](i64 v, i64 q) -> std::optional<i64> {
            if (v <= 0) return std::nullopt;
            i64 r = i64(std::llround(std::pow(double(v), 1.0 / double(q))));
            for (i64 cand = std::max<i64>(1, r - 2); cand <= r + 2; ++cand) {
                i128 p = 1;
                for (i64 k = 0; k < q; ++k) {
                    p *= cand;
                    if (p > i128(INT64_MAX)) break;
                }
                if (p == i128(v)) return cand;
            }
            return std::nullopt;
        };
        i64 q = e.den();
        auto rn = iroot(c.num(), q);
        auto rd = iroot(c.den(), q);
        if (!rn || !rd) return std::nullopt;
        return Rational(*rn, *rd).pow(e.num());
    }

    static void skip_ws(const std::string& t, std::size_t& p) {
        while (p < t.size() && (t[p] == ' ' || t[p] == '\n' || t[p] == '\t')) ++p;
    }

    static Rational parse_rational_token(const std::string& t, std::size_t& p) {
        skip_ws(t, p);
        std::size_t start = p;
        if (p < t.size() && (t[p] == '-' || t[p] == '+')) ++p;
        while (p < t.size() && (isdigit((unsigned char)t[p]) || t[p] == '/')) ++p;
        std::string tok = t.substr(start, p - start);
        auto slash = tok.find('/');
        if (slash == std::string::npos) return Rational(std::stoll(tok));
        return Rational(std::stoll(tok.substr(0, slash)), std::stoll(tok.substr(slash + 1)));
    }

    static ScalarExpr parse_prefix_at(const std::string& t, std::size_t& p) {
        skip_ws(t, p);
        if (p >= t.size()) throw std::invalid_argument("truncated expression");
        if (t[p] != '(') return constant(parse_rational_token(t, p));
        ++p; // '('
        skip_ws(t, p);
        char op = t[p];
        if (op == 's') {
            ++p;
            Rational idx = parse_rational_token(t, p);
            skip_ws(t, p);
            if (t[p] != ')') throw std::invalid_argument("malformed (s k)");
            ++p;
            return var(int(idx.num()) - 1);
        }
        if (op == '^') {
            ++p;
            ScalarExpr base = parse_prefix_at(t, p);
            Rational e = parse_rational_token(t, p);
            skip_ws(t, p);
            if (t[p] != ')') throw std::invalid_argument("malformed (^ ...)");
            ++p;
            return pow(base, e);
        }
        if (op != '+' && op != '*') throw std::invalid_argument("unknown operator in expression");
        ++p;
        std::vector<ScalarExpr> args;
        while (true) {
            skip_ws(t, p);
            if (p >= t.size()) throw std::invalid_argument("truncated expression");
            if (t[p] == ')') { ++p; break; }
            args.push_back(parse_prefix_at(t, p));
        }
        return op == '+' ? sum(std::move(args)) : prod(std::move(args));
    }
};

} // namespace cvqc
