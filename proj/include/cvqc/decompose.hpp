// Chow and Waring decomposition machinery: partition-based constructions for
// elementary symmetric polynomials, their coefficient-weighted variant, a
// greedy decomposition for general chain coefficients, classical power-sum
// decompositions, and the B/M/D extraction that turns a decomposition into
// fixed ancilla polynomials plus outcome-dependent couplings.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cvqc/coupling.hpp"
#include "cvqc/poly.hpp"

namespace cvqc::decompose {

using coupling::SymMatrix;

// ---- partitions ----

// Q(n, l): partitions of n into 2l+1 positive parts whose even positions are
// all 1.  Enumerated with the odd positions in lexicographic order.
inline std::vector<std::vector<int>> q_partitions(int n, int l) {
    std::vector<std::vector<int>> out;
    int parts = l + 1;        // free odd positions
    int budget = n - l;       // they sum to n - l
    if (budget < parts) return out;
    std::vector<int> odd(parts, 1);
    odd[parts - 1] = budget - (parts - 1);
    auto emit = [&] {
        std::vector<int> p(2 * l + 1, 1);
        for (int i = 0; i < parts; ++i) p[2 * i] = odd[i];
        out.push_back(std::move(p));
    };
    // lexicographic enumeration of compositions
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == parts - 1) {
            odd[pos] = left;
            emit();
            return;
        }
        for (int v = 1; v <= left - (parts - 1 - pos); ++v) {
            odd[pos] = v;
            rec(pos + 1, left - v);
        }
    };
    rec(0, budget);
    return out;
}

// ---- Chow decompositions ----

struct ChowFactor {
    std::vector<ScalarExpr> coeffs; // linear form over the target's variables
    int exponent = 1;
};

struct ChowTerm {
    ScalarExpr coeff = ScalarExpr::constant(1); // outcome-free in B-extraction
    std::vector<ChowFactor> factors;
};

struct ChowDecomp {
    int n = 0; // variables of the target
    std::vector<ChowTerm> terms;

    int crank() const { return int(terms.size()); }
    // distinct listed factors per term; when a term repeats a linear form the
    // two counting conventions disagree, so the n*crank shortcut is reported
    // separately by rank_functions
    int brank() const {
        int b = 0;
        for (auto& t : terms) b += int(t.factors.size());
        return b;
    }

    Poly expansion() const {
        Poly acc(n);
        for (auto& t : terms) {
            Poly prod = Poly::constant(n, t.coeff);
            for (auto& f : t.factors) {
                Poly lin(n);
                for (int j = 0; j < n; ++j) {
                    Mono m(n, 0);
                    m[j] = 1;
                    lin.add_term(std::move(m), f.coeffs[j]);
                }
                prod = prod * lin.pow(f.exponent);
            }
            acc = acc + prod;
        }
        return acc;
    }

    bool verify(const Poly& target, const SampleConfig& cfg = {}) const {
        Poly diff = expansion() - target;
        for (auto& [m, c] : diff.terms()) {
            (void)m;
            if (c.is_zero_exact()) continue;
            if (!c.sampled_zero({cfg.seed, cfg.trials, 1e-9L})) return false;
        }
        return true;
    }

    std::string str() const {
        if (terms.empty()) return "0";
        std::string out;
        for (auto& t : terms) {
            if (!out.empty()) out += " + ";
            std::string piece;
            if (!(t.coeff.is_const() && t.coeff.const_value().is_one()))
                piece += "(" + t.coeff.str() + ")*";
            for (auto& f : t.factors) {
                Poly lin(n);
                for (int j = 0; j < n; ++j) {
                    Mono m(n, 0);
                    m[j] = 1;
                    lin.add_term(std::move(m), f.coeffs[j]);
                }
                bool bare = lin.term_count() == 1 && f.exponent == 1;
                piece += bare ? lin.str() : "(" + lin.str() + ")";
                if (f.exponent > 1) piece += "^" + std::to_string(f.exponent);
            }
            out += piece;
        }
        return out;
    }
};

namespace detail {

inline std::vector<std::pair<int, int>> partition_blocks(const std::vector<int>& p) {
    std::vector<std::pair<int, int>> blocks; // [start, stop) 0-based
    int pos = 0;
    for (int part : p) {
        blocks.push_back({pos, pos + part});
        pos += part;
    }
    return blocks;
}

inline ChowFactor unit_factor(int n, int var, int exponent = 1) {
    ChowFactor f;
    f.coeffs.assign(n, ScalarExpr::constant(0));
    f.coeffs[var] = ScalarExpr::constant(1);
    f.exponent = exponent;
    return f;
}

inline ChowFactor block_sum_factor(int n, int start, int stop) {
    ChowFactor f;
    f.coeffs.assign(n, ScalarExpr::constant(0));
    for (int v = start; v < stop; ++v) f.coeffs[v] = ScalarExpr::constant(1);
    return f;
}

} // namespace detail

// Elementary symmetric target V_{n,k} = sum over k-subsets of prod x_j.
inline Poly elementary_symmetric(int n, int k) {
    Poly out(n);
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        Mono m(n, 0);
        for (int i : idx) m[i] = 1;
        out.add_term(std::move(m), ScalarExpr::constant(1));
        int pos = k - 1;
        while (pos >= 0 && idx[pos] == n - k + pos) --pos;
        if (pos < 0) break;
        idx[pos] += 1;
        for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
    return out;
}

// Partition construction: odd k = 2l+1 sums r((p)) over Q(n, l); even k = 2l
// appends a trailing variable to the Q(m-1, l-1) constructions.
inline ChowDecomp chow_elementary(int n, int k) {
    if (k < 1 || k > n) throw std::invalid_argument("chow_elementary: need 1 <= k <= n");
    ChowDecomp d;
    d.n = n;
    auto push_r = [&d, n](const std::vector<int>& p, int offset, int extra_var) {
        ChowTerm t;
        for (auto [a, b] : detail::partition_blocks(p)) {
            if (b - a == 1) t.factors.push_back(detail::unit_factor(n, offset + a));
            else t.factors.push_back(detail::block_sum_factor(n, offset + a, offset + b));
        }
        if (extra_var >= 0) t.factors.push_back(detail::unit_factor(n, extra_var));
        d.terms.push_back(std::move(t));
    };
    if (k % 2 == 1) {
        int l = (k - 1) / 2;
        for (auto& p : q_partitions(n, l)) push_r(p, 0, -1);
    } else {
        int l = k / 2;
        for (int m = k; m <= n; ++m)
            for (auto& p : q_partitions(m - 1, l - 1)) push_r(p, 0, m - 1);
    }
    if (!d.verify(elementary_symmetric(n, k)))
        throw std::logic_error("chow_elementary: construction failed verification");
    return d;
}

// Weighted variant: target sum_{|S|=k} a_S prod_{j in S} x_j.  Every term has
// exactly one non-monomial factor, obtained by expanding all blocks except
// the largest one (ties resolved to the lowest index).
inline ChowDecomp chow_elementary_weighted(
    int n, int k, const std::function<ScalarExpr(const std::vector<int>&)>& a) {
    if (k < 1 || k > n) throw std::invalid_argument("chow_elementary_weighted: need 1 <= k <= n");
    ChowDecomp d;
    d.n = n;

    auto push_terms = [&](const std::vector<int>& p, int extra_var) {
        auto blocks = detail::partition_blocks(p);
        int istar = 0;
        for (std::size_t i = 1; i < blocks.size(); ++i)
            if (blocks[i].second - blocks[i].first >
                blocks[istar].second - blocks[istar].first)
                istar = int(i);
        // enumerate one variable from every block except istar
        std::vector<int> choice(blocks.size(), 0);
        while (true) {
            ChowTerm t;
            std::vector<int> subset;
            for (std::size_t i = 0; i < blocks.size(); ++i) {
                if (int(i) == istar) continue;
                int var = blocks[i].first + choice[i];
                t.factors.push_back(detail::unit_factor(n, var));
                subset.push_back(var);
            }
            if (extra_var >= 0) {
                t.factors.push_back(detail::unit_factor(n, extra_var));
                subset.push_back(extra_var);
            }
            ChowFactor form;
            form.coeffs.assign(n, ScalarExpr::constant(0));
            bool nonzero = false;
            for (int v = blocks[istar].first; v < blocks[istar].second; ++v) {
                std::vector<int> S = subset;
                S.push_back(v);
                std::sort(S.begin(), S.end());
                ScalarExpr av = a(S);
                if (!av.is_zero()) nonzero = true;
                form.coeffs[v] = std::move(av);
            }
            if (nonzero) {
                t.factors.push_back(std::move(form));
                d.terms.push_back(std::move(t));
            }
            // advance the per-block choice counters
            int pos = int(blocks.size()) - 1;
            while (pos >= 0) {
                if (pos == istar) { --pos; continue; }
                int width = blocks[pos].second - blocks[pos].first;
                if (choice[pos] + 1 < width) { choice[pos] += 1; break; }
                choice[pos] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
    };

    if (k % 2 == 1) {
        int l = (k - 1) / 2;
        for (auto& p : q_partitions(n, l)) push_terms(p, -1);
    } else {
        int l = k / 2;
        for (int m = k; m <= n; ++m)
            for (auto& p : q_partitions(m - 1, l - 1)) push_terms(p, m - 1);
    }
    return d;
}

// Conjectured minimal Chow rank of V_{n,k} in closed form.
inline i64 crank_closed_form(int n, int k) {
    if (k % 2 == 0) {
        int l = k / 2;
        return binomial(n - l, l);
    }
    int l = (k - 1) / 2;
    return binomial(n - 1 - l, l);
}

struct RankReport {
    int crank = 0;            // constructed term count
    int brank = 0;            // sum of listed factor counts
    int brank_shortcut = 0;   // order * crank (the homogeneous shortcut)
    i64 crank_closed_form = 0;
};

inline RankReport rank_functions(const ChowDecomp& d, int order, int n, int k) {
    RankReport r;
    r.crank = d.crank();
    r.brank = d.brank();
    r.brank_shortcut = order * d.crank();
    r.crank_closed_form = crank_closed_form(n, k);
    return r;
}

// ---- greedy Chow decomposition for general chain coefficients ----

namespace detail {

inline bool is_multilinear_complete(const Poly& T, int& order) {
    if (T.is_zero() || !T.is_homogeneous()) return false;
    order = T.degree();
    for (auto& [m, c] : T.terms()) {
        (void)c;
        for (int e : m)
            if (e > 1) return false;
    }
    return true;
}

} // namespace detail

// Deterministic heuristic: variable-disjoint components split first (direct
// sums decompose blockwise); single monomials directly; complete multilinear
// layers through the partition constructions; otherwise greedy grouping by
// the divisor core that captures the most remaining monomials.
inline ChowDecomp chow_general(const Poly& T, const SampleConfig& cfg = {}) {
    ChowDecomp d;
    d.n = T.modes();
    if (T.is_zero()) return d;

    // split into connected components over shared variables
    {
        int n = T.modes();
        std::vector<int> parent(n);
        for (int i = 0; i < n; ++i) parent[i] = i;
        std::function<int(int)> find = [&](int a) {
            while (parent[a] != a) a = parent[a] = parent[parent[a]];
            return a;
        };
        for (auto& [m, c] : T.terms()) {
            (void)c;
            int first = -1;
            for (int v = 0; v < n; ++v) {
                if (!m[v]) continue;
                if (first < 0) first = v;
                else parent[find(v)] = find(first);
            }
        }
        std::map<int, std::vector<int>> comps; // root -> active vars
        for (auto& [m, c] : T.terms()) {
            (void)c;
            for (int v = 0; v < n; ++v)
                if (m[v]) {
                    auto& vars = comps[find(v)];
                    if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
                }
        }
        if (comps.size() > 1) {
            for (auto& [root, vars] : comps) {
                std::sort(vars.begin(), vars.end());
                std::vector<int> pos(n, -1);
                for (std::size_t i = 0; i < vars.size(); ++i) pos[vars[i]] = int(i);
                Poly sub(int(vars.size()));
                for (auto& [m, c] : T.terms()) {
                    int v0 = -1;
                    for (int v = 0; v < n; ++v)
                        if (m[v]) { v0 = v; break; }
                    if (v0 < 0 || find(v0) != root) continue; // constants stay out
                    Mono mm(int(vars.size()), 0);
                    for (int v = 0; v < n; ++v)
                        if (m[v]) mm[pos[v]] = m[v];
                    sub.add_term(std::move(mm), c);
                }
                ChowDecomp ds = chow_general(sub, cfg);
                for (auto& t : ds.terms) {
                    ChowTerm big;
                    big.coeff = t.coeff;
                    for (auto& f : t.factors) {
                        ChowFactor bf;
                        bf.exponent = f.exponent;
                        bf.coeffs.assign(n, ScalarExpr::constant(0));
                        for (std::size_t i = 0; i < vars.size(); ++i) bf.coeffs[vars[i]] = f.coeffs[i];
                        big.factors.push_back(std::move(bf));
                    }
                    d.terms.push_back(std::move(big));
                }
            }
            if (!d.verify(T, cfg)) throw std::logic_error("chow_general: component split failed");
            return d;
        }
    }

    if (T.term_count() == 1) {
        auto& [m, c] = *T.terms().begin();
        ChowTerm t;
        t.coeff = c;
        for (int v = 0; v < T.modes(); ++v)
            if (m[v]) t.factors.push_back(detail::unit_factor(T.modes(), v, m[v]));
        d.terms.push_back(std::move(t));
        if (!d.verify(T, cfg)) throw std::logic_error("chow_general: monomial case failed");
        return d;
    }

    int order = 0;
    if (detail::is_multilinear_complete(T, order)) {
        // uniform coefficients over the complete subset layer: use the plain
        // partition construction with the constant carried per term (this is
        // what keeps the per-step Chow ranks at their closed-form values)
        bool uniform = T.term_count() == std::size_t(binomial(T.modes(), order));
        ScalarExpr c0 = T.terms().begin()->second;
        if (uniform && c0.is_const())
            for (auto& [m, c] : T.terms()) {
                (void)m;
                if (!(c == c0)) { uniform = false; break; }
            }
        else
            uniform = false;
        if (uniform) {
            ChowDecomp u = chow_elementary(T.modes(), order);
            for (auto& t : u.terms) t.coeff = c0;
            if (!u.verify(T, cfg)) throw std::logic_error("chow_general: uniform case failed");
            return u;
        }
        ChowDecomp w = chow_elementary_weighted(
            T.modes(), order, [&T](const std::vector<int>& S) {
                Mono m(T.modes(), 0);
                for (int v : S) m[v] = 1;
                return T.coeff(m);
            });
        if (!w.verify(T, cfg)) throw std::logic_error("chow_general: weighted case failed");
        return w;
    }

    Poly rem = T;
    while (!rem.is_zero()) {
        Mono lead = rem.terms().rbegin()->first;
        // choose the divisor core m / x_v that captures the most monomials
        int best_v = -1;
        int best_count = -1;
        for (int v = 0; v < rem.modes(); ++v) {
            if (!lead[v]) continue;
            Mono core = lead;
            core[v] -= 1;
            int count = 0;
            for (auto& [m, c] : rem.terms()) {
                (void)c;
                bool divisible = true;
                int excess = 0;
                for (int i = 0; i < rem.modes(); ++i) {
                    if (m[i] < core[i]) { divisible = false; break; }
                    excess += m[i] - core[i];
                }
                if (divisible && excess == 1) ++count;
            }
            if (count > best_count) {
                best_count = count;
                best_v = v;
            }
        }
        Mono core = lead;
        core[best_v] -= 1;
        // collect coefficients of core * x_w
        ChowFactor form;
        form.coeffs.assign(rem.modes(), ScalarExpr::constant(0));
        Poly captured(rem.modes());
        int hits = 0;
        for (auto& [m, c] : rem.terms()) {
            bool divisible = true;
            int wvar = -1, excess = 0;
            for (int i = 0; i < rem.modes(); ++i) {
                if (m[i] < core[i]) { divisible = false; break; }
                excess += m[i] - core[i];
                if (m[i] > core[i]) wvar = i;
            }
            if (!divisible || excess != 1) continue;
            form.coeffs[wvar] = c;
            captured.add_term(m, c);
            ++hits;
        }
        ChowTerm t;
        if (hits == 1) {
            // lone monomial: keep it a plain product of variable powers with
            // the coefficient on the term, no extra linear form
            t.coeff = rem.terms().rbegin()->second;
            for (int v = 0; v < rem.modes(); ++v)
                if (lead[v]) t.factors.push_back(detail::unit_factor(rem.modes(), v, lead[v]));
        } else {
            for (int v = 0; v < rem.modes(); ++v)
                if (core[v]) t.factors.push_back(detail::unit_factor(rem.modes(), v, core[v]));
            t.factors.push_back(std::move(form));
        }
        d.terms.push_back(std::move(t));
        rem = rem - captured;
    }
    if (!d.verify(T, cfg)) throw std::logic_error("chow_general: greedy decomposition failed");
    return d;
}

// ---- Waring decompositions ----

struct WaringTerm {
    ScalarExpr coeff;
    std::vector<ScalarExpr> form;
};

struct WaringDecomp {
    int n = 0;
    int order = 0;
    std::vector<WaringTerm> terms;

    Poly expansion() const {
        Poly acc(n);
        for (auto& t : terms) {
            Poly lin(n);
            for (int j = 0; j < n; ++j) {
                Mono m(n, 0);
                m[j] = 1;
                lin.add_term(std::move(m), t.form[j]);
            }
            acc = acc + lin.pow(order).scaled(t.coeff);
        }
        return acc;
    }

    bool verify(const Poly& target) const { return (expansion() - target).is_zero(); }
};

// x1 x2 ... xn as a signed sum of n-th powers (2^(n-1) terms).
inline WaringDecomp waring_multilinear(int n) {
    WaringDecomp d;
    d.n = n;
    d.order = n;
    Rational norm(1, factorial(n));
    norm = norm / Rational(i64(1) << (n - 1));
    for (std::uint64_t bits = 0; bits < (1ULL << (n - 1)); ++bits) {
        WaringTerm t;
        t.form.assign(n, ScalarExpr::constant(0));
        t.form[0] = ScalarExpr::constant(1);
        int sign = 1;
        for (int j = 1; j < n; ++j) {
            int e = (bits >> (j - 1)) & 1 ? -1 : 1;
            sign *= e;
            t.form[j] = ScalarExpr::constant(e);
        }
        t.coeff = ScalarExpr::constant(norm * Rational(sign));
        d.terms.push_back(std::move(t));
    }
    if (!d.verify(elementary_symmetric(n, n)))
        throw std::logic_error("waring_multilinear: verification failed");
    return d;
}

namespace detail {

// Solve a square rational linear system by Gaussian elimination.
inline std::vector<Rational> solve_rational(std::vector<std::vector<Rational>> A,
                                            std::vector<Rational> rhs) {
    int n = int(A.size());
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (!A[r][col].is_zero()) { piv = r; break; }
        if (piv < 0) throw std::runtime_error("solve_rational: singular system");
        std::swap(A[col], A[piv]);
        std::swap(rhs[col], rhs[piv]);
        for (int r = 0; r < n; ++r) {
            if (r == col || A[r][col].is_zero()) continue;
            Rational f = A[r][col] / A[col][col];
            for (int c2 = col; c2 < n; ++c2) A[r][c2] -= f * A[col][c2];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<Rational> x(n);
    for (int i = 0; i < n; ++i) x[i] = rhs[i] / A[i][i];
    return x;
}

} // namespace detail

// x1 x2^(N-1) as a sum of N exact rational powers.  Node set: small signed
// integers so the N-th moment closes (e_{N-1} of the nodes vanishes) while
// the exact Vandermonde solve stays inside 64-bit rationals.
inline WaringDecomp waring_two_var(int N) {
    if (N < 2) throw std::invalid_argument("waring_two_var: need order >= 2");
    std::vector<Rational> nodes;
    if (N % 2 == 0) {
        // +-1 .. +-N/2; odd elementary symmetric functions vanish by symmetry
        for (int k = 1; k <= N / 2; ++k) {
            nodes.push_back(Rational(k));
            nodes.push_back(Rational(-k));
        }
    } else {
        // +-1 .. +-(N-3)/2 plus two positives, last node solved for closure
        int m = (N - 1) / 2;
        for (int k = 1; k <= m - 1; ++k) {
            nodes.push_back(Rational(k));
            nodes.push_back(Rational(-k));
        }
        nodes.push_back(Rational(m));
        nodes.push_back(Rational(m + 1));
        // e_{N-1}(nodes, a) = e_{N-1}(nodes) + a e_{N-2}(nodes) = 0
        std::vector<Rational> e(N + 1, Rational(0));
        e[0] = Rational(1);
        for (auto& t : nodes)
            for (int j = N; j >= 1; --j) e[j] += e[j - 1] * t;
        if (e[N - 2].is_zero()) throw std::runtime_error("waring_two_var: degenerate node set");
        Rational a = -(e[N - 1] / e[N - 2]);
        for (auto& t : nodes)
            if (t == a) throw std::runtime_error("waring_two_var: node collision");
        nodes.push_back(a);
    }
    // moments: sum_k c_k t_k^j = delta_{j,1} / N for j = 0..N-1
    std::vector<std::vector<Rational>> M(N, std::vector<Rational>(N));
    std::vector<Rational> rhs(N, Rational(0));
    rhs[1] = Rational(1, N);
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) M[j][k] = nodes[k].pow(j);
    std::vector<Rational> c = detail::solve_rational(M, rhs);
    WaringDecomp d;
    d.n = 2;
    d.order = N;
    for (int k = 0; k < N; ++k) {
        WaringTerm t;
        t.coeff = ScalarExpr::constant(c[k]);
        t.form = {ScalarExpr::constant(nodes[k]), ScalarExpr::constant(1)};
        d.terms.push_back(std::move(t));
    }
    Poly target(2);
    target.add_term({1, N - 1}, ScalarExpr::constant(1));
    if (!d.verify(target)) throw std::logic_error("waring_two_var: verification failed");
    return d;
}

// Decomposition of a pure monomial degree pattern (the cases the planners
// need: single power, two-variable x1 x2^(N-1), and fully multilinear).
inline WaringDecomp waring_monomial(const Mono& pattern) {
    int n = 0, order = 0;
    std::vector<int> active;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i]) active.push_back(int(i));
        order += pattern[i];
    }
    n = int(pattern.size());
    if (active.size() == 1) {
        WaringDecomp d;
        d.n = n;
        d.order = order;
        WaringTerm t;
        t.coeff = ScalarExpr::constant(1);
        t.form.assign(n, ScalarExpr::constant(0));
        t.form[active[0]] = ScalarExpr::constant(1);
        d.terms.push_back(std::move(t));
        return d;
    }
    bool multilinear = true;
    for (int i : active)
        if (pattern[i] != 1) multilinear = false;
    if (multilinear && int(active.size()) == n) return waring_multilinear(n);
    if (active.size() == 2) {
        int a = active[0], b = active[1];
        int ea = pattern[a], eb = pattern[b];
        if (ea == 1 || eb == 1) {
            WaringDecomp two = waring_two_var(order);
            // embed: variable with exponent 1 plays x1
            int one_var = ea == 1 ? a : b;
            int big_var = ea == 1 ? b : a;
            WaringDecomp d;
            d.n = n;
            d.order = order;
            for (auto& t : two.terms) {
                WaringTerm e2;
                e2.coeff = t.coeff;
                e2.form.assign(n, ScalarExpr::constant(0));
                e2.form[one_var] = t.form[0];
                e2.form[big_var] = t.form[1];
                d.terms.push_back(std::move(e2));
            }
            return d;
        }
    }
    throw std::invalid_argument("waring_monomial: unsupported degree pattern");
}

// Reference decompositions for the preset gates.  The two- and three-mode
// cubic presets are transcribed forms; higher presets use the constructive
// formulas above.  Every result is expansion-verified before returning.
inline WaringDecomp waring_known(const std::string& gate, int N = 0) {
    auto constant_form = [](std::initializer_list<double>) {};
    (void)constant_form;
    if (gate == "cubic-qnd") {
        // x1 x2^2 = (1/6)[(x1+x2)^3 + (x1-x2)^3 - 2 x1^3]
        WaringDecomp d;
        d.n = 2;
        d.order = 3;
        d.terms.push_back({ScalarExpr::constant(Rational(1, 6)),
                           {ScalarExpr::constant(1), ScalarExpr::constant(1)}});
        d.terms.push_back({ScalarExpr::constant(Rational(1, 6)),
                           {ScalarExpr::constant(1), ScalarExpr::constant(-1)}});
        d.terms.push_back({ScalarExpr::constant(Rational(-1, 3)),
                           {ScalarExpr::constant(1), ScalarExpr::constant(0)}});
        Poly target(2);
        target.add_term({1, 2}, ScalarExpr::constant(1));
        if (!d.verify(target)) throw std::logic_error("waring_known: cubic-qnd failed");
        return d;
    }
    if (gate == "toffoli") {
        // x1 x2 x3 = (1/24)[(x1+x2+x3)^3 + (-x1-x2+x3)^3
        //                 + (-x1+x2-x3)^3 + (x1-x2-x3)^3]
        WaringDecomp d;
        d.n = 3;
        d.order = 3;
        auto f = [](int a, int b, int c) {
            return std::vector<ScalarExpr>{ScalarExpr::constant(a), ScalarExpr::constant(b),
                                           ScalarExpr::constant(c)};
        };
        ScalarExpr w = ScalarExpr::constant(Rational(1, 24));
        d.terms.push_back({w, f(1, 1, 1)});
        d.terms.push_back({w, f(-1, -1, 1)});
        d.terms.push_back({w, f(-1, 1, -1)});
        d.terms.push_back({w, f(1, -1, -1)});
        if (!d.verify(elementary_symmetric(3, 3)))
            throw std::logic_error("waring_known: toffoli failed");
        return d;
    }
    if (gate == "small-example") {
        // x1^2 x2^2 + x1^4 = (1/2)(x1 + 6^(-1/2) x2)^4
        //                  + (1/2)(x1 - 6^(-1/2) x2)^4 - (1/36) x2^4
        ScalarExpr c = ScalarExpr::pow(ScalarExpr::constant(Rational(1, 6)), Rational(1, 2));
        WaringDecomp d;
        d.n = 2;
        d.order = 4;
        d.terms.push_back({ScalarExpr::constant(Rational(1, 2)), {ScalarExpr::constant(1), c}});
        d.terms.push_back({ScalarExpr::constant(Rational(1, 2)), {ScalarExpr::constant(1), -c}});
        d.terms.push_back({ScalarExpr::constant(Rational(-1, 36)),
                           {ScalarExpr::constant(0), ScalarExpr::constant(1)}});
        Poly target = parse_poly("x1^2*x2^2 + x1^4", 2);
        if (!d.verify(target)) throw std::logic_error("waring_known: small-example failed");
        return d;
    }
    if (gate == "cnz") {
        if (N < 2) throw std::invalid_argument("waring_known: cnz needs N >= 2");
        return waring_multilinear(N);
    }
    if (gate == "cphase") {
        if (N < 3) throw std::invalid_argument("waring_known: cphase needs N >= 3");
        Mono m{1, N - 1};
        return waring_monomial(m);
    }
    throw std::invalid_argument("waring_known: unknown gate id '" + gate + "'");
}

// ---- B / M / D extraction ----

struct BMD {
    Poly B;      // outcome-free polynomial on brank modes
    SymMatrix M; // brank x n coupling rows
    // set when an outcome-dependent coefficient was absorbed through an even
    // root; the duplicate sign mode doubles such steps
    bool even_root_absorbed = false;
};

// Turn a Chow decomposition of A into B (direct sum of per-term monomial
// blocks) and M(s) (stacked factor rows) with A = B(Mx)-expansion.
inline BMD extract_BMD(const ChowDecomp& d) {
    int rows = d.brank();
    BMD out;
    out.M.assign(rows, std::vector<ScalarExpr>(d.n, ScalarExpr::constant(0)));
    Poly B(rows);
    int off = 0;
    for (auto& term : d.terms) {
        ScalarExpr coeff = term.coeff;
        std::vector<ChowFactor> factors = term.factors;
        if (coeff.depends_on_vars()) {
            // push the outcome-dependent part of the coefficient into one
            // factor so that B stays outcome-free; the rational prefactor
            // (in particular signs) stays on the B term.  An exponent-1
            // factor takes it verbatim, odd exponents through a real root,
            // even exponents through a fractional root (sign handling is the
            // caller's strict or duplicate scan).
            auto [rat, sym] = coeff.split_constant();
            int pick = -1;
            for (std::size_t i = 0; i < factors.size(); ++i)
                if (factors[i].exponent == 1) { pick = int(i); break; }
            if (pick < 0)
                for (std::size_t i = 0; i < factors.size(); ++i)
                    if (factors[i].exponent % 2 == 1) { pick = int(i); break; }
            if (pick < 0) pick = 0;
            ScalarExpr scale = ScalarExpr::pow(sym, Rational(1, factors[pick].exponent));
            if (factors[pick].exponent % 2 == 0) out.even_root_absorbed = true;
            for (auto& c : factors[pick].coeffs) c = c * scale;
            coeff = ScalarExpr::constant(rat);
        }
        Mono m(rows, 0);
        for (std::size_t i = 0; i < factors.size(); ++i) {
            m[off + int(i)] = factors[i].exponent;
            out.M[off + int(i)] = factors[i].coeffs;
        }
        B.add_term(std::move(m), coeff);
        off += int(factors.size());
    }
    out.B = B;
    if (out.B.coeffs_depend_on_s())
        throw std::logic_error("extract_BMD: B must be outcome-free");
    return out;
}

// D_j(u) = diag(u_i / q_j) with q_j = (prod u_i^{n_i})^(1/(k-j)); the coupling
// recipes use its inverse diag(q_j / u_i).
inline SymMatrix d_scaling(const std::vector<int>& exponents, const std::vector<ScalarExpr>& u,
                           int j) {
    int l = int(exponents.size());
    int k = 0;
    for (int e : exponents) k += e;
    if (j >= k) throw std::invalid_argument("d_scaling: need j < k");
    std::vector<ScalarExpr> fac;
    for (int i = 0; i < l; ++i) fac.push_back(ScalarExpr::pow(u[i], Rational(exponents[i])));
    ScalarExpr q = ScalarExpr::pow(ScalarExpr::prod(fac), Rational(1, k - j));
    SymMatrix D(l, std::vector<ScalarExpr>(l, ScalarExpr::constant(0)));
    for (int i = 0; i < l; ++i) D[i][i] = u[i] * ScalarExpr::pow(q, Rational(-1));
    return D;
}

inline SymMatrix d_scaling_inverse(const std::vector<int>& exponents,
                                   const std::vector<ScalarExpr>& u, int j) {
    int l = int(exponents.size());
    int k = 0;
    for (int e : exponents) k += e;
    if (j >= k) throw std::invalid_argument("d_scaling: need j < k");
    std::vector<ScalarExpr> fac;
    for (int i = 0; i < l; ++i) fac.push_back(ScalarExpr::pow(u[i], Rational(exponents[i])));
    ScalarExpr q = ScalarExpr::pow(ScalarExpr::prod(fac), Rational(1, k - j));
    SymMatrix D(l, std::vector<ScalarExpr>(l, ScalarExpr::constant(0)));
    for (int i = 0; i < l; ++i) D[i][i] = q * ScalarExpr::pow(u[i], Rational(-1));
    return D;
}

} // namespace cvqc::decompose
