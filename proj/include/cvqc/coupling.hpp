// Star/diamond coupling calculus: nullifier sets, the exact star chains that
// carry the order-reduction bookkeeping, their conversion to physically
// executable diamond chains (numeric at resolve time), and quadratic-residual
// extraction for the final measurement stage.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cvqc/linalg.hpp"
#include "cvqc/poly.hpp"

namespace cvqc::coupling {

using linalg::Mat;

// Matrix of coefficient expressions over earlier outcomes.
using SymMatrix = std::vector<std::vector<ScalarExpr>>;

inline SymMatrix sym_identity(int n) {
    SymMatrix m(n, std::vector<ScalarExpr>(n, ScalarExpr::constant(0)));
    for (int i = 0; i < n; ++i) m[i][i] = ScalarExpr::constant(1);
    return m;
}

inline SymMatrix sym_from_mat(const Mat& m) {
    SymMatrix out(m.rows(), std::vector<ScalarExpr>(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            // matrices entering symbolic chains carry exact entries; reject
            // anything that does not round-trip through a small rational
            double v = m(i, j);
            Rational r(i64(std::llround(v * (1 << 20))), i64(1) << 20);
            out[i][j] = ScalarExpr::constant(r);
            if (std::abs(r.to_double() - v) > 1e-12)
                throw std::invalid_argument("sym_from_mat: entry is not exactly representable");
        }
    return out;
}

inline Mat sym_eval(const SymMatrix& K, const std::vector<long double>& s) {
    Mat out(int(K.size()), K.empty() ? 0 : int(K[0].size()));
    for (int i = 0; i < out.rows(); ++i)
        for (int j = 0; j < out.cols(); ++j) out(i, j) = double(K[i][j].eval_real(s));
    return out;
}

inline bool sym_has_even_root_of_indefinite(const SymMatrix& K) {
    for (auto& row : K)
        for (auto& e : row)
            if (e.has_even_root_of_indefinite()) return true;
    return false;
}

// ---- nullifier sets ----

// Operators m_i = p_i - dV/dx_i; mutually commuting because the Hessian of V
// is symmetric.
struct NullifierSet {
    Poly V;

    int modes() const { return V.modes(); }
    std::vector<Poly> gradient() const { return V.grad(); }

    // printable "p_i + <poly> = 0" descriptions of the ancilla conditions for
    // the eigenstate with eigenvalue zero
    std::vector<std::string> descriptions() const {
        std::vector<std::string> out;
        auto g = V.grad();
        for (int i = 0; i < V.modes(); ++i) {
            Poly minus = -g[i];
            std::string rhs = minus.is_zero() ? std::string() : " + " + (-g[i]).str();
            out.push_back("p" + std::to_string(i + 1) + (rhs.empty() ? "" : rhs) + " = 0");
        }
        return out;
    }
};

// ---- the star and diamond operators ----

// (f *_{K,s} g)(x) = f(x) + g(Kx - s).  K maps the f-space (n modes) into the
// g-space (n' modes), so K is n' x n and s has n' components.
inline Poly star(const Poly& f, const Poly& g, const SymMatrix& K,
                 const std::vector<ScalarExpr>& s) {
    if (int(K.size()) != g.modes() || int(s.size()) != g.modes())
        throw std::invalid_argument("star: K rows and s length must match g's modes");
    if (!K.empty() && int(K[0].size()) != f.modes())
        throw std::invalid_argument("star: K columns must match f's modes");
    std::vector<ScalarExpr> b;
    b.reserve(s.size());
    for (auto& e : s) b.push_back(-e);
    return f + g.substitute_affine(K, b);
}

// (f <>_{K,s} g)(x) = f(P(K)x + K^T s) + g(K P(K) x - s), evaluated at
// numeric K and s (P(K) is never formed symbolically).
inline NumPoly diamond(const NumPoly& f, const NumPoly& g, const Mat& K,
                       const std::vector<double>& s) {
    int n = f.modes(), np = g.modes();
    if (K.rows() != np || K.cols() != n)
        throw std::invalid_argument("diamond: K must be (g modes) x (f modes)");
    if (int(s.size()) != np) throw std::invalid_argument("diamond: outcome arity");
    Mat P = linalg::p_of_k(K);
    Mat KP = K * P;
    std::vector<std::vector<double>> Pm(n, std::vector<double>(n)), KPm(np, std::vector<double>(n));
    std::vector<double> bf(n, 0.0), bg(np, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) Pm[i][j] = P(i, j);
        for (int k = 0; k < np; ++k) bf[i] += K(k, i) * s[k];
    }
    for (int i = 0; i < np; ++i) {
        for (int j = 0; j < n; ++j) KPm[i][j] = KP(i, j);
        bg[i] = -s[i];
    }
    return f.substitute_affine(Pm, bf) + g.substitute_affine(KPm, bg);
}

// ---- Theorem-1 identity check ----

// Verifies P(K) m(x,p;f) + P(K) K^T m(x',p';g) = m(x+,p+; f<>g) at random
// phase-space points, wiring the beamsplitter relations of the generalized
// coupling explicitly.  f and g must have outcome-free coefficients.
inline double theorem1_residual(const Poly& f, const Poly& g, const Mat& K, int trials,
                                std::uint64_t seed = 0) {
    int n = f.modes(), np = g.modes();
    if (K.rows() != np || K.cols() != n)
        throw std::invalid_argument("theorem1_residual: K must be n' x n");
    NumPoly fn = NumPoly::from_exact(f, {});
    NumPoly gn = NumPoly::from_exact(g, {});
    auto gf = fn.grad();
    auto gg = gn.grad();

    linalg::Svd sv = linalg::svd(K);
    int nsv = std::min(n, np);
    std::vector<double> tvec(std::max(n, np), 1.0), rvec(std::max(n, np), 0.0);
    for (int i = 0; i < nsv; ++i) {
        double lam = sv.sigma[i];
        tvec[i] = 1.0 / std::sqrt(1.0 + lam * lam);
        rvec[i] = lam * tvec[i];
    }
    Mat T(n, n), Tp(np, np), R(np, n);
    for (int i = 0; i < n; ++i) T(i, i) = i < nsv ? tvec[i] : 1.0;
    for (int i = 0; i < np; ++i) Tp(i, i) = i < nsv ? tvec[i] : 1.0;
    for (int i = 0; i < nsv; ++i) R(i, i) = rvec[i];

    Mat P = linalg::p_of_k(K);
    Rng rng(seed);
    double worst = 0;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<double> x(n), p(n), xp(np), pp(np);
        for (auto& v : x) v = rng.centered(1.5);
        for (auto& v : p) v = rng.centered(1.5);
        for (auto& v : xp) v = rng.centered(1.5);
        for (auto& v : pp) v = rng.centered(1.5);

        auto Ox = sv.o.apply(x), Op = sv.o.apply(p);
        auto Oxp = sv.oprime.apply(xp), Opp = sv.oprime.apply(pp);
        std::vector<double> xplus(n), pplus(n), xminus(np);
        {
            std::vector<double> tox = T.apply(Ox), top = T.apply(Op);
            std::vector<double> rxp = (R.transpose()).apply(Oxp), rpp = (R.transpose()).apply(Opp);
            std::vector<double> sx(n), sp(n);
            for (int i = 0; i < n; ++i) {
                sx[i] = tox[i] + rxp[i];
                sp[i] = top[i] + rpp[i];
            }
            xplus = sv.o.transpose().apply(sx);
            pplus = sv.o.transpose().apply(sp);
            std::vector<double> rox = R.apply(Ox), txp = Tp.apply(Oxp);
            for (int i = 0; i < np; ++i) xminus[i] = rox[i] - txp[i];
        }
        std::vector<double> s = (sv.oprime.transpose() * Tp).apply(xminus);

        // left side: P m(x,p;f) + P K^T m(x',p';g)
        std::vector<double> mf(n), mg(np);
        for (int i = 0; i < n; ++i) mf[i] = p[i] - gf[i].eval(x);
        for (int i = 0; i < np; ++i) mg[i] = pp[i] - gg[i].eval(xp);
        std::vector<double> lhs = P.apply(mf);
        auto kt = (P * K.transpose()).apply(mg);
        for (int i = 0; i < n; ++i) lhs[i] += kt[i];

        // right side: m(x+, p+; f <> g)
        NumPoly dia = diamond(fn, gn, K, s);
        auto gd = dia.grad();
        for (int i = 0; i < n; ++i) {
            double rhs = pplus[i] - gd[i].eval(xplus);
            worst = std::max(worst, std::abs(lhs[i] - rhs));
        }
    }
    return worst;
}

// ---- chains ----

struct ChainStep {
    Poly f;      // fixed (outcome-free) ancilla polynomial on `dim` modes
    SymMatrix K; // dim x (input modes); entries may reference earlier outcomes
    int out_base = 0; // global index of this step's first outcome variable
    int dim = 0;      // = f.modes() = number of outcomes of this step
};

struct StarChain {
    Poly V; // the gate polynomial on n modes
    std::vector<ChainStep> steps;

    int modes() const { return V.modes(); }

    std::vector<ScalarExpr> step_outcome_symbols(std::size_t k) const {
        std::vector<ScalarExpr> s;
        for (int i = 0; i < steps[k].dim; ++i)
            s.push_back(ScalarExpr::var(steps[k].out_base + i));
        return s;
    }

    // Exact symbolic evaluation of the full chain.
    Poly evaluate() const {
        Poly acc = V;
        for (std::size_t k = 0; k < steps.size(); ++k)
            acc = star(acc, steps[k].f, steps[k].K, step_outcome_symbols(k));
        return acc;
    }

    int total_outcomes() const {
        int t = 0;
        for (auto& st : steps) t = std::max(t, st.out_base + st.dim);
        return t;
    }

    bool has_sign_problem_steps() const {
        for (auto& st : steps)
            if (sym_has_even_root_of_indefinite(st.K)) return true;
        return false;
    }
};

// Largest relative coefficient magnitude above `degree` over sampled positive
// outcomes; principal-branch complex evaluation keeps sign-problem recipes
// verifiable.
inline double chain_residual_above(const StarChain& chain, int degree,
                                   const SampleConfig& cfg = {.seed = 0, .trials = 20, .rel_tol = 0}) {
    Poly full = chain.evaluate();
    int nvars = chain.total_outcomes();
    Rng rng(cfg.seed);
    double worst = 0;
    for (int t = 0; t < cfg.trials; ++t) {
        auto pt = ScalarExpr::sample_point(rng, nvars);
        auto coeffs = full.coeffs_complex(pt);
        long double peak = 0, high = 0;
        for (auto& [m, v] : coeffs) {
            peak = std::max(peak, std::abs(v));
            if (mono_degree(m) > degree) high = std::max(high, std::abs(v));
        }
        if (peak == 0) continue;
        worst = std::max(worst, double(high / std::max(peak, 1.0L)));
    }
    return worst;
}

// ---- one reduction step with certification ----

struct ReduceResult {
    Poly result;       // the new grading
    bool reduced;      // top order dropped by one
    Poly top_residual; // what was left at the old top order when not reduced
};

// V_j *_{K,s} f with the order-reduction condition checked: exactly when the
// coefficients are outcome-polynomial, by positive sampling otherwise.
inline ReduceResult reduce_step(const Poly& Vj, const Poly& f, const SymMatrix& K,
                                const std::vector<ScalarExpr>& s,
                                const SampleConfig& cfg = {}) {
    int Nj = Vj.degree();
    Poly next = star(Vj, f, K, s);
    Poly top = next.homogeneous_part(Nj);
    bool gone = true;
    for (auto& [m, c] : top.terms()) {
        (void)m;
        if (c.is_zero_exact()) continue;
        if (!c.has_fractional_pow()) { gone = false; break; }
        if (!c.sampled_zero({cfg.seed, cfg.trials, 1e-8L})) { gone = false; break; }
    }
    if (gone && !top.is_zero()) {
        Poly trimmed(next.modes());
        for (auto& [m, c] : next.terms())
            if (mono_degree(m) < Nj) trimmed.add_term(m, c);
        return {trimmed, true, Poly(next.modes())};
    }
    if (top.is_zero()) return {next, true, Poly(next.modes())};
    return {next, false, top};
}

// ---- quadratic residual of a finished chain ----

struct QuadResidual {
    SymMatrix A;              // symmetric
    std::vector<ScalarExpr> b;
    ScalarExpr c;
};

inline QuadResidual extract_quadratic(const Poly& q, const SampleConfig& cfg = {}) {
    int n = q.modes();
    for (auto& [m, coeff] : q.terms()) {
        if (mono_degree(m) <= 2) continue;
        bool zero = coeff.is_zero_exact() ||
                    (coeff.has_fractional_pow() && coeff.sampled_zero({cfg.seed, cfg.trials, 1e-8L}));
        if (!zero)
            throw std::invalid_argument("extract_quadratic: polynomial has degree above 2: " +
                                        q.homogeneous_part(mono_degree(m)).str());
    }
    QuadResidual out;
    out.A = SymMatrix(n, std::vector<ScalarExpr>(n, ScalarExpr::constant(0)));
    out.b.assign(n, ScalarExpr::constant(0));
    out.c = q.coeff(Mono(n, 0));
    for (int i = 0; i < n; ++i) {
        Mono mi(n, 0);
        mi[i] = 1;
        out.b[i] = q.coeff(mi);
        Mono mii(n, 0);
        mii[i] = 2;
        out.A[i][i] = q.coeff(mii);
        for (int j = i + 1; j < n; ++j) {
            Mono mij(n, 0);
            mij[i] = mij[j] = 1;
            ScalarExpr half = q.coeff(mij) * ScalarExpr::constant(Rational(1, 2));
            out.A[i][j] = half;
            out.A[j][i] = half;
        }
    }
    return out;
}

struct NumQuad {
    Mat A;
    std::vector<double> b;
    double c = 0;
};

inline NumQuad extract_quadratic(const NumPoly& q, double tol = 1e-9) {
    int n = q.modes();
    if (q.max_coeff_above_degree(2) > tol * std::max(1.0, q.max_coeff()))
        throw std::invalid_argument("extract_quadratic: numeric polynomial has degree above 2");
    NumQuad out;
    out.A = Mat(n, n);
    out.b.assign(n, 0.0);
    for (auto& [m, c] : q.terms()) {
        int d = mono_degree(m);
        if (d > 2) continue;
        if (d == 0) {
            out.c = c;
            continue;
        }
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            for (int e = 0; e < m[i]; ++e) idx.push_back(i);
        if (d == 1) out.b[idx[0]] = c;
        else if (idx[0] == idx[1]) out.A(idx[0], idx[0]) = c;
        else {
            out.A(idx[0], idx[1]) = c / 2;
            out.A(idx[1], idx[0]) = c / 2;
        }
    }
    return out;
}

// ---- diamond execution form (star chain + affine tracking) ----

struct DiamondResolved {
    std::vector<Mat> kprime;                  // physical coupling per step
    std::vector<std::vector<double>> sprime;  // remapped outcomes for the star chain
    Mat affine_a;                             // final composition x -> A x + b
    std::vector<double> affine_b;
    NumPoly quadratic;                        // star evaluation composed with the affine map
};

struct DiamondChain {
    StarChain base;

    // Resolve the execution form at physical outcomes (one vector per step):
    // K'_k = K_k(s'_{<k}) A_{k-1};  s'_k = K_k b_{k-1} + (I + K'_k K'_k^T) s_k;
    // (A_k, b_k) = (A_{k-1} P(K'_k), A_{k-1} A_{k-1}^T K_k^T s_k + b_{k-1}).
    DiamondResolved resolve(const std::vector<std::vector<double>>& s_phys) const {
        int n = base.modes();
        if (s_phys.size() != base.steps.size())
            throw std::invalid_argument("diamond resolve: outcome count mismatch");
        DiamondResolved out;
        Mat A = Mat::identity(n);
        std::vector<double> b(n, 0.0);
        std::vector<long double> sprime_flat(base.total_outcomes(), 0.0L);
        for (std::size_t k = 0; k < base.steps.size(); ++k) {
            const ChainStep& st = base.steps[k];
            if (int(s_phys[k].size()) != st.dim)
                throw std::invalid_argument("diamond resolve: step outcome arity");
            Mat Kk = sym_eval(st.K, sprime_flat);
            Mat Kp = Kk * A;
            out.kprime.push_back(Kp);
            // s'_k = K_k b + (I + K'_k K'_k^T) s_k  (K_k in the star frame;
            // the round-trip oracle pins this form)
            std::vector<double> sp = Kk.apply(b);
            Mat G = Kp * Kp.transpose();
            for (int i = 0; i < st.dim; ++i) {
                sp[i] += s_phys[k][i];
                for (int j = 0; j < st.dim; ++j) sp[i] += G(i, j) * s_phys[k][j];
            }
            out.sprime.push_back(sp);
            for (int i = 0; i < st.dim; ++i) sprime_flat[st.out_base + i] = sp[i];
            // affine update
            std::vector<double> add = (A * A.transpose() * Kk.transpose()).apply(s_phys[k]);
            for (int i = 0; i < n; ++i) b[i] += add[i];
            A = A * linalg::p_of_k(Kp);
        }
        out.affine_a = A;
        out.affine_b = b;
        // evaluate the star chain at s' and compose with the affine map
        NumPoly S = NumPoly::from_exact(base.V, {});
        for (std::size_t k = 0; k < base.steps.size(); ++k) {
            const ChainStep& st = base.steps[k];
            Mat Kk = sym_eval(st.K, sprime_flat);
            std::vector<std::vector<double>> Km(st.dim, std::vector<double>(n));
            std::vector<double> off(st.dim);
            for (int i = 0; i < st.dim; ++i) {
                for (int j = 0; j < n; ++j) Km[i][j] = Kk(i, j);
                off[i] = -out.sprime[k][i];
            }
            NumPoly fk = NumPoly::from_exact(st.f, {});
            S = S + fk.substitute_affine(Km, off);
        }
        std::vector<std::vector<double>> Am(n, std::vector<double>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) Am[i][j] = A(i, j);
        out.quadratic = S.substitute_affine(Am, b);
        return out;
    }

    // Direct diamond evaluation, used as the round-trip oracle against the
    // affine-composed star evaluation.
    NumPoly evaluate_direct(const std::vector<std::vector<double>>& s_phys) const {
        DiamondResolved res = resolve(s_phys);
        NumPoly acc = NumPoly::from_exact(base.V, {});
        for (std::size_t k = 0; k < base.steps.size(); ++k) {
            NumPoly fk = NumPoly::from_exact(base.steps[k].f, {});
            acc = diamond(acc, fk, res.kprime[k], s_phys[k]);
        }
        return acc;
    }
};

inline DiamondChain star_to_diamond(const StarChain& chain) { return DiamondChain{chain}; }

// Round-trip residual between the direct diamond evaluation and the
// affine-composed star evaluation at the same physical outcomes.
inline double diamond_roundtrip_residual(const DiamondChain& dc,
                                         const std::vector<std::vector<double>>& s_phys) {
    DiamondResolved res = dc.resolve(s_phys);
    NumPoly direct = dc.evaluate_direct(s_phys);
    double worst = 0;
    NumPoly diff = direct + res.quadratic.scaled(-1.0);
    double scale = std::max(1.0, std::max(direct.max_coeff(), res.quadratic.max_coeff()));
    worst = diff.max_coeff() / scale;
    return worst;
}

} // namespace cvqc::coupling
