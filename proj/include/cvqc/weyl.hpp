// Normal-ordered operator algebra on (x_i, p_i) with [x, p] = i and exact
// Gaussian-rational coefficients, plus the recursive decomposition of
// anticommutators {x^M, p^N} into commutators of quadrature monomials and
// the first-order Trotter token stream built on top of it.
//
// Convention: every operator is stored with all x factors to the left of all
// p factors; the representation is canonical, equal operators have equal maps.
#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cvqc/poly.hpp"
#include "cvqc/rational.hpp"

namespace cvqc::weyl {

using cvqc::CRat;
using cvqc::Mono;
using cvqc::Rational;

struct OpKey {
    Mono xm, pm;
    friend bool operator<(const OpKey& a, const OpKey& b) {
        MonoGradedLex less;
        if (a.xm != b.xm) return less(a.xm, b.xm);
        return less(a.pm, b.pm);
    }
    friend bool operator==(const OpKey& a, const OpKey& b) { return a.xm == b.xm && a.pm == b.pm; }
    int degree() const { return mono_degree(xm) + mono_degree(pm); }
};

class WeylOp {
  public:
    WeylOp() : n_(0) {}
    explicit WeylOp(int n) : n_(n) {}

    static WeylOp zero(int n) { return WeylOp(n); }
    static WeylOp identity(int n, CRat c = CRat(1)) {
        WeylOp w(n);
        w.add_term(Mono(n, 0), Mono(n, 0), c);
        return w;
    }
    static WeylOp x(int n, int i) {
        WeylOp w(n);
        Mono m(n, 0);
        m.at(i) = 1;
        w.add_term(m, Mono(n, 0), CRat(1));
        return w;
    }
    static WeylOp p(int n, int i) {
        WeylOp w(n);
        Mono m(n, 0);
        m.at(i) = 1;
        w.add_term(Mono(n, 0), m, CRat(1));
        return w;
    }
    // x^M p^N (already normal ordered)
    static WeylOp monomial(int n, Mono xm, Mono pm, CRat c = CRat(1)) {
        WeylOp w(n);
        w.add_term(std::move(xm), std::move(pm), c);
        return w;
    }

    int modes() const { return n_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<OpKey, CRat>& terms() const { return terms_; }

    CRat coeff(const Mono& xm, const Mono& pm) const {
        auto it = terms_.find(OpKey{xm, pm});
        return it == terms_.end() ? CRat(0) : it->second;
    }

    bool is_scalar() const {
        if (terms_.empty()) return true;
        return terms_.size() == 1 && terms_.begin()->first.degree() == 0;
    }
    CRat scalar_value() const {
        if (terms_.empty()) return CRat(0);
        return terms_.begin()->second;
    }

    void add_term(Mono xm, Mono pm, CRat c) {
        if (c.is_zero()) return;
        if (int(xm.size()) != n_ || int(pm.size()) != n_)
            throw std::invalid_argument("weyl: exponent arity mismatch");
        OpKey k{std::move(xm), std::move(pm)};
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(std::move(k), c);
            return;
        }
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }

    friend WeylOp operator+(const WeylOp& a, const WeylOp& b) {
        check_modes(a, b);
        WeylOp out = a;
        for (auto& [k, c] : b.terms_) out.add_term(k.xm, k.pm, c);
        return out;
    }
    friend WeylOp operator-(const WeylOp& a, const WeylOp& b) { return a + b.scaled(CRat(-1)); }
    WeylOp scaled(const CRat& c) const {
        WeylOp out(n_);
        if (c.is_zero()) return out;
        for (auto& [k, v] : terms_) out.add_term(k.xm, k.pm, v * c);
        return out;
    }
    WeylOp operator-() const { return scaled(CRat(-1)); }

    // Normal-ordered product.  Per mode, p^b x^c reorders through
    //   p^b x^c = sum_k k! C(b,k) C(c,k) (-i)^k x^(c-k) p^(b-k).
    friend WeylOp operator*(const WeylOp& a, const WeylOp& b) {
        check_modes(a, b);
        int n = a.n_;
        WeylOp out(n);
        for (auto& [ka, ca] : a.terms_)
            for (auto& [kb, cb] : b.terms_) {
                // reorder p^(ka.pm) x^(kb.xm) mode by mode
                std::vector<std::pair<Mono, CRat>> partial{{Mono(n, 0), ca * cb}};
                for (int j = 0; j < n; ++j) {
                    int bj = ka.pm[j], cj = kb.xm[j];
                    int kmax = std::min(bj, cj);
                    if (kmax == 0) continue;
                    std::vector<std::pair<Mono, CRat>> next;
                    for (auto& [kvec, coef] : partial)
                        for (int k = 0; k <= kmax; ++k) {
                            Rational mag(factorial(k));
                            mag *= Rational(binomial(bj, k));
                            mag *= Rational(binomial(cj, k));
                            CRat phase(1);
                            for (int t = 0; t < k; ++t) phase *= CRat(Rational(0), Rational(-1));
                            Mono kv = kvec;
                            kv[j] = k;
                            next.push_back({std::move(kv), coef * CRat(mag) * phase});
                        }
                    partial = std::move(next);
                }
                for (auto& [kvec, coef] : partial) {
                    Mono xm(n), pm(n);
                    for (int j = 0; j < n; ++j) {
                        xm[j] = ka.xm[j] + kb.xm[j] - kvec[j];
                        pm[j] = ka.pm[j] + kb.pm[j] - kvec[j];
                    }
                    out.add_term(std::move(xm), std::move(pm), coef);
                }
            }
        return out;
    }

    WeylOp adjoint() const {
        WeylOp out(n_);
        for (auto& [k, c] : terms_) {
            // (c x^M p^N)^dag = conj(c) p^N x^M, then normal order
            WeylOp t = monomial(n_, Mono(n_, 0), k.pm, c.conj()) * monomial(n_, k.xm, Mono(n_, 0), CRat(1));
            out = out + t;
        }
        return out;
    }

    bool is_hermitian() const { return (*this - adjoint()).is_zero(); }

    int degree() const {
        int d = 0;
        for (auto& [k, c] : terms_) d = std::max(d, k.degree());
        return d;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            auto& [k, c] = *it;
            if (!first) out += " + ";
            std::string mono;
            for (int i = 0; i < n_; ++i)
                if (k.xm[i]) {
                    mono += (mono.empty() ? "" : "*") + std::string("x") + std::to_string(i + 1);
                    if (k.xm[i] > 1) mono += "^" + std::to_string(k.xm[i]);
                }
            for (int i = 0; i < n_; ++i)
                if (k.pm[i]) {
                    mono += (mono.empty() ? "" : "*") + std::string("p") + std::to_string(i + 1);
                    if (k.pm[i] > 1) mono += "^" + std::to_string(k.pm[i]);
                }
            std::string cs = c.str();
            if (mono.empty()) out += "(" + cs + ")";
            else out += "(" + cs + ")*" + mono;
            first = false;
        }
        return out;
    }

  private:
    static void check_modes(const WeylOp& a, const WeylOp& b) {
        if (a.n_ != b.n_) throw std::invalid_argument("weyl: mode count mismatch");
    }

    int n_;
    std::map<OpKey, CRat> terms_;
};

inline WeylOp commutator(const WeylOp& a, const WeylOp& b) { return a * b - b * a; }
inline WeylOp anticommutator(const WeylOp& a, const WeylOp& b) { return a * b + b * a; }

// ---- Hamiltonian splitting ----

enum class TermKind { AntiComm, Comm };

struct SplitTerm {
    Rational weight; // real; AntiComm contributes w{x^M,p^N}, Comm contributes i w [x^M,p^N]
    TermKind kind;
    Mono xm, pm;
};

inline WeylOp reassemble(int n, const std::vector<SplitTerm>& terms) {
    WeylOp acc(n);
    for (auto& t : terms) {
        WeylOp xm = WeylOp::monomial(n, t.xm, Mono(n, 0));
        WeylOp pm = WeylOp::monomial(n, Mono(n, 0), t.pm);
        WeylOp piece = (t.kind == TermKind::AntiComm) ? anticommutator(xm, pm) : commutator(xm, pm);
        CRat w = (t.kind == TermKind::AntiComm) ? CRat(t.weight)
                                                : CRat(Rational(0), t.weight); // i * w
        acc = acc + piece.scaled(w);
    }
    return acc;
}

// Rewrite a Hermitian operator as a sum of real-weighted anticommutators
// (plus i-weighted commutators, which the greedy pass never needs: top-degree
// coefficients of a Hermitian normal form are always real).  Reassembling the
// returned list reproduces H exactly.
inline std::vector<SplitTerm> split_hamiltonian(const WeylOp& H) {
    if (!H.is_hermitian()) throw std::invalid_argument("split_hamiltonian: operator is not Hermitian");
    int n = H.modes();
    std::vector<SplitTerm> out;
    WeylOp rem = H;
    while (!rem.is_zero()) {
        int d = rem.degree();
        if (d == 0) {
            CRat c = rem.scalar_value();
            if (!c.im().is_zero()) throw std::logic_error("split_hamiltonian: imaginary constant remainder");
            // {1,1} = 2, so weight c/2 on the identity pair
            out.push_back({c.re() * Rational(1, 2), TermKind::AntiComm, Mono(n, 0), Mono(n, 0)});
            break;
        }
        std::vector<SplitTerm> batch;
        for (auto& [k, c] : rem.terms()) {
            if (k.degree() != d) continue;
            if (!c.im().is_zero())
                throw std::logic_error("split_hamiltonian: complex leading coefficient on Hermitian input");
            batch.push_back({c.re() * Rational(1, 2), TermKind::AntiComm, k.xm, k.pm});
        }
        for (auto& t : batch) rem = rem - reassemble(n, {t});
        out.insert(out.end(), batch.begin(), batch.end());
    }
    return out;
}

// ---- expression trees over quadrature-gate generators ----

struct TreeNode;
using TreeNodePtr = std::shared_ptr<const TreeNode>;

struct TreeNode {
    enum class Kind { LeafX, LeafP, Comm } kind;
    Mono mono;           // LeafX / LeafP
    TreeNodePtr lhs, rhs; // Comm
    std::string key;
};

inline TreeNodePtr make_leaf_x(Mono m) {
    auto n = std::make_shared<TreeNode>();
    n->kind = TreeNode::Kind::LeafX;
    n->mono = std::move(m);
    std::string k = "x";
    for (int e : n->mono) k += "," + std::to_string(e);
    n->key = k;
    return n;
}
inline TreeNodePtr make_leaf_p(Mono m) {
    auto n = std::make_shared<TreeNode>();
    n->kind = TreeNode::Kind::LeafP;
    n->mono = std::move(m);
    std::string k = "p";
    for (int e : n->mono) k += "," + std::to_string(e);
    n->key = k;
    return n;
}
inline TreeNodePtr make_comm(TreeNodePtr a, TreeNodePtr b) {
    auto n = std::make_shared<TreeNode>();
    n->kind = TreeNode::Kind::Comm;
    n->key = "[" + a->key + ";" + b->key + "]";
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

inline WeylOp expand_node(int nmodes, const TreeNodePtr& t) {
    switch (t->kind) {
        case TreeNode::Kind::LeafX: return WeylOp::monomial(nmodes, t->mono, Mono(nmodes, 0));
        case TreeNode::Kind::LeafP: return WeylOp::monomial(nmodes, Mono(nmodes, 0), t->mono);
        case TreeNode::Kind::Comm:
            return commutator(expand_node(nmodes, t->lhs), expand_node(nmodes, t->rhs));
    }
    return WeylOp::zero(nmodes);
}

// Sum of coefficient-weighted bracket structures plus an additive constant.
class ExprTree {
  public:
    explicit ExprTree(int nmodes) : n_(nmodes) {}

    int modes() const { return n_; }
    const CRat& constant() const { return constant_; }
    const std::map<std::string, std::pair<CRat, TreeNodePtr>>& terms() const { return terms_; }

    void add_constant(const CRat& c) { constant_ += c; }

    void add_term(const CRat& c, TreeNodePtr node) {
        if (c.is_zero()) return;
        std::string key = node->key;
        auto it = terms_.find(key);
        if (it == terms_.end()) {
            terms_.emplace(std::move(key), std::make_pair(c, std::move(node)));
            return;
        }
        it->second.first += c;
        if (it->second.first.is_zero()) terms_.erase(it);
    }

    // Canonical pass: merge equal structures (done incrementally above), drop
    // terms whose expansion vanishes and fold scalar expansions into the
    // constant.  Printed reference forms do the same folding.
    void fold_scalars() {
        for (auto it = terms_.begin(); it != terms_.end();) {
            WeylOp e = expand_node(n_, it->second.second);
            if (e.is_zero()) {
                it = terms_.erase(it);
                continue;
            }
            if (e.is_scalar()) {
                constant_ += e.scalar_value() * it->second.first;
                it = terms_.erase(it);
                continue;
            }
            ++it;
        }
    }

    WeylOp expand() const {
        WeylOp acc = WeylOp::identity(n_, constant_);
        if (constant_.is_zero()) acc = WeylOp::zero(n_);
        for (auto& [k, pr] : terms_) acc = acc + expand_node(n_, pr.second).scaled(pr.first);
        return acc;
    }

    std::string str() const {
        auto node_str = [this](const TreeNodePtr& t, auto&& self) -> std::string {
            auto mono_str = [this](const Mono& m, char sym) {
                std::string out;
                for (int i = 0; i < n_; ++i)
                    if (m[i]) {
                        out += (out.empty() ? "" : "*") + std::string(1, sym) + std::to_string(i + 1);
                        if (m[i] > 1) out += "^" + std::to_string(m[i]);
                    }
                return out.empty() ? "1" : out;
            };
            switch (t->kind) {
                case TreeNode::Kind::LeafX: return mono_str(t->mono, 'x');
                case TreeNode::Kind::LeafP: return mono_str(t->mono, 'p');
                case TreeNode::Kind::Comm:
                    return "[" + self(t->lhs, self) + ", " + self(t->rhs, self) + "]";
            }
            return std::string();
        };
        std::string out;
        for (auto& [k, pr] : terms_) {
            (void)k;
            std::string c = pr.first.str();
            out += out.empty() ? "" : " + ";
            out += "(" + c + ")*" + node_str(pr.second, node_str);
        }
        if (!constant_.is_zero() || out.empty()) {
            out += out.empty() ? "" : " + ";
            out += "(" + constant_.str() + ")";
        }
        return out;
    }

  private:
    int n_;
    CRat constant_;
    std::map<std::string, std::pair<CRat, TreeNodePtr>> terms_;
};

namespace detail {

inline bool all_zero(const Mono& m) {
    for (int e : m) if (e) return false;
    return true;
}

// {x^M, p^N} -> commutators of quadrature monomials, recursion on mode 1:
//
//   {x^M,p^N} = -2i/((M1+1)(N1+1)) ( [x^{M+e1}, p^{N+e1}]
//       - (i(M1+1)/2) sum_{k=1..N1} [p^{N-k e1}, [x^M, p^{k e1}]]
//       - sum_{j>=2} (i Mj Nj / 2) {x^{M+e1-ej}, p^{N+e1-ej}}
//       - sum_{j>=2} (i Mj / 2) sum_{k=0..Nj-1}
//             [p^{N_{>j}+(Nj-k-1)ej}, [x^{M+e1-ej}, p^{N_{<j}+e1+k ej}]] )
//
// The anticommutators in the third group recurse; (M1+N1) grows by two per
// level at fixed total degree, so the recursion is finite.
inline void decompose_into(ExprTree& tree, CRat c, Mono M, Mono N) {
    int n = int(M.size());
    if (all_zero(M) && all_zero(N)) {
        tree.add_constant(c * CRat(2));
        return;
    }
    if (all_zero(N)) {
        tree.add_term(c * CRat(2), make_leaf_x(M));
        return;
    }
    if (all_zero(M)) {
        tree.add_term(c * CRat(2), make_leaf_p(N));
        return;
    }
    const CRat ii = CRat::i();
    CRat pref = -ii * CRat(Rational(2, i64(M[0] + 1) * i64(N[0] + 1)));
    CRat base = c * pref;

    // leading commutator
    Mono M1 = M, N1 = N;
    M1[0] += 1;
    N1[0] += 1;
    tree.add_term(base, make_comm(make_leaf_x(M1), make_leaf_p(N1)));

    // mode-1 double commutators
    {
        CRat w = base * (-(ii * CRat(Rational(i64(M[0] + 1), 2))));
        for (int k = 1; k <= N[0]; ++k) {
            Mono outer = N;
            outer[0] -= k;
            if (all_zero(outer)) continue;
            Mono inner(n, 0);
            inner[0] = k;
            tree.add_term(w, make_comm(make_leaf_p(outer),
                                       make_comm(make_leaf_x(M), make_leaf_p(inner))));
        }
    }

    for (int j = 1; j < n; ++j) {
        // recursive anticommutator block
        if (M[j] > 0 && N[j] > 0) {
            CRat w = base * (-(ii * CRat(Rational(i64(M[j]) * i64(N[j]), 2))));
            Mono Mr = M, Nr = N;
            Mr[0] += 1;
            Mr[j] -= 1;
            Nr[0] += 1;
            Nr[j] -= 1;
            decompose_into(tree, w, std::move(Mr), std::move(Nr));
        }
        // remaining double commutators
        if (M[j] > 0 && N[j] > 0) {
            CRat w = base * (-(ii * CRat(Rational(i64(M[j]), 2))));
            for (int k = 0; k < N[j]; ++k) {
                Mono outer(n, 0);
                for (int t = j + 1; t < n; ++t) outer[t] = N[t];
                outer[j] += N[j] - k - 1;
                if (all_zero(outer)) continue;
                Mono xin = M;
                xin[0] += 1;
                xin[j] -= 1;
                Mono pin(n, 0);
                for (int t = 0; t < j; ++t) pin[t] = N[t];
                pin[0] += 1;
                pin[j] += k;
                tree.add_term(w, make_comm(make_leaf_p(outer),
                                           make_comm(make_leaf_x(xin), make_leaf_p(pin))));
            }
        }
    }
}

} // namespace detail

inline ExprTree anticomm_decompose(const Mono& M, const Mono& N, CRat weight = CRat(1)) {
    if (M.size() != N.size()) throw std::invalid_argument("anticomm_decompose: arity mismatch");
    ExprTree tree(int(M.size()));
    detail::decompose_into(tree, weight, M, N);
    tree.fold_scalars();
    return tree;
}

inline bool verify_decomposition(const Mono& M, const Mono& N) {
    int n = int(M.size());
    ExprTree t = anticomm_decompose(M, N);
    WeylOp target = anticommutator(WeylOp::monomial(n, M, Mono(n, 0)),
                                   WeylOp::monomial(n, Mono(n, 0), N));
    return (t.expand() - target).is_zero();
}

// ---- Trotter tokens ----

struct Token;
using TokenSeq = std::vector<Token>;

struct Token {
    enum class Kind { QuadPhase, Fourier, FourierInv, GroupComm, GlobalPhase } kind;
    // QuadPhase: exp(i w x^M); w real
    Rational weight;
    Mono mono;
    std::vector<int> fourier_modes; // Fourier / FourierInv
    // GroupComm: generator c [A, B]; realized by group-commutator scheduling
    CRat comm_coeff;
    std::shared_ptr<TokenSeq> lhs, rhs;
};

// Formal generator of a token sequence, used to check regrouping.
inline WeylOp token_generator(int n, const Token& t);

inline WeylOp seq_generator(int n, const TokenSeq& seq) {
    WeylOp acc = WeylOp::zero(n);
    for (auto& t : seq) acc = acc + token_generator(n, t);
    return acc;
}

inline WeylOp token_generator(int n, const Token& t) {
    switch (t.kind) {
        case Token::Kind::QuadPhase: {
            // wrapped between Fourier pairs the x-monomial acts on p; the
            // wrapping is tracked by the emitter, so alone it is w x^M
            return WeylOp::monomial(n, t.mono, Mono(n, 0), CRat(t.weight));
        }
        case Token::Kind::Fourier:
        case Token::Kind::FourierInv:
            return WeylOp::zero(n);
        case Token::Kind::GroupComm:
            return commutator(seq_generator(n, *t.lhs), seq_generator(n, *t.rhs)).scaled(t.comm_coeff);
        case Token::Kind::GlobalPhase:
            return WeylOp::identity(n, CRat(t.weight));
    }
    return WeylOp::zero(n);
}

// Generator with Fourier wrapping applied (x^M tokens between a Fourier pair
// contribute p^M); this is the quantity that must regroup to the split.
inline WeylOp seq_generator_wrapped(int n, const TokenSeq& seq) {
    WeylOp acc = WeylOp::zero(n);
    int depth = 0;
    for (auto& t : seq) {
        switch (t.kind) {
            case Token::Kind::Fourier: ++depth; break;
            case Token::Kind::FourierInv: --depth; break;
            case Token::Kind::QuadPhase:
                if (depth == 0)
                    acc = acc + WeylOp::monomial(n, t.mono, Mono(n, 0), CRat(t.weight));
                else
                    acc = acc + WeylOp::monomial(n, Mono(n, 0), t.mono, CRat(t.weight));
                break;
            case Token::Kind::GroupComm:
                acc = acc + commutator(seq_generator_wrapped(n, *t.lhs),
                                       seq_generator_wrapped(n, *t.rhs))
                                .scaled(t.comm_coeff);
                break;
            case Token::Kind::GlobalPhase:
                acc = acc + WeylOp::identity(n, CRat(t.weight));
                break;
        }
    }
    return acc;
}

namespace detail {

inline TokenSeq node_tokens(int n, const TreeNodePtr& node, const CRat& coeff);

inline TokenSeq scaled_leaf_tokens(int n, const TreeNodePtr& node, const Rational& w) {
    TokenSeq seq;
    if (node->kind == TreeNode::Kind::LeafX) {
        seq.push_back({Token::Kind::QuadPhase, w, node->mono, {}, CRat(0), nullptr, nullptr});
        return seq;
    }
    std::vector<int> modes;
    for (int i = 0; i < n; ++i)
        if (node->mono[i]) modes.push_back(i);
    seq.push_back({Token::Kind::Fourier, Rational(0), {}, modes, CRat(0), nullptr, nullptr});
    seq.push_back({Token::Kind::QuadPhase, w, node->mono, {}, CRat(0), nullptr, nullptr});
    seq.push_back({Token::Kind::FourierInv, Rational(0), {}, modes, CRat(0), nullptr, nullptr});
    return seq;
}

inline TokenSeq node_tokens(int n, const TreeNodePtr& node, const CRat& coeff) {
    TokenSeq seq;
    if (node->kind == TreeNode::Kind::Comm) {
        auto lhs = std::make_shared<TokenSeq>(node_tokens(n, node->lhs, CRat(1)));
        auto rhs = std::make_shared<TokenSeq>(node_tokens(n, node->rhs, CRat(1)));
        seq.push_back({Token::Kind::GroupComm, Rational(0), {}, {}, coeff, lhs, rhs});
        return seq;
    }
    if (!coeff.im().is_zero())
        throw std::logic_error("trotter: leaf token with complex weight");
    return scaled_leaf_tokens(n, node, coeff.re());
}

} // namespace detail

// First-order splitting: per Trotter step, one token group per split term.
// Commutator structures are emitted as generator-level group-commutator
// tokens; their concrete scheduling is left to the consumer.
inline TokenSeq trotter_sequence(const WeylOp& H, const Rational& t, int steps) {
    auto split = split_hamiltonian(H);
    int n = H.modes();
    Rational tau = t / Rational(steps);
    TokenSeq out;
    for (int s = 0; s < steps; ++s) {
        for (auto& term : split) {
            ExprTree tree(n);
            if (term.kind == TermKind::AntiComm)
                tree = anticomm_decompose(term.xm, term.pm, CRat(term.weight * tau));
            else {
                tree = ExprTree(n);
                tree.add_term(CRat(Rational(0), term.weight * tau),
                              make_comm(make_leaf_x(term.xm), make_leaf_p(term.pm)));
            }
            for (auto& [k, pr] : tree.terms()) {
                (void)k;
                auto seq = detail::node_tokens(n, pr.second, pr.first);
                out.insert(out.end(), seq.begin(), seq.end());
            }
            if (!tree.constant().is_zero()) {
                if (!tree.constant().im().is_zero())
                    throw std::logic_error("trotter: complex global phase");
                out.push_back({Token::Kind::GlobalPhase, tree.constant().re(), {}, {}, CRat(0),
                               nullptr, nullptr});
            }
        }
    }
    return out;
}

// ---- text front end (order-sensitive products of x/p monomials) ----

namespace parse {

struct Atom {
    char kind; // 'x' or 'p'
    int index; // 0-based
};

// Sum of coefficient-weighted ordered atom strings; products keep their
// written order so only that order gets normal-ordered.
struct ParsedOp {
    std::vector<std::pair<CRat, std::vector<Atom>>> terms;

    static ParsedOp constant(CRat c) {
        ParsedOp r;
        r.terms.push_back({c, {}});
        return r;
    }
    static ParsedOp atom(char k, int idx) {
        ParsedOp r;
        r.terms.push_back({CRat(1), {Atom{k, idx}}});
        return r;
    }
    ParsedOp operator+(const ParsedOp& o) const {
        ParsedOp r = *this;
        r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
        return r;
    }
    ParsedOp operator*(const ParsedOp& o) const {
        ParsedOp r;
        for (auto& a : terms)
            for (auto& b : o.terms) {
                auto atoms = a.second;
                atoms.insert(atoms.end(), b.second.begin(), b.second.end());
                r.terms.push_back({a.first * b.first, std::move(atoms)});
            }
        return r;
    }
    ParsedOp negated() const {
        ParsedOp r = *this;
        for (auto& t : r.terms) t.first = -t.first;
        return r;
    }
    ParsedOp powed(int k) const {
        ParsedOp acc = constant(CRat(1));
        for (int i = 0; i < k; ++i) acc = acc * *this;
        return acc;
    }
};

class OpParser {
  public:
    explicit OpParser(const std::string& text) : lex_(text) { advance(); }

    ParsedOp run() {
        ParsedOp e = expr();
        if (tok_.type != parse_detail::Token::End)
            throw std::invalid_argument("trailing input in operator");
        return e;
    }
    int max_mode() const { return max_mode_; }

  private:
    using Token = parse_detail::Token;
    void advance() { tok_ = lex_.next(); }
    bool is_op(char c) const { return tok_.type == Token::Op && tok_.op == c; }

    ParsedOp expr() {
        bool neg = false;
        if (is_op('-')) { neg = true; advance(); }
        else if (is_op('+')) advance();
        ParsedOp acc = term();
        if (neg) acc = acc.negated();
        while (is_op('+') || is_op('-')) {
            bool minus = tok_.op == '-';
            advance();
            ParsedOp t = term();
            acc = acc + (minus ? t.negated() : t);
        }
        return acc;
    }
    ParsedOp term() {
        ParsedOp acc = factor();
        while (is_op('*') || tok_.type == Token::Sym || tok_.type == Token::Num || is_op('(')) {
            if (is_op('*')) advance();
            acc = acc * factor();
        }
        return acc;
    }
    ParsedOp factor() {
        ParsedOp base = primary();
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
    ParsedOp primary() {
        if (tok_.type == Token::Num) {
            CRat v{tok_.num};
            advance();
            return ParsedOp::constant(v);
        }
        if (tok_.type == Token::Sym) {
            char k = tok_.sym_kind;
            int idx = tok_.sym_index;
            advance();
            if (k == 's') throw std::invalid_argument("s variables are not valid in an operator");
            if (idx < 1) throw std::invalid_argument("symbol indices start at 1");
            max_mode_ = std::max(max_mode_, idx);
            return ParsedOp::atom(k, idx - 1);
        }
        if (is_op('(')) {
            advance();
            ParsedOp e = expr();
            if (!is_op(')')) throw std::invalid_argument("missing ')'");
            advance();
            return e;
        }
        throw std::invalid_argument("malformed operator expression");
    }

    parse_detail::Lexer lex_;
    Token tok_{Token::End, Rational(0), 0, 0, 0};
    int max_mode_ = 0;
};

} // namespace parse

inline WeylOp parse_weyl(const std::string& text, int nmodes = -1) {
    parse::OpParser parser(text);
    parse::ParsedOp e = parser.run();
    int n = nmodes >= 0 ? nmodes : parser.max_mode();
    if (nmodes >= 0 && parser.max_mode() > nmodes)
        throw std::invalid_argument("operator uses more modes than declared");
    WeylOp acc = WeylOp::zero(n);
    for (auto& [coeff, atoms] : e.terms) {
        WeylOp t = WeylOp::identity(n, coeff);
        for (auto& a : atoms) t = t * (a.kind == 'x' ? WeylOp::x(n, a.index) : WeylOp::p(n, a.index));
        acc = acc + t;
    }
    return acc;
}

} // namespace cvqc::weyl
