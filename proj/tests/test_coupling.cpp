#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cvqc/coupling.hpp"

using namespace cvqc;
using namespace cvqc::coupling;
using linalg::Mat;

namespace {

ScalarExpr S1 = ScalarExpr::var(0);
ScalarExpr S2 = ScalarExpr::var(1);

Poly P(const std::string& t, int n = -1) { return parse_poly(t, n); }

Mat from_rows(std::vector<std::vector<double>> rows) {
    Mat m(int(rows.size()), int(rows[0].size()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
    return m;
}

Poly random_cubic(Rng& rng, int n) {
    Poly p(n);
    for (int t = 0; t < 5; ++t) {
        Mono m(n, 0);
        for (int d = 0; d < 3; ++d) m[rng.below(n)] += 1;
        p.add_term(std::move(m), ScalarExpr::constant(rng.signed_rational()));
    }
    if (p.is_zero()) p = Poly::x(n, 0).pow(3);
    return p;
}

// the two-step chain of the quartic two-mode example, with the corrected
// second coupling: K2 = diag(q/s1, q/s2, (s1^4)^(1/3)/s1) * [[1,0],[0,1],[1,0]],
// q = (s1^2 s2^2)^(1/3)
StarChain small_example_chain() {
    StarChain chain;
    chain.V = P("x1^2*x2^2 + x1^4", 2);
    chain.steps.push_back({-chain.V, sym_identity(2), 0, 2});
    Poly f2 = P("0 - 2*x1*x2^2 - 2*x1^2*x2 - 4*x3^3", 3);
    ScalarExpr q = ScalarExpr::pow(S1 * S1 * S2 * S2, Rational(1, 3));
    ScalarExpr d1 = q * ScalarExpr::pow(S1, Rational(-1));
    ScalarExpr d2 = q * ScalarExpr::pow(S2, Rational(-1));
    ScalarExpr d3 = ScalarExpr::pow(ScalarExpr::pow(S1, Rational(4)), Rational(1, 3)) *
                    ScalarExpr::pow(S1, Rational(-1));
    ScalarExpr zero = ScalarExpr::constant(0);
    SymMatrix K2{{d1, zero}, {zero, d2}, {d3, zero}};
    chain.steps.push_back({f2, K2, 2, 3});
    return chain;
}

} // namespace

TEST_CASE("star operator") {
    // x^N - (x - s)^N has leading term N s x^(N-1)
    int N = 6;
    Poly xN = Poly::x(1, 0).pow(N);
    Poly r = star(xN, -xN, sym_identity(1), {S1});
    CHECK(r.degree() == N - 1);
    Mono lead{N - 1};
    CHECK(r.coeff(lead) == ScalarExpr::constant(N) * S1);

    // g = 0 leaves f untouched
    SymMatrix K(3, std::vector<ScalarExpr>(1, ScalarExpr::constant(1)));
    Poly f = P("x1^3", 1);
    CHECK((star(f, Poly::zero(3), K, {S1, S2, ScalarExpr::var(2)}) - f).is_zero());

    // the quartic example's first step: order-3 slice
    Poly V = P("x1^2*x2^2 + x1^4", 2);
    Poly step = star(V, -V, sym_identity(2), {S1, S2});
    Poly order3 = step.homogeneous_part(3);
    Poly expect = Poly(2);
    expect.add_term({1, 2}, ScalarExpr::constant(2) * S1);
    expect.add_term({2, 1}, ScalarExpr::constant(2) * S2);
    expect.add_term({3, 0}, ScalarExpr::constant(4) * S1);
    CHECK((order3 - expect).is_zero());

    CHECK_THROWS_AS(star(f, f, sym_identity(2), {S1, S2}), std::invalid_argument);
}

TEST_CASE("diamond operator (numeric)") {
    NumPoly f = NumPoly::from_exact(P("x1^3 + x1*x2", 2), {});
    NumPoly g = NumPoly::from_exact(P("x1^2", 1), {});

    // K = 0: f(x) + g(-s)
    Mat K0(1, 2);
    NumPoly d0 = diamond(f, g, K0, {0.7});
    NumPoly expect = f;
    expect.add_term({0, 0}, 0.49);
    double diff = (d0 + expect.scaled(-1.0)).max_coeff();
    CHECK(diff < 1e-12);

    // g = 0, s = 0: f(P(K) x)
    Mat K1 = from_rows({{1.0, 0.5}});
    NumPoly d1 = diamond(f, NumPoly(1), K1, {0.0});
    Mat Pk = linalg::p_of_k(K1);
    std::vector<std::vector<double>> Pm(2, std::vector<double>(2));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) Pm[i][j] = Pk(i, j);
    NumPoly d1e = f.substitute_affine(Pm, {0.0, 0.0});
    CHECK((d1 + d1e.scaled(-1.0)).max_coeff() < 1e-12);

    // power-sum coupling for the two-mode cubic gate: degree drops to 2
    double c6 = std::cbrt(6.0), c2 = std::cbrt(2.0);
    Mat Kw = from_rows({{1 / c6, 1 / c6}, {1 / c6, -1 / c6}, {-c2 / c6, 0.0}});
    NumPoly Vq = NumPoly::from_exact(P("x1*x2^2", 2), {});
    NumPoly fw = NumPoly::from_exact(P("0 - x1^3 - x2^3 - x3^3", 3), {});
    Rng rng(4);
    for (int it = 0; it < 5; ++it) {
        std::vector<double> s{rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0)};
        NumPoly dd = diamond(Vq, fw, Kw, s);
        CHECK(dd.max_coeff_above_degree(2) < 1e-12 * std::max(1.0, dd.max_coeff()));
    }
}

TEST_CASE("theorem-1 identity residual") {
    // K = I, f = g = 0: both sides are p+
    Mat I2 = Mat::identity(2);
    CHECK(theorem1_residual(Poly::zero(2), Poly::zero(2), I2, 5) < 1e-14);

    Rng rng(17);
    // K = I2, random cubics
    for (int it = 0; it < 5; ++it) {
        Poly f = random_cubic(rng, 2), g = random_cubic(rng, 2);
        CHECK(theorem1_residual(f, g, I2, 10, it) < 1e-10);
    }
    // rectangular K: f on 2 modes, g on 3 modes
    for (int it = 0; it < 5; ++it) {
        Mat K(3, 2);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 2; ++j) K(i, j) = rng.centered(1.5);
        Poly f = random_cubic(rng, 2), g = random_cubic(rng, 3);
        CHECK(theorem1_residual(f, g, K, 10, 100 + it) < 1e-10);
    }
}

TEST_CASE("reduce_step") {
    // four-mode multilinear gate, first step: top order 3 is sum_j s_j prod_{i!=j} x_i
    Poly V = P("x1*x2*x3*x4", 4);
    std::vector<ScalarExpr> s;
    for (int i = 0; i < 4; ++i) s.push_back(ScalarExpr::var(i));
    ReduceResult r = reduce_step(V, -V, sym_identity(4), s);
    CHECK(r.reduced);
    CHECK(r.result.degree() == 3);
    // brute-force oracle: expand V(x) - V(x - s) directly
    std::vector<std::vector<ScalarExpr>> M = sym_identity(4);
    std::vector<ScalarExpr> minus_s;
    for (auto& e : s) minus_s.push_back(-e);
    Poly oracle = (V - V.substitute_affine(M, minus_s)).homogeneous_part(3);
    CHECK((r.result.homogeneous_part(3) - oracle).is_zero());
    // coefficient of x2 x3 x4 is s1 (not 4 s1)
    CHECK(r.result.coeff({0, 1, 1, 1}) == S1);

    // f = 0 leaves the grading unchanged and is not an error
    ReduceResult r0 = reduce_step(V, Poly::zero(4), sym_identity(4), s);
    CHECK_FALSE(r0.reduced);
    CHECK((r0.result - V).is_zero());

    // the quartic example's second step with the corrected coupling drops to 2
    StarChain chain = small_example_chain();
    Poly after1 = reduce_step(chain.V, chain.steps[0].f, chain.steps[0].K,
                              chain.step_outcome_symbols(0))
                      .result;
    CHECK(after1.degree() == 3);
    ReduceResult r2 = reduce_step(after1, chain.steps[1].f, chain.steps[1].K,
                                  chain.step_outcome_symbols(1));
    CHECK(r2.reduced);
    CHECK(r2.result.degree() == 2);

    // full-chain certification agrees
    CHECK(chain_residual_above(chain, 2) < 1e-10);
}

TEST_CASE("extract_quadratic") {
    Poly q = P("3*x1^2 + 2*x1*x2 + x2 + 5", 2);
    QuadResidual qr = extract_quadratic(q);
    CHECK(qr.A[0][0] == ScalarExpr::constant(3));
    CHECK(qr.A[0][1] == ScalarExpr::constant(1));
    CHECK(qr.A[1][0] == ScalarExpr::constant(1));
    CHECK(qr.A[1][1] == ScalarExpr::constant(0));
    CHECK(qr.b[0] == ScalarExpr::constant(0));
    CHECK(qr.b[1] == ScalarExpr::constant(1));
    CHECK(qr.c == ScalarExpr::constant(5));

    // degree > 2 is rejected
    CHECK_THROWS_AS(extract_quadratic(P("x1^3", 1)), std::invalid_argument);

    // one-step chain of the two-mode cubic gate: A has the
    // [[0, s2], [s2, s1]] pattern in the star frame
    Poly V = P("x1*x2^2", 2);
    Poly c1 = star(V, -V, sym_identity(2), {S1, S2});
    QuadResidual qc = extract_quadratic(c1.truncated_above(2));
    CHECK(qc.A[0][0].is_zero());
    CHECK(qc.A[0][1] == S2);
    CHECK(qc.A[1][1] == S1);
}

TEST_CASE("star-to-diamond round trip") {
    Rng rng(8);

    // single step, K = I, cubic gate
    StarChain c1;
    c1.V = P("x1*x2^2", 2);
    c1.steps.push_back({-c1.V, sym_identity(2), 0, 2});
    DiamondChain d1 = star_to_diamond(c1);
    for (int it = 0; it < 5; ++it) {
        std::vector<std::vector<double>> s{{rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0)}};
        CHECK(diamond_roundtrip_residual(d1, s) < 1e-9);
        // K'_1 = K_1 = I for the first step
        CHECK((d1.resolve(s).kprime[0] - Mat::identity(2)).norm_inf() < 1e-14);
        // the residual quadratic matches equals the star quadratic under the
        // affine map; also check it is degree <= 2
        CHECK(d1.resolve(s).quadratic.max_coeff_above_degree(2) < 1e-10);
    }

    // three-mode multilinear gate, one step
    StarChain c2;
    c2.V = P("x1*x2*x3", 3);
    c2.steps.push_back({-c2.V, sym_identity(3), 0, 3});
    DiamondChain d2 = star_to_diamond(c2);
    std::vector<std::vector<double>> s2{{0.9, 1.4, 0.6}};
    CHECK(diamond_roundtrip_residual(d2, s2) < 1e-9);

    // two-step quartic example at sampled positive outcomes
    DiamondChain ds = star_to_diamond(small_example_chain());
    for (int it = 0; it < 20; ++it) {
        std::vector<std::vector<double>> s{{rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0)},
                                           {rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0),
                                            rng.uniform(0.3, 2.0)}};
        CHECK(diamond_roundtrip_residual(ds, s) < 1e-9);
        CHECK(ds.resolve(s).quadratic.max_coeff_above_degree(2) < 1e-8);
    }
}

TEST_CASE("star is associative in chains (exact without fractional powers)") {
    // ((V * f1) * f2) built by two reduce_steps equals the one-shot chain
    // evaluation, exactly, for a chain whose recipes are outcome-polynomial
    ScalarExpr zero = ScalarExpr::constant(0), one = ScalarExpr::constant(1);
    Poly V = P("x1^2*x2^2 + x1^4", 2);
    // order-3 layer after step 1 is 2s1 x1x2^2 + 2s2 x1^2x2 + 4s1 x1^3;
    // cancel it with f2 = y1^2 y2 + y3^2 y4 and polynomial coupling rows
    Poly f2 = P("x1^2*x2 + x3^2*x4", 4);
    SymMatrix K2{{one, zero},
                 {ScalarExpr::constant(-4) * S1, ScalarExpr::constant(-2) * S2},
                 {zero, one},
                 {ScalarExpr::constant(-2) * S1, zero}};
    StarChain chain;
    chain.V = V;
    chain.steps.push_back({-V, sym_identity(2), 0, 2});
    chain.steps.push_back({f2, K2, 2, 4});

    ReduceResult r1 = reduce_step(V, -V, sym_identity(2), chain.step_outcome_symbols(0));
    REQUIRE(r1.reduced);
    ReduceResult r2 = reduce_step(r1.result, f2, K2, chain.step_outcome_symbols(1));
    REQUIRE(r2.reduced);
    CHECK(r2.result.degree() <= 2);
    // the coefficients are outcome polynomials, so the cancellation is exact
    // and the one-shot evaluation agrees term for term
    CHECK((chain.evaluate() - r2.result).is_zero());
}

TEST_CASE("mode-wise special case reproduces the adaptive matrix convention") {
    // For the two-mode cubic gate with K = I, the measured linear set is
    // sqrt(2) (p+ + A x+) with A = -sqrt(2) [[0, s2],[s2, s1]] in raw-outcome
    // units; in processed-outcome units s_raw = sqrt(2) s the same matrix is
    // -2 [[0, s2],[s2, s1]](s), which must equal -2 A_quad of the residual.
    StarChain c;
    c.V = P("x1*x2^2", 2);
    c.steps.push_back({-c.V, sym_identity(2), 0, 2});
    DiamondChain dc = star_to_diamond(c);
    std::vector<std::vector<double>> s{{0.8, 1.3}};
    NumQuad q = extract_quadratic(dc.resolve(s).quadratic);
    Mat expected = from_rows({{0.0, s[0][1]}, {s[0][1], s[0][0]}}).scaled(-2.0);
    Mat meas = q.A.scaled(-2.0);
    CHECK((meas - expected).norm_inf() < 1e-10);
}

TEST_CASE("sign-problem scan") {
    StarChain chain = small_example_chain();
    CHECK_FALSE(chain.has_sign_problem_steps());

    // an even root of a sign-indefinite entry trips the scan
    SymMatrix bad{{ScalarExpr::pow(S1 - S2, Rational(1, 2))}};
    StarChain c2;
    c2.V = P("x1^3", 1);
    c2.steps.push_back({-c2.V, bad, 0, 1});
    CHECK(c2.has_sign_problem_steps());
}
