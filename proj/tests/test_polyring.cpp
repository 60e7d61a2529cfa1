#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cvqc/poly.hpp"
#include "cvqc/rng.hpp"

using namespace cvqc;

namespace {

Poly P(const std::string& text, int n = -1) { return parse_poly(text, n); }

// Independent oracle for tensor contraction: expand A v^(x)j x^(x)(k-j) by
// brute force over all index tuples of the symmetric tensor.
Poly contract_oracle(const Poly& f, const std::vector<ScalarExpr>& v, int j) {
    SymTensor A = SymTensor::from_poly(f);
    int k = A.order(), n = A.dim();
    Poly out(n);
    std::vector<int> idx(k, 0);
    while (true) {
        ScalarExpr val = A.entry(idx);
        if (!val.is_zero()) {
            std::vector<ScalarExpr> fac{val};
            Mono m(n, 0);
            for (int t = 0; t < j; ++t) fac.push_back(v[idx[t]]);
            for (int t = j; t < k; ++t) m[idx[t]] += 1;
            out.add_term(std::move(m), ScalarExpr::prod(std::move(fac)));
        }
        int pos = k - 1;
        while (pos >= 0 && idx[pos] == n - 1) idx[pos--] = 0;
        if (pos < 0) break;
        idx[pos] += 1;
    }
    return out;
}

bool poly_equal_exact(const Poly& a, const Poly& b) { return (a - b).is_zero(); }

Poly random_poly(Rng& rng, int n, int maxdeg, int nterms) {
    Poly p(n);
    for (int t = 0; t < nterms; ++t) {
        Mono m(n, 0);
        int deg = int(rng.below(maxdeg + 1));
        for (int d = 0; d < deg; ++d) m[rng.below(n)] += 1;
        p.add_term(std::move(m), ScalarExpr::constant(rng.signed_rational()));
    }
    return p;
}

} // namespace

TEST_CASE("rational arithmetic basics") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(-3, -9) == Rational(1, 3));
    CHECK(Rational(2, 3).pow(-2) == Rational(9, 4));
    CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
    CHECK_THROWS_AS(Rational(INT64_MAX) * Rational(INT64_MAX), std::overflow_error);
}

TEST_CASE("arith add/mul and errors") {
    Poly a = P("x1*x2^2", 2);
    Poly b = P("x1^4", 2);
    CHECK(poly_equal_exact(a + b, P("x1*x2^2 + x1^4", 2)));

    CHECK((a * Poly::zero(2)).is_zero());

    Poly d = P("x1+x2", 2) * P("x1-x2", 2);
    CHECK(poly_equal_exact(d, P("x1^2 - x2^2", 2)));

    CHECK_THROWS_AS(P("x1", 1) + P("x1", 2), std::invalid_argument);
}

TEST_CASE("grad") {
    auto g = P("x1*x2^2", 2).grad();
    CHECK(poly_equal_exact(g[0], P("x2^2", 2)));
    CHECK(poly_equal_exact(g[1], P("2*x1*x2", 2)));

    auto gc = Poly::constant(3, 7).grad();
    for (auto& gi : gc) CHECK(gi.is_zero());

    auto g3 = P("x1*x2*x3", 3).grad();
    CHECK(poly_equal_exact(g3[0], P("x2*x3", 3)));
    CHECK(poly_equal_exact(g3[1], P("x1*x3", 3)));
    CHECK(poly_equal_exact(g3[2], P("x1*x2", 3)));
}

TEST_CASE("grad product rule on random instances") {
    Rng rng(7);
    for (int it = 0; it < 12; ++it) {
        Poly f = random_poly(rng, 2, 3, 3);
        Poly g = random_poly(rng, 2, 3, 3);
        auto gf = f.grad(), gg = g.grad(), gp = (f * g).grad();
        for (int i = 0; i < 2; ++i)
            CHECK(poly_equal_exact(gp[i], gf[i] * g + f * gg[i]));
    }
}

TEST_CASE("substitute_affine basics") {
    // f = x^3, x -> 2x
    Poly f = P("x1^3", 1);
    auto r = f.substitute_affine({{ScalarExpr::constant(2)}}, {ScalarExpr::constant(0)});
    CHECK(poly_equal_exact(r, P("8*x1^3", 1)));

    // swap symmetry of x1*x2
    Poly g = P("x1*x2", 2);
    std::vector<std::vector<ScalarExpr>> swap{
        {ScalarExpr::constant(0), ScalarExpr::constant(1)},
        {ScalarExpr::constant(1), ScalarExpr::constant(0)}};
    auto gs = g.substitute_affine(swap, {ScalarExpr::constant(0), ScalarExpr::constant(0)});
    CHECK(poly_equal_exact(gs, g));

    // x^N - (x-s)^N = N s x^{N-1} + lower order
    int N = 5;
    Poly xN = P("x1^5", 1);
    auto shifted = xN.substitute_affine({{ScalarExpr::constant(1)}}, {-ScalarExpr::var(0)});
    Poly diff = xN - shifted;
    CHECK(diff.degree() == N - 1);
    Mono lead(1, 0);
    lead[0] = N - 1;
    CHECK(diff.coeff(lead) == ScalarExpr::constant(N) * ScalarExpr::var(0));

    CHECK_THROWS_AS(g.substitute_affine(swap, {ScalarExpr::constant(0)}), std::invalid_argument);
}

TEST_CASE("substitute_affine composition law (exact, random)") {
    Rng rng(11);
    auto small = [&rng] {
        Rational r(1 + i64(rng.below(3)), 1 + i64(rng.below(2)));
        return ScalarExpr::constant(rng.below(2) ? -r : r);
    };
    for (int it = 0; it < 8; ++it) {
        Poly f = random_poly(rng, 2, 3, 3);
        std::vector<std::vector<ScalarExpr>> M1(2, std::vector<ScalarExpr>(2)), M2(2, std::vector<ScalarExpr>(2));
        std::vector<ScalarExpr> b1(2), b2(2);
        for (int i = 0; i < 2; ++i) {
            b1[i] = small();
            b2[i] = small();
            for (int j = 0; j < 2; ++j) {
                M1[i][j] = small();
                M2[i][j] = small();
            }
        }
        // f(M1 y + b1) with y = M2 x + b2  ==  f((M1 M2) x + (M1 b2 + b1))
        Poly lhs = f.substitute_affine(M1, b1).substitute_affine(M2, b2);
        std::vector<std::vector<ScalarExpr>> M12(2, std::vector<ScalarExpr>(2));
        std::vector<ScalarExpr> b12(2);
        for (int i = 0; i < 2; ++i) {
            b12[i] = b1[i];
            for (int k = 0; k < 2; ++k) b12[i] = b12[i] + M1[i][k] * b2[k];
            for (int j = 0; j < 2; ++j) {
                ScalarExpr acc = ScalarExpr::constant(0);
                for (int k = 0; k < 2; ++k) acc = acc + M1[i][k] * M2[k][j];
                M12[i][j] = acc;
            }
        }
        CHECK(poly_equal_exact(lhs, f.substitute_affine(M12, b12)));
    }
}

TEST_CASE("direct_sum") {
    Poly c3 = P("x1^3", 1);
    CHECK(poly_equal_exact(Poly::direct_sum(c3, c3), P("x1^3 + x2^3", 2)));
    Poly f = P("x1*x2", 2);
    auto padded = Poly::direct_sum(f, Poly::zero(2));
    CHECK(padded.modes() == 4);
    CHECK(poly_equal_exact(padded, P("x1*x2", 4)));
    auto three = Poly::direct_sum(Poly::direct_sum(c3, c3), c3);
    CHECK(poly_equal_exact(three, P("x1^3 + x2^3 + x3^3", 3)));
}

TEST_CASE("contract matches the brute-force tensor oracle") {
    std::vector<ScalarExpr> ones4(4, ScalarExpr::constant(1));
    Poly f = P("x1*x2*x3*x4", 4);
    Poly got = f.contract(ones4, 1);
    Poly expect = P("1/4*x2*x3*x4 + 1/4*x1*x3*x4 + 1/4*x1*x2*x4 + 1/4*x1*x2*x3", 4);
    CHECK(poly_equal_exact(got, expect));
    CHECK(poly_equal_exact(got, contract_oracle(f, ones4, 1)));

    // j = 0 is the identity
    CHECK(poly_equal_exact(f.contract(ones4, 0), f));

    // full contraction of x^2 against ones
    Poly sq = P("x1^2", 1);
    std::vector<ScalarExpr> ones1{ScalarExpr::constant(1)};
    CHECK(poly_equal_exact(sq.contract(ones1, 2), Poly::constant(1, 1)));

    CHECK_THROWS_AS(sq.contract(ones1, 3), std::invalid_argument);

    Rng rng(3);
    for (int n = 2; n <= 4; ++n)
        for (int k = 2; k <= 5; ++k)
            for (int j = 0; j <= k; ++j) {
                Poly h(n);
                for (int t = 0; t < 4; ++t) {
                    Mono m(n, 0);
                    for (int d = 0; d < k; ++d) m[rng.below(n)] += 1;
                    h.add_term(std::move(m), ScalarExpr::constant(rng.signed_rational()));
                }
                if (h.is_zero()) continue;
                std::vector<ScalarExpr> v;
                for (int i = 0; i < n; ++i) v.push_back(ScalarExpr::constant(rng.signed_rational()));
                CHECK(poly_equal_exact(h.contract(v, j), contract_oracle(h, v, j)));
            }
}

TEST_CASE("homogeneous_part and eval") {
    Poly f = P("x1*x2^2 + x1^4", 2);
    CHECK(poly_equal_exact(f.homogeneous_part(3), P("x1*x2^2", 2)));
    CHECK(f.homogeneous_part(7).is_zero());

    Poly g = P("4*s1*x1^3", 1);
    ScalarExpr at = g.eval_rational_point({Rational(1)});
    auto v = at.eval_rational({Rational(2)});
    REQUIRE(v.has_value());
    CHECK(*v == Rational(8));

    // fractional power of a non-positive point is the documented error
    ScalarExpr bad = ScalarExpr::pow(ScalarExpr::var(0), Rational(1, 2));
    CHECK_THROWS_AS((void)bad.eval_real({-1.0L}), std::domain_error);
}

TEST_CASE("poly <-> symmetric tensor round trip") {
    Rng rng(42);
    for (int n = 1; n <= 8; ++n)
        for (int k = 1; k <= 8; ++k) {
            Poly h(n);
            for (int t = 0; t < 5; ++t) {
                Mono m(n, 0);
                for (int d = 0; d < k; ++d) m[rng.below(n)] += 1;
                h.add_term(std::move(m), ScalarExpr::constant(rng.signed_rational()));
            }
            if (h.is_zero()) h = Poly::x(n, 0).pow(k);
            CHECK(poly_equal_exact(SymTensor::from_poly(h).to_poly(), h));
        }

    // accessor symmetrizes
    SymTensor t = SymTensor::from_poly(P("x1*x2^2", 2));
    CHECK(t.entry({0, 1, 1}) == t.entry({1, 0, 1}));
    CHECK(t.entry({1, 1, 0}) == ScalarExpr::constant(Rational(1, 3)));
}

TEST_CASE("scalar expression identities") {
    // exact normal form without fractional powers
    ScalarExpr s1 = ScalarExpr::var(0), s2 = ScalarExpr::var(1);
    ScalarExpr e = s1 * (s2 + ScalarExpr::constant(1)) - s1 * s2 - s1;
    CHECK(e.is_zero_exact());

    // fractional powers certified by positive sampling:
    // q = (s1^2 s2^2)^(1/3);  (q/s1) * (q/s2)^2 == s1
    ScalarExpr q = ScalarExpr::pow(s1 * s1 * s2 * s2, Rational(1, 3));
    ScalarExpr d1 = q * ScalarExpr::pow(s1, Rational(-1));
    ScalarExpr d2 = q * ScalarExpr::pow(s2, Rational(-1));
    ScalarExpr lhs = d1 * d2 * d2;
    CHECK(ScalarExpr::equal(lhs, s1));
    CHECK_FALSE(ScalarExpr::equal(lhs, s2));

    // structural power arithmetic: ((x)^(1/3))^3 == x even for sums
    ScalarExpr sum = s1 + s2;
    ScalarExpr root = ScalarExpr::pow(sum, Rational(1, 3));
    CHECK(ScalarExpr::pow(root, Rational(3)) == sum);

    // (1/6)^(1/2) squared folds back to 1/6 exactly
    ScalarExpr c = ScalarExpr::pow(ScalarExpr::constant(Rational(1, 6)), Rational(1, 2));
    CHECK(ScalarExpr::pow(c, Rational(2)) == ScalarExpr::constant(Rational(1, 6)));

    // sign scan: even root of a sign-indefinite expression
    ScalarExpr indef = s1 - s2;
    CHECK(ScalarExpr::pow(indef, Rational(1, 2)).has_even_root_of_indefinite());
    CHECK_FALSE(ScalarExpr::pow(sum, Rational(1, 2)).has_even_root_of_indefinite());

    // prefix round trip
    ScalarExpr z = d1 * d2 + ScalarExpr::constant(Rational(3, 2));
    CHECK(ScalarExpr::parse_prefix(z.prefix()) == z);
}

TEST_CASE("parser accepts the documented syntax and rejects p variables") {
    Poly f = P("3/2*x1^2*x2 - x3^4");
    CHECK(f.modes() == 3);
    Mono m{2, 1, 0};
    CHECK(f.coeff(m) == ScalarExpr::constant(Rational(3, 2)));

    CHECK_THROWS_AS(P("p1*x1"), std::invalid_argument);
    CHECK_THROWS_AS(P("x1^(-2)"), std::invalid_argument);
    CHECK_THROWS_AS(P("x1 +"), std::invalid_argument);
    CHECK_THROWS_AS(P("x0"), std::invalid_argument);

    // s variables land in coefficients
    Poly g = P("2*s1*x1*x2^2", 2);
    Mono mg{1, 2};
    CHECK(g.coeff(mg) == ScalarExpr::constant(2) * ScalarExpr::var(0));
}

TEST_CASE("deterministic printing in graded-lex order") {
    Poly f = P("x2 + x1 + x1*x2 + 1", 2);
    CHECK(f.str() == "x1*x2 + x1 + x2 + 1");
}
