#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cvqc/strategies.hpp"

using namespace cvqc;
using namespace cvqc::strategies;

TEST_CASE("mode-wise plans for third-order gates") {
    Plan qnd = plan_modewise(GateSpec::preset("cubic-qnd"));
    CHECK(qnd.constructed_non_gaussian() == 2);
    CHECK(qnd.gaussian_modes == 2);
    CHECK(qnd.steps.size() == 1);
    CHECK(qnd.reduction_residual() < 1e-10);

    Plan tof = plan_modewise(GateSpec::preset("toffoli"));
    CHECK(tof.constructed_non_gaussian() == 3);
    CHECK(tof.gaussian_modes == 3);

    CHECK_THROWS_AS(plan_modewise(GateSpec::preset("small-example")), PlanError);
}

TEST_CASE("strategy 1: controlled-phase family") {
    for (int N = 3; N <= 8; ++N) {
        Plan p = plan_strategy1(GateSpec::preset("cphase", N));
        CHECK(p.constructed_non_gaussian() == 2 * (N - 2));
        CHECK(int(p.steps.size()) == N - 2);
        for (auto& st : p.steps) CHECK(st.dim == 2);
        if (N <= 6) CHECK(p.reduction_residual() < 1e-8);
    }
}

TEST_CASE("strategy 1: multilinear gates and the quartic example") {
    Plan t = plan_strategy1(GateSpec::preset("toffoli"));
    CHECK(t.constructed_non_gaussian() == 3);

    Plan c4 = plan_strategy1(GateSpec::preset("cnz", 4));
    CHECK(c4.constructed_non_gaussian() == 10); // constructed dimensions
    CHECK(c4.reduction_residual() < 1e-8);

    Plan se = plan_strategy1(GateSpec::preset("small-example"));
    CHECK(se.constructed_non_gaussian() == 6); // 2 + 4
    CHECK(se.steps[1].dim == 4);
    CHECK(se.reduction_residual() < 1e-8);
}

TEST_CASE("strategy 2: fixed recursion over cached blocks") {
    Plan se = plan_strategy2(GateSpec::preset("small-example"));
    CHECK(se.constructed_non_gaussian() == 5); // 2 + 3
    REQUIRE(se.steps.size() == 2);
    CHECK(se.steps[1].dim == 3);
    CHECK(se.reduction_residual() < 1e-8);

    // the step-2 coupling has the inverse-scaling entries
    // q/s1, q/s2 with q = (s1^2 s2^2)^(1/3), and (s1^4)^(1/3)/s1
    ScalarExpr s1 = ScalarExpr::var(0), s2 = ScalarExpr::var(1);
    ScalarExpr q = ScalarExpr::pow(s1 * s1 * s2 * s2, Rational(1, 3));
    const auto& K2 = se.steps[1].K;
    // one row couples through q/s2; exactly one through (s1^4)^(1/3)/s1
    int hits_q_s1 = 0, hits_q_s2 = 0, hits_cbrt = 0;
    ScalarExpr d1 = q * ScalarExpr::pow(s1, Rational(-1));
    ScalarExpr d2 = q * ScalarExpr::pow(s2, Rational(-1));
    ScalarExpr d3 = ScalarExpr::pow(s1, Rational(1, 3));
    for (auto& row : K2)
        for (auto& e : row) {
            if (e.is_zero()) continue;
            if (ScalarExpr::equal(e, d1)) ++hits_q_s1;
            if (ScalarExpr::equal(e, d2)) ++hits_q_s2;
            if (ScalarExpr::equal(e, d3)) ++hits_cbrt;
        }
    CHECK(hits_q_s1 == 1);
    CHECK(hits_q_s2 == 1);
    CHECK(hits_cbrt == 1);

    Plan tof = plan_strategy2(GateSpec::preset("toffoli"));
    CHECK(tof.constructed_non_gaussian() == 3);

    for (int N = 4; N <= 5; ++N) {
        Plan p = plan_strategy2(GateSpec::preset("cnz", N));
        CHECK(i64(p.constructed_non_gaussian()) == cnz_recursion_count(N));
        CHECK(p.reduction_residual() < 1e-8);
    }

    CHECK_THROWS_AS(plan_strategy2(GateSpec::custom(parse_poly("x1^3 + x1", 1))), PlanError);
}

TEST_CASE("strategy 3: power-sum plans") {
    Plan tof = plan_strategy3(GateSpec::preset("toffoli"));
    CHECK(tof.constructed_non_gaussian() == 4);
    CHECK(tof.gaussian_modes == 3);
    CHECK(tof.reduction_residual() < 1e-10);

    Plan qnd = plan_strategy3(GateSpec::preset("cubic-qnd"));
    CHECK(qnd.constructed_non_gaussian() == 3);
    CHECK(qnd.gaussian_modes == 2);

    Plan se = plan_strategy3(GateSpec::preset("small-example"));
    CHECK(se.constructed_non_gaussian() == 6); // 3 per step, 2 steps
    CHECK(se.reduction_residual() < 1e-8);

    for (int N = 3; N <= 5; ++N) {
        Plan p = plan_strategy3(GateSpec::preset("cnz", N));
        CHECK(i64(p.constructed_non_gaussian()) == i64(N - 2) * (i64(1) << (N - 1)));
        CHECK(p.reduction_residual() < 1e-8);
    }

    // K_j = D_j M structurally: every row of every step is a scalar multiple
    // of the same fixed form row
    Plan c4 = plan_strategy3(GateSpec::preset("cnz", 4));
    const auto& M = c4.steps[0].K;
    for (auto& st : c4.steps)
        for (std::size_t i = 0; i < st.K.size(); ++i)
            for (std::size_t a = 0; a < st.K[i].size(); ++a)
                for (std::size_t b = a + 1; b < st.K[i].size(); ++b) {
                    // cross-ratio test: K[i][a] M[i][b] == K[i][b] M[i][a]
                    ScalarExpr lhs = st.K[i][a] * M[i][b];
                    ScalarExpr rhs = st.K[i][b] * M[i][a];
                    CHECK(ScalarExpr::equal(lhs, rhs));
                }

    // a custom gate without a usable power-sum decomposition is rejected
    CHECK_THROWS_AS(plan_strategy3(GateSpec::custom(parse_poly("x1^3 + x1*x2^2", 2))), PlanError);
}

TEST_CASE("ancilla polynomials never depend on outcomes") {
    for (auto strat : {"1", "2", "3"}) {
        Plan p = plan(GateSpec::preset("small-example"), strat);
        for (auto& st : p.steps) CHECK_FALSE(st.f.coeffs_depend_on_s());
    }
}

TEST_CASE("sign modes") {
    Plan se = plan_strategy2(GateSpec::preset("small-example"));
    Plan same = with_sign_mode(se, "assume-positive");
    CHECK(same.total_non_gaussian() == se.constructed_non_gaussian());

    // single-mode x^5 chain duplicates only the even-root steps: 3 + 1
    Plan x5 = plan_strategy1(GateSpec::custom(parse_poly("x1^5", 1)));
    CHECK(x5.constructed_non_gaussian() == 3);
    Plan dup = with_sign_mode(x5, "duplicate");
    CHECK(dup.total_non_gaussian() == 4);
    CHECK(duplicate_reference_single_mode(5) == 4);

    // cnz(4) strategy 3: no even roots appear, duplicate leaves counts alone
    Plan c43 = with_sign_mode(plan_strategy3(GateSpec::preset("cnz", 4)), "duplicate");
    CHECK(c43.total_non_gaussian() == c43.constructed_non_gaussian());

    CHECK_THROWS_AS(with_sign_mode(se, "whatever"), std::invalid_argument);
}

TEST_CASE("strict sign mode") {
    // polynomial couplings and roots of positive monomials pass: absorbing
    // the decomposition weights into the first coupling keeps strategy-3
    // chains sign-safe up to order 5 under the positive-outcome assumption
    CHECK_NOTHROW(plan_strategy1(GateSpec::preset("cnz", 4)).require_sign_safe());
    CHECK_NOTHROW(plan_strategy2(GateSpec::preset("small-example")).require_sign_safe());
    CHECK_NOTHROW(plan_strategy3(GateSpec::preset("cnz", 5)).require_sign_safe());

    // at order 6 the fourth-root operand is a mixed-sign sum of two step
    // lineages; strict mode rejects the recipe
    Plan c6 = plan_strategy3(GateSpec::preset("cnz", 6));
    CHECK_THROWS_AS(c6.require_sign_safe(), PlanError);
}

TEST_CASE("count table") {
    auto rows = count_table(3, 8);
    const i64 expect1[] = {3, 8, 27, 114, 639, 3936};
    const i64 expect1c[] = {3, 10, 29, 67, 155, 333};
    const i64 expect3[] = {4, 16, 48, 128, 320, 768};
    for (int i = 0; i < 6; ++i) {
        CHECK(rows[i].strategy1_recursion == expect1[i]);
        CHECK(rows[i].strategy1_recursion == cnz_recursion_count_oracle(rows[i].N));
        CHECK(rows[i].strategy1_constructed == expect1c[i]);
        CHECK(rows[i].strategy2_computed == expect1[i]);
        CHECK(rows[i].strategy3 == expect3[i]);
        CHECK(rows[i].ref1 == expect1[i]);
        CHECK(rows[i].ref3 == expect3[i]);
        // the reference strategy-2 column is not reproduced by any counting
        // procedure here; stored values are reported and flagged instead
        if (rows[i].N >= 4) CHECK(rows[i].strategy2_computed != rows[i].ref2);
    }

    // constructed plans agree with the combinatorial counts
    for (int N = 3; N <= 5; ++N) {
        CHECK(i64(plan_strategy1(GateSpec::preset("cnz", N)).constructed_non_gaussian()) ==
              cnz_strategy1_constructed_count(N));
    }

    // controlled-phase: strategy I beats strategy III for every order
    for (int N = 3; N <= 8; ++N)
        CHECK(2 * (N - 2) < N * (N - 2) + (N == 3 ? 1 : 0));
}
