#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rlattract/coeff_expr.hpp"
#include "rlattract/errors.hpp"

using namespace rlattract;

TEST(Expr, Precedence) {
    EXPECT_DOUBLE_EQ(parse("1 + 2 * 3").eval(0), 7.0);
    EXPECT_DOUBLE_EQ(parse("(1 + 2) * 3").eval(0), 9.0);
    EXPECT_DOUBLE_EQ(parse("2 ^ 3 ^ 2").eval(0), 512.0);
    EXPECT_DOUBLE_EQ(parse("-2 ^ 2").eval(0), -4.0);
    EXPECT_DOUBLE_EQ(parse("8 / 4 / 2").eval(0), 1.0);
    EXPECT_DOUBLE_EQ(parse("1 - 2 - 3").eval(0), -4.0);
    EXPECT_DOUBLE_EQ(parse("2 * -3").eval(0), -6.0);
}

TEST(Expr, VariableAndFunctions) {
    const auto e = parse("1/(1+sqrt(t))");
    EXPECT_DOUBLE_EQ(e.eval(4.0), 1.0 / 3.0);
    EXPECT_FALSE(e.is_constant());
    EXPECT_NEAR(parse("exp(log(t)) + sin(0) + cos(0) + abs(-t)").eval(2.5), 6.0, 1e-15);
    EXPECT_TRUE(parse("3*4").is_constant());
    EXPECT_NEAR(parse("1e-3 * 2.5E2").eval(0), 0.25, 1e-16);
}

TEST(Expr, Piecewise) {
    const auto q = parse("piecewise(t <= 1000: 1000, else: 1000000/t)");
    EXPECT_DOUBLE_EQ(q.eval(3.0), 1000.0);
    EXPECT_DOUBLE_EQ(q.eval(1000.0), 1000.0);
    EXPECT_DOUBLE_EQ(q.eval(4000.0), 250.0);
    ASSERT_EQ(q.breakpoints().size(), 1u);
    EXPECT_DOUBLE_EQ(q.breakpoints()[0], 1000.0);
    EXPECT_TRUE(q.warnings().empty());

    const auto jump = parse("piecewise(t <= 1: 0, t <= 2: t, else: 5)");
    EXPECT_DOUBLE_EQ(jump.eval(1.5), 1.5);
    EXPECT_EQ(jump.warnings().size(), 2u);
}

TEST(Expr, ParseErrorsCarryOffsets) {
    try {
        parse("1 + * 2");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.offset(), 4u);
        EXPECT_NE(std::string(e.what()).find("offset 4"), std::string::npos);
        EXPECT_FALSE(e.expected().empty());
    }
    EXPECT_THROW(parse("(1 + 2"), ParseError);
    EXPECT_THROW(parse("foo(t)"), ParseError);
    EXPECT_THROW(parse(""), ParseError);
    EXPECT_THROW(parse("1 2"), ParseError);
    EXPECT_THROW(parse("piecewise(t <= 2: 1, t <= 1: 2, else: 0)"), ParseError);
}

TEST(Expr, EvaluationFaults) {
    EXPECT_THROW((void)parse("log(t)").eval(0.0), EvalError);
    EXPECT_THROW((void)parse("1/t").eval(0.0), EvalError);
    EXPECT_THROW((void)parse("sqrt(t - 1)").eval(0.0), EvalError);
    EXPECT_THROW((void)parse("t").eval(-1.0), EvalError);
}

TEST(Expr, CanonicalTextRoundTrips) {
    for (const char* src : {"1/(1+sqrt(t))", "-t^2*3 - 4/t", "piecewise(t <= 10: 5, else: 50/t)", "0.1 + 0.2"}) {
        const auto e = parse(src);
        const auto again = parse(e.to_string());
        for (double t : {0.5, 3.0, 17.0}) EXPECT_EQ(e.eval(t), again.eval(t)) << src;
        EXPECT_EQ(again.to_string(), e.to_string());
    }
}

TEST(ExprMatrix, EvaluatesAndNamesFailingEntry) {
    ExprMatrix m = ExprMatrix::zeros(2, 2);
    m.entries[0] = parse("t");
    m.entries[3] = parse("1/(t-2)");
    const Matrix v = eval_matrix(m, 1.0);
    EXPECT_DOUBLE_EQ(v(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(v(1, 1), -1.0);
    try {
        (void)eval_matrix(m, 2.0);
        FAIL();
    } catch (const EvalError& e) {
        EXPECT_NE(std::string(e.what()).find("(1,1)"), std::string::npos);
    }
    Matrix c(1, 1);
    c(0, 0) = 2.5;
    EXPECT_TRUE(ExprMatrix::constant(c).is_constant());
}

TEST(Expr, AgreesWithShuntingYardOracle) {
    for (const char* src : {"1+2*t-3/t", "-(t+1)^2", "sqrt(t)*exp(-t)", "2^-t", "abs(sin(t))-cos(t*t)/3",
                            "t^0.5^2", "-t*-t"}) {
        oracle::ShuntingYard ref(src);
        for (double t : {0.3, 1.0, 2.7}) EXPECT_NEAR(parse(src).eval(t), ref.eval(t), 1e-14) << src;
    }
}
