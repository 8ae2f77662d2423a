#include <simroots/expression.hpp>
#include <simroots/jet.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using simroots::errc;
using simroots::error;
using simroots::expression;
using simroots::jet;

TEST(Jet, SquareOfVariable)
{
    auto j = expression<double>::parse("x*x").propagate(3.0, 2);
    EXPECT_DOUBLE_EQ(j[0], 9.0);
    EXPECT_DOUBLE_EQ(j[1], 6.0);
    EXPECT_DOUBLE_EQ(j[2], 1.0);
    EXPECT_DOUBLE_EQ(j.derivative(2), 2.0);
}

TEST(Jet, SineOfThreeX)
{
    auto j = expression<double>::parse("sin(3*x)").propagate(0.0, 3);
    EXPECT_NEAR(j.derivative(0), 0.0, 1e-15);
    EXPECT_NEAR(j.derivative(1), 3.0, 1e-14);
    EXPECT_NEAR(j.derivative(2), 0.0, 1e-14);
    EXPECT_NEAR(j.derivative(3), -27.0, 1e-12);
}

TEST(Jet, InverseQuadraticMatchesFiniteDifferences)
{
    // Oracle: nested central differences of the closed form 1/(1+x^2), carried out in quad so
    // that fourth differences stay far above rounding.
    using simroots::quad;
    auto j = expression<double>::parse("1/(1+x*x)").propagate(0.5, 4);
    auto g = [](const quad& x) { return quad(1) / (quad(1) + x * x); };
    for (unsigned p = 0; p <= 4; ++p) {
        double fd = simroots::to_double(simroots::oracle::nested_difference(g, quad("0.5"), p, quad("1e-4")));
        EXPECT_LT(simroots::oracle::rel_err(j.derivative(p), fd), 1e-6) << "order " << p;
    }
}

TEST(Jet, ExpAndCosRecurrences)
{
    auto e = expression<double>::parse("exp(2*x)").propagate(0.3, 5);
    for (unsigned q = 0; q <= 5; ++q) EXPECT_NEAR(e.derivative(q), std::pow(2.0, q) * std::exp(0.6), 1e-11 * std::pow(2.0, q));
    auto c = expression<double>::parse("cos(x)").propagate(1.0, 4);
    EXPECT_NEAR(c.derivative(1), -std::sin(1.0), 1e-15);
    EXPECT_NEAR(c.derivative(2), -std::cos(1.0), 1e-15);
    EXPECT_NEAR(c.derivative(4), std::cos(1.0), 1e-14);
}

TEST(Jet, IntegerPowers)
{
    auto p = expression<double>::parse("(x+1)^3").propagate(1.0, 3);
    EXPECT_DOUBLE_EQ(p[0], 8.0);
    EXPECT_DOUBLE_EQ(p.derivative(1), 12.0);
    EXPECT_DOUBLE_EQ(p.derivative(2), 12.0);
    EXPECT_DOUBLE_EQ(p.derivative(3), 6.0);
    auto q = expression<double>::parse("x^-2").propagate(2.0, 1);
    EXPECT_DOUBLE_EQ(q[0], 0.25);
    EXPECT_DOUBLE_EQ(q[1], -0.25);
    auto z = expression<double>::parse("x^0").propagate(5.0, 2);
    EXPECT_DOUBLE_EQ(z[0], 1.0);
    EXPECT_DOUBLE_EQ(z[1], 0.0);
}

TEST(Jet, DivisionBySingularJet)
{
    auto e = expression<double>::parse("1/x");
    try {
        (void)e.propagate(0.0, 2);
        FAIL() << "expected DivisionBySingularJet";
    } catch (const error& err) {
        EXPECT_EQ(err.code(), errc::division_by_singular_jet);
    }
    EXPECT_NO_THROW((void)e.propagate(1e-200, 1));
}

TEST(Expression, PrecedenceAndUnaryMinus)
{
    auto v = [](const char* text, double x) { return expression<double>::parse(text).propagate(x, 0)[0]; };
    EXPECT_DOUBLE_EQ(v("1+2*3", 0), 7.0);
    EXPECT_DOUBLE_EQ(v("-x^2", 3), -9.0);
    EXPECT_DOUBLE_EQ(v("2*-x", 3), -6.0);
    EXPECT_DOUBLE_EQ(v("(1+x)/(2-x)", 1), 2.0);
    EXPECT_DOUBLE_EQ(v("8/2/2", 0), 2.0);
    EXPECT_DOUBLE_EQ(v("1.5e1 + .5", 0), 15.5);
    EXPECT_DOUBLE_EQ(v("exp(0)", 0), 1.0);
}

TEST(Expression, RejectsMalformedInput)
{
    for (const char* bad : {"", "x+", "sin x", "log(x)", "x^1.5", "(x", "x)", "2x", "y"}) {
        try {
            (void)expression<double>::parse(bad);
            ADD_FAILURE() << "accepted '" << bad << "'";
        } catch (const error& err) {
            EXPECT_EQ(err.code(), errc::parse_error) << bad;
        }
    }
}

TEST(Expression, QuadLiteralsKeepFullPrecision)
{
    auto j = expression<simroots::quad>::parse("0.1").propagate(simroots::quad(0), 0);
    EXPECT_EQ(j[0], simroots::quad("0.1"));
    EXPECT_NE(j[0], simroots::quad(0.1));
}
