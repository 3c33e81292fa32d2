#include "arfrd/errors.hpp"
#include "arfrd/smoothness.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

using namespace arfrd;

namespace {

Sample noiseless(std::size_t n, double (*mu)(double))
{
    Sample s;
    for (std::size_t i = 0; i < n; ++i) {
        double x = -1.0 + 2.0 * double(i) / double(n - 1);
        s.x.push_back(x);
        s.y.push_back(mu(x));
        s.t.push_back(x >= 0.0 ? 1.0 : 0.0);
    }
    return s;
}

double square(double x) { return x * x; }
double quartic(double x) { return x * x - x * x * x * x; }
double constant(double) { return 3.0; }

//! Least-squares RSS of a + b x + (k/2) x^2 on one side, curvature k fixed.
double fixed_curvature_rss(const Sample& s, bool right, double k)
{
    double n = 0, sx = 0, sxx = 0, sr = 0, sxr = 0, srr = 0;
    for (std::size_t i = 0; i < s.n(); ++i) {
        if ((s.x[i] >= 0.0) != right)
            continue;
        double x = s.x[i], r = s.y[i] - 0.5 * k * x * x;
        n += 1;
        sx += x;
        sxx += x * x;
        sr += r;
        sxr += x * r;
        srr += r * r;
    }
    double det = n * sxx - sx * sx;
    double b = (n * sxr - sx * sr) / det, a = (sr - b * sx) / n;
    return srr - a * sr - b * sxr;
}

} // namespace

TEST(Smoothness, RuleOfThumbOnQuadratic)
{
    Sample s = noiseless(2001, square);
    RotResult r1 = rot1(s, Dep::y);
    EXPECT_NEAR(r1.value, 2.0, 1e-6);
    EXPECT_EQ(r1.order, 4);
    EXPECT_NEAR(r1.r2_plus, 1.0, 1e-12);
    RotResult r2 = rot2(s, Dep::y);
    EXPECT_NEAR(r2.value, 4.0, 1e-6);
    EXPECT_EQ(r2.order, 2);
    ASSERT_EQ(r2.coef_plus.size(), 3u);
    EXPECT_NEAR(r2.coef_plus[2], 1.0, 1e-9);
    EXPECT_NEAR(r2.coef_minus[2], 1.0, 1e-9);
}

TEST(Smoothness, RuleOfThumbOnQuartic)
{
    Sample s = noiseless(2001, quartic);
    RotResult r1 = rot1(s, Dep::y);
    EXPECT_NEAR(r1.value, 10.0, 1e-6);
    EXPECT_NEAR(std::abs(r1.sup_location), 1.0, 1e-9);
    EXPECT_NEAR(rot1(noiseless(2001, constant), Dep::y).value, 0.0, 1e-9);
    EXPECT_NEAR(rot2(noiseless(2001, constant), Dep::y).value, 0.0, 1e-9);
}

TEST(Smoothness, RotInvariantToLinearTrendAndHomogeneous)
{
    std::mt19937_64 g(81);
    std::normal_distribution<double> z;
    for (int rep = 0; rep < 10; ++rep) {
        Sample s = test::draw_sample(g, 500, rep % 2, 1.0, 0.5, 0.5);
        Sample tr = s, sc = s;
        double a = z(g), b = z(g), lambda = 0.1 + std::abs(z(g));
        for (std::size_t i = 0; i < s.n(); ++i) {
            tr.y[i] += a + b * s.x[i];
            sc.y[i] *= lambda;
        }
        for (auto f : {rot1, rot2}) {
            double base = f(s, Dep::y).value;
            EXPECT_GE(base, 0.0);
            EXPECT_NEAR(f(tr, Dep::y).value, base, 1e-8 * (1.0 + base));
            EXPECT_NEAR(f(sc, Dep::y).value, lambda * base, 1e-8 * (1.0 + lambda * base));
        }
    }
}

TEST(Smoothness, RotNeedsDistinctSupport)
{
    Sample s = test::from_x({-0.3, -0.2, -0.1, 0.1, 0.2});
    EXPECT_THROW(rot2(s, Dep::y), NumericError);
    Sample l = test::from_x({-0.5, -0.4, -0.3, -0.2, -0.1, 0.1, 0.2, 0.3, 0.4});
    EXPECT_NO_THROW(rot2(l, Dep::y));
    EXPECT_THROW(rot1(l, Dep::y), NumericError);
}

TEST(Smoothness, ExtremeFunctionConstraints)
{
    std::mt19937_64 g(82);
    Sample s = test::draw_sample(g, 300, false, 1.0, 0.5, 0.3);
    double prev_rss = HUGE_VAL;
    for (double B : {0.1, 0.5, 2.0}) {
        ExtremeFunction ef = extreme_function(s, Dep::y, B, 0.1, 50, 201);
        EXPECT_EQ(ef.bound, B);
        double sup = 0.0;
        for (double x = -1.0; x <= 1.0; x += 1e-4)
            sup = std::max(sup, std::abs(ef.second_derivative(x)));
        EXPECT_LE(sup, B + 1e-6);
        EXPECT_NEAR(std::abs(ef.second_derivative(0.1)), B, 1e-6);
        EXPECT_NEAR(std::abs(ef.second_derivative(-0.1)), B, 1e-6);
        EXPECT_LE(ef.rss, prev_rss * (1.0 + 1e-10));
        prev_rss = ef.rss;
        EXPECT_EQ(ef.evaluations.size(), 201u);
        // Reported RSS agrees with the fitted function.
        double rss = 0.0;
        for (std::size_t i = 0; i < s.n(); ++i)
            rss += std::pow(s.y[i] - ef.value(s.x[i]), 2);
        EXPECT_NEAR(rss, ef.rss, 1e-8 * (1.0 + rss));
    }
}

TEST(Smoothness, ExtremeFunctionQuadraticTruth)
{
    std::mt19937_64 g(83);
    std::normal_distribution<double> z;
    Sample s = test::from_x(test::draw_x(g, 20, false));
    for (std::size_t i = 0; i < s.n(); ++i)
        s.y[i] = s.x[i] * s.x[i] + 0.01 * z(g);
    ExtremeFunction ef = extreme_function(s, Dep::y, 2.0, 0.1, 8, 101);
    EXPECT_NEAR(std::abs(ef.second_derivative(0.1)), 2.0, 1e-6);
    EXPECT_NEAR(std::abs(ef.second_derivative(-0.1)), 2.0, 1e-6);
    for (double x = -1.0; x <= 1.0; x += 1e-3)
        EXPECT_LE(std::abs(ef.second_derivative(x)), 2.0 + 1e-6);
}

TEST(Smoothness, ExtremeFunctionBeatsFeasibleParabolas)
{
    std::mt19937_64 g(84);
    Sample s = test::draw_sample(g, 400, false, 1.0, 0.5, 0.2);
    for (double B : {0.3, 5.0, 1e3}) {
        ExtremeFunction ef = extreme_function(s, Dep::y, B, 0.1, 20);
        // Constant curvature +-B on each side satisfies every constraint.
        double best = std::min(fixed_curvature_rss(s, true, B), fixed_curvature_rss(s, true, -B)) +
                      std::min(fixed_curvature_rss(s, false, B), fixed_curvature_rss(s, false, -B));
        EXPECT_LE(ef.rss, best * (1.0 + 1e-8)) << "B=" << B;
    }
}

TEST(Smoothness, ZeroBoundIsPerSideLine)
{
    std::mt19937_64 g(85);
    Sample s = test::draw_sample(g, 300, false, 1.0, 0.5, 0.2);
    ExtremeFunction ef = extreme_function(s, Dep::y, 0.0);
    for (double x = -1.0; x <= 1.0; x += 0.01)
        EXPECT_NEAR(ef.second_derivative(x), 0.0, 1e-12);
    // Residuals are orthogonal to (1, x) on each side.
    for (bool right : {true, false}) {
        double r0 = 0.0, r1 = 0.0;
        for (std::size_t i = 0; i < s.n(); ++i) {
            if ((s.x[i] >= 0.0) != right)
                continue;
            double e = s.y[i] - ef.value(s.x[i]);
            r0 += e;
            r1 += e * s.x[i];
        }
        EXPECT_NEAR(r0, 0.0, 1e-8);
        EXPECT_NEAR(r1, 0.0, 1e-8);
    }
    EXPECT_THROW(extreme_function(s, Dep::y, -1.0), Error);
    EXPECT_THROW(extreme_function(s, Dep::y, 1.0, 0.1, 2), Error);
}

TEST(Smoothness, EvaluationsCsv)
{
    std::mt19937_64 g(86);
    Sample s = test::draw_sample(g, 200, false, 1.0, 0.5, 0.2);
    ExtremeFunction ef = extreme_function(s, Dep::t, 0.5, 0.1, 10, 11);
    auto path = std::filesystem::temp_directory_path() / "arfrd_eval.csv";
    write_evaluations_csv(path.string(), ef);
    std::ifstream in(path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line))
        ++lines;
    std::filesystem::remove(path);
    EXPECT_EQ(lines, 12);
}
