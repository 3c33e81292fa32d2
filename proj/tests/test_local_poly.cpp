#include "arfrd/errors.hpp"
#include "arfrd/local_poly.hpp"
#include "test_util.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>

using namespace arfrd;

namespace {

double factorial(int k)
{
    double f = 1.0;
    for (int i = 2; i <= k; ++i)
        f *= i;
    return f;
}

// Independent oracle: normal equations in raw x with an explicit kernel-weighted Gram matrix.
std::vector<double> oracle_side(const std::vector<double>& x, bool right, double h, Kernel k,
                                int p, int v)
{
    const int q = p + 1;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(q, q);
    for (double xi : x) {
        if ((xi >= 0.0) != right)
            continue;
        double kw = kernel_value(k, xi / h);
        for (int a = 0; a < q; ++a)
            for (int b = 0; b < q; ++b)
                G(a, b) += kw * std::pow(xi, a + b);
    }
    Eigen::VectorXd e = Eigen::VectorXd::Zero(q);
    e[v] = factorial(v);
    Eigen::VectorXd coef = G.ldlt().solve(e);
    std::vector<double> w(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if ((x[i] >= 0.0) != right)
            continue;
        double kw = kernel_value(k, x[i] / h);
        double s = 0.0;
        for (int a = 0; a < q; ++a)
            s += coef[a] * std::pow(x[i], a);
        w[i] = kw * s;
    }
    return w;
}

} // namespace

TEST(LocalPoly, FourPointExample)
{
    Sample s = test::from_x({-2.0, -1.0, 1.0, 2.0});
    FitSpec f;
    f.kernel = Kernel::uniform;
    f.bandwidth(3.0);
    WeightVector wv = weights(s, f);
    std::vector<double> expect{1.0, -2.0, 2.0, -1.0};
    for (int i = 0; i < 4; ++i)
        EXPECT_NEAR(wv.w[std::size_t(i)], expect[std::size_t(i)], 1e-12);
    EXPECT_NEAR(srd_estimate(wv, {0.0, 0.0, 1.0, 1.0}), 1.0, 1e-12);
    EXPECT_EQ(wv.effective_n_plus, 2u);
    EXPECT_EQ(wv.effective_n_minus, 2u);
}

TEST(LocalPoly, NormalEquationIdentities)
{
    std::mt19937_64 g(11);
    for (int rep = 0; rep < 60; ++rep) {
        bool discrete = rep % 2;
        Sample s = test::from_x(test::draw_x(g, 300, discrete));
        for (Kernel k : {Kernel::triangular, Kernel::epanechnikov, Kernel::uniform})
            for (int p = 1; p <= 3; ++p)
                for (int v = 0; v <= p; ++v) {
                    FitSpec f;
                    f.kernel = k;
                    f.p = p;
                    f.v = v;
                    f.bandwidth(0.6);
                    WeightVector wv = weights(s, f);
                    for (int j = 0; j <= p; ++j) {
                        double sp = 0.0, sm = 0.0, scale = 0.0;
                        for (std::size_t i = 0; i < s.n(); ++i) {
                            double xj = std::pow(s.x[i], j);
                            sp += wv.w_plus[i] * xj;
                            sm += wv.w_minus[i] * xj;
                            scale += std::abs(wv.w_plus[i] * xj) + std::abs(wv.w_minus[i] * xj);
                        }
                        double target = j == v ? factorial(v) : 0.0;
                        double tol = 1e-9 * std::max(1.0, scale);
                        EXPECT_NEAR(sp, target, tol);
                        EXPECT_NEAR(sm, target, tol);
                    }
                }
    }
}

TEST(LocalPoly, MatchesNormalEquationOracle)
{
    std::mt19937_64 g(12);
    for (int rep = 0; rep < 20; ++rep) {
        Sample s = test::from_x(test::draw_x(g, 150, rep % 3 == 0));
        for (int p = 1; p <= 2; ++p)
            for (int v = 0; v <= p; ++v) {
                FitSpec f;
                f.p = p;
                f.v = v;
                f.bandwidth(0.8);
                WeightVector wv = weights(s, f);
                auto op = oracle_side(s.x, true, 0.8, f.kernel, p, v);
                auto om = oracle_side(s.x, false, 0.8, f.kernel, p, v);
                double scale = 0.0;
                for (std::size_t i = 0; i < s.n(); ++i)
                    scale = std::max(scale, std::abs(op[i]) + std::abs(om[i]));
                for (std::size_t i = 0; i < s.n(); ++i) {
                    EXPECT_NEAR(wv.w_plus[i], op[i], 1e-8 * scale);
                    EXPECT_NEAR(wv.w_minus[i], om[i], 1e-8 * scale);
                    EXPECT_NEAR(wv.w[i], op[i] - om[i], 1e-8 * scale);
                }
            }
    }
}

TEST(LocalPoly, PolynomialReproductionWithDerivativeJump)
{
    std::mt19937_64 g(13);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
        Sample s = test::from_x(test::draw_x(g, 200, rep % 2));
        for (Kernel k : {Kernel::triangular, Kernel::epanechnikov, Kernel::uniform})
            for (int p = 1; p <= 3; ++p)
                for (int v = 0; v <= p; ++v) {
                    std::vector<double> a(std::size_t(p) + 1);
                    for (auto& c : a)
                        c = coef(g);
                    double delta = coef(g);
                    std::vector<double> dep(s.n());
                    for (std::size_t i = 0; i < s.n(); ++i) {
                        double x = s.x[i], val = 0.0;
                        for (int j = 0; j <= p; ++j)
                            val += a[std::size_t(j)] * std::pow(x, j);
                        if (x >= 0.0)
                            val += delta * std::pow(x, v) / factorial(v);
                        dep[i] = val;
                    }
                    FitSpec f;
                    f.kernel = k;
                    f.p = p;
                    f.v = v;
                    f.bandwidth(0.7);
                    double est = srd_estimate(s, dep, f);
                    EXPECT_NEAR(est, delta, 1e-8 * std::max(1.0, std::abs(delta)))
                        << "p=" << p << " v=" << v;
                }
    }
}

TEST(LocalPoly, LinearAndPureJump)
{
    std::mt19937_64 g(14);
    Sample s = test::from_x(test::draw_x(g, 400, false));
    std::vector<double> lin(s.n()), jump(s.n());
    for (std::size_t i = 0; i < s.n(); ++i) {
        lin[i] = 3.0 - 1.7 * s.x[i];
        jump[i] = s.x[i] >= 0.0 ? 1.0 : 0.0;
    }
    FitSpec f;
    f.bandwidth(0.5);
    EXPECT_NEAR(srd_estimate(s, lin, f), 0.0, 1e-9);
    EXPECT_NEAR(srd_estimate(s, jump, f), 1.0, 1e-9);
}

TEST(LocalPoly, LocalityAndScaleEquivariance)
{
    std::mt19937_64 g(15);
    Sample s = test::draw_sample(g, 500, false, 1.0, 0.5);
    FitSpec f;
    f.bandwidth(0.4);
    WeightVector wv = weights(s, f);
    double base = srd_estimate(wv, s.y);
    std::vector<double> y = s.y;
    for (std::size_t i = 0; i < s.n(); ++i) {
        if (std::abs(s.x[i]) >= 0.4) {
            EXPECT_EQ(wv.w[i], 0.0);
            y[i] += 1000.0;
        }
    }
    EXPECT_EQ(srd_estimate(wv, y), base);
    std::vector<double> scaled = s.y;
    for (auto& v : scaled)
        v *= -3.5;
    EXPECT_NEAR(srd_estimate(wv, scaled), -3.5 * base, 1e-12 * std::abs(base) + 1e-14);
}

TEST(LocalPoly, ZeroBelongsToTheRightSide)
{
    Sample s = test::from_x({-0.2, -0.1, 0.0, 0.1});
    FitSpec f;
    f.kernel = Kernel::uniform;
    f.bandwidth(1.0);
    WeightVector wv = weights(s, f);
    EXPECT_NE(wv.w_plus[2], 0.0);
    EXPECT_EQ(wv.w_minus[2], 0.0);
}

TEST(LocalPoly, InsufficientSupport)
{
    Sample s = test::from_x({-0.3, -0.2, -0.1, 0.05, 0.9});
    FitSpec f;
    f.bandwidth(0.5);
    try {
        weights(s, f);
        FAIL() << "expected insufficient support";
    } catch (const InsufficientSupport& e) {
        EXPECT_EQ(e.side(), "right");
        EXPECT_EQ(e.h(), 0.5);
        EXPECT_EQ(e.kind(), ErrorKind::numeric);
    }
    // Repeated x count once.
    Sample r = test::from_x({-0.3, -0.2, 0.1, 0.1, 0.1});
    EXPECT_THROW(weights(r, f), InsufficientSupport);
}

TEST(LocalPoly, KernelBoundaryMembership)
{
    Sample s = test::from_x({-0.5, -0.25, 0.25, 0.5});
    FitSpec f;
    f.bandwidth(0.5);
    f.kernel = Kernel::uniform;
    WeightVector u = weights(s, f);
    EXPECT_NE(u.w[3], 0.0);
    f.kernel = Kernel::triangular;
    EXPECT_THROW(weights(s, f), InsufficientSupport);
}

TEST(LocalPoly, WeightRatio)
{
    WeightVector lattice = weights(test::from_x(test::lattice_grid()), FitSpec{}.bandwidth(1.0));
    double r = w_ratio(lattice);
    EXPECT_GT(r, 0.0);
    EXPECT_LE(r, 1.0);
    EXPECT_EQ(w_ratio(std::vector<double>{0.0, 2.0, 0.0}), 1.0);
    EXPECT_NEAR(w_ratio(std::vector<double>(8, 0.3)), 1.0 / 8.0, 1e-15);
    EXPECT_THROW(w_ratio(std::vector<double>(3, 0.0)), NumericError);
}
