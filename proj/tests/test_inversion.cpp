#include "arfrd/bandwidth.hpp"
#include "arfrd/errors.hpp"
#include "arfrd/folded_normal.hpp"
#include "arfrd/inversion.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace arfrd;

namespace {

AnalysisConfig config(double by, double bt, double lo = -10.0, double hi = 10.0)
{
    AnalysisConfig cfg;
    cfg.bounds.b_y = by;
    cfg.bounds.b_t = bt;
    cfg.c_grid = CGrid{lo, hi, 100};
    return cfg;
}

//! Sign changes of p_hat on a dense grid; each root is bracketed by [lo, hi].
struct Bracket {
    double lo, hi;
};
std::vector<Bracket> scan_roots(const ArProblem& prob, double lo, double hi, int n)
{
    std::vector<Bracket> out;
    double prev_c = lo;
    bool prev = prob.p_hat(lo).p_value >= 0.0;
    for (int i = 1; i <= n; ++i) {
        double c = lo + (hi - lo) * i / n;
        bool in = prob.p_hat(c).p_value >= 0.0;
        if (in != prev)
            out.push_back({prev_c, c});
        prev = in;
        prev_c = c;
    }
    return out;
}

void expect_matches_scan(const ArProblem& prob, const ConfidenceSet& cs, int n = 20000)
{
    auto br = scan_roots(prob, cs.c_low, cs.c_high, n);
    std::vector<double> roots;
    for (const auto& p : cs.pieces) {
        if (std::isfinite(p.lo))
            roots.push_back(p.lo);
        if (std::isfinite(p.hi))
            roots.push_back(p.hi);
    }
    ASSERT_EQ(br.size(), roots.size()) << shape_name(cs.shape);
    for (std::size_t k = 0; k < roots.size(); ++k) {
        EXPECT_GE(roots[k], br[k].lo - 1e-4);
        EXPECT_LE(roots[k], br[k].hi + 1e-4);
    }
    // Membership agrees with p_hat away from the roots.
    for (int i = 0; i <= 200; ++i) {
        double c = cs.c_low + (cs.c_high - cs.c_low) * (i + 0.5) / 201.0;
        bool near = false;
        for (double r : roots)
            near = near || std::abs(c - r) < 1e-6 * (cs.c_high - cs.c_low);
        if (!near)
            EXPECT_EQ(cs.contains(c), prob.p_hat(c).p_value >= 0.0) << "c=" << c;
    }
}

//! Outcome with its own jump, independent of the treatment jump.
Sample draw_direct(std::mt19937_64& g, std::size_t n, double y_jump, double t_jump,
                   double noise)
{
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Sample s;
    s.x = test::draw_x(g, n, false);
    for (double x : s.x) {
        double d = x >= 0.0 ? 1.0 : 0.0;
        s.t.push_back(u(g) < 0.3 + t_jump * d + 0.1 * x ? 1.0 : 0.0);
        s.y.push_back(0.5 * x + y_jump * d + noise * z(g));
    }
    return s;
}

} // namespace

TEST(Inversion, PHatAtRatioEstimateIsMaximal)
{
    std::mt19937_64 g(51);
    Sample s = test::draw_sample(g, 600, false, 1.0, 0.5);
    AnalysisConfig cfg = config(1.0, 0.2);
    ArProblem prob(s, cfg, 0.5);
    WeightVector wv = weights(s, FitSpec{}.bandwidth(0.5));
    double c = srd_estimate(wv, s.y) / srd_estimate(wv, s.t);
    AuxInference a = prob.p_hat(c);
    EXPECT_NEAR(a.tau_hat, 0.0, 1e-12);
    EXPECT_NEAR(a.p_value, 1.0 - cfg.alpha, 1e-10);
    EXPECT_EQ(a.h_used, 0.5);
}

TEST(Inversion, PHatCompositionalOracle)
{
    std::mt19937_64 g(52);
    Sample s = test::draw_sample(g, 500, false, 1.0, 0.5, 0.3);
    AnalysisConfig cfg = config(2.0, 0.5);
    NnVarianceComponents nv = nn_variances(s, cfg.r_neighbors);
    for (double c : {0.0, 1.3, -2.0}) {
        AuxInference a = p_hat(s, nv, cfg, c);
        EXPECT_EQ(a.h_used, optimize_bandwidth(s, nv, cfg, c).h_used);
        WeightVector wv = weights(s, FitSpec{}.bandwidth(a.h_used));
        BiasSdBundle b = aux_bundle(s, wv, nv, cfg.bounds, c);
        EXPECT_NEAR(a.tau_hat, b.tau_hat, 1e-12);
        EXPECT_NEAR(a.sd, b.sd, 1e-12);
        EXPECT_NEAR(a.bias_bound, b.bias_bound, 1e-12);
        double p = 1.0 - cfg.alpha - folded_cdf(std::abs(b.tau_hat / b.sd), b.ratio);
        EXPECT_NEAR(a.p_value, p, 1e-10);
    }
}

TEST(Inversion, StrongIdentificationInterval)
{
    std::mt19937_64 g(53);
    Sample s = test::draw_sample(g, 1000, false, 2.0, 0.5);
    AnalysisConfig cfg = config(1.0, 0.2, -5.0, 10.0);
    ArProblem prob(s, cfg, 0.5);
    ConfidenceSet cs = prob.compute();
    ASSERT_EQ(cs.shape, Shape::interval);
    ASSERT_EQ(cs.endpoints.size(), 2u);
    EXPECT_LE(cs.endpoints[0], cs.endpoints[1]);
    WeightVector wv = weights(s, FitSpec{}.bandwidth(0.5));
    double ratio = srd_estimate(wv, s.y) / srd_estimate(wv, s.t);
    EXPECT_TRUE(cs.contains(ratio));
    EXPECT_GT(cs.tau_t_ci.lower, 0.0);
    expect_matches_scan(prob, cs);
    // Each root sits where the t-statistic equals the critical value.
    ASSERT_EQ(cs.diagnostics.size(), 2u);
    for (const auto& d : cs.diagnostics) {
        EXPECT_LE(std::abs(d.p_value), 1e-6);
        EXPECT_NEAR(std::abs(d.tau_hat / d.sd), cv(cfg.alpha, d.ratio), 1e-4);
    }
}

TEST(Inversion, WeakTreatmentGivesComplement)
{
    std::mt19937_64 g(54);
    Sample s = draw_direct(g, 1000, 1.0, 0.0, 0.1);
    AnalysisConfig cfg = config(0.5, 0.2);
    ArProblem prob(s, cfg, 0.5);
    ConfidenceSet cs = prob.compute();
    EXPECT_LE(cs.tau_t_ci.lower, 0.0);
    EXPECT_GE(cs.tau_t_ci.upper, 0.0);
    ASSERT_EQ(cs.shape, Shape::complement_of_interval);
    ASSERT_EQ(cs.endpoints.size(), 2u);
    EXPECT_LT(cs.endpoints[0], cs.endpoints[1]);
    EXPECT_FALSE(cs.contains(0.5 * (cs.endpoints[0] + cs.endpoints[1])));
    EXPECT_TRUE(std::isinf(cs.length()));
    expect_matches_scan(prob, cs);
}

TEST(Inversion, NoSignalGivesRealLine)
{
    std::mt19937_64 g(55);
    Sample s = draw_direct(g, 400, 0.0, 0.0, 1.0);
    AnalysisConfig cfg = config(1.0, 1.0);
    ConfidenceSet cs = compute_cs_fixed_h(s, cfg, 0.5);
    EXPECT_EQ(cs.shape, Shape::real_line);
    EXPECT_TRUE(cs.endpoints.empty());
    EXPECT_TRUE(cs.contains(1e9));
    EXPECT_TRUE(cs.contains(-1e9));
}

TEST(Inversion, KnifeEdgeGivesHalfLine)
{
    std::mt19937_64 g(56);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::normal_distribution<double> z;
    Sample s;
    s.x = test::draw_x(g, 800, false);
    for (double x : s.x) {
        s.t.push_back(0.4 + 0.1 * x + 0.05 * u(g));
        s.y.push_back(0.5 * x + (x >= 0.0 ? 1.0 : 0.0) + 0.1 * z(g));
    }
    AnalysisConfig cfg = config(0.5, 0.1);
    const double h = 0.5;
    SrdCi before = ArProblem(s, cfg, h).srd_ci(Dep::t);
    const double kappa = before.cv * before.sd - before.estimate;
    for (std::size_t i = 0; i < s.n(); ++i)
        if (s.x[i] >= 0.0)
            s.t[i] += kappa;
    ArProblem prob(s, cfg, h);
    SrdCi after = prob.srd_ci(Dep::t);
    EXPECT_NEAR(after.lower, 0.0, 1e-12);
    EXPECT_NEAR(after.sd, before.sd, 1e-14);
    ConfidenceSet cs = prob.compute();
    EXPECT_TRUE(cs.shape == Shape::half_line_left || cs.shape == Shape::half_line_right)
        << shape_name(cs.shape);
    EXPECT_EQ(cs.endpoints.size(), 1u);
}

TEST(Inversion, NestingInAlpha)
{
    std::mt19937_64 g(57);
    for (int rep = 0; rep < 5; ++rep) {
        Sample s = rep % 2 ? draw_direct(g, 600, 1.0, 0.05, 0.2)
                           : test::draw_sample(g, 600, false, 1.0, 0.4, 0.3);
        AnalysisConfig wide = config(1.0, 0.2), narrow = wide;
        wide.alpha = 0.01;
        narrow.alpha = 0.1;
        ArProblem pw(s, wide, 0.5), pn(s, narrow, 0.5);
        for (double c = -10.0; c <= 10.0; c += 0.05)
            EXPECT_GE(pw.p_hat(c).p_value + 1e-12, pn.p_hat(c).p_value + 0.09);
        ConfidenceSet cw = pw.compute(), cn = pn.compute();
        for (double c = -10.0; c <= 10.0; c += 0.01)
            if (cn.contains(c))
                EXPECT_TRUE(cw.contains(c)) << "c=" << c;
    }
}

TEST(Inversion, ShiftScaleTranslationEquivariance)
{
    std::mt19937_64 g(58);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int rep = 0; rep < 6; ++rep) {
        Sample s = test::draw_sample(g, 500, rep % 2, 1.0, 0.5, 0.2);
        AnalysisConfig cfg = config(1.0, 0.0, -4.0, 8.0);
        ConfidenceSet base = compute_cs_fixed_h(s, cfg, 0.6);

        // y + kappa t shifts every endpoint by kappa (bias bound free of |c| when B_T = 0).
        const double kappa = u(g);
        Sample sh = s;
        for (std::size_t i = 0; i < s.n(); ++i)
            sh.y[i] += kappa * s.t[i];
        AnalysisConfig cs = cfg;
        cs.c_grid = CGrid{-4.0 + kappa, 8.0 + kappa, 100};
        ConfidenceSet shifted = compute_cs_fixed_h(sh, cs, 0.6);
        ASSERT_EQ(shifted.shape, base.shape);
        for (std::size_t k = 0; k < base.endpoints.size(); ++k)
            EXPECT_NEAR(shifted.endpoints[k], base.endpoints[k] + kappa, 1e-8);

        // lambda y with lambda B_Y scales endpoints.
        const double lambda = 0.5 + std::abs(u(g));
        AnalysisConfig scfg = config(lambda * 1.0, 0.0, -4.0 * lambda, 8.0 * lambda);
        Sample sc = s;
        for (auto& v : sc.y)
            v *= lambda;
        ConfidenceSet scaled = compute_cs_fixed_h(sc, scfg, 0.6);
        ASSERT_EQ(scaled.shape, base.shape);
        for (std::size_t k = 0; k < base.endpoints.size(); ++k)
            EXPECT_NEAR(scaled.endpoints[k], lambda * base.endpoints[k], 1e-8);

        // Adding a linear trend a + b x to y leaves the set unchanged.
        AnalysisConfig tcfg = config(1.0, 0.2, -4.0, 8.0);
        ConfidenceSet tb = compute_cs_fixed_h(s, tcfg, 0.6);
        Sample tr = s;
        const double a = u(g), b = u(g);
        for (std::size_t i = 0; i < s.n(); ++i)
            tr.y[i] += a + b * s.x[i];
        ConfidenceSet tt = compute_cs_fixed_h(tr, tcfg, 0.6);
        ASSERT_EQ(tt.shape, tb.shape);
        for (std::size_t k = 0; k < tb.endpoints.size(); ++k)
            EXPECT_NEAR(tt.endpoints[k], tb.endpoints[k], 1e-8);
    }
}

TEST(Inversion, FarTailsFollowTreatmentInterval)
{
    std::mt19937_64 g(59);
    int agree = 0, total = 0;
    for (int rep = 0; rep < 12; ++rep) {
        double tj = 0.03 * rep;
        Sample s = draw_direct(g, 500, 1.0, tj, 0.2);
        AnalysisConfig cfg = config(1.0, 0.2);
        ArProblem prob(s, cfg, 0.5);
        SrdCi tt = prob.srd_ci(Dep::t);
        bool zero_in = tt.lower <= 0.0 && tt.upper >= 0.0;
        double margin = std::min(std::abs(tt.lower), std::abs(tt.upper)) / tt.sd;
        if (margin < 1e-3)
            continue;
        for (double c : {-1e6, 1e6}) {
            ++total;
            agree += (prob.p_hat(c).p_value >= 0.0) == zero_in;
        }
    }
    EXPECT_GT(total, 0);
    EXPECT_EQ(agree, total);
}

TEST(Inversion, SrdCi)
{
    std::mt19937_64 g(60);
    Sample s = test::draw_sample(g, 2000, false, 1.0, 0.5);
    AnalysisConfig cfg;
    SrdCi ci = srd_ci(s, Dep::y, cfg);
    EXPECT_EQ(ci.bias_bound, 0.0);
    EXPECT_NEAR(ci.cv, 1.959964, 1e-5);
    EXPECT_NEAR(ci.upper - ci.estimate, ci.cv * ci.sd, 1e-14);
    EXPECT_NEAR(ci.estimate - ci.lower, ci.cv * ci.sd, 1e-14);

    cfg.bounds.b_y = 3.0;
    SrdCi b = srd_ci(s, Dep::y, cfg);
    EXPECT_NEAR(b.half_length(), cv(cfg.alpha, b.ratio) * b.sd, 1e-12);
    EXPECT_GT(b.ratio, 0.0);
    EXPECT_GE(b.h, h_floor(s, cfg.fit, cfg.eta).h);
}

TEST(Inversion, DegenerateVarianceOnNoiselessJump)
{
    std::mt19937_64 g(61);
    Sample s = test::draw_sample(g, 300, false, 1.0, 0.5);
    for (std::size_t i = 0; i < s.n(); ++i)
        s.y[i] = s.x[i] >= 0.0 ? 1.0 : 0.0;
    AnalysisConfig cfg;
    cfg.bounds.b_y = 1.0;
    EXPECT_THROW(srd_ci(s, Dep::y, cfg), DegenerateVariance);
}

TEST(Inversion, ClassificationFailureAfterExpansions)
{
    std::mt19937_64 g(62);
    Sample s = test::draw_sample(g, 1000, false, 2.0, 0.5);
    // Each expansion doubles the width around 11: [9,13], [7,15], [3,19], [-5,27].
    AnalysisConfig cfg = config(1.0, 0.2, 10.0, 12.0);
    try {
        compute_cs_fixed_h(s, cfg, 0.5);
        FAIL() << "expected a classification failure";
    } catch (const ClassificationFailure& e) {
        EXPECT_EQ(exit_code(e.kind()), 5);
    }
    cfg.max_expansions = 4;
    ConfidenceSet cs = compute_cs_fixed_h(s, cfg, 0.5);
    EXPECT_EQ(cs.shape, Shape::interval);
    EXPECT_EQ(cs.expansions, 4);
    EXPECT_EQ(cs.j_points, 1600);
    EXPECT_TRUE(cs.contains(2.0));
}

TEST(Inversion, AutoRangeAndOptimizedSet)
{
    std::mt19937_64 g(63);
    Sample s = test::draw_sample(g, 1000, false, 2.0, 0.5);
    AnalysisConfig cfg;
    cfg.bounds.b_y = 1.0;
    cfg.bounds.b_t = 0.2;
    ArProblem prob(s, cfg);
    CGrid r = prob.auto_c_range();
    EXPECT_LT(r.c_low, 2.0);
    EXPECT_GT(r.c_high, 2.0);
    ConfidenceSet cs = prob.compute();
    EXPECT_EQ(cs.shape, Shape::interval);
    EXPECT_FALSE(cs.fixed_h);
    for (const auto& d : cs.diagnostics)
        EXPECT_GE(d.h_used, h_floor(s, cfg.fit, cfg.eta).h);
    expect_matches_scan(prob, cs, 5000);
}

TEST(Inversion, NaiveModeDropsBias)
{
    std::mt19937_64 g(64);
    Sample s = test::draw_sample(g, 800, false, 2.0, 0.5);
    AnalysisConfig cfg = config(5.0, 1.0);
    ArProblem prob(s, cfg);
    NaiveRule rule{0.4, -0.2, 0.1, 0.3};
    EXPECT_NEAR(rule.curvature(1.0, -2.0), std::max(std::abs(0.4 - 0.2), std::abs(-0.2 - 0.6)),
                1e-15);
    prob.set_naive(rule);
    AuxInference a = prob.p_hat(2.0);
    EXPECT_EQ(a.bias_bound, 0.0);
    EXPECT_EQ(a.ratio, 0.0);
    SrdCi t = prob.srd_ci(Dep::t);
    EXPECT_NEAR(t.cv, cv(cfg.alpha, 0.0), 1e-12);
}

TEST(Inversion, ShapeNames)
{
    EXPECT_EQ(shape_name(Shape::interval), "interval");
    EXPECT_EQ(shape_name(Shape::complement_of_interval), "complement_of_interval");
    EXPECT_EQ(shape_name(Shape::real_line), "real_line");
    EXPECT_EQ(shape_name(Shape::half_line_left), "half_line_left");
    EXPECT_EQ(shape_name(Shape::half_line_right), "half_line_right");
}
