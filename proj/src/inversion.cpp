#include "arfrd/inversion.hpp"
#include "arfrd/errors.hpp"
#include "arfrd/folded_normal.hpp"
#include "arfrd/parallel.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace arfrd {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

std::string shape_name(Shape s)
{
    switch (s) {
    case Shape::interval: return "interval";
    case Shape::complement_of_interval: return "complement_of_interval";
    case Shape::real_line: return "real_line";
    case Shape::half_line_left: return "half_line_left";
    case Shape::half_line_right: return "half_line_right";
    case Shape::union_of_intervals: return "union_of_intervals";
    }
    return "?";
}

bool ConfidenceSet::contains(double c) const
{
    for (const auto& p : pieces)
        if (c >= p.lo && c <= p.hi)
            return true;
    return false;
}

double ConfidenceSet::length() const
{
    double l = 0.0;
    for (const auto& p : pieces)
        l += p.hi - p.lo;
    return l;
}

ArProblem::ArProblem(const Sample& s, const AnalysisConfig& cfg) : cfg_(cfg)
{
    validate(cfg_);
    validate(s);
    nv_ = nn_variances(s, cfg_.r_neighbors);
    init(s, cfg_.fixed_bandwidth);
}

ArProblem::ArProblem(const Sample& s, const AnalysisConfig& cfg, NnVarianceComponents nv)
    : cfg_(cfg), nv_(std::move(nv))
{
    validate(cfg_);
    validate(s);
    init(s, cfg_.fixed_bandwidth);
}

ArProblem::ArProblem(const Sample& s, const AnalysisConfig& cfg, double h) : cfg_(cfg)
{
    cfg_.fixed_bandwidth = h;
    validate(cfg_);
    validate(s);
    nv_ = nn_variances(s, cfg_.r_neighbors);
    init(s, h);
}

ArProblem::ArProblem(const AnalysisConfig& cfg, NnVarianceComponents nv,
                     std::shared_ptr<const BandwidthPath> path, bool fixed)
    : cfg_(cfg), nv_(std::move(nv)), path_(std::move(path)), fixed_(fixed)
{
    validate(cfg_);
    if (!path_ || path_->size() == 0)
        throw InsufficientSupport("either", 0.0);
}

void ArProblem::init(const Sample& s, std::optional<double> h)
{
    if (h) {
        fixed_ = true;
        path_ = std::make_shared<const BandwidthPath>(s, nv_, cfg_.fit, std::vector<double>{*h});
    } else {
        path_ = std::make_shared<const BandwidthPath>(s, nv_, cfg_.fit);
    }
}

double NaiveRule::curvature(double a_y, double a_t) const
{
    return std::max(std::abs(a_y * y_plus + a_t * t_plus), std::abs(a_y * y_minus + a_t * t_minus));
}

std::size_t ArProblem::pick(double a_y, double a_t) const
{
    if (!naive_)
        return choose_bandwidth(*path_, a_y, a_t, cfg_.bounds, cfg_.alpha, cfg_.eta, fixed_).index;
    if (fixed_)
        return 0;
    const double k = naive_->curvature(a_y, a_t);
    std::size_t best = path_->size();
    double best_mse = inf;
    for (std::size_t j = 0; j < path_->size(); ++j) {
        const Candidate& cd = path_->candidates()[j];
        double var = a_y * a_y * cd.a_y + a_t * a_t * cd.a_t + 2.0 * a_y * a_t * cd.a_yt;
        if (!(var > 0.0))
            continue;
        double b = k * cd.g.g_sym;
        double mse = b * b + var;
        if (mse <= best_mse * (1.0 + 1e-12)) {
            best_mse = std::min(mse, best_mse);
            best = j;
        }
    }
    if (best == path_->size())
        throw DegenerateVariance("zero standard error at every candidate bandwidth");
    return best;
}

AuxInference ArProblem::p_hat(double c) const
{
    const SmoothnessBounds none;
    const SmoothnessBounds& b = naive_ ? none : cfg_.bounds;
    auto e = path_->evaluate(pick(1.0, -c), 1.0, -c, b, cfg_.alpha);
    if (!(e.sd > 0.0))
        throw DegenerateVariance("zero standard error at c=" + std::to_string(c));
    AuxInference a;
    a.c = c;
    a.tau_hat = e.tau;
    a.sd = e.sd;
    a.bias_bound = e.bias;
    a.ratio = e.ratio;
    a.h_used = e.h;
    a.p_value = 1.0 - cfg_.alpha - folded_cdf(std::abs(e.tau / e.sd), e.ratio);
    return a;
}

SrdCi ArProblem::srd_ci(Dep dep) const
{
    double ay = dep == Dep::y ? 1.0 : 0.0, at = 1.0 - ay;
    const SmoothnessBounds none;
    const SmoothnessBounds& b = naive_ ? none : cfg_.bounds;
    std::size_t k = pick(ay, at);
    auto e = path_->evaluate(k, ay, at, b, cfg_.alpha);
    if (!(e.sd > 0.0))
        throw DegenerateVariance("zero standard error for the jump estimate");
    bool flagged = false;
    if (!naive_ && !fixed_)
        path_->floor_index(cfg_.eta, &flagged);
    SrdCi ci;
    ci.estimate = e.tau;
    ci.sd = e.sd;
    ci.bias_bound = e.bias;
    ci.ratio = e.ratio;
    ci.cv = e.cv;
    ci.h = e.h;
    ci.floor_flagged = flagged;
    ci.lower = e.tau - e.objective;
    ci.upper = e.tau + e.objective;
    return ci;
}

CGrid ArProblem::auto_c_range() const
{
    SrdCi ty = srd_ci(Dep::y), tt = srd_ci(Dep::t);
    double hl_y = ty.half_length(), hl_t = tt.half_length();
    double center, half;
    if (tt.lower > 0.0 || tt.upper < 0.0) {
        center = ty.estimate / tt.estimate;
        half = 10.0 * (hl_y + std::abs(center) * hl_t) / std::abs(tt.estimate);
    } else {
        center = 0.0;
        half = 10.0 * (std::abs(ty.estimate) + hl_y) / std::max(hl_t, std::abs(tt.estimate));
    }
    if (!std::isfinite(center))
        center = 0.0;
    if (!(half > 0.0) || !std::isfinite(half))
        half = 10.0;
    half = std::max(half, 1e-3 * (1.0 + std::abs(center)));
    return CGrid{center - half, center + half, 100};
}

ConfidenceSet ArProblem::compute() const
{
    CGrid g = cfg_.c_grid ? *cfg_.c_grid : auto_c_range();
    ConfidenceSet cs;
    cs.alpha = cfg_.alpha;
    cs.fixed_h = fixed_;
    cs.tau_t_ci = srd_ci(Dep::t);
    const SrdCi& tt = cs.tau_t_ci;
    const double tscale = std::max({std::abs(tt.estimate), tt.half_length(), 1e-300});
    const bool knife = std::abs(tt.lower) <= 1e-9 * tscale || std::abs(tt.upper) <= 1e-9 * tscale;
    const bool zero_in = tt.lower <= 0.0 && tt.upper >= 0.0;

    double lo = g.c_low, hi = g.c_high;
    int J = g.j_points;
    for (int pass = 0;; ++pass) {
        std::vector<double> cs_grid(std::size_t(J) + 1), pv(std::size_t(J) + 1);
        for (int j = 0; j <= J; ++j)
            cs_grid[std::size_t(j)] = lo + j * (hi - lo) / J;
        cs_grid.back() = hi;
        parallel_for(
            cs_grid.size(), [&](std::size_t j) { pv[j] = p_hat(cs_grid[j]).p_value; },
            cfg_.threads);

        std::vector<double> roots;
        // Far tighter than the 1e-8 (c_U - c_L) contract so transformed problems with
        // different grids land on the same endpoints.
        const double ctol = 1e-14 * (hi - lo);
        for (std::size_t j = 0; j + 1 < cs_grid.size(); ++j) {
            bool a = pv[j] >= 0.0, b = pv[j + 1] >= 0.0;
            if (a == b)
                continue;
            // Converge on c rather than stopping at small |p|: flat stretches of p_hat would
            // otherwise leave endpoints far from the crossing.
            auto f = [&](double c) { return p_hat(c).p_value; };
            double fa = pv[j], fb = pv[j + 1];
            double root;
            if (fa == 0.0)
                root = cs_grid[j];
            else if (fb == 0.0)
                root = cs_grid[j + 1];
            else {
                std::uintmax_t iters = 200;
                auto tol = [ctol](double x, double y) {
                    return std::abs(x - y) <= std::max(ctol, 4e-16 * std::max(std::abs(x), std::abs(y)));
                };
                auto br = boost::math::tools::toms748_solve(f, cs_grid[j], cs_grid[j + 1], fa, fb,
                                                            tol, iters);
                root = 0.5 * (br.first + br.second);
            }
            roots.push_back(root);
        }
        const bool in_left = pv.front() >= 0.0, in_right = pv.back() >= 0.0;
        bool consistent = knife || (zero_in ? (in_left && in_right) : (!in_left && !in_right));
        if (consistent && roots.empty() && !in_left)
            consistent = false; // nothing on the grid belongs to the set
        if (consistent) {
            cs.c_low = lo;
            cs.c_high = hi;
            cs.j_points = J;
            cs.expansions = pass;
            bool inside = in_left;
            double start = -inf;
            for (double r : roots) {
                if (inside)
                    cs.pieces.push_back({start, r});
                else
                    start = r;
                inside = !inside;
            }
            if (inside)
                cs.pieces.push_back({start, inf});
            for (double r : roots)
                cs.diagnostics.push_back(p_hat(r));
            const auto& P = cs.pieces;
            if (P.size() == 1 && P[0].lo == -inf && P[0].hi == inf)
                cs.shape = Shape::real_line;
            else if (P.size() == 1 && std::isfinite(P[0].lo) && std::isfinite(P[0].hi))
                cs.shape = Shape::interval, cs.endpoints = {P[0].lo, P[0].hi};
            else if (P.size() == 1 && P[0].lo == -inf)
                cs.shape = Shape::half_line_left, cs.endpoints = {P[0].hi};
            else if (P.size() == 1)
                cs.shape = Shape::half_line_right, cs.endpoints = {P[0].lo};
            else if (P.size() == 2 && P[0].lo == -inf && P[1].hi == inf)
                cs.shape = Shape::complement_of_interval, cs.endpoints = {P[0].hi, P[1].lo};
            else
                cs.shape = Shape::union_of_intervals, cs.endpoints = roots;
            return cs;
        }
        if (pass >= cfg_.max_expansions)
            throw ClassificationFailure(
                "grid on [" + std::to_string(lo) + ", " + std::to_string(hi) + "] with " +
                std::to_string(roots.size()) + " roots does not match the tau_T interval [" +
                std::to_string(tt.lower) + ", " + std::to_string(tt.upper) +
                "] after " + std::to_string(pass) + " expansions");
        double mid = 0.5 * (lo + hi), half = hi - lo;
        lo = mid - half;
        hi = mid + half;
        J *= 2;
    }
}

AuxInference p_hat(const Sample& s, const NnVarianceComponents& nv, const AnalysisConfig& cfg,
                   double c)
{
    return ArProblem(s, cfg, nv).p_hat(c);
}

ConfidenceSet compute_cs(const Sample& s, const AnalysisConfig& cfg)
{
    return ArProblem(s, cfg).compute();
}

ConfidenceSet compute_cs_fixed_h(const Sample& s, const AnalysisConfig& cfg, double h)
{
    return ArProblem(s, cfg, h).compute();
}

SrdCi srd_ci(const Sample& s, Dep dep, const AnalysisConfig& cfg)
{
    return ArProblem(s, cfg).srd_ci(dep);
}

} // namespace arfrd
