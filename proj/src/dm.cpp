#include "arfrd/dm.hpp"
#include "arfrd/bandwidth.hpp"
#include "arfrd/errors.hpp"
#include "arfrd/folded_normal.hpp"

#include <cmath>
#include <memory>

namespace arfrd {

namespace {

void check_weak(double tau_t, double floor, const char* what)
{
    if (!(std::abs(tau_t) >= floor) || !std::isfinite(tau_t))
        throw WeakIdentification(std::string("delta-method interval undefined: |") + what +
                                 " tau_T| = " + std::to_string(std::abs(tau_t)) +
                                 " is below the weak-identification floor; use the AR set");
}

} // namespace

DmInference dm_ci_bias_aware(const Sample& s, const AnalysisConfig& cfg, const DmOptions& opt)
{
    validate(cfg);
    validate(s);
    return dm_ci_bias_aware(s, cfg, nn_variances(s, cfg.r_neighbors), opt);
}

DmInference dm_ci_bias_aware(const Sample& s, const AnalysisConfig& cfg,
                             const NnVarianceComponents& nv, const DmOptions& opt)
{
    const bool fixed = cfg.fixed_bandwidth.has_value();
    if (fixed)
        return dm_ci_on_path(s, cfg, BandwidthPath(s, nv, cfg.fit, std::vector<double>{*cfg.fixed_bandwidth}), true,
                             opt);
    return dm_ci_on_path(s, cfg, BandwidthPath(s, nv, cfg.fit), false, opt);
}

DmInference dm_ci_on_path(const Sample& s, const AnalysisConfig& cfg, const BandwidthPath& pth,
                          bool fixed, const DmOptions& opt)
{
    const BandwidthPath* path = &pth;
    double ty, tt;
    if (opt.prelim_h) {
        FitSpec f = cfg.fit;
        f.bandwidth(*opt.prelim_h);
        auto wv = weights(s, f);
        ty = srd_estimate(wv, s.y);
        tt = srd_estimate(wv, s.t);
    } else {
        auto by = choose_bandwidth(*path, 1, 0, cfg.bounds, cfg.alpha, cfg.eta, fixed);
        ty = path->candidates()[by.index].tau_y;
        // A noiseless treatment (sharp design) has no interval of its own; reuse the
        // outcome's bandwidth.
        std::size_t bt = by.index;
        try {
            bt = choose_bandwidth(*path, 0, 1, cfg.bounds, cfg.alpha, cfg.eta, fixed).index;
        } catch (const DegenerateVariance&) {
        }
        tt = path->candidates()[bt].tau_t;
    }
    check_weak(tt, opt.weak_floor, "preliminary");
    const double th = ty / tt;

    // U_i = (Y_i - th T_i)/tau_T up to a constant, so its nearest-neighbour variance is
    // sigma^2_M(th)/tau_T^2 and the bias loads B_Y/|tau_T| + |tau_Y| B_T/tau_T^2.
    SmoothnessBounds bu;
    const double at = std::abs(tt);
    bu.b_y = cfg.bounds.b_y / at + std::abs(ty) * cfg.bounds.b_t / (tt * tt);
    if (!cfg.bounds.symmetric()) {
        bu.b_y_plus = cfg.bounds.y_plus() / at + std::abs(ty) * cfg.bounds.t_plus() / (tt * tt);
        bu.b_y_minus = cfg.bounds.y_minus() / at + std::abs(ty) * cfg.bounds.t_minus() / (tt * tt);
    }
    const double ay = 1.0 / tt, aq = -th / tt;
    std::size_t best = 0;
    if (!fixed) {
        best = path->size();
        double best_obj = 0.0;
        for (std::size_t k = path->floor_index(cfg.eta, nullptr); k < path->size(); ++k) {
            const auto& c = path->candidates()[k];
            double var = ay * ay * c.a_y + aq * aq * c.a_t + 2.0 * ay * aq * c.a_yt;
            if (!(var > 0.0))
                continue;
            double sd = std::sqrt(var);
            double obj = cv(cfg.alpha, c.g.bias(bu, 0.0) / sd) * sd;
            if (best == path->size() || obj <= best_obj * (1.0 + 1e-12)) {
                best_obj = best == path->size() ? obj : std::min(obj, best_obj);
                best = k;
            }
        }
        if (best == path->size())
            throw DegenerateVariance("zero delta-method standard error at every bandwidth");
    }
    const auto& c = path->candidates()[best];
    double var = ay * ay * c.a_y + aq * aq * c.a_t + 2.0 * ay * aq * c.a_yt;
    if (!(var > 0.0))
        throw DegenerateVariance("zero delta-method standard error");
    check_weak(c.tau_t, opt.weak_floor, "final");

    DmInference d;
    d.h = c.h;
    d.tau_y_pre = ty;
    d.tau_t_pre = tt;
    d.theta_hat = c.tau_y / c.tau_t;
    d.sd_u = std::sqrt(var);
    d.bias_bound_u = c.g.bias(bu, 0.0);
    double half = cv(cfg.alpha, d.bias_bound_u / d.sd_u) * d.sd_u;
    d.lower = d.theta_hat - half;
    d.upper = d.theta_hat + half;
    d.u_hat.resize(s.n());
    for (std::size_t i = 0; i < s.n(); ++i)
        d.u_hat[i] = (s.y[i] - ty) / tt - ty * (s.t[i] - tt) / (tt * tt);
    return d;
}

DmInference dm_ci_naive(const Sample& s, double alpha, double h, const FitSpec& fit,
                        int r_neighbors, double weak_floor)
{
    validate(s);
    return dm_ci_naive(s, nn_variances(s, r_neighbors), alpha, h, fit, weak_floor);
}

DmInference dm_ci_naive(const Sample& s, const NnVarianceComponents& nv, double alpha, double h,
                        const FitSpec& fit, double weak_floor)
{
    AnalysisConfig cfg;
    cfg.alpha = alpha;
    cfg.fit = fit;
    cfg.fixed_bandwidth = h;
    DmOptions opt;
    opt.prelim_h = h;
    opt.weak_floor = weak_floor;
    return dm_ci_bias_aware(s, cfg, nv, opt);
}

} // namespace arfrd
