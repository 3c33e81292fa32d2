#include "arfrd/bandwidth.hpp"
#include "arfrd/errors.hpp"
#include "arfrd/folded_normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace arfrd {

std::vector<double> candidate_set(const Sample& s, const FitSpec& fit, int refine)
{
    std::vector<double> ax;
    for (double x : s.x)
        if (x != 0.0)
            ax.push_back(std::abs(x));
    std::sort(ax.begin(), ax.end());
    ax.erase(std::unique(ax.begin(), ax.end()), ax.end());
    std::vector<double> hs;
    for (std::size_t k = 0; k < ax.size(); ++k) {
        if (k > 0)
            for (int j = 1; j <= refine; ++j)
                hs.push_back(ax[k - 1] + (ax[k] - ax[k - 1]) * j / (refine + 1));
        hs.push_back(ax[k]);
    }
    auto ord = side_order(s.x);
    const std::size_t need = std::size_t(fit.p + 1);
    std::vector<double> ok;
    for (double h : hs) {
        std::size_t mr = window_size(s.x, ord.right, h, fit.kernel);
        std::size_t ml = window_size(s.x, ord.left, h, fit.kernel);
        if (distinct_count(s.x, ord.right, mr) >= need && distinct_count(s.x, ord.left, ml) >= need)
            ok.push_back(h);
    }
    return ok;
}

BandwidthPath::BandwidthPath(const Sample& s, const NnVarianceComponents& nv, const FitSpec& fit,
                             int refine)
    : fit_(fit)
{
    auto hs = candidate_set(s, fit, refine);
    if (hs.empty())
        throw InsufficientSupport("either", 0.0);
    build(s, nv, hs, true);
}

BandwidthPath::BandwidthPath(const Sample& s, const NnVarianceComponents& nv, const FitSpec& fit,
                             const std::vector<double>& hs)
    : fit_(fit)
{
    build(s, nv, hs, false);
}

void BandwidthPath::build(const Sample& s, const NnVarianceComponents& nv,
                          const std::vector<double>& hs, bool skip_invalid)
{
    const int p = fit_.p, v = fit_.v;
    auto ord = side_order(s.x);
    const double kfac = [&] {
        double f = 1.0;
        for (int j = 2; j <= p + 1; ++j)
            f *= j;
        return ((p - v) % 2 == 0 ? 1.0 : -1.0) / f;
    }();
    std::vector<double> buf;
    const bool have_nv = !nv.sig2_y.empty();
    cands_.reserve(hs.size());
    for (double h : hs) {
        Candidate c;
        c.h = h;
        double wmax = 0.0, wsum = 0.0, sp = 0.0, sm = 0.0;
        bool valid = true;
        for (int side = 0; side < 2 && valid; ++side) {
            const auto& o = side == 0 ? ord.right : ord.left;
            std::size_t m = window_size(s.x, o, h, fit_.kernel);
            if (distinct_count(s.x, o, m) < std::size_t(p + 1)) {
                if (!skip_invalid)
                    throw InsufficientSupport(side == 0 ? "right" : "left", h);
                valid = false;
                break;
            }
            buf.resize(m);
            side_weights(s.x, o, m, h, fit_.kernel, p, v, buf.data());
            const double sg = side == 0 ? 1.0 : -1.0;
            for (std::size_t j = 0; j < m; ++j) {
                const std::size_t i = o[j];
                const double w = sg * buf[j];
                const double w2 = w * w;
                c.tau_y += w * s.y[i];
                c.tau_t += w * s.t[i];
                if (have_nv) {
                    c.a_y += w2 * nv.sig2_y[i];
                    c.a_t += w2 * nv.sig2_t[i];
                    c.a_yt += w2 * nv.sig_yt[i];
                }
                wmax = std::max(wmax, w2);
                wsum += w2;
                (side == 0 ? sp : sm) += buf[j] * std::pow(s.x[i], p + 1);
            }
        }
        if (!valid)
            continue;
        c.g.g_plus = kfac * sp;
        c.g.g_minus = kfac * sm;
        // sign(x) x^{p+1} w_i = +w_plus x^{p+1} on the right and (-w_minus)(-x^{p+1}) on the left.
        c.g.g_sym = kfac * (sp + sm);
        c.w_ratio = wsum > 0.0 ? wmax / wsum : 1.0;
        cands_.push_back(c);
    }
}

CandidateEval BandwidthPath::evaluate(std::size_t k, double a_y, double a_t,
                                      const SmoothnessBounds& b, double alpha) const
{
    const Candidate& c = cands_.at(k);
    CandidateEval e;
    e.h = c.h;
    e.tau = a_y * c.tau_y + a_t * c.tau_t;
    double var = a_y * a_y * c.a_y + a_t * a_t * c.a_t + 2.0 * a_y * a_t * c.a_yt;
    e.sd = var > 0.0 ? std::sqrt(var) : 0.0;
    double ay = std::abs(a_y), at = std::abs(a_t);
    if (b.symmetric())
        e.bias = std::abs((ay * b.b_y + at * b.b_t) * c.g.g_sym);
    else
        e.bias = std::abs((ay * b.y_plus() + at * b.t_plus()) * c.g.g_plus +
                          (ay * b.y_minus() + at * b.t_minus()) * c.g.g_minus);
    if (e.sd > 0.0) {
        e.ratio = e.bias / e.sd;
        e.cv = cv(alpha, e.ratio);
        e.objective = e.cv * e.sd;
    } else {
        e.ratio = std::numeric_limits<double>::infinity();
        e.cv = std::numeric_limits<double>::infinity();
        e.objective = std::numeric_limits<double>::infinity();
    }
    return e;
}

std::size_t BandwidthPath::argmin(double a_y, double a_t, const SmoothnessBounds& b,
                                  double alpha, std::size_t from) const
{
    const std::size_t m = cands_.size();
    const double cv0 = cv(alpha, 0.0);
    const double z1 = norm_quantile(1.0 - alpha);
    const bool sym = b.symmetric();
    const double ay = std::abs(a_y), at = std::abs(a_t);
    // cv(r) lies in [max(cv0, r + z1), r + cv0]; only candidates whose lower bound beats
    // the best upper bound need the exact critical value.
    std::vector<double> sd(m), bias(m);
    double best_ub = std::numeric_limits<double>::infinity();
    for (std::size_t k = from; k < m; ++k) {
        const Candidate& c = cands_[k];
        double var = a_y * a_y * c.a_y + a_t * a_t * c.a_t + 2.0 * a_y * a_t * c.a_yt;
        sd[k] = var > 0.0 ? std::sqrt(var) : 0.0;
        bias[k] = sym ? std::abs((ay * b.b_y + at * b.b_t) * c.g.g_sym)
                      : std::abs((ay * b.y_plus() + at * b.t_plus()) * c.g.g_plus +
                                 (ay * b.y_minus() + at * b.t_minus()) * c.g.g_minus);
        if (sd[k] > 0.0)
            best_ub = std::min(best_ub, bias[k] + cv0 * sd[k]);
    }
    std::size_t best = m;
    double best_obj = std::numeric_limits<double>::infinity();
    for (std::size_t k = from; k < m; ++k) {
        if (!(sd[k] > 0.0))
            continue;
        double lb = std::max(cv0 * sd[k], bias[k] + z1 * sd[k]);
        if (lb > best_ub * (1.0 + 1e-9))
            continue;
        double obj = cv(alpha, bias[k] / sd[k]) * sd[k];
        if (best == m || obj < best_obj * (1.0 - 1e-12)) {
            best = k;
            best_obj = obj;
        } else if (obj <= best_obj * (1.0 + 1e-12)) {
            best = k; // candidates are ascending, so a tie moves to the larger h
            best_obj = std::min(best_obj, obj);
        }
    }
    return best;
}

std::size_t BandwidthPath::floor_index(double eta, bool* flagged) const
{
    for (std::size_t k = 0; k < cands_.size(); ++k)
        if (cands_[k].w_ratio < eta) {
            if (flagged)
                *flagged = false;
            return k;
        }
    if (flagged)
        *flagged = true;
    return cands_.empty() ? 0 : cands_.size() - 1;
}

FloorResult h_floor(const Sample& s, const FitSpec& spec, double eta)
{
    if (!(eta > 0.0 && eta <= 1.0))
        throw Error(ErrorKind::usage, "eta must lie in (0, 1]");
    auto hs = candidate_set(s, spec);
    if (hs.empty())
        throw InsufficientSupport("either", 0.0);
    FloorResult r;
    for (double h : hs) {
        FitSpec f = spec;
        f.bandwidth(h);
        if (w_ratio(weights(s, f)) < eta) {
            r.h = h;
            return r;
        }
    }
    r.h = hs.back();
    r.flagged = true;
    return r;
}

BandwidthResult choose_bandwidth(const BandwidthPath& path, double a_y, double a_t,
                                 const SmoothnessBounds& b, double alpha, double eta, bool fixed)
{
    if (path.size() == 0)
        throw InsufficientSupport("either", 0.0);
    BandwidthResult r;
    if (fixed) {
        auto e = path.evaluate(0, a_y, a_t, b, alpha);
        if (!(e.sd > 0.0))
            throw DegenerateVariance("zero standard error at the fixed bandwidth");
        r.h_star = r.h_min = r.h_used = e.h;
        r.objective = e.objective;
        r.index = 0;
        return r;
    }
    bool flagged = false;
    std::size_t kf = path.floor_index(eta, &flagged);
    std::size_t ku = path.argmin(a_y, a_t, b, alpha, kf);
    if (ku == path.size())
        throw DegenerateVariance("zero standard error at every candidate bandwidth above the floor");
    std::size_t ks = path.argmin(a_y, a_t, b, alpha);
    if (ks == path.size())
        ks = ku;
    auto e = path.evaluate(ku, a_y, a_t, b, alpha);
    if (!(e.sd > 0.0))
        throw DegenerateVariance("zero standard error at the floored bandwidth");
    r.h_star = path.candidates()[ks].h;
    r.h_min = path.candidates()[kf].h;
    r.h_used = e.h;
    r.objective = e.objective;
    r.index = ku;
    r.floor_bound = ks < kf;
    r.floor_flagged = flagged;
    return r;
}

BandwidthResult optimize_bandwidth(const Sample& s, const NnVarianceComponents& nv,
                                   const AnalysisConfig& cfg, double c)
{
    if (cfg.fixed_bandwidth) {
        BandwidthPath path(s, nv, cfg.fit, std::vector<double>{*cfg.fixed_bandwidth});
        return choose_bandwidth(path, 1.0, -c, cfg.bounds, cfg.alpha, cfg.eta, true);
    }
    BandwidthPath path(s, nv, cfg.fit);
    return choose_bandwidth(path, 1.0, -c, cfg.bounds, cfg.alpha, cfg.eta);
}

} // namespace arfrd
