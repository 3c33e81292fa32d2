#include "arfrd/rkd.hpp"
#include "arfrd/errors.hpp"
#include "arfrd/local_poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace arfrd {

namespace {

AnalysisConfig rkd_config(const AnalysisConfig& cfg, const RkdSpec& spec)
{
    if (spec.v < 0 || spec.p > 3 || spec.v > spec.p || spec.p < 1)
        throw Error(ErrorKind::usage, "supported orders are 0 <= v <= p <= 3");
    AnalysisConfig c = cfg;
    c.fit.v = spec.v;
    c.fit.p = spec.p;
    c.bounds = spec.bounds;
    return c;
}

} // namespace

ConfidenceSet rkd_cs(const Sample& s, const AnalysisConfig& cfg, const RkdSpec& spec)
{
    return compute_cs(s, rkd_config(cfg, spec));
}

ConfidenceSet rkd_cs_fixed_h(const Sample& s, const AnalysisConfig& cfg, const RkdSpec& spec,
                             double h)
{
    return compute_cs_fixed_h(s, rkd_config(cfg, spec), h);
}

double beta_vp(double t, const std::vector<double>& chi, int v, int p, double h, Kernel k)
{
    if (v < 0 || v > p)
        throw Error(ErrorKind::usage, "need 0 <= v <= p");
    std::vector<double> x;
    std::vector<double> dep;
    for (double c : chi) {
        if (c < 0.0 || c >= h)
            throw Error(ErrorKind::usage, "chi must lie in [0, h)");
        x.push_back(c);
    }
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::size_t m = window_size(x, order, h, k);
    if (distinct_count(x, order, m) < std::size_t(p + 1))
        throw InsufficientSupport("right", h);
    std::vector<double> w(m);
    side_weights(x, order, m, h, k, p, v, w.data());
    double b = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double xi = x[order[j]];
        if (xi >= t)
            b += w[j] * std::pow(xi - t, p);
    }
    return b;
}

} // namespace arfrd
