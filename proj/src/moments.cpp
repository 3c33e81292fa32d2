#include "arfrd/moments.hpp"
#include "arfrd/errors.hpp"

#include <algorithm>
#include <cmath>

namespace arfrd {

double NnVarianceComponents::sig2_m(std::size_t i, double c) const
{
    double v = sig2_y[i] + c * c * sig2_t[i] - 2.0 * c * sig_yt[i];
    return v > 0.0 ? v : 0.0;
}

namespace {

double factorial(int k)
{
    double f = 1.0;
    for (int j = 2; j <= k; ++j)
        f *= j;
    return f;
}

} // namespace

BiasLoadings bias_loadings(const WeightVector& wv, int p, int v)
{
    BiasLoadings g;
    double sp = 0.0, sm = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < wv.w.size(); ++i) {
        if (wv.w[i] == 0.0 && wv.w_plus[i] == 0.0 && wv.w_minus[i] == 0.0)
            continue;
        double xp = std::pow(wv.x[i], p + 1);
        sp += wv.w_plus[i] * xp;
        sm += wv.w_minus[i] * xp;
        ss += wv.w[i] * xp * (wv.x[i] >= 0.0 ? 1.0 : -1.0);
    }
    double k = ((p - v) % 2 == 0 ? 1.0 : -1.0) / factorial(p + 1);
    g.g_plus = k * sp;
    g.g_minus = k * sm;
    g.g_sym = k * ss;
    return g;
}

double BiasLoadings::bias(const SmoothnessBounds& b, double c) const
{
    double ac = std::abs(c);
    if (b.symmetric())
        return std::abs((b.b_y + ac * b.b_t) * g_sym);
    return std::abs((b.y_plus() + ac * b.t_plus()) * g_plus +
                    (b.y_minus() + ac * b.t_minus()) * g_minus);
}

double bias_bound(const WeightVector& wv, const SmoothnessBounds& bounds, double c)
{
    if (wv.p != 1 || wv.v != 0)
        throw Error(ErrorKind::usage, "bias_bound needs local linear (v=0, p=1) weights");
    return bias_loadings(wv, 1, 0).bias(bounds, c);
}

double bias_bound_vp(const WeightVector& wv, const SmoothnessBounds& bounds, double c, int p,
                     int v)
{
    return bias_loadings(wv, p, v).bias(bounds, c);
}

NnResiduals nn_residuals(const std::vector<double>& x, const std::vector<double>& dep,
                         int r_neighbors)
{
    const std::size_t n = x.size();
    NnResiduals out;
    out.e.assign(n, 0.0);
    out.r_used.assign(n, 0);
    out.h_leverage.assign(n, 0.0);
    std::vector<std::size_t> right, left;
    for (std::size_t i = 0; i < n; ++i)
        (x[i] >= 0.0 ? right : left).push_back(i);

    auto run_side = [&](std::vector<std::size_t>& idx) {
        const std::size_t m = idx.size();
        if (m < 2)
            throw DataError("nearest-neighbour variance needs at least 2 observations per side");
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return x[a] < x[b] || (x[a] == x[b] && a < b);
        });
        const std::size_t want = std::min<std::size_t>(std::size_t(r_neighbors), m - 1);
        std::vector<std::size_t> nb;
        for (std::size_t pos = 0; pos < m; ++pos) {
            const double xi = x[idx[pos]];
            nb.clear();
            std::ptrdiff_t lo = std::ptrdiff_t(pos) - 1;
            std::size_t hi = pos + 1;
            double dmax = 0.0;
            auto dist_lo = [&] { return lo >= 0 ? xi - x[idx[std::size_t(lo)]] : HUGE_VAL; };
            auto dist_hi = [&] { return hi < m ? x[idx[hi]] - xi : HUGE_VAL; };
            while (true) {
                double dl = dist_lo(), dh = dist_hi();
                double d = std::min(dl, dh);
                if (d == HUGE_VAL)
                    break;
                // Once R neighbours are in, only exact ties with the R-th distance join.
                if (nb.size() >= want && d > dmax)
                    break;
                if (dl <= dh) {
                    nb.push_back(idx[std::size_t(lo)]);
                    --lo;
                } else {
                    nb.push_back(idx[hi]);
                    ++hi;
                }
                dmax = std::max(dmax, d);
            }
            double s0 = 0, s1 = 0, s2 = 0, sy = 0, sdy = 0;
            bool varied = false;
            const double x0 = x[nb.front()];
            for (std::size_t j : nb) {
                double d = x[j] - xi;
                s0 += 1.0;
                s1 += d;
                s2 += d * d;
                sy += dep[j];
                sdy += d * dep[j];
                if (x[j] != x0)
                    varied = true;
            }
            double pred, lev;
            if (varied) {
                double det = s0 * s2 - s1 * s1;
                pred = (s2 * sy - s1 * sdy) / det;
                lev = s2 / det;
            } else {
                pred = sy / s0;
                lev = 1.0 / s0;
            }
            std::size_t i = idx[pos];
            out.e[i] = (dep[i] - pred) / std::sqrt(1.0 + lev);
            out.r_used[i] = int(nb.size());
            out.h_leverage[i] = lev;
        }
    };
    run_side(right);
    run_side(left);
    return out;
}

NnVarianceComponents nn_variances(const Sample& s, int r_neighbors)
{
    if (r_neighbors < 1)
        throw Error(ErrorKind::usage, "r_neighbors must be positive");
    auto ry = nn_residuals(s.x, s.y, r_neighbors);
    auto rt = nn_residuals(s.x, s.t, r_neighbors);
    NnVarianceComponents nv;
    const std::size_t n = s.n();
    nv.sig2_y.resize(n);
    nv.sig2_t.resize(n);
    nv.sig_yt.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        nv.sig2_y[i] = ry.e[i] * ry.e[i];
        nv.sig2_t[i] = rt.e[i] * rt.e[i];
        nv.sig_yt[i] = ry.e[i] * rt.e[i];
    }
    nv.r_used = std::move(ry.r_used);
    nv.h_leverage = std::move(ry.h_leverage);
    return nv;
}

BiasSdBundle aux_bundle(const Sample& s, const WeightVector& wv, const NnVarianceComponents& nv,
                        const SmoothnessBounds& bounds, double c)
{
    const std::size_t n = s.n();
    if (wv.w.size() != n || nv.sig2_y.size() != n)
        throw DataError("weights, variances and sample must have equal length");
    BiasSdBundle b;
    b.c = c;
    b.h = wv.h_plus;
    double tau = 0.0, var = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (wv.w[i] == 0.0)
            continue;
        const double m = s.y[i] - c * s.t[i];
        tau += wv.w[i] * m;
        var += wv.w[i] * wv.w[i] * nv.sig2_m(i, c);
        scale += wv.w[i] * wv.w[i] * m * m;
    }
    // Residuals at rounding level (exactly linear data) count as zero.
    if (!(var > 1e-24 * scale))
        throw DegenerateVariance("all in-window variance estimates are zero at c=" +
                                 std::to_string(c));
    b.tau_hat = tau;
    b.sd = std::sqrt(var);
    b.bias_bound = bias_bound_vp(wv, bounds, c, wv.p, wv.v);
    b.ratio = b.bias_bound / b.sd;
    return b;
}

} // namespace arfrd
