#include "arfrd/folded_normal.hpp"
#include "arfrd/errors.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>

namespace arfrd {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

double norm_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw NumericError("normal quantile needs p in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double folded_cdf(double x, double r)
{
    if (x < 0.0)
        throw NumericError("folded_cdf needs x >= 0");
    // Phi(x - r) - Phi(-x - r), written with erfc to keep precision in both tails.
    double v = 0.5 * (std::erfc((r - x) / std::sqrt(2.0)) - std::erfc((x + r) / std::sqrt(2.0)));
    return v < 0.0 ? 0.0 : v;
}

double cv(double alpha, double r)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw NumericError("cv needs alpha in (0, 1)");
    if (!(r >= 0.0) || !std::isfinite(r))
        throw NumericError("cv needs a finite r >= 0");
    const double target = 1.0 - alpha;
    double lo = 0.0, hi = r + 10.0;
    // Start from the one-sided approximation, which is exact in the large-r limit.
    double z = r + norm_quantile(target);
    if (r < 3.0)
        z = std::max(z, norm_quantile(1.0 - alpha / 2.0));
    if (!(z > lo && z < hi))
        z = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double f = folded_cdf(z, r) - target;
        if (f > 0.0)
            hi = z;
        else
            lo = z;
        double d = norm_pdf(z - r) + norm_pdf(z + r);
        double step = d > 0.0 ? f / d : 0.0;
        double next = z - step;
        if (!(next > lo && next < hi) || d == 0.0)
            next = 0.5 * (lo + hi);
        if (std::abs(next - z) < 1e-12 || hi - lo < 1e-12)
            return next;
        z = next;
    }
    return z;
}

} // namespace arfrd
