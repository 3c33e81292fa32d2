#include "arfrd/local_poly.hpp"
#include "arfrd/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace arfrd {

SideOrder side_order(const std::vector<double>& x)
{
    SideOrder o;
    for (std::size_t i = 0; i < x.size(); ++i)
        (x[i] >= 0.0 ? o.right : o.left).push_back(i);
    auto by_abs = [&](std::size_t a, std::size_t b) {
        double xa = std::abs(x[a]), xb = std::abs(x[b]);
        return xa < xb || (xa == xb && a < b);
    };
    std::sort(o.right.begin(), o.right.end(), by_abs);
    std::sort(o.left.begin(), o.left.end(), by_abs);
    return o;
}

std::size_t window_size(const std::vector<double>& x, const std::vector<std::size_t>& order,
                        double h, Kernel k)
{
    auto inside = [&](std::size_t i) {
        double a = std::abs(x[i]);
        return k == Kernel::uniform ? a <= h : a < h;
    };
    auto it = std::partition_point(order.begin(), order.end(), inside);
    return std::size_t(it - order.begin());
}

std::size_t distinct_count(const std::vector<double>& x, const std::vector<std::size_t>& order,
                           std::size_t m)
{
    // Sorted by |x| within one side, so equal values are adjacent.
    std::size_t d = 0;
    for (std::size_t j = 0; j < m; ++j)
        if (j == 0 || x[order[j]] != x[order[j - 1]])
            ++d;
    return d;
}

void side_weights(const std::vector<double>& x, const std::vector<std::size_t>& order,
                  std::size_t m, double h, Kernel k, int p, int v, double* out)
{
    const int q = p + 1;
    Eigen::MatrixXd a(m, q);
    Eigen::VectorXd sk(m);
    for (std::size_t j = 0; j < m; ++j) {
        double u = x[order[j]] / h;
        sk[j] = std::sqrt(kernel_value(k, u));
        double pw = 1.0, fact = 1.0;
        for (int c = 0; c < q; ++c) {
            if (c > 0) {
                pw *= u;
                fact *= c;
            }
            a(j, c) = sk[j] * pw / fact;
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd r = qr.matrixQR().topRows(q).triangularView<Eigen::Upper>();
    Eigen::VectorXd e = Eigen::VectorXd::Zero(q);
    e[v] = 1.0;
    // w = sqrt(K) .* (Q R^{-T} e_v), rescaled from the x/h basis back to x.
    Eigen::VectorXd u = r.transpose().triangularView<Eigen::Lower>().solve(e);
    Eigen::VectorXd full = Eigen::VectorXd::Zero(m);
    full.head(q) = u;
    Eigen::VectorXd qu = qr.householderQ() * full;
    double scale = std::pow(h, -v);
    for (std::size_t j = 0; j < m; ++j)
        out[j] = sk[j] * qu[j] * scale;
}

WeightVector weights(const Sample& s, const FitSpec& spec)
{
    if (spec.p < 0 || spec.v < 0 || spec.v > spec.p)
        throw Error(ErrorKind::usage, "need 0 <= v <= p");
    if (!(spec.h_plus > 0.0) || !(spec.h_minus > 0.0))
        throw Error(ErrorKind::usage, "bandwidth must be positive");
    WeightVector wv;
    wv.p = spec.p;
    wv.v = spec.v;
    wv.h_plus = spec.h_plus;
    wv.h_minus = spec.h_minus;
    const std::size_t n = s.n();
    wv.x = s.x;
    wv.w.assign(n, 0.0);
    wv.w_plus.assign(n, 0.0);
    wv.w_minus.assign(n, 0.0);
    auto ord = side_order(s.x);
    std::vector<double> buf;
    auto one_side = [&](const std::vector<std::size_t>& o, double h, bool right) {
        std::size_t m = window_size(s.x, o, h, spec.kernel);
        if (distinct_count(s.x, o, m) < std::size_t(spec.p + 1))
            throw InsufficientSupport(right ? "right" : "left", h);
        buf.resize(m);
        side_weights(s.x, o, m, h, spec.kernel, spec.p, spec.v, buf.data());
        for (std::size_t j = 0; j < m; ++j) {
            std::size_t i = o[j];
            if (right) {
                wv.w_plus[i] = buf[j];
                wv.w[i] = buf[j];
            } else {
                wv.w_minus[i] = buf[j];
                wv.w[i] = -buf[j];
            }
        }
        return m;
    };
    wv.effective_n_plus = one_side(ord.right, spec.h_plus, true);
    wv.effective_n_minus = one_side(ord.left, spec.h_minus, false);
    return wv;
}

double srd_estimate(const WeightVector& wv, const std::vector<double>& dep)
{
    if (dep.size() != wv.w.size())
        throw DataError("dependent variable length does not match the sample");
    double s = 0.0;
    for (std::size_t i = 0; i < dep.size(); ++i)
        if (wv.w[i] != 0.0)
            s += wv.w[i] * dep[i];
    return s;
}

double srd_estimate(const Sample& s, const std::vector<double>& dep, const FitSpec& spec)
{
    return srd_estimate(weights(s, spec), dep);
}

double w_ratio(const std::vector<double>& w)
{
    double mx = 0.0, tot = 0.0;
    for (double v : w) {
        double v2 = v * v;
        mx = std::max(mx, v2);
        tot += v2;
    }
    if (tot == 0.0)
        throw NumericError("w_ratio is undefined for all-zero weights");
    return mx / tot;
}

double w_ratio(const WeightVector& wv) { return w_ratio(wv.w); }

} // namespace arfrd
