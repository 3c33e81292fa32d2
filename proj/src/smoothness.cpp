#include "arfrd/smoothness.hpp"
#include "arfrd/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace arfrd {

namespace {

struct SideData {
    std::vector<double> x;
    std::vector<double> y;
};

std::pair<SideData, SideData> split_sides(const Sample& s, Dep dep)
{
    const auto& d = dep == Dep::y ? s.y : s.t;
    SideData r, l;
    for (std::size_t i = 0; i < s.n(); ++i) {
        auto& side = s.x[i] >= 0.0 ? r : l;
        side.x.push_back(s.x[i]);
        side.y.push_back(d[i]);
    }
    return {r, l};
}

struct PolyFit {
    std::vector<double> coef;
    double r2 = 0.0;
};

PolyFit poly_ols(const SideData& sd, int degree)
{
    const std::size_t n = sd.x.size();
    const int q = degree + 1;
    std::vector<double> xs = sd.x;
    std::sort(xs.begin(), xs.end());
    std::size_t distinct = std::unique(xs.begin(), xs.end()) - xs.begin();
    if (distinct < std::size_t(q))
        throw NumericError("rank-deficient polynomial design: need " + std::to_string(q) +
                           " distinct x per side");
    // Fit in a centred and scaled variable, then map the coefficients back to raw x.
    double lo = xs.front(), hi = xs[distinct - 1];
    double mid = 0.5 * (lo + hi), sc = std::max(0.5 * (hi - lo), 1e-300);
    Eigen::MatrixXd a(n, q);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double z = (sd.x[i] - mid) / sc, pw = 1.0;
        for (int j = 0; j < q; ++j, pw *= z)
            a(i, j) = pw;
        y[i] = sd.y[i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < q)
        throw NumericError("rank-deficient polynomial design");
    Eigen::VectorXd bz = qr.solve(y);
    // sum_j bz_j ((x - mid)/sc)^j expanded in powers of x.
    std::vector<double> coef(q, 0.0);
    for (int j = 0; j < q; ++j) {
        double binom = 1.0;
        for (int k = 0; k <= j; ++k) {
            if (k > 0)
                binom = binom * (j - k + 1) / k;
            coef[k] += bz[j] * binom * std::pow(-mid, j - k) / std::pow(sc, j);
        }
    }
    Eigen::VectorXd res = y - a * bz;
    double ybar = y.mean();
    double tss = (y.array() - ybar).square().sum();
    PolyFit f;
    f.coef = coef;
    f.r2 = tss > 0.0 ? 1.0 - res.squaredNorm() / tss : 1.0;
    return f;
}

// sup |f''| over [lo, hi] for a polynomial of degree <= 4.
std::pair<double, double> sup_second(const std::vector<double>& c, double lo, double hi)
{
    auto d2 = [&](double x) {
        double v = 0.0;
        for (std::size_t j = 2; j < c.size(); ++j)
            v += double(j) * double(j - 1) * c[j] * std::pow(x, double(j - 2));
        return v;
    };
    std::vector<double> pts{lo, hi};
    if (c.size() == 5 && c[4] != 0.0) {
        double v = -6.0 * c[3] / (24.0 * c[4]);
        if (v > lo && v < hi)
            pts.push_back(v);
    }
    double best = -1.0, where = lo;
    for (double x : pts) {
        double m = std::abs(d2(x));
        if (m > best) {
            best = m;
            where = x;
        }
    }
    return {best, where};
}

RotResult rot_impl(const Sample& s, Dep dep, int degree)
{
    auto [r, l] = split_sides(s, dep);
    if (r.x.empty() || l.x.empty())
        throw DataError("rule of thumb needs data on both sides of the cutoff");
    auto fr = poly_ols(r, degree), fl = poly_ols(l, degree);
    RotResult out;
    out.order = degree;
    out.coef_plus = fr.coef;
    out.coef_minus = fl.coef;
    out.r2_plus = fr.r2;
    out.r2_minus = fl.r2;
    auto range = [](const std::vector<double>& x) {
        auto [a, b] = std::minmax_element(x.begin(), x.end());
        return std::make_pair(*a, *b);
    };
    auto [rlo, rhi] = range(r.x);
    auto [llo, lhi] = range(l.x);
    auto sr = sup_second(fr.coef, rlo, rhi), sl = sup_second(fl.coef, llo, lhi);
    if (sr.first >= sl.first) {
        out.value = sr.first;
        out.sup_location = sr.second;
    } else {
        out.value = sl.first;
        out.sup_location = sl.second;
    }
    if (degree == 2)
        out.value *= 2.0;
    return out;
}

} // namespace

RotResult rot1(const Sample& s, Dep dep) { return rot_impl(s, dep, 4); }

RotResult rot2(const Sample& s, Dep dep) { return rot_impl(s, dep, 2); }

namespace {

// min 0.5 x'Hx - g'x subject to lo <= x <= hi (lo == hi fixes a variable).
Eigen::VectorXd box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                       const Eigen::VectorXd& lo, const Eigen::VectorXd& hi)
{
    const int m = int(g.size());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
    // 0 = free, -1 = at lower, +1 = at upper, 2 = fixed
    std::vector<int> state(m, 0);
    for (int i = 0; i < m; ++i) {
        if (lo[i] == hi[i]) {
            state[i] = 2;
            x[i] = lo[i];
        } else {
            x[i] = std::clamp(0.0, lo[i], hi[i]);
        }
    }
    const double gscale = std::max(1.0, g.cwiseAbs().maxCoeff());
    for (int iter = 0; iter < 50 * m + 100; ++iter) {
        std::vector<int> free;
        for (int i = 0; i < m; ++i)
            if (state[i] == 0)
                free.push_back(i);
        Eigen::VectorXd target = x;
        if (!free.empty()) {
            const int f = int(free.size());
            Eigen::MatrixXd hf(f, f);
            Eigen::VectorXd rhs(f);
            for (int a = 0; a < f; ++a) {
                rhs[a] = g[free[a]];
                for (int j = 0; j < m; ++j)
                    if (state[j] != 0)
                        rhs[a] -= H(free[a], j) * x[j];
                for (int b = 0; b < f; ++b)
                    hf(a, b) = H(free[a], free[b]);
            }
            Eigen::VectorXd sol = hf.ldlt().solve(rhs);
            for (int a = 0; a < f; ++a)
                target[free[a]] = sol[a];
        }
        // Walk toward the subspace minimiser, stopping at the first bound hit.
        double step = 1.0;
        int block = -1;
        for (int i : free) {
            double d = target[i] - x[i];
            if (d > 0.0 && target[i] > hi[i]) {
                double t = (hi[i] - x[i]) / d;
                if (t < step)
                    step = t, block = i;
            } else if (d < 0.0 && target[i] < lo[i]) {
                double t = (lo[i] - x[i]) / d;
                if (t < step)
                    step = t, block = i;
            }
        }
        for (int i : free)
            x[i] += step * (target[i] - x[i]);
        if (block >= 0) {
            bool up = target[block] > hi[block];
            x[block] = up ? hi[block] : lo[block];
            state[block] = up ? 1 : -1;
            continue;
        }
        Eigen::VectorXd grad = H * x - g;
        int worst = -1;
        double worst_v = 1e-10 * gscale;
        for (int i = 0; i < m; ++i) {
            double v = state[i] == -1 ? -grad[i] : state[i] == 1 ? grad[i] : 0.0;
            if (v > worst_v)
                worst_v = v, worst = i;
        }
        if (worst < 0)
            return x;
        state[worst] = 0;
    }
    throw NumericError("box-constrained QP did not converge");
}

double phi(double u, double l, double r)
{
    if (u <= l)
        return 0.0;
    if (u <= r)
        return 0.5 * (u - l) * (u - l);
    return 0.5 * (r - l) * (r - l) + (r - l) * (u - r);
}

std::size_t piece_of(const std::vector<double>& knots, double u)
{
    std::size_t m = knots.size() - 1;
    for (std::size_t k = 0; k < m; ++k)
        if (u < knots[k + 1])
            return k;
    return m - 1;
}

double side_value(const SplineSide& sd, double u)
{
    double v = sd.a + sd.b * u;
    for (std::size_t k = 0; k + 1 < sd.knots.size(); ++k)
        v += sd.second[k] * phi(u, sd.knots[k], sd.knots[k + 1]);
    return v;
}

SplineSide fit_side(const std::vector<double>& u, const std::vector<double>& y, double B,
                    double x0, int nknots, double sign)
{
    const std::size_t n = u.size();
    SplineSide sd;
    double L = *std::max_element(u.begin(), u.end());
    if (!(L > 0.0))
        L = std::max(x0, 1.0);
    sd.knots.resize(std::size_t(nknots));
    for (int k = 0; k < nknots; ++k)
        sd.knots[std::size_t(k)] = L * k / (nknots - 1);
    const int M = nknots - 1;
    sd.forced_piece = int(piece_of(sd.knots, x0));

    Eigen::MatrixXd S(n, M), Z(n, 2);
    Eigen::VectorXd Y(n);
    for (std::size_t i = 0; i < n; ++i) {
        Z(i, 0) = 1.0;
        Z(i, 1) = u[i];
        Y[i] = y[i];
        for (int k = 0; k < M; ++k)
            S(i, k) = phi(u[i], sd.knots[std::size_t(k)], sd.knots[std::size_t(k) + 1]);
    }
    // Profile out the free intercept and slope.
    Eigen::HouseholderQR<Eigen::MatrixXd> zq(Z);
    Eigen::MatrixXd Q = zq.householderQ() * Eigen::MatrixXd::Identity(Eigen::Index(n), 2);
    Eigen::MatrixXd PS = S - Q * (Q.transpose() * S);
    Eigen::VectorXd PY = Y - Q * (Q.transpose() * Y);
    Eigen::MatrixXd H = PS.transpose() * PS;
    Eigen::VectorXd g = PS.transpose() * PY;
    double ridge = 1e-12 * std::max(1.0, H.diagonal().mean());
    H.diagonal().array() += ridge;
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(M, -B), hi = Eigen::VectorXd::Constant(M, B);
    lo[sd.forced_piece] = hi[sd.forced_piece] = sign * B;
    Eigen::VectorXd s = box_qp(H, g, lo, hi);
    Eigen::VectorXd ab = zq.solve(Y - S * s);
    sd.a = ab[0];
    sd.b = ab[1];
    sd.second.assign(s.data(), s.data() + M);
    sd.rss = (Y - Z * ab - S * s).squaredNorm();
    return sd;
}

} // namespace

double ExtremeFunction::value(double x) const
{
    return x >= 0.0 ? side_value(plus, x) : side_value(minus, -x);
}

double ExtremeFunction::second_derivative(double x) const
{
    const SplineSide& sd = x >= 0.0 ? plus : minus;
    return sd.second[piece_of(sd.knots, std::abs(x))];
}

ExtremeFunction extreme_function(const Sample& s, Dep dep, double B, double x0, int knots,
                                 int eval_points)
{
    if (!(B >= 0.0) || !std::isfinite(B))
        throw Error(ErrorKind::usage, "extreme_function needs a finite B >= 0");
    if (knots < 4)
        throw Error(ErrorKind::usage, "extreme_function needs at least 4 knots per side");
    if (!(x0 >= 0.0))
        throw Error(ErrorKind::usage, "x0 must be nonnegative");
    const auto& d = dep == Dep::y ? s.y : s.t;
    std::vector<double> ur, yr, ul, yl;
    for (std::size_t i = 0; i < s.n(); ++i) {
        if (s.x[i] >= 0.0) {
            ur.push_back(s.x[i]);
            yr.push_back(d[i]);
        } else {
            ul.push_back(-s.x[i]);
            yl.push_back(d[i]);
        }
    }
    if (ur.size() < 3 || ul.size() < 3)
        throw DataError("extreme_function needs at least 3 observations per side");
    ExtremeFunction ef;
    ef.bound = B;
    ef.x0 = x0;
    auto best = [&](const std::vector<double>& u, const std::vector<double>& y) {
        SplineSide a = fit_side(u, y, B, x0, knots, 1.0);
        SplineSide b = fit_side(u, y, B, x0, knots, -1.0);
        return a.rss <= b.rss ? a : b;
    };
    ef.plus = best(ur, yr);
    ef.minus = best(ul, yl);
    ef.rss = ef.plus.rss + ef.minus.rss;
    double xlo = -ef.minus.knots.back(), xhi = ef.plus.knots.back();
    int half = std::max(2, eval_points / 2);
    for (int k = 0; k < half; ++k) {
        double x = xlo + (0.0 - xlo) * k / half;
        ef.evaluations.emplace_back(x, ef.value(x));
    }
    for (int k = 0; k <= half; ++k) {
        double x = xhi * k / half;
        ef.evaluations.emplace_back(x, ef.value(x));
    }
    return ef;
}

void write_evaluations_csv(const std::string& path, const ExtremeFunction& ef)
{
    std::ofstream f(path);
    if (!f)
        throw DataError("cannot write '" + path + "'");
    f << "x,value\n" << std::setprecision(12);
    for (const auto& [x, v] : ef.evaluations)
        f << x << ',' << v << '\n';
}

} // namespace arfrd
